#pragma once

#include "hoalm/linear_map.hpp"
#include "hoalm/numeric.hpp"
#include "hoalm/vi.hpp"

#include <cstdint>
#include <iosfwd>
#include <memory>
#include <random>
#include <string>
#include <vector>

namespace hoalm {

/// Deterministic sampler used by every instance generator.
///
/// Engine: mt19937_64 seeded with the 64-bit seed. Uniforms take the top 53
/// bits of one engine draw; normals use the cosine branch of Box-Muller on two
/// uniforms; subsets are drawn by partial Fisher-Yates. Every step is spelled
/// out here so other implementations can reproduce instances bit for bit.
class SeededRng {
 public:
  static constexpr const char* kAlgorithm =
      "mt19937_64; u=(x>>11)*2^-53; normal=sqrt(-2 ln(1-u1))*cos(2 pi u2); "
      "subset=partial Fisher-Yates with j=i+floor(u*(n-i)), sorted ascending";

  explicit SeededRng(std::uint64_t seed) : engine_(seed) {}
  double uniform();
  double normal();
  /// k distinct indices from [0, n), sorted ascending.
  std::vector<Eigen::Index> subset(Eigen::Index n, Eigen::Index k);

 private:
  std::mt19937_64 engine_;
};

struct BpInstance {
  Eigen::Index m = 0;
  Eigen::Index n = 0;
  double density = 0.0;
  std::uint64_t seed = 0;
  Matrix a;
  Vector u0;
  Vector b;
};

struct McInstance {
  Eigen::Index m = 0;
  Eigen::Index n = 0;
  double density = 0.0;
  std::uint64_t seed = 0;
  Matrix full;                          // the sparse random matrix M
  std::vector<Eigen::Index> observed;   // row-major flat indices of its support
  Vector b;                             // M restricted to observed, row-major order

  std::shared_ptr<MaskLinearMap> mask() const;
};

/// Affine monotone VI F(x) = M x + q with M = B B^T / n symmetric PSD and a
/// known solution x*.
struct ViInstance {
  Eigen::Index n = 0;
  std::uint64_t seed = 0;
  MonotoneOperator op;
  Vector x0;
};

/// Gaussian A (row-major fill), support of round(density * n) entries, Gaussian
/// values on it in ascending index order, b = A u0.
BpInstance gen_bp(Eigen::Index m, Eigen::Index n, double density, std::uint64_t seed);

McInstance gen_mc(Eigen::Index m, Eigen::Index n, double density, std::uint64_t seed);

ViInstance gen_vi_affine(Eigen::Index n, std::uint64_t seed);

enum class MaskMode { forward, adjoint };

/// forward: X (m x n) -> observed entries; adjoint: observed values -> m x n
/// matrix with zeros off the support.
Matrix apply_mask_operator(const McInstance& inst, const Matrix& input, MaskMode mode);

/// Plain-text dump: a header line "<kind> <m> <n> <density> <seed>" followed by
/// whitespace-separated entries, 17 significant digits.
void write_instance(std::ostream& os, const BpInstance& inst);
void write_instance(std::ostream& os, const McInstance& inst);
BpInstance read_bp_instance(std::istream& is);
McInstance read_mc_instance(std::istream& is);

}  // namespace hoalm
