#include "hoalm/problems.hpp"

#include <algorithm>
#include <cmath>
#include <iomanip>
#include <iostream>
#include <numbers>
#include <sstream>
#include <stdexcept>

namespace hoalm {

double SeededRng::uniform() {
  return static_cast<double>(engine_() >> 11) * 0x1.0p-53;
}

double SeededRng::normal() {
  const double u1 = uniform();
  const double u2 = uniform();
  return std::sqrt(-2.0 * std::log(1.0 - u1)) * std::cos(2.0 * std::numbers::pi * u2);
}

std::vector<Eigen::Index> SeededRng::subset(Eigen::Index n, Eigen::Index k) {
  if (k < 0 || k > n) throw std::invalid_argument("SeededRng::subset: k out of range");
  std::vector<Eigen::Index> pool(static_cast<std::size_t>(n));
  for (Eigen::Index i = 0; i < n; ++i) pool[i] = i;
  for (Eigen::Index i = 0; i < k; ++i) {
    auto j = i + static_cast<Eigen::Index>(uniform() * static_cast<double>(n - i));
    if (j >= n) j = n - 1;
    std::swap(pool[i], pool[j]);
  }
  pool.resize(static_cast<std::size_t>(k));
  std::sort(pool.begin(), pool.end());
  return pool;
}

std::shared_ptr<MaskLinearMap> McInstance::mask() const {
  return std::make_shared<MaskLinearMap>(m, n, observed);
}

namespace {

void check_density(double density) {
  if (!(density > 0.0 && density <= 1.0))
    throw std::invalid_argument("density must lie in (0, 1]");
}

Matrix gaussian_matrix(SeededRng& rng, Eigen::Index rows, Eigen::Index cols) {
  Matrix out(rows, cols);
  for (Eigen::Index i = 0; i < rows; ++i)
    for (Eigen::Index j = 0; j < cols; ++j) out(i, j) = rng.normal();
  return out;
}

}  // namespace

BpInstance gen_bp(Eigen::Index m, Eigen::Index n, double density, std::uint64_t seed) {
  check_density(density);
  if (m <= 0 || n <= 0) throw std::invalid_argument("gen_bp: dimensions must be positive");
  if (density * static_cast<double>(n) < 1.0)
    throw std::invalid_argument("gen_bp: density * n < 1 gives an empty ground truth");
  if (m >= n) std::cerr << "gen_bp: warning: m >= n, system is not underdetermined\n";

  SeededRng rng(seed);
  BpInstance inst;
  inst.m = m;
  inst.n = n;
  inst.density = density;
  inst.seed = seed;
  inst.a = gaussian_matrix(rng, m, n);
  const auto nnz = static_cast<Eigen::Index>(std::lround(density * static_cast<double>(n)));
  inst.u0 = Vector::Zero(n);
  for (Eigen::Index idx : rng.subset(n, nnz)) inst.u0(idx) = rng.normal();
  inst.b = inst.a * inst.u0;
  return inst;
}

McInstance gen_mc(Eigen::Index m, Eigen::Index n, double density, std::uint64_t seed) {
  check_density(density);
  if (m <= 0 || n <= 0) throw std::invalid_argument("gen_mc: dimensions must be positive");
  const double cells = static_cast<double>(m) * static_cast<double>(n);
  if (density * cells < 1.0) throw std::invalid_argument("gen_mc: empty support");

  SeededRng rng(seed);
  McInstance inst;
  inst.m = m;
  inst.n = n;
  inst.density = density;
  inst.seed = seed;
  const auto nnz = static_cast<Eigen::Index>(std::lround(density * cells));
  inst.observed = rng.subset(m * n, nnz);
  inst.full = Matrix::Zero(m, n);
  inst.b.resize(nnz);
  for (Eigen::Index k = 0; k < nnz; ++k) {
    const double value = rng.normal();
    const Eigen::Index idx = inst.observed[k];
    inst.full(idx / n, idx % n) = value;
    inst.b(k) = value;
  }
  return inst;
}

ViInstance gen_vi_affine(Eigen::Index n, std::uint64_t seed) {
  if (n <= 0) throw std::invalid_argument("gen_vi_affine: dimension must be positive");
  SeededRng rng(seed);
  const Matrix b = gaussian_matrix(rng, n, n);
  Matrix m = b * b.transpose() / static_cast<double>(n);
  m = 0.5 * (m + m.transpose());
  Vector x_star(n);
  for (Eigen::Index i = 0; i < n; ++i) x_star(i) = rng.normal();
  Vector q = -(m * x_star);

  ViInstance inst;
  inst.n = n;
  inst.seed = seed;
  inst.op = make_affine_operator(std::move(m), std::move(q), x_star);
  inst.x0 = Vector::Zero(n);
  return inst;
}

Matrix apply_mask_operator(const McInstance& inst, const Matrix& input, MaskMode mode) {
  const auto count = static_cast<Eigen::Index>(inst.observed.size());
  if (mode == MaskMode::forward) {
    if (input.rows() != inst.m || input.cols() != inst.n)
      throw std::invalid_argument("apply_mask_operator: forward input must be m x n");
    Matrix out(count, 1);
    for (Eigen::Index k = 0; k < count; ++k) {
      const Eigen::Index idx = inst.observed[k];
      out(k, 0) = input(idx / inst.n, idx % inst.n);
    }
    return out;
  }
  if (input.size() != count || (input.cols() != 1 && input.rows() != 1))
    throw std::invalid_argument("apply_mask_operator: adjoint input must be a vector of observed values");
  Matrix out = Matrix::Zero(inst.m, inst.n);
  for (Eigen::Index k = 0; k < count; ++k) {
    const Eigen::Index idx = inst.observed[k];
    out(idx / inst.n, idx % inst.n) = input(k);
  }
  return out;
}

namespace {

void write_row(std::ostream& os, const Vector& v) {
  for (Eigen::Index i = 0; i < v.size(); ++i) os << (i ? " " : "") << v(i);
  os << '\n';
}

void write_matrix(std::ostream& os, const Matrix& a) {
  for (Eigen::Index i = 0; i < a.rows(); ++i) write_row(os, a.row(i).transpose());
}

struct Header {
  std::string kind;
  Eigen::Index m = 0, n = 0;
  double density = 0.0;
  std::uint64_t seed = 0;
};

Header read_header(std::istream& is, const std::string& expected) {
  Header h;
  if (!(is >> h.kind >> h.m >> h.n >> h.density >> h.seed) || h.kind != expected)
    throw std::runtime_error("instance dump: bad header, expected kind '" + expected + "'");
  return h;
}

double read_value(std::istream& is) {
  double v;
  if (!(is >> v)) throw std::runtime_error("instance dump: truncated entries");
  return v;
}

}  // namespace

void write_instance(std::ostream& os, const BpInstance& inst) {
  const auto flags = os.flags();
  const auto prec = os.precision();
  os << std::setprecision(17);
  os << "bp " << inst.m << ' ' << inst.n << ' ' << inst.density << ' ' << inst.seed << '\n';
  write_matrix(os, inst.a);
  write_row(os, inst.u0);
  write_row(os, inst.b);
  os.flags(flags);
  os.precision(prec);
}

void write_instance(std::ostream& os, const McInstance& inst) {
  const auto flags = os.flags();
  const auto prec = os.precision();
  os << std::setprecision(17);
  os << "mc " << inst.m << ' ' << inst.n << ' ' << inst.density << ' ' << inst.seed << '\n';
  write_matrix(os, inst.full);
  os << inst.observed.size() << '\n';
  for (std::size_t k = 0; k < inst.observed.size(); ++k) os << (k ? " " : "") << inst.observed[k];
  os << '\n';
  write_row(os, inst.b);
  os.flags(flags);
  os.precision(prec);
}

BpInstance read_bp_instance(std::istream& is) {
  const Header h = read_header(is, "bp");
  BpInstance inst;
  inst.m = h.m;
  inst.n = h.n;
  inst.density = h.density;
  inst.seed = h.seed;
  inst.a.resize(h.m, h.n);
  for (Eigen::Index i = 0; i < h.m; ++i)
    for (Eigen::Index j = 0; j < h.n; ++j) inst.a(i, j) = read_value(is);
  inst.u0.resize(h.n);
  for (Eigen::Index j = 0; j < h.n; ++j) inst.u0(j) = read_value(is);
  inst.b.resize(h.m);
  for (Eigen::Index i = 0; i < h.m; ++i) inst.b(i) = read_value(is);
  return inst;
}

McInstance read_mc_instance(std::istream& is) {
  const Header h = read_header(is, "mc");
  McInstance inst;
  inst.m = h.m;
  inst.n = h.n;
  inst.density = h.density;
  inst.seed = h.seed;
  inst.full.resize(h.m, h.n);
  for (Eigen::Index i = 0; i < h.m; ++i)
    for (Eigen::Index j = 0; j < h.n; ++j) inst.full(i, j) = read_value(is);
  std::size_t count = 0;
  if (!(is >> count)) throw std::runtime_error("instance dump: missing observed count");
  inst.observed.resize(count);
  for (auto& idx : inst.observed)
    if (!(is >> idx)) throw std::runtime_error("instance dump: truncated observed indices");
  inst.b.resize(static_cast<Eigen::Index>(count));
  for (std::size_t k = 0; k < count; ++k) inst.b(k) = read_value(is);
  return inst;
}

}  // namespace hoalm
