#include "wickbench/lattice.hpp"

#include <algorithm>
#include <bit>
#include <cmath>
#include <cstdint>
#include <cstdlib>
#include <string>

#include "wickbench/errors.hpp"

namespace wickbench {

int LatticeGeometry::cells() const {
  int c = 1;
  for (int i = 0; i < d; ++i) c *= L;
  return c;
}

int LatticeGeometry::mode_count() const { return M * cells(); }

int LatticeGeometry::mode_index(const std::vector<int>& cell, int label) const {
  if (static_cast<int>(cell.size()) != d) throw SiteOutOfRange("mode_index: wrong coordinate count");
  if (label < 0 || label >= M) throw SiteOutOfRange("mode_index: label out of range");
  int flat = 0;
  for (int i = d - 1; i >= 0; --i) {
    int c = cell[i] % L;
    if (c < 0) c += L;
    flat = flat * L + c;
  }
  return label + M * flat;
}

std::vector<int> LatticeGeometry::cell_of(int mode) const {
  if (mode < 0 || mode >= mode_count()) throw SiteOutOfRange("cell_of: mode out of range");
  int flat = mode / M;
  std::vector<int> cell(static_cast<std::size_t>(d));
  for (int i = 0; i < d; ++i) {
    cell[i] = flat % L;
    flat /= L;
  }
  return cell;
}

int LatticeGeometry::label_of(int mode) const {
  if (mode < 0 || mode >= mode_count()) throw SiteOutOfRange("label_of: mode out of range");
  return mode % M;
}

int LatticeGeometry::translate_mode(int mode, const std::vector<int>& shift) const {
  std::vector<int> cell = cell_of(mode);
  for (int i = 0; i < d; ++i) cell[i] += shift[i];
  return mode_index(cell, label_of(mode));
}

double LatticeGeometry::torus_distance(int mode_a, int mode_b) const {
  const std::vector<int> a = cell_of(mode_a);
  const std::vector<int> b = cell_of(mode_b);
  double acc = 0.0;
  for (int i = 0; i < d; ++i) {
    int diff = std::abs(a[i] - b[i]) % L;
    diff = std::min(diff, L - diff);
    acc += static_cast<double>(diff) * diff;
  }
  return std::sqrt(acc);
}

Eigen::Index max_fock_dimension() {
  if (const char* env = std::getenv("WICKBENCH_MAX_DIM")) {
    const long v = std::strtol(env, nullptr, 10);
    if (v > 0) return static_cast<Eigen::Index>(v);
  }
  return 4096;
}

FockBasis build_fock_basis(const LatticeGeometry& geometry, int max_modes) {
  const int modes = geometry.mode_count();
  if (modes > max_modes)
    throw ModeCountExceeded("build_fock_basis: " + std::to_string(modes) + " modes exceed cap " +
                            std::to_string(max_modes));
  const Eigen::Index dim = Eigen::Index(1) << modes;
  if (dim > max_fock_dimension())
    throw ModeCountExceeded("build_fock_basis: dimension " + std::to_string(dim) +
                            " exceeds dense-matrix budget " + std::to_string(max_fock_dimension()));
  return FockBasis{modes, dim};
}

FockOperator FockOperator::adjoint() const {
  return FockOperator{matrix.adjoint(), support, gauge_invariant};
}

FockOperator annihilation(const FockBasis& basis, int mode) {
  if (mode < 0 || mode >= basis.modes) throw SiteOutOfRange("annihilation: mode out of range");
  FockOperator op;
  op.matrix = Matrix::Zero(basis.dimension, basis.dimension);
  op.support = {mode};
  op.gauge_invariant = false;
  const std::uint64_t bit = std::uint64_t(1) << mode;
  const std::uint64_t below = bit - 1;
  for (Eigen::Index s = 0; s < basis.dimension; ++s) {
    const std::uint64_t state = static_cast<std::uint64_t>(s);
    if (!(state & bit)) continue;
    const double sign = (std::popcount(state & below) % 2 == 0) ? 1.0 : -1.0;
    op.matrix(static_cast<Eigen::Index>(state ^ bit), s) = sign;
  }
  return op;
}

FockOperator creation(const FockBasis& basis, int mode) {
  FockOperator op = annihilation(basis, mode).adjoint();
  op.support = {mode};
  op.gauge_invariant = false;
  return op;
}

FockOperator number_operator(const FockBasis& basis) {
  FockOperator op;
  op.matrix = Matrix::Zero(basis.dimension, basis.dimension);
  for (Eigen::Index s = 0; s < basis.dimension; ++s)
    op.matrix(s, s) = static_cast<double>(std::popcount(static_cast<std::uint64_t>(s)));
  op.support.resize(static_cast<std::size_t>(basis.modes));
  for (int i = 0; i < basis.modes; ++i) op.support[static_cast<std::size_t>(i)] = i;
  op.gauge_invariant = true;
  return op;
}

FockOperator identity_operator(const FockBasis& basis) {
  FockOperator op;
  op.matrix = Matrix::Identity(basis.dimension, basis.dimension);
  op.gauge_invariant = true;
  return op;
}

Eigen::VectorXd parity_vector(const FockBasis& basis) {
  Eigen::VectorXd p(basis.dimension);
  for (Eigen::Index s = 0; s < basis.dimension; ++s)
    p(s) = (std::popcount(static_cast<std::uint64_t>(s)) % 2 == 0) ? 1.0 : -1.0;
  return p;
}

bool is_parity_even(const FockBasis& basis, const Matrix& op, double tol) {
  const Eigen::VectorXd p = parity_vector(basis);
  for (Eigen::Index j = 0; j < op.cols(); ++j)
    for (Eigen::Index i = 0; i < op.rows(); ++i)
      if (p(i) != p(j) && std::abs(op(i, j)) > tol) return false;
  return true;
}

bool commutes_with_number(const FockBasis&, const Matrix& op, double tol) {
  for (Eigen::Index j = 0; j < op.cols(); ++j) {
    const double nj = static_cast<double>(std::popcount(static_cast<std::uint64_t>(j)));
    for (Eigen::Index i = 0; i < op.rows(); ++i) {
      const double ni = static_cast<double>(std::popcount(static_cast<std::uint64_t>(i)));
      if (ni != nj && std::abs(op(i, j)) > tol) return false;
    }
  }
  return true;
}

std::vector<int> merge_support(const std::vector<int>& a, const std::vector<int>& b) {
  std::vector<int> out;
  out.reserve(a.size() + b.size());
  std::set_union(a.begin(), a.end(), b.begin(), b.end(), std::back_inserter(out));
  return out;
}

}  // namespace wickbench
