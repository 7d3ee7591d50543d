#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <Eigen/Eigenvalues>
#include <bit>
#include <cstdint>

#include "wickbench/errors.hpp"
#include "wickbench/hamiltonian.hpp"
#include "wickbench/lattice.hpp"

using namespace wickbench;

namespace {

// one-particle block of a Fock operator: rows/cols with exactly one bit set
Eigen::MatrixXcd one_particle_block(const FockBasis& basis, const Matrix& m) {
  Eigen::MatrixXcd block(basis.modes, basis.modes);
  for (int i = 0; i < basis.modes; ++i)
    for (int j = 0; j < basis.modes; ++j)
      block(i, j) = m(Eigen::Index(1) << i, Eigen::Index(1) << j);
  return block;
}

}  // namespace

TEST_CASE("single site quadratic") {
  const LatticeGeometry g{1, 1, 1};
  const FockBasis basis = build_fock_basis(g);
  QuadraticKernel kernel;
  kernel.entries = Matrix::Constant(1, 1, 0.8);
  kernel.range = 0.0;
  const FockOperator h = build_quadratic(g, basis, kernel);
  CHECK(h.matrix(0, 0) == Complex(0.0));
  CHECK(h.matrix(1, 1) == Complex(0.8));
  CHECK(h.gauge_invariant);
}

TEST_CASE("kernel validation") {
  const LatticeGeometry g{1, 4, 1};
  QuadraticKernel bad;
  bad.entries = Matrix::Zero(4, 4);
  bad.entries(0, 1) = Complex(0.0, 1.0);
  bad.entries(1, 0) = Complex(0.0, 1.0);  // not conjugate
  bad.range = 1.0;
  CHECK_THROWS_AS(validate_kernel(g, bad), KernelNotHermitian);
  QuadraticKernel far;
  far.entries = Matrix::Zero(4, 4);
  far.entries(0, 2) = 1.0;
  far.entries(2, 0) = 1.0;
  far.range = 1.0;
  CHECK_THROWS_AS(validate_kernel(g, far), RangeViolation);
}

TEST_CASE("deduplicated L=2 bond and one-particle spectrum") {
  const LatticeGeometry g{1, 2, 1};
  const FockBasis basis = build_fock_basis(g);
  const QuadraticKernel kernel = uniform_chain_kernel(g, -1.0);
  CHECK(kernel.entries(0, 1) == Complex(-1.0));  // one bond despite the wrap
  const FockOperator h = build_quadratic(g, basis, kernel);
  Eigen::SelfAdjointEigenSolver<Matrix> fock(one_particle_block(basis, h.matrix));
  Eigen::SelfAdjointEigenSolver<Matrix> direct(kernel.entries);
  CHECK((fock.eigenvalues() - direct.eigenvalues()).cwiseAbs().maxCoeff() <= 1e-12);
}

TEST_CASE("one-particle spectrum matches kernel on larger chains") {
  for (int L : {3, 4, 5}) {
    const LatticeGeometry g{1, L, 1};
    const FockBasis basis = build_fock_basis(g);
    const QuadraticKernel kernel = staggered_chain_kernel(g, 1.0, 0.5);
    const FockOperator h = build_quadratic(g, basis, kernel);
    Eigen::SelfAdjointEigenSolver<Matrix> fock(one_particle_block(basis, h.matrix));
    Eigen::SelfAdjointEigenSolver<Matrix> direct(kernel.entries);
    CHECK((fock.eigenvalues() - direct.eigenvalues()).cwiseAbs().maxCoeff() <= 1e-12);
  }
}

TEST_CASE("number conservation and self-adjointness of built operators") {
  const LatticeGeometry g{1, 3, 1};
  const FockBasis basis = build_fock_basis(g);
  const FockOperator h = build_quadratic(g, basis, staggered_chain_kernel(g, 1.0, 0.3));
  const FockOperator n = number_operator(basis);
  CHECK((h.matrix * n.matrix - n.matrix * h.matrix).cwiseAbs().maxCoeff() <= 1e-12);
  CHECK((h.matrix - h.matrix.adjoint()).cwiseAbs().maxCoeff() <= 1e-12);
  const FockOperator v = build_quartic(g, basis, nearest_neighbor_interaction(g, 1.0, 0.1));
  CHECK((v.matrix * n.matrix - n.matrix * v.matrix).cwiseAbs().maxCoeff() <= 1e-12);
}

TEST_CASE("quartic interaction on L=2") {
  const LatticeGeometry g{1, 2, 1};
  const FockBasis basis = build_fock_basis(g);
  const double u = 0.7;
  const FockOperator v = build_quartic(g, basis, nearest_neighbor_interaction(g, u, 1.0));
  // |11> has one distinct wrapped bond; the ordered pair sum doubles it
  CHECK(v.matrix(3, 3).real() == doctest::Approx(2.0 * u));
  CHECK(v.matrix(0, 0) == Complex(0.0));
  CHECK(v.matrix(1, 1) == Complex(0.0));
  // diagonal: commutes with every mode density
  for (int x = 0; x < basis.modes; ++x) {
    const Matrix nx = creation(basis, x).matrix * annihilation(basis, x).matrix;
    CHECK((v.matrix * nx - nx * v.matrix).cwiseAbs().maxCoeff() == 0.0);
  }
  InteractionKernel zero;
  zero.entries = Eigen::MatrixXd::Zero(2, 2);
  zero.coupling = 1.0;
  CHECK(build_quartic(g, basis, zero).matrix.cwiseAbs().maxCoeff() == 0.0);
}

TEST_CASE("one body gap") {
  const LatticeGeometry g{1, 4, 1};
  QuadraticKernel onsite;
  onsite.entries = Matrix::Zero(4, 4);
  for (int i = 0; i < 4; ++i) onsite.entries(i, i) = (i % 2 == 0) ? 1.0 : -1.0;
  onsite.range = 0.0;
  CHECK(one_body_gap(onsite, 0.0) == doctest::Approx(1.0));
  CHECK(one_body_gap(onsite, 1.0) == doctest::Approx(0.0));
  QuadraticKernel level;
  level.entries = Matrix::Constant(1, 1, 0.4);
  level.range = 0.0;
  const LatticeGeometry g1{1, 1, 1};
  CHECK(one_body_gap(level, 0.4 + 0.05) == doctest::Approx(0.05));
  // staggered chain with hopping: gap at mu=0 is exactly 1 when L % 4 == 0
  const QuadraticKernel stag = staggered_chain_kernel(g, 1.0, 1.0);
  CHECK(one_body_gap(stag, 0.0) == doctest::Approx(1.0));
}

TEST_CASE("finite-range decomposition reassembles the Hamiltonian") {
  const LatticeGeometry g{1, 4, 1};
  const FockBasis basis = build_fock_basis(g);
  const QuadraticKernel kernel = staggered_chain_kernel(g, 0.9, 0.4);
  const FockOperator h = build_quadratic(g, basis, kernel);
  Matrix sum = Matrix::Zero(basis.dimension, basis.dimension);
  for (const FockOperator& term : quadratic_local_terms(g, basis, kernel)) sum += term.matrix;
  CHECK((sum - h.matrix).cwiseAbs().maxCoeff() <= 1e-12);
  CHECK(max_local_term_norm(g, basis, kernel) > 0.0);
}
