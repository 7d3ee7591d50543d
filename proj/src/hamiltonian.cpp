#include "wickbench/hamiltonian.hpp"

#include <bit>
#include <cmath>
#include <cstdint>
#include <string>

#include <Eigen/Eigenvalues>
#include <Eigen/SVD>

#include "wickbench/errors.hpp"

namespace wickbench {

void validate_kernel(const LatticeGeometry& geometry, const QuadraticKernel& kernel, double tol) {
  const int n = geometry.mode_count();
  if (kernel.entries.rows() != n || kernel.entries.cols() != n)
    throw RangeViolation("quadratic kernel has wrong size");
  if ((kernel.entries - kernel.entries.adjoint()).cwiseAbs().maxCoeff() > tol)
    throw KernelNotHermitian("quadratic kernel is not Hermitian");
  for (int x = 0; x < n; ++x)
    for (int y = 0; y < n; ++y)
      if (std::abs(kernel.entries(x, y)) > tol && geometry.torus_distance(x, y) > kernel.range)
        throw RangeViolation("quadratic kernel entry beyond range at (" + std::to_string(x) + "," +
                             std::to_string(y) + ")");
}

void validate_kernel(const LatticeGeometry& geometry, const InteractionKernel& kernel, double tol) {
  const int n = geometry.mode_count();
  if (kernel.entries.rows() != n || kernel.entries.cols() != n)
    throw RangeViolation("interaction kernel has wrong size");
  if ((kernel.entries - kernel.entries.transpose()).cwiseAbs().maxCoeff() > tol)
    throw RangeViolation("interaction kernel must be symmetric");
  for (int x = 0; x < n; ++x)
    for (int y = 0; y < n; ++y)
      if (std::abs(kernel.entries(x, y)) > tol && geometry.torus_distance(x, y) > kernel.range)
        throw RangeViolation("interaction kernel entry beyond range");
}

namespace {

std::vector<int> kernel_support(const Eigen::Index n, const std::function<bool(int)>& touched) {
  std::vector<int> support;
  for (int i = 0; i < n; ++i)
    if (touched(i)) support.push_back(i);
  return support;
}

}  // namespace

FockOperator build_quadratic(const LatticeGeometry& geometry, const FockBasis& basis,
                             const QuadraticKernel& kernel) {
  validate_kernel(geometry, kernel);
  FockOperator op;
  op.matrix = Matrix::Zero(basis.dimension, basis.dimension);
  op.gauge_invariant = true;
  const int n = basis.modes;
  for (int x = 0; x < n; ++x) {
    for (int y = 0; y < n; ++y) {
      const Complex amp = kernel.entries(x, y);
      if (amp == Complex(0.0)) continue;
      const std::uint64_t bx = std::uint64_t(1) << x;
      const std::uint64_t by = std::uint64_t(1) << y;
      for (Eigen::Index s = 0; s < basis.dimension; ++s) {
        const std::uint64_t state = static_cast<std::uint64_t>(s);
        if (!(state & by)) continue;
        if (x == y) {
          op.matrix(s, s) += amp;
          continue;
        }
        if (state & bx) continue;
        // a*_x a_y with Jordan-Wigner signs in the fixed mode order
        const std::uint64_t mid = state ^ by;
        double sign = (std::popcount(state & (by - 1)) % 2 == 0) ? 1.0 : -1.0;
        sign *= (std::popcount(mid & (bx - 1)) % 2 == 0) ? 1.0 : -1.0;
        op.matrix(static_cast<Eigen::Index>(mid | bx), s) += sign * amp;
      }
    }
  }
  op.support = kernel_support(n, [&](int i) {
    return kernel.entries.row(i).cwiseAbs().maxCoeff() > 0.0 ||
           kernel.entries.col(i).cwiseAbs().maxCoeff() > 0.0;
  });
  return op;
}

FockOperator build_quartic(const LatticeGeometry& geometry, const FockBasis& basis,
                           const InteractionKernel& kernel) {
  validate_kernel(geometry, kernel);
  FockOperator op;
  op.matrix = Matrix::Zero(basis.dimension, basis.dimension);
  op.gauge_invariant = true;
  const int n = basis.modes;
  for (Eigen::Index s = 0; s < basis.dimension; ++s) {
    const std::uint64_t state = static_cast<std::uint64_t>(s);
    double diag = 0.0;
    for (int x = 0; x < n; ++x) {
      if (!(state & (std::uint64_t(1) << x))) continue;
      for (int y = 0; y < n; ++y) {
        if (x == y) continue;  // a*_x a*_x = 0
        if (!(state & (std::uint64_t(1) << y))) continue;
        diag += kernel.entries(x, y);
      }
    }
    op.matrix(s, s) = kernel.coupling * diag;
  }
  op.support = kernel_support(n, [&](int i) {
    return kernel.entries.row(i).cwiseAbs().maxCoeff() > 0.0;
  });
  return op;
}

double one_body_gap(const QuadraticKernel& kernel, double mu) {
  Eigen::SelfAdjointEigenSolver<Matrix> solver(kernel.entries, Eigen::EigenvaluesOnly);
  if (solver.info() != Eigen::Success) throw EigenFailure("one_body_gap: eigensolver failed");
  return (solver.eigenvalues().array() - mu).abs().minCoeff();
}

std::vector<FockOperator> quadratic_local_terms(const LatticeGeometry& geometry,
                                                const FockBasis& basis,
                                                const QuadraticKernel& kernel) {
  validate_kernel(geometry, kernel);
  std::vector<FockOperator> terms;
  const int n = basis.modes;
  for (int x = 0; x < n; ++x) {
    for (int y = x; y < n; ++y) {
      if (kernel.entries(x, y) == Complex(0.0) && kernel.entries(y, x) == Complex(0.0)) continue;
      QuadraticKernel local;
      local.entries = Matrix::Zero(n, n);
      local.entries(x, y) = kernel.entries(x, y);
      if (x != y) local.entries(y, x) = kernel.entries(y, x);
      local.range = kernel.range;
      terms.push_back(build_quadratic(geometry, basis, local));
    }
  }
  return terms;
}

double max_local_term_norm(const LatticeGeometry& geometry, const FockBasis& basis,
                           const QuadraticKernel& kernel) {
  double best = 0.0;
  for (const FockOperator& term : quadratic_local_terms(geometry, basis, kernel))
    best = std::max(best, operator_norm(term.matrix));
  return best;
}

QuadraticKernel uniform_chain_kernel(const LatticeGeometry& geometry, double hopping,
                                     double onsite) {
  const int n = geometry.mode_count();
  QuadraticKernel kernel;
  kernel.entries = Matrix::Zero(n, n);
  for (int x = 0; x < n; ++x) kernel.entries(x, x) = onsite;
  for (int axis = 0; axis < geometry.d; ++axis) {
    std::vector<int> shift(static_cast<std::size_t>(geometry.d), 0);
    shift[static_cast<std::size_t>(axis)] = 1;
    for (int x = 0; x < n; ++x) {
      const int y = geometry.translate_mode(x, shift);
      if (y == x) continue;
      // wrapped bonds coincide at L <= 2; assign each unordered pair once
      kernel.entries(x, y) = hopping;
      kernel.entries(y, x) = hopping;
    }
  }
  kernel.range = 1.0;
  kernel.bound = std::max(std::abs(hopping), std::abs(onsite));
  return kernel;
}

QuadraticKernel staggered_chain_kernel(const LatticeGeometry& geometry, double hopping,
                                       double stagger) {
  QuadraticKernel kernel = uniform_chain_kernel(geometry, hopping, 0.0);
  for (int x = 0; x < geometry.mode_count(); ++x) {
    int parity = 0;
    for (int c : geometry.cell_of(x)) parity += c;
    kernel.entries(x, x) = (parity % 2 == 0) ? stagger : -stagger;
  }
  kernel.bound = std::max(std::abs(hopping), std::abs(stagger));
  return kernel;
}

InteractionKernel nearest_neighbor_interaction(const LatticeGeometry& geometry, double u,
                                               double lambda) {
  const int n = geometry.mode_count();
  InteractionKernel kernel;
  kernel.entries = Eigen::MatrixXd::Zero(n, n);
  for (int axis = 0; axis < geometry.d; ++axis) {
    std::vector<int> shift(static_cast<std::size_t>(geometry.d), 0);
    shift[static_cast<std::size_t>(axis)] = 1;
    for (int x = 0; x < n; ++x) {
      const int y = geometry.translate_mode(x, shift);
      if (y == x) continue;
      kernel.entries(x, y) = u;
      kernel.entries(y, x) = u;
    }
  }
  kernel.range = 1.0;
  kernel.bound = std::abs(u);
  kernel.coupling = lambda;
  return kernel;
}

void validate(const FockBasis& basis, const DrivenHamiltonian& driven, double tol) {
  if ((driven.base.matrix - driven.base.matrix.adjoint()).cwiseAbs().maxCoeff() > tol)
    throw KernelNotHermitian("driven Hamiltonian base is not self-adjoint");
  if ((driven.perturbation.matrix - driven.perturbation.matrix.adjoint()).cwiseAbs().maxCoeff() >
      tol)
    throw KernelNotHermitian("perturbation is not self-adjoint");
  if (!commutes_with_number(basis, driven.base.matrix, tol))
    throw RangeViolation("driven Hamiltonian base does not conserve particle number");
  if (!commutes_with_number(basis, driven.perturbation.matrix, tol))
    throw RangeViolation("perturbation does not conserve particle number");
}

double operator_norm(const Matrix& m) {
  if (m.rows() == 0) return 0.0;
  Eigen::SelfAdjointEigenSolver<Matrix> solver(m.adjoint() * m, Eigen::EigenvaluesOnly);
  return std::sqrt(std::max(0.0, solver.eigenvalues().maxCoeff()));
}

}  // namespace wickbench
