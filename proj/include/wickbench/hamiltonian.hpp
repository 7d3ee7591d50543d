// hamiltonian.hpp - finite-range quadratic + quartic Hamiltonians, the drive
#ifndef WICKBENCH_HAMILTONIAN_HPP
#define WICKBENCH_HAMILTONIAN_HPP

#include <vector>

#include "wickbench/lattice.hpp"
#include "wickbench/switch_function.hpp"

namespace wickbench {

// One-body kernel H(x; y) on the modes, Hermitian, vanishing beyond range.
struct QuadraticKernel {
  Matrix entries;
  double range = 1.0;
  double bound = 0.0;  // max |H(x;y)|; 0 means take it from the entries
};

// Two-body density-density kernel v(x; y), real symmetric.
struct InteractionKernel {
  Eigen::MatrixXd entries;
  double range = 1.0;
  double bound = 0.0;
  double coupling = 0.0;  // lambda
};

void validate_kernel(const LatticeGeometry& geometry, const QuadraticKernel& kernel,
                     double tol = 1e-12);
void validate_kernel(const LatticeGeometry& geometry, const InteractionKernel& kernel,
                     double tol = 1e-12);

// sum_{x,y} H(x;y) a*_x a_y
FockOperator build_quadratic(const LatticeGeometry& geometry, const FockBasis& basis,
                             const QuadraticKernel& kernel);

// lambda * sum_{x,y} v(x;y) a*_x a*_y a_y a_x  (diagonal in the occupation basis)
FockOperator build_quartic(const LatticeGeometry& geometry, const FockBasis& basis,
                           const InteractionKernel& kernel);

// min_e |e - mu| over the one-particle spectrum of the kernel.
double one_body_gap(const QuadraticKernel& kernel, double mu);

// Finite-range decomposition into per-pair local terms, and the largest
// local-term Fock norm (diagnostic; distinct from the kernel entry bound).
std::vector<FockOperator> quadratic_local_terms(const LatticeGeometry& geometry,
                                                const FockBasis& basis,
                                                const QuadraticKernel& kernel);
double max_local_term_norm(const LatticeGeometry& geometry, const FockBasis& basis,
                           const QuadraticKernel& kernel);

// Convenience kernels.  Wrapped bonds on small tori are deduplicated: each
// unordered site pair receives its amplitude once.
QuadraticKernel uniform_chain_kernel(const LatticeGeometry& geometry, double hopping,
                                     double onsite = 0.0);
QuadraticKernel staggered_chain_kernel(const LatticeGeometry& geometry, double hopping,
                                       double stagger);
InteractionKernel nearest_neighbor_interaction(const LatticeGeometry& geometry, double u,
                                               double lambda);

// H(eta t) = H + eps g(eta t) P
struct DrivenHamiltonian {
  FockOperator base;
  FockOperator perturbation;
  double epsilon = 0.0;
  SwitchSpec switch_spec;
  double eta = 1.0;
};

void validate(const FockBasis& basis, const DrivenHamiltonian& driven, double tol = 1e-12);

double operator_norm(const Matrix& m);  // largest singular value

}  // namespace wickbench

#endif
