// lattice.hpp - torus geometry, Fock basis enumeration, fermionic mode operators
#ifndef WICKBENCH_LATTICE_HPP
#define WICKBENCH_LATTICE_HPP

#include <Eigen/Dense>
#include <complex>
#include <vector>

namespace wickbench {

using Complex = std::complex<double>;
using Matrix = Eigen::MatrixXcd;

// d-dimensional torus of side L with M internal labels.  Modes are ordered
// lexicographically: mode = label + M * (n_0 + L * (n_1 + L * ( ... ))).
struct LatticeGeometry {
  int d = 1;
  int L = 1;
  int M = 1;

  int cells() const;              // L^d
  int mode_count() const;         // M * L^d
  int mode_index(const std::vector<int>& cell, int label) const;
  std::vector<int> cell_of(int mode) const;
  int label_of(int mode) const;
  int translate_mode(int mode, const std::vector<int>& shift) const;

  // Euclidean distance on the torus, internal labels ignored.
  double torus_distance(int mode_a, int mode_b) const;
};

// Occupation-number basis: state index k occupies mode j iff bit j of k is set.
struct FockBasis {
  int modes = 0;
  Eigen::Index dimension = 0;
};

// Dense-matrix budget; WICKBENCH_MAX_DIM overrides the default of 4096.
Eigen::Index max_fock_dimension();

FockBasis build_fock_basis(const LatticeGeometry& geometry, int max_modes = 12);

// Dense operator on the Fock space with its support set and a flag recording
// commutation with the number operator.
struct FockOperator {
  Matrix matrix;
  std::vector<int> support;       // sorted mode indices
  bool gauge_invariant = false;

  FockOperator adjoint() const;
};

FockOperator annihilation(const FockBasis& basis, int mode);
FockOperator creation(const FockBasis& basis, int mode);
FockOperator number_operator(const FockBasis& basis);
FockOperator identity_operator(const FockBasis& basis);

// Diagonal of (-1)^N in the occupation basis.
Eigen::VectorXd parity_vector(const FockBasis& basis);

// True if O commutes with (-1)^N, i.e. O is even in creation/annihilation count.
bool is_parity_even(const FockBasis& basis, const Matrix& op, double tol = 1e-12);

// True if ||[O, N]|| <= tol.
bool commutes_with_number(const FockBasis& basis, const Matrix& op, double tol = 1e-12);

std::vector<int> merge_support(const std::vector<int>& a, const std::vector<int>& b);

}  // namespace wickbench

#endif
