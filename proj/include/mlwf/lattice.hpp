#pragma once

#include <array>
#include <vector>

#include "mlwf/common.hpp"

namespace mlwf {

/// Bravais lattice with its dual. Columns of `basis` are the primitive
/// vectors gamma_j, columns of `dual_basis` the dual vectors gamma*_j with
/// gamma*_j . gamma_i = 2 pi delta_ij.
struct BravaisLattice {
  int dim = 0;
  Eigen::MatrixXd basis;       // d x d, columns gamma_j
  Eigen::MatrixXd dual_basis;  // d x d, columns gamma*_j
  double cell_volume = 0.0;       // |Y|
  double dual_cell_volume = 0.0;  // |Y*|

  /// Coordinates alpha with x = sum_j alpha_j gamma_j.
  Eigen::VectorXd lattice_coords(const Eigen::VectorXd& x) const;
  /// Coordinates beta with k = sum_j beta_j gamma*_j.
  Eigen::VectorXd dual_coords(const Eigen::VectorXd& k) const;
};

BravaisLattice build_lattice(const Eigen::MatrixXd& basis_vectors);

/// Uniform Gamma-centered grid on the Brillouin torus:
/// k(n) = sum_j (n_j/N_j - 1/2) gamma*_j, n_j in {0,...,N_j-1}.
/// Flat indices are C-ordered with axis 0 slowest.
struct KGrid {
  BravaisLattice lattice;
  std::vector<int> sizes;               // N_j
  std::vector<Eigen::VectorXd> points;  // per flat index
  Eigen::VectorXd spacing;              // h_j = |gamma*_j| / N_j
  int total = 0;                        // N = prod N_j
  double weight = 0.0;                  // quadrature weight |Y*| / N

  int dim() const { return lattice.dim; }

  std::array<int, 3> coords_of(int flat) const;
  int index_of(const std::array<int, 3>& coords) const;

  /// Neighbor one step along `axis` (dir = +1 or -1). `wrap` is the net
  /// Gamma* shift in units of gamma*_axis picked up by crossing the zone
  /// boundary (0 for interior steps).
  struct Neighbor {
    int index;
    int wrap;
  };
  Neighbor neighbor(int flat, int axis, int dir) const;

  /// Flat index of the grid point closest to k = 0 (exactly 0 for even N_j).
  int gamma_index() const;
};

KGrid make_kgrid(const BravaisLattice& lattice, const std::vector<int>& sizes);

}  // namespace mlwf
