#include "mlwf/lattice.hpp"

#include <cmath>
#include <numbers>
#include <string>

namespace mlwf {

namespace {
constexpr double kTwoPi = 2.0 * std::numbers::pi;
}

Eigen::VectorXd BravaisLattice::lattice_coords(const Eigen::VectorXd& x) const {
  return dual_basis.transpose() * x / kTwoPi;
}

Eigen::VectorXd BravaisLattice::dual_coords(const Eigen::VectorXd& k) const {
  return basis.transpose() * k / kTwoPi;
}

BravaisLattice build_lattice(const Eigen::MatrixXd& basis_vectors) {
  const int d = static_cast<int>(basis_vectors.rows());
  if (d < 1 || d > 3 || basis_vectors.cols() != d) {
    throw SingularBasis("lattice basis must be a d x d matrix with d in {1,2,3}");
  }
  const double det = basis_vectors.determinant();
  double max_norm = 0.0;
  for (int j = 0; j < d; ++j) max_norm = std::max(max_norm, basis_vectors.col(j).norm());
  if (std::abs(det) < 1e-12 * std::pow(max_norm, d)) {
    throw SingularBasis("lattice basis vectors are linearly dependent (|det| = " +
                        std::to_string(det) + ")");
  }

  BravaisLattice lat;
  lat.dim = d;
  lat.basis = basis_vectors;
  // gamma*_j . gamma_i = 2 pi delta_ij  <=>  dual = 2 pi B^{-T}
  lat.dual_basis = kTwoPi * basis_vectors.inverse().transpose();
  lat.cell_volume = std::abs(det);
  lat.dual_cell_volume = std::pow(kTwoPi, d) / lat.cell_volume;
  return lat;
}

std::array<int, 3> KGrid::coords_of(int flat) const {
  std::array<int, 3> c{0, 0, 0};
  const int d = dim();
  for (int j = d - 1; j >= 0; --j) {
    c[j] = flat % sizes[j];
    flat /= sizes[j];
  }
  return c;
}

int KGrid::index_of(const std::array<int, 3>& coords) const {
  int flat = 0;
  for (int j = 0; j < dim(); ++j) flat = flat * sizes[j] + coords[j];
  return flat;
}

KGrid::Neighbor KGrid::neighbor(int flat, int axis, int dir) const {
  auto c = coords_of(flat);
  int n = c[axis] + dir;
  int wrap = 0;
  if (n >= sizes[axis]) {
    n -= sizes[axis];
    wrap = +1;
  } else if (n < 0) {
    n += sizes[axis];
    wrap = -1;
  }
  c[axis] = n;
  return {index_of(c), wrap};
}

int KGrid::gamma_index() const {
  int best = 0;
  double best_norm = points[0].norm();
  for (int i = 1; i < total; ++i) {
    const double nrm = points[i].norm();
    if (nrm < best_norm) {
      best_norm = nrm;
      best = i;
    }
  }
  return best;
}

KGrid make_kgrid(const BravaisLattice& lattice, const std::vector<int>& sizes) {
  const int d = lattice.dim;
  if (static_cast<int>(sizes.size()) != d) {
    throw InvalidGridSize("expected " + std::to_string(d) + " grid sizes");
  }
  for (int j = 0; j < d; ++j) {
    if (sizes[j] < 2) {
      throw InvalidGridSize("grid size N_" + std::to_string(j + 1) +
                            " must be >= 2, got " + std::to_string(sizes[j]));
    }
  }

  KGrid grid;
  grid.lattice = lattice;
  grid.sizes = sizes;
  grid.total = 1;
  for (int j = 0; j < d; ++j) grid.total *= sizes[j];
  grid.weight = lattice.dual_cell_volume / grid.total;
  grid.spacing.resize(d);
  for (int j = 0; j < d; ++j) grid.spacing[j] = lattice.dual_basis.col(j).norm() / sizes[j];

  grid.points.resize(grid.total);
  for (int flat = 0; flat < grid.total; ++flat) {
    const auto c = grid.coords_of(flat);
    Eigen::VectorXd k = Eigen::VectorXd::Zero(d);
    for (int j = 0; j < d; ++j) {
      k += (static_cast<double>(c[j]) / sizes[j] - 0.5) * lattice.dual_basis.col(j);
    }
    grid.points[flat] = k;
  }
  return grid;
}

}  // namespace mlwf
