#pragma once

#include <array>
#include <map>
#include <vector>

#include "mlwf/common.hpp"
#include "mlwf/lattice.hpp"

namespace mlwf {

/// Plane-wave basis {e^{i G.y} / sqrt(|Y|)} truncated to |G| <= cutoff.
/// G vectors are indexed by their integer coordinates in the dual basis and
/// listed in lexicographic order of those coordinates.
struct PlaneWaveBasis {
  BravaisLattice lattice;
  double cutoff = 0.0;
  std::vector<std::array<int, 3>> g_coords;   // integer dual-basis coordinates
  std::vector<Eigen::VectorXd> g_vectors;     // Cartesian G
  // shift_table[axis][0][i]: index of G_i - gamma*_axis (or -1 outside cutoff)
  // shift_table[axis][1][i]: index of G_i + gamma*_axis
  std::vector<std::array<std::vector<int>, 2>> shift_table;
  std::vector<int> conj_table;  // index of -G_i (total: the set is symmetric)

  int size() const { return static_cast<int>(g_coords.size()); }
  int find(const std::array<int, 3>& coords) const;  // -1 if absent

  /// Row map realizing multiplication by e^{i dir gamma*_axis . y} on
  /// coefficient vectors: out_G = in_{G + dir gamma*_axis}. Partial on the
  /// truncated set (rows without a preimage become zero).
  Eigen::MatrixXcd apply_dual_shift(const Eigen::MatrixXcd& columns, int axis, int dir) const;

 private:
  std::map<std::array<int, 3>, int> index_;
  friend PlaneWaveBasis make_plane_wave_basis(const BravaisLattice&, double);
  friend PlaneWaveBasis identity_wrap_basis(const BravaisLattice&, int);
};

PlaneWaveBasis make_plane_wave_basis(const BravaisLattice& lattice, double cutoff);

/// Degenerate basis with `n` G-vectors all pinned to G = 0 semantics: shift
/// tables are the identity. Only used to drive stencil code with synthetic
/// fields that are strictly periodic in k.
PlaneWaveBasis identity_wrap_basis(const BravaisLattice& lattice, int n);

/// Real periodic potential given by finitely many Fourier coefficients,
/// V(y) = sum_G Vhat_G e^{i G.y}. Hermitian symmetry Vhat_{-G} = conj(Vhat_G)
/// is enforced at construction.
class PotentialSpec {
 public:
  PotentialSpec() = default;
  explicit PotentialSpec(const std::vector<std::pair<std::array<int, 3>, cdouble>>& entries);

  cdouble coeff(const std::array<int, 3>& g) const;
  const std::map<std::array<int, 3>, cdouble>& coeffs() const { return coeffs_; }

 private:
  std::map<std::array<int, 3>, cdouble> coeffs_;
};

/// Separable sum of cosines V(x) = 2 c sum_j cos(gamma*_j . x), i.e. the
/// coefficient c sits at G = +-gamma*_j. Pass c < 0 to put the wells at the
/// lattice sites (the convention of the CLI presets).
PotentialSpec cosine_potential(int dim, double coefficient);

/// Eigenpairs of the fiber operator H(k) = (-i grad + k)^2 + V on the
/// truncated plane-wave basis. Eigenvalues ascending, columns orthonormal.
struct FiberSpectrum {
  Eigen::VectorXd k;
  Eigen::VectorXd eigenvalues;
  Eigen::MatrixXcd eigenvectors;
};

/// M_{GG'} = |k+G|^2 delta_{GG'} + Vhat_{G-G'}.
Eigen::MatrixXcd assemble_fiber(const Eigen::VectorXd& k, const PlaneWaveBasis& basis,
                                const PotentialSpec& pot);

FiberSpectrum solve_fiber(const Eigen::VectorXd& k, const PlaneWaveBasis& basis,
                          const PotentialSpec& pot);

/// Spectra at every grid point, optionally solved on `threads` workers
/// (results are slot-written, so the outcome does not depend on the count).
std::vector<FiberSpectrum> solve_on_grid(const KGrid& grid, const PlaneWaveBasis& basis,
                                         const PotentialSpec& pot, int threads = 1);

/// Band window {E_n, ..., E_{n+m-1}}.
struct BandWindow {
  int first_band = 0;
  int count = 1;
  double min_gap = 0.0;
};

/// Measures min_k dist(sigma_*(k), rest of spectrum) and fails with
/// GapViolation (naming the worst k) unless it exceeds `tol`.
BandWindow validate_gap(const std::vector<FiberSpectrum>& spectra, BandWindow window,
                        double tol);

}  // namespace mlwf
