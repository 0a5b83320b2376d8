#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <numbers>
#include <random>

#include "mlwf/functional.hpp"
#include "mlwf/optimizer.hpp"

using namespace mlwf;

namespace {

constexpr double kTwoPi = 2.0 * std::numbers::pi;

struct Mathieu1d {
  BravaisLattice lat;
  PlaneWaveBasis pw;
  KGrid grid;
  BlochFrame frame;
  BerryConnection conn;

  Mathieu1d(int nk, double cutoff, double coeff, int bands = 1) {
    Eigen::MatrixXd basis(1, 1);
    basis << kTwoPi;
    lat = build_lattice(basis);
    pw = make_plane_wave_basis(lat, cutoff);
    grid = make_kgrid(lat, {nk});
    const auto spectra = solve_on_grid(grid, pw, cosine_potential(1, coeff));
    const auto window = validate_gap(spectra, BandWindow{0, bands}, 1e-10);
    const auto projs = window_projectors(spectra, window);
    frame = projection_frame(projs, projs.range[grid.gamma_index()]);
    conn = berry_connection(frame, grid, pw);
  }
};

/// k-constant frame over a basis whose wraps are trivial
struct SyntheticFlat {
  BravaisLattice lat;
  PlaneWaveBasis pw;
  KGrid grid;
  BlochFrame frame;

  SyntheticFlat(int nk, int nrows, int bands) {
    Eigen::MatrixXd basis(1, 1);
    basis << kTwoPi;
    lat = build_lattice(basis);
    pw = identity_wrap_basis(lat, nrows);
    grid = make_kgrid(lat, {nk});
    Eigen::MatrixXcd cols = Eigen::MatrixXcd::Zero(nrows, bands);
    for (int a = 0; a < bands; ++a) cols(a, a) = 1.0;
    frame.columns.assign(grid.total, cols);
  }
};

}  // namespace

TEST_CASE("constant frame has zero functional") {
  SyntheticFlat flat(16, 4, 2);
  const auto report = eval_frame_functional(flat.frame.columns, flat.grid, flat.pw);
  CHECK(report.total == doctest::Approx(0.0).epsilon(1e-15));
  CHECK(report.quadratic == 0.0);
  CHECK(report.center == 0.0);
}

TEST_CASE("report bookkeeping: total equals the sum of its parts") {
  Mathieu1d setup(32, 6.0, -0.5);
  const auto report = eval_frame_functional(setup.frame.columns, setup.grid, setup.pw);
  CHECK(std::abs(report.total - (report.quadratic + report.cross + report.center)) < 1e-12);
  double per_band_sum = 0.0;
  for (double s : report.per_band) per_band_sum += s;
  CHECK(report.total == doctest::Approx(per_band_sum).epsilon(1e-12));
}

TEST_CASE("constant phase on one column leaves the functional unchanged") {
  Mathieu1d setup(32, 6.0, -0.5, 2);
  auto phi = setup.frame.columns;
  const double f0 = eval_frame_functional(phi, setup.grid, setup.pw).total;
  const cdouble phase = std::exp(cdouble(0.0, 0.8317));
  for (auto& m : phi) m.col(1) *= phase;
  const double f1 = eval_frame_functional(phi, setup.grid, setup.pw).total;
  CHECK(std::abs(f1 - f0) <= 1e-12 * (1.0 + std::abs(f0)));
}

TEST_CASE("identity gauge reproduces the frame functional") {
  Mathieu1d setup(16, 6.0, -0.5, 2);
  const auto direct = eval_frame_functional(setup.frame.columns, setup.grid, setup.pw);
  const auto gauged = eval_gauge_functional(GaugeField::identity(setup.grid.total, 2),
                                            setup.frame, setup.grid, setup.pw);
  CHECK(direct.total == doctest::Approx(gauged.total).epsilon(1e-14));
}

TEST_CASE("band permutation and diagonal phases are exact invariances") {
  Mathieu1d setup(16, 6.0, -0.5, 2);
  const auto base = eval_gauge_functional(GaugeField::identity(setup.grid.total, 2),
                                          setup.frame, setup.grid, setup.pw);

  GaugeField perm;
  Eigen::MatrixXcd p(2, 2);
  p << 0, 1, 1, 0;
  perm.u.assign(setup.grid.total, p);
  const auto swapped = eval_gauge_functional(perm, setup.frame, setup.grid, setup.pw);
  CHECK(std::abs(swapped.total - base.total) <= 1e-12 * (1.0 + base.total));

  GaugeField diag;
  Eigen::MatrixXcd dphase = Eigen::MatrixXcd::Zero(2, 2);
  dphase(0, 0) = std::exp(cdouble(0.0, 0.3));
  dphase(1, 1) = std::exp(cdouble(0.0, -1.2));
  diag.u.assign(setup.grid.total, dphase);
  const auto rotated = eval_gauge_functional(diag, setup.frame, setup.grid, setup.pw);
  CHECK(std::abs(rotated.total - base.total) <= 1e-12 * (1.0 + base.total));
}

TEST_CASE("nonnegativity over random gauges") {
  Mathieu1d setup(16, 6.0, -0.5, 2);
  for (std::uint64_t seed : {1ull, 2ull, 3ull, 4ull, 5ull}) {
    const auto gauge = random_gauge(setup.grid.total, 2, seed);
    const auto report = eval_gauge_functional(gauge, setup.frame, setup.grid, setup.pw);
    CHECK(report.total >= -1e-10);
  }
}

TEST_CASE("non-orthonormal input is rejected") {
  Mathieu1d setup(8, 6.0, -0.5);
  auto phi = setup.frame.columns;
  phi[3] *= 1.001;
  CHECK_THROWS_AS(eval_frame_functional(phi, setup.grid, setup.pw), NonOrthonormalInput);
}

TEST_CASE("gauge-decomposed route agrees at second order in h") {
  Mathieu1d coarse(32, 6.0, -0.5);
  Mathieu1d fine(64, 6.0, -0.5);
  const auto gap_of = [](const Mathieu1d& s) {
    // a smooth nontrivial gauge: e^{i f(k)} with one Fourier mode
    GaugeField g;
    g.u.resize(s.grid.total);
    for (int k = 0; k < s.grid.total; ++k) {
      const double f = 0.3 * std::sin(kTwoPi * s.lat.dual_coords(s.grid.points[k])[0]);
      g.u[k] = Eigen::MatrixXcd::Constant(1, 1, std::exp(cdouble(0.0, f)));
    }
    return mvu_decomposition(g, s.frame, s.conn, s.grid, s.pw).route_gap;
  };
  const double gap_coarse = gap_of(coarse);
  const double gap_fine = gap_of(fine);
  MESSAGE("route gaps: ", gap_coarse, " -> ", gap_fine);
  const double ratio = gap_coarse / gap_fine;
  CHECK(ratio > 3.0);
  CHECK(ratio < 5.5);
}

TEST_CASE("center matrices vanish for identity gauge and zero connection") {
  SyntheticFlat flat(16, 4, 2);
  const auto conn = berry_connection(flat.frame, flat.grid, flat.pw);
  const auto cm =
      center_matrices(GaugeField::identity(flat.grid.total, 2), conn, flat.grid);
  CHECK(cm.g[0].norm() == 0.0);
}

TEST_CASE("recentering shifts the center matrices by the lattice vector") {
  // fine grid so the sin(h gamma)/h stencil filter sits below 1e-4
  SyntheticFlat flat(1024, 3, 1);
  const auto conn = berry_connection(flat.frame, flat.grid, flat.pw);
  GaugeField gauge = GaugeField::identity(flat.grid.total, 1);
  const auto before = center_matrices(gauge, conn, flat.grid);

  std::vector<Eigen::VectorXd> shifts(1, flat.lat.basis.col(0));  // one lattice vector
  apply_recentering(gauge, flat.grid, shifts);
  const auto after = center_matrices(gauge, conn, flat.grid);

  // -i G^1 moves by |Y*| gamma . e^ (here |Y*| = 1)
  const double moved = (cdouble(0, -1) * (after.g[0][0] - before.g[0][0])).real();
  CHECK(std::abs(moved - kTwoPi) < 1e-4);

  // physical center moves the opposite way: c -> c - gamma
  const double c_before = before.physical_centers(flat.grid)(0, 0);
  const double c_after = after.physical_centers(flat.grid)(0, 0);
  CHECK(std::abs((c_after - c_before) + kTwoPi) < 1e-4);
}

TEST_CASE("unitarity defect reporting on gauge fields") {
  GaugeField g = GaugeField::identity(5, 2);
  CHECK(g.max_unitarity_defect() < 1e-15);
  g.u[2](0, 0) += 0.01;
  CHECK(g.max_unitarity_defect() > 1e-3);
}
