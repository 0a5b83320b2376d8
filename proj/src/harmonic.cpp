#include "mlwf/harmonic.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <string>

namespace mlwf {

namespace {

constexpr double kCoeffTol = 1e-8;

Eigen::VectorXcd trimmed(const Eigen::VectorXcd& c) {
  int deg = static_cast<int>(c.size()) - 1;
  const double scale = c.cwiseAbs().maxCoeff();
  while (deg > 0 && std::abs(c[deg]) <= kCoeffTol * scale) --deg;
  return c.head(deg + 1);
}

/// remainder of a / b (deg b >= 1), leading coefficients eliminated in turn
Eigen::VectorXcd poly_rem(Eigen::VectorXcd a, const Eigen::VectorXcd& b) {
  const int db = static_cast<int>(b.size()) - 1;
  while (static_cast<int>(a.size()) - 1 >= db) {
    const int da = static_cast<int>(a.size()) - 1;
    const cdouble q = a[da] / b[db];
    for (int i = 0; i <= db; ++i) a[da - db + i] -= q * b[i];
    if (da == 0) break;
    a = trimmed(a.head(da));
  }
  return a;
}

Eigen::VectorXcd poly_gcd(Eigen::VectorXcd a, Eigen::VectorXcd b) {
  a = trimmed(a);
  b = trimmed(b);
  if (a.size() < b.size()) std::swap(a, b);
  while (true) {
    if (b.size() == 1) {
      // nonzero constant: coprime; zero: gcd is a
      const bool zero = std::abs(b[0]) <= kCoeffTol * (1.0 + a.cwiseAbs().maxCoeff());
      return zero ? a : Eigen::VectorXcd::Ones(1);
    }
    Eigen::VectorXcd r = trimmed(poly_rem(a, b));
    if (r.cwiseAbs().maxCoeff() <= kCoeffTol * (1.0 + b.cwiseAbs().maxCoeff())) {
      return b;  // b divides a within tolerance
    }
    a = b;
    b = r;
  }
}

Eigen::VectorXcd poly_div_exact(const Eigen::VectorXcd& a, const Eigen::VectorXcd& b) {
  const int da = static_cast<int>(a.size()) - 1;
  const int db = static_cast<int>(b.size()) - 1;
  Eigen::VectorXcd rem = a;
  Eigen::VectorXcd q = Eigen::VectorXcd::Zero(da - db + 1);
  for (int i = da - db; i >= 0; --i) {
    const cdouble c = rem[i + db] / b[db];
    q[i] = c;
    for (int k = 0; k <= db; ++k) rem[i + k] -= c * b[k];
  }
  return q;
}

}  // namespace

int Poly::degree() const { return static_cast<int>(trimmed(coeffs).size()) - 1; }

cdouble Poly::eval(cdouble z) const {
  cdouble acc(0.0, 0.0);
  for (int i = static_cast<int>(coeffs.size()) - 1; i >= 0; --i) acc = acc * z + coeffs[i];
  return acc;
}

Poly Poly::from(std::initializer_list<cdouble> c) {
  Poly p;
  p.coeffs.resize(static_cast<int>(c.size()));
  int i = 0;
  for (const auto& v : c) p.coeffs[i++] = v;
  return p;
}

double resultant_magnitude(const Poly& p, const Poly& q) {
  const Eigen::VectorXcd a = trimmed(p.coeffs);
  const Eigen::VectorXcd b = trimmed(q.coeffs);
  const int da = static_cast<int>(a.size()) - 1;
  const int db = static_cast<int>(b.size()) - 1;
  if (da == 0 || db == 0) {
    // a nonzero constant shares no root with anything
    return std::abs(a[0]) > 0 || std::abs(b[0]) > 0 ? 1.0 : 0.0;
  }
  Eigen::MatrixXcd syl = Eigen::MatrixXcd::Zero(da + db, da + db);
  for (int r = 0; r < db; ++r) {
    for (int i = 0; i <= da; ++i) syl(r, r + i) = a[da - i];
  }
  for (int r = 0; r < da; ++r) {
    for (int i = 0; i <= db; ++i) syl(db + r, r + i) = b[db - i];
  }
  const double scale =
      std::pow(a.cwiseAbs().maxCoeff(), db) * std::pow(b.cwiseAbs().maxCoeff(), da);
  return std::abs(syl.determinant()) / scale;
}

HolomorphicLine::HolomorphicLine(std::vector<Poly> polys) : polys_(std::move(polys)) {
  if (polys_.size() < 2) {
    throw Error("InvalidLine", "a holomorphic line needs at least two components");
  }
  // common-root screen: some pair must have a nonvanishing resultant
  double best = 0.0;
  for (size_t i = 0; i < polys_.size(); ++i) {
    for (size_t j = i + 1; j < polys_.size(); ++j) {
      best = std::max(best, resultant_magnitude(polys_[i], polys_[j]));
    }
  }
  if (best <= kCoeffTol) {
    throw Error("InvalidLine", "line components share a common root (max resultant " +
                                   std::to_string(best) + ")");
  }

  // strip the numerical gcd of all components
  Eigen::VectorXcd g = trimmed(polys_[0].coeffs);
  for (size_t i = 1; i < polys_.size() && g.size() > 1; ++i) {
    g = poly_gcd(g, trimmed(polys_[i].coeffs));
  }
  if (g.size() > 1) {
    for (auto& p : polys_) p.coeffs = poly_div_exact(trimmed(p.coeffs), g);
  }

  degree_ = 0;
  for (const auto& p : polys_) degree_ = std::max(degree_, p.degree());
  reversed_.resize(polys_.size());
  for (size_t i = 0; i < polys_.size(); ++i) {
    Eigen::VectorXcd padded = Eigen::VectorXcd::Zero(degree_ + 1);
    padded.head(polys_[i].coeffs.size()) = polys_[i].coeffs;
    reversed_[i].coeffs = padded.reverse();
  }
}

Eigen::VectorXcd HolomorphicLine::value(cdouble z, int chart) const {
  const auto& set = chart == 0 ? polys_ : reversed_;
  Eigen::VectorXcd v(m());
  for (int i = 0; i < m(); ++i) v[i] = set[i].eval(z);
  return v;
}

Eigen::MatrixXcd HolomorphicLine::projector(cdouble z, int chart) const {
  const Eigen::VectorXcd v = value(z, chart);
  return v * v.adjoint() / v.squaredNorm();
}

SphereMap::SphereMap(HolomorphicLine l)
    : line(std::move(l)), omega0(Eigen::MatrixXcd::Identity(line.m(), line.m())) {}

SphereMap::SphereMap(HolomorphicLine l, Eigen::MatrixXcd prefactor)
    : line(std::move(l)), omega0(std::move(prefactor)) {}

Eigen::MatrixXcd SphereMap::value(cdouble z, int chart) const {
  const int n = m();
  return omega0 * (2.0 * line.projector(z, chart) - Eigen::MatrixXcd::Identity(n, n));
}

namespace {

/// Gauss-Legendre nodes/weights on [a, b] by Newton on Legendre polynomials.
void gauss_legendre(int n, double a, double b, std::vector<double>& nodes,
                    std::vector<double>& weights) {
  nodes.resize(n);
  weights.resize(n);
  for (int i = 0; i < n; ++i) {
    double x = std::cos(std::numbers::pi * (i + 0.75) / (n + 0.5));
    double pp = 0.0;
    for (int it = 0; it < 100; ++it) {
      double p0 = 1.0, p1 = 0.0;
      for (int j = 0; j < n; ++j) {
        const double p2 = p1;
        p1 = p0;
        p0 = ((2.0 * j + 1.0) * x * p1 - j * p2) / (j + 1.0);
      }
      pp = n * (x * p0 - p1) / (x * x - 1.0);
      const double dx = p0 / pp;
      x -= dx;
      if (std::abs(dx) < 1e-15) break;
    }
    nodes[i] = 0.5 * (b - a) * (-x) + 0.5 * (a + b);
    weights[i] = (b - a) / ((1.0 - x * x) * pp * pp);
  }
}

/// Flat Dirichlet integrand ||d_x omega||^2 + ||d_y omega||^2 in a chart.
double dirichlet_integrand(const SphereMap& map, cdouble z, int chart) {
  const double step = 1e-6;
  const Eigen::MatrixXcd dx =
      (map.value(z + cdouble(step, 0.0), chart) - map.value(z - cdouble(step, 0.0), chart)) /
      (2.0 * step);
  const Eigen::MatrixXcd dy =
      (map.value(z + cdouble(0.0, step), chart) - map.value(z - cdouble(0.0, step), chart)) /
      (2.0 * step);
  return dx.squaredNorm() + dy.squaredNorm();
}

/// 1/2 int over the annulus r in [r0, r1] of the chart integrand.
double annulus_energy(const SphereMap& map, int chart, double r0, double r1, int order) {
  std::vector<double> rn, rw;
  gauss_legendre(order, r0, r1, rn, rw);
  const int nt = std::max(16, 2 * order);
  double sum = 0.0;
  for (int i = 0; i < order; ++i) {
    for (int t = 0; t < nt; ++t) {
      const double theta = 2.0 * std::numbers::pi * t / nt;
      const cdouble z = rn[i] * std::exp(cdouble(0.0, theta));
      sum += rw[i] * (2.0 * std::numbers::pi / nt) * rn[i] *
             dirichlet_integrand(map, z, chart);
    }
  }
  return 0.5 * sum;
}

}  // namespace

double sphere_energy(const SphereMap& map, int quad_order) {
  const double inner = annulus_energy(map, 0, 0.0, 1.0, quad_order) +
                       annulus_energy(map, 1, 0.0, 1.0, quad_order);

  // both charts must agree on the overlap annulus 0.8 <= |z| <= 1
  const double from_z = annulus_energy(map, 0, 0.8, 1.0, quad_order);
  const double from_w = annulus_energy(map, 1, 1.0, 1.0 / 0.8, quad_order);
  const double ref = std::max(std::abs(from_z), 1e-12);
  if (std::abs(from_z - from_w) > 0.01 * ref) {
    throw QuadratureDivergence("chart energies differ on the overlap annulus: " +
                               std::to_string(from_z) + " vs " + std::to_string(from_w));
  }
  return inner;
}

std::vector<QuantizationCase> quantization_check(const std::vector<HolomorphicLine>& cases,
                                                 int quad_order) {
  std::vector<QuantizationCase> out;
  for (const auto& line : cases) {
    QuantizationCase qc;
    qc.m = line.m();
    qc.degree = line.degree();
    qc.energy = sphere_energy(SphereMap(line), quad_order);
    qc.ratio_to_8pi = qc.energy / (8.0 * std::numbers::pi * qc.degree);
    qc.pass = std::abs(qc.ratio_to_8pi - 1.0) <= 0.01;
    out.push_back(qc);
  }
  return out;
}

double cartan_curvature(const Eigen::MatrixXcd& a, const Eigen::MatrixXcd& b) {
  return 0.25 * (a * b - b * a).squaredNorm();
}

namespace {

/// Projection onto the su(m) tangent space at U.
Eigen::MatrixXcd tangent_projection(const Eigen::MatrixXcd& u, const Eigen::MatrixXcd& phi) {
  const int m = static_cast<int>(u.rows());
  const Eigen::MatrixXcd s = u.adjoint() * phi - phi.adjoint() * u;
  return 0.5 * u * (s - s.trace() / static_cast<double>(m) *
                            Eigen::MatrixXcd::Identity(m, m));
}

}  // namespace

SecondVariationSides second_variation_identity(const Eigen::MatrixXcd& u,
                                               const std::vector<Eigen::MatrixXcd>& du_raw) {
  const int m = static_cast<int>(u.rows());
  SecondVariationSides sides;

  std::vector<Eigen::MatrixXcd> du;
  for (const auto& raw : du_raw) {
    Eigen::MatrixXcd t = tangent_projection(u, raw);
    const Eigen::MatrixXcd s = u.adjoint() * t;
    const double defect = (s + s.adjoint()).norm() + std::abs(s.trace());
    if (defect > 1e-10) {
      throw TangencyViolation("projected tangent violates su(m) tangency by " +
                              std::to_string(defect));
    }
    du.push_back(t);
  }

  // canonical real ONB of M_m(C): {E_ab, i E_ab}
  for (const auto& duj : du) {
    const Eigen::MatrixXcd udu = u.adjoint() * duj;
    for (int alpha = 0; alpha < m; ++alpha) {
      for (int beta = 0; beta < m; ++beta) {
        for (int part = 0; part < 2; ++part) {
          Eigen::MatrixXcd phi = Eigen::MatrixXcd::Zero(m, m);
          phi(alpha, beta) = part == 0 ? cdouble(1.0, 0.0) : cdouble(0.0, 1.0);

          // psi = U* phi^T, with phi^T the tangent projection of phi
          const Eigen::MatrixXcd hat = 0.5 * (u.adjoint() * phi - phi.adjoint() * u);
          const Eigen::MatrixXcd psi =
              hat - hat.trace() / static_cast<double>(m) * Eigen::MatrixXcd::Identity(m, m);
          // directional derivative of psi along dU_j (closed form in U)
          const Eigen::MatrixXcd dhat = 0.5 * (duj.adjoint() * phi - phi.adjoint() * duj);
          const Eigen::MatrixXcd dpsi =
              dhat - dhat.trace() / static_cast<double>(m) *
                         Eigen::MatrixXcd::Identity(m, m);

          // ||cov derivative||^2 with cov V = U (dpsi + 1/2 [U* dU, psi])
          const Eigen::MatrixXcd cov = dpsi + 0.5 * (udu * psi - psi * udu);
          sides.lhs += cov.squaredNorm() - cartan_curvature(udu, psi);
        }
      }
    }
    sides.rhs -= duj.squaredNorm() / static_cast<double>(m);
  }
  return sides;
}

StabilitySides stability_sides(
    const std::function<Eigen::MatrixXcd(const Eigen::Vector3d&)>& u,
    const std::function<double(const Eigen::Vector3d&)>& eta, int m, int n, double extent) {
  const double h = 2.0 * extent / n;
  const double vox = h * h * h;
  auto coord = [&](int i) { return -extent + (i + 0.5) * h; };

  StabilitySides sides;
  for (int i = 1; i + 1 < n; ++i) {
    for (int j = 1; j + 1 < n; ++j) {
      for (int k = 1; k + 1 < n; ++k) {
        const Eigen::Vector3d x(coord(i), coord(j), coord(k));
        const double e = eta(x);
        Eigen::Vector3d grad_eta;
        double pull = 0.0;
        for (int axis = 0; axis < 3; ++axis) {
          Eigen::Vector3d xp = x, xm = x;
          xp[axis] += h;
          xm[axis] -= h;
          grad_eta[axis] = (eta(xp) - eta(xm)) / (2.0 * h);
          if (e != 0.0) {
            const Eigen::MatrixXcd du = (u(xp) - u(xm)) / (2.0 * h);
            pull += (u(x).adjoint() * du).squaredNorm();
          }
        }
        sides.lhs += vox * e * e * pull;
        sides.rhs += vox * m * (m * m - 1.0) * grad_eta.squaredNorm();
      }
    }
  }
  return sides;
}

cdouble cartan_reflection_det(const HolomorphicLine& line, cdouble z) {
  const int m = line.m();
  const Eigen::MatrixXcd reflection =
      2.0 * line.projector(z, 0) - Eigen::MatrixXcd::Identity(m, m);
  return reflection.determinant();
}

}  // namespace mlwf
