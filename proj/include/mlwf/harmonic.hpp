#pragma once

#include <functional>
#include <vector>

#include "mlwf/common.hpp"

namespace mlwf {

/// Polynomial with complex coefficients, ascending order.
struct Poly {
  Eigen::VectorXcd coeffs;

  int degree() const;
  cdouble eval(cdouble z) const;
  static Poly from(std::initializer_list<cdouble> c);
};

/// |resultant(p, q)| normalized by the coefficient scales; ~0 iff p and q
/// share a root.
double resultant_magnitude(const Poly& p, const Poly& q);

/// Holomorphic line z -> span{ (v_1(z), ..., v_m(z)) } in C^m. Construction
/// removes numerical common factors (coefficient tolerance 1e-8) and fails
/// if the polynomials share a root.
class HolomorphicLine {
 public:
  HolomorphicLine(std::vector<Poly> polys);

  int m() const { return static_cast<int>(polys_.size()); }
  int degree() const { return degree_; }
  /// Coefficient vector of the line at z (chart 0) or at w = 1/z (chart 1,
  /// evaluated through the degree-reversed polynomials).
  Eigen::VectorXcd value(cdouble z, int chart) const;
  /// Hermitian rank-1 projection onto the line.
  Eigen::MatrixXcd projector(cdouble z, int chart) const;

 private:
  std::vector<Poly> polys_;
  std::vector<Poly> reversed_;
  int degree_ = 0;
};

/// Cartan-embedded map omega(z) = omega0 (p(z) - p(z)^perp) in U(m).
struct SphereMap {
  HolomorphicLine line;
  Eigen::MatrixXcd omega0;

  SphereMap(HolomorphicLine l);
  SphereMap(HolomorphicLine l, Eigen::MatrixXcd prefactor);
  int m() const { return line.m(); }
  Eigen::MatrixXcd value(cdouble z, int chart) const;
};

/// Dirichlet energy E = 1/2 int_{S^2} ||omega^{-1} d omega||^2 dVol, computed
/// chartwise over the two unit disks (conformal invariance), Gauss-Legendre
/// radial nodes of order `quad_order`, central differences at step 1e-6.
/// Throws QuadratureDivergence when the charts disagree on the overlap
/// annulus by more than 1%.
double sphere_energy(const SphereMap& map, int quad_order);

struct QuantizationCase {
  int m = 0;
  int degree = 0;
  double energy = 0.0;
  double ratio_to_8pi = 0.0;  // energy / (8 pi degree)
  bool pass = false;
};

std::vector<QuantizationCase> quantization_check(const std::vector<HolomorphicLine>& cases,
                                                 int quad_order);

/// Pointwise identity behind the averaged second variation: for tangents
/// dU_j at U (projected onto su(m) tangency) and the canonical real
/// orthonormal basis of M_m(C),
///   lhs = sum_j sum_phi { ||cov_j phi^T||^2 - R(dU_j, phi^T, dU_j, phi^T) }
///   rhs = -(1/m) sum_j ||dU_j||^2.
struct SecondVariationSides {
  double lhs = 0.0;
  double rhs = 0.0;
};

SecondVariationSides second_variation_identity(const Eigen::MatrixXcd& u,
                                               const std::vector<Eigen::MatrixXcd>& du);

/// Curvature of the bi-invariant metric, R(A,B,A,B) = 1/4 ||[A,B]||^2.
double cartan_curvature(const Eigen::MatrixXcd& a, const Eigen::MatrixXcd& b);

/// Midpoint-quadrature evaluation of both sides of the stability comparison
///   int eta^2 ||U^{-1} dU||^2   vs   m(m^2-1) int |grad eta|^2
/// on a cube [-extent, extent]^3. Evaluator only; nothing is asserted here.
struct StabilitySides {
  double lhs = 0.0;
  double rhs = 0.0;
};

StabilitySides stability_sides(const std::function<Eigen::MatrixXcd(const Eigen::Vector3d&)>& u,
                               const std::function<double(const Eigen::Vector3d&)>& eta,
                               int m, int n, double extent);

/// det(p - p^perp) for a rank-1 projector p: (-1)^{m-1}, computed numerically.
cdouble cartan_reflection_det(const HolomorphicLine& line, cdouble z);

}  // namespace mlwf
