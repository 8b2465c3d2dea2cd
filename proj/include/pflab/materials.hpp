#pragma once

#include <functional>

namespace pflab {

/// Pointwise symmetric tensor; 1D uses xx only.
struct Sym {
  double xx = 0.0, yy = 0.0, xy = 0.0;
};

inline double contract(int dim, const Sym& a, const Sym& b) {
  return dim == 1 ? a.xx * b.xx : a.xx * b.xx + a.yy * b.yy + 2.0 * a.xy * b.xy;
}

/// Quartic double well a*r^2*(1-r)^2 with wells at 0 and 1.
struct DoubleWell {
  double a = 1.0;
};

double psi_hat(const DoubleWell& w, double r);
double psi_hat_prime(const DoubleWell& w, double r);
double psi_hat_second(const DoubleWell& w, double r);
/// max |psi''| over [0,1] (attained at the wells): 2a.
double psi_hat_second_max(const DoubleWell& w);

/// Surface-energy constant: integral over [0,1] of sqrt(2 psi_hat(r)) dr,
/// by composite Gauss quadrature. For the quartic well this equals
/// sqrt(2a)/6, which the tests use as an independent check.
double c1_of(const DoubleWell& w);

/// Positive definite elasticity tensor: a scalar modulus in 1D, an
/// isotropic plane-strain Lame pair in 2D.
struct ElasticityTensor {
  int dim = 1;
  double D1 = 1.0;                 // 1D modulus
  double lam_e = 0.0, mu_e = 0.0;  // 2D Lame parameters

  static ElasticityTensor scalar(double D);
  static ElasticityTensor isotropic(double lam_e, double mu_e);
  Sym apply(const Sym& e) const;
};

struct TransformationStrain {
  Sym eps;
};

/// Kinetic response f with the sign property r*f(r) >= 0; linear by default.
struct KineticFunction {
  double c = 1.0;
  std::function<double(double)> custom;  // overrides the linear map when set

  double operator()(double r) const { return custom ? custom(r) : c * r; }
  bool is_linear() const { return !custom; }
};

struct MaterialSet {
  DoubleWell well;
  ElasticityTensor tensor;
  TransformationStrain eigenstrain;
  KineticFunction kinetic;
  double c1 = 0.0;

  static MaterialSet make(DoubleWell well, ElasticityTensor tensor,
                          TransformationStrain eigenstrain, KineticFunction kinetic = {});
};

/// W = 1/2 D(e - eps_bar*S) : (e - eps_bar*S)
double stored_energy(const MaterialSet& ms, const Sym& eps, double S);
/// T = D(e - eps_bar*S)
Sym stress(const MaterialSet& ms, const Sym& eps, double S);
/// dW/dS = -eps_bar : T
double dW_dS(const MaterialSet& ms, const Sym& eps, double S);

}  // namespace pflab
