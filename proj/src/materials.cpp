#include "pflab/materials.hpp"

#include <cmath>
#include <stdexcept>

namespace pflab {

double psi_hat(const DoubleWell& w, double r) {
  double q = r * (1.0 - r);
  return w.a * q * q;
}

double psi_hat_prime(const DoubleWell& w, double r) {
  return 2.0 * w.a * r * (1.0 - r) * (1.0 - 2.0 * r);
}

double psi_hat_second(const DoubleWell& w, double r) {
  return 2.0 * w.a * (1.0 - 6.0 * r + 6.0 * r * r);
}

double psi_hat_second_max(const DoubleWell& w) { return 2.0 * w.a; }

double c1_of(const DoubleWell& w) {
  // 5-point Gauss-Legendre on 64 panels
  static const double xg[5] = {-0.9061798459386640, -0.5384693101056831, 0.0,
                               0.5384693101056831, 0.9061798459386640};
  static const double wg[5] = {0.2369268850561891, 0.4786286704993665,
                               0.5688888888888889, 0.4786286704993665,
                               0.2369268850561891};
  const int panels = 64;
  const double dr = 1.0 / panels;
  double sum = 0.0;
  for (int p = 0; p < panels; ++p) {
    double mid = (p + 0.5) * dr;
    for (int q = 0; q < 5; ++q) {
      double r = mid + 0.5 * dr * xg[q];
      sum += wg[q] * std::sqrt(2.0 * psi_hat(w, r));
    }
  }
  return sum * 0.5 * dr;
}

ElasticityTensor ElasticityTensor::scalar(double D) {
  if (!(D > 0.0)) throw std::invalid_argument("elastic modulus must be positive");
  ElasticityTensor t;
  t.dim = 1;
  t.D1 = D;
  return t;
}

ElasticityTensor ElasticityTensor::isotropic(double lam_e, double mu_e) {
  if (!(mu_e > 0.0) || !(lam_e + mu_e > 0.0))
    throw std::invalid_argument("Lame pair must be positive definite");
  ElasticityTensor t;
  t.dim = 2;
  t.lam_e = lam_e;
  t.mu_e = mu_e;
  return t;
}

Sym ElasticityTensor::apply(const Sym& e) const {
  Sym out;
  if (dim == 1) {
    out.xx = D1 * e.xx;
    return out;
  }
  double tr = e.xx + e.yy;
  out.xx = 2.0 * mu_e * e.xx + lam_e * tr;
  out.yy = 2.0 * mu_e * e.yy + lam_e * tr;
  out.xy = 2.0 * mu_e * e.xy;
  return out;
}

MaterialSet MaterialSet::make(DoubleWell well, ElasticityTensor tensor,
                              TransformationStrain eigenstrain, KineticFunction kinetic) {
  if (!(well.a > 0.0)) throw std::invalid_argument("double-well height must be positive");
  MaterialSet ms;
  ms.well = well;
  ms.tensor = tensor;
  ms.eigenstrain = eigenstrain;
  ms.kinetic = kinetic;
  ms.c1 = c1_of(well);
  return ms;
}

double stored_energy(const MaterialSet& ms, const Sym& eps, double S) {
  Sym e{eps.xx - ms.eigenstrain.eps.xx * S, eps.yy - ms.eigenstrain.eps.yy * S,
        eps.xy - ms.eigenstrain.eps.xy * S};
  Sym t = ms.tensor.apply(e);
  return 0.5 * contract(ms.tensor.dim, t, e);
}

Sym stress(const MaterialSet& ms, const Sym& eps, double S) {
  Sym e{eps.xx - ms.eigenstrain.eps.xx * S, eps.yy - ms.eigenstrain.eps.yy * S,
        eps.xy - ms.eigenstrain.eps.xy * S};
  return ms.tensor.apply(e);
}

double dW_dS(const MaterialSet& ms, const Sym& eps, double S) {
  Sym t = stress(ms, eps, S);
  return -contract(ms.tensor.dim, ms.eigenstrain.eps, t);
}

}  // namespace pflab
