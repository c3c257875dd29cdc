#pragma once

#include "geometry.hpp"
#include "types.hpp"

namespace lagflow {

// Backward heat kernel rho(X, t) = (4 pi (t0-t))^{-n/2} exp(-|X-X0|^2 /
// (4(t0-t))) together with the C^2 cutoff phi: identically 1 on B_r(X0),
// 0 outside B_{2r}(X0), with the quintic profile
//   q(s) = 1 - 10 s^3 + 15 s^4 - 6 s^5,  s = (|X-X0| - r)/r in [0, 1],
// which pins outputs to an explicit formula. cutoff_radius <= 0 means
// phi == 1 everywhere.
struct KernelSpec {
  VectorXd center;       // X0 in R^{2n}
  double t0 = 0.0;       // reference time, must exceed evaluation times
  double cutoff_radius = -1.0;

  bool has_cutoff() const { return cutoff_radius > 0; }
  void validate(int dim) const;
};

double backward_kernel(const VectorXd& X, const KernelSpec& spec, double t,
                       int n);

// phi(d) and its radial derivative at distance d from the center.
double cutoff_value(const KernelSpec& spec, double dist);
double cutoff_derivative(const KernelSpec& spec, double dist);

// Set of lattice translates of an immersion cell that matter for a Gaussian
// of scale `sigma_sq` around `center`: all k with
// dist(cell + shift.k, center) below the negligibility radius. For closed
// scenarios (no shifts) this is just the zero translate.
std::vector<VectorXd> kernel_translates(const Immersion& im,
                                        const VectorXd& center,
                                        double sigma_sq);

}  // namespace lagflow
