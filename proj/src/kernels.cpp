#include "kernels.hpp"

#include <cmath>

namespace lagflow {

void KernelSpec::validate(int dim) const {
  if (center.size() != dim)
    throw ConfigError("kernel center has wrong dimension");
  if (has_cutoff() && !(cutoff_radius > 0))
    throw ConfigError("cutoff radius must be positive");
}

double backward_kernel(const VectorXd& X, const KernelSpec& spec, double t,
                       int n) {
  const double s = spec.t0 - t;
  if (!(s > 0))
    throw ConfigError("backward kernel needs t < t0");
  const double d2 = (X - spec.center).squaredNorm();
  return std::pow(4.0 * kPi * s, -0.5 * n) * std::exp(-d2 / (4.0 * s));
}

double cutoff_value(const KernelSpec& spec, double dist) {
  if (!spec.has_cutoff()) return 1.0;
  const double r = spec.cutoff_radius;
  if (dist <= r) return 1.0;
  if (dist >= 2 * r) return 0.0;
  const double s = (dist - r) / r;
  const double s3 = s * s * s;
  return 1.0 - 10.0 * s3 + 15.0 * s3 * s - 6.0 * s3 * s * s;
}

double cutoff_derivative(const KernelSpec& spec, double dist) {
  if (!spec.has_cutoff()) return 0.0;
  const double r = spec.cutoff_radius;
  if (dist <= r || dist >= 2 * r) return 0.0;
  const double s = (dist - r) / r;
  const double s2 = s * s;
  return (-30.0 * s2 + 60.0 * s2 * s - 30.0 * s2 * s2) / r;
}

std::vector<VectorXd> kernel_translates(const Immersion& im,
                                        const VectorXd& center,
                                        double sigma_sq) {
  const int D = im.dim();
  std::vector<VectorXd> out;
  if (!im.has_shifts()) {
    out.push_back(VectorXd::Zero(D));
    return out;
  }
  // Radius beyond which exp(-d^2 / sigma_sq) is below ~1e-18, plus the
  // extent of one cell.
  double diam = 0.0;
  VectorXd lo = im.positions.colwise().minCoeff();
  VectorXd hi = im.positions.colwise().maxCoeff();
  diam = (hi - lo).norm();
  const double reach = std::sqrt(sigma_sq * 42.0) + diam +
                       (center - 0.5 * (lo + hi)).norm();

  const int n = im.n();
  std::vector<double> norms(n, 0.0);
  std::vector<int> K(n, 0);
  for (int d = 0; d < n; ++d) {
    norms[d] = im.periodic_shifts.row(d).norm();
    K[d] = norms[d] > 0 ? static_cast<int>(std::ceil(reach / norms[d])) + 1 : 0;
  }
  if (n == 1) {
    for (int k = -K[0]; k <= K[0]; ++k)
      out.push_back(k * im.periodic_shifts.row(0).transpose());
  } else {
    for (int k0 = -K[0]; k0 <= K[0]; ++k0)
      for (int k1 = -K[1]; k1 <= K[1]; ++k1)
        out.push_back(k0 * im.periodic_shifts.row(0).transpose() +
                      k1 * im.periodic_shifts.row(1).transpose());
  }
  return out;
}

}  // namespace lagflow
