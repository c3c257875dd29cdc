#include "grid.hpp"

#include <cmath>

namespace lagflow {

namespace {

struct Stencil {
  int k;
  const int* off;
  const double* w;  // divided by the appropriate power of h by the caller
};

const int kOff1o2[] = {-1, 1};
const double kW1o2[] = {-0.5, 0.5};
const int kOff1o4[] = {-2, -1, 1, 2};
const double kW1o4[] = {1.0 / 12, -8.0 / 12, 8.0 / 12, -1.0 / 12};
const int kOff2o2[] = {-1, 0, 1};
const double kW2o2[] = {1.0, -2.0, 1.0};
const int kOff2o4[] = {-2, -1, 0, 1, 2};
const double kW2o4[] = {-1.0 / 12, 16.0 / 12, -30.0 / 12, 16.0 / 12,
                        -1.0 / 12};

Stencil stencil1(DiffScheme s) {
  return s == DiffScheme::Order2 ? Stencil{2, kOff1o2, kW1o2}
                                 : Stencil{4, kOff1o4, kW1o4};
}
Stencil stencil2(DiffScheme s) {
  return s == DiffScheme::Order2 ? Stencil{3, kOff2o2, kW2o2}
                                 : Stencil{5, kOff2o4, kW2o4};
}

inline int wrap_index(int i, int N, int& w) {
  w = 0;
  while (i < 0) {
    i += N;
    --w;
  }
  while (i >= N) {
    i -= N;
    ++w;
  }
  return i;
}

// Applies a 1-d stencil along `dir`, scaled by `scale` (1/h or 1/h^2).
void apply(const Grid& g, const MatrixXd& field, int dir, const Stencil& st,
           double scale, const MatrixXd* shifts, MatrixXd& out) {
  const int C = static_cast<int>(field.cols());
  out.resize(g.V, C);
  const int N = g.shape[dir];
  const int step = g.stride[dir];
  const bool shifted = shifts && shifts->row(dir).cwiseAbs().maxCoeff() > 0;

  for (int idx = 0; idx < g.V; ++idx) {
    int i, j;
    g.coords(idx, i, j);
    const int base = idx - (dir == 0 ? i : j) * step;
    const int pos = dir == 0 ? i : j;
    for (int c = 0; c < C; ++c) out(idx, c) = 0.0;
    for (int m = 0; m < st.k; ++m) {
      int w;
      const int p = wrap_index(pos + st.off[m], N, w);
      const int nidx = base + p * step;
      const double cw = st.w[m] * scale;
      if (shifted && w != 0) {
        for (int c = 0; c < C; ++c)
          out(idx, c) += cw * (field(nidx, c) + w * (*shifts)(dir, c));
      } else {
        for (int c = 0; c < C; ++c) out(idx, c) += cw * field(nidx, c);
      }
    }
  }
}

// Angle variant: increments taken modulo 2*pi relative to the center value.
// Requires sum of stencil weights to vanish, which holds for all stencils
// here except the second-derivative center weight; we rewrite f_j as
// (f_j - f_0) + f_0 and use that the weights sum to zero.
void apply_angle(const Grid& g, const VectorXd& theta, int dir,
                 const Stencil& st, double scale, VectorXd& out) {
  out.resize(g.V);
  const int N = g.shape[dir];
  const int step = g.stride[dir];
  for (int idx = 0; idx < g.V; ++idx) {
    int i, j;
    g.coords(idx, i, j);
    const int base = idx - (dir == 0 ? i : j) * step;
    const int pos = dir == 0 ? i : j;
    const double c0 = theta[idx];
    double acc = 0.0;
    for (int m = 0; m < st.k; ++m) {
      int w;
      const int p = wrap_index(pos + st.off[m], N, w);
      acc += st.w[m] * wrap_angle(theta[base + p * step] - c0);
    }
    out[idx] = acc * scale;
  }
}

}  // namespace

void diff1(const Grid& g, const MatrixXd& field, int dir, DiffScheme scheme,
           const MatrixXd* shifts, MatrixXd& out) {
  apply(g, field, dir, stencil1(scheme), 1.0 / g.h[dir], shifts, out);
}

void diff2(const Grid& g, const MatrixXd& field, int dir, DiffScheme scheme,
           const MatrixXd* shifts, MatrixXd& out) {
  apply(g, field, dir, stencil2(scheme), 1.0 / (g.h[dir] * g.h[dir]), shifts,
        out);
}

void diff2_mixed(const Grid& g, const MatrixXd& field, DiffScheme scheme,
                 const MatrixXd* shifts, MatrixXd& out) {
  MatrixXd tmp;
  diff1(g, field, 0, scheme, shifts, tmp);
  // The first derivative of a shift-periodic field is plain periodic.
  diff1(g, tmp, 1, scheme, nullptr, out);
}

void diff1_angle(const Grid& g, const VectorXd& theta, int dir,
                 DiffScheme scheme, VectorXd& out) {
  apply_angle(g, theta, dir, stencil1(scheme), 1.0 / g.h[dir], out);
}

void diff2_angle(const Grid& g, const VectorXd& theta, int dir,
                 DiffScheme scheme, VectorXd& out) {
  apply_angle(g, theta, dir, stencil2(scheme), 1.0 / (g.h[dir] * g.h[dir]),
              out);
}

void diff2_mixed_angle(const Grid& g, const VectorXd& theta, DiffScheme scheme,
                       VectorXd& out) {
  VectorXd tmp;
  diff1_angle(g, theta, 0, scheme, tmp);
  MatrixXd t2 = tmp, o2;
  diff1(g, t2, 1, scheme, nullptr, o2);
  out = o2.col(0);
}

}  // namespace lagflow
