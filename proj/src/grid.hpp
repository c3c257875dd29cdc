#pragma once

#include "types.hpp"

namespace lagflow {

// Structured periodic grid over the parameter torus. Vertex-major storage:
// n=1: idx = i, n=2: idx = i*shape[1] + j (direction 0 is the slow axis).
struct Grid {
  int n = 1;
  int shape[2] = {0, 1};
  double h[2] = {0.0, 0.0};
  int stride[2] = {1, 1};
  int V = 0;

  static Grid of(const Immersion& im) {
    Grid g;
    g.n = im.n();
    for (int d = 0; d < g.n; ++d) {
      g.shape[d] = im.shape[d];
      g.h[d] = im.spacing(d);
    }
    if (g.n == 1) {
      g.V = g.shape[0];
      g.stride[0] = 1;
    } else {
      g.V = g.shape[0] * g.shape[1];
      g.stride[0] = g.shape[1];
      g.stride[1] = 1;
    }
    return g;
  }

  int index(int i, int j = 0) const {
    return n == 1 ? i : i * stride[0] + j;
  }
  void coords(int idx, int& i, int& j) const {
    if (n == 1) {
      i = idx;
      j = 0;
    } else {
      i = idx / stride[0];
      j = idx - i * stride[0];
    }
  }
};

// First/second periodic central differences along one grid direction.
// `shifts` (n x C), when given, is added once per positive wrap of the
// stencil across the periodic seam; pass nullptr for periodic scalar fields.
void diff1(const Grid& g, const MatrixXd& field, int dir, DiffScheme scheme,
           const MatrixXd* shifts, MatrixXd& out);
void diff2(const Grid& g, const MatrixXd& field, int dir, DiffScheme scheme,
           const MatrixXd* shifts, MatrixXd& out);
// Mixed second derivative d^2/du0 du1 (n = 2 only), via composed diff1.
void diff2_mixed(const Grid& g, const MatrixXd& field, DiffScheme scheme,
                 const MatrixXd* shifts, MatrixXd& out);

// Variants for branch-tracked angle fields: stencil increments are taken
// modulo 2*pi relative to the center vertex, so the periodic seam (where the
// unwrapped branch jumps by the winding) is differentiated correctly.
void diff1_angle(const Grid& g, const VectorXd& theta, int dir,
                 DiffScheme scheme, VectorXd& out);
void diff2_angle(const Grid& g, const VectorXd& theta, int dir,
                 DiffScheme scheme, VectorXd& out);
void diff2_mixed_angle(const Grid& g, const VectorXd& theta, DiffScheme scheme,
                       VectorXd& out);

}  // namespace lagflow
