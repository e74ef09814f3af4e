#pragma once

#include "channelstab/types.hpp"

namespace cstab {

// Chebyshev-Gauss-Lobatto collocation on [0,1]. Nodes are ascending:
// nodes[0] = 0, nodes[n-1] = 1, and nodes[n-1-j] is computed as 1 - nodes[j] for j < n/2.
struct Grid {
  int n = 0;
  RVec nodes;
  RMat D1, D2, D3, D4;
  RVec weights;  // Clenshaw-Curtis, sum 1, symmetric under reflection
};

Grid build_grid(int n);

// sum_j w_j f_j conj(g_j)
cd inner(const CVec& f, const CVec& g, const Grid& grid);
double norm2(const CVec& f, const Grid& grid);

template <class V>
V reflect(const V& f) {
  return f.reverse().eval();
}

RVec reflect(const RVec& f, const Grid& grid);
CVec reflect(const CVec& f, const Grid& grid);

// Block b (length n) of a stacked vector.
CVec block(const CVec& x, int n, int b);

}  // namespace cstab
