#pragma once

#include <Eigen/Dense>
#include <Eigen/Sparse>
#include <cstdint>
#include <vector>

#include "multivector.hpp"
#include "quadrature.hpp"
#include "weight.hpp"

namespace cliffock {

// Uniform node lattice on the box [-R, R]^{n+1}; R snaps to a multiple of h
// so the origin is always a node.
struct Grid {
  int n = 1;
  double half_width = 1.0;
  double h = 0.1;
  int m = 10;  // nodes per half axis

  Grid() = default;
  Grid(int n_, double half_width_, double h_) : n(n_), h(h_) {
    if (n < 1 || n > kMaxAlgebraDim) throw std::invalid_argument("grid algebra dimension");
    if (h <= 0.0 || half_width_ <= 0.0) throw std::invalid_argument("grid spacing");
    m = static_cast<int>(std::lround(half_width_ / h));
    if (m < 1) throw std::invalid_argument("grid too coarse for its half width");
    half_width = m * h;
  }

  int vars() const { return n + 1; }
  int per_axis() const { return 2 * m + 1; }
  BladeIndex blades() const { return BladeIndex{1} << n; }

  std::int64_t node_count() const {
    std::int64_t c = 1;
    for (int j = 0; j < vars(); ++j) c *= per_axis();
    return c;
  }
  std::int64_t dof_count() const { return node_count() * blades(); }

  std::vector<int> coords_of(std::int64_t idx) const {
    std::vector<int> c(vars());
    for (int j = vars() - 1; j >= 0; --j) {
      c[j] = static_cast<int>(idx % per_axis());
      idx /= per_axis();
    }
    return c;
  }

  std::int64_t index_of(const std::vector<int>& c) const {
    std::int64_t idx = 0;
    for (int j = 0; j < vars(); ++j) idx = idx * per_axis() + c[j];
    return idx;
  }

  Eigen::VectorXd point(const std::vector<int>& c) const {
    Eigen::VectorXd x(vars());
    for (int j = 0; j < vars(); ++j) x[j] = (c[j] - m) * h;
    return x;
  }
  Eigen::VectorXd point(std::int64_t idx) const { return point(coords_of(idx)); }

  std::int64_t origin_index() const {
    std::vector<int> c(vars(), m);
    return index_of(c);
  }

  bool is_interior(const std::vector<int>& c, int margin = 1) const {
    for (int j = 0; j < vars(); ++j)
      if (c[j] < margin || c[j] > per_axis() - 1 - margin) return false;
    return true;
  }

  double cell_volume() const {
    double v = 1.0;
    for (int j = 0; j < vars(); ++j) v *= h;
    return v;
  }
};

// Visit every node in index order with the point updated incrementally;
// f(index, x) must not keep the reference.
template <typename F>
void for_each_node(const Grid& g, F&& f) {
  const int vars = g.vars();
  std::vector<int> c(vars, 0);
  Eigen::VectorXd x(vars);
  for (int j = 0; j < vars; ++j) x[j] = -g.half_width;
  const std::int64_t count = g.node_count();
  for (std::int64_t i = 0; i < count; ++i) {
    f(i, x);
    for (int j = vars - 1; j >= 0; --j) {
      if (++c[j] < g.per_axis()) {
        x[j] = (c[j] - g.m) * g.h;
        break;
      }
      c[j] = 0;
      x[j] = -g.half_width;
    }
  }
}

// One Multivector per node, stored node-major.
struct GridField {
  Grid grid;
  Eigen::VectorXd data;

  explicit GridField(const Grid& g) : grid(g), data(Eigen::VectorXd::Zero(g.dof_count())) {}

  static GridField sample(const Grid& g, const FieldFn& f) {
    GridField out(g);
    const BladeIndex nb = g.blades();
    for_each_node(g, [&](std::int64_t i, const Eigen::VectorXd& x) {
      const Multivector<double> v = f(x);
      for (BladeIndex a = 0; a < nb; ++a) out.data[i * nb + a] = v[a];
    });
    return out;
  }

  static GridField sample_scalar(const Grid& g, const std::function<double(const Eigen::VectorXd&)>& f) {
    GridField out(g);
    const BladeIndex nb = g.blades();
    for_each_node(g, [&](std::int64_t i, const Eigen::VectorXd& x) { out.data[i * nb] = f(x); });
    return out;
  }

  double& comp(std::int64_t node, BladeIndex a) { return data[node * grid.blades() + a]; }
  double comp(std::int64_t node, BladeIndex a) const { return data[node * grid.blades() + a]; }

  Multivector<double> at(std::int64_t node) const {
    Multivector<double> v(grid.n);
    for (BladeIndex a = 0; a < grid.blades(); ++a) v[a] = comp(node, a);
    return v;
  }

  bool is_scalar() const {
    for (std::int64_t i = 0; i < grid.node_count(); ++i)
      for (BladeIndex a = 1; a < grid.blades(); ++a)
        if (comp(i, a) != 0.0) return false;
    return true;
  }
};

// Discrete ||u||^2_{phi,h} = sum |u|^2 e^{-2phi} h^{n+1}.
inline double weighted_norm_sq(const GridField& u, const Weight& w) {
  const BladeIndex nb = u.grid.blades();
  const double vol = u.grid.cell_volume();
  double acc = 0.0;
  for_each_node(u.grid, [&](std::int64_t i, const Eigen::VectorXd& x) {
    double s = 0.0;
    for (BladeIndex a = 0; a < nb; ++a) s += u.comp(i, a) * u.comp(i, a);
    acc += s * std::exp(-2.0 * w.value(x)) * vol;
  });
  return acc;
}

// Discrete (f,g)_{phi,h} = sum conj(f) g e^{-2phi} h^{n+1}.
inline Multivector<double> weighted_inner(const GridField& f, const GridField& g,
                                          const Weight& w) {
  if (f.grid.node_count() != g.grid.node_count() || f.grid.n != g.grid.n)
    throw std::invalid_argument("grid mismatch");
  const BladeIndex nb = f.grid.blades();
  Multivector<double> acc(f.grid.n);
  const double vol = f.grid.cell_volume();
  for_each_node(f.grid, [&](std::int64_t i, const Eigen::VectorXd& x) {
    const double ww = std::exp(-2.0 * w.value(x)) * vol;
    const double* fv = f.data.data() + i * nb;
    const double* gv = g.data.data() + i * nb;
    for (BladeIndex a = 0; a < nb; ++a) {
      if (fv[a] == 0.0) continue;
      const double ca = conjugation_sign(a) * fv[a] * ww;
      for (BladeIndex b = 0; b < nb; ++b) {
        if (gv[b] == 0.0) continue;
        acc[a ^ b] += blade_sign(a, b) * ca * gv[b];
      }
    }
  });
  return acc;
}

// Node coordinates plus blade components, for audit and plotting.
inline void write_field_csv(const GridField& u, std::ostream& os) {
  const BladeIndex nb = u.grid.blades();
  for (int j = 0; j < u.grid.vars(); ++j) os << "x" << j << ",";
  for (BladeIndex a = 0; a < nb; ++a) {
    if (a) os << ",";
    os << "B";
    if (a == 0) {
      os << "0";
    } else {
      for (int j = 1; j <= kMaxAlgebraDim; ++j)
        if (a & (BladeIndex{1} << (j - 1))) os << j;
    }
  }
  os << "\n";
  char buf[40];
  for_each_node(u.grid, [&](std::int64_t i, const Eigen::VectorXd& x) {
    for (int j = 0; j < u.grid.vars(); ++j) {
      std::snprintf(buf, sizeof buf, "%.17g", x[j]);
      os << buf << ",";
    }
    for (BladeIndex a = 0; a < nb; ++a) {
      std::snprintf(buf, sizeof buf, "%.17g", u.comp(i, a));
      os << (a ? "," : "") << buf;
    }
    os << "\n";
  });
}

// Sparse finite-difference Dirac operator: second-order central differences
// inside, one-sided second-order stencils on the faces. The interior-only
// variant keeps central rows at margin-1 interior nodes and is the
// constraint operator of the minimal-norm solver.
struct DiracOperator {
  Grid grid;
  bool conjugated = false;
  bool interior_only = false;
  Eigen::SparseMatrix<double> mat;      // (rows * 2^n) x (nodes * 2^n)
  Eigen::SparseMatrix<double, Eigen::RowMajor> mat_rm;  // same entries, row-major
  std::vector<std::int64_t> row_nodes;  // node of each block row

  GridField apply(const GridField& u) const {
    if (interior_only) throw std::logic_error("interior operator has no full-grid image");
    GridField out(grid);
    out.data = mat * u.data;
    return out;
  }
};

inline DiracOperator discretize(const Grid& g, bool conjugated = false,
                                bool interior_only = false) {
  if (g.per_axis() < 3) throw std::invalid_argument("grid needs at least three nodes per axis");
  DiracOperator op;
  op.grid = g;
  op.conjugated = conjugated;
  op.interior_only = interior_only;

  const BladeIndex nb = g.blades();
  std::vector<std::int64_t> row_of(g.node_count(), -1);
  if (interior_only) {
    for (std::int64_t i = 0; i < g.node_count(); ++i)
      if (g.is_interior(g.coords_of(i), 1)) {
        row_of[i] = static_cast<std::int64_t>(op.row_nodes.size());
        op.row_nodes.push_back(i);
      }
  } else {
    op.row_nodes.resize(g.node_count());
    for (std::int64_t i = 0; i < g.node_count(); ++i) {
      row_of[i] = i;
      op.row_nodes[i] = i;
    }
  }

  std::vector<Eigen::Triplet<double>> trips;
  trips.reserve(op.row_nodes.size() * nb * g.vars() * 3);
  const double inv2h = 1.0 / (2.0 * g.h);

  std::vector<std::int64_t> stride(g.vars());
  stride[g.vars() - 1] = 1;
  for (int j = g.vars() - 2; j >= 0; --j) stride[j] = stride[j + 1] * g.per_axis();

  for (std::int64_t node = 0; node < g.node_count(); ++node) {
    const std::int64_t row_block = row_of[node];
    if (row_block < 0) continue;
    const std::vector<int> c = g.coords_of(node);
    for (int j = 0; j < g.vars(); ++j) {
      // 1-D stencil along axis j: pairs (node offset, coefficient)
      std::pair<std::int64_t, double> st[3];
      int nst = 0;
      if (c[j] > 0 && c[j] < g.per_axis() - 1) {
        st[nst++] = {stride[j], inv2h};
        st[nst++] = {-stride[j], -inv2h};
      } else if (c[j] == 0) {
        st[nst++] = {0, -3.0 * inv2h};
        st[nst++] = {stride[j], 4.0 * inv2h};
        st[nst++] = {2 * stride[j], -inv2h};
      } else {
        st[nst++] = {0, 3.0 * inv2h};
        st[nst++] = {-stride[j], -4.0 * inv2h};
        st[nst++] = {-2 * stride[j], inv2h};
      }
      const BladeIndex gen = j == 0 ? 0 : (BladeIndex{1} << (j - 1));
      const double gen_sign = (conjugated && j >= 1) ? -1.0 : 1.0;
      for (BladeIndex b = 0; b < nb; ++b) {
        const double s = gen_sign * blade_sign(gen, b);
        const BladeIndex out_blade = gen ^ b;
        for (int k = 0; k < nst; ++k)
          trips.emplace_back(static_cast<int>(row_block * nb + out_blade),
                             static_cast<int>((node + st[k].first) * nb + b), s * st[k].second);
      }
    }
  }

  op.mat.resize(static_cast<int>(op.row_nodes.size() * nb), static_cast<int>(g.dof_count()));
  op.mat.setFromTriplets(trips.begin(), trips.end());
  op.mat.makeCompressed();
  op.mat_rm = op.mat;  // row-major copy keeps both products gather-based
  return op;
}

}  // namespace cliffock
