// Discrete Laplace / Laplace-Beltrami operators in divergence (flux) form,
// the l2 / energy / h1 inner products, and centered gradients.
//
// Conventions, shared by every module:
//   A      symmetric stencil matrix in 1/h^2 units over the active nodes
//          (Dirichlet: interior nodes; Neumann: all nodes, trapezoid-lumped)
//   q_i    quadrature weight = cell_volume * metric_weight_i * trapezoid factor
//   apply  (-Delta_g + shift) u  =  (vol * (A u)_i - boundary data flux) / q_i + shift u_i
//   <u,v>_E = vol * v^H A u for homogeneous Dirichlet fields, exactly.
#pragma once

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <ostream>
#include <vector>

#include "semilin/field.hpp"
#include "semilin/grid.hpp"

namespace semilin {

struct SparseSym {
    int n = 0;
    std::vector<int> row_ptr, col;
    RVec val;

    int bandwidth() const {
        int b = 0;
        for (int i = 0; i < n; ++i)
            for (int k = row_ptr[static_cast<size_t>(i)]; k < row_ptr[static_cast<size_t>(i) + 1]; ++k)
                b = std::max(b, std::abs(col[static_cast<size_t>(k)] - i));
        return b;
    }

    template <class T>
    void apply(const std::vector<T>& x, std::vector<T>& y) const {
        y.assign(static_cast<size_t>(n), T{});
        for (int i = 0; i < n; ++i) {
            T acc{};
            for (int k = row_ptr[static_cast<size_t>(i)]; k < row_ptr[static_cast<size_t>(i) + 1]; ++k)
                acc += val[static_cast<size_t>(k)] * x[static_cast<size_t>(col[static_cast<size_t>(k)])];
            y[static_cast<size_t>(i)] = acc;
        }
    }

    std::vector<RVec> to_dense() const {
        std::vector<RVec> d(static_cast<size_t>(n), RVec(static_cast<size_t>(n), 0.0));
        for (int i = 0; i < n; ++i)
            for (int k = row_ptr[static_cast<size_t>(i)]; k < row_ptr[static_cast<size_t>(i) + 1]; ++k)
                d[static_cast<size_t>(i)][static_cast<size_t>(col[static_cast<size_t>(k)])] =
                    val[static_cast<size_t>(k)];
        return d;
    }
};

namespace detail {

struct CooBuilder {
    std::vector<std::vector<std::pair<int, double>>> rows;
    explicit CooBuilder(int n) : rows(static_cast<size_t>(n)) {}
    void add(int i, int j, double v) {
        auto& r = rows[static_cast<size_t>(i)];
        for (auto& e : r)
            if (e.first == j) {
                e.second += v;
                return;
            }
        r.emplace_back(j, v);
    }
    SparseSym compress() const {
        SparseSym s;
        s.n = static_cast<int>(rows.size());
        s.row_ptr.resize(rows.size() + 1, 0);
        size_t nnz = 0;
        for (auto& r : rows) nnz += r.size();
        s.col.reserve(nnz);
        s.val.reserve(nnz);
        for (size_t i = 0; i < rows.size(); ++i) {
            auto r = rows[i];
            std::sort(r.begin(), r.end());
            for (auto& e : r) {
                s.col.push_back(e.first);
                s.val.push_back(e.second);
            }
            s.row_ptr[i + 1] = static_cast<int>(s.col.size());
        }
        return s;
    }
};

// Enumerate grid faces between axis-adjacent nodes. interior(ai, aj, c) is
// called for faces joining two active nodes, boundary(ai, full_b, c) for
// Dirichlet faces joining an active node to a boundary node. c is the flux
// coefficient w_face * g^dd_face * transverse_factor / h_d^2 with the face
// value taken as the arithmetic mean of the two node values.
template <class FnI, class FnB>
inline void for_each_face(const Chart& c, BcKind bc, FnI&& interior, FnB&& boundary) {
    const auto f2a = full_to_active(c, bc);
    const int nfx = c.nx_full(), nfy = c.ny_full();
    auto kcoef = [&](int full, int axis) {
        const auto& g = c.inv_metric[static_cast<size_t>(full)];
        if (g[2] != 0.0) throw ConfigError("assemble: off-diagonal inverse metric unsupported");
        return c.metric_weight[static_cast<size_t>(full)] * (axis == 0 ? g[0] : g[1]);
    };
    for (int axis = 0; axis < c.dim; ++axis) {
        const double inv_h2 = 1.0 / (c.spacing[static_cast<size_t>(axis)] * c.spacing[static_cast<size_t>(axis)]);
        for (int iy = 0; iy < nfy; ++iy) {
            for (int ix = 0; ix < nfx; ++ix) {
                const int jx = ix + (axis == 0 ? 1 : 0);
                const int jy = iy + (axis == 1 ? 1 : 0);
                if (jx >= nfx || jy >= nfy) continue;
                const int p = c.full_index(ix, iy), q = c.full_index(jx, jy);
                const int ap = f2a[static_cast<size_t>(p)], aq = f2a[static_cast<size_t>(q)];
                if (ap < 0 && aq < 0) continue;
                double tf = 1.0;  // transverse trapezoid factor (Neumann edge faces)
                if (c.dim == 2 && axis == 0 && (iy == 0 || iy == nfy - 1)) tf = 0.5;
                if (c.dim == 2 && axis == 1 && (ix == 0 || ix == nfx - 1)) tf = 0.5;
                const double coef = 0.5 * (kcoef(p, axis) + kcoef(q, axis)) * tf * inv_h2;
                if (ap >= 0 && aq >= 0)
                    interior(ap, aq, coef);
                else if (ap >= 0)
                    boundary(ap, q, coef);
                else
                    boundary(aq, p, coef);
            }
        }
    }
}

}  // namespace detail

inline RVec quadrature_weights(const Chart& c, BcKind bc) {
    const auto fwd = active_to_full(c, bc);
    const double vol = c.cell_volume();
    RVec q(fwd.size());
    const int nfx = c.nx_full(), nfy = c.ny_full();
    for (size_t a = 0; a < fwd.size(); ++a) {
        const int full = fwd[a];
        const int ix = full % nfx, iy = full / nfx;
        double tf = 1.0;
        if (ix == 0 || ix == nfx - 1) tf *= 0.5;
        if (c.dim == 2 && (iy == 0 || iy == nfy - 1)) tf *= 0.5;
        q[a] = vol * c.metric_weight[static_cast<size_t>(full)] * tf;
    }
    return q;
}

struct DiscreteOperator {
    const Chart* chart = nullptr;
    BcKind bc = BcKind::dirichlet_zero;
    double shift = 0.0;
    int n = 0;
    double vol = 0.0;
    std::vector<int> act2full, full2act;
    SparseSym A;
    RVec mass;  // q_i

    struct BoundaryLink {
        int row;
        int bnode;  // full-grid index of the boundary node
        double coeff;
    };
    std::vector<BoundaryLink> blinks;

    // (-Delta_g + shift) u, using u's Dirichlet data at boundary faces.
    CVec apply(const Field& u) const {
        if (u.chart != chart || u.bc != bc) throw ConfigError("operator/field mismatch");
        CVec au;
        A.apply(u.values, au);
        for (const auto& bl : blinks)
            au[static_cast<size_t>(bl.row)] -= bl.coeff * boundary_value(u, bl.bnode);
        for (int i = 0; i < n; ++i) {
            au[static_cast<size_t>(i)] *= vol / mass[static_cast<size_t>(i)];
            au[static_cast<size_t>(i)] += shift * u.values[static_cast<size_t>(i)];
        }
        return au;
    }
};

inline DiscreteOperator assemble_operator(const Chart& chart, BcKind bc, double shift = 0.0) {
    if (shift < 0.0) throw ConfigError("assemble_operator: shift must be nonnegative");
    DiscreteOperator op;
    op.chart = &chart;
    op.bc = bc;
    op.shift = shift;
    op.n = active_count(chart, bc);
    op.vol = chart.cell_volume();
    op.act2full = active_to_full(chart, bc);
    op.full2act = full_to_active(chart, bc);
    op.mass = quadrature_weights(chart, bc);
    detail::CooBuilder coo(op.n);
    detail::for_each_face(
        chart, bc,
        [&](int ai, int aj, double c) {
            coo.add(ai, ai, c);
            coo.add(aj, aj, c);
            coo.add(ai, aj, -c);
            coo.add(aj, ai, -c);
        },
        [&](int ai, int bnode, double c) {
            coo.add(ai, ai, c);
            op.blinks.push_back({ai, bnode, c});
        });
    op.A = coo.compress();
    return op;
}

enum class IpKind { l2, energy, h1 };

inline cplx inner_product(const Chart& chart, const Field& u, const Field& v, IpKind kind) {
    check_same_chart(u, v);
    if (u.chart != &chart) throw ConfigError("inner_product: chart mismatch");
    cplx l2{}, en{};
    if (kind == IpKind::l2 || kind == IpKind::h1) {
        const RVec q = quadrature_weights(chart, u.bc);
        for (size_t a = 0; a < q.size(); ++a) l2 += q[a] * u.values[a] * std::conj(v.values[a]);
    }
    if (kind == IpKind::energy || kind == IpKind::h1) {
        const double vol = chart.cell_volume();
        detail::for_each_face(
            chart, u.bc,
            [&](int ai, int aj, double c) {
                const cplx du = u.values[static_cast<size_t>(ai)] - u.values[static_cast<size_t>(aj)];
                const cplx dv = v.values[static_cast<size_t>(ai)] - v.values[static_cast<size_t>(aj)];
                en += vol * c * du * std::conj(dv);
            },
            [&](int ai, int bnode, double c) {
                const cplx du = u.values[static_cast<size_t>(ai)] - boundary_value(u, bnode);
                const cplx dv = v.values[static_cast<size_t>(ai)] - boundary_value(v, bnode);
                en += vol * c * du * std::conj(dv);
            });
    }
    switch (kind) {
        case IpKind::l2: return l2;
        case IpKind::energy: return en;
        case IpKind::h1: return l2 + en;
    }
    return {};
}

inline double norm_l2(const Chart& chart, const Field& u) {
    return std::sqrt(std::abs(inner_product(chart, u, u, IpKind::l2)));
}
inline double norm_energy(const Chart& chart, const Field& u) {
    return std::sqrt(std::abs(inner_product(chart, u, u, IpKind::energy)));
}

// Weighted mean of a field: <u, 1>_l2 / measure.
inline cplx weighted_mean(const Field& u) {
    const RVec q = quadrature_weights(*u.chart, u.bc);
    cplx s{};
    double w = 0.0;
    for (size_t a = 0; a < q.size(); ++a) {
        s += q[a] * u.values[a];
        w += q[a];
    }
    return s / w;
}

struct GradientField {
    const Chart* chart = nullptr;
    BcKind bc = BcKind::dirichlet_zero;
    std::vector<CVec> comp;  // dim components, active-node length each
};

// Centered differences using boundary data where available; the normal
// component at Neumann boundary nodes is set to zero (the boundary condition).
inline GradientField gradient(const Field& u) {
    const Chart& c = *u.chart;
    GradientField g;
    g.chart = u.chart;
    g.bc = u.bc;
    g.comp.assign(static_cast<size_t>(c.dim), CVec(u.values.size(), cplx{}));
    const CVec uf = full_values(u);
    const auto fwd = active_to_full(c, u.bc);
    const int nfx = c.nx_full(), nfy = c.ny_full();
    for (size_t a = 0; a < fwd.size(); ++a) {
        const int full = fwd[a];
        const int ix = full % nfx, iy = full / nfx;
        const auto& ginv = c.inv_metric[static_cast<size_t>(full)];
        for (int axis = 0; axis < c.dim; ++axis) {
            const int i = axis == 0 ? ix : iy;
            const int nf = axis == 0 ? nfx : nfy;
            if (i == 0 || i == nf - 1) continue;  // Neumann boundary node: normal derivative 0
            const int step = axis == 0 ? 1 : nfx;
            const cplx d = (uf[static_cast<size_t>(full + step)] - uf[static_cast<size_t>(full - step)]) /
                           (2.0 * c.spacing[static_cast<size_t>(axis)]);
            g.comp[static_cast<size_t>(axis)][a] = (axis == 0 ? ginv[0] : ginv[1]) * d;
        }
    }
    return g;
}

// Debug dump of the stencil matrix in Matrix Market coordinate format.
inline void write_matrix_market(const DiscreteOperator& op, std::ostream& os) {
    size_t nnz = 0;
    for (int i = 0; i < op.A.n; ++i)
        for (int k = op.A.row_ptr[static_cast<size_t>(i)]; k < op.A.row_ptr[static_cast<size_t>(i) + 1]; ++k)
            if (op.A.col[static_cast<size_t>(k)] <= i) ++nnz;
    os << "%%MatrixMarket matrix coordinate real symmetric\n";
    os << op.A.n << " " << op.A.n << " " << nnz << "\n";
    char buf[64];
    for (int i = 0; i < op.A.n; ++i)
        for (int k = op.A.row_ptr[static_cast<size_t>(i)]; k < op.A.row_ptr[static_cast<size_t>(i) + 1]; ++k)
            if (op.A.col[static_cast<size_t>(k)] <= i) {
                std::snprintf(buf, sizeof buf, "%d %d %.17g\n", i + 1,
                              op.A.col[static_cast<size_t>(k)] + 1, op.A.val[static_cast<size_t>(k)]);
                os << buf;
            }
}

}  // namespace semilin
