// Complex grid functions with boundary-condition tagging. The active node
// set of a field depends on its boundary condition: Dirichlet fields carry
// values at interior nodes (boundary values live in bc_data, or are zero);
// Neumann fields carry values at every node, boundary included.
#pragma once

#include <algorithm>
#include <complex>
#include <functional>
#include <vector>

#include "semilin/errors.hpp"
#include "semilin/grid.hpp"

namespace semilin {

using cplx = std::complex<double>;
using CVec = std::vector<cplx>;
using RVec = std::vector<double>;

enum class BcKind { dirichlet_zero, dirichlet_data, neumann };

inline const char* bc_kind_name(BcKind bc) {
    switch (bc) {
        case BcKind::dirichlet_zero: return "dirichlet_zero";
        case BcKind::dirichlet_data: return "dirichlet_data";
        case BcKind::neumann: return "neumann";
    }
    return "?";
}

inline bool is_dirichlet(BcKind bc) { return bc != BcKind::neumann; }

inline int active_count(const Chart& c, BcKind bc) {
    return is_dirichlet(bc) ? c.interior_count() : c.full_count();
}

// Active index <-> full grid index, row-major over the active set.
inline std::vector<int> active_to_full(const Chart& c, BcKind bc) {
    std::vector<int> map;
    map.reserve(static_cast<size_t>(active_count(c, bc)));
    for (int i = 0; i < c.full_count(); ++i)
        if (bc == BcKind::neumann || !c.is_boundary(i)) map.push_back(i);
    return map;
}

inline std::vector<int> full_to_active(const Chart& c, BcKind bc) {
    std::vector<int> inv(static_cast<size_t>(c.full_count()), -1);
    const auto fwd = active_to_full(c, bc);
    for (size_t a = 0; a < fwd.size(); ++a) inv[static_cast<size_t>(fwd[a])] = static_cast<int>(a);
    return inv;
}

struct Field {
    const Chart* chart = nullptr;
    BcKind bc = BcKind::dirichlet_zero;
    CVec values;   // one entry per active node
    CVec bc_data;  // parallel to chart->boundary_nodes; nonempty only for dirichlet_data
    bool mean_zero = false;
};

inline Field make_field(const Chart& c, BcKind bc) {
    Field f;
    f.chart = &c;
    f.bc = bc;
    f.values.assign(static_cast<size_t>(active_count(c, bc)), cplx{});
    if (bc == BcKind::dirichlet_data)
        f.bc_data.assign(c.boundary_nodes.size(), cplx{});
    return f;
}

template <class Fn>
inline Field sample_field(const Chart& c, BcKind bc, Fn&& fn) {
    Field f = make_field(c, bc);
    const auto fwd = active_to_full(c, bc);
    for (size_t a = 0; a < fwd.size(); ++a) {
        const auto& xy = c.coords[static_cast<size_t>(fwd[a])];
        f.values[a] = fn(xy[0], xy[1]);
    }
    if (bc == BcKind::dirichlet_data)
        for (size_t b = 0; b < c.boundary_nodes.size(); ++b) {
            const auto& xy = c.coords[static_cast<size_t>(c.boundary_nodes[b])];
            f.bc_data[b] = fn(xy[0], xy[1]);
        }
    return f;
}

inline cplx boundary_value(const Field& f, int full_node) {
    if (f.bc == BcKind::dirichlet_zero || f.bc == BcKind::neumann) return cplx{};
    const auto& bn = f.chart->boundary_nodes;
    const auto it = std::lower_bound(bn.begin(), bn.end(), full_node);
    if (it == bn.end() || *it != full_node)
        throw ConfigError("boundary_value: node is not a boundary node");
    return f.bc_data[static_cast<size_t>(it - bn.begin())];
}

// Values on the full grid, boundary layer filled from bc_data (Dirichlet)
// or from the active values themselves (Neumann).
inline CVec full_values(const Field& f) {
    const Chart& c = *f.chart;
    CVec out(static_cast<size_t>(c.full_count()), cplx{});
    const auto fwd = active_to_full(c, f.bc);
    for (size_t a = 0; a < fwd.size(); ++a) out[static_cast<size_t>(fwd[a])] = f.values[a];
    if (f.bc == BcKind::dirichlet_data)
        for (size_t b = 0; b < c.boundary_nodes.size(); ++b)
            out[static_cast<size_t>(c.boundary_nodes[b])] = f.bc_data[b];
    return out;
}

inline void check_same_chart(const Field& u, const Field& v) {
    if (u.chart != v.chart || u.bc != v.bc)
        throw ConfigError("fields live on different charts or boundary conditions");
}

}  // namespace semilin
