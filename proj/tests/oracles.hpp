// Test-only oracles, independent of the library's solver paths: a dense
// full-spectrum eigensolver (Eigen) for the generalized problem
// K v = lambda M v, and closed-form discrete eigenvalues of the uniform
// stencils.
#pragma once

#include <Eigen/Dense>

#include <cmath>
#include <vector>

#include "semilin/operators.hpp"

namespace oracles {

// All generalized eigenvalues of (vol*A) v = lambda diag(q) v, ascending.
inline std::vector<double> dense_spectrum(const semilin::DiscreteOperator& op) {
    const int n = op.n;
    Eigen::MatrixXd b(n, n);
    b.setZero();
    const auto dense = op.A.to_dense();
    for (int i = 0; i < n; ++i)
        for (int j = 0; j < n; ++j)
            b(i, j) = op.vol * dense[static_cast<size_t>(i)][static_cast<size_t>(j)] /
                      std::sqrt(op.mass[static_cast<size_t>(i)] * op.mass[static_cast<size_t>(j)]);
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(b);
    std::vector<double> ev(es.eigenvalues().data(), es.eigenvalues().data() + n);
    return ev;
}

inline double dense_smallest(const semilin::DiscreteOperator& op) { return dense_spectrum(op).front(); }

inline double dense_smallest_nonzero(const semilin::DiscreteOperator& op, double zero_tol = 1e-8) {
    for (const double ev : dense_spectrum(op))
        if (ev > zero_tol) return ev;
    return 0.0;
}

// Discrete Dirichlet eigenvalue of the uniform 1D stencil on (0, L):
// (2/h^2)(1 - cos(k pi h / L)).
inline double discrete_dirichlet_lambda(int n_interior, double length, int k = 1) {
    const double h = length / (n_interior + 1);
    constexpr double pi = 3.14159265358979323846;
    return 2.0 / (h * h) * (1.0 - std::cos(k * pi * h / length));
}

}  // namespace oracles
