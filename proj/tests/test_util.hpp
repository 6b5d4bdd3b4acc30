#pragma once

// Shared helpers for the test suites: quadrature-based comparison against
// closed-form fields, independent of the production error-norm path where
// noted.

#include <cmath>
#include <functional>
#include <random>

#include "carreau/fe_eval.hpp"
#include "carreau/fe_space.hpp"

namespace carreau::test {

inline double scalar_l2_error(const FeSpace& S, const Vector& coeffs,
                              const std::function<double(const Vec2&)>& exact,
                              int exactness) {
    const Mesh& mesh = S.mesh();
    const BasisCache& cache = BasisCache::get(S.degree(), exactness);
    double sum = 0.0;
    ElementBasis eb;
    for (int e = 0; e < mesh.n_triangles(); ++e) {
        eb.bind(mesh, e, cache);
        for (int q = 0; q < eb.n_points(); ++q) {
            const double d = eval_scalar(S, coeffs, e, eb, q) - exact(eb.point(q));
            sum += eb.weight(q) * d * d;
        }
    }
    return std::sqrt(sum);
}

inline std::mt19937 seeded_rng(unsigned seed = 20240101) { return std::mt19937(seed); }

} // namespace carreau::test
