#pragma once

// Shared helpers for the test suites: deterministic random matrices and
// small conveniences. All randomness flows through the library's own
// counter generator so failures reproduce exactly.

#include <cmath>
#include <vector>

#include "svp/matrix.hpp"
#include "svp/rng.hpp"

namespace test_util {

inline svp::sym_matrix random_sym(int n, std::uint64_t seed, double scale = 1.0) {
    svp::sym_matrix m(n);
    svp::rng_stream g(seed, 0);
    for (int i = 0; i < n; ++i)
        for (int j = i; j < n; ++j) m.set(i, j, scale * g.next_gaussian());
    return m;
}

inline svp::rect_matrix random_rect(int rows, int cols, std::uint64_t seed, double scale = 1.0) {
    svp::rect_matrix m(rows, cols);
    svp::rng_stream g(seed, 1);
    for (int i = 0; i < rows; ++i)
        for (int j = 0; j < cols; ++j) m(i, j) = scale * g.next_gaussian();
    return m;
}

inline std::vector<double> unit_vector(int n, std::uint64_t seed) {
    svp::rng_stream g(seed, 2);
    std::vector<double> u(n);
    double nn = 0.0;
    for (int l = 0; l < n; ++l) {
        u[l] = g.next_gaussian();
        nn += u[l] * u[l];
    }
    for (double& v : u) v /= std::sqrt(nn);
    return u;
}

} // namespace test_util
