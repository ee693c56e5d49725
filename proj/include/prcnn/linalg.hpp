#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <numeric>
#include <utility>
#include <vector>

#include "prcnn/error.hpp"
#include "prcnn/tensor.hpp"

namespace prcnn {

template <typename T>
struct SvdCovarianceResult {
    Tensor<T> components;      // d x d, columns orthonormal
    std::vector<T> variances;  // eigenvalues of the sample covariance, desc
};

// Principal axes of an n x d sample matrix. The rows are mean-centered here,
// then the centered matrix is diagonalized by one-sided Jacobi SVD: columns
// are rotated pairwise until mutually orthogonal, accumulating the rotations
// into V. Column norms then give the singular values, and
// variances[k] = s_k^2 / (n - 1) are the sample-covariance eigenvalues.
template <typename T>
SvdCovarianceResult<T> svd_covariance(const Tensor<T>& x) {
    if (x.rank() != 2) throw shape_error("svd_covariance: rank-2 input required");
    const std::size_t n = x.dim(0), d = x.dim(1);
    if (n < 2) throw data_error("svd_covariance: need at least 2 samples");

    // Work in double; centered copy in column-major for cheap column ops.
    std::vector<std::vector<double>> col(d, std::vector<double>(n));
    for (std::size_t j = 0; j < d; ++j) {
        double mean = 0;
        for (std::size_t i = 0; i < n; ++i) mean += x(i, j);
        mean /= static_cast<double>(n);
        for (std::size_t i = 0; i < n; ++i) col[j][i] = x(i, j) - mean;
    }

    std::vector<std::vector<double>> v(d, std::vector<double>(d, 0.0));
    for (std::size_t j = 0; j < d; ++j) v[j][j] = 1.0;

    const double tol = 1e-14;
    const int max_sweeps = 60;
    for (int sweep = 0; sweep < max_sweeps; ++sweep) {
        bool rotated = false;
        for (std::size_t p = 0; p + 1 < d; ++p) {
            for (std::size_t q = p + 1; q < d; ++q) {
                double app = 0, aqq = 0, apq = 0;
                for (std::size_t i = 0; i < n; ++i) {
                    app += col[p][i] * col[p][i];
                    aqq += col[q][i] * col[q][i];
                    apq += col[p][i] * col[q][i];
                }
                if (std::abs(apq) <= tol * std::sqrt(app * aqq) || apq == 0.0)
                    continue;
                rotated = true;
                const double zeta = (aqq - app) / (2.0 * apq);
                const double t = (zeta >= 0 ? 1.0 : -1.0) /
                                 (std::abs(zeta) + std::sqrt(1.0 + zeta * zeta));
                const double c = 1.0 / std::sqrt(1.0 + t * t);
                const double s = c * t;
                for (std::size_t i = 0; i < n; ++i) {
                    const double xp = col[p][i], xq = col[q][i];
                    col[p][i] = c * xp - s * xq;
                    col[q][i] = s * xp + c * xq;
                }
                for (std::size_t i = 0; i < d; ++i) {
                    const double vp = v[p][i], vq = v[q][i];
                    v[p][i] = c * vp - s * vq;
                    v[q][i] = s * vp + c * vq;
                }
            }
        }
        if (!rotated) break;
    }

    std::vector<std::pair<double, std::size_t>> order(d);
    for (std::size_t j = 0; j < d; ++j) {
        double nrm2 = 0;
        for (std::size_t i = 0; i < n; ++i) nrm2 += col[j][i] * col[j][i];
        order[j] = {nrm2 / static_cast<double>(n - 1), j};
    }
    std::stable_sort(order.begin(), order.end(),
                     [](const auto& a, const auto& b) { return a.first > b.first; });

    SvdCovarianceResult<T> out{Tensor<T>({d, d}), std::vector<T>(d)};
    for (std::size_t k = 0; k < d; ++k) {
        out.variances[k] = static_cast<T>(order[k].first);
        const std::size_t j = order[k].second;
        for (std::size_t i = 0; i < d; ++i)
            out.components(i, k) = static_cast<T>(v[j][i]);
    }
    return out;
}

}  // namespace prcnn
