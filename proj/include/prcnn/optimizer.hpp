#pragma once

#include <cmath>
#include <cstddef>
#include <vector>

#include "prcnn/error.hpp"
#include "prcnn/model.hpp"
#include "prcnn/tensor.hpp"

namespace prcnn {

// AMSGrad per-parameter state. No bias correction; the max-tracked second
// moment makes the effective step size non-increasing per coordinate.
template <typename T = float>
struct AmsGradState {
    double beta1 = 0.86;
    double beta2 = 0.98;
    double eps = 1e-9;
    std::vector<Tensor<T>> m, v, vhat;
};

template <typename T>
AmsGradState<T> make_amsgrad_state(const std::vector<ParamRef<T>>& params,
                                   double beta1, double beta2, double eps) {
    if (!(beta1 >= 0.0 && beta1 < 1.0) || !(beta2 >= 0.0 && beta2 < 1.0))
        throw parameter_error("amsgrad: decay rates must be in [0, 1)");
    if (!(eps > 0.0)) throw parameter_error("amsgrad: eps must be positive");
    AmsGradState<T> s;
    s.beta1 = beta1;
    s.beta2 = beta2;
    s.eps = eps;
    s.m.reserve(params.size());
    for (const auto& p : params) {
        Tensor<T> z(p.tensor->shape());
        z.fill(T{0});
        s.m.push_back(z);
        s.v.push_back(z);
        s.vhat.push_back(std::move(z));
    }
    return s;
}

// One update over all parameters:
//   m <- b1 m + (1-b1) g,  v <- b2 v + (1-b2) g^2,  vhat <- max(vhat, v),
//   theta <- theta - lr m / sqrt(vhat + eps).
// Rejects non-finite gradients so a diverging run stops instead of silently
// poisoning every moment buffer.
template <typename T>
void amsgrad_step(std::vector<ParamRef<T>>& params,
                  const std::vector<ParamRef<T>>& grads, AmsGradState<T>& state,
                  double lr) {
    if (params.size() != grads.size() || params.size() != state.m.size())
        throw parameter_error("amsgrad: parameter/gradient/state count mismatch");
    if (!std::isfinite(lr) || lr < 0.0)
        throw parameter_error("amsgrad: bad learning rate");
    const T b1 = static_cast<T>(state.beta1), b2 = static_cast<T>(state.beta2);
    const T one_m_b1 = T{1} - b1, one_m_b2 = T{1} - b2;
    const T eps = static_cast<T>(state.eps), step = static_cast<T>(lr);
    for (std::size_t pi = 0; pi < params.size(); ++pi) {
        Tensor<T>& theta = *params[pi].tensor;
        const Tensor<T>& g = *grads[pi].tensor;
        if (g.numel() != theta.numel())
            throw shape_error("amsgrad: gradient shape mismatch");
        Tensor<T>& m = state.m[pi];
        Tensor<T>& v = state.v[pi];
        Tensor<T>& vh = state.vhat[pi];
        for (std::size_t idx = 0; idx < theta.numel(); ++idx) {
            const T gi = g[idx];
            if (!std::isfinite(static_cast<double>(gi)))
                throw numeric_error("amsgrad: non-finite gradient");
            m[idx] = b1 * m[idx] + one_m_b1 * gi;
            v[idx] = b2 * v[idx] + one_m_b2 * gi * gi;
            if (v[idx] > vh[idx]) vh[idx] = v[idx];
            theta[idx] -= step * m[idx] / std::sqrt(vh[idx] + eps);
        }
    }
}

// Cosine-annealed learning rate. The cycle starts at eta_max, decays to
// eta_min over `period` steps; cyclic schedules restart, otherwise the rate
// stays clamped at eta_min.
struct CosineSchedule {
    double eta_min = 0.0;
    double eta_max = 0.0;
    std::size_t period = 0;  // steps per cycle
    bool cyclic = true;
};

inline double cosine_lr(const CosineSchedule& s, std::size_t step) {
    if (s.period == 0) throw parameter_error("cosine schedule: period must be positive");
    if (!(s.eta_min >= 0.0) || !(s.eta_max >= s.eta_min) ||
        !std::isfinite(s.eta_max))
        throw parameter_error("cosine schedule: bad rate bounds");
    std::size_t phase = step;
    if (s.cyclic)
        phase = step % s.period;
    else if (step >= s.period)
        return s.eta_min;
    const double frac = static_cast<double>(phase) / static_cast<double>(s.period);
    return s.eta_min +
           0.5 * (s.eta_max - s.eta_min) * (1.0 + std::cos(frac * 3.14159265358979323846));
}

}  // namespace prcnn
