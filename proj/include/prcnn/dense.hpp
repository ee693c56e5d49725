#pragma once

#include <cmath>
#include <cstddef>
#include <utility>

#include "prcnn/error.hpp"
#include "prcnn/rng.hpp"
#include "prcnn/tensor.hpp"

namespace prcnn {

// Affine map applied independently to every row of a sequence. The weights
// are shared across time steps.
template <typename T = float>
struct TimeDistributedDenseLayer {
    Tensor<T> w;  // u x d_out
    Tensor<T> b;  // d_out
};

template <typename T>
void time_distributed_dense_into(const TimeDistributedDenseLayer<T>& layer,
                                 const Tensor<T>& y, Tensor<T>& out) {
    if (layer.w.rank() != 2 || layer.b.rank() != 1 ||
        layer.b.dim(0) != layer.w.dim(1))
        throw shape_error("time_distributed_dense: inconsistent parameters");
    if (y.rank() != 2 || y.dim(1) != layer.w.dim(0))
        throw shape_error("time_distributed_dense: input width mismatch");
    const std::size_t t = y.dim(0), u = layer.w.dim(0), d = layer.w.dim(1);
    for (std::size_t s = 0; s < t; ++s) {
        T* row = out.data() + s * d;
        for (std::size_t j = 0; j < d; ++j) row[j] = layer.b[j];
        vecmat_accum(y.data() + s * u, layer.w.data(), u, d, row);
    }
}

template <typename T>
Tensor<T> time_distributed_dense(const TimeDistributedDenseLayer<T>& layer,
                                 const Tensor<T>& y) {
    if (y.rank() != 2) throw shape_error("time_distributed_dense: rank-2 input required");
    Tensor<T> out({y.dim(0), layer.w.dim(1)});
    time_distributed_dense_into(layer, y, out);
    return out;
}

// d_pre is dL/d(pre-activation rows); accumulates parameter grads and,
// when d_in is non-null, dL/d(input rows).
template <typename T>
void time_distributed_dense_backward(const TimeDistributedDenseLayer<T>& layer,
                                     const Tensor<T>& y, const Tensor<T>& d_pre,
                                     TimeDistributedDenseLayer<T>& grads,
                                     Tensor<T>* d_in) {
    const std::size_t t = y.dim(0), u = layer.w.dim(0), d = layer.w.dim(1);
    for (std::size_t s = 0; s < t; ++s) {
        const T* yrow = y.data() + s * u;
        const T* drow = d_pre.data() + s * d;
        for (std::size_t l = 0; l < u; ++l) {
            T* wrow = grads.w.data() + l * d;
            const T yl = yrow[l];
            for (std::size_t j = 0; j < d; ++j) wrow[j] += yl * drow[j];
        }
        for (std::size_t j = 0; j < d; ++j) grads.b[j] += drow[j];
        if (d_in)
            vecmat_t_accum(drow, layer.w.data(), u, d, d_in->data() + s * u);
    }
}

// Final classification head: scores = flat . W + b, then softmax with the
// usual max shift so exp never overflows.
template <typename T = float>
struct DenseSoftmaxHead {
    Tensor<T> w;  // d_in x k
    Tensor<T> b;  // k
};

template <typename T>
void softmax_into(const T* scores, std::size_t k, T* probs) {
    T hi = scores[0];
    for (std::size_t j = 1; j < k; ++j) hi = std::max(hi, scores[j]);
    if (!std::isfinite(static_cast<double>(hi)))
        throw numeric_error("softmax: non-finite score");
    T sum{0};
    for (std::size_t j = 0; j < k; ++j) {
        probs[j] = std::exp(scores[j] - hi);
        sum += probs[j];
    }
    for (std::size_t j = 0; j < k; ++j) probs[j] /= sum;
}

template <typename T>
void dense_softmax_into(const DenseSoftmaxHead<T>& head, const T* flat,
                        std::size_t d_in, T* scores, T* probs) {
    const std::size_t k = head.w.dim(1);
    for (std::size_t j = 0; j < k; ++j) scores[j] = head.b[j];
    vecmat_accum(flat, head.w.data(), d_in, k, scores);
    softmax_into(scores, k, probs);
}

template <typename T>
Tensor<T> dense_softmax(const DenseSoftmaxHead<T>& head, const Tensor<T>& flat) {
    if (head.w.rank() != 2 || head.b.rank() != 1 || head.b.dim(0) != head.w.dim(1))
        throw shape_error("dense_softmax: inconsistent parameters");
    if (flat.rank() != 1 || flat.dim(0) != head.w.dim(0))
        throw shape_error("dense_softmax: input size mismatch");
    const std::size_t k = head.w.dim(1);
    Tensor<T> scores({k}), probs({k});
    dense_softmax_into(head, flat.data(), flat.dim(0), scores.data(), probs.data());
    return probs;
}

enum class RunMode { train, eval };

// Inverted dropout. The returned mask holds the multiplier actually applied
// to each element: 1/(1-p) where kept, 0 where dropped, all ones in eval
// mode or at p = 0. Backward is a plain elementwise product with the mask.
template <typename T>
std::pair<Tensor<T>, Tensor<T>> dropout_apply(const Tensor<T>& x, double p,
                                              RunMode mode, RngState* rng) {
    if (!(p >= 0.0 && p < 1.0))
        throw parameter_error("dropout: rate must be in [0, 1)");
    Tensor<T> out(x.shape()), mask(x.shape());
    if (mode == RunMode::eval || p == 0.0) {
        mask.fill(T{1});
        out = x;
        return {std::move(out), std::move(mask)};
    }
    if (!rng) throw parameter_error("dropout: training mode needs an rng");
    const T scale = static_cast<T>(1.0 / (1.0 - p));
    for (std::size_t idx = 0; idx < x.numel(); ++idx) {
        mask[idx] = rng->next_double() < p ? T{0} : scale;
        out[idx] = x[idx] * mask[idx];
    }
    return {std::move(out), std::move(mask)};
}

}  // namespace prcnn
