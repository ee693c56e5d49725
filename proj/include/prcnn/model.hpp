#pragma once

#include <cstddef>
#include <string>
#include <utility>
#include <vector>

#include "prcnn/conv.hpp"
#include "prcnn/dense.hpp"
#include "prcnn/error.hpp"
#include "prcnn/rng.hpp"
#include "prcnn/rnn.hpp"
#include "prcnn/tensor.hpp"

namespace prcnn {

// Network layout for one pixel time series: t x b input -> LSTM -> dropout
// -> shared dense -> t x d_out x 1 image -> two valid conv+ReLU stages ->
// flatten -> softmax over k classes.
struct ModelConfig {
    std::size_t t = 9;       // time steps
    std::size_t b = 5;       // bands per step
    std::size_t u = 32;      // recurrent units
    std::size_t d_out = 9;   // shared dense width
    std::size_t n1 = 16;     // conv1 filters
    std::size_t f1 = 3;      // conv1 window
    std::size_t n2 = 32;     // conv2 filters
    std::size_t f2 = 7;      // conv2 window
    std::size_t k = 15;      // classes
    bool peepholes = false;
    bool tdd_relu = false;
    double dropout_p = 0.2;
};

struct ShapeChain {
    std::size_t h1, w1, h2, w2, d_in;
};

inline ShapeChain validate_config(const ModelConfig& cfg) {
    const std::size_t dims[] = {cfg.t, cfg.b,  cfg.u,  cfg.d_out, cfg.n1,
                                cfg.f1, cfg.n2, cfg.f2, cfg.k};
    for (std::size_t d : dims)
        if (d == 0) throw shape_error("model config: all dimensions must be positive");
    if (cfg.t < cfg.f1 || cfg.d_out < cfg.f1)
        throw shape_error("model config: conv1 window exceeds its input");
    ShapeChain s{};
    s.h1 = cfg.t - cfg.f1 + 1;
    s.w1 = cfg.d_out - cfg.f1 + 1;
    if (s.h1 < cfg.f2 || s.w1 < cfg.f2)
        throw shape_error("model config: conv2 window exceeds its input");
    s.h2 = s.h1 - cfg.f2 + 1;
    s.w2 = s.w1 - cfg.f2 + 1;
    s.d_in = s.h2 * s.w2 * cfg.n2;
    if (!(cfg.dropout_p >= 0.0 && cfg.dropout_p < 1.0))
        throw parameter_error("model config: dropout rate must be in [0, 1)");
    return s;
}

template <typename T = float>
struct PixelRcnnModel {
    ModelConfig config;
    PeepholeLstmCell<T> lstm;
    TimeDistributedDenseLayer<T> tdd;
    Conv2dLayer<T> conv1, conv2;
    DenseSoftmaxHead<T> head;
};

template <typename T>
PixelRcnnModel<T> make_model(const ModelConfig& cfg) {
    const ShapeChain s = validate_config(cfg);
    PixelRcnnModel<T> m;
    m.config = cfg;
    m.lstm = make_lstm_cell<T>(cfg.b, cfg.u, cfg.peepholes);
    m.tdd.w = Tensor<T>({cfg.u, cfg.d_out});
    m.tdd.b = Tensor<T>({cfg.d_out});
    m.conv1 = make_conv_layer<T>(cfg.f1, 1, cfg.n1);
    m.conv2 = make_conv_layer<T>(cfg.f2, cfg.n1, cfg.n2);
    m.head.w = Tensor<T>({s.d_in, cfg.k});
    m.head.b = Tensor<T>({cfg.k});
    return m;
}

template <typename T>
struct ParamRef {
    std::string name;
    Tensor<T>* tensor;
};

// Fixed parameter ordering shared by the optimizer state, checkpoints and
// gradient holders. Peephole vectors appear only when enabled.
template <typename T, typename M>
std::vector<ParamRef<T>> collect_param_refs(M& m, bool peepholes) {
    std::vector<ParamRef<T>> out;
    auto add = [&](const char* name, Tensor<T>& t) { out.push_back({name, &t}); };
    add("lstm.w_xi", m.lstm.w_xi);
    add("lstm.w_hi", m.lstm.w_hi);
    if (peepholes) add("lstm.w_ci", m.lstm.w_ci);
    add("lstm.b_i", m.lstm.b_i);
    add("lstm.w_xf", m.lstm.w_xf);
    add("lstm.w_hf", m.lstm.w_hf);
    if (peepholes) add("lstm.w_cf", m.lstm.w_cf);
    add("lstm.b_f", m.lstm.b_f);
    add("lstm.w_xo", m.lstm.w_xo);
    add("lstm.w_ho", m.lstm.w_ho);
    if (peepholes) add("lstm.w_co", m.lstm.w_co);
    add("lstm.b_o", m.lstm.b_o);
    add("lstm.w_xg", m.lstm.w_xg);
    add("lstm.w_hg", m.lstm.w_hg);
    add("lstm.b_g", m.lstm.b_g);
    add("tdd.w", m.tdd.w);
    add("tdd.b", m.tdd.b);
    add("conv1.w", m.conv1.w);
    add("conv1.b", m.conv1.b);
    add("conv2.w", m.conv2.w);
    add("conv2.b", m.conv2.b);
    add("head.w", m.head.w);
    add("head.b", m.head.b);
    return out;
}

template <typename T>
std::vector<ParamRef<T>> model_params(PixelRcnnModel<T>& m) {
    return collect_param_refs<T>(m, m.config.peepholes);
}

template <typename T>
std::size_t param_count(const PixelRcnnModel<T>& m) {
    auto& mut = const_cast<PixelRcnnModel<T>&>(m);
    std::size_t n = 0;
    for (const auto& p : model_params(mut)) n += p.tensor->numel();
    return n;
}

// Weight init: uniform Glorot bounds for feed-forward maps, orthogonal
// recurrent maps, zero biases except the forget gate which starts open at 1.
template <typename T>
void init_params(PixelRcnnModel<T>& m, RngState& rng) {
    auto glorot = [&](Tensor<T>& w, double fan_in, double fan_out) {
        const double bound = std::sqrt(6.0 / (fan_in + fan_out));
        w = seeded_init<T>(rng, InitKind::uniform, w.shape(), -bound, bound);
    };
    const ModelConfig& c = m.config;
    Tensor<T>* gate_x[] = {&m.lstm.w_xi, &m.lstm.w_xf, &m.lstm.w_xo, &m.lstm.w_xg};
    Tensor<T>* gate_h[] = {&m.lstm.w_hi, &m.lstm.w_hf, &m.lstm.w_ho, &m.lstm.w_hg};
    for (auto* w : gate_x) glorot(*w, double(c.b), double(c.u));
    for (auto* w : gate_h)
        *w = seeded_init<T>(rng, InitKind::orthogonal, {c.u, c.u});
    m.lstm.w_ci.fill(T{0});
    m.lstm.w_cf.fill(T{0});
    m.lstm.w_co.fill(T{0});
    m.lstm.b_i.fill(T{0});
    m.lstm.b_f.fill(T{1});
    m.lstm.b_o.fill(T{0});
    m.lstm.b_g.fill(T{0});
    glorot(m.tdd.w, double(c.u), double(c.d_out));
    m.tdd.b.fill(T{0});
    glorot(m.conv1.w, double(c.f1 * c.f1 * 1), double(c.f1 * c.f1 * c.n1));
    m.conv1.b.fill(T{0});
    glorot(m.conv2.w, double(c.f2 * c.f2 * c.n1), double(c.f2 * c.f2 * c.n2));
    m.conv2.b.fill(T{0});
    glorot(m.head.w, double(m.head.w.dim(0)), double(c.k));
    m.head.b.fill(T{0});
}

// Gradient holder with the same layout as the model parameters.
template <typename T = float>
struct ModelGradients {
    bool peepholes = false;
    PeepholeLstmCell<T> lstm;
    TimeDistributedDenseLayer<T> tdd;
    Conv2dLayer<T> conv1, conv2;
    DenseSoftmaxHead<T> head;

    std::vector<ParamRef<T>> params() {
        return collect_param_refs<T>(*this, peepholes);
    }
    void zero() {
        for (auto& p : params()) p.tensor->fill(T{0});
    }
};

template <typename T>
ModelGradients<T> make_gradients(const ModelConfig& cfg) {
    PixelRcnnModel<T> proto = make_model<T>(cfg);
    ModelGradients<T> g;
    g.peepholes = cfg.peepholes;
    g.lstm = std::move(proto.lstm);
    g.tdd = std::move(proto.tdd);
    g.conv1 = std::move(proto.conv1);
    g.conv2 = std::move(proto.conv2);
    g.head = std::move(proto.head);
    g.zero();
    return g;
}

// Every intermediate needed to replay the forward pass backwards.
template <typename T = float>
struct ForwardCache {
    ModelConfig config;
    bool valid = false;
    RunMode mode = RunMode::eval;
    LstmSequenceCache<T> seq;
    Tensor<T> drop_mask;   // t x u, applied multipliers
    Tensor<T> y_drop;      // t x u
    Tensor<T> tdd_pre;     // t x d_out
    Tensor<T> y_timed;     // t x d_out x 1, conv1 input
    Tensor<T> conv1_pre, conv1_out;  // h1 x w1 x n1
    Tensor<T> conv2_pre, conv2_out;  // h2 x w2 x n2
    Tensor<T> scores, probs;         // k
};

template <typename T>
ForwardCache<T> make_cache(const ModelConfig& cfg) {
    const ShapeChain s = validate_config(cfg);
    ForwardCache<T> c;
    c.config = cfg;
    c.seq = make_lstm_sequence_cache<T>(cfg.t, cfg.b, cfg.u);
    c.drop_mask = Tensor<T>({cfg.t, cfg.u});
    c.y_drop = Tensor<T>({cfg.t, cfg.u});
    c.tdd_pre = Tensor<T>({cfg.t, cfg.d_out});
    c.y_timed = Tensor<T>({cfg.t, cfg.d_out, 1});
    c.conv1_pre = Tensor<T>({s.h1, s.w1, cfg.n1});
    c.conv1_out = Tensor<T>({s.h1, s.w1, cfg.n1});
    c.conv2_pre = Tensor<T>({s.h2, s.w2, cfg.n2});
    c.conv2_out = Tensor<T>({s.h2, s.w2, cfg.n2});
    c.scores = Tensor<T>({cfg.k});
    c.probs = Tensor<T>({cfg.k});
    return c;
}

// Full forward pass for one pixel. In training mode dropout draws from rng
// unless fixed_mask (a t x u multiplier tensor) is supplied; eval mode is
// deterministic and needs neither. Class probabilities land in cache.probs.
template <typename T>
void model_forward_into(const PixelRcnnModel<T>& m, const Tensor<T>& x,
                        RunMode mode, RngState* rng, ForwardCache<T>& cache,
                        const Tensor<T>* fixed_mask = nullptr) {
    const ModelConfig& cfg = m.config;
    if (x.rank() != 2 || x.dim(0) != cfg.t || x.dim(1) != cfg.b)
        throw shape_error("model_forward: input must be t x b");
    cache.valid = false;
    cache.mode = mode;

    lstm_sequence_forward_into(m.lstm, x, cache.seq);

    const std::size_t tu = cfg.t * cfg.u;
    if (mode == RunMode::train && cfg.dropout_p > 0.0) {
        if (fixed_mask) {
            if (fixed_mask->numel() != tu)
                throw shape_error("model_forward: dropout mask size mismatch");
            for (std::size_t idx = 0; idx < tu; ++idx)
                cache.drop_mask[idx] = (*fixed_mask)[idx];
        } else {
            if (!rng)
                throw parameter_error("model_forward: training mode needs an rng");
            const T scale = static_cast<T>(1.0 / (1.0 - cfg.dropout_p));
            for (std::size_t idx = 0; idx < tu; ++idx)
                cache.drop_mask[idx] =
                    rng->next_double() < cfg.dropout_p ? T{0} : scale;
        }
    } else {
        cache.drop_mask.fill(T{1});
    }
    for (std::size_t idx = 0; idx < tu; ++idx)
        cache.y_drop[idx] = cache.seq.h[idx] * cache.drop_mask[idx];

    time_distributed_dense_into(m.tdd, cache.y_drop, cache.tdd_pre);
    for (std::size_t idx = 0; idx < cache.tdd_pre.numel(); ++idx) {
        const T v = cache.tdd_pre[idx];
        cache.y_timed[idx] = (cfg.tdd_relu && v < T{0}) ? T{0} : v;
    }

    conv2d_relu_forward_into(m.conv1, cache.y_timed, cache.conv1_pre,
                             cache.conv1_out);
    conv2d_relu_forward_into(m.conv2, cache.conv1_out, cache.conv2_pre,
                             cache.conv2_out);
    dense_softmax_into(m.head, cache.conv2_out.data(), cache.conv2_out.numel(),
                       cache.scores.data(), cache.probs.data());
    cache.valid = true;
}

template <typename T>
std::pair<Tensor<T>, ForwardCache<T>> model_forward(const PixelRcnnModel<T>& m,
                                                    const Tensor<T>& x,
                                                    RunMode mode,
                                                    RngState* rng = nullptr) {
    ForwardCache<T> cache = make_cache<T>(m.config);
    model_forward_into(m, x, mode, rng, cache);
    return {cache.probs, std::move(cache)};
}

// Cross-entropy gradient for the cached pass; accumulates into grads.
// The softmax/loss combination gives dL/dscores = p - onehot(y_true).
template <typename T>
void model_backward_into(const PixelRcnnModel<T>& m, const ForwardCache<T>& cache,
                         std::size_t y_true, ModelGradients<T>& grads) {
    const ModelConfig& cfg = m.config;
    if (!cache.valid) throw parameter_error("model_backward: stale forward cache");
    if (y_true >= cfg.k) throw data_error("model_backward: label out of range");

    const std::size_t d_in = cache.conv2_out.numel();
    std::vector<T> d_scores(cfg.k);
    for (std::size_t j = 0; j < cfg.k; ++j)
        d_scores[j] = cache.probs[j] - (j == y_true ? T{1} : T{0});

    const T* flat = cache.conv2_out.data();
    for (std::size_t l = 0; l < d_in; ++l) {
        T* wrow = grads.head.w.data() + l * cfg.k;
        for (std::size_t j = 0; j < cfg.k; ++j) wrow[j] += flat[l] * d_scores[j];
    }
    for (std::size_t j = 0; j < cfg.k; ++j) grads.head.b[j] += d_scores[j];

    Tensor<T> d_conv2_out(cache.conv2_out.shape());
    d_conv2_out.fill(T{0});
    vecmat_t_accum(d_scores.data(), m.head.w.data(), d_in, cfg.k,
                   d_conv2_out.data());

    Tensor<T> d_conv1_out(cache.conv1_out.shape());
    d_conv1_out.fill(T{0});
    conv2d_relu_backward(m.conv2, cache.conv1_out, cache.conv2_pre, d_conv2_out,
                         grads.conv2, &d_conv1_out);

    Tensor<T> d_y_timed(cache.y_timed.shape());
    d_y_timed.fill(T{0});
    conv2d_relu_backward(m.conv1, cache.y_timed, cache.conv1_pre, d_conv1_out,
                         grads.conv1, &d_y_timed);

    // Back through the optional ReLU on the shared dense output.
    Tensor<T> d_tdd_pre({cfg.t, cfg.d_out});
    for (std::size_t idx = 0; idx < d_tdd_pre.numel(); ++idx)
        d_tdd_pre[idx] = (cfg.tdd_relu && cache.tdd_pre[idx] <= T{0})
                             ? T{0}
                             : d_y_timed[idx];

    Tensor<T> d_y_drop({cfg.t, cfg.u});
    d_y_drop.fill(T{0});
    time_distributed_dense_backward(m.tdd, cache.y_drop, d_tdd_pre, grads.tdd,
                                    &d_y_drop);

    Tensor<T> d_y_lstm({cfg.t, cfg.u});
    for (std::size_t idx = 0; idx < d_y_lstm.numel(); ++idx)
        d_y_lstm[idx] = d_y_drop[idx] * cache.drop_mask[idx];

    lstm_sequence_backward(m.lstm, cache.seq, d_y_lstm, grads.lstm);
}

template <typename T>
ModelGradients<T> model_backward(const PixelRcnnModel<T>& m,
                                 const ForwardCache<T>& cache,
                                 std::size_t y_true) {
    ModelGradients<T> grads = make_gradients<T>(m.config);
    model_backward_into(m, cache, y_true, grads);
    return grads;
}

}  // namespace prcnn
