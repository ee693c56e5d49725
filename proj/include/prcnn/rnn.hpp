#pragma once

#include <cmath>
#include <cstddef>
#include <vector>

#include "prcnn/error.hpp"
#include "prcnn/tensor.hpp"

namespace prcnn {

template <typename T>
inline T sigmoid(T x) {
    return T{1} / (T{1} + std::exp(-x));
}

// Basic recurrent cell: y_t = tanh(x_t . W_x + y_prev . W_y + bias).
template <typename T = float>
struct BasicRnnCell {
    Tensor<T> w_x;   // b x u
    Tensor<T> w_y;   // u x u
    Tensor<T> bias;  // u

    std::size_t input_size() const { return w_x.dim(0); }
    std::size_t units() const { return w_x.dim(1); }
};

template <typename T>
void check_basic_rnn(const BasicRnnCell<T>& cell) {
    if (cell.w_x.rank() != 2 || cell.w_y.rank() != 2 || cell.bias.rank() != 1 ||
        cell.w_y.dim(0) != cell.w_x.dim(1) || cell.w_y.dim(1) != cell.w_x.dim(1) ||
        cell.bias.dim(0) != cell.w_x.dim(1))
        throw shape_error("basic rnn cell: inconsistent parameter shapes");
}

template <typename T>
Tensor<T> basic_rnn_step(const BasicRnnCell<T>& cell, const Tensor<T>& x_t,
                         const Tensor<T>& y_prev) {
    check_basic_rnn(cell);
    const std::size_t b = cell.input_size(), u = cell.units();
    if (x_t.rank() != 1 || x_t.dim(0) != b)
        throw shape_error("basic_rnn_step: input size mismatch");
    if (y_prev.rank() != 1 || y_prev.dim(0) != u)
        throw shape_error("basic_rnn_step: state size mismatch");
    Tensor<T> y({u});
    for (std::size_t j = 0; j < u; ++j) y[j] = cell.bias[j];
    vecmat_accum(x_t.data(), cell.w_x.data(), b, u, y.data());
    vecmat_accum(y_prev.data(), cell.w_y.data(), u, u, y.data());
    for (std::size_t j = 0; j < u; ++j) y[j] = std::tanh(y[j]);
    return y;
}

// Gradient of a single basic RNN step w.r.t. its parameters and inputs,
// given dL/dy_t. Accumulates into the grad cell.
template <typename T>
void basic_rnn_step_backward(const BasicRnnCell<T>& cell, const Tensor<T>& x_t,
                             const Tensor<T>& y_prev, const Tensor<T>& y_t,
                             const Tensor<T>& dy_t, BasicRnnCell<T>& grads,
                             Tensor<T>* dx_t, Tensor<T>* dy_prev) {
    const std::size_t b = cell.input_size(), u = cell.units();
    std::vector<T> da(u);
    for (std::size_t j = 0; j < u; ++j)
        da[j] = dy_t[j] * (T{1} - y_t[j] * y_t[j]);
    for (std::size_t l = 0; l < b; ++l)
        for (std::size_t j = 0; j < u; ++j)
            grads.w_x(l, j) += x_t[l] * da[j];
    for (std::size_t l = 0; l < u; ++l)
        for (std::size_t j = 0; j < u; ++j)
            grads.w_y(l, j) += y_prev[l] * da[j];
    for (std::size_t j = 0; j < u; ++j) grads.bias[j] += da[j];
    if (dx_t) vecmat_t_accum(da.data(), cell.w_x.data(), b, u, dx_t->data());
    if (dy_prev) vecmat_t_accum(da.data(), cell.w_y.data(), u, u, dy_prev->data());
}

// LSTM cell with optional diagonal peephole connections. Gate controllers
// are sigmoid, signal paths tanh. The output gate reads the freshly updated
// long-term state c_t, not c_{t-1}. With peepholes disabled the w_c* vectors
// are not part of the trainable-parameter set.
template <typename T = float>
struct PeepholeLstmCell {
    bool peepholes_enabled = false;
    Tensor<T> w_xi, w_hi, w_ci, b_i;  // input gate
    Tensor<T> w_xf, w_hf, w_cf, b_f;  // forget gate
    Tensor<T> w_xo, w_ho, w_co, b_o;  // output gate
    Tensor<T> w_xg, w_hg, b_g;        // candidate

    std::size_t input_size() const { return w_xi.dim(0); }
    std::size_t units() const { return w_xi.dim(1); }
};

template <typename T>
PeepholeLstmCell<T> make_lstm_cell(std::size_t input_size, std::size_t units,
                                   bool peepholes) {
    if (input_size == 0 || units == 0)
        throw shape_error("lstm cell: sizes must be positive");
    PeepholeLstmCell<T> c;
    c.peepholes_enabled = peepholes;
    auto mat = [&] { return Tensor<T>({input_size, units}); };
    auto rec = [&] { return Tensor<T>({units, units}); };
    auto vec = [&] { return Tensor<T>({units}); };
    c.w_xi = mat(); c.w_hi = rec(); c.w_ci = vec(); c.b_i = vec();
    c.w_xf = mat(); c.w_hf = rec(); c.w_cf = vec(); c.b_f = vec();
    c.w_xo = mat(); c.w_ho = rec(); c.w_co = vec(); c.b_o = vec();
    c.w_xg = mat(); c.w_hg = rec(); c.b_g = vec();
    return c;
}

template <typename T>
void check_lstm_shapes(const PeepholeLstmCell<T>& cell) {
    const std::size_t b = cell.w_xi.dim(0), u = cell.w_xi.dim(1);
    auto m = [&](const Tensor<T>& t, std::size_t r, std::size_t c) {
        return t.rank() == 2 && t.dim(0) == r && t.dim(1) == c;
    };
    auto v = [&](const Tensor<T>& t) { return t.rank() == 1 && t.dim(0) == u; };
    if (!(m(cell.w_xi, b, u) && m(cell.w_xf, b, u) && m(cell.w_xo, b, u) &&
          m(cell.w_xg, b, u) && m(cell.w_hi, u, u) && m(cell.w_hf, u, u) &&
          m(cell.w_ho, u, u) && m(cell.w_hg, u, u) && v(cell.b_i) &&
          v(cell.b_f) && v(cell.b_o) && v(cell.b_g) && v(cell.w_ci) &&
          v(cell.w_cf) && v(cell.w_co)))
        throw shape_error("lstm cell: inconsistent parameter shapes");
}

// Raw-pointer step kernel; all buffers length u except x_t (length b).
// Stores the activated gate values, which is what backward needs.
template <typename T>
void lstm_step_kernel(const PeepholeLstmCell<T>& cell, const T* x_t,
                      const T* h_prev, const T* c_prev, T* gi, T* gf, T* go,
                      T* gg, T* c_out, T* tanh_c_out, T* h_out) {
    const std::size_t b = cell.input_size(), u = cell.units();
    const bool peep = cell.peepholes_enabled;

    for (std::size_t j = 0; j < u; ++j) {
        gi[j] = cell.b_i[j] + (peep ? cell.w_ci[j] * c_prev[j] : T{0});
        gf[j] = cell.b_f[j] + (peep ? cell.w_cf[j] * c_prev[j] : T{0});
        gg[j] = cell.b_g[j];
    }
    vecmat_accum(x_t, cell.w_xi.data(), b, u, gi);
    vecmat_accum(h_prev, cell.w_hi.data(), u, u, gi);
    vecmat_accum(x_t, cell.w_xf.data(), b, u, gf);
    vecmat_accum(h_prev, cell.w_hf.data(), u, u, gf);
    vecmat_accum(x_t, cell.w_xg.data(), b, u, gg);
    vecmat_accum(h_prev, cell.w_hg.data(), u, u, gg);
    for (std::size_t j = 0; j < u; ++j) {
        gi[j] = sigmoid(gi[j]);
        gf[j] = sigmoid(gf[j]);
        gg[j] = std::tanh(gg[j]);
        c_out[j] = gf[j] * c_prev[j] + gi[j] * gg[j];
    }
    for (std::size_t j = 0; j < u; ++j)
        go[j] = cell.b_o[j] + (peep ? cell.w_co[j] * c_out[j] : T{0});
    vecmat_accum(x_t, cell.w_xo.data(), b, u, go);
    vecmat_accum(h_prev, cell.w_ho.data(), u, u, go);
    for (std::size_t j = 0; j < u; ++j) {
        go[j] = sigmoid(go[j]);
        tanh_c_out[j] = std::tanh(c_out[j]);
        h_out[j] = go[j] * tanh_c_out[j];
    }
}

template <typename T>
struct LstmStepResult {
    Tensor<T> y, h, c;  // y == h
};

template <typename T>
LstmStepResult<T> lstm_step(const PeepholeLstmCell<T>& cell, const Tensor<T>& x_t,
                            const Tensor<T>& h_prev, const Tensor<T>& c_prev) {
    check_lstm_shapes(cell);
    const std::size_t b = cell.input_size(), u = cell.units();
    if (x_t.rank() != 1 || x_t.dim(0) != b)
        throw shape_error("lstm_step: input size mismatch");
    if (h_prev.rank() != 1 || h_prev.dim(0) != u || c_prev.rank() != 1 ||
        c_prev.dim(0) != u)
        throw shape_error("lstm_step: state size mismatch");
    Tensor<T> gi({u}), gf({u}), go({u}), gg({u}), c({u}), tanh_c({u}), h({u});
    lstm_step_kernel(cell, x_t.data(), h_prev.data(), c_prev.data(), gi.data(),
                     gf.data(), go.data(), gg.data(), c.data(), tanh_c.data(),
                     h.data());
    return {h, h, c};
}

// Per-step activations of a full sequence pass; rows indexed by time step.
template <typename T>
struct LstmSequenceCache {
    Tensor<T> x;                  // t x b
    Tensor<T> gi, gf, go, gg;     // t x u, activated gates
    Tensor<T> c, tanh_c, h;       // t x u
};

template <typename T>
LstmSequenceCache<T> make_lstm_sequence_cache(std::size_t t, std::size_t b,
                                              std::size_t u) {
    LstmSequenceCache<T> s;
    s.x = Tensor<T>({t, b});
    s.gi = Tensor<T>({t, u});
    s.gf = Tensor<T>({t, u});
    s.go = Tensor<T>({t, u});
    s.gg = Tensor<T>({t, u});
    s.c = Tensor<T>({t, u});
    s.tanh_c = Tensor<T>({t, u});
    s.h = Tensor<T>({t, u});
    return s;
}

// Runs the cell over all rows of X with h0 = c0 = 0, filling the cache.
// cache.h is the cumulative output Y_lstm.
template <typename T>
void lstm_sequence_forward_into(const PeepholeLstmCell<T>& cell,
                                const Tensor<T>& x, LstmSequenceCache<T>& seq) {
    check_lstm_shapes(cell);
    if (x.rank() != 2) throw shape_error("lstm_sequence_forward: rank-2 input required");
    const std::size_t t = x.dim(0), b = cell.input_size(), u = cell.units();
    if (x.dim(1) != b)
        throw shape_error("lstm_sequence_forward: band count mismatch");
    if (t == 0) throw shape_error("lstm_sequence_forward: empty sequence");
    seq.x = x;
    std::vector<T> zeros(u, T{0});
    for (std::size_t step = 0; step < t; ++step) {
        const T* h_prev = step == 0 ? zeros.data() : seq.h.data() + (step - 1) * u;
        const T* c_prev = step == 0 ? zeros.data() : seq.c.data() + (step - 1) * u;
        lstm_step_kernel(cell, x.data() + step * b, h_prev, c_prev,
                         seq.gi.data() + step * u, seq.gf.data() + step * u,
                         seq.go.data() + step * u, seq.gg.data() + step * u,
                         seq.c.data() + step * u, seq.tanh_c.data() + step * u,
                         seq.h.data() + step * u);
    }
}

template <typename T>
Tensor<T> lstm_sequence_forward(const PeepholeLstmCell<T>& cell,
                                const Tensor<T>& x) {
    if (x.rank() != 2) throw shape_error("lstm_sequence_forward: rank-2 input required");
    auto seq = make_lstm_sequence_cache<T>(x.dim(0), cell.input_size(), cell.units());
    lstm_sequence_forward_into(cell, x, seq);
    return seq.h;
}

// Backpropagation through time. dy is dL/dY_lstm (t x u); parameter
// gradients accumulate into `grads` (same layout as the cell, zeroed by the
// caller). Peephole gradients are only produced when the cell has them
// enabled.
template <typename T>
void lstm_sequence_backward(const PeepholeLstmCell<T>& cell,
                            const LstmSequenceCache<T>& seq, const Tensor<T>& dy,
                            PeepholeLstmCell<T>& grads) {
    const std::size_t t = seq.x.dim(0), b = cell.input_size(), u = cell.units();
    const bool peep = cell.peepholes_enabled;
    std::vector<T> dh_carry(u, T{0}), dc_carry(u, T{0});
    std::vector<T> dai(u), daf(u), dao(u), dag(u), dh_prev(u), dc_prev(u);
    std::vector<T> zeros(u, T{0});

    for (std::size_t step = t; step-- > 0;) {
        const T* gi = seq.gi.data() + step * u;
        const T* gf = seq.gf.data() + step * u;
        const T* go = seq.go.data() + step * u;
        const T* gg = seq.gg.data() + step * u;
        const T* c_t = seq.c.data() + step * u;
        const T* tanh_c = seq.tanh_c.data() + step * u;
        const T* x_t = seq.x.data() + step * b;
        const T* h_prev = step == 0 ? zeros.data() : seq.h.data() + (step - 1) * u;
        const T* c_prev = step == 0 ? zeros.data() : seq.c.data() + (step - 1) * u;

        for (std::size_t j = 0; j < u; ++j) {
            const T dh_total = dy(step, j) + dh_carry[j];
            dao[j] = dh_total * tanh_c[j] * go[j] * (T{1} - go[j]);
            // dL/dc_t: through h_t, plus the carry from step+1, plus the
            // output-gate peephole which reads c_t directly.
            T dc = dc_carry[j] + dh_total * go[j] * (T{1} - tanh_c[j] * tanh_c[j]);
            if (peep) dc += dao[j] * cell.w_co[j];
            dai[j] = dc * gg[j] * gi[j] * (T{1} - gi[j]);
            daf[j] = dc * c_prev[j] * gf[j] * (T{1} - gf[j]);
            dag[j] = dc * gi[j] * (T{1} - gg[j] * gg[j]);
            dc_prev[j] = dc * gf[j];
            if (peep)
                dc_prev[j] += dai[j] * cell.w_ci[j] + daf[j] * cell.w_cf[j];
        }
        if (peep) {
            for (std::size_t j = 0; j < u; ++j) {
                grads.w_ci[j] += dai[j] * c_prev[j];
                grads.w_cf[j] += daf[j] * c_prev[j];
                grads.w_co[j] += dao[j] * c_t[j];
            }
        }
        for (std::size_t l = 0; l < b; ++l) {
            const T xl = x_t[l];
            T* wi = grads.w_xi.data() + l * u;
            T* wf = grads.w_xf.data() + l * u;
            T* wo = grads.w_xo.data() + l * u;
            T* wg = grads.w_xg.data() + l * u;
            for (std::size_t j = 0; j < u; ++j) {
                wi[j] += xl * dai[j];
                wf[j] += xl * daf[j];
                wo[j] += xl * dao[j];
                wg[j] += xl * dag[j];
            }
        }
        for (std::size_t l = 0; l < u; ++l) {
            const T hl = h_prev[l];
            T* wi = grads.w_hi.data() + l * u;
            T* wf = grads.w_hf.data() + l * u;
            T* wo = grads.w_ho.data() + l * u;
            T* wg = grads.w_hg.data() + l * u;
            for (std::size_t j = 0; j < u; ++j) {
                wi[j] += hl * dai[j];
                wf[j] += hl * daf[j];
                wo[j] += hl * dao[j];
                wg[j] += hl * dag[j];
            }
        }
        for (std::size_t j = 0; j < u; ++j) {
            grads.b_i[j] += dai[j];
            grads.b_f[j] += daf[j];
            grads.b_o[j] += dao[j];
            grads.b_g[j] += dag[j];
        }
        std::fill(dh_prev.begin(), dh_prev.end(), T{0});
        vecmat_t_accum(dai.data(), cell.w_hi.data(), u, u, dh_prev.data());
        vecmat_t_accum(daf.data(), cell.w_hf.data(), u, u, dh_prev.data());
        vecmat_t_accum(dao.data(), cell.w_ho.data(), u, u, dh_prev.data());
        vecmat_t_accum(dag.data(), cell.w_hg.data(), u, u, dh_prev.data());
        dh_carry = dh_prev;
        dc_carry = dc_prev;
    }
}

}  // namespace prcnn
