#pragma once

#include <cstddef>

#include "prcnn/error.hpp"
#include "prcnn/tensor.hpp"

namespace prcnn {

// Square-window 2-D convolution (cross-correlation), valid padding, stride 1,
// followed by ReLU. Input is h x w x c_in, weights f x f x c_in x n.
template <typename T = float>
struct Conv2dLayer {
    Tensor<T> w;  // f x f x c_in x n
    Tensor<T> b;  // n

    std::size_t filter_size() const { return w.dim(0); }
    std::size_t in_channels() const { return w.dim(2); }
    std::size_t filters() const { return w.dim(3); }
};

template <typename T>
Conv2dLayer<T> make_conv_layer(std::size_t filter_size, std::size_t in_channels,
                               std::size_t filters) {
    if (filter_size == 0 || in_channels == 0 || filters == 0)
        throw shape_error("conv layer: sizes must be positive");
    Conv2dLayer<T> layer;
    layer.w = Tensor<T>({filter_size, filter_size, in_channels, filters});
    layer.b = Tensor<T>({filters});
    return layer;
}

template <typename T>
void check_conv_input(const Conv2dLayer<T>& layer, const Tensor<T>& in) {
    if (layer.w.rank() != 4 || layer.w.dim(0) != layer.w.dim(1) ||
        layer.b.rank() != 1 || layer.b.dim(0) != layer.w.dim(3))
        throw shape_error("conv: inconsistent parameters");
    if (in.rank() != 3) throw shape_error("conv: rank-3 input required");
    if (in.dim(2) != layer.in_channels())
        throw shape_error("conv: channel count mismatch");
    if (in.dim(0) < layer.filter_size() || in.dim(1) < layer.filter_size())
        throw shape_error("conv: input smaller than filter window");
}

// pre and out are (h-f+1) x (w-f+1) x n; pre holds the pre-activation values
// needed by backward, out the rectified ones. They may alias if the caller
// does not need pre.
template <typename T>
void conv2d_relu_forward_into(const Conv2dLayer<T>& layer, const Tensor<T>& in,
                              Tensor<T>& pre, Tensor<T>& out) {
    check_conv_input(layer, in);
    const std::size_t f = layer.filter_size(), c_in = layer.in_channels(),
                      n = layer.filters();
    const std::size_t oh = in.dim(0) - f + 1, ow = in.dim(1) - f + 1;
    const std::size_t in_w = in.dim(1);
    for (std::size_t y = 0; y < oh; ++y) {
        for (std::size_t x = 0; x < ow; ++x) {
            T* pre_px = pre.data() + (y * ow + x) * n;
            for (std::size_t k = 0; k < n; ++k) pre_px[k] = layer.b[k];
            for (std::size_t dy = 0; dy < f; ++dy) {
                const T* in_row = in.data() + ((y + dy) * in_w + x) * c_in;
                const T* w_row = layer.w.data() + dy * f * c_in * n;
                for (std::size_t dxc = 0; dxc < f * c_in; ++dxc) {
                    const T v = in_row[dxc];
                    const T* w_px = w_row + dxc * n;
                    for (std::size_t k = 0; k < n; ++k) pre_px[k] += v * w_px[k];
                }
            }
            T* out_px = out.data() + (y * ow + x) * n;
            for (std::size_t k = 0; k < n; ++k)
                out_px[k] = pre_px[k] > T{0} ? pre_px[k] : T{0};
        }
    }
}

template <typename T>
Tensor<T> conv2d_relu_forward(const Conv2dLayer<T>& layer, const Tensor<T>& in) {
    check_conv_input(layer, in);
    const std::size_t f = layer.filter_size();
    Tensor<T> out({in.dim(0) - f + 1, in.dim(1) - f + 1, layer.filters()});
    conv2d_relu_forward_into(layer, in, out, out);
    return out;
}

// d_out is dL/d(rectified output); the ReLU gate is applied here using the
// cached pre-activations. Parameter grads accumulate into `grads`; when
// d_in is non-null it accumulates dL/d(input).
template <typename T>
void conv2d_relu_backward(const Conv2dLayer<T>& layer, const Tensor<T>& in,
                          const Tensor<T>& pre, const Tensor<T>& d_out,
                          Conv2dLayer<T>& grads, Tensor<T>* d_in) {
    const std::size_t f = layer.filter_size(), c_in = layer.in_channels(),
                      n = layer.filters();
    const std::size_t oh = pre.dim(0), ow = pre.dim(1), in_w = in.dim(1);
    std::vector<T> d_pre(n);
    for (std::size_t y = 0; y < oh; ++y) {
        for (std::size_t x = 0; x < ow; ++x) {
            const T* pre_px = pre.data() + (y * ow + x) * n;
            const T* dout_px = d_out.data() + (y * ow + x) * n;
            for (std::size_t k = 0; k < n; ++k) {
                d_pre[k] = pre_px[k] > T{0} ? dout_px[k] : T{0};
                grads.b[k] += d_pre[k];
            }
            for (std::size_t dy = 0; dy < f; ++dy) {
                const T* in_row = in.data() + ((y + dy) * in_w + x) * c_in;
                T* din_row =
                    d_in ? d_in->data() + ((y + dy) * in_w + x) * c_in : nullptr;
                T* gw_row = grads.w.data() + dy * f * c_in * n;
                const T* w_row = layer.w.data() + dy * f * c_in * n;
                for (std::size_t dxc = 0; dxc < f * c_in; ++dxc) {
                    const T v = in_row[dxc];
                    T* gw_px = gw_row + dxc * n;
                    const T* w_px = w_row + dxc * n;
                    T din_acc{0};
                    for (std::size_t k = 0; k < n; ++k) {
                        gw_px[k] += v * d_pre[k];
                        din_acc += w_px[k] * d_pre[k];
                    }
                    if (din_row) din_row[dxc] += din_acc;
                }
            }
        }
    }
}

}  // namespace prcnn
