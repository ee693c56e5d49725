#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <initializer_list>
#include <string>
#include <type_traits>
#include <vector>

#include "prcnn/error.hpp"
#include "prcnn/rng.hpp"

namespace prcnn {

// Dense n-dimensional array, flat row-major storage. Value type: copy/move
// freely, no shared state. float for training, double for gradient checks.
template <typename T = float>
class Tensor {
    static_assert(std::is_floating_point_v<T>);

public:
    Tensor() = default;

    explicit Tensor(std::vector<std::size_t> shape)
        : shape_(std::move(shape)), data_(checked_numel(shape_), T{0}) {}

    Tensor(std::initializer_list<std::size_t> shape)
        : Tensor(std::vector<std::size_t>(shape)) {}

    Tensor(std::vector<std::size_t> shape, std::vector<T> data)
        : shape_(std::move(shape)), data_(std::move(data)) {
        if (checked_numel(shape_) != data_.size())
            throw shape_error("tensor: shape does not match data length");
    }

    const std::vector<std::size_t>& shape() const { return shape_; }
    std::size_t rank() const { return shape_.size(); }
    std::size_t dim(std::size_t axis) const { return shape_.at(axis); }
    std::size_t numel() const { return data_.size(); }

    T* data() { return data_.data(); }
    const T* data() const { return data_.data(); }
    std::vector<T>& storage() { return data_; }
    const std::vector<T>& storage() const { return data_; }

    T& operator[](std::size_t flat) { return data_[flat]; }
    const T& operator[](std::size_t flat) const { return data_[flat]; }

    T& operator()(std::size_t i, std::size_t j) {
        return data_[i * shape_[1] + j];
    }
    const T& operator()(std::size_t i, std::size_t j) const {
        return data_[i * shape_[1] + j];
    }
    T& operator()(std::size_t i, std::size_t j, std::size_t k) {
        return data_[(i * shape_[1] + j) * shape_[2] + k];
    }
    const T& operator()(std::size_t i, std::size_t j, std::size_t k) const {
        return data_[(i * shape_[1] + j) * shape_[2] + k];
    }
    T& operator()(std::size_t i, std::size_t j, std::size_t k, std::size_t l) {
        return data_[((i * shape_[1] + j) * shape_[2] + k) * shape_[3] + l];
    }
    const T& operator()(std::size_t i, std::size_t j, std::size_t k,
                        std::size_t l) const {
        return data_[((i * shape_[1] + j) * shape_[2] + k) * shape_[3] + l];
    }

    // Reinterprets the shape; the flat data sequence is never copied or
    // reordered.
    Tensor& reshape(std::vector<std::size_t> new_shape) {
        if (checked_numel(new_shape) != data_.size())
            throw shape_error("reshape: element count mismatch");
        shape_ = std::move(new_shape);
        return *this;
    }

    Tensor reshaped(std::vector<std::size_t> new_shape) const {
        Tensor out = *this;
        out.reshape(std::move(new_shape));
        return out;
    }

    void fill(T v) { std::fill(data_.begin(), data_.end(), v); }

    bool all_finite() const {
        for (T v : data_)
            if (!std::isfinite(v)) return false;
        return true;
    }

    friend bool operator==(const Tensor& a, const Tensor& b) {
        return a.shape_ == b.shape_ && a.data_ == b.data_;
    }

private:
    static std::size_t checked_numel(const std::vector<std::size_t>& shape) {
        std::size_t n = 1;
        for (std::size_t d : shape) {
            if (d == 0) throw shape_error("tensor: zero dimension");
            n *= d;
        }
        return n;
    }

    std::vector<std::size_t> shape_;
    std::vector<T> data_;
};

// c[i,j] = sum_l a[i,l] * b[l,j]
template <typename T>
Tensor<T> matmul(const Tensor<T>& a, const Tensor<T>& b) {
    if (a.rank() != 2 || b.rank() != 2)
        throw shape_error("matmul: operands must be rank-2");
    if (a.dim(1) != b.dim(0))
        throw shape_error("matmul: inner dimensions differ (" +
                          std::to_string(a.dim(1)) + " vs " +
                          std::to_string(b.dim(0)) + ")");
    const std::size_t m = a.dim(0), k = a.dim(1), n = b.dim(1);
    Tensor<T> c({m, n});
    const T* pa = a.data();
    const T* pb = b.data();
    T* pc = c.data();
    for (std::size_t i = 0; i < m; ++i) {
        for (std::size_t l = 0; l < k; ++l) {
            const T ail = pa[i * k + l];
            const T* brow = pb + l * n;
            T* crow = pc + i * n;
            for (std::size_t j = 0; j < n; ++j) crow[j] += ail * brow[j];
        }
    }
    return c;
}

// y[1xn] += x[1xk] . W[kxn], raw-pointer form used by the layer kernels.
template <typename T>
inline void vecmat_accum(const T* x, const T* w, std::size_t k, std::size_t n,
                         T* y) {
    for (std::size_t l = 0; l < k; ++l) {
        const T xl = x[l];
        const T* wrow = w + l * n;
        for (std::size_t j = 0; j < n; ++j) y[j] += xl * wrow[j];
    }
}

// x[1xk] += dy[1xn] . W^T, i.e. x[l] += sum_j dy[j] * W[l,j]
template <typename T>
inline void vecmat_t_accum(const T* dy, const T* w, std::size_t k,
                           std::size_t n, T* x) {
    for (std::size_t l = 0; l < k; ++l) {
        const T* wrow = w + l * n;
        T acc{0};
        for (std::size_t j = 0; j < n; ++j) acc += dy[j] * wrow[j];
        x[l] += acc;
    }
}

enum class InitKind { uniform, orthogonal };

// Deterministic tensor initialization. uniform draws each element from
// [lo, hi) in row-major order; orthogonal builds a matrix with orthonormal
// columns (rows when cols > rows) by Gram-Schmidt over Gaussian draws.
template <typename T = float>
Tensor<T> seeded_init(RngState& rng, InitKind kind,
                      const std::vector<std::size_t>& shape, double lo = 0.0,
                      double hi = 1.0) {
    if (kind == InitKind::uniform) {
        if (!(lo < hi)) throw parameter_error("seeded_init: requires lo < hi");
        Tensor<T> out(shape);
        for (std::size_t i = 0; i < out.numel(); ++i)
            out[i] = static_cast<T>(lo + (hi - lo) * rng.next_double());
        return out;
    }
    if (shape.size() != 2)
        throw shape_error("seeded_init: orthogonal requires a 2-D shape");
    const std::size_t rows = shape[0], cols = shape[1];
    const bool wide = cols > rows;
    const std::size_t m = wide ? cols : rows;  // vector length
    const std::size_t n = wide ? rows : cols;  // number of vectors
    // Gram-Schmidt in double regardless of T.
    std::vector<std::vector<double>> q(n, std::vector<double>(m));
    for (std::size_t v = 0; v < n; ++v) {
        for (std::size_t i = 0; i < m; ++i) q[v][i] = rng.gauss();
        for (int pass = 0; pass < 2; ++pass) {
            for (std::size_t u = 0; u < v; ++u) {
                double dot = 0;
                for (std::size_t i = 0; i < m; ++i) dot += q[v][i] * q[u][i];
                for (std::size_t i = 0; i < m; ++i) q[v][i] -= dot * q[u][i];
            }
        }
        double norm = 0;
        for (double x : q[v]) norm += x * x;
        norm = std::sqrt(norm);
        if (norm < 1e-12)
            throw numeric_error("seeded_init: degenerate Gaussian draw");
        for (double& x : q[v]) x /= norm;
    }
    Tensor<T> out({rows, cols});
    for (std::size_t r = 0; r < rows; ++r)
        for (std::size_t c = 0; c < cols; ++c)
            out(r, c) = static_cast<T>(wide ? q[r][c] : q[c][r]);
    return out;
}

}  // namespace prcnn
