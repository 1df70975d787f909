#pragma once

#include <cstddef>
#include <initializer_list>
#include <numeric>
#include <stdexcept>
#include <string>
#include <vector>

namespace rppg {

/// Dense row-major N-dimensional array of doubles. All network activations,
/// weights and gradients live in this type.
class Tensor {
public:
    Tensor() = default;

    explicit Tensor(std::vector<std::size_t> shape)
        : shape_(std::move(shape)), data_(checked_size(shape_), 0.0) {}

    Tensor(std::vector<std::size_t> shape, std::vector<double> data)
        : shape_(std::move(shape)), data_(std::move(data)) {
        if (checked_size(shape_) != data_.size())
            throw std::invalid_argument("Tensor: shape/data size mismatch");
    }

    static Tensor scalar(double v) { return Tensor({1}, {v}); }

    const std::vector<std::size_t>& shape() const { return shape_; }
    std::size_t rank() const { return shape_.size(); }
    std::size_t dim(std::size_t i) const { return shape_.at(i); }
    std::size_t size() const { return data_.size(); }

    double* data() { return data_.data(); }
    const double* data() const { return data_.data(); }

    double& operator[](std::size_t i) { return data_[i]; }
    double operator[](std::size_t i) const { return data_[i]; }

    // 3-D (H, W, C) access used by the image-shaped layers.
    double& at3(std::size_t y, std::size_t x, std::size_t c) {
        return data_[(y * shape_[1] + x) * shape_[2] + c];
    }
    double at3(std::size_t y, std::size_t x, std::size_t c) const {
        return data_[(y * shape_[1] + x) * shape_[2] + c];
    }

    void fill(double v) { std::fill(data_.begin(), data_.end(), v); }

    bool same_shape(const Tensor& o) const { return shape_ == o.shape_; }

    std::string shape_str() const {
        std::string s = "[";
        for (std::size_t i = 0; i < shape_.size(); ++i)
            s += (i ? "x" : "") + std::to_string(shape_[i]);
        return s + "]";
    }

private:
    static std::size_t checked_size(const std::vector<std::size_t>& shape) {
        std::size_t n = 1;
        for (std::size_t d : shape) {
            if (d < 1) throw std::invalid_argument("Tensor: zero dimension");
            n *= d;
        }
        return shape.empty() ? 0 : n;
    }

    std::vector<std::size_t> shape_;
    std::vector<double> data_;
};

inline void require_shape(const Tensor& t, const std::vector<std::size_t>& want,
                          const char* who) {
    if (t.shape() != want) {
        Tensor w(want);
        throw std::invalid_argument(std::string(who) + ": expected shape " +
                                    w.shape_str() + ", got " + t.shape_str());
    }
}

} // namespace rppg
