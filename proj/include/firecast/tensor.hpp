#ifndef FIRECAST_TENSOR_HPP
#define FIRECAST_TENSOR_HPP

#include <cstdint>
#include <numeric>
#include <sstream>
#include <vector>

#include "firecast/common.hpp"

namespace firecast {

using Shape = std::vector<int64_t>;

inline int64_t shape_numel(const Shape& s) {
    int64_t n = 1;
    for (int64_t d : s) n *= d;
    return n;
}

inline std::string shape_str(const Shape& s) {
    std::ostringstream os;
    os << "[";
    for (size_t i = 0; i < s.size(); ++i) os << (i ? "," : "") << s[i];
    os << "]";
    return os.str();
}

/// Dense row-major n-d value. Plain data; differentiation happens on the
/// tape, which stores Tensors for values and gradients.
template <class T>
struct Tensor {
    Shape shape;
    std::vector<T> data;

    Tensor() = default;
    Tensor(Shape s, std::vector<T> d) : shape(std::move(s)), data(std::move(d)) {
        require(static_cast<int64_t>(data.size()) == shape_numel(shape),
                "tensor data size does not match shape " + shape_str(shape));
    }

    static Tensor zeros(Shape s) {
        auto n = shape_numel(s);
        return Tensor(std::move(s), std::vector<T>(static_cast<size_t>(n), T(0)));
    }

    static Tensor full(Shape s, T v) {
        auto n = shape_numel(s);
        return Tensor(std::move(s), std::vector<T>(static_cast<size_t>(n), v));
    }

    int64_t numel() const { return static_cast<int64_t>(data.size()); }
    int64_t dim(size_t i) const { return shape.at(i); }
    size_t ndim() const { return shape.size(); }

    T* ptr() { return data.data(); }
    const T* ptr() const { return data.data(); }

    template <class U>
    Tensor<U> cast() const {
        std::vector<U> out(data.size());
        for (size_t i = 0; i < data.size(); ++i) out[i] = static_cast<U>(data[i]);
        return Tensor<U>(shape, std::move(out));
    }
};

}  // namespace firecast

#endif  // FIRECAST_TENSOR_HPP
