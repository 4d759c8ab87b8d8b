#pragma once

#include <cstdint>
#include <numeric>
#include <vector>

#include "advtrl/errors.hpp"

namespace advtrl {

template <typename T>
struct TensorT {
    std::vector<int> shape;
    std::vector<T> data;

    TensorT() = default;
    TensorT(std::vector<int> s, std::vector<T> d) : shape(std::move(s)), data(std::move(d)) {
        if (static_cast<size_t>(shape_size(shape)) != data.size())
            throw ShapeMismatch("tensor data length does not match shape");
    }

    static TensorT zeros(std::vector<int> s) {
        TensorT t;
        t.shape = std::move(s);
        t.data.assign(static_cast<size_t>(shape_size(t.shape)), T{0});
        return t;
    }

    static long shape_size(const std::vector<int>& s) {
        long n = 1;
        for (int d : s) n *= d;
        return n;
    }

    long size() const { return static_cast<long>(data.size()); }

    friend bool operator==(const TensorT& a, const TensorT& b) {
        return a.shape == b.shape && a.data == b.data;
    }
};

using Tensor = TensorT<float>;
using TensorD = TensorT<double>;

template <typename To, typename From>
TensorT<To> tensor_cast(const TensorT<From>& t) {
    TensorT<To> out;
    out.shape = t.shape;
    out.data.reserve(t.data.size());
    for (From v : t.data) out.data.push_back(static_cast<To>(v));
    return out;
}

}  // namespace advtrl
