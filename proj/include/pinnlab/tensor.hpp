#pragma once

#include <cstddef>
#include <cstdint>
#include <initializer_list>
#include <memory>
#include <vector>

#include "pinnlab/errors.hpp"

namespace pinnlab {

/// Pool of reusable double buffers, keyed by element count.
///
/// Training tapes allocate and free the same ~20 MB activation blocks tens of
/// thousands of times; recycling them avoids continuous mmap/munmap traffic
/// and keeps the hot buffers resident. Single-threaded by design (the whole
/// trainer is single-threaded for determinism), so no locking.
class BufferPool {
public:
    static BufferPool& instance();

    double* acquire(std::size_t n);
    void release(double* p, std::size_t n) noexcept;

    /// Frees all pooled buffers (e.g. between independent runs).
    void clear() noexcept;

    std::size_t pooled_bytes() const noexcept { return pooled_bytes_; }

private:
    struct Bucket {
        std::size_t n;
        std::vector<double*> free;
    };
    std::vector<Bucket> buckets_; // small, linear scan is fine
    std::size_t pooled_bytes_ = 0;
};

/// Dense row-major tensor of doubles, rank 1 or 2.
///
/// Copy is deep; move transfers the buffer. Freshly allocated memory is NOT
/// zero-filled (ops always overwrite their output); use Tensor::zeros when a
/// cleared buffer is required.
class Tensor {
public:
    Tensor() = default;

    static Tensor uninit(std::vector<std::int64_t> shape);
    static Tensor zeros(std::vector<std::int64_t> shape);
    static Tensor scalar(double v);
    static Tensor from(std::vector<std::int64_t> shape,
                       std::initializer_list<double> vals);

    Tensor(const Tensor& o);
    Tensor& operator=(const Tensor& o);
    Tensor(Tensor&& o) noexcept = default;
    Tensor& operator=(Tensor&& o) noexcept = default;

    const std::vector<std::int64_t>& shape() const noexcept { return shape_; }
    std::size_t size() const noexcept { return size_; }
    bool defined() const noexcept { return data_ != nullptr; }

    /// Rows/cols view: rank-1 tensors are treated as a single row.
    std::int64_t rows() const noexcept {
        return shape_.size() == 2 ? shape_[0] : 1;
    }
    std::int64_t cols() const noexcept {
        return shape_.size() == 2 ? shape_[1] : (shape_.empty() ? 1 : shape_[0]);
    }

    double* data() noexcept { return data_.get(); }
    const double* data() const noexcept { return data_.get(); }

    double& operator[](std::size_t i) { return data_[i]; }
    double operator[](std::size_t i) const { return data_[i]; }
    double& at(std::int64_t r, std::int64_t c) { return data_[r * cols() + c]; }
    double at(std::int64_t r, std::int64_t c) const { return data_[r * cols() + c]; }

    bool same_shape(const Tensor& o) const { return shape_ == o.shape_; }

    void fill(double v);
    bool all_finite() const noexcept;

    /// Releases the buffer back to the pool and leaves the tensor undefined.
    void reset() noexcept;

private:
    // Note: explicit constructors (not a default member initializer) because
    // initializers of nested members are parsed only at the enclosing class's
    // closing brace, which would leave the deleter non-default-constructible
    // where unique_ptr needs it.
    struct PoolDeleter {
        std::size_t n;
        PoolDeleter() noexcept : n(0) {}
        explicit PoolDeleter(std::size_t n_) noexcept : n(n_) {}
        void operator()(double* p) const noexcept;
    };

    std::vector<std::int64_t> shape_;
    std::size_t size_ = 0;
    std::unique_ptr<double[], PoolDeleter> data_;
};

} // namespace pinnlab
