#include "pinnlab/tensor.hpp"

#include <algorithm>
#include <cmath>
#include <cstring>
#include <new>
#include <numeric>

namespace pinnlab {

BufferPool& BufferPool::instance() {
    static BufferPool pool;
    return pool;
}

namespace {

// Every buffer gets the same 64-byte alignment. This is load-bearing for
// reproducibility: vectorized transcendental kernels peel scalar iterations
// until the destination is SIMD-aligned, and scalar libm and SIMD lanes can
// disagree in the last ulp. Uniform alignment makes the lane split a pure
// function of the element count, so identical shapes always evaluate
// identically no matter which recycled buffer they land in.
constexpr std::size_t kAlign = 64;

double* aligned_buffer(std::size_t n) {
    const std::size_t bytes = std::max<std::size_t>(n, 1) * sizeof(double);
    return static_cast<double*>(::operator new(bytes, std::align_val_t(kAlign)));
}

void free_buffer(double* p) noexcept {
    ::operator delete(p, std::align_val_t(kAlign));
}

} // namespace

double* BufferPool::acquire(std::size_t n) {
    for (auto& b : buckets_) {
        if (b.n == n && !b.free.empty()) {
            double* p = b.free.back();
            b.free.pop_back();
            pooled_bytes_ -= n * sizeof(double);
            return p;
        }
    }
    return aligned_buffer(n);
}

void BufferPool::release(double* p, std::size_t n) noexcept {
    // Cap the pool at 4 GiB so pathological shape churn cannot hoard memory.
    constexpr std::size_t kMaxPooledBytes = std::size_t(4) << 30;
    if (pooled_bytes_ + n * sizeof(double) > kMaxPooledBytes) {
        free_buffer(p);
        return;
    }
    for (auto& b : buckets_) {
        if (b.n == n) {
            b.free.push_back(p);
            pooled_bytes_ += n * sizeof(double);
            return;
        }
    }
    buckets_.push_back(Bucket{n, {p}});
    pooled_bytes_ += n * sizeof(double);
}

void BufferPool::clear() noexcept {
    for (auto& b : buckets_) {
        for (double* p : b.free) free_buffer(p);
        b.free.clear();
    }
    buckets_.clear();
    pooled_bytes_ = 0;
}

void Tensor::PoolDeleter::operator()(double* p) const noexcept {
    if (p) BufferPool::instance().release(p, n);
}

static std::size_t shape_size(const std::vector<std::int64_t>& shape) {
    std::size_t n = 1;
    for (auto d : shape) {
        if (d < 0) throw ShapeError("negative dimension in tensor shape");
        n *= static_cast<std::size_t>(d);
    }
    return n;
}

Tensor Tensor::uninit(std::vector<std::int64_t> shape) {
    Tensor t;
    t.size_ = shape_size(shape);
    t.shape_ = std::move(shape);
    t.data_ = std::unique_ptr<double[], PoolDeleter>(
        BufferPool::instance().acquire(t.size_), PoolDeleter{t.size_});
    return t;
}

Tensor Tensor::zeros(std::vector<std::int64_t> shape) {
    Tensor t = uninit(std::move(shape));
    std::memset(t.data(), 0, t.size_ * sizeof(double));
    return t;
}

Tensor Tensor::scalar(double v) {
    Tensor t = uninit({});
    t.data_[0] = v;
    return t;
}

Tensor Tensor::from(std::vector<std::int64_t> shape,
                    std::initializer_list<double> vals) {
    Tensor t = uninit(std::move(shape));
    if (vals.size() != t.size_)
        throw ShapeError("initializer size does not match tensor shape");
    std::size_t i = 0;
    for (double v : vals) t.data_[i++] = v;
    return t;
}

Tensor::Tensor(const Tensor& o) {
    if (o.defined()) {
        size_ = o.size_;
        shape_ = o.shape_;
        data_ = std::unique_ptr<double[], PoolDeleter>(
            BufferPool::instance().acquire(size_), PoolDeleter{size_});
        std::memcpy(data_.get(), o.data(), size_ * sizeof(double));
    }
}

Tensor& Tensor::operator=(const Tensor& o) {
    if (this != &o) *this = Tensor(o);
    return *this;
}

void Tensor::fill(double v) {
    for (std::size_t i = 0; i < size_; ++i) data_[i] = v;
}

bool Tensor::all_finite() const noexcept {
    for (std::size_t i = 0; i < size_; ++i) {
        if (!std::isfinite(data_[i])) return false;
    }
    return true;
}

void Tensor::reset() noexcept {
    data_.reset();
    shape_.clear();
    size_ = 0;
}

} // namespace pinnlab
