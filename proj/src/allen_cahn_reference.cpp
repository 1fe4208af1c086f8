#include <fftw3.h>

#include <cmath>
#include <complex>
#include <cstring>
#include <vector>

#include "pinnlab/errors.hpp"
#include "pinnlab/math_util.hpp"
#include "pinnlab/problems.hpp"
#include "pinnlab/references.hpp"

namespace pinnlab {

namespace {

using cd = std::complex<double>;

struct FftPair {
    int n;
    fftw_plan fwd, bwd;
    std::vector<cd> buf;

    explicit FftPair(int n_) : n(n_), buf(static_cast<std::size_t>(n_)) {
        auto* p = reinterpret_cast<fftw_complex*>(buf.data());
        fwd = fftw_plan_dft_1d(n, p, p, FFTW_FORWARD, FFTW_ESTIMATE);
        bwd = fftw_plan_dft_1d(n, p, p, FFTW_BACKWARD, FFTW_ESTIMATE);
    }
    ~FftPair() {
        fftw_destroy_plan(fwd);
        fftw_destroy_plan(bwd);
    }
    FftPair(const FftPair&) = delete;
    FftPair& operator=(const FftPair&) = delete;
};

/// d/dt uhat = -d k^2 uhat + fft(5u - 5u^3), spectral coefficients unscaled
/// (FFTW convention: bwd(fwd(x)) == n*x).
struct AcRhs {
    FftPair& fft;
    const std::vector<double>& k2; // k_m^2 per mode
    double diff;

    void operator()(const std::vector<cd>& uhat, std::vector<cd>& out) {
        const int n = fft.n;
        const double inv_n = 1.0 / n;
        // physical u
        std::memcpy(fft.buf.data(), uhat.data(), sizeof(cd) * static_cast<std::size_t>(n));
        fftw_execute(fft.bwd);
        for (int i = 0; i < n; ++i) {
            const double u = fft.buf[static_cast<std::size_t>(i)].real() * inv_n;
            fft.buf[static_cast<std::size_t>(i)] = cd(5.0 * u - 5.0 * u * u * u, 0.0);
        }
        fftw_execute(fft.fwd);
        for (int i = 0; i < n; ++i) {
            const auto iu = static_cast<std::size_t>(i);
            out[iu] = -diff * k2[iu] * uhat[iu] + fft.buf[iu];
        }
    }
};

} // namespace

Tensor AllenCahnReference::solve_grid(const std::vector<double>& xs,
                                      const std::vector<double>& ts,
                                      const Options& opts) {
    const int n = opts.n_modes;
    if (n < 8 || (n & (n - 1)) != 0)
        throw ConfigError("AllenCahnReference: n_modes must be a power of two");
    if (ts.empty() || ts.front() != 0.0)
        throw ConfigError("AllenCahnReference: ts must start at 0");

    // Snapshot step counts; every t must be an integer multiple of dt.
    std::vector<long> steps(ts.size());
    for (std::size_t i = 0; i < ts.size(); ++i) {
        const double s = ts[i] / opts.dt;
        const long si = std::lround(s);
        if (std::abs(s - static_cast<double>(si)) > 1e-9)
            throw ConfigError("AllenCahnReference: t not a multiple of dt");
        steps[i] = si;
        if (i > 0 && steps[i] <= steps[i - 1])
            throw ConfigError("AllenCahnReference: ts must be increasing");
    }

    FftPair fft(n);
    std::vector<double> k2(static_cast<std::size_t>(n));
    std::vector<double> kmode(static_cast<std::size_t>(n));
    for (int m = 0; m < n; ++m) {
        const int mm = m < n / 2 ? m : m - n;
        kmode[static_cast<std::size_t>(m)] = kPi * mm; // L = 2 -> k = pi*m
        k2[static_cast<std::size_t>(m)] =
            kmode[static_cast<std::size_t>(m)] * kmode[static_cast<std::size_t>(m)];
    }

    // Initial condition on the periodic grid x_j = -1 + 2j/n.
    for (int j = 0; j < n; ++j) {
        const double x = -1.0 + 2.0 * j / n;
        fft.buf[static_cast<std::size_t>(j)] = cd(allen_cahn_ic(x), 0.0);
    }
    fftw_execute(fft.fwd);
    std::vector<cd> uhat(fft.buf.begin(), fft.buf.end());

    AcRhs rhs{fft, k2, opts.diffusivity};
    std::vector<cd> r1(uhat.size()), r2(uhat.size()), r3(uhat.size()),
        r4(uhat.size()), tmp(uhat.size());

    // Interpolation phases e^{i pi m (x+1)} for every eval point.
    const auto nx = static_cast<std::int64_t>(xs.size());
    std::vector<cd> phase(static_cast<std::size_t>(nx) * static_cast<std::size_t>(n));
    for (std::int64_t ix = 0; ix < nx; ++ix) {
        const double xp = xs[static_cast<std::size_t>(ix)] + 1.0;
        for (int m = 0; m < n; ++m) {
            const double a = kmode[static_cast<std::size_t>(m)] * xp;
            phase[static_cast<std::size_t>(ix * n + m)] = cd(std::cos(a), std::sin(a));
        }
    }

    const auto nt = static_cast<std::int64_t>(ts.size());
    Tensor out = Tensor::uninit({nx * nt, 1});
    auto emit = [&](std::int64_t it) {
        const double inv_n = 1.0 / n;
        for (std::int64_t ix = 0; ix < nx; ++ix) {
            cd acc(0.0, 0.0);
            const cd* ph = &phase[static_cast<std::size_t>(ix * n)];
            for (int m = 0; m < n; ++m)
                acc += uhat[static_cast<std::size_t>(m)] * ph[m];
            out[static_cast<std::size_t>(ix * nt + it)] = acc.real() * inv_n;
        }
    };

    const double h = opts.dt;
    long step = 0;
    std::int64_t emitted = 0;
    if (steps[0] == 0) emit(emitted++);
    const long last = steps.back();
    while (step < last) {
        // classic RK4
        rhs(uhat, r1);
        for (std::size_t i = 0; i < uhat.size(); ++i)
            tmp[i] = uhat[i] + 0.5 * h * r1[i];
        rhs(tmp, r2);
        for (std::size_t i = 0; i < uhat.size(); ++i)
            tmp[i] = uhat[i] + 0.5 * h * r2[i];
        rhs(tmp, r3);
        for (std::size_t i = 0; i < uhat.size(); ++i)
            tmp[i] = uhat[i] + h * r3[i];
        rhs(tmp, r4);
        for (std::size_t i = 0; i < uhat.size(); ++i)
            uhat[i] += (h / 6.0) * (r1[i] + 2.0 * r2[i] + 2.0 * r3[i] + r4[i]);
        ++step;
        if (emitted < nt && steps[static_cast<std::size_t>(emitted)] == step)
            emit(emitted++);
    }

    for (std::size_t i = 0; i < uhat.size(); ++i) {
        if (!std::isfinite(uhat[i].real()) || !std::isfinite(uhat[i].imag()))
            throw NumericError("AllenCahnReference: spectral solve diverged");
    }
    return out;
}

} // namespace pinnlab
