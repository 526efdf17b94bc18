#pragma once

#include <fftw3.h>

#include <cstring>
#include <map>
#include <memory>
#include <mutex>
#include <span>

#include "soliton_lab/core.hpp"

namespace soliton_lab::fft {

// FFTW's planner is not reentrant; execution of distinct plans is.
inline std::mutex& planner_mutex() {
    static std::mutex m;
    return m;
}

struct FftwFree {
    void operator()(void* p) const { fftw_free(p); }
};
struct PlanFree {
    void operator()(fftw_plan p) const {
        std::lock_guard lk(planner_mutex());
        fftw_destroy_plan(p);
    }
};
using Plan = std::unique_ptr<std::remove_pointer_t<fftw_plan>, PlanFree>;

// In-place 3-D complex transform of an n^3 array (row-major, x slowest).
class Fft3 {
public:
    explicit Fft3(int n) : n_(n), total_(std::size_t(n) * n * n) {
        buf_.reset(static_cast<fftw_complex*>(fftw_malloc(sizeof(fftw_complex) * total_)));
        std::lock_guard lk(planner_mutex());
        fwd_.reset(fftw_plan_dft_3d(n, n, n, buf_.get(), buf_.get(), FFTW_FORWARD, FFTW_ESTIMATE));
        bwd_.reset(fftw_plan_dft_3d(n, n, n, buf_.get(), buf_.get(), FFTW_BACKWARD, FFTW_ESTIMATE));
    }

    // Unnormalized forward transform.
    void forward(std::span<cplx> a) { run(fwd_.get(), a); }
    // Unnormalized backward transform; divide by n^3 to invert forward().
    void backward(std::span<cplx> a) { run(bwd_.get(), a); }
    int n() const { return n_; }

private:
    void run(fftw_plan p, std::span<cplx> a) {
        require(a.size() == total_, "Fft3: size mismatch");
        std::memcpy(static_cast<void*>(buf_.get()), static_cast<const void*>(a.data()), sizeof(cplx) * total_);
        fftw_execute(p);
        std::memcpy(static_cast<void*>(a.data()), static_cast<const void*>(buf_.get()), sizeof(cplx) * total_);
    }
    int n_;
    std::size_t total_;
    std::unique_ptr<fftw_complex, FftwFree> buf_;
    Plan fwd_, bwd_;
};

inline Fft3& fft3(int n) {
    thread_local std::map<int, std::unique_ptr<Fft3>> cache;
    auto& slot = cache[n];
    if (!slot) slot = std::make_unique<Fft3>(n);
    return *slot;
}

// Real-to-real transform applied to the real and imaginary parts of a complex
// array at once (stride 2, two transforms).
class R2R {
public:
    R2R(int n, fftw_r2r_kind kind) : n_(n) {
        buf_.reset(static_cast<double*>(fftw_malloc(sizeof(double) * 2 * n)));
        std::lock_guard lk(planner_mutex());
        plan_.reset(fftw_plan_many_r2r(1, &n_, 2, buf_.get(), nullptr, 2, 1, buf_.get(), nullptr,
                                       2, 1, &kind, FFTW_ESTIMATE));
    }
    void operator()(std::span<cplx> a) {
        require(a.size() == std::size_t(n_), "R2R: size mismatch");
        std::memcpy(static_cast<void*>(buf_.get()), static_cast<const void*>(a.data()), sizeof(cplx) * n_);
        fftw_execute(plan_.get());
        std::memcpy(static_cast<void*>(a.data()), static_cast<const void*>(buf_.get()), sizeof(cplx) * n_);
    }

private:
    int n_;
    std::unique_ptr<double, FftwFree> buf_;
    Plan plan_;
};

inline R2R& r2r(int n, fftw_r2r_kind kind) {
    thread_local std::map<std::pair<int, int>, std::unique_ptr<R2R>> cache;
    auto& slot = cache[{n, static_cast<int>(kind)}];
    if (!slot) slot = std::make_unique<R2R>(n, kind);
    return *slot;
}

}  // namespace soliton_lab::fft
