#pragma once

#include <algorithm>
#include <array>
#include <cmath>
#include <complex>
#include <cstdlib>
#include <functional>
#include <stdexcept>
#include <string>
#include <thread>
#include <vector>

namespace soliton_lab {

using cplx = std::complex<double>;
using Vec3 = std::array<double, 3>;

inline constexpr double pi = 3.14159265358979323846;
inline constexpr cplx I{0.0, 1.0};

// Every numerical failure carries a machine-readable kind; the CLI turns it
// into an error JSON.
class Error : public std::runtime_error {
public:
    Error(std::string kind, const std::string& what)
        : std::runtime_error(what), kind_(std::move(kind)) {}
    const std::string& kind() const noexcept { return kind_; }

private:
    std::string kind_;
};

#define SOLITON_LAB_ERROR(Name)                                              \
    struct Name : Error {                                                    \
        explicit Name(const std::string& what) : Error(#Name, what) {}       \
    }

SOLITON_LAB_ERROR(InvalidArgument);
SOLITON_LAB_ERROR(NoBracket);
SOLITON_LAB_ERROR(ToleranceNotMet);
SOLITON_LAB_ERROR(NoImaginaryEigenvalue);
SOLITON_LAB_ERROR(ExtrapolationBeyondPath);
SOLITON_LAB_ERROR(BlowupDetected);
SOLITON_LAB_ERROR(OutsideCaptureRadius);
SOLITON_LAB_ERROR(NewtonDivergence);
SOLITON_LAB_ERROR(SingularModulationMatrix);
SOLITON_LAB_ERROR(NoSignChange);
SOLITON_LAB_ERROR(StabilityViolation);

#undef SOLITON_LAB_ERROR

inline void require(bool ok, const std::string& what) {
    if (!ok) throw InvalidArgument(what);
}

// SOLITON_LAB_THREADS caps worker threads; unset means hardware concurrency.
inline unsigned thread_cap() {
    unsigned hw = std::max(1u, std::thread::hardware_concurrency());
    if (const char* s = std::getenv("SOLITON_LAB_THREADS")) {
        int v = std::atoi(s);
        if (v > 0) return std::min<unsigned>(static_cast<unsigned>(v), hw);
    }
    return hw;
}

// Static partition of [0, n) over at most thread_cap() threads.
template <class Fn>
void parallel_for(std::size_t n, Fn&& fn) {
    unsigned nt = std::min<std::size_t>(thread_cap(), n);
    if (nt <= 1) {
        for (std::size_t i = 0; i < n; ++i) fn(i);
        return;
    }
    std::vector<std::thread> pool;
    pool.reserve(nt);
    for (unsigned t = 0; t < nt; ++t) {
        pool.emplace_back([&, t] {
            for (std::size_t i = t; i < n; i += nt) fn(i);
        });
    }
    for (auto& th : pool) th.join();
}

inline double sq(double x) { return x * x; }

// Least-squares slope of y against x.
inline double fit_slope(const std::vector<double>& x, const std::vector<double>& y) {
    require(x.size() == y.size() && x.size() >= 2, "fit_slope needs two or more points");
    double n = static_cast<double>(x.size()), sx = 0, sy = 0, sxx = 0, sxy = 0;
    for (std::size_t i = 0; i < x.size(); ++i) {
        sx += x[i];
        sy += y[i];
        sxx += x[i] * x[i];
        sxy += x[i] * y[i];
    }
    return (n * sxy - sx * sy) / (n * sxx - sx * sx);
}

}  // namespace soliton_lab
