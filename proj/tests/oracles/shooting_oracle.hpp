#pragma once

// Independent ground-state oracle: fixed-step classical RK4 in double
// precision, bracket [1, 10], 80 bisections. Shares no code with the library.

#include <array>
#include <cmath>

namespace oracle {

struct Shot {
    int verdict;  // +1 crosses zero, -1 turns up, 0 undecided
    double r_stop;
};

inline std::array<double, 2> rhs(double r, const std::array<double, 2>& y) {
    return {y[1], -2.0 / r * y[1] + y[0] - y[0] * y[0] * y[0]};
}

template <class Obs>
Shot shoot(double p, double h, double r_end, Obs&& obs) {
    double r = 1e-3;
    double c = (p - p * p * p) / 3.0;
    std::array<double, 2> y{p + 0.5 * c * r * r, c * r};
    obs(0.0, p);
    while (r < r_end) {
        auto k1 = rhs(r, y);
        std::array<double, 2> t{y[0] + 0.5 * h * k1[0], y[1] + 0.5 * h * k1[1]};
        auto k2 = rhs(r + 0.5 * h, t);
        t = {y[0] + 0.5 * h * k2[0], y[1] + 0.5 * h * k2[1]};
        auto k3 = rhs(r + 0.5 * h, t);
        t = {y[0] + h * k3[0], y[1] + h * k3[1]};
        auto k4 = rhs(r + h, t);
        for (int i = 0; i < 2; ++i) y[i] += h / 6.0 * (k1[i] + 2 * k2[i] + 2 * k3[i] + k4[i]);
        r += h;
        if (y[0] < 0) return {+1, r};
        if (y[1] > 0) return {-1, r};
        obs(r, y[0]);
    }
    return {0, r};
}

struct Result {
    double peak;
    double mass;
};

// Peak phi(0) and ||phi||_2^2 of the alpha = 1 ground state.
inline Result ground_state(double h = 1e-3) {
    double lo = 1.0, hi = 10.0;
    auto none = [](double, double) {};
    for (int i = 0; i < 80; ++i) {
        double mid = 0.5 * (lo + hi);
        int v = shoot(mid, h, 40.0, none).verdict;
        if (v == 0) {
            lo = hi = mid;
            break;
        }
        (v > 0 ? hi : lo) = mid;
    }
    const double p = 0.5 * (lo + hi);
    // Trapezoid quadrature of 4 pi phi^2 r^2 up to r = 12 along the RK4 mesh.
    double mass = 0, r_prev = 0, g_prev = 0;
    shoot(p, h, 12.0, [&](double r, double f) {
        double g = f * f * r * r;
        mass += 0.5 * (r - r_prev) * (g + g_prev);
        r_prev = r;
        g_prev = g;
    });
    return {p, 4 * M_PI * mass};
}

}  // namespace oracle
