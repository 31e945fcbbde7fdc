#pragma once

#include <cmath>
#include <utility>
#include <vector>

#include "pistop/types.hpp"

namespace pistop {

// Gauss-Kronrod 7-15 panel: returns the K15 estimate and an error estimate
// from the G7/K15 discrepancy (scaled per QUADPACK practice).
template <class Func>
std::pair<double, double> quad_gk15(const Func& f, double a, double b) {
    static const double nodes[8] = {
        0.000000000000000, 0.405845151377397, 0.741531185599394, 0.949107912342759,
        0.207784955007898, 0.586087235467691, 0.864864423359769, 0.991455371120813};
    static const double wg[4] = {0.417959183673469, 0.381830050505119,
                                 0.279705391489277, 0.129484966168870};
    static const double wk[8] = {0.209482141084728, 0.190350578064785,
                                 0.140653259715525, 0.063092092629979,
                                 0.204432940075298, 0.169004726639267,
                                 0.104790010322250, 0.022935322010529};

    const double mid = 0.5 * (a + b);
    const double half = 0.5 * (b - a);

    const double f0 = f(mid);
    double g7 = wg[0] * f0;
    double k15 = wk[0] * f0;
    for (int i = 1; i < 8; ++i) {
        const double dx = half * nodes[i];
        const double fi = f(mid + dx) + f(mid - dx);
        k15 += wk[i] * fi;
        if (i < 4) g7 += wg[i] * fi;
    }
    g7 *= half;
    k15 *= half;

    double err = std::fabs(g7 - k15);
    err = 200.0 * err * std::sqrt(std::fmin(1.0, 200.0 * err));
    return {k15, err};
}

/// Adaptive bisection on [a, b] until the summed panel error estimate is
/// below abs_tol. Throws NumericalError when the panel budget runs out.
template <class Func>
double integrate_adaptive(const Func& f, double a, double b, double abs_tol,
                          int max_panels = 4000) {
    struct Interval {
        double a, b, value, err;
    };
    std::vector<Interval> work;
    auto [v0, e0] = quad_gk15(f, a, b);
    work.push_back({a, b, v0, e0});
    int panels = 1;

    for (;;) {
        double total_err = 0.0;
        int worst = 0;
        for (int i = 0; i < static_cast<int>(work.size()); ++i) {
            total_err += work[i].err;
            if (work[i].err > work[worst].err) worst = i;
        }
        if (total_err <= abs_tol) break;
        if (panels >= max_panels)
            throw NumericalError("integrate_adaptive: panel budget exhausted, error bound " +
                                 std::to_string(total_err));
        Interval iv = work[worst];
        const double m = 0.5 * (iv.a + iv.b);
        auto [vl, el] = quad_gk15(f, iv.a, m);
        auto [vr, er] = quad_gk15(f, m, iv.b);
        work[worst] = {iv.a, m, vl, el};
        work.push_back({m, iv.b, vr, er});
        ++panels;
    }

    double sum = 0.0;
    for (const auto& iv : work) sum += iv.value;
    return sum;
}

}  // namespace pistop
