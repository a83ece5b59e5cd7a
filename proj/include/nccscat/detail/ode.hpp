#pragma once

#include <cmath>
#include <cstddef>
#include <functional>
#include <vector>

#include "nccscat/errors.hpp"

namespace nccscat::detail {

/// Tolerances and step limits for the adaptive integrator.
struct OdeControls {
    double rel_tol = 1e-10;
    double abs_tol = 1e-12;
    double h_init = 1e-3;
    double h_min = 1e-14;
    double h_max = 0.0;        ///< 0 = unlimited
    std::size_t max_steps = 50'000'000;
};

/// Outcome of one adaptive step attempt.
enum class StepStatus { Accepted, Rejected, Underflow };

/// Embedded Dormand-Prince 5(4) pair.  The right-hand side is a callable
/// rhs(x, const y, dy) writing dy = f(x, y); it may throw to abort a step
/// (used for leaving the classically allowed region), in which case the
/// caller sees the exception through step()'s propagation.
///
/// State is a flat vector; the integrator carries no problem knowledge.
class RK45 {
public:
    explicit RK45(std::size_t dim, OdeControls ctl = {}) : ctl_(ctl), dim_(dim) {
        for (auto* v : {&k1_, &k2_, &k3_, &k4_, &k5_, &k6_, &k7_, &ytmp_, &y5_, &y4_})
            v->assign(dim_, 0.0);
    }

    const OdeControls& controls() const { return ctl_; }
    OdeControls& controls() { return ctl_; }

    /// Attempts one step of size h from (x, y).  On acceptance y and x are
    /// advanced and h updated to the proposed next step; on rejection only
    /// h shrinks.  The FSAL slope k7 is reused as k1 of the next step.
    template <class RHS>
    StepStatus step(RHS&& rhs, double& x, std::vector<double>& y, double& h,
                    double x_end) {
        if (!have_k1_) {
            rhs(x, y, k1_);
            have_k1_ = true;
        }
        if (x + h > x_end) h = x_end - x;

        // Dormand-Prince coefficients
        static constexpr double
            c2 = 1.0 / 5, c3 = 3.0 / 10, c4 = 4.0 / 5, c5 = 8.0 / 9,
            a21 = 1.0 / 5,
            a31 = 3.0 / 40, a32 = 9.0 / 40,
            a41 = 44.0 / 45, a42 = -56.0 / 15, a43 = 32.0 / 9,
            a51 = 19372.0 / 6561, a52 = -25360.0 / 2187, a53 = 64448.0 / 6561,
            a54 = -212.0 / 729,
            a61 = 9017.0 / 3168, a62 = -355.0 / 33, a63 = 46732.0 / 5247,
            a64 = 49.0 / 176, a65 = -5103.0 / 18656,
            b1 = 35.0 / 384, b3 = 500.0 / 1113, b4 = 125.0 / 192,
            b5 = -2187.0 / 6784, b6 = 11.0 / 84,
            e1 = 71.0 / 57600, e3 = -71.0 / 16695, e4 = 71.0 / 1920,
            e5 = -17253.0 / 339200, e6 = 22.0 / 525, e7 = -1.0 / 40;

        const std::size_t n = dim_;
        for (std::size_t i = 0; i < n; ++i) ytmp_[i] = y[i] + h * a21 * k1_[i];
        rhs(x + c2 * h, ytmp_, k2_);
        for (std::size_t i = 0; i < n; ++i)
            ytmp_[i] = y[i] + h * (a31 * k1_[i] + a32 * k2_[i]);
        rhs(x + c3 * h, ytmp_, k3_);
        for (std::size_t i = 0; i < n; ++i)
            ytmp_[i] = y[i] + h * (a41 * k1_[i] + a42 * k2_[i] + a43 * k3_[i]);
        rhs(x + c4 * h, ytmp_, k4_);
        for (std::size_t i = 0; i < n; ++i)
            ytmp_[i] = y[i] + h * (a51 * k1_[i] + a52 * k2_[i] + a53 * k3_[i] +
                                   a54 * k4_[i]);
        rhs(x + c5 * h, ytmp_, k5_);
        for (std::size_t i = 0; i < n; ++i)
            ytmp_[i] = y[i] + h * (a61 * k1_[i] + a62 * k2_[i] + a63 * k3_[i] +
                                   a64 * k4_[i] + a65 * k5_[i]);
        rhs(x + h, ytmp_, k6_);
        for (std::size_t i = 0; i < n; ++i)
            y5_[i] = y[i] + h * (b1 * k1_[i] + b3 * k3_[i] + b4 * k4_[i] +
                                 b5 * k5_[i] + b6 * k6_[i]);
        rhs(x + h, y5_, k7_);

        double err = 0.0;
        for (std::size_t i = 0; i < n; ++i) {
            const double e = h * (e1 * k1_[i] + e3 * k3_[i] + e4 * k4_[i] +
                                  e5 * k5_[i] + e6 * k6_[i] + e7 * k7_[i]);
            const double sc = ctl_.abs_tol +
                              ctl_.rel_tol * std::max(std::abs(y[i]), std::abs(y5_[i]));
            err += (e / sc) * (e / sc);
        }
        err = std::sqrt(err / static_cast<double>(n));

        const double h_used = h;
        double factor = (err > 0.0) ? 0.9 * std::pow(err, -0.2) : 5.0;
        factor = std::min(5.0, std::max(0.2, factor));
        double h_new = h_used * factor;
        if (ctl_.h_max > 0.0) h_new = std::min(h_new, ctl_.h_max);

        if (err <= 1.0) {
            x += h_used;
            y.swap(y5_);
            k1_.swap(k7_); // FSAL
            h = h_new;
            return StepStatus::Accepted;
        }
        h = h_new;
        if (std::abs(h) < ctl_.h_min) return StepStatus::Underflow;
        return StepStatus::Rejected;
    }

    /// Invalidate the cached FSAL slope (call after y was modified externally).
    void reset() { have_k1_ = false; }

    /// Integrate from x to x_end; on_sample(x, y) is called after every
    /// accepted step and may return false to stop early.
    template <class RHS, class Monitor>
    void integrate(RHS&& rhs, double& x, std::vector<double>& y, double x_end,
                   Monitor&& on_sample) {
        double h = ctl_.h_init;
        if (x_end < x) throw numeric_error("RK45: x_end must be >= x");
        reset();
        std::size_t steps = 0;
        while (x < x_end) {
            const StepStatus st = step(rhs, x, y, h, x_end);
            if (st == StepStatus::Underflow)
                throw numeric_error("RK45: step size underflow");
            if (st == StepStatus::Accepted) {
                if (!on_sample(x, y)) return;
            }
            if (++steps > ctl_.max_steps)
                throw numeric_error("RK45: maximum step count exceeded");
        }
    }

private:
    OdeControls ctl_;
    std::size_t dim_;
    bool have_k1_ = false;
    std::vector<double> k1_, k2_, k3_, k4_, k5_, k6_, k7_, ytmp_, y5_, y4_;
};

} // namespace nccscat::detail
