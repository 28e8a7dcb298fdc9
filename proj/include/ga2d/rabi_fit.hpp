#pragma once

#include <Eigen/Dense>
#include <unsupported/Eigen/NonLinearOptimization>

#include <algorithm>
#include <cmath>
#include <limits>
#include <span>
#include <vector>

#include "ga2d/core.hpp"
#include "ga2d/timeseries.hpp"

namespace ga2d {

/// Parameters of A cos^2(z_R (t - t0)) exp(-2 z_I t) fitted to a population trace.
struct RabiFit {
    double z_R = 0.0;
    double z_I = 0.0;
    double fit_start = 0.0;
    double residual = 0.0;  // RMS deviation over the fitted window; +inf if the fit failed
    double amplitude = 0.0;
    double t0 = 0.0;
    bool converged = true;
};

namespace detail {

struct RabiModel {
    const std::vector<double>& tau;
    const std::vector<double>& y;
    bool fixed_damping;

    int inputs() const { return fixed_damping ? 3 : 4; }
    int values() const { return static_cast<int>(tau.size()); }

    int operator()(const Eigen::VectorXd& x, Eigen::VectorXd& f) const {
        const double zi = fixed_damping ? 0.0 : x(3);
        for (std::size_t i = 0; i < tau.size(); ++i) {
            const double c = std::cos(x(1) * (tau[i] - x(2)));
            f(static_cast<Eigen::Index>(i)) = x(0) * c * c * std::exp(-2.0 * zi * tau[i]) - y[i];
        }
        return 0;
    }

    int df(const Eigen::VectorXd& x, Eigen::MatrixXd& jac) const {
        const double zi = fixed_damping ? 0.0 : x(3);
        for (std::size_t i = 0; i < tau.size(); ++i) {
            const auto r = static_cast<Eigen::Index>(i);
            const double arg = x(1) * (tau[i] - x(2));
            const double c = std::cos(arg);
            const double e = std::exp(-2.0 * zi * tau[i]);
            const double s2 = std::sin(2.0 * arg);
            jac(r, 0) = c * c * e;
            jac(r, 1) = -x(0) * e * s2 * (tau[i] - x(2));
            jac(r, 2) = x(0) * e * s2 * x(1);
            if (!fixed_damping) jac(r, 3) = -2.0 * tau[i] * x(0) * c * c * e;
        }
        return 0;
    }
};

}  // namespace detail

/// Least-squares fit of A cos^2(z_R (t - t0)) exp(-2 z_I t) to samples with t >= fit_start.
///
/// A coarse scan over z_R with a linear fit of c0 + c1 cos 2zt + c2 sin 2zt seeds a
/// Levenberg-Marquardt refinement. A negative damping estimate is replaced by a refit with
/// z_I pinned at zero.
inline RabiFit fit_rabi(std::span<const double> times, std::span<const double> values, double fit_start) {
    if (times.size() != values.size()) throw PreconditionError("fit_rabi: times and values differ in length");
    std::vector<double> tau, y;
    for (std::size_t i = 0; i < times.size(); ++i)
        if (times[i] >= fit_start) {
            tau.push_back(times[i] - fit_start);
            y.push_back(values[i]);
        }
    if (tau.size() < 8) throw PreconditionError("fit_rabi: fewer than 8 samples after fit_start");

    RabiFit out;
    out.fit_start = fit_start;
    const auto n = static_cast<double>(tau.size());
    double mean = 0.0;
    for (double v : y) mean += v;
    mean /= n;
    double spread = 0.0;
    for (double v : y) spread = std::max(spread, std::abs(v - mean));
    if (spread <= 1e-12 * std::max(1.0, std::abs(mean))) {
        out.amplitude = mean;
        return out;
    }

    const double span_t = tau.back() - tau.front();
    double min_step = span_t;
    for (std::size_t i = 1; i < tau.size(); ++i) min_step = std::min(min_step, tau[i] - tau[i - 1]);
    if (!(span_t > 0.0) || !(min_step > 0.0)) throw PreconditionError("fit_rabi: times must be strictly increasing");

    // cos^2 has period pi / z; require two periods and stay below the sampling Nyquist rate
    const double z_lo = 2.0 * pi / span_t;
    const double z_hi = 0.45 * pi / min_step;
    const int scan = std::clamp(static_cast<int>(8.0 * (z_hi - z_lo) * span_t / pi), 64, 20000);
    double best_err = std::numeric_limits<double>::infinity();
    Eigen::Vector3d best_coef = Eigen::Vector3d::Zero();
    double best_z = z_lo;
    for (int s = 0; s <= scan; ++s) {
        const double z = z_lo + (z_hi - z_lo) * s / scan;
        Eigen::Matrix3d gram = Eigen::Matrix3d::Zero();
        Eigen::Vector3d proj = Eigen::Vector3d::Zero();
        double yy = 0.0;
        for (std::size_t i = 0; i < tau.size(); ++i) {
            const Eigen::Vector3d row(1.0, std::cos(2.0 * z * tau[i]), std::sin(2.0 * z * tau[i]));
            gram.noalias() += row * row.transpose();
            proj += row * y[i];
            yy += y[i] * y[i];
        }
        const Eigen::Vector3d coef = gram.ldlt().solve(proj);
        const double err = yy - coef.dot(proj);
        if (err < best_err) {
            best_err = err;
            best_coef = coef;
            best_z = z;
        }
    }

    // c0 + r cos(2z(t - t0)) ~ A cos^2(z(t - t0)) with A = 2r
    const double r = std::hypot(best_coef(1), best_coef(2));
    const double phase = std::atan2(best_coef(2), best_coef(1));
    Eigen::VectorXd x(4);
    x << std::max(2.0 * r, best_coef(0) + r), best_z, phase / (2.0 * best_z), 0.0;

    const auto run = [&](Eigen::VectorXd& p, bool fixed) {
        detail::RabiModel model{tau, y, fixed};
        Eigen::LevenbergMarquardt<detail::RabiModel> lm(model);
        lm.parameters.maxfev = 4000;
        lm.parameters.ftol = 1e-15;
        lm.parameters.xtol = 1e-15;
        const auto status = lm.minimize(p);
        return status != Eigen::LevenbergMarquardtSpace::ImproperInputParameters &&
               status != Eigen::LevenbergMarquardtSpace::TooManyFunctionEvaluation &&
               status != Eigen::LevenbergMarquardtSpace::UserAsked;
    };

    bool ok = run(x, false);
    if (x(3) < 0.0) {
        Eigen::VectorXd p = x.head(3);
        ok = run(p, true);
        x.head(3) = p;
        x(3) = 0.0;
    }

    double sse = 0.0;
    for (std::size_t i = 0; i < tau.size(); ++i) {
        const double c = std::cos(x(1) * (tau[i] - x(2)));
        const double d = x(0) * c * c * std::exp(-2.0 * x(3) * tau[i]) - y[i];
        sse += d * d;
    }
    const double z = std::abs(x(1));
    out.converged = ok && x.allFinite();
    out.z_R = z;
    out.z_I = x(3);
    out.amplitude = x(0) * std::exp(2.0 * x(3) * fit_start);
    out.t0 = z > 0.0 ? fit_start + std::fmod(x(2) * (x(1) / z), pi / z) : fit_start;
    out.residual = out.converged ? std::sqrt(sse / n) : std::numeric_limits<double>::infinity();
    return out;
}

inline RabiFit fit_rabi(const TimeSeries& series, std::size_t atom_index, double fit_start) {
    if (atom_index >= series.atom_populations.size()) throw PreconditionError("fit_rabi: atom index out of range");
    return fit_rabi(series.times, series.atom_populations[atom_index], fit_start);
}

}  // namespace ga2d
