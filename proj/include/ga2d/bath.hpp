#pragma once

#include <fftw3.h>

#include <cmath>
#include <memory>
#include <mutex>
#include <span>
#include <vector>

#include "ga2d/core.hpp"
#include "ga2d/lattice.hpp"
#include "ga2d/state.hpp"

namespace ga2d {

namespace detail {

// FFTW's planner is not thread-safe; execution is.
inline std::mutex& fftw_planner_mutex() {
    static std::mutex m;
    return m;
}

struct PlanDeleter {
    void operator()(fftw_plan_s* p) const {
        std::lock_guard lock(fftw_planner_mutex());
        fftw_destroy_plan(p);
    }
};

using PlanHandle = std::unique_ptr<fftw_plan_s, PlanDeleter>;

inline fftw_complex* as_fftw(cplx* p) { return reinterpret_cast<fftw_complex*>(p); }

}  // namespace detail

/// In-place 2D discrete Fourier transform pair on an n x n grid, normalized to be
/// unitary. Position amplitudes psi_n and momentum amplitudes psi_k are related by
///   psi_n = (1/n) sum_k psi_k e^{-i k.n},   psi_k = (1/n) sum_n psi_n e^{+i k.n}.
/// Any grid size is accepted (the spectral module also uses odd sizes).
class FourierTransform2D {
  public:
    explicit FourierTransform2D(int n) : n_(n) {
        if (n < 1) throw ConfigError("fft: grid size must be positive");
        std::vector<cplx> scratch(static_cast<std::size_t>(n) * static_cast<std::size_t>(n));
        std::lock_guard lock(detail::fftw_planner_mutex());
        // ESTIMATE keeps plans (and therefore results) identical run to run.
        const unsigned flags = FFTW_ESTIMATE | FFTW_UNALIGNED;
        auto* buf = detail::as_fftw(scratch.data());
        to_position_.reset(fftw_plan_dft_2d(n, n, buf, buf, FFTW_FORWARD, flags));
        to_momentum_.reset(fftw_plan_dft_2d(n, n, buf, buf, FFTW_BACKWARD, flags));
        if (!to_position_ || !to_momentum_) throw std::runtime_error("fft: plan creation failed");
    }

    int size() const { return n_; }

    /// Unnormalized transforms (scale n each); the caller folds in the 1/n^2.
    void to_momentum_raw(std::span<cplx> data) const { execute(to_momentum_.get(), data); }
    void to_position_raw(std::span<cplx> data) const { execute(to_position_.get(), data); }

    void to_momentum(std::span<cplx> data) const {
        to_momentum_raw(data);
        scale(data);
    }
    void to_position(std::span<cplx> data) const {
        to_position_raw(data);
        scale(data);
    }

  private:
    void execute(fftw_plan_s* plan, std::span<cplx> data) const {
        if (data.size() != static_cast<std::size_t>(n_) * static_cast<std::size_t>(n_))
            throw ConfigError("fft: buffer size does not match grid");
        fftw_execute_dft(plan, detail::as_fftw(data.data()), detail::as_fftw(data.data()));
    }

    void scale(std::span<cplx> data) const {
        const double s = 1.0 / static_cast<double>(n_);
        for (auto& c : data) c *= s;
    }

    int n_;
    detail::PlanHandle to_position_;
    detail::PlanHandle to_momentum_;
};

/// Exact bath propagator U_B(dt) = exp(-i H_B dt), diagonal in momentum space.
/// Owns the FFT plans and the per-mode phase table for one time step.
class BathPropagator {
  public:
    BathPropagator(const LatticeSpec& lattice, double dt)
        : lattice_(lattice), grid_(lattice), fft_(lattice.N), dt_(dt), phase_(grid_.modes()) {
        const double norm = 1.0 / static_cast<double>(lattice.cavities());
        for (std::size_t m = 0; m < grid_.modes(); ++m)
            phase_[m] = std::polar(norm, -grid_.omega(m) * dt);
    }

    double dt() const { return dt_; }
    const LatticeSpec& lattice() const { return lattice_; }
    const MomentumGrid& grid() const { return grid_; }

    void apply(std::span<cplx> field) const {
        if (field.size() != lattice_.cavities())
            throw ConfigError("bath propagator: field has " + std::to_string(field.size()) + " amplitudes, lattice has " +
                              std::to_string(lattice_.cavities()));
        fft_.to_momentum_raw(field);
        for (std::size_t m = 0; m < field.size(); ++m) field[m] *= phase_[m];
        fft_.to_position_raw(field);
    }

    void apply(SystemState& state) const { apply(std::span<cplx>(state.field)); }

  private:
    LatticeSpec lattice_;
    MomentumGrid grid_;
    FourierTransform2D fft_;
    double dt_;
    std::vector<cplx> phase_;
};

/// One-shot convenience wrapper; prefer a reused BathPropagator in loops.
inline SystemState apply_bath_propagator(SystemState state, const LatticeSpec& lattice, double dt) {
    BathPropagator(lattice, dt).apply(state);
    return state;
}

}  // namespace ga2d
