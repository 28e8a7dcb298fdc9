#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <optional>
#include <set>
#include <string>
#include <vector>

#include "ga2d/atoms.hpp"
#include "ga2d/bath.hpp"
#include "ga2d/core.hpp"
#include "ga2d/geometry.hpp"
#include "ga2d/spectral.hpp"
#include "ga2d/state.hpp"
#include "ga2d/timeseries.hpp"

namespace ga2d {

struct EvolutionParams {
    double dt = 0.01;
    double t_max = 1.0;
    int record_stride = 1;
    std::vector<double> snapshot_times;

    /// Number of whole steps covering t_max.
    std::int64_t steps() const { return std::max<std::int64_t>(1, std::llround(t_max / dt)); }

    void validate(double J) const {
        if (!(dt > 0.0) || !std::isfinite(dt)) throw ConfigError("evolution: dt must be positive and finite");
        if (dt * J > 0.1 + 1e-12) throw ConfigError("evolution: dt*J must not exceed 0.1");
        if (!(t_max >= dt) || !std::isfinite(t_max)) throw ConfigError("evolution: t_max must be finite and >= dt");
        if (record_stride < 1) throw ConfigError("evolution: record_stride must be >= 1");
        for (double t : snapshot_times)
            if (!(t >= 0.0) || t > t_max + 0.5 * dt)
                throw ConfigError("evolution: snapshot time " + std::to_string(t) + " outside [0, t_max]");
    }
};

/// |psi_n|^2 on the lattice at one time, row-major (index y * N + x).
struct Snapshot {
    double t = 0.0;
    int N = 0;
    std::vector<double> grid;
};

struct EvolutionResult {
    TimeSeries series;
    std::vector<Snapshot> snapshots;
    SystemState final_state;
    double wrap_time = 0.0;
    bool wrap_warning = false;  // t_max beyond wrap_time; results past it may include revivals
};

/// Earliest time a wavefront from a centered source can cross the periodic boundary:
/// N / (2 v_max) with v_max = 2 sqrt(2) J.
inline double wrap_time(const SystemConfig& config) {
    return static_cast<double>(config.lattice.N) / (4.0 * std::sqrt(2.0) * config.lattice.J);
}

inline double region_population(const SystemState& state, const Region& region) {
    double s = 0.0;
    for (std::size_t c : region.cavities) s += std::norm(state.field[c]);
    return s;
}

/// Strang-split stepper. The internal state sits half an atom step ahead of the physical
/// state, so consecutive half steps fuse into one full step.
class SplitStepper {
  public:
    SplitStepper(const SystemConfig& config, double dt)
        : half_(config, 0.5 * dt), full_(config, dt), bath_(config.lattice, dt) {}

    /// Applies `steps` full steps, dt may be negative.
    void propagate(SystemState& state, std::int64_t steps) const {
        if (steps <= 0) return;
        half_.apply(state);
        for (std::int64_t s = 0; s < steps; ++s) {
            bath_.apply(state);
            if (s + 1 < steps) full_.apply(state);
        }
        half_.apply(state);
    }

    void enter(SystemState& state) const { half_.apply(state); }
    void bath(SystemState& state) const { bath_.apply(state); }
    void atoms(SystemState& state) const { full_.apply(state); }
    void half(SystemState& state) const { half_.apply(state); }

  private:
    AtomPropagator half_;
    AtomPropagator full_;
    BathPropagator bath_;
};

/// Advances `state` by `steps` steps of size dt (dt may be negative).
inline SystemState propagate(const SystemConfig& config, SystemState state, double dt, std::int64_t steps) {
    if (!std::isfinite(dt) || dt == 0.0) throw ConfigError("propagate: dt must be finite and nonzero");
    SplitStepper(config, dt).propagate(state, steps);
    return state;
}

inline EvolutionResult evolve(const SystemConfig& config, SystemState initial, const EvolutionParams& params,
                              const std::vector<Region>& regions) {
    config.validate();
    params.validate(config.lattice.J);
    if (initial.atoms.size() != config.atoms.size() || initial.field.size() != config.lattice.cavities())
        throw ConfigError("evolve: initial state dimensions do not match the configuration");

    const std::int64_t n = params.steps();
    const double dt = params.dt;
    std::set<std::int64_t> snap_steps;
    for (double t : params.snapshot_times) snap_steps.insert(std::clamp<std::int64_t>(std::llround(t / dt), 0, n));

    EvolutionResult out;
    out.wrap_time = wrap_time(config);
    out.wrap_warning = static_cast<double>(n) * dt > out.wrap_time;
    TimeSeries& ts = out.series;
    ts.atom_populations.assign(config.atoms.size(), {});
    for (const auto& r : regions) ts.region_names.push_back(r.name);
    ts.region_populations.assign(regions.size(), {});

    const auto record = [&](const SystemState& s, std::int64_t step) {
        ts.times.push_back(static_cast<double>(step) * dt);
        for (std::size_t i = 0; i < s.atoms.size(); ++i) ts.atom_populations[i].push_back(std::norm(s.atoms[i]));
        for (std::size_t r = 0; r < regions.size(); ++r) ts.region_populations[r].push_back(region_population(s, regions[r]));
        ts.bath_norm.push_back(s.field_population());
    };
    const auto snapshot = [&](const SystemState& s, std::int64_t step) {
        Snapshot snap{static_cast<double>(step) * dt, config.lattice.N, std::vector<double>(s.field.size())};
        for (std::size_t c = 0; c < s.field.size(); ++c) snap.grid[c] = std::norm(s.field[c]);
        out.snapshots.push_back(std::move(snap));
    };

    SystemState state = std::move(initial);
    record(state, 0);
    if (snap_steps.contains(0)) snapshot(state, 0);

    const SplitStepper stepper(config, dt);
    stepper.enter(state);
    for (std::int64_t s = 1; s <= n; ++s) {
        stepper.bath(state);
        const bool rec = s % params.record_stride == 0 || s == n;
        const bool snap = snap_steps.contains(s);
        if (rec || snap || s == n) {
            stepper.half(state);
            if (rec) record(state, s);
            if (snap) snapshot(state, s);
            if (s < n) stepper.half(state);
        } else {
            stepper.atoms(state);
        }
    }
    out.final_state = std::move(state);
    return out;
}

/// Evolves with one tracked region per subradiant atom (its bound-state support).
inline EvolutionResult evolve(const SystemConfig& config, SystemState initial, const EvolutionParams& params) {
    return evolve(config, std::move(initial), params, bic_regions(config));
}

/// How to build the initial state.
struct InitialSpec {
    enum class Kind { bare_excited, dressed, custom };
    Kind kind = Kind::bare_excited;
    std::size_t atom = 0;
    std::optional<SystemState> amplitudes;  // used by Kind::custom
};

inline std::string to_string(InitialSpec::Kind k) {
    switch (k) {
        case InitialSpec::Kind::bare_excited: return "bare_excited";
        case InitialSpec::Kind::dressed: return "dressed";
        case InitialSpec::Kind::custom: return "custom";
    }
    return "unknown";
}

/// Places a dressed state of atom `atom_index` into a full state vector.
inline SystemState embed(const DressedState& dressed, const SystemConfig& config, std::size_t atom_index) {
    SystemState s(config.atoms.size(), config.lattice);
    s.atoms.at(atom_index) = dressed.atom_weight;
    for (const auto& [site, w] : dressed.bic_weights) s.field[config.lattice.index(site)] += w;
    return s;
}

inline SystemState initial_state(const SystemConfig& config, const InitialSpec& spec) {
    switch (spec.kind) {
        case InitialSpec::Kind::bare_excited: {
            if (spec.atom >= config.atoms.size())
                throw ConfigError("initial state: atom index " + std::to_string(spec.atom) + " out of range");
            SystemState s(config.atoms.size(), config.lattice);
            s.atoms[spec.atom] = 1.0;
            return s;
        }
        case InitialSpec::Kind::dressed: {
            if (spec.atom >= config.atoms.size())
                throw ConfigError("initial state: atom index " + std::to_string(spec.atom) + " out of range");
            SystemState s = embed(dressed_state(config.atoms[spec.atom], config.lattice.J), config, spec.atom);
            s.normalize();
            return s;
        }
        case InitialSpec::Kind::custom: {
            if (!spec.amplitudes) throw ConfigError("initial state: custom kind needs amplitudes");
            SystemState s = *spec.amplitudes;
            if (s.atoms.size() != config.atoms.size() || s.field.size() != config.lattice.cavities())
                throw ConfigError("initial state: custom amplitudes have the wrong dimension");
            s.normalize();
            return s;
        }
    }
    throw ConfigError("initial state: unknown kind");
}

}  // namespace ga2d
