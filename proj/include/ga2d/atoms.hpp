#pragma once

#include <array>
#include <cmath>
#include <map>
#include <set>
#include <span>
#include <vector>

#include "ga2d/core.hpp"
#include "ga2d/lattice.hpp"
#include "ga2d/state.hpp"

namespace ga2d {

/// One connection of a giant atom to a cavity. Strengths are real and may be negative.
struct CouplingPoint {
    Site position;
    double strength = 0.0;

    friend bool operator==(const CouplingPoint&, const CouplingPoint&) = default;
};

/// Sums the strengths of points that share a cavity and drops points whose strength
/// cancels. Output is ordered by first appearance of each position.
inline std::vector<CouplingPoint> merge_coupling_points(std::span<const CouplingPoint> points) {
    std::vector<CouplingPoint> merged;
    std::map<Site, std::size_t> slot;
    for (const auto& p : points) {
        auto [it, inserted] = slot.try_emplace(p.position, merged.size());
        if (inserted)
            merged.push_back(p);
        else
            merged[it->second].strength += p.strength;
    }
    // Relative threshold: g1 + (-g1) should vanish even after rounding.
    double scale = 0.0;
    for (const auto& p : points) scale = std::max(scale, std::abs(p.strength));
    std::erase_if(merged, [&](const CouplingPoint& p) { return std::abs(p.strength) <= 1e-14 * scale; });
    return merged;
}

struct GiantAtomSpec {
    double detuning = 0.0;
    std::vector<CouplingPoint> points;

    std::size_t size() const { return points.size(); }

    friend bool operator==(const GiantAtomSpec&, const GiantAtomSpec&) = default;
};

/// Builds an atom from possibly overlapping points (merging them first).
inline GiantAtomSpec make_atom(double detuning, std::span<const CouplingPoint> points) {
    return {detuning, merge_coupling_points(points)};
}

/// Equal-strength atom over the given sites.
inline GiantAtomSpec make_uniform_atom(std::span<const Site> sites, double g, double detuning = 0.0) {
    std::vector<CouplingPoint> pts;
    pts.reserve(sites.size());
    for (const auto& s : sites) pts.push_back({s, g});
    return make_atom(detuning, pts);
}

/// G_i = sqrt(sum_p g_ip^2). Zero for an atom without coupling points.
inline double effective_coupling(const GiantAtomSpec& atom) {
    double s = 0.0;
    for (const auto& p : atom.points) s += p.strength * p.strength;
    return std::sqrt(s);
}

/// 2x2 unitary exp(-i H dt) for H = [[detuning, G], [G, 0]], row-major.
using Matrix2c = std::array<std::array<cplx, 2>, 2>;

inline Matrix2c effective_two_level_propagator(double detuning, double G, double dt) {
    // H = (detuning/2) 1 + K, K = [[d, G], [G, -d]] with d = detuning/2; K^2 = Omega^2 1.
    const double d = 0.5 * detuning;
    const double omega = std::sqrt(d * d + G * G);
    const cplx global = std::polar(1.0, -d * dt);
    const double c = std::cos(omega * dt);
    // sin(omega dt) / omega, continuous at omega -> 0
    const double sinc = omega * std::abs(dt) > 1e-8 ? std::sin(omega * dt) / omega : dt * (1.0 - (omega * dt) * (omega * dt) / 6.0);
    const cplx mi{0.0, -1.0};
    Matrix2c u;
    u[0][0] = global * (c + mi * d * sinc);
    u[0][1] = global * (mi * G * sinc);
    u[1][0] = u[0][1];
    u[1][1] = global * (c - mi * d * sinc);
    return u;
}

inline Matrix2c effective_two_level_propagator(const GiantAtomSpec& atom, double dt) {
    return effective_two_level_propagator(atom.detuning, effective_coupling(atom), dt);
}

/// Lattice plus atoms: the data of H = H_B + H_A + H_int in the single-excitation manifold.
struct SystemConfig {
    LatticeSpec lattice;
    std::vector<GiantAtomSpec> atoms;

    std::size_t num_atoms() const { return atoms.size(); }

    /// Throws ConfigError naming the violated invariant.
    void validate() const {
        lattice.validate();
        std::set<Site> used;
        for (std::size_t i = 0; i < atoms.size(); ++i) {
            const auto& atom = atoms[i];
            const std::string who = "atom " + std::to_string(i);
            if (!std::isfinite(atom.detuning)) throw ConfigError(who + ": detuning must be finite");
            std::set<Site> own;
            for (const auto& p : atom.points) {
                if (!lattice.contains(p.position))
                    throw ConfigError(who + ": coupling position " + to_string(p.position) + " outside the lattice");
                if (p.strength == 0.0 || !std::isfinite(p.strength))
                    throw ConfigError(who + ": coupling strength at " + to_string(p.position) + " must be finite and nonzero");
                if (!own.insert(p.position).second)
                    throw ConfigError(who + ": duplicate coupling position " + to_string(p.position) +
                                      " (merge overlapping points first)");
            }
            for (const auto& s : own)
                if (!used.insert(s).second)
                    throw ConfigError("cavity coupled to multiple atoms: " + to_string(s) + " (" + who + ")");
        }
    }

    friend bool operator==(const SystemConfig&, const SystemConfig&) = default;
};

/// Combined atom + interaction propagator U_A(dt) = exp(-i (H_A + H_int) dt).
///
/// Each atom only mixes its excited state with the normalized superposition of its
/// coupled cavities, v = sum_p (g_p / G) |n_p>. Field components orthogonal to v are
/// untouched, so one step costs O(M + sum_i P_i) and never touches the rest of the lattice.
class AtomPropagator {
  public:
    AtomPropagator(const SystemConfig& config, double dt) : dt_(dt), lattice_(config.lattice) {
        config.validate();
        atoms_.reserve(config.atoms.size());
        for (const auto& atom : config.atoms) {
            Entry e;
            const double G = effective_coupling(atom);
            e.u = effective_two_level_propagator(atom.detuning, G, dt);
            e.begin = cavity_.size();
            for (const auto& p : atom.points) {
                cavity_.push_back(config.lattice.index(p.position));
                weight_.push_back(p.strength / G);
            }
            e.end = cavity_.size();
            atoms_.push_back(e);
        }
    }

    double dt() const { return dt_; }

    void apply(SystemState& state) const {
        if (state.atoms.size() != atoms_.size() || state.field.size() != lattice_.cavities())
            throw ConfigError("atom propagator: state dimensions do not match the configuration");
        for (std::size_t i = 0; i < atoms_.size(); ++i) {
            const Entry& e = atoms_[i];
            const cplx c = state.atoms[i];
            cplx proj{0.0, 0.0};
            for (std::size_t q = e.begin; q < e.end; ++q) proj += weight_[q] * state.field[cavity_[q]];
            state.atoms[i] = e.u[0][0] * c + e.u[0][1] * proj;
            if (e.begin == e.end) continue;
            // rank-1 update: psi += v * ((u22 - 1) <v|psi> + u12 c)
            const cplx delta = (e.u[1][1] - 1.0) * proj + e.u[1][0] * c;
            for (std::size_t q = e.begin; q < e.end; ++q) state.field[cavity_[q]] += weight_[q] * delta;
        }
    }

  private:
    struct Entry {
        Matrix2c u;
        std::size_t begin = 0;
        std::size_t end = 0;
    };

    double dt_;
    LatticeSpec lattice_;
    std::vector<Entry> atoms_;
    std::vector<std::size_t> cavity_;
    std::vector<double> weight_;
};

inline SystemState apply_atom_propagator(SystemState state, const SystemConfig& config, double dt) {
    AtomPropagator(config, dt).apply(state);
    return state;
}

}  // namespace ga2d
