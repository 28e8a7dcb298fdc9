#pragma once

#include <cmath>
#include <vector>

#include "ga2d/core.hpp"
#include "ga2d/lattice.hpp"

namespace ga2d {

/// Single-excitation state: one amplitude per atom (excited state) followed by
/// one amplitude per cavity, row-major over the lattice.
struct SystemState {
    std::vector<cplx> atoms;
    std::vector<cplx> field;

    SystemState() = default;
    SystemState(std::size_t num_atoms, const LatticeSpec& lattice)
        : atoms(num_atoms, cplx{0.0, 0.0}), field(lattice.cavities(), cplx{0.0, 0.0}) {}

    double atom_population() const {
        double s = 0.0;
        for (const auto& c : atoms) s += std::norm(c);
        return s;
    }

    double field_population() const {
        double s = 0.0;
        for (const auto& c : field) s += std::norm(c);
        return s;
    }

    double norm() const { return std::sqrt(atom_population() + field_population()); }

    void normalize() {
        const double n = norm();
        if (!(n > 0.0)) throw ConfigError("state: cannot normalize a zero state");
        for (auto& c : atoms) c /= n;
        for (auto& c : field) c /= n;
    }

    std::size_t dimension() const { return atoms.size() + field.size(); }

    cplx& operator[](std::size_t i) { return i < atoms.size() ? atoms[i] : field[i - atoms.size()]; }
    const cplx& operator[](std::size_t i) const { return i < atoms.size() ? atoms[i] : field[i - atoms.size()]; }
};

/// Largest componentwise modulus of a - b; dimensions must agree.
inline double max_abs_difference(const SystemState& a, const SystemState& b) {
    if (a.atoms.size() != b.atoms.size() || a.field.size() != b.field.size())
        throw ConfigError("state: dimension mismatch");
    double m = 0.0;
    for (std::size_t i = 0; i < a.dimension(); ++i) m = std::max(m, std::abs(a[i] - b[i]));
    return m;
}

}  // namespace ga2d
