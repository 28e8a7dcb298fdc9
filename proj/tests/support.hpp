#pragma once

// Test-side reference implementations and random generators.

#include <Eigen/Dense>
#include <unsupported/Eigen/MatrixFunctions>

#include <random>
#include <set>
#include <vector>

#include "ga2d/atoms.hpp"
#include "ga2d/geometry.hpp"
#include "ga2d/state.hpp"

namespace ga2d::testing {

/// Dense complex H written out directly from the lattice and atom data.
inline Eigen::MatrixXcd reference_hamiltonian(const SystemConfig& cfg) {
    const int N = cfg.lattice.N;
    const auto M = static_cast<Eigen::Index>(cfg.atoms.size());
    const Eigen::Index dim = M + static_cast<Eigen::Index>(N) * N;
    Eigen::MatrixXcd h = Eigen::MatrixXcd::Zero(dim, dim);
    const auto cav = [&](int x, int y) { return M + static_cast<Eigen::Index>(((y % N + N) % N) * N + ((x % N + N) % N)); };
    for (int y = 0; y < N; ++y)
        for (int x = 0; x < N; ++x) {
            h(cav(x, y), cav(x + 1, y)) += -cfg.lattice.J;
            h(cav(x + 1, y), cav(x, y)) += -cfg.lattice.J;
            h(cav(x, y), cav(x, y + 1)) += -cfg.lattice.J;
            h(cav(x, y + 1), cav(x, y)) += -cfg.lattice.J;
        }
    for (Eigen::Index i = 0; i < M; ++i) {
        const auto& a = cfg.atoms[static_cast<std::size_t>(i)];
        h(i, i) = a.detuning;
        for (const auto& p : a.points) {
            h(i, cav(p.position.x, p.position.y)) += p.strength;
            h(cav(p.position.x, p.position.y), i) += p.strength;
        }
    }
    return h;
}

inline Eigen::VectorXcd as_vector(const SystemState& s) {
    Eigen::VectorXcd v(static_cast<Eigen::Index>(s.dimension()));
    for (std::size_t i = 0; i < s.dimension(); ++i) v(static_cast<Eigen::Index>(i)) = s[i];
    return v;
}

inline SystemState as_state(const Eigen::VectorXcd& v, std::size_t atoms, const LatticeSpec& lat) {
    SystemState s(atoms, lat);
    for (std::size_t i = 0; i < s.dimension(); ++i) s[i] = v(static_cast<Eigen::Index>(i));
    return s;
}

/// exp(-i H t) psi by Pade scaling-and-squaring on the dense matrix.
inline SystemState reference_evolve(const SystemConfig& cfg, const SystemState& psi, double t) {
    const Eigen::MatrixXcd h = reference_hamiltonian(cfg);
    const Eigen::MatrixXcd u = (cplx{0.0, -t} * h).exp();
    return as_state(u * as_vector(psi), cfg.atoms.size(), cfg.lattice);
}

inline double max_diff(const SystemState& a, const SystemState& b) { return max_abs_difference(a, b); }

/// Seeded generator for property tests.
class Gen {
  public:
    explicit Gen(std::uint64_t seed) : rng_(seed) {}

    int integer(int lo, int hi) { return std::uniform_int_distribution<int>(lo, hi)(rng_); }
    double real(double lo, double hi) { return std::uniform_real_distribution<double>(lo, hi)(rng_); }
    bool coin() { return integer(0, 1) == 1; }

    SystemState state(std::size_t atoms, const LatticeSpec& lat) {
        SystemState s(atoms, lat);
        for (std::size_t i = 0; i < s.dimension(); ++i) s[i] = {real(-1.0, 1.0), real(-1.0, 1.0)};
        s.normalize();
        return s;
    }

    /// Random points (distinct, inside the lattice) not in `used`; marks them used.
    GiantAtomSpec atom(const LatticeSpec& lat, int points, std::set<Site>& used, double gmax = 0.5) {
        GiantAtomSpec a;
        a.detuning = real(-0.5, 0.5);
        while (static_cast<int>(a.points.size()) < points) {
            const Site s{integer(0, lat.N - 1), integer(0, lat.N - 1)};
            if (!used.insert(s).second) continue;
            double g = real(0.05, gmax);
            if (coin()) g = -g;
            a.points.push_back({s, g});
        }
        return a;
    }

    SystemConfig config(int N, int atoms, int max_points) {
        SystemConfig cfg{{N, 1.0}, {}};
        std::set<Site> used;
        for (int i = 0; i < atoms; ++i) cfg.atoms.push_back(atom(cfg.lattice, integer(1, max_points), used));
        return cfg;
    }

    /// Equal-strength 4-point rectangle with half-extents in [1, max_extent] centred near `center`.
    /// Extents of any parity; returns the diagonal extents through the out-parameters.
    GiantAtomSpec rectangle(Site center, int max_extent, double g, int& a, int& b) {
        a = integer(1, max_extent);
        b = integer(1, max_extent);
        const auto c = DiagonalFrame::from_site(center);
        const int shift = (a + b) % 2;  // odd a + b puts the centre between sites
        return make_uniform_atom(diagonal_rectangle_sites({c.u_plus, c.u_minus + shift}, a, b), g);
    }

    /// Odd rectangle at a random centre with random (signed) strength.
    GiantAtomSpec subradiant_rectangle(Site center, int jitter, int max_half) {
        const int a = 2 * integer(0, max_half) + 1;
        const int b = 2 * integer(0, max_half) + 1;
        const Site c{center.x + integer(-jitter, jitter), center.y + integer(-jitter, jitter)};
        double g = real(0.05, 0.4);
        if (coin()) g = -g;
        return make_uniform_atom(DiagonalRectangle::corners(c, a, b), g);
    }

    std::mt19937_64& engine() { return rng_; }

  private:
    std::mt19937_64 rng_;
};

}  // namespace ga2d::testing
