#pragma once

#include <array>
#include <cmath>
#include <cstddef>
#include <vector>

#include "ga2d/core.hpp"

namespace ga2d {

/// N x N periodic square lattice of cavities with nearest-neighbour hopping J.
/// Energies are measured from the cavity frequency (band center at 0).
struct LatticeSpec {
    int N = 0;
    double J = 1.0;

    void validate() const {
        if (N < 4) throw ConfigError("lattice: N must be >= 4 (got " + std::to_string(N) + ")");
        if (!(J > 0.0) || !std::isfinite(J)) throw ConfigError("lattice: J must be a positive finite number");
    }

    std::size_t cavities() const { return static_cast<std::size_t>(N) * static_cast<std::size_t>(N); }

    /// Flat row-major index: row y, column x. Coordinates are wrapped periodically.
    std::size_t index(Site s) const {
        const int x = ((s.x % N) + N) % N;
        const int y = ((s.y % N) + N) % N;
        return static_cast<std::size_t>(y) * static_cast<std::size_t>(N) + static_cast<std::size_t>(x);
    }

    Site site(std::size_t idx) const {
        return {static_cast<int>(idx % static_cast<std::size_t>(N)), static_cast<int>(idx / static_cast<std::size_t>(N))};
    }

    bool contains(Site s) const { return s.x >= 0 && s.x < N && s.y >= 0 && s.y < N; }

    friend bool operator==(const LatticeSpec&, const LatticeSpec&) = default;
};

using WaveVector = std::array<double, 2>;

/// omega(k) = -2J (cos kx + cos ky)
inline double dispersion(WaveVector k, double J) { return -2.0 * J * (std::cos(k[0]) + std::cos(k[1])); }

/// Gradient of the dispersion, 2J (sin kx, sin ky).
inline WaveVector group_velocity(WaveVector k, double J) {
    return {2.0 * J * std::sin(k[0]), 2.0 * J * std::sin(k[1])};
}

/// Discrete wave vectors of an N x N periodic lattice in discrete-transform order:
/// index m maps to 2 pi m / N, folded into [-pi, pi - 2 pi / N].
class MomentumGrid {
  public:
    explicit MomentumGrid(const LatticeSpec& lattice) : N_(lattice.N), J_(lattice.J) {
        lattice.validate();
        k_.resize(static_cast<std::size_t>(N_));
        for (int m = 0; m < N_; ++m) k_[static_cast<std::size_t>(m)] = component(m, N_);
        omega_.resize(static_cast<std::size_t>(N_) * static_cast<std::size_t>(N_));
        for (int my = 0; my < N_; ++my)
            for (int mx = 0; mx < N_; ++mx)
                omega_[static_cast<std::size_t>(my) * static_cast<std::size_t>(N_) + static_cast<std::size_t>(mx)] =
                    dispersion({k_[static_cast<std::size_t>(mx)], k_[static_cast<std::size_t>(my)]}, J_);
    }

    static double component(int m, int N) {
        const int folded = (2 * m < N) ? m : m - N;
        return 2.0 * pi * static_cast<double>(folded) / static_cast<double>(N);
    }

    int size() const { return N_; }
    std::size_t modes() const { return omega_.size(); }

    /// Wave vector of flat mode index (same row-major layout as the position grid).
    WaveVector k(std::size_t mode) const {
        const auto n = static_cast<std::size_t>(N_);
        return {k_[mode % n], k_[mode / n]};
    }

    double omega(std::size_t mode) const { return omega_[mode]; }
    const std::vector<double>& energies() const { return omega_; }

  private:
    int N_;
    double J_;
    std::vector<double> k_;
    std::vector<double> omega_;
};

}  // namespace ga2d
