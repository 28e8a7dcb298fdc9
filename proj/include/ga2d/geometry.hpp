#pragma once

#include <algorithm>
#include <cmath>
#include <map>
#include <optional>
#include <set>
#include <string>
#include <utility>
#include <vector>

#include "ga2d/atoms.hpp"
#include "ga2d/bath.hpp"
#include "ga2d/core.hpp"
#include "ga2d/lattice.hpp"

namespace ga2d {

/// Coordinates along the (1,1) and (1,-1) diagonals: u+ = x + y, u- = x - y.
/// Only pairs with u+ = u- (mod 2) correspond to lattice sites.
struct DiagonalFrame {
    int u_plus = 0;
    int u_minus = 0;

    static DiagonalFrame from_site(Site s) { return {s.x + s.y, s.x - s.y}; }

    bool is_site() const { return ((u_plus - u_minus) % 2) == 0; }

    Site to_site() const {
        if (!is_site()) throw PreconditionError("diagonal frame: coordinates do not map to a lattice site");
        return {(u_plus + u_minus) / 2, (u_plus - u_minus) / 2};
    }

    friend constexpr auto operator<=>(const DiagonalFrame&, const DiagonalFrame&) = default;
};

/// F(k) = sum_p g_p exp(-i k . n_p), the atom's coupling amplitude to the plane wave k.
inline cplx form_factor(const GiantAtomSpec& atom, WaveVector k) {
    cplx f{0.0, 0.0};
    for (const auto& p : atom.points)
        f += p.strength * std::polar(1.0, -(k[0] * p.position.x + k[1] * p.position.y));
    return f;
}

/// Four equal-strength points at the corners of a rectangle aligned with the lattice
/// diagonals. Extents are corner-to-corner distances counted in diagonal steps.
struct DiagonalRectangle {
    Site center;
    int extent_plus = 0;   // along (1,1), equals 2 n+ + 1 when odd
    int extent_minus = 0;  // along (1,-1), equals 2 n- + 1 when odd
    double strength = 0.0;

    bool odd() const { return (extent_plus % 2 == 1) && (extent_minus % 2 == 1); }
    int n_plus() const { return (extent_plus - 1) / 2; }
    int n_minus() const { return (extent_minus - 1) / 2; }

    /// Corner sites for a rectangle with the given center and extents.
    static std::vector<Site> corners(Site center, int extent_plus, int extent_minus) {
        const auto c = DiagonalFrame::from_site(center);
        std::vector<Site> out;
        for (int s : {1, -1})
            for (int t : {1, -1})
                out.push_back(DiagonalFrame{c.u_plus + s * extent_plus, c.u_minus + t * extent_minus}.to_site());
        return out;
    }
};

/// Corners of a rectangle with half-extents (A, B) in the diagonal frame around `center`.
/// The center itself need not be a site (A + B odd); the corners must be.
inline std::vector<Site> diagonal_rectangle_sites(DiagonalFrame center, int extent_plus, int extent_minus) {
    std::vector<Site> out;
    for (int s : {1, -1})
        for (int t : {1, -1})
            out.push_back(DiagonalFrame{center.u_plus + s * extent_plus, center.u_minus + t * extent_minus}.to_site());
    return out;
}

inline std::optional<DiagonalRectangle> as_rectangle(const GiantAtomSpec& atom) {
    if (atom.points.size() != 4) return std::nullopt;
    const double g = atom.points.front().strength;
    int up_min = 1 << 30, up_max = -(1 << 30), um_min = 1 << 30, um_max = -(1 << 30);
    for (const auto& p : atom.points) {
        if (std::abs(p.strength - g) > 1e-12 * std::abs(g)) return std::nullopt;
        const auto d = DiagonalFrame::from_site(p.position);
        up_min = std::min(up_min, d.u_plus);
        up_max = std::max(up_max, d.u_plus);
        um_min = std::min(um_min, d.u_minus);
        um_max = std::max(um_max, d.u_minus);
    }
    if (up_max == up_min || um_max == um_min) return std::nullopt;
    for (const auto& p : atom.points) {
        const auto d = DiagonalFrame::from_site(p.position);
        if ((d.u_plus != up_min && d.u_plus != up_max) || (d.u_minus != um_min && d.u_minus != um_max)) return std::nullopt;
    }
    // four distinct points, each on a corner -> all four corners present
    const DiagonalFrame mid{(up_min + up_max) / 2, (um_min + um_max) / 2};
    if ((up_min + up_max) % 2 != 0 || (um_min + um_max) % 2 != 0 || !mid.is_site()) return std::nullopt;
    return DiagonalRectangle{mid.to_site(), (up_max - up_min) / 2, (um_max - um_min) / 2, g};
}

/// Spectral subradiance test: |F(k)| < tol * sum|g_p| at every sampled point of the
/// band-center contour, i.e. the lines kx + ky = +-pi and kx - ky = +-pi.
inline bool is_perfectly_subradiant_spectral(const GiantAtomSpec& atom, int samples = 512, double tol = 1e-10) {
    if (atom.detuning != 0.0 || atom.points.empty()) return false;
    samples = std::max(samples, 128);
    double scale = 0.0;
    for (const auto& p : atom.points) scale += std::abs(p.strength);
    for (int i = 0; i < samples; ++i) {
        const double t = -pi + 2.0 * pi * (static_cast<double>(i) + 0.5) / static_cast<double>(samples);
        // -pi and pi are the same line modulo 2 pi
        for (const WaveVector k : {WaveVector{t, pi - t}, WaveVector{t, t - pi}})
            if (std::abs(form_factor(atom, k)) >= tol * scale) return false;
    }
    return true;
}

/// True iff the atom does not radiate at the band center. Equal-strength diagonal
/// rectangles use the odd-extent rule; everything else goes through the spectral test.
inline bool is_perfectly_subradiant(const GiantAtomSpec& atom, int samples = 512, double tol = 1e-10) {
    if (atom.detuning != 0.0 || atom.points.empty()) return false;
    if (auto rect = as_rectangle(atom)) return rect->odd();
    return is_perfectly_subradiant_spectral(atom, samples, tol);
}

/// Photonic part of a band-center bound state: peak positions with signed weights.
///
/// Weights are the field amplitudes of the bound state, normalized so that the atom
/// amplitude is 1 and in units of g/J: the cavity amplitude at `site` is weight / J.
/// Adjacent peaks along a diagonal alternate in sign.
struct BicSupport {
    std::map<Site, double> weights;

    std::size_t size() const { return weights.size(); }
    bool contains(Site s) const { return weights.contains(s); }
    int sign(Site s) const {
        auto it = weights.find(s);
        if (it == weights.end()) return 0;
        return it->second > 0 ? 1 : -1;
    }
    /// Sum of squared weights; times 1/J^2 this is -dSigma/dz at z = 0.
    double norm2() const {
        double s = 0.0;
        for (const auto& [site, w] : weights) s += w * w;
        return s;
    }
};

/// Solves H_B psi = -sum_p g_p |n_p> (with J = 1) on an odd periodic grid that encloses
/// the atom with a margin. On odd grids no mode sits exactly at omega = 0, so H_B is
/// invertible; for a subradiant atom the solution is the compact bound-state field.
inline BicSupport bic_support(const GiantAtomSpec& atom) {
    if (!is_perfectly_subradiant(atom))
        throw PreconditionError("bic_support: atom is not perfectly subradiant at the band center");
    int xmin = atom.points.front().position.x, xmax = xmin;
    int ymin = atom.points.front().position.y, ymax = ymin;
    double gmax = 0.0;
    for (const auto& p : atom.points) {
        xmin = std::min(xmin, p.position.x);
        xmax = std::max(xmax, p.position.x);
        ymin = std::min(ymin, p.position.y);
        ymax = std::max(ymax, p.position.y);
        gmax = std::max(gmax, std::abs(p.strength));
    }
    constexpr int margin = 4;
    int L = std::max(xmax - xmin, ymax - ymin) + 1 + 2 * margin;
    if (L % 2 == 0) ++L;
    const Site origin{xmin - margin, ymin - margin};
    const auto idx = [L](Site s) { return static_cast<std::size_t>(s.y) * static_cast<std::size_t>(L) + static_cast<std::size_t>(s.x); };

    std::vector<cplx> buf(static_cast<std::size_t>(L) * static_cast<std::size_t>(L), cplx{0.0, 0.0});
    for (const auto& p : atom.points) buf[idx(p.position - origin)] += -p.strength;
    FourierTransform2D fft(L);
    fft.to_momentum(buf);
    for (int my = 0; my < L; ++my)
        for (int mx = 0; mx < L; ++mx) {
            const double w = dispersion({MomentumGrid::component(mx, L), MomentumGrid::component(my, L)}, 1.0);
            buf[idx({mx, my})] /= w;
        }
    fft.to_position(buf);

    BicSupport out;
    const double cut = 1e-9 * gmax;
    for (int y = 0; y < L; ++y)
        for (int x = 0; x < L; ++x) {
            const double w = buf[idx({x, y})].real();
            if (std::abs(w) <= cut) continue;
            const Site s = Site{x, y} + origin;
            if (s.x < xmin || s.x > xmax || s.y < ymin || s.y > ymax)
                throw PreconditionError("bic_support: bound-state field is not enclosed by the coupling points");
            out.weights.emplace(s, w);
        }
    return out;
}

/// Pairs (i < j) of atoms that can exchange excitations without decoherence: each atom
/// has at least one coupling point on a bound-state peak of the other, and neither has
/// all of its points inside the other's support.
inline std::vector<std::pair<int, int>> dfi_pairs(const SystemConfig& config) {
    std::vector<BicSupport> supports;
    supports.reserve(config.atoms.size());
    for (std::size_t i = 0; i < config.atoms.size(); ++i) {
        if (!is_perfectly_subradiant(config.atoms[i]))
            throw PreconditionError("dfi_pairs: atom " + std::to_string(i) + " is not perfectly subradiant");
        supports.push_back(bic_support(config.atoms[i]));
    }
    const auto inside = [](const GiantAtomSpec& atom, const BicSupport& support) {
        std::size_t n = 0;
        for (const auto& p : atom.points) n += support.contains(p.position) ? 1 : 0;
        return n;
    };
    std::vector<std::pair<int, int>> out;
    for (std::size_t i = 0; i < config.atoms.size(); ++i)
        for (std::size_t j = i + 1; j < config.atoms.size(); ++j) {
            const auto j_in_i = inside(config.atoms[j], supports[i]);
            const auto i_in_j = inside(config.atoms[i], supports[j]);
            if (j_in_i > 0 && i_in_j > 0 && j_in_i < config.atoms[j].size() && i_in_j < config.atoms[i].size())
                out.emplace_back(static_cast<int>(i), static_cast<int>(j));
        }
    return out;
}

/// Named set of cavities whose summed population is tracked during evolution.
struct Region {
    std::string name;
    std::vector<std::size_t> cavities;
};

/// One region per perfectly subradiant atom, named "bic_<atom index>". With two or more
/// such atoms a final region "bic_all" holds the union, since supports may overlap.
inline std::vector<Region> bic_regions(const SystemConfig& config) {
    std::vector<Region> out;
    std::set<std::size_t> all;
    for (std::size_t i = 0; i < config.atoms.size(); ++i) {
        if (!is_perfectly_subradiant(config.atoms[i])) continue;
        Region r{"bic_" + std::to_string(i), {}};
        for (const auto& [site, w] : bic_support(config.atoms[i]).weights) r.cavities.push_back(config.lattice.index(site));
        all.insert(r.cavities.begin(), r.cavities.end());
        out.push_back(std::move(r));
    }
    if (out.size() > 1) out.push_back({"bic_all", std::vector<std::size_t>(all.begin(), all.end())});
    return out;
}

}  // namespace ga2d
