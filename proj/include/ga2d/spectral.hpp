#pragma once

#include <Eigen/Dense>

#include <algorithm>
#include <bit>
#include <cmath>
#include <map>
#include <optional>
#include <set>
#include <utility>
#include <vector>

#include "ga2d/atoms.hpp"
#include "ga2d/core.hpp"
#include "ga2d/geometry.hpp"
#include "ga2d/lattice.hpp"
#include "ga2d/parallel.hpp"

namespace ga2d {

/// Resolvent quantities at one probe energy z (units of J).
struct SelfEnergyReport {
    cplx z;
    cplx value;       // Sigma(z)
    cplx derivative;  // d Sigma / dz
    int grid_size = 0;
};

namespace detail {

/// Brillouin-zone sampler for sums over F_a(k) F_b*(k) g(omega(k)).
///
/// kx carries a half-step offset, ky does not. For even grid sizes no sample then lies on
/// the band-center lines kx +- ky = +-pi, so z = 0 never hits a pole.
class ZoneQuadrature {
  public:
    ZoneQuadrature(const GiantAtomSpec& a, const GiantAtomSpec& b, int grid_size) : n_(grid_size), a_(a), b_(b) {
        if (grid_size < 64 || grid_size % 2 != 0)
            throw PreconditionError("self energy: grid_size must be even and >= 64");
        kx_.resize(static_cast<std::size_t>(n_));
        ky_.resize(static_cast<std::size_t>(n_));
        for (int i = 0; i < n_; ++i) {
            kx_[static_cast<std::size_t>(i)] = -pi + 2.0 * pi * (i + 0.5) / n_;
            ky_[static_cast<std::size_t>(i)] = -pi + 2.0 * pi * i / n_;
        }
        tables(a_, ex_a_, ey_a_);
        tables(b_, ex_b_, ey_b_);
    }

    /// Mean over the grid of kernel(F_a F_b*, cos kx + cos ky). Rows are summed
    /// independently and combined in order, so the result is thread-count independent.
    template <class Kernel>
    cplx mean(Kernel kernel) const {
        std::vector<cplx> rows(static_cast<std::size_t>(n_));
        parallel_for(n_, [&](int j) {
            std::vector<cplx> fa(static_cast<std::size_t>(n_)), fb(static_cast<std::size_t>(n_));
            row(a_, ex_a_, ey_a_, j, fa);
            const bool same = &a_ == &b_;
            if (!same) row(b_, ex_b_, ey_b_, j, fb);
            cplx acc{0.0, 0.0};
            const double cy = std::cos(ky_[static_cast<std::size_t>(j)]);
            for (int i = 0; i < n_; ++i) {
                const auto ii = static_cast<std::size_t>(i);
                const cplx num = same ? cplx{std::norm(fa[ii]), 0.0} : fa[ii] * std::conj(fb[ii]);
                acc += kernel(num, std::cos(kx_[ii]) + cy);
            }
            rows[static_cast<std::size_t>(j)] = acc;
        });
        cplx total{0.0, 0.0};
        for (const auto& r : rows) total += r;
        return total / (static_cast<double>(n_) * static_cast<double>(n_));
    }

  private:
    void tables(const GiantAtomSpec& atom, std::vector<cplx>& ex, std::vector<cplx>& ey) const {
        const auto n = static_cast<std::size_t>(n_);
        ex.resize(atom.points.size() * n);
        ey.resize(atom.points.size() * n);
        for (std::size_t p = 0; p < atom.points.size(); ++p)
            for (std::size_t i = 0; i < n; ++i) {
                ex[p * n + i] = std::polar(1.0, -kx_[i] * atom.points[p].position.x);
                ey[p * n + i] = std::polar(1.0, -ky_[i] * atom.points[p].position.y);
            }
    }

    void row(const GiantAtomSpec& atom, const std::vector<cplx>& ex, const std::vector<cplx>& ey, int j,
             std::vector<cplx>& out) const {
        const auto n = static_cast<std::size_t>(n_);
        std::fill(out.begin(), out.end(), cplx{0.0, 0.0});
        for (std::size_t p = 0; p < atom.points.size(); ++p) {
            const cplx wy = atom.points[p].strength * ey[p * n + static_cast<std::size_t>(j)];
            const cplx* px = &ex[p * n];
            for (std::size_t i = 0; i < n; ++i) out[i] += wy * px[i];
        }
    }

    int n_;
    const GiantAtomSpec& a_;
    const GiantAtomSpec& b_;
    std::vector<double> kx_, ky_;
    std::vector<cplx> ex_a_, ey_a_, ex_b_, ey_b_;
};

inline double coupling_scale(const GiantAtomSpec& a, const GiantAtomSpec& b) {
    double sa = 0.0, sb = 0.0;
    for (const auto& p : a.points) sa += std::abs(p.strength);
    for (const auto& p : b.points) sb += std::abs(p.strength);
    return sa * sb;
}

}  // namespace detail

/// Sigma_ab(z) = (1/N_k^2) sum_k F_a(k) F_b*(k) / (z - omega(k)).
/// Pass the same atom twice for a single atom's self-energy.
inline cplx self_energy(const GiantAtomSpec& atom_a, const GiantAtomSpec& atom_b, cplx z, int grid_size, double J) {
    detail::ZoneQuadrature q(atom_a, atom_b, grid_size);
    const double tiny = 1e-12 * std::max(1e-300, detail::coupling_scale(atom_a, atom_b));
    bool singular = false;
    const cplx v = q.mean([&](cplx num, double cos_sum) {
        const cplx den = z + 2.0 * J * cos_sum;
        if (std::abs(den) < 1e-12) {
            if (std::abs(num) > tiny) singular = true;
            return cplx{0.0, 0.0};
        }
        return num / den;
    });
    if (singular) throw SingularityError("self energy: probe energy lies on a sampled mode with nonzero coupling");
    return v;
}

/// dSigma_ab/dz = -(1/N_k^2) sum_k F_a F_b* / (z - omega)^2.
inline cplx self_energy_derivative(const GiantAtomSpec& atom_a, const GiantAtomSpec& atom_b, cplx z, int grid_size,
                                   double J) {
    detail::ZoneQuadrature q(atom_a, atom_b, grid_size);
    const double tiny = 1e-12 * std::max(1e-300, detail::coupling_scale(atom_a, atom_b));
    bool singular = false;
    const cplx v = q.mean([&](cplx num, double cos_sum) {
        const cplx den = z + 2.0 * J * cos_sum;
        if (std::abs(den) < 1e-12) {
            if (std::abs(num) > tiny) singular = true;
            return cplx{0.0, 0.0};
        }
        return -num / (den * den);
    });
    if (singular) throw SingularityError("self energy derivative: probe energy lies on a sampled mode");
    return v;
}

inline SelfEnergyReport self_energy_report(const GiantAtomSpec& atom, cplx z, int grid_size, double J) {
    return {z, self_energy(atom, atom, z, grid_size, J), self_energy_derivative(atom, atom, z, grid_size, J), grid_size};
}

/// -dSigma/dz at z = 0 for a perfectly subradiant atom, by quadrature of |F|^2 / omega^2.
inline double self_energy_derivative_band_center(const GiantAtomSpec& atom, int grid_size, double J) {
    if (!is_perfectly_subradiant(atom))
        throw PreconditionError("self energy derivative: atom is not perfectly subradiant (integrand diverges)");
    detail::ZoneQuadrature q(atom, atom, grid_size);
    const cplx v = q.mean([J](cplx num, double cos_sum) {
        const double w = 2.0 * J * cos_sum;
        return num / (w * w);
    });
    return v.real();
}

/// Closed form for an odd diagonal rectangle: (g/J)^2 (2n+ + 1)(2n- + 1).
inline double band_center_derivative_closed_form(const DiagonalRectangle& rect, double J) {
    const double r = rect.strength / J;
    return r * r * rect.extent_plus * rect.extent_minus;
}

/// |C_e(inf)|^2 = 1 / (1 + s)^2 with s = -dSigma/dz at the band center.
inline double steady_state_population(const GiantAtomSpec& atom, double J, int grid_size = 1024) {
    if (atom.detuning != 0.0) throw PreconditionError("steady state population: atom must be at the band center");
    if (!is_perfectly_subradiant(atom)) throw PreconditionError("steady state population: atom is not perfectly subradiant");
    double s = 0.0;
    if (auto rect = as_rectangle(atom))
        s = band_center_derivative_closed_form(*rect, J);
    else
        s = self_energy_derivative_band_center(atom, grid_size, J);
    return 1.0 / ((1.0 + s) * (1.0 + s));
}

/// Zero-energy eigenstate alpha |e> + sum_n beta_n |n> of a single subradiant atom.
struct DressedState {
    cplx atom_weight;
    std::map<Site, cplx> bic_weights;

    double norm2() const {
        double s = std::norm(atom_weight);
        for (const auto& [site, w] : bic_weights) s += std::norm(w);
        return s;
    }
};

/// Finds the zero-energy eigenvector of H restricted to {atom} + bic_support(atom).
///
/// The restriction keeps all rows H couples the subspace to (support, its neighbours and
/// the coupling cavities), so a vanishing singular value means an exact eigenvector of the
/// full Hamiltonian rather than of a truncated block.
inline DressedState dressed_state(const GiantAtomSpec& atom, double J) {
    if (atom.detuning != 0.0) throw PreconditionError("dressed state: atom must be at the band center");
    const BicSupport support = bic_support(atom);

    std::vector<Site> columns;
    for (const auto& [site, w] : support.weights) columns.push_back(site);
    std::map<Site, double> coupling;
    for (const auto& p : atom.points) coupling[p.position] += p.strength;

    std::set<Site> row_sites(columns.begin(), columns.end());
    for (const auto& s : columns)
        for (Site d : {Site{1, 0}, Site{-1, 0}, Site{0, 1}, Site{0, -1}}) row_sites.insert(s + d);
    for (const auto& [s, g] : coupling) row_sites.insert(s);

    const Eigen::Index cols = static_cast<Eigen::Index>(columns.size()) + 1;
    const Eigen::Index rows = static_cast<Eigen::Index>(row_sites.size()) + 1;
    Eigen::MatrixXd h = Eigen::MatrixXd::Zero(rows, cols);
    std::map<Site, Eigen::Index> col_of;
    for (std::size_t c = 0; c < columns.size(); ++c) col_of[columns[c]] = static_cast<Eigen::Index>(c) + 1;

    h(0, 0) = atom.detuning;
    for (const auto& [s, g] : coupling)
        if (auto it = col_of.find(s); it != col_of.end()) h(0, it->second) = g;
    Eigen::Index r = 1;
    for (const auto& s : row_sites) {
        if (auto it = coupling.find(s); it != coupling.end()) h(r, 0) = it->second;
        for (Site d : {Site{1, 0}, Site{-1, 0}, Site{0, 1}, Site{0, -1}})
            if (auto it = col_of.find(s + d); it != col_of.end()) h(r, it->second) = -J;
        ++r;
    }

    Eigen::JacobiSVD<Eigen::MatrixXd> svd(h, Eigen::ComputeFullV);
    const auto& sv = svd.singularValues();
    const double scale = std::max(J, h.cwiseAbs().maxCoeff());
    if (sv(sv.size() - 1) > 1e-10 * scale)
        throw PreconditionError("dressed state: restricted Hamiltonian has no zero eigenvalue (smallest singular value " +
                                std::to_string(sv(sv.size() - 1)) + ")");
    Eigen::VectorXd v = svd.matrixV().col(cols - 1);
    if (std::abs(v(0)) < 1e-12) throw PreconditionError("dressed state: zero mode has no atomic component");
    v /= v.norm();
    if (v(0) < 0) v = -v;

    DressedState out{cplx{v(0), 0.0}, {}};
    for (std::size_t c = 0; c < columns.size(); ++c)
        out.bic_weights.emplace(columns[c], cplx{v(static_cast<Eigen::Index>(c) + 1), 0.0});
    return out;
}

/// Interference between two concentric 4-point subsets of one atom.
struct InterferenceFactor {
    int xi = 0;
    int overlap_plus = 0;
    int overlap_minus = 0;
};

/// Closed-form interference for two equal-strength odd rectangles sharing a center:
/// overlaps 2 min(n_a, n_b) + 1 per diagonal, sign (-1)^(n+_a + n+_b + n-_a + n-_b).
/// The cross term is -dSigma_int/dz = xi * 2 (g/J)^2 * overlap_plus * overlap_minus.
inline InterferenceFactor interference_factor(const GiantAtomSpec& subset_a, const GiantAtomSpec& subset_b) {
    const auto ra = as_rectangle(subset_a);
    const auto rb = as_rectangle(subset_b);
    if (!ra || !rb || !ra->odd() || !rb->odd())
        throw PreconditionError("interference factor: both subsets must be equal-strength subradiant rectangles");
    if (ra->center != rb->center)
        throw PreconditionError("interference factor: subsets are not concentric; use self-energy quadrature");
    if (std::abs(ra->strength - rb->strength) > 1e-12 * std::abs(ra->strength))
        throw PreconditionError("interference factor: subsets must share one coupling strength");
    const int parity = ra->n_plus() + rb->n_plus() + ra->n_minus() + rb->n_minus();
    return {parity % 2 == 0 ? 1 : -1, 2 * std::min(ra->n_plus(), rb->n_plus()) + 1,
            2 * std::min(ra->n_minus(), rb->n_minus()) + 1};
}

/// Splits an 8-point atom into two equal-strength subradiant rectangles, if possible.
inline std::optional<std::pair<GiantAtomSpec, GiantAtomSpec>> split_rectangle_pair(const GiantAtomSpec& atom) {
    if (atom.points.size() != 8) return std::nullopt;
    // choose the subset containing point 0: C(7,3) = 35 candidates
    for (int mask = 0; mask < 256; ++mask) {
        if (!(mask & 1) || std::popcount(static_cast<unsigned>(mask)) != 4) continue;
        GiantAtomSpec a{atom.detuning, {}}, b{atom.detuning, {}};
        for (int p = 0; p < 8; ++p) ((mask >> p) & 1 ? a : b).points.push_back(atom.points[static_cast<std::size_t>(p)]);
        const auto ra = as_rectangle(a);
        const auto rb = as_rectangle(b);
        if (ra && rb && ra->odd() && rb->odd()) return std::make_pair(a, b);
    }
    return std::nullopt;
}

/// Buildup time tau = (2 max(n+, n-) + 1) / (2J).
inline double buildup_time(int n_plus, int n_minus, double J) {
    if (!(J > 0.0)) throw PreconditionError("buildup time: J must be positive");
    return (2.0 * std::max(n_plus, n_minus) + 1.0) / (2.0 * J);
}

}  // namespace ga2d
