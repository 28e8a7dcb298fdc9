#pragma once

#include <cmath>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "ga2d/atoms.hpp"
#include "ga2d/core.hpp"
#include "ga2d/evolver.hpp"
#include "ga2d/geometry.hpp"

namespace ga2d {

/// A named configuration together with a sensible run setup.
struct Preset {
    std::string name;
    std::string description;
    SystemConfig config;
    InitialSpec initial;
    EvolutionParams params;
    double g = 0.0;
    std::vector<std::string> notes;  // values chosen here rather than taken from a reference figure
    std::optional<std::vector<std::pair<int, int>>> expected_dfi;
};

struct PresetOverrides {
    std::optional<int> N;
    std::optional<double> g;
};

inline const std::vector<std::string>& preset_names() {
    static const std::vector<std::string> names{
        "single4_1x1",     "single4_3x1",  "single8_constructive", "single8_destructive", "single8_none",
        "merged6",         "merged7",      "pair_braided",         "pair_separate",       "pair_nested",
        "chain7_loose",    "chain7_tight", "triad_all_to_all",     "grid9"};
    return names;
}

namespace detail {

/// Rectangle in the diagonal frame: center (u+, u-) and half-extents.
struct DiagRect {
    int cu, cv, a, b;
};

inline std::vector<CouplingPoint> rect_points(const DiagRect& r, double g, Site shift) {
    std::vector<CouplingPoint> out;
    for (const auto& s : diagonal_rectangle_sites({r.cu, r.cv}, r.a, r.b)) out.push_back({s + shift, g});
    return out;
}

inline GiantAtomSpec atom_from_rects(std::initializer_list<DiagRect> rects, double g, Site shift) {
    std::vector<CouplingPoint> pts;
    for (const auto& r : rects) {
        auto p = rect_points(r, g, shift);
        pts.insert(pts.end(), p.begin(), p.end());
    }
    return make_atom(0.0, pts);
}

}  // namespace detail

/// Builds a catalog configuration, centered on the lattice. Unknown names throw ConfigError.
inline Preset preset(const std::string& name, const PresetOverrides& over = {}) {
    using detail::atom_from_rects;
    struct Defaults {
        int N;
        double g;
        double t_max;
        int stride;
    };
    Defaults d{100, 0.2, 40.0, 10};
    std::vector<std::string> notes{"coupling strength g/J not given by the reference figure"};
    std::optional<std::vector<std::pair<int, int>>> dfi;

    if (name == "single4_1x1" || name == "single4_3x1" || name == "merged6" || name == "merged7") {
    } else if (name.starts_with("single8_")) {
        d = {200, 0.2, 40.0, 10};
    } else if (name == "pair_braided") {
        d = {200, 0.2, 200.0, 20};
        dfi = std::vector<std::pair<int, int>>{{0, 1}};
    } else if (name == "pair_separate" || name == "pair_nested") {
        d = {200, 0.2, 200.0, 20};
        dfi = std::vector<std::pair<int, int>>{};
    } else if (name == "chain7_loose" || name == "chain7_tight") {
        d = {200, 0.2, 150.0, 20};
        dfi = std::vector<std::pair<int, int>>{{0, 1}, {0, 2}, {1, 3}, {2, 3}, {3, 4}, {3, 5}, {4, 6}, {5, 6}};
    } else if (name == "triad_all_to_all") {
        d = {250, 0.2, 150.0, 20};
        dfi = std::vector<std::pair<int, int>>{{0, 1}, {0, 2}, {1, 2}};
    } else if (name == "grid9") {
        d = {200, 0.2, 100.0, 20};
        dfi = std::vector<std::pair<int, int>>{{0, 1}, {0, 3}, {1, 2}, {1, 4}, {2, 5}, {3, 4},
                                               {3, 6}, {4, 5}, {4, 7}, {5, 8}, {6, 7}, {7, 8}};
    } else {
        throw ConfigError("unknown preset: " + name);
    }

    Preset p;
    p.name = name;
    p.g = over.g.value_or(d.g);
    const int N = over.N.value_or(d.N);
    const double g = p.g;
    if (!(g != 0.0) || !std::isfinite(g)) throw ConfigError("preset: g must be finite and nonzero");
    const Site c{N / 2, N / 2};
    p.config.lattice = {N, 1.0};
    p.params = {0.01, d.t_max, d.stride, {}};
    p.expected_dfi = dfi;
    auto& atoms = p.config.atoms;

    if (name == "single4_1x1") {
        p.description = "four points around a single enclosed cavity";
        atoms.push_back(atom_from_rects({{0, 0, 1, 1}}, g, c));
    } else if (name == "single4_3x1") {
        p.description = "four points spanning three enclosed cavities along (1,1)";
        atoms.push_back(atom_from_rects({{0, 0, 3, 1}}, g, c));
    } else if (name == "single8_constructive") {
        p.description = "concentric 3x1 and 1x3 subsets, in-phase bound-state overlap";
        atoms.push_back(atom_from_rects({{0, 0, 3, 1}, {0, 0, 1, 3}}, g, c));
    } else if (name == "single8_destructive") {
        p.description = "concentric 3x1 and 1x1 subsets, out-of-phase bound-state overlap";
        atoms.push_back(atom_from_rects({{0, 0, 3, 1}, {0, 0, 1, 1}}, g, c));
    } else if (name == "single8_none") {
        p.description = "3x1 and 1x3 subsets with disjoint bound-state supports";
        atoms.push_back(atom_from_rects({{0, 0, 3, 1}, {5, 5, 1, 3}}, g, c));
        notes.push_back("offset of the second subset chosen so that the supports are disjoint");
    } else if (name == "merged6" || name == "merged7") {
        p.description = name == "merged6" ? "two 1x1 subsets sharing two points" : "two 1x1 subsets sharing one point";
        const double g1 = 0.5 * g;
        std::vector<CouplingPoint> pts = detail::rect_points({0, 0, 1, 1}, g1, c);
        const auto second = name == "merged6" ? detail::rect_points({2, 0, 1, 1}, g, c)
                                              : detail::rect_points({2, 2, 1, 1}, g, c);
        pts.insert(pts.end(), second.begin(), second.end());
        atoms.push_back(make_atom(0.0, pts));
        notes.push_back("subset strengths g1 = g/2 and g2 = g");
    } else if (name == "pair_braided") {
        p.description = "two 1x1 atoms, each with one point on the other's bound state";
        atoms.push_back(atom_from_rects({{0, 0, 1, 1}}, g, c));
        atoms.push_back(atom_from_rects({{1, 1, 1, 1}}, g, c));
    } else if (name == "pair_separate") {
        p.description = "two 1x1 atoms with no point on each other's bound state";
        atoms.push_back(atom_from_rects({{0, 0, 1, 1}}, g, c));
        atoms.push_back(atom_from_rects({{6, 6, 1, 1}}, g, c));
        notes.push_back("separation of the two atoms");
    } else if (name == "pair_nested") {
        p.description = "a 1x1 atom with all points on the bound state of a 5x5 atom";
        atoms.push_back(atom_from_rects({{0, 0, 5, 5}}, g, c));
        atoms.push_back(atom_from_rects({{1, 1, 1, 1}}, g, c));
    } else if (name == "chain7_loose" || name == "chain7_tight") {
        const bool loose = name == "chain7_loose";
        p.description = loose ? "seven atoms, 5x3 connectors between 3x3 hubs" : "seven atoms, 3x3 connectors between 3x3 hubs";
        const int D = loose ? 14 : 10;
        const int a = loose ? 5 : 3;
        const Site shift{c.x - D / 2, c.y - D / 2};
        atoms.push_back(atom_from_rects({{0, 0, 3, 3}}, g, shift));
        atoms.push_back(atom_from_rects({{D / 2, 1, a, 3}}, g, shift));
        atoms.push_back(atom_from_rects({{D / 2, -1, a, 3}}, g, shift));
        atoms.push_back(atom_from_rects({{D, 0, 3, 3}}, g, shift));
        atoms.push_back(atom_from_rects({{3 * D / 2, 1, a, 3}}, g, shift));
        atoms.push_back(atom_from_rects({{3 * D / 2, -1, a, 3}}, g, shift));
        atoms.push_back(atom_from_rects({{2 * D, 0, 3, 3}}, g, shift));
        notes.push_back("connector geometry chosen so that only consecutive atoms share bound-state sites");
    } else if (name == "triad_all_to_all") {
        p.description = "three 8-point atoms, every pair braided";
        atoms.push_back(atom_from_rects({{-6, 4, 3, 1}, {-1, -3, 3, 3}}, g, c));
        atoms.push_back(atom_from_rects({{0, -6, 3, 1}, {-5, 3, 3, 3}}, g, c));
        atoms.push_back(atom_from_rects({{0, 0, 3, 1}, {1, -3, 3, 1}}, g, c));
        notes.push_back("layout found by search over pairs of 3x1, 1x3 and 3x3 subsets");
    } else if (name == "grid9") {
        p.description = "3x3 grid of 3x3 atoms, nearest neighbours braided";
        const Site shift{c.x - 5, c.y - 5};
        for (int r = 0; r < 3; ++r)
            for (int col = 0; col < 3; ++col) atoms.push_back(atom_from_rects({{(col + r) * 5, (col - r) * 5, 3, 3}}, g, shift));
    }
    const bool sized_by_figure = !(name.starts_with("merged") || name.starts_with("chain7") || name == "grid9");
    if (!over.N && !sized_by_figure) notes.push_back("lattice size");
    p.notes = std::move(notes);
    p.config.validate();
    return p;
}

}  // namespace ga2d
