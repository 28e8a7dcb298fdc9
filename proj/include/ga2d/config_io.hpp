#pragma once

#include <json.hpp>

#include <fstream>
#include <set>
#include <sstream>
#include <string>
#include <vector>

#include "ga2d/atoms.hpp"
#include "ga2d/core.hpp"
#include "ga2d/evolver.hpp"
#include "ga2d/presets.hpp"

namespace ga2d {

/// Everything a `simulate` run needs.
struct RunConfig {
    SystemConfig system;
    InitialSpec initial;
    EvolutionParams evolution;
    std::string output_dir = "out";
};

namespace detail {

using nlohmann::json;

inline void check_keys(const json& j, const std::string& path, std::initializer_list<const char*> allowed) {
    if (!j.is_object()) throw ConfigError(path + ": expected an object");
    const std::set<std::string> ok(allowed.begin(), allowed.end());
    for (const auto& [k, v] : j.items())
        if (!ok.contains(k)) throw ConfigError(path + "." + k + ": unknown field");
}

inline const json& require(const json& j, const std::string& path, const char* key) {
    if (!j.contains(key)) throw ConfigError(path + "." + key + ": missing field");
    return j.at(key);
}

inline double number(const json& j, const std::string& path) {
    if (!j.is_number()) throw ConfigError(path + ": expected a number");
    return j.get<double>();
}

inline int integer(const json& j, const std::string& path) {
    if (!j.is_number_integer()) throw ConfigError(path + ": expected an integer");
    const auto v = j.get<long long>();
    if (v < -(1LL << 31) || v >= (1LL << 31)) throw ConfigError(path + ": integer out of range");
    return static_cast<int>(v);
}

inline const json& array(const json& j, const std::string& path) {
    if (!j.is_array()) throw ConfigError(path + ": expected an array");
    return j;
}

inline json complex_json(cplx c) { return json::array({c.real(), c.imag()}); }

inline cplx complex_value(const json& j, const std::string& path) {
    if (!j.is_array() || j.size() != 2) throw ConfigError(path + ": expected [re, im]");
    return {number(j[0], path + "[0]"), number(j[1], path + "[1]")};
}

}  // namespace detail

/// Parses a RunConfig. Structural problems throw ConfigError with the offending field path,
/// e.g. "atoms[1].points[0].g: expected a number". Invariant violations of the resulting
/// system (shared cavities, positions outside the lattice, ...) also throw ConfigError.
inline RunConfig parse_run_config(const nlohmann::json& root) {
    using namespace detail;
    check_keys(root, "$", {"lattice", "atoms", "initial", "evolution", "outputs"});
    RunConfig rc;

    const json& lat = require(root, "$", "lattice");
    check_keys(lat, "lattice", {"N", "J"});
    rc.system.lattice.N = integer(require(lat, "lattice", "N"), "lattice.N");
    rc.system.lattice.J = lat.contains("J") ? number(lat.at("J"), "lattice.J") : 1.0;

    const json& atoms = array(require(root, "$", "atoms"), "atoms");
    for (std::size_t i = 0; i < atoms.size(); ++i) {
        const std::string ap = "atoms[" + std::to_string(i) + "]";
        check_keys(atoms[i], ap, {"detuning", "points"});
        GiantAtomSpec atom;
        atom.detuning = atoms[i].contains("detuning") ? number(atoms[i].at("detuning"), ap + ".detuning") : 0.0;
        const json& pts = array(require(atoms[i], ap, "points"), ap + ".points");
        for (std::size_t p = 0; p < pts.size(); ++p) {
            const std::string pp = ap + ".points[" + std::to_string(p) + "]";
            check_keys(pts[p], pp, {"x", "y", "g"});
            atom.points.push_back({{integer(require(pts[p], pp, "x"), pp + ".x"), integer(require(pts[p], pp, "y"), pp + ".y")},
                                   number(require(pts[p], pp, "g"), pp + ".g")});
        }
        rc.system.atoms.push_back(std::move(atom));
    }
    rc.system.validate();

    if (root.contains("initial")) {
        const json& in = root.at("initial");
        check_keys(in, "initial", {"kind", "atom", "atoms", "field"});
        const json& kind = require(in, "initial", "kind");
        if (!kind.is_string()) throw ConfigError("initial.kind: expected a string");
        const auto k = kind.get<std::string>();
        if (k == "bare_excited")
            rc.initial.kind = InitialSpec::Kind::bare_excited;
        else if (k == "dressed")
            rc.initial.kind = InitialSpec::Kind::dressed;
        else if (k == "custom")
            rc.initial.kind = InitialSpec::Kind::custom;
        else
            throw ConfigError("initial.kind: expected bare_excited, dressed or custom");
        if (in.contains("atom")) {
            const int a = integer(in.at("atom"), "initial.atom");
            if (a < 0 || static_cast<std::size_t>(a) >= rc.system.atoms.size())
                throw ConfigError("initial.atom: index out of range");
            rc.initial.atom = static_cast<std::size_t>(a);
        } else if (rc.initial.kind != InitialSpec::Kind::custom && rc.system.atoms.empty()) {
            throw ConfigError("initial.atom: configuration has no atoms");
        }
        if (rc.initial.kind == InitialSpec::Kind::custom) {
            SystemState s(rc.system.atoms.size(), rc.system.lattice);
            if (in.contains("atoms")) {
                const json& a = array(in.at("atoms"), "initial.atoms");
                if (a.size() != s.atoms.size()) throw ConfigError("initial.atoms: expected one entry per atom");
                for (std::size_t i = 0; i < a.size(); ++i)
                    s.atoms[i] = complex_value(a[i], "initial.atoms[" + std::to_string(i) + "]");
            }
            if (in.contains("field")) {
                const json& f = array(in.at("field"), "initial.field");
                for (std::size_t i = 0; i < f.size(); ++i) {
                    const std::string fp = "initial.field[" + std::to_string(i) + "]";
                    check_keys(f[i], fp, {"x", "y", "amplitude"});
                    const Site site{integer(require(f[i], fp, "x"), fp + ".x"), integer(require(f[i], fp, "y"), fp + ".y")};
                    if (!rc.system.lattice.contains(site)) throw ConfigError(fp + ": position outside the lattice");
                    s.field[rc.system.lattice.index(site)] += complex_value(require(f[i], fp, "amplitude"), fp + ".amplitude");
                }
            }
            if (!(s.norm() > 0.0)) throw ConfigError("initial: custom amplitudes are all zero");
            rc.initial.amplitudes = std::move(s);
        }
    } else if (rc.system.atoms.empty()) {
        throw ConfigError("initial: required when the configuration has no atoms");
    }

    if (root.contains("evolution")) {
        const json& ev = root.at("evolution");
        check_keys(ev, "evolution", {"dt", "t_max", "record_stride", "snapshot_times"});
        if (ev.contains("dt")) rc.evolution.dt = number(ev.at("dt"), "evolution.dt");
        if (ev.contains("t_max")) rc.evolution.t_max = number(ev.at("t_max"), "evolution.t_max");
        if (ev.contains("record_stride")) rc.evolution.record_stride = integer(ev.at("record_stride"), "evolution.record_stride");
        if (ev.contains("snapshot_times")) {
            const json& st = array(ev.at("snapshot_times"), "evolution.snapshot_times");
            for (std::size_t i = 0; i < st.size(); ++i)
                rc.evolution.snapshot_times.push_back(number(st[i], "evolution.snapshot_times[" + std::to_string(i) + "]"));
        }
    }
    rc.evolution.validate(rc.system.lattice.J);

    if (root.contains("outputs")) {
        const json& out = root.at("outputs");
        check_keys(out, "outputs", {"dir"});
        if (out.contains("dir")) {
            if (!out.at("dir").is_string()) throw ConfigError("outputs.dir: expected a string");
            rc.output_dir = out.at("dir").get<std::string>();
        }
    }
    return rc;
}

/// Parses RunConfig text. Malformed JSON throws IoError with the byte offset.
inline RunConfig parse_run_config(const std::string& text) {
    nlohmann::json root;
    try {
        root = nlohmann::json::parse(text);
    } catch (const nlohmann::json::parse_error& e) {
        throw IoError(std::string("malformed config: ") + e.what());
    }
    return parse_run_config(root);
}

inline std::string read_text_file(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw IoError("cannot open " + path);
    std::ostringstream ss;
    ss << in.rdbuf();
    if (in.bad()) throw IoError("error reading " + path);
    return ss.str();
}

inline RunConfig load_run_config(const std::string& path) { return parse_run_config(read_text_file(path)); }

inline nlohmann::json to_json(const SystemConfig& config) {
    nlohmann::json atoms = nlohmann::json::array();
    for (const auto& a : config.atoms) {
        nlohmann::json pts = nlohmann::json::array();
        for (const auto& p : a.points) pts.push_back({{"x", p.position.x}, {"y", p.position.y}, {"g", p.strength}});
        atoms.push_back({{"detuning", a.detuning}, {"points", pts}});
    }
    return {{"lattice", {{"N", config.lattice.N}, {"J", config.lattice.J}}}, {"atoms", atoms}};
}

inline nlohmann::json to_json(const RunConfig& rc) {
    nlohmann::json j = to_json(rc.system);
    nlohmann::json in{{"kind", to_string(rc.initial.kind)}};
    if (rc.initial.kind == InitialSpec::Kind::custom) {
        if (!rc.initial.amplitudes) throw ConfigError("initial: custom kind needs amplitudes");
        const SystemState& s = *rc.initial.amplitudes;
        nlohmann::json atoms = nlohmann::json::array();
        for (const auto& c : s.atoms) atoms.push_back(detail::complex_json(c));
        nlohmann::json field = nlohmann::json::array();
        for (std::size_t i = 0; i < s.field.size(); ++i) {
            if (s.field[i] == cplx{0.0, 0.0}) continue;
            const Site site = rc.system.lattice.site(i);
            field.push_back({{"x", site.x}, {"y", site.y}, {"amplitude", detail::complex_json(s.field[i])}});
        }
        in["atoms"] = atoms;
        in["field"] = field;
    } else {
        in["atom"] = rc.initial.atom;
    }
    j["initial"] = in;
    j["evolution"] = {{"dt", rc.evolution.dt},
                      {"t_max", rc.evolution.t_max},
                      {"record_stride", rc.evolution.record_stride},
                      {"snapshot_times", rc.evolution.snapshot_times}};
    j["outputs"] = {{"dir", rc.output_dir}};
    return j;
}

inline std::string dump_run_config(const RunConfig& rc) { return to_json(rc).dump(2) + "\n"; }

inline RunConfig run_config_from_preset(const Preset& p, const std::string& output_dir = "out") {
    return {p.config, p.initial, p.params, output_dir};
}

}  // namespace ga2d
