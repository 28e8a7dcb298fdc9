#pragma once

#include <json.hpp>

#include <bit>
#include <cstdint>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <string>
#include <vector>

#include "ga2d/config_io.hpp"
#include "ga2d/core.hpp"
#include "ga2d/evolver.hpp"
#include "ga2d/timeseries.hpp"

namespace ga2d {

#ifndef GA2D_VERSION
#define GA2D_VERSION "unknown"
#endif

inline constexpr std::uint32_t snapshot_format_version = 1;

inline std::string format_number(double v) {
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.12g", v);
    return buf;
}

/// CSV text: t, atom_pop_<i>..., region_pop_<name>..., bath_norm.
inline std::string timeseries_csv(const TimeSeries& ts) {
    std::string out = "t";
    for (std::size_t i = 0; i < ts.atom_populations.size(); ++i) out += ",atom_pop_" + std::to_string(i);
    for (const auto& name : ts.region_names) out += ",region_pop_" + name;
    out += ",bath_norm\n";
    for (std::size_t s = 0; s < ts.samples(); ++s) {
        out += format_number(ts.times[s]);
        for (const auto& a : ts.atom_populations) out += "," + format_number(a[s]);
        for (const auto& r : ts.region_populations) out += "," + format_number(r[s]);
        out += "," + format_number(ts.bath_norm[s]) + "\n";
    }
    return out;
}

inline void write_file(const std::filesystem::path& path, const std::string& bytes) {
    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    if (!out) throw IoError("cannot open " + path.string() + " for writing");
    out.write(bytes.data(), static_cast<std::streamsize>(bytes.size()));
    if (!out) throw IoError("error writing " + path.string());
}

namespace detail {

inline void put_le(std::string& buf, std::uint64_t v, int bytes) {
    for (int b = 0; b < bytes; ++b) buf.push_back(static_cast<char>((v >> (8 * b)) & 0xffu));
}

inline std::uint64_t get_le(const std::string& buf, std::size_t& pos, int bytes) {
    if (pos + static_cast<std::size_t>(bytes) > buf.size()) throw IoError("snapshot: truncated file");
    std::uint64_t v = 0;
    for (int b = 0; b < bytes; ++b) v |= static_cast<std::uint64_t>(static_cast<unsigned char>(buf[pos++])) << (8 * b);
    return v;
}

}  // namespace detail

/// Little-endian: "GA2D", u32 version, u32 N, f64 t, N*N f64 |psi|^2 row-major.
inline std::string encode_snapshot(const Snapshot& s) {
    if (s.grid.size() != static_cast<std::size_t>(s.N) * static_cast<std::size_t>(s.N))
        throw ConfigError("snapshot: grid size does not match N");
    std::string buf = "GA2D";
    buf.reserve(20 + 8 * s.grid.size());
    detail::put_le(buf, snapshot_format_version, 4);
    detail::put_le(buf, static_cast<std::uint32_t>(s.N), 4);
    detail::put_le(buf, std::bit_cast<std::uint64_t>(s.t), 8);
    for (double v : s.grid) detail::put_le(buf, std::bit_cast<std::uint64_t>(v), 8);
    return buf;
}

inline Snapshot decode_snapshot(const std::string& buf) {
    if (buf.size() < 4 || buf.compare(0, 4, "GA2D") != 0) throw IoError("snapshot: bad magic");
    std::size_t pos = 4;
    const auto version = detail::get_le(buf, pos, 4);
    if (version != snapshot_format_version) throw IoError("snapshot: unsupported version " + std::to_string(version));
    Snapshot s;
    s.N = static_cast<int>(detail::get_le(buf, pos, 4));
    s.t = std::bit_cast<double>(detail::get_le(buf, pos, 8));
    const std::size_t n = static_cast<std::size_t>(s.N) * static_cast<std::size_t>(s.N);
    if (buf.size() != pos + 8 * n) throw IoError("snapshot: size does not match N");
    s.grid.resize(n);
    for (auto& v : s.grid) v = std::bit_cast<double>(detail::get_le(buf, pos, 8));
    return s;
}

inline std::string snapshot_filename(std::size_t index) {
    char buf[32];
    std::snprintf(buf, sizeof buf, "snapshot_%03zu.bin", index);
    return buf;
}

/// Metadata echoed next to the outputs. Contains no timestamps so reruns are byte-identical.
inline nlohmann::json run_meta(const RunConfig& rc, const EvolutionResult& result) {
    nlohmann::json snaps = nlohmann::json::array();
    for (std::size_t i = 0; i < result.snapshots.size(); ++i)
        snaps.push_back({{"file", snapshot_filename(i)}, {"t", result.snapshots[i].t}});
    nlohmann::json warnings = nlohmann::json::array();
    if (result.wrap_warning)
        warnings.push_back("t_max = " + format_number(rc.evolution.t_max) + " exceeds the wrap-around time " +
                           format_number(result.wrap_time) + "; late samples may include revivals from the periodic boundary");
    return {{"tool", "ga2d"},
            {"version", GA2D_VERSION},
            {"config", to_json(rc)},
            {"wrap_time", result.wrap_time},
            {"wrap_warning", result.wrap_warning},
            {"warnings", warnings},
            {"regions", result.series.region_names},
            {"snapshots", snaps}};
}

/// Writes timeseries.csv, snapshot_NNN.bin and run_meta.json into `dir` (created if needed).
inline void write_run_outputs(const std::filesystem::path& dir, const RunConfig& rc, const EvolutionResult& result) {
    std::error_code ec;
    std::filesystem::create_directories(dir, ec);
    if (ec) throw IoError("cannot create " + dir.string() + ": " + ec.message());
    write_file(dir / "timeseries.csv", timeseries_csv(result.series));
    for (std::size_t i = 0; i < result.snapshots.size(); ++i)
        write_file(dir / snapshot_filename(i), encode_snapshot(result.snapshots[i]));
    write_file(dir / "run_meta.json", run_meta(rc, result).dump(2) + "\n");
}

}  // namespace ga2d
