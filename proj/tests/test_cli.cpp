#include <gtest/gtest.h>

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <regex>
#include <sstream>
#include <string>

#include "ga2d/commands.hpp"
#include "ga2d/spectral.hpp"

using namespace ga2d;
namespace fs = std::filesystem;

namespace {

fs::path scratch(const std::string& name) {
    const fs::path dir = fs::temp_directory_path() / ("ga2d_cli_test_" + name);
    fs::remove_all(dir);
    fs::create_directories(dir);
    return dir;
}

std::string slurp(const fs::path& p) {
    std::ifstream in(p, std::ios::binary);
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

fs::path write_preset(const fs::path& dir, const std::string& name, const PresetOverrides& over = {}) {
    const fs::path path = dir / (name + ".json");
    std::ostringstream out, err;
    EXPECT_EQ(cmd_preset(name, path.string(), over, out, err), 0) << err.str();
    return path;
}

fs::path write_text(const fs::path& path, const std::string& text) {
    std::ofstream(path, std::ios::binary) << text;
    return path;
}

struct CliResult {
    int code;
    std::string out;
    std::string err;
};

CliResult run_cli(const std::string& args, const fs::path& dir) {
    const fs::path o = dir / "stdout.txt", e = dir / "stderr.txt";
    const std::string cmd = std::string("\"") + GA2D_CLI_PATH + "\" " + args + " > \"" + o.string() + "\" 2> \"" + e.string() + "\"";
    const int status = std::system(cmd.c_str());
    const int code = WIFEXITED(status) ? WEXITSTATUS(status) : -1;
    return {code, slurp(o), slurp(e)};
}

double number_after(const std::string& text, const std::string& label) {
    const std::regex re(label + R"(\s*=\s*([-+0-9.eE]+))");
    std::smatch m;
    if (!std::regex_search(text, m, re)) throw std::runtime_error("missing " + label);
    return std::stod(m[1].str());
}

const char* shared_cavity_json = R"({
  "lattice": {"N": 10},
  "atoms": [
    {"points": [{"x": 1, "y": 1, "g": 0.1}, {"x": 2, "y": 2, "g": 0.1}]},
    {"points": [{"x": 1, "y": 1, "g": 0.1}, {"x": 4, "y": 4, "g": 0.1}]}
  ],
  "initial": {"kind": "bare_excited", "atom": 0}
})";

const char* small_atom_json = R"({
  "lattice": {"N": 20},
  "atoms": [{"points": [{"x": 10, "y": 9, "g": 0.2}, {"x": 11, "y": 10, "g": 0.2},
                        {"x": 10, "y": 11, "g": 0.2}, {"x": 9, "y": 10, "g": 0.2}]}],
  "initial": {"kind": "bare_excited", "atom": 0},
  "evolution": {"dt": 0.02, "t_max": 40, "record_stride": 25, "snapshot_times": [0, 5, 12.5]}
})";

}  // namespace

TEST(RunConfigFile, PresetRoundTrip) {
    for (const auto& name : preset_names()) {
        const Preset p = preset(name);
        const RunConfig rc = run_config_from_preset(p, "out/x");
        const RunConfig back = parse_run_config(dump_run_config(rc));
        EXPECT_EQ(back.system, p.config) << name;
        EXPECT_EQ(back.initial.kind, rc.initial.kind) << name;
        EXPECT_EQ(back.initial.atom, rc.initial.atom) << name;
        EXPECT_EQ(back.evolution.dt, rc.evolution.dt) << name;
        EXPECT_EQ(back.evolution.t_max, rc.evolution.t_max) << name;
        EXPECT_EQ(back.evolution.record_stride, rc.evolution.record_stride) << name;
        EXPECT_EQ(back.output_dir, "out/x");
        EXPECT_EQ(dump_run_config(back), dump_run_config(rc)) << name;
    }
}

TEST(RunConfigFile, CustomInitialRoundTrip) {
    RunConfig rc = run_config_from_preset(preset("single4_1x1", {.N = 8, .g = {}}));
    rc.initial.kind = InitialSpec::Kind::custom;
    SystemState s(1, rc.system.lattice);
    s.atoms[0] = {0.6, 0.0};
    s.field[rc.system.lattice.index({2, 3})] = {0.0, 0.8};
    rc.initial.amplitudes = s;
    const RunConfig back = parse_run_config(dump_run_config(rc));
    ASSERT_TRUE(back.initial.amplitudes.has_value());
    EXPECT_EQ(max_abs_difference(*back.initial.amplitudes, s), 0.0);
}

TEST(RunConfigFile, Diagnostics) {
    EXPECT_THROW(parse_run_config(std::string("{\"lattice\": ")), IoError);
    try {
        parse_run_config(std::string(shared_cavity_json));
        FAIL();
    } catch (const ConfigError& e) {
        EXPECT_NE(std::string(e.what()).find("cavity coupled to multiple atoms"), std::string::npos);
    }
    try {
        parse_run_config(std::string(R"({"lattice": {"N": 10}, "atoms": [], "extra": 1})"));
        FAIL();
    } catch (const ConfigError& e) {
        EXPECT_NE(std::string(e.what()).find("extra"), std::string::npos);
    }
    try {
        parse_run_config(std::string(R"({"lattice": {"N": 10}, "atoms": [{"points": [{"x": 1, "y": "a", "g": 0.1}]}]})"));
        FAIL();
    } catch (const ConfigError& e) {
        EXPECT_NE(std::string(e.what()).find("atoms[0].points[0].y"), std::string::npos);
    }
    EXPECT_THROW(parse_run_config(std::string(R"({"lattice": {"N": 10}, "atoms": [{"points": []}],
        "initial": {"kind": "bare_excited", "atom": 3}})")),
                 ConfigError);
}

TEST(Simulate, WritesOutputs) {
    const fs::path dir = scratch("simulate");
    const fs::path cfg = write_text(dir / "small.json", small_atom_json);
    std::ostringstream out, err;
    ASSERT_EQ(cmd_simulate(cfg.string(), (dir / "run").string(), out, err), 0) << err.str();

    const std::string csv = slurp(dir / "run" / "timeseries.csv");
    EXPECT_EQ(csv.substr(0, csv.find('\n')), "t,atom_pop_0,region_pop_bic_0,bath_norm");
    EXPECT_EQ(std::count(csv.begin(), csv.end(), '\n'), 1 + 81);

    const std::vector<double> times{0.0, 5.0, 12.5};
    for (std::size_t i = 0; i < 3; ++i) {
        const Snapshot s = decode_snapshot(slurp(dir / "run" / snapshot_filename(i)));
        EXPECT_EQ(s.N, 20);
        EXPECT_NEAR(s.t, times[i], 1e-12);
        double total = 0.0;
        for (double v : s.grid) total += v;
        EXPECT_LE(total, 1.0 + 1e-12);
        if (i == 0) EXPECT_EQ(total, 0.0);
    }
    EXPECT_FALSE(fs::exists(dir / "run" / snapshot_filename(3)));

    const auto meta = nlohmann::json::parse(slurp(dir / "run" / "run_meta.json"));
    EXPECT_EQ(meta.at("tool"), "ga2d");
    EXPECT_TRUE(meta.contains("version"));
    EXPECT_EQ(meta.at("config").at("lattice").at("N"), 20);
    EXPECT_EQ(meta.at("snapshots").size(), 3u);
}

TEST(Simulate, RegionColumnsForSubradiantAtoms) {
    const fs::path dir = scratch("regions");
    const fs::path cfg = write_preset(dir, "pair_braided", {.N = 16, .g = {}});
    RunConfig rc = load_run_config(cfg.string());
    rc.evolution.t_max = 1.0;
    write_text(cfg, dump_run_config(rc));
    std::ostringstream out, err;
    ASSERT_EQ(cmd_simulate(cfg.string(), (dir / "run").string(), out, err), 0) << err.str();
    const std::string csv = slurp(dir / "run" / "timeseries.csv");
    EXPECT_EQ(csv.substr(0, csv.find('\n')), "t,atom_pop_0,atom_pop_1,region_pop_bic_0,region_pop_bic_1,region_pop_bic_all,bath_norm");
}

TEST(Simulate, WrapWarningRecorded) {
    const fs::path dir = scratch("wrap");
    const fs::path cfg = write_text(dir / "small.json", small_atom_json);
    std::ostringstream out, err;
    ASSERT_EQ(cmd_simulate(cfg.string(), (dir / "run").string(), out, err), 0);
    const auto meta = nlohmann::json::parse(slurp(dir / "run" / "run_meta.json"));
    EXPECT_TRUE(meta.at("wrap_warning").get<bool>());
    EXPECT_LT(meta.at("wrap_time").get<double>(), 40.0);
    EXPECT_EQ(meta.at("warnings").size(), 1u);
    EXPECT_NE(err.str().find("wrap-around"), std::string::npos);
}

TEST(Simulate, RerunsAreByteIdentical) {
    const fs::path dir = scratch("rerun");
    const fs::path cfg = write_text(dir / "small.json", small_atom_json);
    std::ostringstream out, err;
    ASSERT_EQ(cmd_simulate(cfg.string(), (dir / "a").string(), out, err), 0);
    ASSERT_EQ(cmd_simulate(cfg.string(), (dir / "b").string(), out, err), 0);
    std::size_t files = 0;
    for (const auto& entry : fs::directory_iterator(dir / "a")) {
        EXPECT_EQ(slurp(entry.path()), slurp(dir / "b" / entry.path().filename())) << entry.path().filename();
        ++files;
    }
    EXPECT_EQ(files, 5u);
}

TEST(Simulate, FinalPopulationMatchesPrediction) {
    const fs::path dir = scratch("plateau");
    const fs::path cfg = write_preset(dir, "single4_1x1");
    std::ostringstream out, err;
    ASSERT_EQ(cmd_simulate(cfg.string(), (dir / "run").string(), out, err), 0) << err.str();
    std::istringstream csv(slurp(dir / "run" / "timeseries.csv"));
    std::string line, last;
    while (std::getline(csv, line))
        if (!line.empty()) last = line;
    const double final_pop = std::stod(last.substr(last.find(',') + 1));
    const double want = steady_state_population(preset("single4_1x1").config.atoms[0], 1.0);
    EXPECT_NEAR(final_pop / want, 1.0, 0.02);
}

TEST(Simulate, SharedCavityIsValidationError) {
    const fs::path dir = scratch("shared");
    const fs::path cfg = write_text(dir / "bad.json", shared_cavity_json);
    std::ostringstream out, err;
    EXPECT_EQ(cmd_simulate(cfg.string(), (dir / "run").string(), out, err), 1);
    EXPECT_NE(err.str().find("cavity coupled to multiple atoms"), std::string::npos);
}

TEST(Simulate, IoErrors) {
    const fs::path dir = scratch("io");
    std::ostringstream out, err;
    EXPECT_EQ(cmd_simulate((dir / "missing.json").string(), (dir / "run").string(), out, err), 2);
    const fs::path bad = write_text(dir / "bad.json", "{\"lattice\": {\"N\": 10},");
    EXPECT_EQ(cmd_simulate(bad.string(), (dir / "run").string(), out, err), 2);
    const fs::path cfg = write_text(dir / "small.json", small_atom_json);
    write_text(dir / "blocker", "x");
    EXPECT_EQ(cmd_simulate(cfg.string(), (dir / "blocker" / "run").string(), out, err), 2);
}

TEST(SimulateMany, SubdirectoryPerConfig) {
    const fs::path dir = scratch("many");
    const fs::path a = write_text(dir / "a.json", small_atom_json);
    const fs::path b = write_text(dir / "b.json", small_atom_json);
    std::ostringstream out, err;
    ASSERT_EQ(cmd_simulate_many({a.string(), b.string()}, (dir / "runs").string(), 2, out, err), 0);
    EXPECT_EQ(slurp(dir / "runs" / "a" / "timeseries.csv"), slurp(dir / "runs" / "b" / "timeseries.csv"));
    const fs::path bad = write_text(dir / "bad.json", shared_cavity_json);
    EXPECT_EQ(cmd_simulate_many({a.string(), bad.string()}, (dir / "runs2").string(), 2, out, err), 1);
}

TEST(Predict, SingleSubsetPlateau) {
    const fs::path dir = scratch("predict");
    const fs::path cfg = write_preset(dir, "single4_1x1", {.N = {}, .g = 0.1});
    std::ostringstream out, err;
    ASSERT_EQ(cmd_predict(cfg.string(), out, err), 0) << err.str();
    EXPECT_NEAR(number_after(out.str(), "plateau"), 0.980296, 5e-7);
    EXPECT_NEAR(number_after(out.str(), "-dSigma/dz\\(0\\)"), 0.01, 1e-12);
    EXPECT_NEAR(number_after(out.str(), "BIC peaks"), 1.0, 0.0);
}

TEST(Predict, DestructiveInterferenceReported) {
    const fs::path dir = scratch("predict8");
    std::ostringstream out, err;
    ASSERT_EQ(cmd_predict(write_preset(dir, "single8_destructive").string(), out, err), 0) << err.str();
    EXPECT_NE(out.str().find("xi = -1"), std::string::npos) << out.str();
    std::ostringstream out2;
    ASSERT_EQ(cmd_predict(write_preset(dir, "single8_constructive").string(), out2, err), 0);
    EXPECT_NE(out2.str().find("xi = +1"), std::string::npos) << out2.str();
}

TEST(Predict, NonSubradiantFails) {
    const fs::path dir = scratch("predict_bad");
    const fs::path cfg = write_text(dir / "even.json", R"({
      "lattice": {"N": 20},
      "atoms": [{"points": [{"x": 10, "y": 10, "g": 0.2}, {"x": 12, "y": 10, "g": 0.2}]}],
      "initial": {"kind": "bare_excited", "atom": 0}})");
    std::ostringstream out, err;
    EXPECT_EQ(cmd_predict(cfg.string(), out, err), 1);
    EXPECT_NE(err.str().find("atom 0"), std::string::npos);
}

TEST(Check, DfiPairLists) {
    const fs::path dir = scratch("check");
    const std::vector<std::pair<std::string, std::string>> cases{
        {"pair_braided", "DFI pairs: (0,1)\n"},
        {"pair_nested", "DFI pairs: none\n"},
        {"pair_separate", "DFI pairs: none\n"},
        {"grid9", "DFI pairs: (0,1) (0,3) (1,2) (1,4) (2,5) (3,4) (3,6) (4,5) (4,7) (5,8) (6,7) (7,8)\n"}};
    for (const auto& [name, want] : cases) {
        std::ostringstream out, err;
        ASSERT_EQ(cmd_check(write_preset(dir, name).string(), out, err), 0) << name;
        EXPECT_NE(out.str().find(want), std::string::npos) << name << "\n" << out.str();
    }
}

TEST(Check, VerdictsDoNotChangeExitCode) {
    const fs::path dir = scratch("check_bad");
    const fs::path cfg = write_text(dir / "even.json", R"({
      "lattice": {"N": 20},
      "atoms": [{"points": [{"x": 10, "y": 10, "g": 0.2}, {"x": 12, "y": 10, "g": 0.2}]}],
      "initial": {"kind": "bare_excited", "atom": 0}})");
    std::ostringstream out, err;
    EXPECT_EQ(cmd_check(cfg.string(), out, err), 0);
    EXPECT_NE(out.str().find("atom 0: not subradiant"), std::string::npos);
    const fs::path bad = write_text(dir / "bad.json", "[1, 2");
    EXPECT_EQ(cmd_check(bad.string(), out, err), 2);
}

TEST(OracleCompare, OrderAndGuard) {
    const fs::path dir = scratch("oracle");
    const fs::path cfg = write_preset(dir, "pair_braided", {.N = 12, .g = {}});
    RunConfig rc = load_run_config(cfg.string());
    rc.evolution.t_max = 10.0;
    write_text(cfg, dump_run_config(rc));

    std::ostringstream out, err;
    EXPECT_EQ(cmd_oracle_compare(cfg.string(), {0.02, 0.01, 0.005}, out, err), 0) << err.str();
    const auto pos = out.str().find("order: ");
    ASSERT_NE(pos, std::string::npos);
    EXPECT_NEAR(std::stod(out.str().substr(pos + 7)), 2.0, 0.2);

    std::ostringstream single;
    EXPECT_EQ(cmd_oracle_compare(cfg.string(), {0.01}, single, err), 0);
    EXPECT_NE(single.str().find("order: not reported"), std::string::npos);

    const fs::path big = write_preset(dir, "single4_1x1", {.N = 60, .g = {}});
    std::ostringstream out60, err60;
    EXPECT_EQ(cmd_oracle_compare(big.string(), {0.01, 0.005}, out60, err60), 2);
}

TEST(Binary, ExitCodes) {
    const fs::path dir = scratch("binary");
    const fs::path shared = write_text(dir / "shared.json", shared_cavity_json);
    CliResult r = run_cli("simulate --config \"" + shared.string() + "\" --out \"" + (dir / "run").string() + "\"", dir);
    EXPECT_EQ(r.code, 1);
    EXPECT_NE(r.err.find("cavity coupled to multiple atoms"), std::string::npos);

    const fs::path malformed = write_text(dir / "malformed.json", "{ nope");
    EXPECT_EQ(run_cli("check --config \"" + malformed.string() + "\"", dir).code, 2);

    r = run_cli("preset --name pair_braided --out \"" + (dir / "pair.json").string() + "\"", dir);
    ASSERT_EQ(r.code, 0) << r.err;
    r = run_cli("check --config \"" + (dir / "pair.json").string() + "\"", dir);
    EXPECT_EQ(r.code, 0);
    EXPECT_NE(r.out.find("DFI pairs: (0,1)"), std::string::npos);

    r = run_cli("preset --name single4_1x1 --n 60 --out \"" + (dir / "big.json").string() + "\"", dir);
    ASSERT_EQ(r.code, 0);
    EXPECT_EQ(run_cli("oracle-compare --config \"" + (dir / "big.json").string() + "\"", dir).code, 2);

    r = run_cli("preset --name single4_1x1 --n 12 --out \"" + (dir / "small.json").string() + "\"", dir);
    ASSERT_EQ(r.code, 0);
    r = run_cli("oracle-compare --config \"" + (dir / "small.json").string() + "\" --dt-list 0.01", dir);
    EXPECT_EQ(r.code, 0);
    EXPECT_NE(r.out.find("order: not reported"), std::string::npos);

    EXPECT_EQ(run_cli("preset --name no_such_preset", dir).code, 1);
    EXPECT_EQ(run_cli("frobnicate", dir).code, 2);
    r = run_cli("preset --list", dir);
    EXPECT_EQ(r.code, 0);
    EXPECT_NE(r.out.find("triad_all_to_all"), std::string::npos);
}
