#pragma once

#include <algorithm>
#include <atomic>
#include <cmath>
#include <filesystem>
#include <optional>
#include <ostream>
#include <sstream>
#include <string>
#include <thread>
#include <vector>

#include "ga2d/config_io.hpp"
#include "ga2d/evolver.hpp"
#include "ga2d/geometry.hpp"
#include "ga2d/oracle.hpp"
#include "ga2d/output.hpp"
#include "ga2d/presets.hpp"
#include "ga2d/spectral.hpp"

namespace ga2d {

/// Process exit codes shared by every subcommand.
enum ExitCode : int { exit_ok = 0, exit_validation = 1, exit_io = 2 };

namespace detail {

/// Runs `body` and maps the library's exceptions onto exit codes.
template <class Body>
int guarded(std::ostream& err, Body&& body) {
    try {
        return body();
    } catch (const IoError& e) {
        err << "error: " << e.what() << "\n";
        return exit_io;
    } catch (const GuardError& e) {
        err << "error: " << e.what() << "\n";
        return exit_io;
    } catch (const ConfigError& e) {
        err << "invalid config: " << e.what() << "\n";
        return exit_validation;
    } catch (const PreconditionError& e) {
        err << "error: " << e.what() << "\n";
        return exit_validation;
    } catch (const std::exception& e) {
        err << "error: " << e.what() << "\n";
        return exit_io;
    }
}

inline std::string fmt(double v, int digits = 6) {
    std::ostringstream ss;
    ss.precision(digits);
    ss << v;
    return ss.str();
}

inline std::string pairs_text(const std::vector<std::pair<int, int>>& pairs) {
    if (pairs.empty()) return "none";
    std::string s;
    for (const auto& [i, j] : pairs) s += (s.empty() ? "" : " ") + ("(" + std::to_string(i) + "," + std::to_string(j) + ")");
    return s;
}

}  // namespace detail

/// Runs one configuration and writes its outputs. `out_dir` overrides outputs.dir when set.
inline int cmd_simulate(const std::string& config_path, const std::string& out_dir, std::ostream& out, std::ostream& err) {
    return detail::guarded(err, [&] {
        const RunConfig rc = load_run_config(config_path);
        const std::filesystem::path dir = out_dir.empty() ? std::filesystem::path(rc.output_dir) : std::filesystem::path(out_dir);
        const SystemState init = initial_state(rc.system, rc.initial);
        const EvolutionResult result = evolve(rc.system, init, rc.evolution);
        write_run_outputs(dir, rc, result);
        out << config_path << ": " << result.series.samples() << " samples, " << result.snapshots.size()
            << " snapshots -> " << dir.string() << "\n";
        if (result.wrap_warning)
            err << "warning: t_max exceeds the wrap-around time " << detail::fmt(result.wrap_time) << " (recorded in run_meta.json)\n";
        return static_cast<int>(exit_ok);
    });
}

/// Runs several configurations on up to `jobs` workers. With more than one config each run
/// writes to <out_dir>/<config stem> when out_dir is given. Returns the largest exit code.
inline int cmd_simulate_many(const std::vector<std::string>& configs, const std::string& out_dir, int jobs,
                             std::ostream& out, std::ostream& err) {
    std::vector<int> codes(configs.size(), exit_ok);
    std::vector<std::string> outs(configs.size()), errs(configs.size());
    std::atomic<std::size_t> next{0};
    const auto worker = [&] {
        for (std::size_t i; (i = next.fetch_add(1)) < configs.size();) {
            std::string dir = out_dir;
            if (!dir.empty() && configs.size() > 1)
                dir = (std::filesystem::path(out_dir) / std::filesystem::path(configs[i]).stem()).string();
            std::ostringstream o, e;
            codes[i] = cmd_simulate(configs[i], dir, o, e);
            outs[i] = o.str();
            errs[i] = e.str();
        }
    };
    jobs = std::clamp(jobs, 1, std::max(1, static_cast<int>(configs.size())));
    {
        std::vector<std::jthread> pool;
        for (int w = 1; w < jobs; ++w) pool.emplace_back(worker);
        worker();
    }
    int worst = exit_ok;
    for (std::size_t i = 0; i < configs.size(); ++i) {
        out << outs[i];
        err << errs[i];
        worst = std::max(worst, codes[i]);
    }
    return worst;
}

/// Prints resolvent predictions per atom. Fails with exit 1 naming the first non-subradiant atom.
inline int cmd_predict(const std::string& config_path, std::ostream& out, std::ostream& err) {
    return detail::guarded(err, [&] {
        const RunConfig rc = load_run_config(config_path);
        const double J = rc.system.lattice.J;
        for (std::size_t i = 0; i < rc.system.atoms.size(); ++i)
            if (!is_perfectly_subradiant(rc.system.atoms[i]))
                throw PreconditionError("atom " + std::to_string(i) + " is not perfectly subradiant at the band center");
        for (std::size_t i = 0; i < rc.system.atoms.size(); ++i) {
            const auto& atom = rc.system.atoms[i];
            const BicSupport support = bic_support(atom);
            double s = 0.0;
            if (auto rect = as_rectangle(atom))
                s = band_center_derivative_closed_form(*rect, J);
            else
                s = self_energy_derivative_band_center(atom, 1024, J);
            const DressedState dressed = dressed_state(atom, J);
            out << "atom " << i << ":\n";
            out << "  -dSigma/dz(0)   = " << detail::fmt(s, 10) << "\n";
            out << "  plateau         = " << detail::fmt(1.0 / ((1.0 + s) * (1.0 + s)), 10) << "\n";
            out << "  BIC peaks       = " << support.size() << "\n";
            out << "  dressed alpha   = " << detail::fmt(dressed.atom_weight.real(), 10) << "\n";
            for (const auto& [site, w] : dressed.bic_weights)
                out << "  dressed beta " << to_string(site) << " = " << detail::fmt(w.real(), 10) << "\n";
            if (auto split = split_rectangle_pair(atom)) {
                const auto& [a, b] = *split;
                try {
                    const auto f = interference_factor(a, b);
                    out << "  interference    : xi = " << (f.xi > 0 ? "+1" : "-1") << ", overlap+ = " << f.overlap_plus
                        << ", overlap- = " << f.overlap_minus << "\n";
                } catch (const PreconditionError&) {
                    const double cross = 2.0 * std::real(-self_energy_derivative(a, b, 0.0, 1024, J));
                    out << "  interference    : non-concentric subsets, cross term = " << detail::fmt(cross, 6) << "\n";
                }
            }
        }
        return static_cast<int>(exit_ok);
    });
}

/// Prints subradiance verdicts and the DFI pair list. Verdicts never change the exit code.
inline int cmd_check(const std::string& config_path, std::ostream& out, std::ostream& err) {
    return detail::guarded(err, [&] {
        const RunConfig rc = load_run_config(config_path);
        int bad = -1;
        for (std::size_t i = 0; i < rc.system.atoms.size(); ++i) {
            const bool sub = is_perfectly_subradiant(rc.system.atoms[i]);
            out << "atom " << i << ": " << (sub ? "perfectly subradiant" : "not subradiant") << "\n";
            if (!sub && bad < 0) bad = static_cast<int>(i);
        }
        if (bad >= 0)
            out << "DFI pairs: undefined (atom " << bad << " is not subradiant)\n";
        else
            out << "DFI pairs: " << detail::pairs_text(dfi_pairs(rc.system)) << "\n";
        return static_cast<int>(exit_ok);
    });
}

/// Writes a preset as a RunConfig (to `out_path`, or to `out` when empty). Notes go to `err`.
inline int cmd_preset(const std::string& name, const std::string& out_path, const PresetOverrides& over, std::ostream& out,
                      std::ostream& err) {
    return detail::guarded(err, [&] {
        const Preset p = preset(name, over);
        const std::string text = dump_run_config(run_config_from_preset(p, "out/" + name));
        if (out_path.empty())
            out << text;
        else
            write_file(out_path, text);
        err << name << ": " << p.description << "\n";
        for (const auto& n : p.notes) err << "  note: " << n << " (chosen here)\n";
        return static_cast<int>(exit_ok);
    });
}

/// Result of comparing the split-operator evolution against exact diagonalisation.
struct OracleComparison {
    std::vector<double> dts;
    std::vector<double> errors;
    std::optional<double> order;  // least-squares slope of log error vs log dt
};

inline OracleComparison oracle_compare(const RunConfig& rc, const std::vector<double>& dts) {
    check_dense_guard(rc.system.lattice);
    if (dts.empty()) throw ConfigError("oracle-compare: empty dt list");
    const SystemState init = initial_state(rc.system, rc.initial);
    const ExactPropagator exact(build_dense(rc.system));
    OracleComparison cmp;
    for (double dt : dts) {
        EvolutionParams p = rc.evolution;
        p.dt = dt;
        p.snapshot_times.clear();
        p.validate(rc.system.lattice.J);
        const auto steps = p.steps();
        const SystemState approx = propagate(rc.system, init, dt, steps);
        cmp.dts.push_back(dt);
        cmp.errors.push_back(max_abs_difference(approx, exact.evolve(init, static_cast<double>(steps) * dt)));
    }
    if (dts.size() >= 2) {
        double mx = 0.0, my = 0.0;
        for (std::size_t i = 0; i < dts.size(); ++i) {
            mx += std::log(cmp.dts[i]);
            my += std::log(cmp.errors[i]);
        }
        mx /= static_cast<double>(dts.size());
        my /= static_cast<double>(dts.size());
        double sxy = 0.0, sxx = 0.0;
        for (std::size_t i = 0; i < dts.size(); ++i) {
            const double dx = std::log(cmp.dts[i]) - mx;
            sxy += dx * (std::log(cmp.errors[i]) - my);
            sxx += dx * dx;
        }
        if (sxx > 0.0) cmp.order = sxy / sxx;
    }
    return cmp;
}

/// Prints the error table; exit 0 iff the fitted order lies in [1.8, 2.2] (or only one dt given).
inline int cmd_oracle_compare(const std::string& config_path, const std::vector<double>& dts, std::ostream& out,
                              std::ostream& err) {
    return detail::guarded(err, [&] {
        const RunConfig rc = load_run_config(config_path);
        const OracleComparison cmp = oracle_compare(rc, dts);
        out << "dt\tmax_abs_error\n";
        for (std::size_t i = 0; i < cmp.dts.size(); ++i) out << format_number(cmp.dts[i]) << "\t" << format_number(cmp.errors[i]) << "\n";
        if (!cmp.order) {
            out << "order: not reported (need at least two dt values)\n";
            return static_cast<int>(exit_ok);
        }
        out << "order: " << detail::fmt(*cmp.order, 4) << "\n";
        if (*cmp.order < 1.8 || *cmp.order > 2.2) {
            err << "convergence order outside [1.8, 2.2]\n";
            return static_cast<int>(exit_validation);
        }
        return static_cast<int>(exit_ok);
    });
}

}  // namespace ga2d
