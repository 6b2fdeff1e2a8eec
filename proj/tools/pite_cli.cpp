// pite: command-line driver for the PITE statevector emulator.
//
//   pite solve     --config c.json --out DIR [--reference KIND]
//   pite sweep     --config c.json --out DIR --sweep pite.dtau=0.002,0.001 [--threads N]
//   pite compare   --config c.json --out DIR
//   pite decompose --config c.json --out DIR
//   pite system    --config c.json --out DIR
//   pite funcs     --out DIR [--ymax 1 --points 200 --m0 0.9]
//
// Exit codes: 0 ok, 2 config error, 3 numerical abort.

#include <CLI11.hpp>

#include <atomic>
#include <filesystem>
#include <iostream>
#include <mutex>
#include <sstream>
#include <thread>

#include "pite/harness.hpp"
#include "pite/postproc.hpp"

namespace fs = std::filesystem;
using namespace pite;

namespace {

constexpr int kOk = 0, kConfigError = 2, kAbort = 3;

struct Common {
    std::string config;
    std::string out = "out";
    std::string reference;
    std::vector<std::string> sweep;
    unsigned threads = 0;
};

RunConfig load(const Common& c) {
    if (c.config.empty()) throw ConfigError("--config is required");
    RunConfig cfg = load_config(c.config);
    if (!c.reference.empty()) cfg = with_override(cfg, "reference.kind", "\"" + c.reference + "\"");
    return cfg;
}

int cmd_solve(const Common& c) {
    const RunConfig cfg = load(c);
    const auto out = solve(cfg);
    write_solve(c.out, cfg, out);
    std::cout << cfg.name << ": P = " << out.run.success_prob() << " (log10 " << out.run.log10_success_prob()
              << "), " << out.run.steps.size() << " steps -> " << c.out << "\n";
    for (const auto& w : out.run.warnings) std::cerr << "warning: " << w << "\n";
    return kOk;
}

std::vector<std::string> split(const std::string& s, char sep) {
    std::vector<std::string> out;
    std::stringstream ss(s);
    std::string part;
    while (std::getline(ss, part, sep)) out.push_back(part);
    return out;
}

int cmd_sweep(const Common& c) {
    const RunConfig base = load(c);
    if (c.sweep.size() != 1) throw ConfigError("sweep needs exactly one --sweep FIELD=v1,v2,...");
    const auto eq = c.sweep[0].find('=');
    if (eq == std::string::npos) throw ConfigError("--sweep expects FIELD=v1,v2,...");
    const std::string field = c.sweep[0].substr(0, eq);
    const auto values = split(c.sweep[0].substr(eq + 1), ',');
    if (values.empty()) throw ConfigError("--sweep has no values");

    std::vector<RunConfig> cfgs;
    for (const auto& v : values) cfgs.push_back(with_override(base, field, v));

    std::vector<SolveOutput> outs(cfgs.size());
    std::vector<std::exception_ptr> errs(cfgs.size());
    std::atomic<std::size_t> next{0};
    const unsigned hw = std::max(1u, std::thread::hardware_concurrency());
    const unsigned nt = std::min<unsigned>(c.threads ? c.threads : hw, static_cast<unsigned>(cfgs.size()));
    auto worker = [&] {
        for (std::size_t i; (i = next++) < cfgs.size();) {
            try {
                outs[i] = solve(cfgs[i]);
            } catch (...) {
                errs[i] = std::current_exception();
            }
        }
    };
    std::vector<std::thread> pool;
    for (unsigned t = 0; t < nt; ++t) pool.emplace_back(worker);
    for (auto& t : pool) t.join();
    for (auto& e : errs)
        if (e) std::rethrow_exception(e);

    fs::create_directories(c.out);
    std::vector<Metric> all;
    for (std::size_t i = 0; i < cfgs.size(); ++i) {
        write_solve(fs::path(c.out) / ("sweep_" + std::to_string(i)), cfgs[i], outs[i]);
        for (auto m : outs[i].metrics) {
            m.series = field + "=" + values[i];
            all.push_back(m);
        }
        std::cout << field << "=" << values[i] << ": P = " << outs[i].run.success_prob() << "\n";
    }
    write_metrics_csv(fs::path(c.out) / "metrics.csv", all);
    nlohmann::json summary = {{"field", field}, {"values", values}};
    write_manifest(fs::path(c.out) / "manifest.json", base, "sweep", all, summary, {});
    return kOk;
}

int cmd_compare(const Common& c) {
    const RunConfig cfg = load(c);
    const auto rows = compare(cfg);
    fs::create_directories(c.out);
    write_compare_csv(fs::path(c.out) / "metrics.csv", rows);
    nlohmann::json summary = nlohmann::json::array();
    for (const auto& r : rows)
        if (std::abs(r.t - cfg.time.T) < 1e-12) {
            summary.push_back({{"method", r.method}, {"success_prob", r.success_prob},
                               {"log10_success_prob", r.log10_success_prob}});
            std::cout << r.method << ": log10 P = " << r.log10_success_prob << "\n";
        }
    write_manifest(fs::path(c.out) / "manifest.json", cfg, "compare", {}, summary, {});
    return kOk;
}

int cmd_decompose(const Common& c) {
    const RunConfig cfg = load(c);
    const auto d = error_decomposition(cfg);
    std::vector<Metric> all;
    for (const auto* v : {&d.discretization, &d.trotter, &d.approximation, &d.slopes})
        all.insert(all.end(), v->begin(), v->end());
    fs::create_directories(c.out);
    write_metrics_csv(fs::path(c.out) / "metrics.csv", all);
    nlohmann::json summary = nlohmann::json::object();
    for (const auto& s : d.slopes) {
        summary[s.series] = s.value;
        std::cout << "slope " << s.series << " = " << s.value << "\n";
    }
    write_manifest(fs::path(c.out) / "manifest.json", cfg, "decompose", all, summary, {});
    return kOk;
}

int cmd_system(const Common& c) {
    const RunConfig cfg = load(c);
    const auto res = run_system(cfg);
    const auto& g = cfg.system->grid;
    fs::create_directories(c.out);
    write_probability_csv(fs::path(c.out) / "probability.csv", res);
    auto write_fields = [&](const std::string& tag, const CVec& u) {
        for (std::size_t s = 0; s < 2; ++s) {
            const CVec blk(u.begin() + static_cast<std::ptrdiff_t>(s * g.size()),
                           u.begin() + static_cast<std::ptrdiff_t>((s + 1) * g.size()));
            write_solution_csv(fs::path(c.out) / ("solution_" + tag + "_u" + std::to_string(s + 1) + ".csv"), blk,
                               g.d, g.N(), g.L);
        }
    };
    for (const auto& s : res.snapshots) write_fields("t" + format_time(s.t), s.fields);
    write_fields("final", grid_solution(res.final));
    std::vector<Metric> ms;
    Metric m;
    m.kind = "success_prob";
    m.value = res.final.success_prob();
    m.t = cfg.system->T;
    m.dtau = cfg.system->dtau;
    m.N = static_cast<int>(g.N());
    m.variant = to_string(cfg.pite.variant);
    m.series = to_string(cfg.system->params.model);
    ms.push_back(m);
    m.kind = "log10_success_prob";
    m.value = res.log10_success_prob();
    ms.push_back(m);
    write_metrics_csv(fs::path(c.out) / "metrics.csv", ms);
    nlohmann::json summary = {{"model", to_string(cfg.system->params.model)},
                              {"success_prob", res.final.success_prob()},
                              {"log10_success_prob", res.log10_success_prob()},
                              {"steps", res.steps.size()}};
    write_manifest(fs::path(c.out) / "manifest.json", cfg, "system", ms, summary, {});
    std::cout << to_string(cfg.system->params.model) << ": log10 P = " << res.log10_success_prob() << "\n";
    return kOk;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"PITE statevector emulator and experiment harness"};
    app.require_subcommand(1);
    Common c;
    double ymax = 1.0, m0 = 0.9;
    int points = 200;

    auto add_common = [&](CLI::App* s, bool needs_config) {
        auto* o = s->add_option("--config", c.config, "experiment config (JSON)");
        if (needs_config) o->required();
        s->add_option("--out", c.out, "output directory");
        s->add_option("--reference", c.reference, "reference kind: none|analytic|dense|exact_pite|fdm|hhl");
        s->add_option("--threads", c.threads, "worker threads for sweeps");
    };
    auto* solve_cmd = app.add_subcommand("solve", "run one configuration");
    add_common(solve_cmd, true);
    auto* sweep_cmd = app.add_subcommand("sweep", "vary one field over a list of values");
    add_common(sweep_cmd, true);
    sweep_cmd->add_option("--sweep", c.sweep, "FIELD=v1,v2,...")->required();
    auto* compare_cmd = app.add_subcommand("compare", "aapite / apite / vs_apite / hhl / fdm / analytic side by side");
    add_common(compare_cmd, true);
    auto* decompose_cmd = app.add_subcommand("decompose", "discretization / Trotter / approximation errors");
    add_common(decompose_cmd, true);
    auto* system_cmd = app.add_subcommand("system", "coupled two-species models");
    add_common(system_cmd, true);
    auto* funcs_cmd = app.add_subcommand("funcs", "tabulate the underlying scalar functions");
    funcs_cmd->add_option("--out", c.out, "output directory");
    funcs_cmd->add_option("--ymax", ymax, "largest y");
    funcs_cmd->add_option("--points", points, "number of rows");
    funcs_cmd->add_option("--m0", m0, "m0 of the oap column");

    try {
        app.parse(argc, argv);
    } catch (const CLI::CallForHelp& e) {
        return app.exit(e);
    } catch (const CLI::ParseError& e) {
        app.exit(e);
        return kConfigError;
    }

    try {
        if (*solve_cmd) return cmd_solve(c);
        if (*sweep_cmd) return cmd_sweep(c);
        if (*compare_cmd) return cmd_compare(c);
        if (*decompose_cmd) return cmd_decompose(c);
        if (*system_cmd) return cmd_system(c);
        if (*funcs_cmd) {
            const auto rows = funcs_table(ymax, points, m0);
            fs::create_directories(c.out);
            write_funcs_csv(fs::path(c.out) / "funcs.csv", rows, m0);
            std::cout << rows.size() << " rows -> " << (fs::path(c.out) / "funcs.csv").string() << "\n";
            return kOk;
        }
    } catch (const ConfigError& e) {
        std::cerr << "config error: " << e.what() << "\n";
        return kConfigError;
    } catch (const NumericalAbort& e) {
        std::cerr << "numerical abort: " << e.what() << "\n";
        return kAbort;
    } catch (const std::filesystem::filesystem_error& e) {
        std::cerr << "config error: " << e.what() << "\n";
        return kConfigError;
    }
    return kOk;
}
