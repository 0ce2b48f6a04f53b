#include <filesystem>
#include <fstream>
#include <iostream>
#include <sstream>

#include <CLI11.hpp>
#include <json.hpp>

#include "mcsim/audit.hpp"
#include "mcsim/engine.hpp"
#include "mcsim/scenario.hpp"

namespace fs = std::filesystem;
using nlohmann::json;

namespace {

constexpr const char* kVersion = "mcsim 0.1.0";

struct CommonOpts {
    std::string scenario = "abilene";
    std::string out_dir = "out";
    std::string policy;
    double lambda_mbps = -1.0;
    double V = -1.0;
    long slots = -1;
    long seed = -1;
    int sample_every = -1;
    int replications = 1;
};

void add_common(CLI::App* cmd, CommonOpts& o, bool with_lambda = true) {
    cmd->add_option("--scenario", o.scenario, "built-in name or scenario/manifest JSON path");
    cmd->add_option("--out", o.out_dir, "output directory");
    cmd->add_option("--policy", o.policy, "multicast | unicast | randomized");
    if (with_lambda) cmd->add_option("--lambda", o.lambda_mbps, "arrival rate per stream, Mbps");
    cmd->add_option("--V", o.V, "drift-plus-penalty control parameter");
    cmd->add_option("--slots", o.slots, "horizon in slots");
    cmd->add_option("--seed", o.seed, "RNG seed");
    cmd->add_option("--sample-every", o.sample_every, "metrics sampling period in slots");
}

mcsim::ScenarioConfig resolve_with_overrides(const CommonOpts& o) {
    mcsim::ScenarioConfig config = mcsim::resolve_scenario(o.scenario);
    if (!o.policy.empty()) config.policy = o.policy;
    if (o.lambda_mbps >= 0) config.lambda_mbps = o.lambda_mbps;
    if (o.V >= 0) config.V = o.V;
    if (o.slots >= 0) config.slots = o.slots;
    if (o.seed >= 0) config.seed = static_cast<std::uint64_t>(o.seed);
    if (o.sample_every > 0) config.sample_every = o.sample_every;
    mcsim::parse_policy(config.policy);  // validate early
    return config;
}

void write_manifest(const fs::path& dir, const std::string& command,
                    const mcsim::ScenarioConfig& config, const json& extra = {}) {
    json manifest;
    manifest["tool"] = kVersion;
    manifest["command"] = command;
    manifest["config_hash"] = mcsim::scenario_hash(config);
    manifest["scenario"] = json::parse(mcsim::scenario_to_json(config));
    if (!extra.is_null()) manifest["details"] = extra;
    std::ofstream out(dir / "manifest.json");
    out << manifest.dump(2) << '\n';
}

std::string fmt(double v) {
    if (v == mcsim::kInfBacklog) return "inf";
    std::ostringstream s;
    s.precision(12);
    s << v;
    return s.str();
}

std::vector<double> parse_grid(const std::string& spec) {
    std::vector<double> grid;
    if (spec.find(':') != std::string::npos) {
        double lo = 0, hi = 0, step = 0;
        char c1 = 0, c2 = 0;
        std::istringstream ss(spec);
        ss >> lo >> c1 >> hi >> c2 >> step;
        if (!ss || c1 != ':' || c2 != ':' || step <= 0)
            throw std::invalid_argument("bad grid spec, expected lo:hi:step");
        for (double v = lo; v <= hi + 1e-9; v += step) grid.push_back(v);
    } else {
        std::istringstream ss(spec);
        std::string tok;
        while (std::getline(ss, tok, ',')) grid.push_back(std::stod(tok));
    }
    if (grid.empty()) throw std::invalid_argument("empty grid");
    return grid;
}

int cmd_run(const CommonOpts& o, const std::string& ledger_path) {
    const mcsim::ScenarioConfig config = resolve_with_overrides(o);
    const mcsim::NetworkModel model = mcsim::build_network(config);
    mcsim::RunParams params = mcsim::RunParams::from_model(model);

    mcsim::Ledger ledger;
    if (!ledger_path.empty()) params.ledger = &ledger;

    const mcsim::RunResult result = mcsim::run(model, params);

    fs::create_directories(o.out_dir);
    {
        std::ofstream csv(fs::path(o.out_dir) / "timeline.csv");
        csv << "slot,backlog_total,cost,delivered,dummy\n";
        csv.precision(12);
        for (const auto& s : result.timeline)
            csv << s.slot << ',' << s.backlog_total << ',' << s.cost << ',' << s.delivered << ','
                << s.dummy << '\n';
    }
    json summary;
    summary["avg_backlog"] = result.avg_backlog;
    summary["avg_cost_per_s"] = result.avg_cost;
    summary["total_delivered"] = result.total_delivered;
    summary["total_dummy"] = result.total_dummy;
    summary["stable"] = result.stability.verdict == mcsim::Stability::Stable;
    summary["stable_backlog"] = fmt(result.stability.stable_backlog);
    {
        std::ofstream out(fs::path(o.out_dir) / "summary.json");
        out << summary.dump(2) << '\n';
    }
    if (!ledger_path.empty()) mcsim::write_ledger_csv(ledger_path, ledger);
    write_manifest(o.out_dir, "run", config);

    std::cout << "policy=" << config.policy << " lambda=" << config.lambda_mbps
              << "Mbps V=" << config.V << " slots=" << config.slots << '\n'
              << "avg_backlog=" << result.avg_backlog << " avg_cost_per_s=" << result.avg_cost
              << " stable=" << (result.stability.verdict == mcsim::Stability::Stable ? "yes" : "no")
              << '\n';
    return 0;
}

int cmd_sweep_lambda(const CommonOpts& o, const std::string& grid_spec) {
    const mcsim::ScenarioConfig config = resolve_with_overrides(o);
    const mcsim::NetworkModel model = mcsim::build_network(config);
    mcsim::RunParams base = mcsim::RunParams::from_model(model);
    base.replications = std::max(1, o.replications);

    std::vector<double> grid_mbps = parse_grid(grid_spec);
    std::vector<double> grid_pps;
    for (double m : grid_mbps) grid_pps.push_back(model.mbps_to_pps(m));

    const mcsim::LambdaSweep sweep = mcsim::sweep_lambda(model, grid_pps, base);

    fs::create_directories(o.out_dir);
    {
        std::ofstream csv(fs::path(o.out_dir) / "sweep_lambda.csv");
        csv << "lambda_mbps,verdict,avg_backlog,avg_cost\n";
        for (std::size_t i = 0; i < sweep.points.size(); ++i) {
            const auto& p = sweep.points[i];
            csv << grid_mbps[i] << ','
                << (p.verdict == mcsim::Stability::Stable ? "stable" : "unstable") << ','
                << fmt(p.avg_backlog) << ',' << fmt(p.avg_cost) << '\n';
        }
    }
    {
        std::ofstream csv(fs::path(o.out_dir) /
                          ("series_lambda_backlog_" + config.policy + ".csv"));
        csv << "lambda_mbps,stable_backlog\n";
        for (std::size_t i = 0; i < sweep.points.size(); ++i)
            csv << grid_mbps[i] << ',' << fmt(sweep.points[i].avg_backlog) << '\n';
    }
    json details;
    details["boundary_mbps"] =
        sweep.boundary_pps ? json(model.pps_to_mbps(*sweep.boundary_pps)) : json();
    details["warnings"] = sweep.warnings;
    write_manifest(o.out_dir, "sweep-lambda", config, details);

    for (const auto& w : sweep.warnings) std::cerr << "warning: " << w << '\n';
    if (sweep.boundary_pps)
        std::cout << "boundary=" << model.pps_to_mbps(*sweep.boundary_pps) << " Mbps\n";
    else
        std::cout << "boundary=none (no stable grid point)\n";
    return 0;
}

int cmd_sweep_v(const CommonOpts& o, const std::string& grid_spec) {
    const mcsim::ScenarioConfig config = resolve_with_overrides(o);
    const mcsim::NetworkModel model = mcsim::build_network(config);
    mcsim::RunParams base = mcsim::RunParams::from_model(model);
    base.replications = std::max(1, o.replications);

    const std::vector<double> v_grid = parse_grid(grid_spec);
    const auto points = mcsim::sweep_v(model, v_grid, base.lambda_pps, base);

    fs::create_directories(o.out_dir);
    {
        std::ofstream csv(fs::path(o.out_dir) / "sweep_v.csv");
        csv << "V,avg_backlog,avg_cost,stable\n";
        for (const auto& p : points)
            csv << p.V << ',' << fmt(p.avg_backlog) << ',' << fmt(p.avg_cost) << ','
                << (p.verdict == mcsim::Stability::Stable ? "yes" : "no") << '\n';
    }
    {
        std::ofstream b(fs::path(o.out_dir) / "series_v_backlog.csv");
        std::ofstream c(fs::path(o.out_dir) / "series_v_cost.csv");
        b << "V,avg_backlog\n";
        c << "V,avg_cost\n";
        for (const auto& p : points) {
            b << p.V << ',' << fmt(p.avg_backlog) << '\n';
            c << p.V << ',' << fmt(p.avg_cost) << '\n';
        }
    }
    write_manifest(o.out_dir, "sweep-v", config);
    for (const auto& p : points)
        if (p.verdict == mcsim::Stability::Unstable)
            std::cerr << "warning: unstable run at V=" << p.V << '\n';
    std::cout << "wrote " << points.size() << " V-sweep rows to " << o.out_dir << '\n';
    return 0;
}

int cmd_audit(const CommonOpts& o, const std::string& ledger_path) {
    const mcsim::ScenarioConfig config = resolve_with_overrides(o);
    const mcsim::NetworkModel model = mcsim::build_network(config);
    const mcsim::Ledger ledger = mcsim::read_ledger_csv(ledger_path);

    mcsim::AuditReport report = mcsim::check_capacity(model, ledger);
    const mcsim::AuditReport conservation = mcsim::check_conservation(model, ledger);
    report.checks.insert(report.checks.end(), conservation.checks.begin(),
                         conservation.checks.end());

    fs::create_directories(o.out_dir);
    std::ofstream out(fs::path(o.out_dir) / "audit_report.txt");
    out << report.to_string();
    std::cout << report.to_string();
    write_manifest(o.out_dir, "audit", config);
    return report.pass() ? 0 : 1;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Time-slotted simulator for multicast service-chain control"};
    app.set_version_flag("--version", kVersion);
    app.require_subcommand(1);

    CommonOpts opts;
    std::string grid;
    std::string ledger_path;

    CLI::App* run_cmd = app.add_subcommand("run", "simulate one scenario");
    add_common(run_cmd, opts);
    run_cmd->add_option("--ledger", ledger_path, "write the per-slot ledger CSV to this path");

    CLI::App* sweep_l = app.add_subcommand("sweep-lambda", "capacity-region sweep over lambda");
    add_common(sweep_l, opts, false);
    sweep_l->add_option("--grid", grid, "Mbps grid: comma list or lo:hi:step")->required();
    sweep_l->add_option("--reps", opts.replications, "replications per grid point (majority verdict)");

    CLI::App* sweep_vv = app.add_subcommand("sweep-v", "backlog/cost tradeoff sweep over V");
    add_common(sweep_vv, opts);
    sweep_vv->add_option("--grid", grid, "V grid: comma list or lo:hi:step")->required();
    sweep_vv->add_option("--reps", opts.replications, "replications per grid point");

    CLI::App* audit_cmd = app.add_subcommand("audit", "replay a ledger through the audit checks");
    add_common(audit_cmd, opts);
    audit_cmd->add_option("--ledger", ledger_path, "ledger CSV to audit")->required();

    CLI::App* list_cmd = app.add_subcommand("list-scenarios", "list built-in scenarios");

    CLI11_PARSE(app, argc, argv);

    try {
        if (list_cmd->parsed()) {
            for (const auto& n : mcsim::builtin_scenario_names()) std::cout << n << '\n';
            return 0;
        }
        if (run_cmd->parsed()) return cmd_run(opts, ledger_path);
        if (sweep_l->parsed()) return cmd_sweep_lambda(opts, grid);
        if (sweep_vv->parsed()) return cmd_sweep_v(opts, grid);
        if (audit_cmd->parsed()) return cmd_audit(opts, ledger_path);
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << '\n';
        return 2;
    }
    return 2;
}
