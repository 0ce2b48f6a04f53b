// Acceptance gate: one test case per criterion, each printing a single
// PASS/FAIL line with the measured values and the pinned tolerances.
#include <doctest.h>

#include <chrono>
#include <cmath>
#include <cstdio>
#include <random>
#include <vector>

#include "mcsim/audit.hpp"
#include "mcsim/engine.hpp"
#include "mcsim/model.hpp"
#include "mcsim/policy.hpp"
#include "mcsim/scenario.hpp"

using namespace mcsim;

namespace {

// Pinned acceptance parameters.
constexpr long kBoundarySlots = 200000;    // horizon for the capacity sweeps
constexpr double kGridStepMbps = 2.0;      // lambda grid resolution
constexpr int kReplications = 3;           // majority verdict per grid point
constexpr double kMulticastLo = 36.0;      // multicast boundary window, Mbps
constexpr double kMulticastHi = 48.0;
constexpr double kUnicastLo = 17.0;        // unicast boundary window, Mbps
constexpr double kUnicastHi = 25.0;
constexpr double kMinGain = 1.7;           // multicast / unicast boundary ratio
constexpr double kCostNoiseBand = 1.05;    // 5% band for the V-monotonicity
constexpr double kPlateauRatioMax = 0.6;   // multicast/unicast large-V cost
constexpr double kThroughputTol = 0.02;    // per-destination rate, relative

const NetworkModel& abilene() {
    static const NetworkModel model = build_network(abilene_scenario());
    return model;
}

double boundary_mbps(const LambdaSweep& sweep, const NetworkModel& model) {
    return sweep.boundary_pps ? model.pps_to_mbps(*sweep.boundary_pps) : -1.0;
}

LambdaSweep abilene_boundary_sweep(PolicyKind policy, double V, double lo_mbps, double hi_mbps) {
    const NetworkModel& model = abilene();
    RunParams base = RunParams::from_model(model);
    base.policy = policy;
    base.V = V;
    base.slots = kBoundarySlots;
    base.replications = kReplications;
    std::vector<double> grid;
    for (double m = lo_mbps; m <= hi_mbps + 1e-9; m += kGridStepMbps)
        grid.push_back(model.mbps_to_pps(m));
    return sweep_lambda(model, grid, base);
}

double multicast_boundary_v0() {
    static const double b =
        boundary_mbps(abilene_boundary_sweep(PolicyKind::Multicast, 0.0, 30.0, 52.0), abilene());
    return b;
}

double unicast_boundary_v0() {
    static const double b =
        boundary_mbps(abilene_boundary_sweep(PolicyKind::Unicast, 0.0, 13.0, 29.0), abilene());
    return b;
}

void report(int criterion, const char* name, bool pass, const char* detail) {
    std::printf("ACCEPTANCE %d %-28s %s  (%s)\n", criterion, name, pass ? "PASS" : "FAIL",
                detail);
    std::fflush(stdout);
}

QueueTable random_queues(const NetworkModel& model, std::uint64_t seed) {
    std::mt19937_64 rng(seed);
    std::uniform_real_distribution<double> unif(0.0, 20.0);
    QueueTable Q(model.num_nodes(), model.num_commodities());
    for (int n = 0; n < model.num_nodes(); ++n)
        for (int c = 0; c < model.num_commodities(); ++c) Q.at(n, c) = unif(rng);
    return Q;
}

ScenarioConfig fork_scenario() {
    ScenarioConfig c;
    c.name = "fork";
    c.nodes = {{1, 10.0, 0.001}, {2, 10.0, 0.001}, {3, 10.0, 0.001}};
    c.links = {{1, 2, 0.01, 1.0, false}, {1, 3, 0.01, 1.0, false}};
    ScenarioConfig::Service svc;
    svc.functions = {{1.0, 1.0}};
    c.services = {svc};
    c.dest_sets = {{2, 3}};
    c.source_nodes = {1};
    return c;
}

}  // namespace

TEST_CASE("acceptance 1: multicast capacity boundary") {
    const double b = multicast_boundary_v0();
    const bool pass = b >= kMulticastLo && b <= kMulticastHi;
    char detail[160];
    std::snprintf(detail, sizeof detail,
                  "boundary=%.0f Mbps, window [%.0f, %.0f], grid step %.0f, T=%ld, reps=%d", b,
                  kMulticastLo, kMulticastHi, kGridStepMbps, kBoundarySlots, kReplications);
    report(1, "multicast-boundary", pass, detail);
    CHECK(pass);
}

TEST_CASE("acceptance 2: boundary is V-independent") {
    const double b0 = multicast_boundary_v0();
    const double bv =
        boundary_mbps(abilene_boundary_sweep(PolicyKind::Multicast, 3e6, 30.0, 52.0), abilene());
    const bool pass = std::fabs(bv - b0) <= kGridStepMbps + 1e-9;
    char detail[160];
    std::snprintf(detail, sizeof detail,
                  "V=0 boundary=%.0f Mbps, V=3e6 boundary=%.0f Mbps, tolerance one grid step "
                  "(%.0f Mbps)",
                  b0, bv, kGridStepMbps);
    report(2, "v-independent-boundary", pass, detail);
    CHECK(pass);
}

TEST_CASE("acceptance 3: unicast baseline boundary and multicast gain") {
    const double bu = unicast_boundary_v0();
    const double bm = multicast_boundary_v0();
    const bool in_window = bu >= kUnicastLo && bu <= kUnicastHi;
    const bool gain_ok = bu > 0 && bm / bu >= kMinGain;
    char detail[160];
    std::snprintf(detail, sizeof detail,
                  "unicast boundary=%.0f Mbps, window [%.0f, %.0f]; gain=%.2fx, required >= %.1fx",
                  bu, kUnicastLo, kUnicastHi, bu > 0 ? bm / bu : 0.0, kMinGain);
    report(3, "unicast-baseline", in_window && gain_ok, detail);
    CHECK(in_window);
    CHECK(gain_ok);
}

TEST_CASE("acceptance 4: cost-backlog tradeoff in V") {
    const NetworkModel& model = abilene();
    const std::vector<double> v_grid = {0.0, 1e5, 3e5, 1e6, 3e6, 1e7};
    std::vector<VPoint> multi, uni;
    for (PolicyKind pol : {PolicyKind::Multicast, PolicyKind::Unicast}) {
        RunParams base = RunParams::from_model(model);
        base.policy = pol;
        base.slots = kBoundarySlots;
        base.replications = kReplications;
        auto pts = sweep_v(model, v_grid, model.mbps_to_pps(20.0), base);
        (pol == PolicyKind::Multicast ? multi : uni) = std::move(pts);
    }
    bool monotone = true;
    for (const auto* series : {&multi, &uni})
        for (std::size_t i = 0; i + 1 < series->size(); ++i) {
            monotone = monotone && (*series)[i + 1].avg_cost <= (*series)[i].avg_cost *
                                                                     kCostNoiseBand;
            monotone = monotone && (*series)[i + 1].avg_backlog >=
                                       (*series)[i].avg_backlog / kCostNoiseBand;
        }
    const double plateau_m = multi.back().avg_cost;
    const double plateau_u = uni.back().avg_cost;
    const bool plateau_ok = plateau_m <= kPlateauRatioMax * plateau_u;
    char detail[200];
    std::snprintf(detail, sizeof detail,
                  "lambda=20 Mbps; cost antitone / backlog monotone in V within 5%%: %s; "
                  "large-V cost %.2f (multicast) vs %.2f (unicast), ratio %.2f <= %.1f",
                  monotone ? "yes" : "no", plateau_m, plateau_u, plateau_m / plateau_u,
                  kPlateauRatioMax);
    report(4, "cost-backlog-tradeoff", monotone && plateau_ok, detail);
    CHECK(monotone);
    CHECK(plateau_ok);
}

TEST_CASE("acceptance 5: Y-network boundary oracle") {
    const auto t0 = std::chrono::steady_clock::now();
    const NetworkModel model = build_network(y_network_scenario());
    const YcutBounds oracle = ycut_capacity_oracle(model);

    RunParams base = RunParams::from_model(model);
    base.slots = 50000;
    base.replications = kReplications;
    std::vector<double> grid_m, grid_u;
    for (double l = 2.0; l <= 14.0; l += 2.0) grid_m.push_back(l);
    for (double l = 1.0; l <= 9.0; l += 2.0) grid_u.push_back(l);

    base.policy = PolicyKind::Multicast;
    const LambdaSweep sm = sweep_lambda(model, grid_m, base);
    base.policy = PolicyKind::Unicast;
    const LambdaSweep su = sweep_lambda(model, grid_u, base);
    const double bm = sm.boundary_pps.value_or(-100.0);
    const double bu = su.boundary_pps.value_or(-100.0);
    const double secs =
        std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();

    const bool pass = std::fabs(bm - oracle.multicast_pps) <= 2.0 + 1e-9 &&
                      std::fabs(bu - oracle.unicast_pps) <= 2.0 + 1e-9;
    char detail[200];
    std::snprintf(detail, sizeof detail,
                  "oracle (%.0f, %.0f) pkt/slot, simulated (%.0f, %.0f), tolerance one grid "
                  "step (2); %.1f s",
                  oracle.multicast_pps, oracle.unicast_pps, bm, bu, secs);
    report(5, "y-network-oracle", pass, detail);
    CHECK(pass);
}

TEST_CASE("acceptance 6: exhaustive policy oracle, 100 instances") {
    int agree = 0, total = 0;
    const NetworkModel chain = build_network(chain2_scenario());
    const NetworkModel fork = build_network(fork_scenario());
    const CandidateTables chain_tables(chain, true);
    const CandidateTables fork_tables(fork, true);
    const CandidateTables fork_unicast(fork, false);

    for (std::uint64_t seed = 0; seed < 40; ++seed, ++total) {
        const QueueTable Q = random_queues(chain, seed);
        const PolicyParams pp{PolicyKind::Multicast, seed % 2 ? 5e5 : 0.0};
        if (same_assignment(ldp_decide(chain, chain_tables, Q, pp),
                            brute_force_decision(chain, Q, pp)))
            ++agree;
    }
    for (std::uint64_t seed = 1000; seed < 1040; ++seed, ++total) {
        const QueueTable Q = random_queues(fork, seed);
        const PolicyParams pp{PolicyKind::Multicast, seed % 2 ? 5e5 : 0.0};
        if (same_assignment(ldp_decide(fork, fork_tables, Q, pp),
                            brute_force_decision(fork, Q, pp)))
            ++agree;
    }
    for (std::uint64_t seed = 2000; seed < 2020; ++seed, ++total) {
        const QueueTable Q = random_queues(fork, seed);
        const PolicyParams pp{PolicyKind::Unicast, 0.0};
        if (same_assignment(unicast_baseline_decide(fork, fork_unicast, Q, pp),
                            brute_force_decision(fork, Q, pp)))
            ++agree;
    }
    char detail[80];
    std::snprintf(detail, sizeof detail, "%d/%d seeded instances agree", agree, total);
    report(6, "policy-vs-brute-force", agree == total && total == 100, detail);
    CHECK(agree == total);
    CHECK(total == 100);
}

TEST_CASE("acceptance 7: per-slot invariants, audits, and replay") {
    // split-count closed form
    bool splits_ok = true;
    for (int d = 1; d <= 6; ++d) {
        std::size_t n = 0;
        for (Status q = 1; q <= full_status(d); ++q) n += duplication_splits(q).size();
        splits_ok = splits_ok &&
                    n == static_cast<std::size_t>(std::pow(3, d) - std::pow(2, d) + 0.5);
    }

    // per-slot invariants on a loaded Y-network run
    const NetworkModel model = build_network(y_network_scenario());
    const CandidateTables tables(model, true);
    RunParams p = RunParams::from_model(model);
    p.lambda_pps = 5.0;
    p.slots = 4000;
    SimState st;
    st.Q = QueueTable(model.num_nodes(), model.num_commodities());
    st.deliveries = DeliveryLog(model.num_delivery_slots());
    st.rng.seed(p.seed);
    bool nonneg = true, dest_zero = true;
    for (long t = 0; t < p.slots; ++t) {
        step(model, tables, st, p);
        for (int n = 0; n < model.num_nodes(); ++n)
            for (int c = 0; c < model.num_commodities(); ++c) {
                nonneg = nonneg && st.Q.at(n, c) >= 0.0;
                const CommodityKey& key = model.commodity_key(c);
                if (key.stage != model.services[key.service].num_stages()) continue;
                const auto& members = model.dest_sets[key.dest_set];
                for (std::size_t k = 0; k < members.size(); ++k)
                    if (members[k] == n && (key.q & unit_bit(static_cast<int>(k))))
                        dest_zero = dest_zero && st.Q.at(n, c) == 0.0;
            }
    }
    // ledger audits on a recorded run with boundary snapshots
    Ledger ledger;
    RunParams lp = RunParams::from_model(model);
    lp.lambda_pps = 5.0;
    lp.slots = 4000;
    lp.ledger = &ledger;
    lp.ledger_from = 0;
    run(model, lp);
    const bool capacity_ok = check_capacity(model, ledger).pass();
    bool coverage_ok = true;
    for (const auto& rec : ledger)
        if ((rec.kind == LedgerRecord::Kind::Proc || rec.kind == LedgerRecord::Kind::Tx) &&
            rec.amount > 0.0)
            coverage_ok = coverage_ok && rec.s != 0 && is_subset(rec.s, rec.q) &&
                          ((rec.s | (rec.q & ~rec.s)) == rec.q);
    const bool conservation_ok = check_conservation(model, ledger).pass();

    // bit-identical replay
    RunParams rp = RunParams::from_model(model);
    rp.lambda_pps = 5.0;
    rp.slots = 3000;
    rp.seed = 42;
    const RunResult a = run(model, rp);
    const RunResult b = run(model, rp);
    bool replay_ok = a.timeline.size() == b.timeline.size() && a.avg_backlog == b.avg_backlog &&
                     a.avg_cost == b.avg_cost && a.total_delivered == b.total_delivered;
    for (std::size_t i = 0; replay_ok && i < a.timeline.size(); ++i)
        replay_ok = a.timeline[i].slot == b.timeline[i].slot &&
                    a.timeline[i].backlog_total == b.timeline[i].backlog_total &&
                    a.timeline[i].cost == b.timeline[i].cost &&
                    a.timeline[i].delivered == b.timeline[i].delivered &&
                    a.timeline[i].dummy == b.timeline[i].dummy;

    const bool pass =
        splits_ok && nonneg && dest_zero && capacity_ok && coverage_ok && conservation_ok &&
        replay_ok;
    char detail[220];
    std::snprintf(detail, sizeof detail,
                  "splits:%d nonneg:%d dest-state-zero:%d capacity:%d coverage:%d "
                  "conservation:%d replay:%d",
                  splits_ok, nonneg, dest_zero, capacity_ok, coverage_ok, conservation_ok,
                  replay_ok);
    report(7, "invariant-suite", pass, detail);
    CHECK(pass);
}

TEST_CASE("acceptance 8: delivered throughput accounting") {
    const NetworkModel& model = abilene();
    RunParams p = RunParams::from_model(model);
    p.lambda_pps = model.mbps_to_pps(20.0);
    p.slots = 500000;
    const RunResult r = run(model, p);

    const int sources_per_class = 4;
    double max_rel = 0.0;
    for (int ds = 0; ds < static_cast<int>(model.dest_sets.size()); ++ds)
        for (int k = 0; k < static_cast<int>(model.dest_sets[ds].size()); ++k)
            for (int s = 0; s < static_cast<int>(model.services.size()); ++s) {
                double xi = 1.0;
                for (const auto& fn : model.services[s].functions) xi *= fn.scaling;
                const double expect = sources_per_class * p.lambda_pps * xi;
                const double got = r.delivered_rate[model.delivery_index(ds, k, s)];
                max_rel = std::max(max_rel, std::fabs(got - expect) / expect);
            }
    const bool stable = r.stability.verdict == Stability::Stable;
    const bool pass = stable && max_rel <= kThroughputTol;
    char detail[140];
    std::snprintf(detail, sizeof detail,
                  "lambda=20 Mbps, T=5e5: stable=%s, worst per-destination rate error %.3f%% "
                  "(tolerance %.0f%%)",
                  stable ? "yes" : "no", 100.0 * max_rel, 100.0 * kThroughputTol);
    report(8, "throughput-accounting", pass, detail);
    CHECK(pass);
}
