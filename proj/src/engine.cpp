#include "mcsim/engine.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <mutex>
#include <cstdlib>
#include <numeric>
#include <stdexcept>
#include <thread>

namespace mcsim {

RunParams RunParams::from_model(const NetworkModel& model) {
    RunParams p;
    p.policy = parse_policy(model.default_policy);
    p.V = model.default_V;
    p.lambda_pps = model.default_lambda_pps;
    p.slots = model.default_slots;
    p.seed = model.default_seed;
    p.sample_every = model.default_sample_every;
    return p;
}

double slot_cost(const NetworkModel& model, const SlotLedger& ledger) {
    double cost = 0.0;
    for (const auto& e : ledger.entries) {
        if (e.real <= 0.0) continue;
        const Request& r = e.request;
        if (r.processing) {
            const CommodityKey& key = model.commodity_key(r.commodity);
            const double cpu = e.real * model.services[key.service].functions[key.stage - 1].workload;
            cost += model.nodes[r.node].proc_cost_per_cpu * cpu;
        } else {
            cost += model.arcs[r.arc].cost_per_pkt * e.real;
        }
    }
    return cost;
}

namespace {

void emit_snapshot(const NetworkModel& model, const QueueTable& Q, long slot, Ledger& ledger) {
    // boundary marker, so the snapshot exists even when every queue is empty
    LedgerRecord marker;
    marker.slot = slot;
    marker.kind = LedgerRecord::Kind::Snapshot;
    marker.node = -1;
    ledger.push_back(marker);
    for (int n = 0; n < Q.num_nodes(); ++n)
        for (int c = 0; c < Q.num_commodities(); ++c) {
            const double v = Q.at(n, c);
            if (v == 0.0) continue;
            const CommodityKey& key = model.commodity_key(c);
            LedgerRecord rec;
            rec.slot = slot;
            rec.kind = LedgerRecord::Kind::Snapshot;
            rec.node = n;
            rec.service = key.service;
            rec.stage = key.stage;
            rec.dest_set = key.dest_set;
            rec.q = key.q;
            rec.s = key.q;
            rec.amount = v;
            ledger.push_back(rec);
        }
}

std::vector<Arrival> draw_arrivals(const NetworkModel& model, const RunParams& params,
                                   std::mt19937_64& rng) {
    std::vector<Arrival> arrivals;
    if (params.lambda_pps <= 0.0) return arrivals;
    std::poisson_distribution<long> poisson(params.lambda_pps);
    for (const Stream& st : model.streams) {
        const long count = poisson(rng);
        if (count == 0) continue;
        const int D = static_cast<int>(model.dest_sets[st.dest_set].size());
        if (params.policy == PolicyKind::Unicast) {
            // the baseline treats each destination as a separate unicast flow
            for (int k = 0; k < D; ++k)
                arrivals.push_back({st.source,
                                    model.commodity_index(st.service, 1, st.dest_set, unit_bit(k)),
                                    static_cast<double>(count)});
        } else {
            arrivals.push_back({st.source,
                                model.commodity_index(st.service, 1, st.dest_set, full_status(D)),
                                static_cast<double>(count)});
        }
    }
    return arrivals;
}

}  // namespace

void step(const NetworkModel& model, const CandidateTables& tables, SimState& state,
          const RunParams& params, Sample* sample_out, Ledger* ledger) {
    PolicyParams pp{params.policy, params.V};
    FlowAssignment fa;
    switch (params.policy) {
        case PolicyKind::Multicast:
            fa = ldp_decide(model, tables, state.Q, pp);
            break;
        case PolicyKind::Unicast:
            fa = unicast_baseline_decide(model, tables, state.Q, pp);
            break;
        case PolicyKind::Randomized:
            if (!params.randomized)
                throw std::invalid_argument("randomized policy requires a RandomizedPolicySpec");
            fa = randomized_decide(model, *params.randomized, state.rng);
            break;
    }

    const SlotLedger slot_ledger = serve_and_split(model, state.Q, fa);
    const std::vector<Arrival> arrivals = draw_arrivals(model, params, state.rng);

    std::vector<double> delivered_before;
    if (ledger) delivered_before = state.deliveries.delivered;

    apply_slot(model, state.Q, slot_ledger, arrivals);
    consume_at_destinations(model, state.Q, state.deliveries);

    state.cum_dummy += slot_ledger.total_dummy();

    if (ledger) {
        for (const auto& e : slot_ledger.entries) {
            if (e.real <= 0.0 && e.dummy <= 0.0) continue;
            const Request& r = e.request;
            const CommodityKey& key = model.commodity_key(r.commodity);
            LedgerRecord rec;
            rec.slot = state.slot;
            rec.kind = r.processing ? LedgerRecord::Kind::Proc : LedgerRecord::Kind::Tx;
            rec.node = r.node;
            rec.peer = r.processing ? -1 : model.arcs[r.arc].dst;
            rec.service = key.service;
            rec.stage = key.stage;
            rec.dest_set = key.dest_set;
            rec.q = key.q;
            rec.s = r.operated;
            rec.amount = e.real;
            rec.dummy = e.dummy;
            ledger->push_back(rec);
        }
        for (const auto& a : arrivals) {
            const CommodityKey& key = model.commodity_key(a.commodity);
            LedgerRecord rec;
            rec.slot = state.slot;
            rec.kind = LedgerRecord::Kind::Arrival;
            rec.node = a.node;
            rec.service = key.service;
            rec.stage = key.stage;
            rec.dest_set = key.dest_set;
            rec.q = key.q;
            rec.s = key.q;
            rec.amount = a.amount;
            ledger->push_back(rec);
        }
        for (int ds = 0; ds < static_cast<int>(model.dest_sets.size()); ++ds)
            for (int k = 0; k < static_cast<int>(model.dest_sets[ds].size()); ++k)
                for (int phi = 0; phi < static_cast<int>(model.services.size()); ++phi) {
                    const int idx = model.delivery_index(ds, k, phi);
                    const double delta = state.deliveries.delivered[idx] - delivered_before[idx];
                    if (delta <= 0.0) continue;
                    LedgerRecord rec;
                    rec.slot = state.slot;
                    rec.kind = LedgerRecord::Kind::Delivery;
                    rec.node = model.dest_sets[ds][k];
                    rec.peer = k;
                    rec.service = phi;
                    rec.stage = model.services[phi].num_stages();
                    rec.dest_set = ds;
                    rec.amount = delta;
                    ledger->push_back(rec);
                }
    }

    if (sample_out) {
        sample_out->slot = state.slot;
        sample_out->backlog_total = state.Q.total();
        sample_out->cost = slot_cost(model, slot_ledger) / model.tau;
        sample_out->delivered =
            std::accumulate(state.deliveries.delivered.begin(), state.deliveries.delivered.end(), 0.0);
        sample_out->dummy = state.cum_dummy;
    }
    ++state.slot;
}

RunResult run(const NetworkModel& model, const RunParams& params) {
    if (params.slots < 1) throw std::invalid_argument("horizon must be at least 1 slot");
    if (params.sample_every < 1) throw std::invalid_argument("sample_every must be positive");

    CandidateTables tables(model, params.policy != PolicyKind::Unicast);

    SimState state;
    state.Q = QueueTable(model.num_nodes(), model.num_commodities());
    state.deliveries = DeliveryLog(model.num_delivery_slots());
    state.rng.seed(params.seed);

    RunResult result;
    const long T = params.slots;
    const long warmup = static_cast<long>(std::floor(T * params.warmup_frac));
    std::vector<double> delivered_at_warmup(model.num_delivery_slots(), 0.0);

    double backlog_sum = 0.0;
    double cost_sum = 0.0;
    long measured = 0;

    for (long t = 0; t < T; ++t) {
        if (params.ledger && t == params.ledger_from)
            emit_snapshot(model, state.Q, t, *params.ledger);
        if (t == warmup) delivered_at_warmup = state.deliveries.delivered;

        Sample sample;
        const bool want_sample = ((t + 1) % params.sample_every == 0) || (t == T - 1);
        Ledger* ledger = (params.ledger && t >= params.ledger_from) ? params.ledger : nullptr;
        step(model, tables, state, params, &sample, ledger);

        if (t >= warmup) {
            backlog_sum += sample.backlog_total;
            cost_sum += sample.cost;
            ++measured;
        }
        if (want_sample && (sample.slot % params.sample_every == params.sample_every - 1 ||
                            sample.slot == T - 1)) {
            if (result.timeline.empty() || result.timeline.back().slot != sample.slot)
                result.timeline.push_back(sample);
        }
    }
    if (params.ledger) emit_snapshot(model, state.Q, T, *params.ledger);

    result.avg_backlog = measured ? backlog_sum / measured : 0.0;
    result.avg_cost = measured ? cost_sum / measured : 0.0;
    result.total_delivered =
        std::accumulate(state.deliveries.delivered.begin(), state.deliveries.delivered.end(), 0.0);
    result.total_dummy = state.cum_dummy;

    result.delivered_rate.resize(model.num_delivery_slots());
    const long span = std::max<long>(1, T - warmup);
    for (int i = 0; i < model.num_delivery_slots(); ++i)
        result.delivered_rate[i] =
            (state.deliveries.delivered[i] - delivered_at_warmup[i]) / static_cast<double>(span);

    std::vector<double> series;
    series.reserve(result.timeline.size());
    for (const auto& s : result.timeline) series.push_back(s.backlog_total);
    if (series.size() >= 5) {
        result.stability = detect_stability(series);
    } else {
        result.stability = {Stability::Stable, result.avg_backlog, 1.0};
    }
    return result;
}

StabilityVerdict detect_stability(const std::vector<double>& series) {
    const std::size_t n = series.size();
    if (n < 5) throw std::invalid_argument("backlog series too short for stability detection");
    const std::size_t w = n / 5;
    auto mean = [&](std::size_t lo, std::size_t hi) {
        double s = 0.0;
        for (std::size_t i = lo; i < hi; ++i) s += series[i];
        return s / static_cast<double>(hi - lo);
    };
    const double prev = mean(n - 2 * w, n - w);
    const double last = mean(n - w, n);

    StabilityVerdict v;
    constexpr double kTiny = 1e-12;
    if (prev <= kTiny) {
        v.growth_ratio = last <= kTiny ? 1.0 : kInfBacklog;
    } else {
        v.growth_ratio = last / prev;
    }
    if (v.growth_ratio > 1.10) {
        v.verdict = Stability::Unstable;
        v.stable_backlog = kInfBacklog;
    } else {
        v.verdict = Stability::Stable;
        v.stable_backlog = mean(n - 2 * w, n);
    }
    return v;
}

std::uint64_t derive_seed(std::uint64_t master, std::uint64_t index) {
    std::uint64_t z = master + (index + 1) * 0x9E3779B97F4A7C15ull;
    z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ull;
    z = (z ^ (z >> 27)) * 0x94D049BB133111EBull;
    return z ^ (z >> 31);
}

int worker_count(std::size_t jobs) {
    int workers = 0;
    if (const char* env = std::getenv("MCSIM_WORKERS")) workers = std::atoi(env);
    if (workers <= 0) workers = static_cast<int>(std::thread::hardware_concurrency());
    if (workers <= 0) workers = 1;
    return std::min<int>(workers, static_cast<int>(std::max<std::size_t>(jobs, 1)));
}

namespace {

template <typename Fn>
void parallel_for(std::size_t jobs, Fn&& fn) {
    const int workers = worker_count(jobs);
    if (workers <= 1) {
        for (std::size_t i = 0; i < jobs; ++i) fn(i);
        return;
    }
    std::atomic<std::size_t> next{0};
    std::vector<std::thread> pool;
    pool.reserve(workers);
    for (int w = 0; w < workers; ++w)
        pool.emplace_back([&] {
            for (std::size_t i = next.fetch_add(1); i < jobs; i = next.fetch_add(1)) fn(i);
        });
    for (auto& t : pool) t.join();
}

}  // namespace

LambdaSweep sweep_lambda(const NetworkModel& model, const std::vector<double>& grid_pps,
                         const RunParams& base) {
    if (grid_pps.empty()) throw std::invalid_argument("empty lambda grid");
    for (std::size_t i = 1; i < grid_pps.size(); ++i)
        if (grid_pps[i] < grid_pps[i - 1])
            throw std::invalid_argument("lambda grid must be sorted ascending");

    const int reps = std::max(1, base.replications);
    LambdaSweep sweep;
    sweep.points.resize(grid_pps.size());
    parallel_for(grid_pps.size() * reps, [&](std::size_t job) {
        const std::size_t i = job / reps;
        RunParams p = base;
        p.lambda_pps = grid_pps[i];
        p.seed = derive_seed(base.seed, job);
        p.ledger = nullptr;
        const RunResult r = run(model, p);
        LambdaPoint& pt = sweep.points[i];  // distinct slots touched per i below
        static std::mutex merge_mutex;
        std::lock_guard<std::mutex> lock(merge_mutex);
        pt.lambda_pps = grid_pps[i];
        if (r.stability.verdict == Stability::Stable) {
            pt.stable_reps += 1;
            pt.avg_backlog += r.stability.stable_backlog;
        } else {
            pt.unstable_reps += 1;
        }
        pt.avg_cost += r.avg_cost / reps;
    });
    for (LambdaPoint& pt : sweep.points) {
        // verdict by majority across replications; ties count as unstable
        pt.verdict = pt.stable_reps > pt.unstable_reps ? Stability::Stable : Stability::Unstable;
        pt.avg_backlog = pt.verdict == Stability::Stable ? pt.avg_backlog / pt.stable_reps
                                                         : kInfBacklog;
    }

    for (std::size_t i = 0; i < sweep.points.size(); ++i) {
        if (sweep.points[i].verdict == Stability::Stable)
            sweep.boundary_pps = sweep.points[i].lambda_pps;
    }
    for (std::size_t i = 0; i + 1 < sweep.points.size(); ++i)
        if (sweep.points[i].verdict == Stability::Unstable &&
            sweep.points[i + 1].verdict == Stability::Stable)
            sweep.warnings.push_back("stable point above unstable point at lambda=" +
                                     std::to_string(sweep.points[i + 1].lambda_pps));
    return sweep;
}

std::vector<VPoint> sweep_v(const NetworkModel& model, const std::vector<double>& v_grid,
                            double lambda_pps, const RunParams& base) {
    if (v_grid.empty()) throw std::invalid_argument("empty V grid");
    const int reps = std::max(1, base.replications);
    std::vector<VPoint> points(v_grid.size());
    std::vector<int> unstable(v_grid.size(), 0);
    parallel_for(v_grid.size() * reps, [&](std::size_t job) {
        const std::size_t i = job / reps;
        const int rep = static_cast<int>(job % reps);
        RunParams p = base;
        p.V = v_grid[i];
        p.lambda_pps = lambda_pps;
        p.seed = derive_seed(base.seed, rep);  // matched seeds across the V grid
        p.ledger = nullptr;
        const RunResult r = run(model, p);
        static std::mutex merge_mutex;
        std::lock_guard<std::mutex> lock(merge_mutex);
        points[i].V = v_grid[i];
        points[i].avg_backlog += r.avg_backlog / reps;
        points[i].avg_cost += r.avg_cost / reps;
        if (r.stability.verdict == Stability::Unstable) unstable[i] += 1;
    });
    for (std::size_t i = 0; i < points.size(); ++i)
        points[i].verdict = unstable[i] * 2 > reps ? Stability::Unstable : Stability::Stable;
    return points;
}

}  // namespace mcsim
