#pragma once

#include <limits>
#include <optional>
#include <random>
#include <string>
#include <vector>

#include "mcsim/ledger.hpp"
#include "mcsim/policy.hpp"
#include "mcsim/queueing.hpp"

namespace mcsim {

inline constexpr double kInfBacklog = std::numeric_limits<double>::infinity();

struct RunParams {
    PolicyKind policy = PolicyKind::Multicast;
    double V = 0.0;
    double lambda_pps = 0.0;  // per (source, service, dest set) stream
    long slots = 100000;
    std::uint64_t seed = 1;
    int sample_every = 100;
    int replications = 1;           // independent runs per sweep point (majority verdict)
    double warmup_frac = 0.1;       // excluded from averages
    Ledger* ledger = nullptr;       // optional event capture
    long ledger_from = 0;           // first recorded slot
    const RandomizedPolicySpec* randomized = nullptr;

    static RunParams from_model(const NetworkModel& model);
};

struct Sample {
    long slot = 0;
    double backlog_total = 0.0;
    double cost = 0.0;       // instantaneous h(t), per-second units
    double delivered = 0.0;  // cumulative
    double dummy = 0.0;      // cumulative
};

enum class Stability { Stable, Unstable };

struct StabilityVerdict {
    Stability verdict = Stability::Stable;
    double stable_backlog = 0.0;  // kInfBacklog when unstable
    double growth_ratio = 0.0;
};

struct RunResult {
    std::vector<Sample> timeline;  // one sample every sample_every slots
    double avg_backlog = 0.0;      // post-warmup time averages
    double avg_cost = 0.0;         // per-second units
    double total_delivered = 0.0;
    double total_dummy = 0.0;
    std::vector<double> delivered_rate;  // packets/slot per delivery index, post-warmup
    StabilityVerdict stability;
};

// Per-slot state update: snapshot -> policy -> serve/split -> queue update
// with fresh Poisson arrivals -> destination consumption -> metrics.
struct SimState {
    QueueTable Q;
    DeliveryLog deliveries;
    std::mt19937_64 rng;
    long slot = 0;
    double cum_dummy = 0.0;
};

// Instantaneous resource cost of one slot's ledger (real packets only),
// in internal per-slot units. Divide by tau for per-second values.
double slot_cost(const NetworkModel& model, const SlotLedger& ledger);

void step(const NetworkModel& model, const CandidateTables& tables, SimState& state,
          const RunParams& params, Sample* sample_out = nullptr, Ledger* ledger = nullptr);

RunResult run(const NetworkModel& model, const RunParams& params);

// Compares the mean backlog of the last two 20% windows of the sample series;
// growth above 10% is ruled unstable (stable backlog reported as infinity).
StabilityVerdict detect_stability(const std::vector<double>& backlog_series);

struct LambdaPoint {
    double lambda_pps = 0.0;
    Stability verdict = Stability::Stable;  // majority across replications
    double avg_backlog = 0.0;  // mean over stable replications; kInfBacklog when unstable
    double avg_cost = 0.0;     // mean over all replications
    int stable_reps = 0;
    int unstable_reps = 0;
};

struct LambdaSweep {
    std::vector<LambdaPoint> points;
    std::optional<double> boundary_pps;  // largest stable lambda
    std::vector<std::string> warnings;   // monotonicity violations
};

LambdaSweep sweep_lambda(const NetworkModel& model, const std::vector<double>& grid_pps,
                         const RunParams& base);

struct VPoint {
    double V = 0.0;
    double avg_backlog = 0.0;
    double avg_cost = 0.0;
    Stability verdict = Stability::Stable;
};

std::vector<VPoint> sweep_v(const NetworkModel& model, const std::vector<double>& v_grid,
                            double lambda_pps, const RunParams& base);

// Independent RNG stream per sweep run.
std::uint64_t derive_seed(std::uint64_t master, std::uint64_t index);

int worker_count(std::size_t jobs);  // MCSIM_WORKERS env override

}  // namespace mcsim
