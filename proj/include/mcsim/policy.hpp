#pragma once

#include <random>
#include <vector>

#include "mcsim/queueing.hpp"

namespace mcsim {

enum class PolicyKind { Multicast, Unicast, Randomized };

struct PolicyParams {
    PolicyKind kind = PolicyKind::Multicast;
    double V = 0.0;
};

PolicyKind parse_policy(const std::string& name);
std::string policy_name(PolicyKind kind);

// Differential-backlog weight for processing the tuple (c, q, s) at node i.
// Queues with status 0 read as 0.
double processing_weight(const NetworkModel& model, const QueueTable& Q, int node,
                         const CommodityKey& key, Status s, double V);

// Differential-backlog weight for transmitting the tuple (c, q, s) on an arc.
double transmission_weight(const NetworkModel& model, const QueueTable& Q, int arc,
                           const CommodityKey& key, Status s, double V);

// Precomputed candidate tuples, grouped by source commodity so that a slot
// only touches commodities with positive backlog. Candidate order within a
// commodity is ascending in s, which combined with the commodity index order
// gives the lexicographic (c, q, s) tie-break.
class CandidateTables {
public:
    struct ProcSplit {
        int reload = -1;      // commodity index of (c, q - s), -1 when s == q
        int output = 0;       // commodity index of (c', s) at stage m + 1
        Status operated = 0;
        double scaling = 0.0;
        double inv_workload = 0.0;  // 1 / r
        double workload = 0.0;
    };
    struct TxSplit {
        int reload = -1;
        int receive = 0;  // commodity index of (c, s) at the receiver
        Status operated = 0;
    };

    CandidateTables(const NetworkModel& model, bool allow_duplication);

    // per commodity index; empty for final stages (processing) or never for tx
    const std::vector<std::vector<ProcSplit>>& proc_splits() const { return proc_; }
    const std::vector<std::vector<TxSplit>>& tx_splits() const { return tx_; }

    std::size_t proc_candidate_count() const;  // summed over commodities
    std::size_t tx_candidate_count() const;

private:
    std::vector<std::vector<ProcSplit>> proc_;
    std::vector<std::vector<TxSplit>> tx_;
};

// Independent max-weight selection per processing interface (node) and per
// transmission interface (arc), against the start-of-slot snapshot of Q.
// An interface idles unless its best weight is strictly positive; otherwise
// it requests full capacity for the argmax tuple (ties broken lexicographically
// on (c, q, s)).
FlowAssignment ldp_decide(const NetworkModel& model, const CandidateTables& tables,
                          const QueueTable& Q, const PolicyParams& params);

// The unicast baseline runs the same machinery with duplication disabled
// (splits restricted to s == q); arrivals must be expanded per destination.
FlowAssignment unicast_baseline_decide(const NetworkModel& model, const CandidateTables& tables,
                                       const QueueTable& Q, const PolicyParams& params);

// Stationary randomized policy: per interface, a probability mass over
// (c, q, s) tuples; the remainder up to 1 is the idle option.
struct RandomizedPolicySpec {
    struct Option {
        int commodity = 0;
        Status operated = 0;
        double probability = 0.0;
    };
    std::vector<std::vector<Option>> node_options;  // per node (processing)
    std::vector<std::vector<Option>> arc_options;   // per arc
};

FlowAssignment randomized_decide(const NetworkModel& model, const RandomizedPolicySpec& spec,
                                 std::mt19937_64& rng);

}  // namespace mcsim
