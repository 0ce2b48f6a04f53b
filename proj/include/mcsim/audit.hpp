#pragma once

#include <string>
#include <vector>

#include "mcsim/ledger.hpp"
#include "mcsim/policy.hpp"
#include "mcsim/queueing.hpp"

namespace mcsim {

struct CheckResult {
    std::string name;
    bool pass = true;
    double max_violation = 0.0;
    std::string locus;  // node / commodity / slot range of the worst violation
};

struct AuditReport {
    std::vector<CheckResult> checks;
    bool pass() const;
    std::string to_string() const;
};

// Flow conservation and duplication law over the audited window, on real
// packets only. For every relay node, content (service, stage, dest set) and
// destination index k: destination-weighted inflow (arrivals, received copies,
// processed inputs scaled by xi, reloads) minus outflow (real service drains)
// must equal the backlog change between the window's boundary snapshots.
AuditReport check_conservation(const NetworkModel& model, const Ledger& ledger,
                               double rel_tol = 1e-6);

// Per-slot capacity constraints, dummies included, exact.
AuditReport check_capacity(const NetworkModel& model, const Ledger& ledger);

// Exhaustive maximizer of sum(w * x) over joint per-interface tuple choices
// at the capacity vertices. Tie-break: idle first, then lexicographic (c,q,s).
// Intended for tiny instances; throws if the joint space is too large.
FlowAssignment brute_force_decision(const NetworkModel& model, const QueueTable& Q,
                                    const PolicyParams& params);

bool same_assignment(const FlowAssignment& a, const FlowAssignment& b);

// Analytic capacity boundary of the Y-network (source -> relay -> two
// destinations, equal arc capacity kappa, pass-through service): duplicating
// at the relay sustains kappa; the unicast baseline pushes both copies over
// the source arc and halves it.
struct YcutBounds {
    double multicast_pps = 0.0;
    double unicast_pps = 0.0;
};

YcutBounds ycut_capacity_oracle(const NetworkModel& model);

}  // namespace mcsim
