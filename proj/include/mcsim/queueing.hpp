#pragma once

#include <vector>

#include "mcsim/model.hpp"

namespace mcsim {

// Backlog per (node, commodity), nonnegative reals in packets.
class QueueTable {
public:
    QueueTable() = default;
    QueueTable(int num_nodes, int num_commodities)
        : num_nodes_(num_nodes), num_commodities_(num_commodities),
          backlog_(static_cast<std::size_t>(num_nodes) * num_commodities, 0.0) {}

    double& at(int node, int commodity) {
        return backlog_[static_cast<std::size_t>(node) * num_commodities_ + commodity];
    }
    double at(int node, int commodity) const {
        return backlog_[static_cast<std::size_t>(node) * num_commodities_ + commodity];
    }
    const double* row(int node) const {
        return backlog_.data() + static_cast<std::size_t>(node) * num_commodities_;
    }

    int num_nodes() const { return num_nodes_; }
    int num_commodities() const { return num_commodities_; }

    double total() const;
    double sum_squares() const;

    friend bool operator==(const QueueTable&, const QueueTable&) = default;

private:
    int num_nodes_ = 0;
    int num_commodities_ = 0;
    std::vector<double> backlog_;
};

// One interface request: the chosen (c, q, s) tuple and the desired amount,
// in input packets of the commodity's stage.
struct Request {
    bool processing = false;  // false: transmission on `arc`
    int node = 0;             // operating node (arc source for transmissions)
    int arc = -1;
    int commodity = 0;        // index of (c, q)
    Status operated = 0;      // status s of the operated copy
    double amount = 0.0;
    double weight = 0.0;      // used to rank interfaces under packet shortage
};

using FlowAssignment = std::vector<Request>;

// Per-request outcome of one slot: how much of the request was backed by real
// packets and how much was filled with dummies.
struct LedgerEntry {
    Request request;
    double real = 0.0;
    double dummy = 0.0;
};

struct SlotLedger {
    std::vector<LedgerEntry> entries;
    double total_dummy() const;
};

// Cumulative delivered packets per (dest_set, member, service); see
// NetworkModel::delivery_index.
struct DeliveryLog {
    std::vector<double> delivered;
    explicit DeliveryLog(int slots = 0) : delivered(slots, 0.0) {}
};

struct Arrival {
    int node = 0;
    int commodity = 0;
    double amount = 0.0;
};

// Splits each request into real and dummy service against the start-of-slot
// backlog. When the aggregate requests on one queue exceed its backlog, real
// packets go to interfaces in descending weight order (processing before
// links, then lowest arc index). Does not mutate Q. Throws if the assignment
// violates an interface capacity.
SlotLedger serve_and_split(const NetworkModel& model, const QueueTable& Q,
                           const FlowAssignment& fa);

// Advances Q by one slot: removes real departures, credits transmitted copies
// at the receiver, processed outputs (scaled by xi) at the local node, reload
// copies of status q - s, and exogenous arrivals. Dummy packets are dropped.
void apply_slot(const NetworkModel& model, QueueTable& Q, const SlotLedger& ledger,
                const std::vector<Arrival>& arrivals);

// Empties every destination-state queue: backlog of a final-stage commodity
// whose status includes the local destination bit is delivered; the copy for
// the remaining destinations (q - b_k, if nonzero) stays queued at the node.
// Returns the number of packets delivered this slot.
double consume_at_destinations(const NetworkModel& model, QueueTable& Q, DeliveryLog& log);

}  // namespace mcsim
