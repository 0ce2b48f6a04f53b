#include "mcsim/queueing.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <stdexcept>

namespace mcsim {

double QueueTable::total() const {
    return std::accumulate(backlog_.begin(), backlog_.end(), 0.0);
}

double QueueTable::sum_squares() const {
    double s = 0.0;
    for (double v : backlog_) s += v * v;
    return s;
}

double SlotLedger::total_dummy() const {
    double s = 0.0;
    for (const auto& e : entries) s += e.dummy;
    return s;
}

namespace {

constexpr double kCapacitySlack = 1e-9;

void validate_capacity(const NetworkModel& model, const FlowAssignment& fa) {
    std::vector<double> cpu(model.num_nodes(), 0.0);
    std::vector<double> load(model.num_arcs(), 0.0);
    for (const auto& r : fa) {
        if (r.amount < 0) throw std::invalid_argument("negative flow amount");
        const CommodityKey& key = model.commodity_key(r.commodity);
        if (r.processing) {
            if (key.stage >= model.services[key.service].num_stages())
                throw std::invalid_argument("cannot process a final-stage commodity");
            cpu[r.node] += r.amount * model.services[key.service].functions[key.stage - 1].workload;
        } else {
            load[r.arc] += r.amount;
        }
    }
    for (int i = 0; i < model.num_nodes(); ++i)
        if (cpu[i] > model.nodes[i].proc_capacity * (1 + kCapacitySlack) + kCapacitySlack)
            throw std::invalid_argument("processing capacity violated at node " +
                                        std::to_string(i));
    for (int a = 0; a < model.num_arcs(); ++a)
        if (load[a] > model.arcs[a].capacity * (1 + kCapacitySlack) + kCapacitySlack)
            throw std::invalid_argument("transmission capacity violated on arc " +
                                        std::to_string(a));
}

}  // namespace

SlotLedger serve_and_split(const NetworkModel& model, const QueueTable& Q,
                           const FlowAssignment& fa) {
    validate_capacity(model, fa);

    SlotLedger ledger;
    ledger.entries.reserve(fa.size());
    for (const auto& r : fa) ledger.entries.push_back({r, 0.0, 0.0});

    // Allocate real packets per (node, commodity) queue, highest weight first.
    std::vector<int> order(ledger.entries.size());
    std::iota(order.begin(), order.end(), 0);
    std::sort(order.begin(), order.end(), [&](int a, int b) {
        const Request& ra = ledger.entries[a].request;
        const Request& rb = ledger.entries[b].request;
        if (ra.node != rb.node) return ra.node < rb.node;
        if (ra.commodity != rb.commodity) return ra.commodity < rb.commodity;
        if (ra.weight != rb.weight) return ra.weight > rb.weight;
        if (ra.processing != rb.processing) return ra.processing;
        return ra.arc < rb.arc;
    });

    std::size_t i = 0;
    while (i < order.size()) {
        const Request& head = ledger.entries[order[i]].request;
        double available = Q.at(head.node, head.commodity);
        std::size_t j = i;
        for (; j < order.size(); ++j) {
            LedgerEntry& e = ledger.entries[order[j]];
            if (e.request.node != head.node || e.request.commodity != head.commodity) break;
            e.real = std::min(e.request.amount, available);
            e.dummy = e.request.amount - e.real;
            available -= e.real;
        }
        i = j;
    }
    return ledger;
}

void apply_slot(const NetworkModel& model, QueueTable& Q, const SlotLedger& ledger,
                const std::vector<Arrival>& arrivals) {
    for (const auto& e : ledger.entries) {
        if (e.real <= 0.0) continue;
        const Request& r = e.request;
        const CommodityKey& key = model.commodity_key(r.commodity);

        Q.at(r.node, r.commodity) -= e.real;

        if (r.processing) {
            const FunctionModel& fn = model.services[key.service].functions[key.stage - 1];
            const int out = model.commodity_index(key.service, key.stage + 1, key.dest_set,
                                                  r.operated);
            Q.at(r.node, out) += fn.scaling * e.real;
        } else {
            const int recv = model.commodity_index(key.service, key.stage, key.dest_set,
                                                   r.operated);
            Q.at(model.arcs[r.arc].dst, recv) += e.real;
        }

        const Status reload = key.q & ~r.operated;
        if (reload != 0) {
            Q.at(r.node, model.commodity_index(key.service, key.stage, key.dest_set, reload)) +=
                e.real;
        }
    }

    for (const auto& a : arrivals) Q.at(a.node, a.commodity) += a.amount;

    // absorb float dust from exact drains
    for (int n = 0; n < Q.num_nodes(); ++n)
        for (int c = 0; c < Q.num_commodities(); ++c) {
            double& v = Q.at(n, c);
            if (v < 0.0) {
                if (v < -1e-6) throw std::logic_error("negative backlog after slot update");
                v = 0.0;
            }
        }
}

double consume_at_destinations(const NetworkModel& model, QueueTable& Q, DeliveryLog& log) {
    double delivered_total = 0.0;
    for (int ds = 0; ds < static_cast<int>(model.dest_sets.size()); ++ds) {
        const auto& members = model.dest_sets[ds];
        const Status full = full_status(static_cast<int>(members.size()));
        for (int k = 0; k < static_cast<int>(members.size()); ++k) {
            const int node = members[k];
            const Status bk = unit_bit(k);
            for (int phi = 0; phi < static_cast<int>(model.services.size()); ++phi) {
                const int final_stage = model.services[phi].num_stages();
                for (Status q = 1; q <= full; ++q) {
                    if (!(q & bk)) continue;
                    double& backlog = Q.at(node, model.commodity_index(phi, final_stage, ds, q));
                    const double amount = backlog;
                    if (amount <= 0.0) continue;
                    backlog = 0.0;
                    log.delivered[model.delivery_index(ds, k, phi)] += amount;
                    delivered_total += amount;
                    const Status rest = q & ~bk;
                    if (rest != 0)
                        Q.at(node, model.commodity_index(phi, final_stage, ds, rest)) += amount;
                }
            }
        }
    }
    return delivered_total;
}

}  // namespace mcsim
