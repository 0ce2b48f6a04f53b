#include "mcsim/policy.hpp"

#include <stdexcept>

namespace mcsim {

PolicyKind parse_policy(const std::string& name) {
    if (name == "multicast" || name == "ldp-multicast") return PolicyKind::Multicast;
    if (name == "unicast" || name == "ldp-unicast-baseline") return PolicyKind::Unicast;
    if (name == "randomized") return PolicyKind::Randomized;
    throw std::invalid_argument("unknown policy: " + name);
}

std::string policy_name(PolicyKind kind) {
    switch (kind) {
        case PolicyKind::Multicast: return "multicast";
        case PolicyKind::Unicast: return "unicast";
        case PolicyKind::Randomized: return "randomized";
    }
    return "?";
}

double processing_weight(const NetworkModel& model, const QueueTable& Q, int node,
                         const CommodityKey& key, Status s, double V) {
    const ServiceModel& svc = model.services[key.service];
    if (key.stage >= svc.num_stages())
        throw std::invalid_argument("processing weight undefined for final-stage commodity");
    if (s == 0 || !is_subset(s, key.q))
        throw std::invalid_argument("operated status must be a nonzero subset of q");
    const FunctionModel& fn = svc.functions[key.stage - 1];
    const Status reload = key.q & ~s;
    const double q_cur = Q.at(node, model.commodity_index(key));
    const double q_reload =
        reload ? Q.at(node, model.commodity_index(key.service, key.stage, key.dest_set, reload))
               : 0.0;
    const double q_out =
        Q.at(node, model.commodity_index(key.service, key.stage + 1, key.dest_set, s));
    return (q_cur - q_reload - fn.scaling * q_out) / fn.workload -
           V * model.nodes[node].proc_cost_per_cpu;
}

double transmission_weight(const NetworkModel& model, const QueueTable& Q, int arc,
                           const CommodityKey& key, Status s, double V) {
    if (s == 0 || !is_subset(s, key.q))
        throw std::invalid_argument("operated status must be a nonzero subset of q");
    const Arc& a = model.arcs[arc];
    const Status reload = key.q & ~s;
    const double q_cur = Q.at(a.src, model.commodity_index(key));
    const double q_reload =
        reload ? Q.at(a.src, model.commodity_index(key.service, key.stage, key.dest_set, reload))
               : 0.0;
    const double q_recv =
        Q.at(a.dst, model.commodity_index(key.service, key.stage, key.dest_set, s));
    return q_cur - q_reload - q_recv - V * a.cost_per_pkt;
}

CandidateTables::CandidateTables(const NetworkModel& model, bool allow_duplication) {
    const int K = model.num_commodities();
    proc_.resize(K);
    tx_.resize(K);
    for (int c = 0; c < K; ++c) {
        const CommodityKey& key = model.commodity_key(c);
        const ServiceModel& svc = model.services[key.service];
        for (const Split& sp : duplication_splits(key.q)) {
            if (!allow_duplication && sp.reloaded != 0) continue;
            const int reload =
                sp.reloaded
                    ? model.commodity_index(key.service, key.stage, key.dest_set, sp.reloaded)
                    : -1;
            TxSplit tx;
            tx.reload = reload;
            tx.receive = model.commodity_index(key.service, key.stage, key.dest_set, sp.operated);
            tx.operated = sp.operated;
            tx_[c].push_back(tx);
            if (key.stage < svc.num_stages()) {
                const FunctionModel& fn = svc.functions[key.stage - 1];
                ProcSplit pr;
                pr.reload = reload;
                pr.output = model.commodity_index(key.service, key.stage + 1, key.dest_set,
                                                  sp.operated);
                pr.operated = sp.operated;
                pr.scaling = fn.scaling;
                pr.inv_workload = 1.0 / fn.workload;
                pr.workload = fn.workload;
                proc_[c].push_back(pr);
            }
        }
    }
}

std::size_t CandidateTables::proc_candidate_count() const {
    std::size_t n = 0;
    for (const auto& v : proc_) n += v.size();
    return n;
}

std::size_t CandidateTables::tx_candidate_count() const {
    std::size_t n = 0;
    for (const auto& v : tx_) n += v.size();
    return n;
}

namespace {

// Max-weight scan for one slot. Commodities with zero local backlog are
// skipped: every term they contribute is nonpositive, so they can never win
// the strict w > 0 test.
FlowAssignment max_weight_assignment(const NetworkModel& model, const CandidateTables& tables,
                                     const QueueTable& Q, double V) {
    FlowAssignment fa;
    const int K = model.num_commodities();

    for (int i = 0; i < model.num_nodes(); ++i) {
        const double* q_i = Q.row(i);
        const double v_cost = V * model.nodes[i].proc_cost_per_cpu;
        double best_w = 0.0;
        int best_c = -1;
        const CandidateTables::ProcSplit* best = nullptr;
        for (int c = 0; c < K; ++c) {
            const double backlog = q_i[c];
            if (backlog <= 0.0) continue;
            for (const auto& sp : tables.proc_splits()[c]) {
                const double diff = backlog - (sp.reload >= 0 ? q_i[sp.reload] : 0.0) -
                                    sp.scaling * q_i[sp.output];
                const double w = diff * sp.inv_workload - v_cost;
                if (w > best_w) {
                    best_w = w;
                    best_c = c;
                    best = &sp;
                }
            }
        }
        if (best) {
            Request r;
            r.processing = true;
            r.node = i;
            r.commodity = best_c;
            r.operated = best->operated;
            r.amount = model.nodes[i].proc_capacity * best->inv_workload;
            r.weight = best_w;
            fa.push_back(r);
        }
    }

    for (int a = 0; a < model.num_arcs(); ++a) {
        const Arc& arc = model.arcs[a];
        const double* q_i = Q.row(arc.src);
        const double* q_j = Q.row(arc.dst);
        const double v_cost = V * arc.cost_per_pkt;
        double best_w = 0.0;
        int best_c = -1;
        const CandidateTables::TxSplit* best = nullptr;
        for (int c = 0; c < K; ++c) {
            const double backlog = q_i[c];
            if (backlog <= 0.0) continue;
            for (const auto& sp : tables.tx_splits()[c]) {
                const double w = backlog - (sp.reload >= 0 ? q_i[sp.reload] : 0.0) -
                                 q_j[sp.receive] - v_cost;
                if (w > best_w) {
                    best_w = w;
                    best_c = c;
                    best = &sp;
                }
            }
        }
        if (best) {
            Request r;
            r.processing = false;
            r.node = arc.src;
            r.arc = a;
            r.commodity = best_c;
            r.operated = best->operated;
            r.amount = arc.capacity;
            r.weight = best_w;
            fa.push_back(r);
        }
    }
    return fa;
}

}  // namespace

FlowAssignment ldp_decide(const NetworkModel& model, const CandidateTables& tables,
                          const QueueTable& Q, const PolicyParams& params) {
    return max_weight_assignment(model, tables, Q, params.V);
}

FlowAssignment unicast_baseline_decide(const NetworkModel& model, const CandidateTables& tables,
                                       const QueueTable& Q, const PolicyParams& params) {
    return max_weight_assignment(model, tables, Q, params.V);
}

FlowAssignment randomized_decide(const NetworkModel& model, const RandomizedPolicySpec& spec,
                                 std::mt19937_64& rng) {
    auto validate = [](const std::vector<RandomizedPolicySpec::Option>& options) {
        double sum = 0.0;
        for (const auto& o : options) {
            if (o.probability < 0) throw std::invalid_argument("negative probability mass");
            sum += o.probability;
        }
        if (sum > 1.0 + 1e-9) throw std::invalid_argument("probability masses sum above 1");
    };
    std::uniform_real_distribution<double> unif(0.0, 1.0);

    FlowAssignment fa;
    for (int i = 0; i < model.num_nodes() && i < static_cast<int>(spec.node_options.size()); ++i) {
        validate(spec.node_options[i]);
        double u = unif(rng);
        for (const auto& o : spec.node_options[i]) {
            if (u < o.probability) {
                const CommodityKey& key = model.commodity_key(o.commodity);
                const FunctionModel& fn = model.services[key.service].functions[key.stage - 1];
                Request r;
                r.processing = true;
                r.node = i;
                r.commodity = o.commodity;
                r.operated = o.operated;
                r.amount = model.nodes[i].proc_capacity / fn.workload;
                fa.push_back(r);
                break;
            }
            u -= o.probability;
        }
    }
    for (int a = 0; a < model.num_arcs() && a < static_cast<int>(spec.arc_options.size()); ++a) {
        validate(spec.arc_options[a]);
        double u = unif(rng);
        for (const auto& o : spec.arc_options[a]) {
            if (u < o.probability) {
                Request r;
                r.processing = false;
                r.node = model.arcs[a].src;
                r.arc = a;
                r.commodity = o.commodity;
                r.operated = o.operated;
                r.amount = model.arcs[a].capacity;
                fa.push_back(r);
                break;
            }
            u -= o.probability;
        }
    }
    return fa;
}

}  // namespace mcsim
