#include "mcsim/audit.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <sstream>
#include <stdexcept>

namespace mcsim {

bool AuditReport::pass() const {
    return std::all_of(checks.begin(), checks.end(), [](const CheckResult& c) { return c.pass; });
}

std::string AuditReport::to_string() const {
    std::ostringstream out;
    for (const auto& c : checks) {
        out << (c.pass ? "PASS" : "FAIL") << ' ' << c.name
            << " max_violation=" << c.max_violation;
        if (!c.locus.empty()) out << " at " << c.locus;
        out << '\n';
    }
    return out.str();
}

namespace {

struct ContentIndex {
    std::vector<int> service_offset;
    int num_contents = 0;
    int num_dest_sets = 0;

    explicit ContentIndex(const NetworkModel& model) {
        num_dest_sets = static_cast<int>(model.dest_sets.size());
        int stages = 0;
        for (const auto& svc : model.services) {
            service_offset.push_back(stages);
            stages += svc.num_stages();
        }
        num_contents = stages * num_dest_sets;
    }
    int at(int service, int stage, int dest_set) const {
        return (service_offset[service] + stage - 1) * num_dest_sets + dest_set;
    }
};

}  // namespace

AuditReport check_conservation(const NetworkModel& model, const Ledger& ledger, double rel_tol) {
    long first = 0, last = 0;
    bool have_snapshot = false;
    for (const auto& r : ledger) {
        if (r.kind != LedgerRecord::Kind::Snapshot) continue;
        if (!have_snapshot) {
            first = last = r.slot;
            have_snapshot = true;
        } else {
            first = std::min(first, r.slot);
            last = std::max(last, r.slot);
        }
    }
    if (!have_snapshot)
        throw std::invalid_argument("ledger has no boundary snapshots for conservation audit");

    const ContentIndex contents(model);
    const int N = model.num_nodes();
    const int maxD = [&] {
        std::size_t d = 1;
        for (const auto& ds : model.dest_sets) d = std::max(d, ds.size());
        return static_cast<int>(d);
    }();
    const std::size_t cells =
        static_cast<std::size_t>(N) * contents.num_contents * maxD;
    std::vector<double> inflow(cells, 0.0), outflow(cells, 0.0), dq(cells, 0.0);

    auto cell = [&](int node, int cid, int k) {
        return (static_cast<std::size_t>(node) * contents.num_contents + cid) * maxD + k;
    };
    auto add_bits = [&](std::vector<double>& acc, int node, int cid, Status bits, double amount) {
        for (int k = 0; bits; ++k, bits >>= 1)
            if (bits & 1) acc[cell(node, cid, k)] += amount;
    };

    for (const auto& r : ledger) {
        switch (r.kind) {
            case LedgerRecord::Kind::Arrival: {
                add_bits(inflow, r.node, contents.at(r.service, r.stage, r.dest_set), r.q,
                         r.amount);
                break;
            }
            case LedgerRecord::Kind::Tx: {
                const int cid = contents.at(r.service, r.stage, r.dest_set);
                add_bits(outflow, r.node, cid, r.q, r.amount);
                add_bits(inflow, r.peer, cid, r.s, r.amount);
                const Status reload = r.q & ~r.s;
                if (reload) add_bits(inflow, r.node, cid, reload, r.amount);
                break;
            }
            case LedgerRecord::Kind::Proc: {
                const int cid = contents.at(r.service, r.stage, r.dest_set);
                add_bits(outflow, r.node, cid, r.q, r.amount);
                const double scaling = model.services[r.service].functions[r.stage - 1].scaling;
                add_bits(inflow, r.node, contents.at(r.service, r.stage + 1, r.dest_set), r.s,
                         scaling * r.amount);
                const Status reload = r.q & ~r.s;
                if (reload) add_bits(inflow, r.node, cid, reload, r.amount);
                break;
            }
            case LedgerRecord::Kind::Snapshot: {
                if (r.node < 0 || r.q == 0) break;  // boundary marker
                if (r.slot != first && r.slot != last) break;
                const double sign = (r.slot == last) ? 1.0 : -1.0;
                add_bits(dq, r.node, contents.at(r.service, r.stage, r.dest_set), r.q,
                         sign * r.amount);
                break;
            }
            case LedgerRecord::Kind::Delivery:
                break;  // destination nodes are excluded below
        }
    }

    CheckResult check;
    check.name = "flow-conservation";
    for (int node = 0; node < N; ++node) {
        if (model.is_source[node] || model.is_destination[node]) continue;
        for (int phi = 0; phi < static_cast<int>(model.services.size()); ++phi) {
            const int stages = model.services[phi].num_stages();
            for (int m = 1; m <= stages; ++m) {
                for (int ds = 0; ds < contents.num_dest_sets; ++ds) {
                    const int D = static_cast<int>(model.dest_sets[ds].size());
                    const int cid = contents.at(phi, m, ds);
                    for (int k = 0; k < D; ++k) {
                        const std::size_t idx = cell(node, cid, k);
                        const double in = inflow[idx];
                        const double out = outflow[idx];
                        const double viol = std::abs(in - out - dq[idx]);
                        const double rel = viol / std::max({in, out, 1.0});
                        if (rel > check.max_violation) {
                            check.max_violation = rel;
                            std::ostringstream locus;
                            locus << "node=" << node << " service=" << phi << " stage=" << m
                                  << " dest_set=" << ds << " k=" << k << " slots=[" << first
                                  << ',' << last << ')';
                            check.locus = locus.str();
                        }
                    }
                }
            }
        }
    }
    check.pass = check.max_violation <= rel_tol;
    return AuditReport{{check}};
}

AuditReport check_capacity(const NetworkModel& model, const Ledger& ledger) {
    std::map<std::pair<int, int>, int> arc_of;
    for (int a = 0; a < model.num_arcs(); ++a)
        arc_of[{model.arcs[a].src, model.arcs[a].dst}] = a;

    CheckResult cpu_check{"processing-capacity", true, 0.0, ""};
    CheckResult link_check{"transmission-capacity", true, 0.0, ""};

    std::map<std::pair<long, int>, double> cpu;        // (slot, node)
    std::map<std::pair<long, int>, double> link_load;  // (slot, arc)
    for (const auto& r : ledger) {
        const double requested = r.amount + r.dummy;
        if (r.kind == LedgerRecord::Kind::Proc) {
            cpu[{r.slot, r.node}] +=
                requested * model.services[r.service].functions[r.stage - 1].workload;
        } else if (r.kind == LedgerRecord::Kind::Tx) {
            auto it = arc_of.find({r.node, r.peer});
            if (it == arc_of.end()) throw std::invalid_argument("ledger references unknown arc");
            link_load[{r.slot, it->second}] += requested;
        }
    }
    for (const auto& [key, used] : cpu) {
        const double cap = model.nodes[key.second].proc_capacity;
        const double excess = used - cap;
        if (excess > cap * 1e-9 + 1e-9 && excess > cpu_check.max_violation) {
            cpu_check.max_violation = excess;
            cpu_check.pass = false;
            cpu_check.locus =
                "slot=" + std::to_string(key.first) + " node=" + std::to_string(key.second);
        }
    }
    for (const auto& [key, used] : link_load) {
        const double cap = model.arcs[key.second].capacity;
        const double excess = used - cap;
        if (excess > cap * 1e-9 + 1e-9 && excess > link_check.max_violation) {
            link_check.max_violation = excess;
            link_check.pass = false;
            link_check.locus =
                "slot=" + std::to_string(key.first) + " arc=" + std::to_string(key.second);
        }
    }
    return AuditReport{{cpu_check, link_check}};
}

namespace {

struct Option {
    Request request;  // amount at the capacity vertex
    double gain = 0.0;
};

std::vector<std::vector<Option>> interface_options(const NetworkModel& model, const QueueTable& Q,
                                                   const PolicyParams& params) {
    const bool allow_duplication = params.kind != PolicyKind::Unicast;
    std::vector<std::vector<Option>> interfaces;

    for (int i = 0; i < model.num_nodes(); ++i) {
        std::vector<Option> opts;
        opts.push_back({});  // idle
        for (int c = 0; c < model.num_commodities(); ++c) {
            const CommodityKey& key = model.commodity_key(c);
            const ServiceModel& svc = model.services[key.service];
            if (key.stage >= svc.num_stages()) continue;
            for (const Split& sp : duplication_splits(key.q)) {
                if (!allow_duplication && sp.reloaded != 0) continue;
                Option o;
                o.request.processing = true;
                o.request.node = i;
                o.request.commodity = c;
                o.request.operated = sp.operated;
                o.request.weight = processing_weight(model, Q, i, key, sp.operated, params.V);
                o.request.amount =
                    model.nodes[i].proc_capacity / svc.functions[key.stage - 1].workload;
                // the weight is already per unit of CPU, and every tuple gets the
                // full CPU budget, so the objective contribution scales with C_i
                o.gain = o.request.weight * model.nodes[i].proc_capacity;
                opts.push_back(o);
            }
        }
        interfaces.push_back(std::move(opts));
    }
    for (int a = 0; a < model.num_arcs(); ++a) {
        std::vector<Option> opts;
        opts.push_back({});
        for (int c = 0; c < model.num_commodities(); ++c) {
            const CommodityKey& key = model.commodity_key(c);
            for (const Split& sp : duplication_splits(key.q)) {
                if (!allow_duplication && sp.reloaded != 0) continue;
                Option o;
                o.request.processing = false;
                o.request.node = model.arcs[a].src;
                o.request.arc = a;
                o.request.commodity = c;
                o.request.operated = sp.operated;
                o.request.weight = transmission_weight(model, Q, a, key, sp.operated, params.V);
                o.request.amount = model.arcs[a].capacity;
                o.gain = o.request.weight * o.request.amount;
                opts.push_back(o);
            }
        }
        interfaces.push_back(std::move(opts));
    }
    return interfaces;
}

}  // namespace

FlowAssignment brute_force_decision(const NetworkModel& model, const QueueTable& Q,
                                    const PolicyParams& params) {
    const auto interfaces = interface_options(model, Q, params);

    double combos = 1.0;
    for (const auto& opts : interfaces) combos *= static_cast<double>(opts.size());
    if (combos > 2e6)
        throw std::invalid_argument("instance too large for brute-force enumeration");

    const std::size_t n = interfaces.size();
    std::vector<std::size_t> choice(n, 0), best_choice(n, 0);
    double best_total = 0.0;
    bool have_best = false;

    // odometer over joint choices; earlier combos are lexicographically
    // smaller, and strict improvement keeps the first maximizer found
    while (true) {
        double total = 0.0;
        for (std::size_t i = 0; i < n; ++i) total += interfaces[i][choice[i]].gain;
        if (!have_best || total > best_total) {
            best_total = total;
            best_choice = choice;
            have_best = true;
        }
        bool done = true;
        for (std::size_t pos = n; pos-- > 0;) {
            if (++choice[pos] < interfaces[pos].size()) {
                done = false;
                break;
            }
            choice[pos] = 0;
        }
        if (done) break;
    }

    FlowAssignment fa;
    for (std::size_t i = 0; i < n; ++i) {
        if (best_choice[i] == 0) continue;  // idle
        fa.push_back(interfaces[i][best_choice[i]].request);
    }
    return fa;
}

bool same_assignment(const FlowAssignment& a, const FlowAssignment& b) {
    auto key = [](const Request& r) {
        return std::tuple(r.processing, r.node, r.arc, r.commodity, r.operated);
    };
    auto sorted = [&](FlowAssignment v) {
        std::sort(v.begin(), v.end(), [&](const Request& x, const Request& y) {
            return key(x) < key(y);
        });
        return v;
    };
    const FlowAssignment sa = sorted(a), sb = sorted(b);
    if (sa.size() != sb.size()) return false;
    for (std::size_t i = 0; i < sa.size(); ++i) {
        if (key(sa[i]) != key(sb[i])) return false;
        if (std::abs(sa[i].amount - sb[i].amount) > 1e-9 * std::max(1.0, sa[i].amount))
            return false;
    }
    return true;
}

YcutBounds ycut_capacity_oracle(const NetworkModel& model) {
    if (model.num_nodes() != 4 || model.dest_sets.size() != 1 ||
        model.dest_sets[0].size() != 2 || model.streams.empty())
        throw std::invalid_argument("not a Y-network");
    const int d1 = model.dest_sets[0][0];
    const int d2 = model.dest_sets[0][1];
    const int source = model.streams[0].source;
    int relay = -1;
    for (int i = 0; i < 4; ++i)
        if (i != d1 && i != d2 && i != source) relay = i;
    if (relay < 0) throw std::invalid_argument("not a Y-network");

    auto find_arc = [&](int s, int d) -> const Arc* {
        for (const auto& arc : model.arcs)
            if (arc.src == s && arc.dst == d) return &arc;
        return nullptr;
    };
    const Arc* up = find_arc(source, relay);
    const Arc* left = find_arc(relay, d1);
    const Arc* right = find_arc(relay, d2);
    if (!up || !left || !right) throw std::invalid_argument("not a Y-network");
    const double kappa = up->capacity;
    if (std::abs(left->capacity - kappa) > 1e-9 || std::abs(right->capacity - kappa) > 1e-9)
        throw std::invalid_argument("Y-network arcs must have equal capacity");
    for (const auto& svc : model.services)
        for (const auto& fn : svc.functions) {
            if (std::abs(fn.scaling - 1.0) > 1e-12)
                throw std::invalid_argument("Y-network oracle requires a pass-through service");
            for (const auto& node : model.nodes)
                if (node.proc_capacity / fn.workload < kappa - 1e-9)
                    throw std::invalid_argument("Y-network oracle requires ample CPU");
        }
    return {kappa, kappa / 2.0};
}

}  // namespace mcsim
