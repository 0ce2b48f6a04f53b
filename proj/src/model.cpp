#include "mcsim/model.hpp"

#include <algorithm>
#include <stdexcept>
#include <unordered_map>

namespace mcsim {

std::vector<CommodityKey> enumerate_commodities(const std::vector<ServiceModel>& services,
                                                const std::vector<std::vector<int>>& dest_sets) {
    std::vector<CommodityKey> keys;
    for (int phi = 0; phi < static_cast<int>(services.size()); ++phi) {
        const int stages = services[phi].num_stages();
        for (int m = 1; m <= stages; ++m) {
            for (int ds = 0; ds < static_cast<int>(dest_sets.size()); ++ds) {
                const Status full = full_status(static_cast<int>(dest_sets[ds].size()));
                for (Status q = 1; q <= full; ++q) {
                    keys.push_back({phi, m, ds, q});
                }
            }
        }
    }
    return keys;
}

void NetworkModel::build_index() {
    ds_offset_.assign(dest_sets.size(), 0);
    stage_stride_ = 0;
    for (std::size_t ds = 0; ds < dest_sets.size(); ++ds) {
        ds_offset_[ds] = stage_stride_;
        stage_stride_ += (1 << dest_sets[ds].size()) - 1;
    }
    service_offset_.assign(services.size(), 0);
    int offset = 0;
    for (std::size_t phi = 0; phi < services.size(); ++phi) {
        service_offset_[phi] = offset;
        offset += services[phi].num_stages() * stage_stride_;
    }
    keys_ = enumerate_commodities(services, dest_sets);

    delivery_offset_.assign(dest_sets.size(), 0);
    num_delivery_slots_ = 0;
    for (std::size_t ds = 0; ds < dest_sets.size(); ++ds) {
        delivery_offset_[ds] = num_delivery_slots_;
        num_delivery_slots_ += static_cast<int>(dest_sets[ds].size() * services.size());
    }
}

int NetworkModel::commodity_index(int service, int stage, int dest_set, Status q) const {
    return service_offset_[service] + (stage - 1) * stage_stride_ + ds_offset_[dest_set] +
           static_cast<int>(q) - 1;
}

int NetworkModel::delivery_index(int dest_set, int member, int service) const {
    return delivery_offset_[dest_set] + member * static_cast<int>(services.size()) + service;
}

NetworkModel build_network(const ScenarioConfig& config) {
    if (config.slot_ms <= 0) throw std::invalid_argument("slot length must be positive");
    if (config.packet_kb <= 0) throw std::invalid_argument("packet size must be positive");

    NetworkModel model;
    model.name = config.name;
    model.tau = config.slot_ms * 1e-3;
    model.packet_bits = config.packet_kb * 1e3;

    std::unordered_map<int, int> node_index;
    for (const auto& n : config.nodes) {
        if (n.cpus < 0) throw std::invalid_argument("negative processing capacity");
        if (n.cost_per_cpu_s < 0) throw std::invalid_argument("negative processing cost");
        if (!node_index.emplace(n.id, model.num_nodes()).second)
            throw std::invalid_argument("duplicate node id " + std::to_string(n.id));
        model.nodes.push_back({n.cpus, n.cost_per_cpu_s * model.tau});
    }
    auto resolve_node = [&](int id) {
        auto it = node_index.find(id);
        if (it == node_index.end())
            throw std::invalid_argument("reference to undeclared node " + std::to_string(id));
        return it->second;
    };

    model.out_arcs.assign(model.nodes.size(), {});
    model.in_arcs.assign(model.nodes.size(), {});
    auto add_arc = [&](int src, int dst, const ScenarioConfig::Link& l) {
        if (l.gbps < 0) throw std::invalid_argument("negative link capacity");
        if (l.cost_per_gb < 0) throw std::invalid_argument("negative link cost");
        if (src == dst) throw std::invalid_argument("self-loop link");
        Arc arc;
        arc.src = src;
        arc.dst = dst;
        arc.capacity = l.gbps * 1e9 * model.tau / model.packet_bits;
        arc.cost_per_pkt = l.cost_per_gb * model.packet_bits / 1e9;
        model.out_arcs[src].push_back(model.num_arcs());
        model.in_arcs[dst].push_back(model.num_arcs());
        model.arcs.push_back(arc);
    };
    for (const auto& l : config.links) {
        const int s = resolve_node(l.src);
        const int d = resolve_node(l.dst);
        add_arc(s, d, l);
        if (l.bidirectional) add_arc(d, s, l);
    }

    for (const auto& svc : config.services) {
        if (svc.functions.empty())
            throw std::invalid_argument("service must have at least one function");
        ServiceModel sm;
        for (const auto& f : svc.functions) {
            if (f.scaling <= 0) throw std::invalid_argument("scaling factor must be positive");
            if (f.mbps_per_cpu <= 0) throw std::invalid_argument("function rate must be positive");
            // 1 CPU supports f.mbps_per_cpu of input; workload = CPU per input packet
            const double pps_per_cpu = f.mbps_per_cpu * 1e6 * model.tau / model.packet_bits;
            sm.functions.push_back({f.scaling, 1.0 / pps_per_cpu});
        }
        model.services.push_back(std::move(sm));
    }

    for (const auto& ds : config.dest_sets) {
        if (ds.empty()) throw std::invalid_argument("empty destination set");
        if (ds.size() > static_cast<std::size_t>(kMaxDestinations))
            throw std::invalid_argument("destination set larger than supported bound");
        std::vector<int> members;
        for (int id : ds) members.push_back(resolve_node(id));
        std::vector<int> sorted = members;
        std::sort(sorted.begin(), sorted.end());
        if (std::adjacent_find(sorted.begin(), sorted.end()) != sorted.end())
            throw std::invalid_argument("destination set members must be distinct");
        model.dest_sets.push_back(std::move(members));
    }

    model.is_source.assign(model.nodes.size(), false);
    model.is_destination.assign(model.nodes.size(), false);
    for (const auto& ds : model.dest_sets)
        for (int n : ds) model.is_destination[n] = true;
    for (int id : config.source_nodes) {
        const int src = resolve_node(id);
        model.is_source[src] = true;
        for (int phi = 0; phi < static_cast<int>(model.services.size()); ++phi)
            for (int ds = 0; ds < static_cast<int>(model.dest_sets.size()); ++ds)
                model.streams.push_back({src, phi, ds});
    }

    if (config.lambda_mbps < 0) throw std::invalid_argument("negative arrival rate");
    if (config.V < 0) throw std::invalid_argument("negative V");
    model.default_lambda_pps = config.lambda_mbps * 1e6 * model.tau / model.packet_bits;
    model.default_V = config.V;
    model.default_policy = config.policy;
    model.default_slots = config.slots;
    model.default_seed = config.seed;
    model.default_sample_every = config.sample_every;

    model.build_index();
    return model;
}

}  // namespace mcsim
