#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "mcsim/status.hpp"

namespace mcsim {

// ---------------------------------------------------------------------------
// Scenario description in physical units (as written in scenario files).
// ---------------------------------------------------------------------------

struct ScenarioConfig {
    struct Node {
        int id = 0;
        double cpus = 0.0;            // processing capacity C_i, CPU units
        double cost_per_cpu_s = 0.0;  // processing cost e_i, per CPU per second
    };
    struct Link {
        int src = 0;
        int dst = 0;
        double gbps = 0.0;         // transmission capacity C_ij
        double cost_per_gb = 0.0;  // transmission cost e_ij
        bool bidirectional = true; // expands to two independent directed arcs
    };
    struct Function {
        double scaling = 1.0;        // output packets per input packet
        double mbps_per_cpu = 0.0;   // supportable input rate per CPU (1/workload)
    };
    struct Service {
        int id = 0;
        std::vector<Function> functions;  // length M - 1, M >= 2
    };

    std::string name;
    std::vector<Node> nodes;
    std::vector<Link> links;
    std::vector<Service> services;
    std::vector<std::vector<int>> dest_sets;  // node ids, ordering fixes status bits
    std::vector<int> source_nodes;            // each source feeds every (service, dest set)

    double slot_ms = 1.0;     // slot length tau
    double packet_kb = 1.0;   // packet size F
    double lambda_mbps = 0.0; // per (source, service, dest set) stream
    double V = 0.0;
    std::string policy = "multicast";  // multicast | unicast | randomized
    long slots = 100000;
    std::uint64_t seed = 1;
    int sample_every = 100;
};

// ---------------------------------------------------------------------------
// Internal model: everything in packets and slots.
// ---------------------------------------------------------------------------

// Queue class identifier: (service, stage, destination set, duplication status).
struct CommodityKey {
    int service = 0;   // index into NetworkModel::services
    int stage = 1;     // 1..M
    int dest_set = 0;  // index into NetworkModel::dest_sets
    Status q = 0;

    friend bool operator==(const CommodityKey&, const CommodityKey&) = default;
    friend auto operator<=>(const CommodityKey&, const CommodityKey&) = default;
};

struct Arc {
    int src = 0;
    int dst = 0;
    double capacity = 0.0;      // packets per slot
    double cost_per_pkt = 0.0;  // internal per-slot unit
};

struct NodeModel {
    double proc_capacity = 0.0;      // CPU units per slot
    double proc_cost_per_cpu = 0.0;  // internal per-slot unit
};

struct FunctionModel {
    double scaling = 1.0;   // xi
    double workload = 0.0;  // CPU units per input packet
};

struct ServiceModel {
    std::vector<FunctionModel> functions;
    int num_stages() const { return static_cast<int>(functions.size()) + 1; }
};

struct Stream {
    int source = 0;  // node index
    int service = 0;
    int dest_set = 0;
};

class NetworkModel {
public:
    std::string name;
    std::vector<NodeModel> nodes;
    std::vector<Arc> arcs;
    std::vector<std::vector<int>> out_arcs;  // per node, arc indices
    std::vector<std::vector<int>> in_arcs;
    std::vector<ServiceModel> services;
    std::vector<std::vector<int>> dest_sets;  // node indices, bit k = member k
    std::vector<Stream> streams;
    std::vector<bool> is_source;       // per node
    std::vector<bool> is_destination;  // per node (member of any dest set)

    double tau = 1e-3;          // seconds per slot
    double packet_bits = 1e3;

    // defaults carried from the scenario file; CLI flags override per run
    double default_lambda_pps = 0.0;
    double default_V = 0.0;
    std::string default_policy = "multicast";
    long default_slots = 100000;
    std::uint64_t default_seed = 1;
    int default_sample_every = 100;

    int num_nodes() const { return static_cast<int>(nodes.size()); }
    int num_arcs() const { return static_cast<int>(arcs.size()); }
    int num_commodities() const { return static_cast<int>(keys_.size()); }

    // Dense commodity index; enumeration order is lexicographic in
    // (service, stage, dest_set, q), with q as an integer.
    int commodity_index(int service, int stage, int dest_set, Status q) const;
    int commodity_index(const CommodityKey& k) const {
        return commodity_index(k.service, k.stage, k.dest_set, k.q);
    }
    const CommodityKey& commodity_key(int index) const { return keys_[index]; }
    const std::vector<CommodityKey>& commodities() const { return keys_; }

    // Delivery counter index per (dest_set, member k, service).
    int delivery_index(int dest_set, int member, int service) const;
    int num_delivery_slots() const { return num_delivery_slots_; }

    // Unit conversions (packets/slot <-> Mbps).
    double mbps_to_pps(double mbps) const { return mbps * 1e6 * tau / packet_bits; }
    double pps_to_mbps(double pps) const { return pps * packet_bits / (1e6 * tau); }

    void build_index();  // called by build_network

private:
    std::vector<CommodityKey> keys_;
    std::vector<int> service_offset_;   // per service, start of its index range
    std::vector<int> ds_offset_;        // per dest set, offset within one stage block
    int stage_stride_ = 0;              // sum over dest sets of (2^D - 1)
    std::vector<int> delivery_offset_;  // per dest set
    int num_delivery_slots_ = 0;
};

// Validates the config and normalizes physical units to packets/slots.
NetworkModel build_network(const ScenarioConfig& config);

// One key per (service, stage 1..M, dest set, nonzero status), in index order.
std::vector<CommodityKey> enumerate_commodities(const std::vector<ServiceModel>& services,
                                                const std::vector<std::vector<int>>& dest_sets);

}  // namespace mcsim
