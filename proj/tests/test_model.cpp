#include <doctest.h>

#include <cmath>
#include <set>

#include "mcsim/model.hpp"
#include "mcsim/scenario.hpp"

using namespace mcsim;

TEST_CASE("abilene scenario normalizes to packets per slot") {
    const NetworkModel model = build_network(abilene_scenario());
    CHECK(model.num_nodes() == 11);
    CHECK(model.num_arcs() == 28);  // 14 undirected links, two arcs each
    for (const auto& arc : model.arcs) CHECK(arc.capacity == doctest::Approx(2000.0));
    // 2.3 CPUs, 1/r = 300 Mbps/CPU -> 690 packets/slot of stage-1 service-1 input
    const double max_rate = model.nodes[0].proc_capacity / model.services[0].functions[0].workload;
    CHECK(max_rate == doctest::Approx(690.0));
    // lambda 20 Mbps -> 20 packets/slot
    CHECK(model.default_lambda_pps == doctest::Approx(20.0));
    CHECK(model.streams.size() == 4 * 2 * 10);
}

TEST_CASE("degenerate and invalid topologies") {
    ScenarioConfig c;
    c.name = "lonely";
    c.nodes = {{1, 1.0, 0.0}};
    ScenarioConfig::Service svc;
    svc.functions = {{1.0, 1.0}};
    c.services = {svc};
    c.dest_sets = {{1}};
    c.source_nodes = {1};

    SUBCASE("single node, zero links is valid") {
        const NetworkModel m = build_network(c);
        CHECK(m.out_arcs[0].empty());
        CHECK(m.in_arcs[0].empty());
    }
    SUBCASE("link referencing undeclared node") {
        c.links = {{1, 99, 1.0, 0.0, true}};
        CHECK_THROWS_AS(build_network(c), std::invalid_argument);
    }
    SUBCASE("negative capacity") {
        c.nodes[0].cpus = -1.0;
        CHECK_THROWS_AS(build_network(c), std::invalid_argument);
    }
    SUBCASE("zero packet size") {
        c.packet_kb = 0.0;
        CHECK_THROWS_AS(build_network(c), std::invalid_argument);
    }
}

TEST_CASE("commodity enumeration") {
    SUBCASE("abilene-sized product") {
        const NetworkModel model = build_network(abilene_scenario());
        // 2 services x 3 stages x 10 dest sets x 3 statuses (D = 2)
        CHECK(model.num_commodities() == 180);
    }
    SUBCASE("unicast degenerate") {
        ServiceModel svc;
        svc.functions = {{1.0, 1.0}};
        const auto keys = enumerate_commodities({svc}, {{0}});
        CHECK(keys.size() == 2);  // stages 1, 2 with the single status
    }
    SUBCASE("empty service list") {
        CHECK(enumerate_commodities({}, {{0, 1}}).empty());
    }
    SUBCASE("index is a bijection") {
        const NetworkModel model = build_network(abilene_scenario());
        std::set<int> seen;
        for (int i = 0; i < model.num_commodities(); ++i) {
            const CommodityKey& key = model.commodity_key(i);
            CHECK(model.commodity_index(key) == i);
            seen.insert(model.commodity_index(key));
        }
        CHECK(static_cast<int>(seen.size()) == model.num_commodities());
    }
}

TEST_CASE("duplication splits") {
    SUBCASE("two destinations") {
        const auto splits = duplication_splits(0b11);
        REQUIRE(splits.size() == 3);
        // ascending operated status
        CHECK(splits[0].operated == 0b01);
        CHECK(splits[0].reloaded == 0b10);
        CHECK(splits[1].operated == 0b10);
        CHECK(splits[1].reloaded == 0b01);
        CHECK(splits[2].operated == 0b11);
        CHECK(splits[2].reloaded == 0b00);
    }
    SUBCASE("single destination") {
        const auto splits = duplication_splits(0b01);
        REQUIRE(splits.size() == 1);
        CHECK(splits[0].operated == 0b01);
        CHECK(splits[0].reloaded == 0);
    }
    SUBCASE("zero status rejected") { CHECK_THROWS_AS(duplication_splits(0), std::invalid_argument); }
    SUBCASE("split count is 3^D - 2^D for D = 1..6") {
        for (int d = 1; d <= 6; ++d) {
            std::size_t total = 0;
            for (Status q = 1; q <= full_status(d); ++q) {
                for (const Split& sp : duplication_splits(q)) {
                    CHECK((sp.operated | sp.reloaded) == q);
                    CHECK((sp.operated & sp.reloaded) == 0);
                    CHECK(sp.operated != 0);
                }
                total += duplication_splits(q).size();
            }
            const std::size_t expected = static_cast<std::size_t>(std::pow(3, d) - std::pow(2, d));
            CHECK(total == expected);
        }
    }
}

TEST_CASE("unit conversion round trip") {
    const NetworkModel model = build_network(abilene_scenario());
    for (double pps : {1.0, 42.0, 10000.0, 0.125}) {
        CHECK(model.mbps_to_pps(model.pps_to_mbps(pps)) == doctest::Approx(pps).epsilon(1e-15));
    }
}
