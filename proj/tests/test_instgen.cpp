#include <gtest/gtest.h>

#include <algorithm>
#include <filesystem>
#include <numeric>

#include "fixtures.hpp"
#include "json.hpp"
#include "lotsizing/instgen.hpp"
#include "lotsizing/io.hpp"

namespace lotsizing {
namespace {

GenSpec spec_of(int r, int w, int t, double c, std::uint64_t seed) {
  GenSpec s;
  s.num_retailers = r;
  s.num_warehouses = w;
  s.horizon = t;
  s.plant_capacity_factor = c;
  s.seed = seed;
  return s;
}

std::vector<int> loads(const SupplyNetwork& net) {
  std::vector<int> out;
  for (int w = 0; w < net.num_warehouses(); ++w) {
    out.push_back(static_cast<int>(net.children(net.warehouse_facility(w)).size()));
  }
  return out;
}

TEST(Generate, Deterministic) {
  const GenSpec s = spec_of(50, 5, 15, 1.5, 7);
  EXPECT_EQ(generate(s), generate(s));
  EXPECT_EQ(instance_to_json(generate(s)), instance_to_json(generate(s)));
  EXPECT_NE(generate(s), generate(spec_of(50, 5, 15, 1.5, 8)));
}

TEST(Generate, DataRanges) {
  const Instance inst = generate(spec_of(20, 4, 6, kInfinity, 3));
  for (std::int64_t d : inst.demand.data()) {
    EXPECT_GE(d, 5);
    EXPECT_LE(d, 100);
  }
  const SupplyNetwork& net = inst.network;
  for (int t = 0; t < inst.horizon; ++t) {
    EXPECT_EQ(inst.holding_cost(0, t), 0.25);
    EXPECT_GE(inst.setup_cost(0, t), 30000);
    EXPECT_LE(inst.setup_cost(0, t), 45000);
    for (int w = 0; w < 4; ++w) {
      const int f = net.warehouse_facility(w);
      EXPECT_EQ(inst.holding_cost(f, t), 0.5);
      EXPECT_GE(inst.setup_cost(f, t), 1500);
      EXPECT_LE(inst.setup_cost(f, t), 4500);
    }
    for (int r = 0; r < 20; ++r) {
      const int f = net.retailer_facility(r);
      EXPECT_GE(inst.holding_cost(f, t), 0.5);
      EXPECT_LE(inst.holding_cost(f, t), 1.0);
      EXPECT_GE(inst.setup_cost(f, t), 5);
      EXPECT_LE(inst.setup_cost(f, t), 100);
      // time-invariant
      EXPECT_EQ(inst.setup_cost(f, t), inst.setup_cost(f, 0));
    }
  }
  EXPECT_FALSE(inst.has_plant_capacity());
}

TEST(Generate, PlantCapacityFormula) {
  const Instance inst = generate(spec_of(50, 5, 15, 1.5, 7));
  double total = 0;
  for (std::int64_t d : inst.demand.data()) total += static_cast<double>(d);
  for (double c : inst.plant_capacity) EXPECT_DOUBLE_EQ(c, 1.5 / 15 * total);
}

TEST(Generate, CapacityFormulaHandValue) {
  // total demand 10500 over 15 periods at C = 1.5 gives 1050 per period
  EXPECT_DOUBLE_EQ(1.5 / 15 * 10500.0, 1050.0);
}

TEST(Generate, AggregateCapacityCoversDemand) {
  for (std::uint64_t seed = 1; seed <= 20; ++seed) {
    const Instance inst = generate(spec_of(10, 2, 6, 1.5, seed));
    const auto agg = aggregate_demands(inst);
    double cap = 0;
    std::int64_t dem = 0;
    for (int t = 0; t < inst.horizon; ++t) {
      cap += inst.plant_capacity[static_cast<std::size_t>(t)];
      dem += agg(0, t);
      EXPECT_GE(cap + 1e-9, static_cast<double>(dem)) << inst.meta.id << " period " << t + 1;
    }
  }
}

TEST(Generate, RejectsInconsistentSpec) {
  GenSpec s = spec_of(10, 2, 6, 1.5, 1);
  s.storage_site = StorageSite::kRetailers;
  EXPECT_THROW(generate(s), std::invalid_argument);
  s = spec_of(10, 2, 6, 1.5, 1);
  s.storage_capacity_factor = 2.0;
  EXPECT_THROW(generate(s), std::invalid_argument);
  EXPECT_THROW(generate(spec_of(2, 3, 6, 1.5, 1)), std::invalid_argument);
}

TEST(AssignRetailers, BalancedEqualSplit) {
  GenSpec s = spec_of(10, 5, 1, kInfinity, 0);
  EXPECT_EQ(loads(assign_retailers(s)), (std::vector<int>{2, 2, 2, 2, 2}));
}

TEST(AssignRetailers, BalancedModRule) {
  GenSpec s = spec_of(7, 5, 1, kInfinity, 0);
  const SupplyNetwork net = assign_retailers(s);
  EXPECT_EQ(loads(net), (std::vector<int>{2, 2, 1, 1, 1}));
  for (int r = 0; r < 7; ++r) EXPECT_EQ(net.warehouse_of(r), r % 5);
}

TEST(AssignRetailers, UnbalancedHalving) {
  GenSpec s = spec_of(8, 3, 1, kInfinity, 0);
  s.balance = Balance::kUnbalanced;
  EXPECT_EQ(loads(assign_retailers(s)), (std::vector<int>{4, 2, 2}));
}

TEST(AssignRetailers, UnbalancedServesEveryWarehouse) {
  GenSpec s = spec_of(6, 5, 1, kInfinity, 0);
  s.balance = Balance::kUnbalanced;
  const auto l = loads(assign_retailers(s));
  EXPECT_EQ(std::accumulate(l.begin(), l.end(), 0), 6);
  for (int v : l) EXPECT_GE(v, 1);
}

TEST(DeriveStorageCaps, RetailerFormula) {
  Instance inst = Instance::empty(SupplyNetwork(1, {0}), 15);
  for (int t = 0; t < 15; ++t) inst.demand(0, t) = 20;  // sum 300
  const Instance capped = derive_storage_caps(inst, 2.0, StorageSite::kRetailers);
  for (int t = 0; t < 15; ++t) {
    EXPECT_DOUBLE_EQ(capped.storage_capacity(2, t), 40.0);
    EXPECT_FALSE(std::isfinite(capped.storage_capacity(1, t)));
  }
}

TEST(DeriveStorageCaps, WarehouseSiteLeavesRetailersOpen) {
  const Instance inst = generate(spec_of(6, 2, 4, kInfinity, 2));
  const Instance capped = derive_storage_caps(inst, 1.5, StorageSite::kWarehouses);
  for (int t = 0; t < 4; ++t) {
    for (int r = 0; r < 6; ++r) {
      EXPECT_FALSE(std::isfinite(capped.storage_capacity(inst.network.retailer_facility(r), t)));
    }
    EXPECT_TRUE(std::isfinite(capped.storage_capacity(1, t)));
  }
}

TEST(DeriveStorageCaps, UnboundedIsIdentity) {
  const Instance inst = generate(spec_of(6, 2, 4, kInfinity, 2));
  EXPECT_EQ(derive_storage_caps(inst, kInfinity, StorageSite::kRetailers), inst);
  EXPECT_EQ(derive_storage_caps(inst, 1.5, StorageSite::kNone), inst);
}

TEST(InstanceIo, RoundTrip) {
  GenSpec s = spec_of(9, 3, 5, 1.75, 11);
  s.balance = Balance::kUnbalanced;
  s.storage_site = StorageSite::kRetailers;
  s.storage_capacity_factor = 1.5;
  const Instance inst = generate(s);
  const auto path = std::filesystem::temp_directory_path() / "lotsizing_io_roundtrip.json";
  write_instance(inst, path);
  EXPECT_EQ(read_instance(path), inst);
  std::filesystem::remove(path);
  EXPECT_EQ(instance_from_json(instance_to_json(testing::tiny1())), testing::tiny1());
}

TEST(InstanceIo, RejectsBadFiles) {
  auto doc = nlohmann::json::parse(instance_to_json(testing::tiny1()));
  auto bad = doc;
  bad["warehouses"][0]["id"] = 7;
  EXPECT_THROW(instance_from_json(bad.dump()), ParseError);
  bad = doc;
  bad["demands"]["2"][0] = -3;
  EXPECT_THROW(instance_from_json(bad.dump()), ParseError);
  bad = doc;
  bad["format_version"] = "0";
  EXPECT_THROW(instance_from_json(bad.dump()), ParseError);
  EXPECT_THROW(instance_from_json("{\"horizon\": "), ParseError);
}

TEST(SolutionIo, RoundTrip) {
  const Solution s = testing::tiny1_optimum();
  EXPECT_EQ(solution_from_json(solution_to_json(s), 4, 2), s);
}

TEST(InstanceId, ParsesBack) {
  GenSpec s = spec_of(25, 5, 15, 1.75, 42);
  s.storage_site = StorageSite::kWarehouses;
  s.storage_capacity_factor = 2.0;
  const auto back = parse_instance_id(s.instance_id());
  ASSERT_TRUE(back);
  EXPECT_EQ(back->instance_id(), s.instance_id());
  EXPECT_EQ(back->storage_site, StorageSite::kWarehouses);
  EXPECT_FALSE(parse_instance_id("tiny1"));
}

}  // namespace
}  // namespace lotsizing
