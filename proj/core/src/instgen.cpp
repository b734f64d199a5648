#include "lotsizing/instgen.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <regex>
#include <stdexcept>

namespace lotsizing {
namespace {

enum Stream : std::uint64_t { kDemandStream = 0, kSetupStream = 1, kHoldingStream = 2 };

std::string format_factor(double factor) {
  if (!std::isfinite(factor)) return "inf";
  char buf[32];
  std::snprintf(buf, sizeof(buf), "%.2f", factor);
  return buf;
}

}  // namespace

std::string to_string(Balance balance) {
  return balance == Balance::kBalanced ? "balanced" : "unbalanced";
}

std::string to_string(StorageSite site) {
  switch (site) {
    case StorageSite::kNone:
      return "none";
    case StorageSite::kWarehouses:
      return "warehouses";
    case StorageSite::kRetailers:
      return "retailers";
  }
  return "none";
}

Balance parse_balance(const std::string& text) {
  if (text == "balanced" || text == "bal") return Balance::kBalanced;
  if (text == "unbalanced" || text == "unb") return Balance::kUnbalanced;
  throw std::invalid_argument("unknown balance class '" + text + "'");
}

StorageSite parse_storage_site(const std::string& text) {
  if (text == "none") return StorageSite::kNone;
  if (text == "warehouses" || text == "w") return StorageSite::kWarehouses;
  if (text == "retailers" || text == "r") return StorageSite::kRetailers;
  throw std::invalid_argument("unknown storage site '" + text + "'");
}

void GenSpec::validate() const {
  if (num_warehouses < 1) throw std::invalid_argument("need >= 1 warehouse");
  if (num_retailers < num_warehouses) {
    throw std::invalid_argument("need at least as many retailers as warehouses");
  }
  if (horizon < 1) throw std::invalid_argument("horizon must be >= 1");
  if (!(plant_capacity_factor > 0.0)) {
    throw std::invalid_argument("plant capacity factor must be > 0");
  }
  const bool storage_bounded = std::isfinite(storage_capacity_factor);
  if (storage_bounded && !(storage_capacity_factor > 0.0)) {
    throw std::invalid_argument("storage capacity factor must be > 0");
  }
  if (storage_bounded != (storage_site != StorageSite::kNone)) {
    throw std::invalid_argument(
        "storage site must be 'none' exactly when the storage factor is "
        "unbounded");
  }
}

std::string GenSpec::instance_id() const {
  std::string id = "R" + std::to_string(num_retailers) + "-W" +
                   std::to_string(num_warehouses) + "-T" +
                   std::to_string(horizon) + "-" +
                   (balance == Balance::kBalanced ? "bal" : "unb") + "-C" +
                   format_factor(plant_capacity_factor) + "-Cs" +
                   format_factor(storage_capacity_factor);
  if (storage_site == StorageSite::kWarehouses) id += "w";
  if (storage_site == StorageSite::kRetailers) id += "r";
  id += "-s" + std::to_string(seed);
  return id;
}

std::optional<GenSpec> parse_instance_id(const std::string& id) {
  static const std::regex pattern(
      R"(R(\d+)-W(\d+)-T(\d+)-(bal|unb)-C(inf|[0-9.]+)-Cs(inf|[0-9.]+)([wr]?)-s(\d+))");
  std::smatch m;
  if (!std::regex_match(id, m, pattern)) return std::nullopt;
  auto factor = [](const std::string& text) {
    return text == "inf" ? kInfinity : std::stod(text);
  };
  GenSpec spec;
  try {
    spec.num_retailers = std::stoi(m[1]);
    spec.num_warehouses = std::stoi(m[2]);
    spec.horizon = std::stoi(m[3]);
    spec.balance = m[4] == "bal" ? Balance::kBalanced : Balance::kUnbalanced;
    spec.plant_capacity_factor = factor(m[5]);
    spec.storage_capacity_factor = factor(m[6]);
    spec.storage_site = m[7] == "w"   ? StorageSite::kWarehouses
                        : m[7] == "r" ? StorageSite::kRetailers
                                      : StorageSite::kNone;
    spec.seed = std::stoull(m[8]);
  } catch (const std::exception&) {
    return std::nullopt;
  }
  return spec;
}

SupplyNetwork assign_retailers(const GenSpec& spec) {
  const int num_w = spec.num_warehouses;
  const int num_r = spec.num_retailers;
  if (num_w < 1 || num_w > num_r) {
    throw std::invalid_argument("assign_retailers needs 1 <= |W| <= |R|");
  }
  std::vector<int> assignment(static_cast<std::size_t>(num_r));
  if (spec.balance == Balance::kBalanced) {
    for (int r = 0; r < num_r; ++r) assignment[static_cast<std::size_t>(r)] = r % num_w;
    return SupplyNetwork(num_w, std::move(assignment));
  }
  int next = 0;
  for (int w = 0; w < num_w; ++w) {
    const int remaining = num_r - next;
    int count = remaining;
    if (w + 1 < num_w) {
      const int share = w < 30 ? (num_r >> (w + 1)) : 0;
      count = std::clamp(share, 1, remaining - (num_w - 1 - w));
    }
    for (int k = 0; k < count; ++k) assignment[static_cast<std::size_t>(next++)] = w;
  }
  return SupplyNetwork(num_w, std::move(assignment));
}

Instance derive_storage_caps(Instance instance, double factor, StorageSite site) {
  if (!std::isfinite(factor) || site == StorageSite::kNone) return instance;
  const Grid<std::int64_t> agg = aggregate_demands(instance);
  const SupplyNetwork& net = instance.network;
  const int horizon = instance.horizon;
  for (int i = 1; i < net.num_facilities(); ++i) {
    const FacilityKind kind = net.kind(i);
    const bool selected =
        (site == StorageSite::kWarehouses && kind == FacilityKind::kWarehouse) ||
        (site == StorageSite::kRetailers && kind == FacilityKind::kRetailer);
    const double total =
        static_cast<double>(cumulative_demand(agg, i, 0, horizon - 1));
    for (int t = 0; t < horizon; ++t) {
      instance.storage_capacity(i, t) =
          selected ? factor / horizon * total : kInfinity;
    }
  }
  instance.meta.storage_capacity_factor = factor;
  instance.meta.storage_site = to_string(site);
  return instance;
}

Instance generate(const GenSpec& spec) {
  spec.validate();
  Instance inst = Instance::empty(assign_retailers(spec), spec.horizon);
  const SupplyNetwork& net = inst.network;
  const int horizon = spec.horizon;

  SplitMix64 demand_rng(SplitMix64::stream_seed(spec.seed, kDemandStream));
  for (int r = 0; r < net.num_retailers(); ++r) {
    for (int t = 0; t < horizon; ++t) inst.demand(r, t) = demand_rng.uniform_int(5, 100);
  }

  SplitMix64 setup_rng(SplitMix64::stream_seed(spec.seed, kSetupStream));
  for (int i = 0; i < net.num_facilities(); ++i) {
    double sc = 0.0;
    switch (net.kind(i)) {
      case FacilityKind::kPlant:
        sc = setup_rng.uniform_real(30000.0, 45000.0);
        break;
      case FacilityKind::kWarehouse:
        sc = setup_rng.uniform_real(1500.0, 4500.0);
        break;
      case FacilityKind::kRetailer:
        sc = setup_rng.uniform_real(5.0, 100.0);
        break;
    }
    for (int t = 0; t < horizon; ++t) inst.setup_cost(i, t) = sc;
  }

  SplitMix64 holding_rng(SplitMix64::stream_seed(spec.seed, kHoldingStream));
  for (int i = 0; i < net.num_facilities(); ++i) {
    double hc = 0.0;
    switch (net.kind(i)) {
      case FacilityKind::kPlant:
        hc = 0.25;
        break;
      case FacilityKind::kWarehouse:
        hc = 0.5;
        break;
      case FacilityKind::kRetailer:
        hc = holding_rng.uniform_real(0.5, 1.0);
        break;
    }
    for (int t = 0; t < horizon; ++t) inst.holding_cost(i, t) = hc;
  }

  if (std::isfinite(spec.plant_capacity_factor)) {
    std::int64_t total = 0;
    for (std::int64_t d : inst.demand.data()) total += d;
    const double cap =
        spec.plant_capacity_factor / horizon * static_cast<double>(total);
    std::fill(inst.plant_capacity.begin(), inst.plant_capacity.end(), cap);
  }

  inst = derive_storage_caps(std::move(inst), spec.storage_capacity_factor,
                             spec.storage_site);

  inst.meta.id = spec.instance_id();
  inst.meta.seed = spec.seed;
  inst.meta.balance = to_string(spec.balance);
  inst.meta.plant_capacity_factor = spec.plant_capacity_factor;
  inst.meta.storage_capacity_factor = spec.storage_capacity_factor;
  inst.meta.storage_site = to_string(spec.storage_site);
  inst.meta.assignment_rule =
      spec.balance == Balance::kBalanced ? "modulo" : "geometric-halving";
  return inst;
}

}  // namespace lotsizing
