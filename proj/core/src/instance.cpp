#include "lotsizing/instance.hpp"

#include <cassert>
#include <cmath>
#include <stdexcept>
#include <string>

namespace lotsizing {

SupplyNetwork::SupplyNetwork(int num_warehouses,
                             std::vector<int> retailer_warehouse)
    : num_warehouses_(num_warehouses), assignment_(std::move(retailer_warehouse)) {
  if (num_warehouses_ < 1) {
    throw std::invalid_argument("network needs at least one warehouse");
  }
  children_.assign(static_cast<std::size_t>(num_facilities()), {});
  for (int w = 0; w < num_warehouses_; ++w) {
    children_[0].push_back(warehouse_facility(w));
  }
  for (int r = 0; r < num_retailers(); ++r) {
    const int w = assignment_[static_cast<std::size_t>(r)];
    if (w < 0 || w >= num_warehouses_) {
      throw std::invalid_argument("retailer " + std::to_string(r) +
                                  " assigned to nonexistent warehouse " +
                                  std::to_string(w));
    }
    children_[static_cast<std::size_t>(warehouse_facility(w))].push_back(
        retailer_facility(r));
  }
}

FacilityKind SupplyNetwork::kind(int facility) const {
  if (facility == plant()) return FacilityKind::kPlant;
  if (facility <= num_warehouses_) return FacilityKind::kWarehouse;
  return FacilityKind::kRetailer;
}

int SupplyNetwork::parent(int facility) const {
  switch (kind(facility)) {
    case FacilityKind::kPlant:
      return -1;
    case FacilityKind::kWarehouse:
      return plant();
    case FacilityKind::kRetailer:
      return warehouse_facility(warehouse_of(retailer_index(facility)));
  }
  return -1;
}

Instance Instance::empty(SupplyNetwork network, int horizon) {
  Instance inst;
  const int f = network.num_facilities();
  const int r = network.num_retailers();
  inst.network = std::move(network);
  inst.horizon = horizon;
  inst.demand = Grid<std::int64_t>(r, horizon, 0);
  inst.setup_cost = Grid<double>(f, horizon, 0.0);
  inst.holding_cost = Grid<double>(f, horizon, 0.0);
  inst.plant_capacity.assign(static_cast<std::size_t>(horizon), kInfinity);
  inst.storage_capacity = Grid<double>(f, horizon, kInfinity);
  return inst;
}

bool Instance::has_plant_capacity() const {
  for (double c : plant_capacity) {
    if (std::isfinite(c)) return true;
  }
  return false;
}

bool Instance::has_storage_capacity() const {
  for (double c : storage_capacity.data()) {
    if (std::isfinite(c)) return true;
  }
  return false;
}

void Instance::validate() const {
  const int f = network.num_facilities();
  if (horizon < 1) throw std::invalid_argument("horizon must be >= 1");
  if (demand.rows() != network.num_retailers() || demand.cols() != horizon) {
    throw std::invalid_argument("demand matrix has wrong dimensions");
  }
  auto check_grid = [&](const Grid<double>& g, const char* name) {
    if (g.rows() != f || g.cols() != horizon) {
      throw std::invalid_argument(std::string(name) + " has wrong dimensions");
    }
  };
  check_grid(setup_cost, "setup_cost");
  check_grid(holding_cost, "holding_cost");
  check_grid(storage_capacity, "storage_capacity");
  if (static_cast<int>(plant_capacity.size()) != horizon) {
    throw std::invalid_argument("plant_capacity has wrong length");
  }
  for (std::int64_t d : demand.data()) {
    if (d < 0) throw std::invalid_argument("negative demand");
  }
  for (double c : setup_cost.data()) {
    if (!(c >= 0.0) || !std::isfinite(c)) {
      throw std::invalid_argument("setup costs must be finite and >= 0");
    }
  }
  for (double c : holding_cost.data()) {
    if (!(c >= 0.0) || !std::isfinite(c)) {
      throw std::invalid_argument("holding costs must be finite and >= 0");
    }
  }
  for (double c : plant_capacity) {
    if (!(c >= 0.0)) throw std::invalid_argument("plant capacity must be >= 0");
  }
  for (int t = 0; t < horizon; ++t) {
    if (std::isfinite(storage_capacity(SupplyNetwork::plant(), t))) {
      throw std::invalid_argument(
          "storage capacity is only defined for warehouses and retailers");
    }
  }
  for (double c : storage_capacity.data()) {
    if (!(c >= 0.0)) throw std::invalid_argument("storage capacity must be >= 0");
  }
}

Solution Solution::zeros(int num_facilities, int horizon) {
  Solution s;
  s.y = Grid<double>(num_facilities, horizon, 0.0);
  s.x = Grid<double>(num_facilities, horizon, 0.0);
  s.s = Grid<double>(num_facilities, horizon, 0.0);
  return s;
}

Grid<std::int64_t> aggregate_demands(const Instance& instance) {
  const SupplyNetwork& net = instance.network;
  const int horizon = instance.horizon;
  Grid<std::int64_t> agg(net.num_facilities(), horizon, 0);
  for (int r = 0; r < net.num_retailers(); ++r) {
    const int rf = net.retailer_facility(r);
    const int wf = net.warehouse_facility(net.warehouse_of(r));
    for (int t = 0; t < horizon; ++t) {
      const std::int64_t d = instance.demand(r, t);
      agg(rf, t) = d;
      agg(wf, t) += d;
      agg(SupplyNetwork::plant(), t) += d;
    }
  }
  return agg;
}

std::int64_t cumulative_demand(const Grid<std::int64_t>& aggregated,
                               int facility, int first, int last) {
  assert(first <= last);
  std::int64_t sum = 0;
  for (int t = first; t <= last; ++t) sum += aggregated(facility, t);
  return sum;
}

std::int64_t cumulative_demand(const Instance& instance, int facility,
                               int first, int last) {
  if (facility < 0 || facility >= instance.num_facilities()) {
    throw std::out_of_range("facility index out of range");
  }
  if (first < 0 || first > last || last >= instance.horizon) {
    throw std::out_of_range("period range [" + std::to_string(first) + ", " +
                            std::to_string(last) + "] invalid for horizon " +
                            std::to_string(instance.horizon));
  }
  return cumulative_demand(aggregate_demands(instance), facility, first, last);
}

double total_cost(const Instance& instance, const Solution& solution) {
  double cost = 0.0;
  for (int t = 0; t < instance.horizon; ++t) {
    for (int i = 0; i < instance.num_facilities(); ++i) {
      cost += instance.setup_cost(i, t) * solution.y(i, t) +
              instance.holding_cost(i, t) * solution.s(i, t);
    }
  }
  return cost;
}

Grid<double> echelon_stock(const Instance& instance, const Grid<double>& stock) {
  const SupplyNetwork& net = instance.network;
  Grid<double> echelon = stock;
  // Retailers are their own echelon; accumulate upward level by level.
  for (int w = 0; w < net.num_warehouses(); ++w) {
    const int wf = net.warehouse_facility(w);
    for (int child : net.children(wf)) {
      for (int t = 0; t < instance.horizon; ++t) {
        echelon(wf, t) += echelon(child, t);
      }
    }
  }
  for (int child : net.children(SupplyNetwork::plant())) {
    for (int t = 0; t < instance.horizon; ++t) {
      echelon(SupplyNetwork::plant(), t) += echelon(child, t);
    }
  }
  return echelon;
}

Grid<double> stock_from_echelon(const Instance& instance,
                                const Grid<double>& echelon) {
  const SupplyNetwork& net = instance.network;
  Grid<double> stock = echelon;
  for (int i = 0; i < net.num_facilities(); ++i) {
    for (int child : net.children(i)) {
      for (int t = 0; t < instance.horizon; ++t) {
        stock(i, t) -= echelon(child, t);
      }
    }
  }
  return stock;
}

Grid<double> echelon_holding_cost(const Instance& instance) {
  const SupplyNetwork& net = instance.network;
  Grid<double> cost(net.num_facilities(), instance.horizon, 0.0);
  for (int i = 0; i < net.num_facilities(); ++i) {
    const int parent = net.parent(i);
    for (int t = 0; t < instance.horizon; ++t) {
      cost(i, t) = instance.holding_cost(i, t) -
                   (parent < 0 ? 0.0 : instance.holding_cost(parent, t));
    }
  }
  return cost;
}

}  // namespace lotsizing
