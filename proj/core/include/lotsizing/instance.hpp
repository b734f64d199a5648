// Domain types for the three-level lot-sizing and replenishment problem with a
// distribution structure: one plant feeding warehouses, each warehouse
// feeding a disjoint set of retailers.
//
// Facility numbering is canonical everywhere in the library: facility 0 is the
// plant, 1..|W| are warehouses and |W|+1..|W|+|R| are retailers. Periods are
// 0-based. Initial inventories are zero.

#pragma once

#include <cstdint>
#include <limits>
#include <span>
#include <string>
#include <vector>

namespace lotsizing {

inline constexpr double kInfinity = std::numeric_limits<double>::infinity();

// Absolute tolerance used for feasibility residuals and cost comparisons.
inline constexpr double kTolerance = 1e-6;

// Dense row-major matrix indexed by (facility or retailer, period).
template <typename T>
class Grid {
 public:
  Grid() = default;
  Grid(int rows, int cols, T fill = T{})
      : rows_(rows), cols_(cols),
        data_(static_cast<std::size_t>(rows) * static_cast<std::size_t>(cols),
              fill) {}

  int rows() const { return rows_; }
  int cols() const { return cols_; }

  T& operator()(int row, int col) {
    return data_[static_cast<std::size_t>(row) * cols_ + col];
  }
  const T& operator()(int row, int col) const {
    return data_[static_cast<std::size_t>(row) * cols_ + col];
  }

  std::span<T> row(int r) {
    return {data_.data() + static_cast<std::size_t>(r) * cols_,
            static_cast<std::size_t>(cols_)};
  }
  std::span<const T> row(int r) const {
    return {data_.data() + static_cast<std::size_t>(r) * cols_,
            static_cast<std::size_t>(cols_)};
  }

  const std::vector<T>& data() const { return data_; }
  std::vector<T>& data() { return data_; }

  friend bool operator==(const Grid&, const Grid&) = default;

 private:
  int rows_ = 0;
  int cols_ = 0;
  std::vector<T> data_;
};

enum class FacilityKind { kPlant, kWarehouse, kRetailer };

// Plant / warehouse / retailer tree. Retailer and warehouse arguments named
// `retailer` or `warehouse` are 0-based within their own level; arguments
// named `facility` use the canonical facility numbering.
class SupplyNetwork {
 public:
  SupplyNetwork() = default;

  // retailer_warehouse[r] is the warehouse (0-based) serving retailer r.
  // Throws std::invalid_argument if any retailer points to a missing
  // warehouse or there are no warehouses.
  SupplyNetwork(int num_warehouses, std::vector<int> retailer_warehouse);

  int num_warehouses() const { return num_warehouses_; }
  int num_retailers() const { return static_cast<int>(assignment_.size()); }
  int num_facilities() const { return 1 + num_warehouses() + num_retailers(); }

  static constexpr int plant() { return 0; }
  int warehouse_facility(int warehouse) const { return 1 + warehouse; }
  int retailer_facility(int retailer) const {
    return 1 + num_warehouses_ + retailer;
  }
  // Inverse of retailer_facility; only valid for retailer facilities.
  int retailer_index(int facility) const {
    return facility - 1 - num_warehouses_;
  }

  FacilityKind kind(int facility) const;

  // Upstream facility, or -1 for the plant.
  int parent(int facility) const;

  // Direct downstream facilities (delta(i)).
  std::span<const int> children(int facility) const {
    return children_[static_cast<std::size_t>(facility)];
  }

  int warehouse_of(int retailer) const {
    return assignment_[static_cast<std::size_t>(retailer)];
  }
  const std::vector<int>& assignment() const { return assignment_; }

  friend bool operator==(const SupplyNetwork& a, const SupplyNetwork& b) {
    return a.num_warehouses_ == b.num_warehouses_ &&
           a.assignment_ == b.assignment_;
  }

 private:
  int num_warehouses_ = 0;
  std::vector<int> assignment_;
  std::vector<std::vector<int>> children_;
};

// Provenance of a generated instance. Carried through files untouched.
struct InstanceMeta {
  std::string id;
  std::uint64_t seed = 0;
  std::string balance;              // "balanced" | "unbalanced" | ""
  double plant_capacity_factor = kInfinity;
  double storage_capacity_factor = kInfinity;
  std::string storage_site = "none";  // "warehouses" | "retailers" | "none"
  std::string assignment_rule;

  friend bool operator==(const InstanceMeta&, const InstanceMeta&) = default;
};

struct Instance {
  SupplyNetwork network;
  int horizon = 0;
  Grid<std::int64_t> demand;      // retailer x period
  Grid<double> setup_cost;        // facility x period
  Grid<double> holding_cost;      // facility x period
  std::vector<double> plant_capacity;  // per period, kInfinity if unbounded
  Grid<double> storage_capacity;  // facility x period, kInfinity if unbounded
  InstanceMeta meta;

  int num_facilities() const { return network.num_facilities(); }

  // Empty instance skeleton with unbounded capacities and zero data.
  static Instance empty(SupplyNetwork network, int horizon);

  bool has_plant_capacity() const;
  bool has_storage_capacity() const;

  // Throws std::invalid_argument describing the first violated invariant.
  void validate() const;

  friend bool operator==(const Instance&, const Instance&) = default;
};

// Physical plan: setups y, flows x (production at the plant, inbound shipment
// elsewhere) and end-of-period inventories s, all facility x period.
struct Solution {
  Grid<double> y;
  Grid<double> x;
  Grid<double> s;
  double objective = 0.0;

  static Solution zeros(int num_facilities, int horizon);

  friend bool operator==(const Solution&, const Solution&) = default;
};

// d^i_t for every facility: retailers copy their demand, warehouses sum their
// retailers, the plant sums everything.
Grid<std::int64_t> aggregate_demands(const Instance& instance);

// Inclusive sum of the aggregated demand of `facility` over periods
// [first, last] (0-based). Throws std::out_of_range on bad indices.
std::int64_t cumulative_demand(const Instance& instance, int facility,
                               int first, int last);

// Same, on a precomputed aggregate (no range checks beyond debug asserts).
std::int64_t cumulative_demand(const Grid<std::int64_t>& aggregated,
                               int facility, int first, int last);

// Setup plus holding cost of the plan. Ignores solution.objective.
double total_cost(const Instance& instance, const Solution& solution);

// Echelon stock I^i_t: own inventory plus all inventory downstream.
Grid<double> echelon_stock(const Instance& instance, const Grid<double>& stock);

// Inverse of echelon_stock: s^i_t = I^i_t - sum_{j in delta(i)} I^j_t.
Grid<double> stock_from_echelon(const Instance& instance,
                                const Grid<double>& echelon);

// Per-facility holding cost on echelon stock: hc^p for the plant and
// hc^i - hc^parent(i) elsewhere. Sum over I equals sum over s with hc.
Grid<double> echelon_holding_cost(const Instance& instance);

}  // namespace lotsizing
