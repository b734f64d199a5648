// Small hand-built instances shared by the unit tests.

#pragma once

#include "lotsizing/instance.hpp"

namespace lotsizing::testing {

// One warehouse, two retailers, two periods; optimum 120.5.
inline Instance tiny1() {
  Instance inst = Instance::empty(SupplyNetwork(1, {0, 0}), 2);
  inst.demand(0, 0) = 5;
  inst.demand(0, 1) = 5;
  inst.demand(1, 0) = 0;
  inst.demand(1, 1) = 10;
  const double sc[] = {100, 10, 1, 1};
  const double hc[] = {0.25, 0.5, 1.0, 1.0};
  for (int i = 0; i < 4; ++i) {
    for (int t = 0; t < 2; ++t) {
      inst.setup_cost(i, t) = sc[i];
      inst.holding_cost(i, t) = hc[i];
    }
  }
  inst.meta.id = "tiny1";
  return inst;
}

// The optimal plan of tiny1: one production run and one warehouse shipment
// in period 1, the warehouse holds 15 units into period 2.
inline Solution tiny1_optimum() {
  Solution s = Solution::zeros(4, 2);
  s.y(0, 0) = 1;
  s.x(0, 0) = 20;
  s.y(1, 0) = 1;
  s.x(1, 0) = 20;
  s.s(1, 0) = 15;
  s.y(2, 0) = 1;
  s.x(2, 0) = 5;
  s.y(2, 1) = 1;
  s.x(2, 1) = 5;
  s.y(3, 1) = 1;
  s.x(3, 1) = 10;
  s.objective = 120.5;
  return s;
}

}  // namespace lotsizing::testing
