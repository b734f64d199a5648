#include "lotsizing/io.hpp"

#include <cmath>
#include <fstream>
#include <optional>
#include <sstream>

#include "json.hpp"

namespace lotsizing {
namespace {

using Json = nlohmann::ordered_json;

[[noreturn]] void fail(const std::string& field, const std::string& what) {
  throw ParseError("field '" + field + "': " + what);
}

const Json& require(const Json& doc, const char* key) {
  if (!doc.is_object() || !doc.contains(key)) fail(key, "missing");
  return doc.at(key);
}

double read_number(const Json& value, const std::string& field) {
  if (!value.is_number()) fail(field, "expected a number");
  const double v = value.get<double>();
  if (!std::isfinite(v)) fail(field, "expected a finite number");
  return v;
}

// Nullable factor: null means unbounded.
Json factor_to_json(double value) {
  return std::isfinite(value) ? Json(value) : Json(nullptr);
}

double factor_from_json(const Json& meta, const char* key) {
  if (!meta.contains(key) || meta.at(key).is_null()) return kInfinity;
  return read_number(meta.at(key), std::string("meta.") + key);
}

bool time_invariant(std::span<const double> values) {
  for (double v : values) {
    if (!(v == values.front())) return false;
  }
  return true;
}

Json row_to_json(std::span<const double> values) {
  if (!values.empty() && time_invariant(values)) return values.front();
  return Json(std::vector<double>(values.begin(), values.end()));
}

// Scalar or per-period array into `out`; nonnegative finite values only.
void row_from_json(const Json& value, const std::string& field,
                   std::span<double> out) {
  if (value.is_array()) {
    if (value.size() != out.size()) {
      fail(field, "expected " + std::to_string(out.size()) + " periods, got " +
                      std::to_string(value.size()));
    }
    for (std::size_t t = 0; t < out.size(); ++t) {
      out[t] = read_number(value[t], field + "[" + std::to_string(t) + "]");
      if (out[t] < 0.0) fail(field + "[" + std::to_string(t) + "]", "negative value");
    }
    return;
  }
  const double v = read_number(value, field);
  if (v < 0.0) fail(field, "negative value");
  for (double& o : out) o = v;
}

int parse_facility_key(const std::string& key, const std::string& field,
                       int num_facilities) {
  std::size_t used = 0;
  int id = -1;
  try {
    id = std::stoi(key, &used);
  } catch (const std::exception&) {
    fail(field, "facility id '" + key + "' is not an integer");
  }
  if (used != key.size() || id < 0 || id >= num_facilities) {
    fail(field, "facility id '" + key + "' out of range");
  }
  return id;
}

Json parse_document(const std::string& text) {
  try {
    return Json::parse(text);
  } catch (const Json::parse_error& e) {
    throw ParseError(std::string("syntax error: ") + e.what());
  }
}

Json grid_to_json(const Grid<double>& grid) {
  Json out = Json::object();
  for (int i = 0; i < grid.rows(); ++i) {
    auto row = grid.row(i);
    out[std::to_string(i)] = std::vector<double>(row.begin(), row.end());
  }
  return out;
}

Grid<double> grid_from_json(const Json& value, const std::string& field,
                            int num_facilities, int horizon) {
  Grid<double> grid(num_facilities, horizon, 0.0);
  if (!value.is_object()) fail(field, "expected an object keyed by facility id");
  for (const auto& [key, row] : value.items()) {
    const std::string sub = field + "." + key;
    const int i = parse_facility_key(key, sub, num_facilities);
    if (!row.is_array() || static_cast<int>(row.size()) != horizon) {
      fail(sub, "expected an array of " + std::to_string(horizon) + " values");
    }
    for (int t = 0; t < horizon; ++t) {
      grid(i, t) = read_number(row[static_cast<std::size_t>(t)],
                               sub + "[" + std::to_string(t) + "]");
    }
  }
  return grid;
}

}  // namespace

std::string instance_to_json(const Instance& inst) {
  const SupplyNetwork& net = inst.network;
  Json doc = Json::object();
  doc["format_version"] = kFormatVersion;
  doc["meta"] = {
      {"id", inst.meta.id},
      {"seed", inst.meta.seed},
      {"balance", inst.meta.balance},
      {"plant_capacity_factor", factor_to_json(inst.meta.plant_capacity_factor)},
      {"storage_capacity_factor",
       factor_to_json(inst.meta.storage_capacity_factor)},
      {"storage_site", inst.meta.storage_site},
      {"assignment_rule", inst.meta.assignment_rule},
  };
  doc["horizon"] = inst.horizon;

  Json warehouses = Json::array();
  for (int w = 0; w < net.num_warehouses(); ++w) {
    const int wf = net.warehouse_facility(w);
    auto kids = net.children(wf);
    warehouses.push_back(
        {{"id", wf}, {"retailers", std::vector<int>(kids.begin(), kids.end())}});
  }
  doc["warehouses"] = std::move(warehouses);

  Json demands = Json::object();
  for (int r = 0; r < net.num_retailers(); ++r) {
    auto row = inst.demand.row(r);
    demands[std::to_string(net.retailer_facility(r))] =
        std::vector<std::int64_t>(row.begin(), row.end());
  }
  doc["demands"] = std::move(demands);

  Json setup = Json::object();
  Json holding = Json::object();
  for (int i = 0; i < net.num_facilities(); ++i) {
    setup[std::to_string(i)] = row_to_json(inst.setup_cost.row(i));
    holding[std::to_string(i)] = row_to_json(inst.holding_cost.row(i));
  }
  doc["setup_cost"] = std::move(setup);
  doc["holding_cost"] = std::move(holding);

  if (inst.has_plant_capacity()) {
    doc["plant_capacity"] = row_to_json(inst.plant_capacity);
  } else {
    doc["plant_capacity"] = nullptr;
  }

  Json storage = Json::object();
  for (int i = 0; i < net.num_facilities(); ++i) {
    auto row = inst.storage_capacity.row(i);
    bool any_finite = false;
    for (double v : row) any_finite = any_finite || std::isfinite(v);
    if (any_finite) storage[std::to_string(i)] = row_to_json(row);
  }
  doc["storage_capacity"] = std::move(storage);
  return doc.dump(1) + "\n";
}

Instance instance_from_json(const std::string& text) {
  const Json doc = parse_document(text);
  if (!doc.is_object()) throw ParseError("instance document must be an object");

  const Json& version = require(doc, "format_version");
  if (!version.is_string() || version.get<std::string>() != kFormatVersion) {
    throw ParseError("unsupported format_version " + version.dump() +
                     " (expected \"" + kFormatVersion + "\")");
  }

  const Json& horizon_json = require(doc, "horizon");
  if (!horizon_json.is_number_integer() || horizon_json.get<int>() < 1) {
    fail("horizon", "expected a positive integer");
  }
  const int horizon = horizon_json.get<int>();

  const Json& warehouses = require(doc, "warehouses");
  if (!warehouses.is_array() || warehouses.empty()) {
    fail("warehouses", "expected a non-empty array");
  }
  const int num_w = static_cast<int>(warehouses.size());
  std::vector<std::pair<int, int>> listed;  // (retailer facility id, warehouse)
  for (std::size_t k = 0; k < warehouses.size(); ++k) {
    const std::string field = "warehouses[" + std::to_string(k) + "]";
    const Json& entry = warehouses[k];
    if (!entry.is_object() || !entry.contains("id") ||
        !entry.at("id").is_number_integer()) {
      fail(field + ".id", "expected an integer facility id");
    }
    const int id = entry.at("id").get<int>();
    if (id < 1 || id > num_w) {
      fail(field + ".id", "warehouse id " + std::to_string(id) +
                              " does not exist (valid: 1.." +
                              std::to_string(num_w) + ")");
    }
    if (!entry.contains("retailers") || !entry.at("retailers").is_array()) {
      fail(field + ".retailers", "expected an array");
    }
    for (const Json& r : entry.at("retailers")) {
      if (!r.is_number_integer()) fail(field + ".retailers", "expected integers");
      listed.emplace_back(r.get<int>(), id - 1);
    }
  }
  const int num_r = static_cast<int>(listed.size());
  std::vector<int> assignment(static_cast<std::size_t>(num_r), -1);
  for (const auto& [rf, w] : listed) {
    const int r = rf - 1 - num_w;
    if (r < 0 || r >= num_r) {
      fail("warehouses", "retailer id " + std::to_string(rf) + " out of range");
    }
    if (assignment[static_cast<std::size_t>(r)] != -1) {
      fail("warehouses", "retailer id " + std::to_string(rf) +
                             " assigned to more than one warehouse");
    }
    assignment[static_cast<std::size_t>(r)] = w;
  }

  Instance inst = Instance::empty(SupplyNetwork(num_w, std::move(assignment)),
                                  horizon);
  const SupplyNetwork& net = inst.network;
  const int num_f = net.num_facilities();

  const Json& demands = require(doc, "demands");
  if (!demands.is_object()) fail("demands", "expected an object");
  std::vector<bool> seen(static_cast<std::size_t>(num_r), false);
  for (const auto& [key, row] : demands.items()) {
    const std::string field = "demands." + key;
    const int f = parse_facility_key(key, field, num_f);
    if (net.kind(f) != FacilityKind::kRetailer) {
      fail(field, "demand given for non-retailer facility " + key);
    }
    const int r = net.retailer_index(f);
    if (!row.is_array() || static_cast<int>(row.size()) != horizon) {
      fail(field, "expected an array of " + std::to_string(horizon) + " integers");
    }
    for (int t = 0; t < horizon; ++t) {
      const Json& v = row[static_cast<std::size_t>(t)];
      const std::string sub = field + "[" + std::to_string(t) + "]";
      if (!v.is_number_integer()) fail(sub, "expected an integer demand");
      const auto d = v.get<std::int64_t>();
      if (d < 0) fail(sub, "negative demand " + std::to_string(d));
      inst.demand(r, t) = d;
    }
    seen[static_cast<std::size_t>(r)] = true;
  }
  for (int r = 0; r < num_r; ++r) {
    if (!seen[static_cast<std::size_t>(r)]) {
      fail("demands", "missing retailer " + std::to_string(net.retailer_facility(r)));
    }
  }

  auto read_cost = [&](const char* name, Grid<double>& grid) {
    const Json& costs = require(doc, name);
    if (!costs.is_object()) fail(name, "expected an object");
    std::vector<bool> have(static_cast<std::size_t>(num_f), false);
    for (const auto& [key, value] : costs.items()) {
      const std::string field = std::string(name) + "." + key;
      const int f = parse_facility_key(key, field, num_f);
      row_from_json(value, field, grid.row(f));
      have[static_cast<std::size_t>(f)] = true;
    }
    for (int f = 0; f < num_f; ++f) {
      if (!have[static_cast<std::size_t>(f)]) {
        fail(name, "missing facility " + std::to_string(f));
      }
    }
  };
  read_cost("setup_cost", inst.setup_cost);
  read_cost("holding_cost", inst.holding_cost);

  const Json& plant = require(doc, "plant_capacity");
  if (!plant.is_null()) row_from_json(plant, "plant_capacity", inst.plant_capacity);

  if (doc.contains("storage_capacity")) {
    const Json& storage = doc.at("storage_capacity");
    if (!storage.is_object()) fail("storage_capacity", "expected an object");
    for (const auto& [key, value] : storage.items()) {
      const std::string field = "storage_capacity." + key;
      const int f = parse_facility_key(key, field, num_f);
      if (f == SupplyNetwork::plant()) {
        fail(field, "storage capacity is only defined for warehouses and retailers");
      }
      row_from_json(value, field, inst.storage_capacity.row(f));
    }
  }

  if (doc.contains("meta")) {
    const Json& meta = doc.at("meta");
    if (!meta.is_object()) fail("meta", "expected an object");
    auto str = [&](const char* key) {
      if (!meta.contains(key)) return std::string();
      if (!meta.at(key).is_string()) fail(std::string("meta.") + key, "expected a string");
      return meta.at(key).get<std::string>();
    };
    inst.meta.id = str("id");
    inst.meta.balance = str("balance");
    inst.meta.storage_site = meta.contains("storage_site") ? str("storage_site") : "none";
    inst.meta.assignment_rule = str("assignment_rule");
    if (meta.contains("seed")) {
      if (!meta.at("seed").is_number_unsigned() && !meta.at("seed").is_number_integer()) {
        fail("meta.seed", "expected an integer");
      }
      inst.meta.seed = meta.at("seed").get<std::uint64_t>();
    }
    inst.meta.plant_capacity_factor = factor_from_json(meta, "plant_capacity_factor");
    inst.meta.storage_capacity_factor =
        factor_from_json(meta, "storage_capacity_factor");
  }

  try {
    inst.validate();
  } catch (const std::invalid_argument& e) {
    throw ParseError(std::string("invalid instance: ") + e.what());
  }
  return inst;
}

std::string read_text_file(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw std::runtime_error("cannot open " + path.string());
  std::ostringstream buf;
  buf << in.rdbuf();
  return buf.str();
}

void write_text_file(const std::filesystem::path& path, const std::string& text) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw std::runtime_error("cannot write " + path.string());
  out << text;
  if (!out) throw std::runtime_error("write failed for " + path.string());
}

void write_instance(const Instance& instance, const std::filesystem::path& path) {
  write_text_file(path, instance_to_json(instance));
}

Instance read_instance(const std::filesystem::path& path) {
  try {
    return instance_from_json(read_text_file(path));
  } catch (const ParseError& e) {
    throw ParseError(path.string() + ": " + e.what());
  }
}

std::string solution_to_json(const Solution& solution) {
  Json doc = Json::object();
  doc["objective"] = solution.objective;
  doc["y"] = grid_to_json(solution.y);
  doc["x"] = grid_to_json(solution.x);
  doc["s"] = grid_to_json(solution.s);
  return doc.dump(1) + "\n";
}

Solution solution_from_json(const std::string& text, int num_facilities,
                            int horizon) {
  const Json doc = parse_document(text);
  if (!doc.is_object()) throw ParseError("solution document must be an object");
  Solution sol;
  sol.objective = read_number(require(doc, "objective"), "objective");
  sol.y = grid_from_json(require(doc, "y"), "y", num_facilities, horizon);
  sol.x = grid_from_json(require(doc, "x"), "x", num_facilities, horizon);
  sol.s = grid_from_json(require(doc, "s"), "s", num_facilities, horizon);
  return sol;
}

void write_solution(const Solution& solution, const std::filesystem::path& path) {
  write_text_file(path, solution_to_json(solution));
}

Solution read_solution(const std::filesystem::path& path, int num_facilities,
                       int horizon) {
  try {
    return solution_from_json(read_text_file(path), num_facilities, horizon);
  } catch (const ParseError& e) {
    throw ParseError(path.string() + ": " + e.what());
  }
}

}  // namespace lotsizing
