// Seeded benchmark instance generation.

#pragma once

#include <cstdint>
#include <optional>
#include <string>

#include "lotsizing/instance.hpp"

namespace lotsizing {

// SplitMix64: small, portable 64-bit generator. Each field group of an
// instance draws from its own stream so new fields never perturb old draws.
class SplitMix64 {
 public:
  explicit SplitMix64(std::uint64_t seed) : state_(seed) {}

  std::uint64_t next() {
    std::uint64_t z = (state_ += 0x9E3779B97F4A7C15ULL);
    z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
    z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
    return z ^ (z >> 31);
  }

  // Integer uniform on [lo, hi].
  std::int64_t uniform_int(std::int64_t lo, std::int64_t hi) {
    const auto span = static_cast<std::uint64_t>(hi - lo) + 1;
    return lo + static_cast<std::int64_t>(next() % span);
  }

  // Real uniform on [lo, hi) with 53 bits of resolution.
  double uniform_real(double lo, double hi) {
    const double unit = static_cast<double>(next() >> 11) * 0x1.0p-53;
    return lo + (hi - lo) * unit;
  }

  // Seed of the named substream `stream` of `seed`.
  static std::uint64_t stream_seed(std::uint64_t seed, std::uint64_t stream) {
    SplitMix64 mix(seed ^ (0xD1B54A32D192ED03ULL * (stream + 1)));
    return mix.next();
  }

 private:
  std::uint64_t state_;
};

enum class Balance { kBalanced, kUnbalanced };
enum class StorageSite { kNone, kWarehouses, kRetailers };

std::string to_string(Balance balance);
std::string to_string(StorageSite site);
Balance parse_balance(const std::string& text);
StorageSite parse_storage_site(const std::string& text);

struct GenSpec {
  int num_retailers = 50;
  int num_warehouses = 5;
  int horizon = 15;
  Balance balance = Balance::kBalanced;
  double plant_capacity_factor = kInfinity;    // C; kInfinity = uncapacitated
  double storage_capacity_factor = kInfinity;  // C_s
  StorageSite storage_site = StorageSite::kNone;
  std::uint64_t seed = 0;

  // Throws std::invalid_argument on inconsistent specs, e.g. a storage site
  // without a finite factor.
  void validate() const;

  // Stable identifier encoding every field, e.g.
  // "R50-W5-T15-bal-C1.50-Csinf-s7".
  std::string instance_id() const;
};

// Inverse of GenSpec::instance_id; empty for ids in any other format.
// Factors are recovered to the two decimals the id keeps.
std::optional<GenSpec> parse_instance_id(const std::string& id);

// Retailer to warehouse assignment. Balanced: retailer r goes to r mod |W|.
// Unbalanced: warehouse j receives floor(|R| / 2^(j+1)) retailers (at least
// one each) in contiguous blocks, the last warehouse takes the remainder.
SupplyNetwork assign_retailers(const GenSpec& spec);

// Time-invariant storage capacities (C_s / |T|) * sum_t d^i_t at every
// facility of `site`; all other facilities are left unbounded. A non-finite
// factor or StorageSite::kNone returns the instance unchanged.
Instance derive_storage_caps(Instance instance, double factor, StorageSite site);

// Demands U[5,100] (integer), sc^p U[30000,45000], sc^w U[1500,4500],
// sc^r U[5,100], hc^p 0.25, hc^w 0.5, hc^r U[0.5,1], time-invariant plant
// capacity (C / |T|) * total demand. Pure function of `spec`.
Instance generate(const GenSpec& spec);

}  // namespace lotsizing
