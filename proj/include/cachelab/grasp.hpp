#pragma once

#include <cstdint>
#include <memory>
#include <stdexcept>
#include <string>
#include <vector>

#include "cachelab/cache.hpp"
#include "cachelab/trace.hpp"

namespace cachelab {

struct ConfigError : std::invalid_argument {
  using std::invalid_argument::invalid_argument;
};

/// Bounds of one Property Array, [start, end).
struct AddressBoundRegister {
  std::uint64_t start = 0;
  std::uint64_t end = 0;
  friend bool operator==(const AddressBoundRegister&, const AddressBoundRegister&) = default;
};

/// Parses "start:end" (decimal or 0x-prefixed).
AddressBoundRegister parse_abr(const std::string& text);

/// High and Moderate Reuse regions per registered array. The LLC capacity is
/// divided evenly among arrays; each region is clipped to its array.
class RegionMap {
 public:
  RegionMap() = default;
  RegionMap(std::vector<AddressBoundRegister> abrs, std::uint64_t llc_capacity_bytes);

  bool empty() const { return arrays_.empty(); }
  ReuseHint classify(std::uint64_t address) const;

  struct Regions {
    AddressBoundRegister bounds;
    AddressRange high;
    AddressRange moderate;
  };
  const std::vector<Regions>& regions() const { return arrays_; }
  std::uint64_t region_bytes() const { return region_bytes_; }

 private:
  std::vector<Regions> arrays_;
  std::uint64_t region_bytes_ = 0;
};

ReuseHint classify(std::uint64_t address, const RegionMap& map);

/// Copy of `trace` with every record's hint set from `map`.
Trace bake_hints(const Trace& trace, const RegionMap& map);

/// Resolves the reuse hint of each access from exactly one source: live
/// classification against ABRs when any are registered, otherwise hints
/// carried by the trace. Supplying both with any disagreement is a
/// configuration error.
class HintSource {
 public:
  HintSource() = default;
  explicit HintSource(std::vector<AddressBoundRegister> abrs) : abrs_(std::move(abrs)) {}

  void attach(const CacheGeometry& geometry, const Trace& trace);
  ReuseHint hint(const MemoryAccess& access) const {
    if (!map_.empty()) return map_.classify(access.address);
    return access.hint_valid ? access.reuse_hint : ReuseHint::Default;
  }
  const RegionMap& region_map() const { return map_; }

 private:
  std::vector<AddressBoundRegister> abrs_;
  RegionMap map_;
};

enum class GraspKind { RripPlusHints, InsertionOnly, Full };

/// GRASP over 3-bit DRRIP. Default-hinted accesses take the DRRIP path
/// unchanged (including its set dueling and bimodal draws).
std::unique_ptr<ReplacementPolicy> grasp_policy(std::vector<AddressBoundRegister> abrs,
                                                GraspKind kind = GraspKind::Full,
                                                std::uint32_t rrpv_bits = 3);

}  // namespace cachelab
