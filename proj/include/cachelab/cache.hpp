#pragma once

#include <cstdint>
#include <functional>
#include <limits>
#include <memory>
#include <optional>
#include <random>
#include <span>
#include <string>
#include <vector>

#include "cachelab/trace.hpp"

namespace cachelab {

struct GeometryError : std::invalid_argument {
  using std::invalid_argument::invalid_argument;
};

/// Set-associative geometry. Associativity is capped at 64 so a set's ways
/// fit in one WayMask.
struct CacheGeometry {
  std::uint32_t num_sets = 1;
  std::uint32_t ways = 16;
  std::uint32_t block_bytes = 64;

  static CacheGeometry from_capacity(std::uint64_t capacity_bytes, std::uint32_t ways,
                                     std::uint32_t block_bytes = 64);

  void validate() const;
  std::uint64_t capacity_bytes() const {
    return std::uint64_t{num_sets} * ways * block_bytes;
  }
  std::uint64_t block_of(std::uint64_t address) const { return address / block_bytes; }
  std::uint32_t set_of(std::uint64_t address) const {
    return static_cast<std::uint32_t>(block_of(address) % num_sets);
  }
  std::uint64_t tag_of(std::uint64_t address) const { return block_of(address) / num_sets; }

  friend bool operator==(const CacheGeometry&, const CacheGeometry&) = default;
};

/// The run's single source of randomness: mt19937_64 with explicit
/// conversions, so draws do not depend on the standard library's
/// distribution implementations.
class Rng {
 public:
  explicit Rng(std::uint64_t seed = 0) : engine_(seed) {}
  std::uint64_t next() { return engine_(); }
  /// Uniform in [0, 1) with 53 bits of precision.
  double uniform() { return static_cast<double>(next() >> 11) * 0x1.0p-53; }
  bool chance(double p) { return uniform() < p; }
  /// Uniform in [0, n); n > 0.
  std::uint64_t below(std::uint64_t n);

 private:
  std::mt19937_64 engine_;
};

using WayMask = std::uint64_t;

inline WayMask all_ways(std::uint32_t ways) {
  return ways >= 64 ? ~WayMask{0} : ((WayMask{1} << ways) - 1);
}

struct BlockSlot {
  bool valid = false;
  std::uint64_t tag = 0;
  std::uint64_t block = 0;           // block address (address / block_bytes)
  std::uint64_t last_access = 0;     // trace index of the latest reference
};

/// What a policy sees of one set. `eligible` marks the ways a victim may be
/// drawn from; wrappers (PIN-X) narrow it.
struct SetView {
  std::uint32_t set = 0;
  std::span<const BlockSlot> blocks;
  WayMask eligible = 0;

  std::uint32_t ways() const { return static_cast<std::uint32_t>(blocks.size()); }
  bool is_eligible(std::uint32_t way) const { return (eligible >> way) & 1; }
  bool full() const;
};

struct AccessContext {
  const MemoryAccess& access;
  std::uint64_t index = 0;  // position in the trace
  std::uint64_t block = 0;
  std::uint32_t set = 0;
};

enum class InsertDecision { Insert, Bypass };

struct RunCounters {
  std::uint64_t accesses = 0;
  std::uint64_t hits = 0;
  std::uint64_t misses = 0;
};

/// Behavioral contract every replacement technique implements: an
/// insertion policy, an eviction policy and a hit-promotion policy.
class ReplacementPolicy {
 public:
  virtual ~ReplacementPolicy() = default;

  virtual std::string name() const = 0;

  /// Called once before a run; size per-block state here. The trace is
  /// passed for policies that need it (OPT, hint validation).
  virtual void attach(const CacheGeometry& geometry, const Trace& trace, Rng& rng) = 0;

  /// Called on every miss.
  virtual InsertDecision decide_insert(const SetView&, const AccessContext&) {
    return InsertDecision::Insert;
  }
  /// Only called when the set is full and Insert was chosen. Must return an
  /// eligible way holding a valid block.
  virtual std::uint32_t choose_victim(const SetView& view, const AccessContext& ctx) = 0;
  /// Called just before the victim is overwritten.
  virtual void on_evict(const SetView&, std::uint32_t /*way*/, const AccessContext&) {}
  virtual void on_insert(const SetView& view, std::uint32_t way, const AccessContext& ctx) = 0;
  virtual void on_hit(const SetView& view, std::uint32_t way, const AccessContext& ctx) = 0;

  /// Periodic hook; called every interval_accesses() accesses when nonzero.
  virtual std::uint64_t interval_accesses() const { return 0; }
  virtual void on_interval(const RunCounters&) {}

  /// True when the last choose_victim() took a block predicted dead.
  virtual bool last_victim_predicted_dead() const { return false; }
  virtual bool predicts_dead() const { return false; }
  virtual bool can_bypass() const { return false; }
};

struct AddressRange {
  std::uint64_t start = 0;
  std::uint64_t end = 0;  // exclusive
  bool contains(std::uint64_t a) const { return a >= start && a < end; }
};

struct AccessEvent {
  std::uint64_t index = 0;
  std::uint32_t set = 0;
  bool hit = false;
  bool bypassed = false;
  std::uint32_t way = 0;  // hit way or fill way
  std::optional<std::uint64_t> evicted_block;
  bool evicted_predicted_dead = false;
};

struct SimOptions {
  std::uint64_t seed = 0;
  /// Per-region hit accounting (e.g. GRASP's High-Reuse region).
  std::vector<AddressRange> tracked_regions;
  std::function<void(const AccessEvent&)> observer;
};

struct RegionStats {
  AddressRange range;
  std::uint64_t accesses = 0;
  std::uint64_t hits = 0;
  double hit_rate() const { return accesses ? static_cast<double>(hits) / accesses : 0.0; }
};

struct SimReport {
  std::string policy;
  std::uint64_t trace_fingerprint = 0;
  CacheGeometry geometry;

  std::uint64_t accesses = 0;
  std::uint64_t hits = 0;
  std::uint64_t misses = 0;
  std::uint64_t insertions = 0;
  std::uint64_t bypasses = 0;
  std::uint64_t evictions = 0;
  std::uint64_t dead_predicted_evictions = 0;
  std::uint64_t dead_predictions_correct = 0;
  std::uint64_t total_instructions = 0;
  std::vector<RegionStats> regions;

  double hit_rate() const { return accesses ? static_cast<double>(hits) / accesses : 0.0; }
  double coverage() const {
    return evictions ? static_cast<double>(dead_predicted_evictions) / evictions : 0.0;
  }
  double accuracy() const {
    return dead_predicted_evictions
               ? static_cast<double>(dead_predictions_correct) / dead_predicted_evictions
               : 0.0;
  }
  double miss_per_kilo_access() const {
    return accesses ? 1000.0 * static_cast<double>(misses) / accesses : 0.0;
  }
  /// Bypasses count as misses. Zero when the trace carries no instruction counts.
  double mpki() const {
    return total_instructions ? 1000.0 * static_cast<double>(misses) / total_instructions : 0.0;
  }
};

inline constexpr std::uint64_t kNever = std::numeric_limits<std::uint64_t>::max();

/// next_use[i] = index of the next access to the same block as access i, or kNever.
std::vector<std::uint64_t> next_use_index(const Trace& trace, const CacheGeometry& geometry);

/// Offline helper for the dead-prediction rule: a block evicted at access t
/// whose next reference is at t' was correctly predicted dead iff t' never
/// occurs or at least `ways` distinct blocks of that set are referenced in
/// [t, t'). Built in one pass per set with a sliding window.
class DeadPredictionOracle {
 public:
  DeadPredictionOracle(const Trace& trace, const CacheGeometry& geometry);

  /// `evicted_last_access` is the trace index of the evicted block's latest
  /// reference; `eviction_index` is the access that caused the eviction.
  bool correct(std::uint64_t evicted_last_access, std::uint64_t eviction_index) const;
  std::uint64_t next_use(std::uint64_t index) const { return next_use_[index]; }

 private:
  std::vector<std::uint64_t> next_use_;
  // For each access index t: index of the access at which the window [t, .)
  // first holds `ways` distinct blocks of t's set, or kNever.
  std::vector<std::uint64_t> saturation_;
};

SimReport simulate(const Trace& trace, const CacheGeometry& geometry, ReplacementPolicy& policy,
                   const SimOptions& options = {});

/// Runs `trace` through a small LRU cache and keeps only its misses; the
/// instruction deltas of dropped records fold into the next kept record.
Trace filter_trace(const Trace& trace, const CacheGeometry& filter_geometry);

}  // namespace cachelab
