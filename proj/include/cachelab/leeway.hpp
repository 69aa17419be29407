#pragma once

#include <array>
#include <cstdint>
#include <functional>
#include <string>
#include <vector>

#include "cachelab/cache.hpp"
#include "cachelab/policies.hpp"

namespace cachelab {

// Leeway: dead-block prediction from live distance, the largest stack
// distance a block reaches during one generation. Distances are 1-based
// stack positions (MRU = 1); 0 means "no hit during the generation".

enum class LeewayBase { Lru, Nru };
enum class LeewayMode { Dynamic, StaticBop, StaticRop, StaticVtt7 };
/// BOP = bypass-oriented (slow up, fast down); ROP = reuse-oriented.
enum class LeewayBank : std::uint8_t { Bop = 0, Rop = 1 };

const char* to_string(LeewayBank bank);

/// Consecutive differing evictions required before the stable value moves.
struct VttPair {
  std::uint8_t increase = 7;
  std::uint8_t decrease = 1;
};
inline constexpr VttPair kBopVtt{7, 1};
inline constexpr VttPair kRopVtt{1, 7};
inline constexpr VttPair kStaticVtt{7, 7};

struct LdptBank {
  std::uint8_t stable_live_distance = 0;
  std::uint8_t variance_count = 0;        // 3-bit
  bool direction_increase = false;        // false = pending decrease
  friend bool operator==(const LdptBank&, const LdptBank&) = default;
};

/// Applies one evicted block's live distance to an LDPT bank. Returns true
/// when stable_live_distance changed.
bool update_ldpt_bank(LdptBank& bank, std::uint8_t live_distance, VttPair vtt);

/// Tagless, PC-signature-indexed Live Distance Predictor Table with one bank
/// per update policy.
class Ldpt {
 public:
  Ldpt() = default;
  Ldpt(std::uint32_t entries, std::uint8_t initial_stable);

  std::uint32_t size() const { return static_cast<std::uint32_t>(entries_.size()); }
  std::uint32_t index_of(std::uint16_t pc) const { return pc % size(); }
  LdptBank& at(std::uint16_t pc, LeewayBank bank) {
    return entries_[index_of(pc)][static_cast<int>(bank)];
  }
  const LdptBank& at(std::uint16_t pc, LeewayBank bank) const {
    return entries_[index_of(pc)][static_cast<int>(bank)];
  }

 private:
  std::vector<std::array<LdptBank, 2>> entries_;
};

struct LeewayConfig {
  LeewayBase base = LeewayBase::Lru;
  std::uint32_t nru_bits = 2;
  LeewayMode mode = LeewayMode::Dynamic;
  std::uint32_t ldpt_entries = 16384;
  std::uint32_t sampler_sets_per_policy = 64;
  double bop_sampler_insert_probability = 0.01;
  double rop_sampler_insert_probability = 0.03;
  /// Duel after this many accesses to sampler sets (0 disables).
  std::uint64_t sampler_access_interval = 100000;
  /// Duel after this many accesses overall (0 disables).
  std::uint64_t total_access_interval = 0;
};

/// Picks the bank with fewer sampler misses; ties keep the incumbent.
LeewayBank duel_select(std::uint64_t bop_misses, std::uint64_t rop_misses, LeewayBank incumbent);

struct SamplerEviction {
  std::uint64_t index = 0;   // access that caused the eviction
  std::uint32_t set = 0;
  std::uint64_t block = 0;
  std::uint16_t hash_pc = 0;
  std::uint8_t live_distance = 0;
  LeewayBank bank = LeewayBank::Bop;
};

class LeewayPolicy : public ReplacementPolicy {
 public:
  explicit LeewayPolicy(LeewayConfig config = {});

  std::string name() const override;
  void attach(const CacheGeometry& geometry, const Trace& trace, Rng& rng) override;
  InsertDecision decide_insert(const SetView& view, const AccessContext& ctx) override;
  std::uint32_t choose_victim(const SetView& view, const AccessContext& ctx) override;
  void on_evict(const SetView& view, std::uint32_t way, const AccessContext& ctx) override;
  void on_insert(const SetView& view, std::uint32_t way, const AccessContext& ctx) override;
  void on_hit(const SetView& view, std::uint32_t way, const AccessContext& ctx) override;
  std::uint64_t interval_accesses() const override { return config_.total_access_interval; }
  void on_interval(const RunCounters&) override { duel(); }
  bool last_victim_predicted_dead() const override { return last_dead_; }
  bool predicts_dead() const override { return true; }
  bool can_bypass() const override { return true; }

  /// 0-based position of a resident block: exact recency rank under LRU,
  /// NRU class under NRU.
  std::uint32_t position_of(std::uint32_t set, std::uint32_t way) const;
  /// position_of + 1.
  std::uint32_t stack_position(std::uint32_t set, std::uint32_t way) const {
    return position_of(set, way) + 1;
  }
  /// Largest representable live distance (associativity under LRU, 2^bits under NRU).
  std::uint8_t max_distance() const { return max_distance_; }

  const LeewayConfig& config() const { return config_; }
  const Ldpt& ldpt() const { return ldpt_; }
  LeewayBank winner() const { return winner_; }
  bool is_sampler(std::uint32_t set) const { return sampler_[set] != kFollower; }
  LeewayBank sampler_bank(std::uint32_t set) const { return static_cast<LeewayBank>(sampler_[set]); }
  LeewayBank governing_bank(std::uint32_t set) const;
  std::uint8_t predicted_live_distance(std::uint32_t set, std::uint32_t way) const {
    return predicted_[slot(set, way)];
  }
  std::uint8_t live_distance(std::uint32_t set, std::uint32_t way) const { return live_[slot(set, way)]; }
  std::uint64_t sampler_misses(LeewayBank bank) const { return misses_[static_cast<int>(bank)]; }
  VttPair vtt(LeewayBank bank) const { return vtt_[static_cast<int>(bank)]; }

  std::function<void(const SamplerEviction&)> on_sampler_eviction;

 private:
  static constexpr std::uint8_t kFollower = 0xff;
  std::size_t slot(std::uint32_t set, std::uint32_t way) const { return std::size_t{set} * ways_ + way; }
  void count_sampler_access(std::uint32_t set);
  void duel();

  LeewayConfig config_;
  std::uint32_t ways_ = 0;
  std::uint8_t max_distance_ = 0;
  RecencyStack stack_;
  NruPolicy nru_;
  Rng* rng_ = nullptr;

  Ldpt ldpt_;
  std::array<VttPair, 2> vtt_{kBopVtt, kRopVtt};
  std::vector<std::uint8_t> sampler_;  // kFollower or LeewayBank
  std::vector<std::uint8_t> predicted_;
  std::vector<std::uint8_t> live_;
  std::vector<std::uint16_t> hash_pc_;

  LeewayBank winner_ = LeewayBank::Bop;
  std::array<std::uint64_t, 2> misses_{0, 0};
  std::uint64_t sampler_accesses_ = 0;
  std::uint8_t pending_predicted_ = 0;
  bool last_dead_ = false;
};

}  // namespace cachelab
