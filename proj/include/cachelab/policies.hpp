#pragma once

#include <cstdint>
#include <memory>
#include <string>
#include <unordered_map>
#include <vector>

#include "cachelab/cache.hpp"
#include "cachelab/grasp.hpp"

namespace cachelab {

/// Exact recency order per set. Positions of present blocks form a
/// permutation of 0..present-1, 0 = MRU.
class RecencyStack {
 public:
  void reset(std::uint32_t num_sets, std::uint32_t ways);
  int position(std::uint32_t set, std::uint32_t way) const { return pos_[index(set, way)]; }
  void insert_mru(std::uint32_t set, std::uint32_t way);
  void insert_lru(std::uint32_t set, std::uint32_t way);
  void promote(std::uint32_t set, std::uint32_t way);
  void remove(std::uint32_t set, std::uint32_t way);
  /// Eligible way with the largest position.
  std::uint32_t lru_way(const SetView& view) const;

 private:
  std::size_t index(std::uint32_t set, std::uint32_t way) const { return std::size_t{set} * ways_ + way; }
  std::uint32_t ways_ = 0;
  std::vector<int> pos_;  // -1 = absent
  std::vector<std::uint32_t> present_;
};

/// Leader-set bookkeeping for set dueling with a saturating PSEL counter.
/// Misses in A leaders push PSEL up, misses in B leaders push it down;
/// followers take B while PSEL's most significant bit is set, and PSEL
/// starts at its midpoint (MSB set).
class SetDueling {
 public:
  enum class Role : std::uint8_t { Follower, LeaderA, LeaderB };

  SetDueling(std::uint32_t leaders_per_policy = 32, std::uint32_t psel_bits = 10)
      : leaders_per_policy_(leaders_per_policy), psel_bits_(psel_bits) {}

  void reset(std::uint32_t num_sets);
  Role role(std::uint32_t set) const { return roles_[set]; }
  bool use_b(std::uint32_t set) const;
  void record_miss(std::uint32_t set);
  std::uint32_t psel() const { return psel_; }
  std::uint32_t psel_max() const { return (1u << psel_bits_) - 1; }
  const std::vector<std::uint32_t>& leaders_a() const { return leaders_a_; }
  const std::vector<std::uint32_t>& leaders_b() const { return leaders_b_; }

 private:
  std::uint32_t leaders_per_policy_;
  std::uint32_t psel_bits_;
  std::uint32_t psel_ = 0;
  std::vector<Role> roles_;
  std::vector<std::uint32_t> leaders_a_, leaders_b_;
};

/// `count` evenly strided set indices, `phase` sets into each stride of
/// num_sets / count.
std::vector<std::uint32_t> strided_sets(std::uint32_t num_sets, std::uint32_t count,
                                        std::uint32_t phase = 0);

// ---------------------------------------------------------------------------
// LRU family

enum class LruInsertion { Mru, Lru, Bimodal, Dueling };

class LruFamilyPolicy : public ReplacementPolicy {
 public:
  explicit LruFamilyPolicy(LruInsertion mode, double epsilon = 1.0 / 32,
                           SetDueling dueling = SetDueling());

  std::string name() const override;
  void attach(const CacheGeometry& geometry, const Trace& trace, Rng& rng) override;
  InsertDecision decide_insert(const SetView& view, const AccessContext& ctx) override;
  std::uint32_t choose_victim(const SetView& view, const AccessContext& ctx) override;
  void on_evict(const SetView& view, std::uint32_t way, const AccessContext& ctx) override;
  void on_insert(const SetView& view, std::uint32_t way, const AccessContext& ctx) override;
  void on_hit(const SetView& view, std::uint32_t way, const AccessContext& ctx) override;

  const RecencyStack& stack() const { return stack_; }
  const SetDueling& dueling() const { return dueling_; }
  /// Whether set `set` currently inserts bimodally.
  bool uses_bip(std::uint32_t set) const;

 private:
  LruInsertion mode_;
  double epsilon_;
  SetDueling dueling_;
  RecencyStack stack_;
  Rng* rng_ = nullptr;
};

// ---------------------------------------------------------------------------
// k-bit NRU: classes 0 (recent) .. 2^k - 1 (evict first).

class NruPolicy : public ReplacementPolicy {
 public:
  explicit NruPolicy(std::uint32_t bits);

  std::string name() const override { return "nru" + std::to_string(bits_); }
  void attach(const CacheGeometry& geometry, const Trace& trace, Rng& rng) override;
  std::uint32_t choose_victim(const SetView& view, const AccessContext& ctx) override;
  void on_insert(const SetView& view, std::uint32_t way, const AccessContext& ctx) override;
  void on_hit(const SetView& view, std::uint32_t way, const AccessContext& ctx) override;

  std::uint32_t max_class() const { return (1u << bits_) - 1; }
  std::uint8_t nru_class(std::uint32_t set, std::uint32_t way) const { return cls_[set * ways_ + way]; }
  void set_class(std::uint32_t set, std::uint32_t way, std::uint8_t c) { cls_[set * ways_ + way] = c; }
  /// Ages eligible blocks until one is in the max class; returns a random
  /// max-class eligible way.
  std::uint32_t age_and_pick(const SetView& view);

 private:
  std::uint32_t bits_;
  std::uint32_t ways_ = 0;
  std::vector<std::uint8_t> cls_;
  Rng* rng_ = nullptr;
};

// ---------------------------------------------------------------------------
// RRIP family

enum class RripInsertion { Static, Bimodal, Dueling };

class RripPolicy : public ReplacementPolicy {
 public:
  RripPolicy(RripInsertion mode, std::uint32_t bits, double epsilon = 1.0 / 32,
             SetDueling dueling = SetDueling());

  std::string name() const override;
  void attach(const CacheGeometry& geometry, const Trace& trace, Rng& rng) override;
  InsertDecision decide_insert(const SetView& view, const AccessContext& ctx) override;
  std::uint32_t choose_victim(const SetView& view, const AccessContext& ctx) override;
  void on_insert(const SetView& view, std::uint32_t way, const AccessContext& ctx) override;
  void on_hit(const SetView& view, std::uint32_t way, const AccessContext& ctx) override;

  std::uint32_t max_rrpv() const { return (1u << bits_) - 1; }
  std::uint8_t rrpv(std::uint32_t set, std::uint32_t way) const { return rrpv_[set * ways_ + way]; }
  void set_rrpv(std::uint32_t set, std::uint32_t way, std::uint8_t v) { rrpv_[set * ways_ + way] = v; }
  const SetDueling& dueling() const { return dueling_; }
  /// Insertion RRPV this policy would give a new block in `set`; consumes a
  /// random draw in bimodal mode.
  std::uint8_t default_insertion(std::uint32_t set);
  /// Aging rounds performed by the most recent victim scan.
  std::uint32_t last_aging_rounds() const { return last_aging_rounds_; }

 protected:
  std::uint32_t bits_;

 private:
  RripInsertion mode_;
  double epsilon_;
  SetDueling dueling_;
  std::uint32_t ways_ = 0;
  std::vector<std::uint8_t> rrpv_;
  Rng* rng_ = nullptr;
  std::uint32_t last_aging_rounds_ = 0;
};

/// Lowest-index eligible way at max RRPV, aging all eligible blocks by one
/// (saturating) per round until one exists. Returns the way; `rounds`
/// receives the number of aging rounds.
std::uint32_t rrip_victim(std::span<std::uint8_t> rrpv, WayMask eligible, std::uint8_t max_rrpv,
                          std::uint32_t* rounds = nullptr);

// ---------------------------------------------------------------------------

/// SHiP over RRIP with predictor entries keyed by 16KB memory region instead
/// of PC. Sampler sets train the unbounded region table.
class ShipMemPolicy : public ReplacementPolicy {
 public:
  static constexpr std::uint64_t kRegionBytes = 16384;
  static constexpr std::uint8_t kCounterMax = 7;
  static constexpr std::uint8_t kCounterInit = 1;

  explicit ShipMemPolicy(std::uint32_t bits = 3, std::uint32_t sampler_sets = 64);

  std::string name() const override { return "ship-mem"; }
  void attach(const CacheGeometry& geometry, const Trace& trace, Rng& rng) override;
  std::uint32_t choose_victim(const SetView& view, const AccessContext& ctx) override;
  void on_evict(const SetView& view, std::uint32_t way, const AccessContext& ctx) override;
  void on_insert(const SetView& view, std::uint32_t way, const AccessContext& ctx) override;
  void on_hit(const SetView& view, std::uint32_t way, const AccessContext& ctx) override;

  std::uint8_t counter(std::uint64_t region) const;
  bool is_sampler(std::uint32_t set) const { return sampler_[set]; }
  std::uint8_t rrpv(std::uint32_t set, std::uint32_t way) const { return rrpv_[set * ways_ + way]; }

 private:
  std::uint32_t bits_;
  std::uint32_t sampler_count_;
  std::uint32_t ways_ = 0;
  std::vector<bool> sampler_;
  std::vector<std::uint8_t> rrpv_;
  std::vector<std::uint8_t> outcome_;
  std::vector<std::uint64_t> region_;
  std::unordered_map<std::uint64_t, std::uint8_t> table_;
};

/// PIN-X: High-Reuse blocks are pinned while the set's budget of
/// round(ways * X / 100) pinned ways lasts; pinned blocks are never victims.
/// Everything else is managed by `base`.
class PinPolicy : public ReplacementPolicy {
 public:
  PinPolicy(std::uint32_t x_percent, std::unique_ptr<ReplacementPolicy> base,
            std::vector<AddressBoundRegister> abrs = {});

  std::string name() const override { return "pin" + std::to_string(x_percent_); }
  void attach(const CacheGeometry& geometry, const Trace& trace, Rng& rng) override;
  InsertDecision decide_insert(const SetView& view, const AccessContext& ctx) override;
  std::uint32_t choose_victim(const SetView& view, const AccessContext& ctx) override;
  void on_evict(const SetView& view, std::uint32_t way, const AccessContext& ctx) override;
  void on_insert(const SetView& view, std::uint32_t way, const AccessContext& ctx) override;
  void on_hit(const SetView& view, std::uint32_t way, const AccessContext& ctx) override;
  std::uint64_t interval_accesses() const override { return base_->interval_accesses(); }
  void on_interval(const RunCounters& c) override { base_->on_interval(c); }
  bool can_bypass() const override { return true; }

  std::uint32_t reserved_ways() const { return reserved_; }
  std::uint32_t pinned_count(std::uint32_t set) const { return pinned_count_[set]; }
  bool pinned(std::uint32_t set, std::uint32_t way) const { return (pinned_mask_[set] >> way) & 1; }

 private:
  std::uint32_t x_percent_;
  std::unique_ptr<ReplacementPolicy> base_;
  HintSource hints_;
  std::uint32_t reserved_ = 0;
  std::vector<WayMask> pinned_mask_;
  std::vector<std::uint32_t> pinned_count_;
  bool pin_next_ = false;
};

class RandomPolicy : public ReplacementPolicy {
 public:
  std::string name() const override { return "random"; }
  void attach(const CacheGeometry&, const Trace&, Rng& rng) override { rng_ = &rng; }
  std::uint32_t choose_victim(const SetView& view, const AccessContext& ctx) override;
  void on_insert(const SetView&, std::uint32_t, const AccessContext&) override {}
  void on_hit(const SetView&, std::uint32_t, const AccessContext&) override {}

 private:
  Rng* rng_ = nullptr;
};

/// Belady's OPT: evict the resident block referenced farthest in the future.
/// With bypass enabled, a miss whose next use is farther than every
/// resident's is not inserted.
class OptPolicy : public ReplacementPolicy {
 public:
  explicit OptPolicy(bool allow_bypass = false) : allow_bypass_(allow_bypass) {}

  std::string name() const override { return allow_bypass_ ? "opt-bypass" : "opt"; }
  void attach(const CacheGeometry& geometry, const Trace& trace, Rng& rng) override;
  InsertDecision decide_insert(const SetView& view, const AccessContext& ctx) override;
  std::uint32_t choose_victim(const SetView& view, const AccessContext& ctx) override;
  void on_insert(const SetView& view, std::uint32_t way, const AccessContext& ctx) override;
  void on_hit(const SetView& view, std::uint32_t way, const AccessContext& ctx) override;
  bool can_bypass() const override { return allow_bypass_; }

 private:
  bool allow_bypass_;
  std::uint32_t ways_ = 0;
  std::vector<std::uint64_t> next_use_;
  std::vector<std::uint64_t> slot_next_;
};

SimReport opt_oracle(const Trace& trace, const CacheGeometry& geometry, bool allow_bypass = false);

}  // namespace cachelab
