#include "cachelab/policies.hpp"

#include <algorithm>
#include <bit>
#include <cassert>
#include <stdexcept>

namespace cachelab {

// --- RecencyStack ----------------------------------------------------------

void RecencyStack::reset(std::uint32_t num_sets, std::uint32_t ways) {
  ways_ = ways;
  pos_.assign(std::size_t{num_sets} * ways, -1);
  present_.assign(num_sets, 0);
}

void RecencyStack::insert_mru(std::uint32_t set, std::uint32_t way) {
  int* p = &pos_[index(set, 0)];
  for (std::uint32_t w = 0; w < ways_; ++w)
    if (p[w] >= 0) ++p[w];
  p[way] = 0;
  ++present_[set];
}

void RecencyStack::insert_lru(std::uint32_t set, std::uint32_t way) {
  pos_[index(set, way)] = static_cast<int>(present_[set]);
  ++present_[set];
}

void RecencyStack::promote(std::uint32_t set, std::uint32_t way) {
  int* p = &pos_[index(set, 0)];
  const int old = p[way];
  assert(old >= 0);
  for (std::uint32_t w = 0; w < ways_; ++w)
    if (p[w] >= 0 && p[w] < old) ++p[w];
  p[way] = 0;
}

void RecencyStack::remove(std::uint32_t set, std::uint32_t way) {
  int* p = &pos_[index(set, 0)];
  const int old = p[way];
  assert(old >= 0);
  for (std::uint32_t w = 0; w < ways_; ++w)
    if (p[w] > old) --p[w];
  p[way] = -1;
  --present_[set];
}

std::uint32_t RecencyStack::lru_way(const SetView& view) const {
  const int* p = &pos_[index(view.set, 0)];
  std::uint32_t best = ways_;
  for (std::uint32_t w = 0; w < ways_; ++w) {
    if (!view.is_eligible(w) || p[w] < 0) continue;
    if (best == ways_ || p[w] > p[best]) best = w;
  }
  return best;
}

// --- SetDueling ------------------------------------------------------------

std::vector<std::uint32_t> strided_sets(std::uint32_t num_sets, std::uint32_t count,
                                        std::uint32_t phase) {
  std::vector<std::uint32_t> sets;
  if (count == 0) return sets;
  const std::uint32_t stride = num_sets / count;
  for (std::uint32_t i = 0; i < count; ++i) sets.push_back(i * stride + phase);
  return sets;
}

void SetDueling::reset(std::uint32_t num_sets) {
  roles_.assign(num_sets, Role::Follower);
  const std::uint32_t count = std::min(leaders_per_policy_, num_sets / 2);
  leaders_a_.clear();
  leaders_b_.clear();
  if (count > 0) {
    const std::uint32_t stride = num_sets / count;
    leaders_a_ = strided_sets(num_sets, count, 0);
    leaders_b_ = strided_sets(num_sets, count, stride / 2);
  }
  for (auto s : leaders_a_) roles_[s] = Role::LeaderA;
  for (auto s : leaders_b_) roles_[s] = Role::LeaderB;
  psel_ = 1u << (psel_bits_ - 1);
}

bool SetDueling::use_b(std::uint32_t set) const {
  switch (roles_[set]) {
    case Role::LeaderA: return false;
    case Role::LeaderB: return true;
    case Role::Follower: break;
  }
  return (psel_ >> (psel_bits_ - 1)) & 1;
}

void SetDueling::record_miss(std::uint32_t set) {
  if (roles_[set] == Role::LeaderA && psel_ < psel_max()) ++psel_;
  else if (roles_[set] == Role::LeaderB && psel_ > 0) --psel_;
}

// --- LRU family ------------------------------------------------------------

LruFamilyPolicy::LruFamilyPolicy(LruInsertion mode, double epsilon, SetDueling dueling)
    : mode_(mode), epsilon_(epsilon), dueling_(dueling) {
  if (!(epsilon > 0.0 && epsilon <= 1.0)) throw std::invalid_argument("bip: epsilon must be in (0, 1]");
}

std::string LruFamilyPolicy::name() const {
  switch (mode_) {
    case LruInsertion::Mru: return "lru";
    case LruInsertion::Lru: return "lip";
    case LruInsertion::Bimodal: return "bip";
    case LruInsertion::Dueling: return "dip";
  }
  return "?";
}

void LruFamilyPolicy::attach(const CacheGeometry& geometry, const Trace&, Rng& rng) {
  rng_ = &rng;
  stack_.reset(geometry.num_sets, geometry.ways);
  dueling_.reset(geometry.num_sets);
}

bool LruFamilyPolicy::uses_bip(std::uint32_t set) const {
  switch (mode_) {
    case LruInsertion::Bimodal: return true;
    case LruInsertion::Dueling: return dueling_.use_b(set);
    default: return false;
  }
}

InsertDecision LruFamilyPolicy::decide_insert(const SetView& view, const AccessContext&) {
  if (mode_ == LruInsertion::Dueling) dueling_.record_miss(view.set);
  return InsertDecision::Insert;
}

std::uint32_t LruFamilyPolicy::choose_victim(const SetView& view, const AccessContext&) {
  return stack_.lru_way(view);
}

void LruFamilyPolicy::on_evict(const SetView& view, std::uint32_t way, const AccessContext&) {
  stack_.remove(view.set, way);
}

void LruFamilyPolicy::on_insert(const SetView& view, std::uint32_t way, const AccessContext&) {
  bool at_mru = true;
  if (mode_ == LruInsertion::Lru) at_mru = false;
  else if (uses_bip(view.set)) at_mru = rng_->chance(epsilon_);
  if (at_mru) stack_.insert_mru(view.set, way);
  else stack_.insert_lru(view.set, way);
}

void LruFamilyPolicy::on_hit(const SetView& view, std::uint32_t way, const AccessContext&) {
  stack_.promote(view.set, way);
}

// --- NRU -------------------------------------------------------------------

NruPolicy::NruPolicy(std::uint32_t bits) : bits_(bits) {
  if (bits < 1 || bits > 4) throw std::invalid_argument("nru: bits must be in [1, 4]");
}

void NruPolicy::attach(const CacheGeometry& geometry, const Trace&, Rng& rng) {
  rng_ = &rng;
  ways_ = geometry.ways;
  cls_.assign(std::size_t{geometry.num_sets} * ways_, 0);
}

std::uint32_t NruPolicy::age_and_pick(const SetView& view) {
  std::uint8_t* c = &cls_[std::size_t{view.set} * ways_];
  const auto top = static_cast<std::uint8_t>(max_class());
  std::uint32_t candidates[64];
  for (;;) {
    std::uint32_t n = 0;
    for (std::uint32_t w = 0; w < ways_; ++w)
      if (view.is_eligible(w) && view.blocks[w].valid && c[w] == top) candidates[n++] = w;
    if (n > 0) return candidates[n == 1 ? 0 : rng_->below(n)];
    for (std::uint32_t w = 0; w < ways_; ++w)
      if (view.is_eligible(w) && c[w] < top) ++c[w];
  }
}

std::uint32_t NruPolicy::choose_victim(const SetView& view, const AccessContext&) {
  return age_and_pick(view);
}

void NruPolicy::on_insert(const SetView& view, std::uint32_t way, const AccessContext&) {
  set_class(view.set, way, 0);
}

void NruPolicy::on_hit(const SetView& view, std::uint32_t way, const AccessContext&) {
  set_class(view.set, way, 0);
}

// --- RRIP ------------------------------------------------------------------

std::uint32_t rrip_victim(std::span<std::uint8_t> rrpv, WayMask eligible, std::uint8_t max_rrpv,
                          std::uint32_t* rounds) {
  const auto ways = static_cast<std::uint32_t>(rrpv.size());
  if ((eligible & all_ways(ways)) == 0) throw std::logic_error("rrip: no eligible victim");
  std::uint32_t aged = 0;
  for (;;) {
    for (std::uint32_t w = 0; w < ways; ++w) {
      if (((eligible >> w) & 1) && rrpv[w] == max_rrpv) {
        if (rounds) *rounds = aged;
        return w;
      }
    }
    for (std::uint32_t w = 0; w < ways; ++w)
      if (((eligible >> w) & 1) && rrpv[w] < max_rrpv) ++rrpv[w];
    ++aged;
  }
}

RripPolicy::RripPolicy(RripInsertion mode, std::uint32_t bits, double epsilon, SetDueling dueling)
    : bits_(bits), mode_(mode), epsilon_(epsilon), dueling_(dueling) {
  if (bits < 1 || bits > 7) throw std::invalid_argument("rrip: rrpv width must be in [1, 7]");
  if (!(epsilon > 0.0 && epsilon <= 1.0)) throw std::invalid_argument("brrip: epsilon must be in (0, 1]");
}

std::string RripPolicy::name() const {
  switch (mode_) {
    case RripInsertion::Static: return "srrip" + std::to_string(bits_);
    case RripInsertion::Bimodal: return "brrip" + std::to_string(bits_);
    case RripInsertion::Dueling: return "drrip" + std::to_string(bits_);
  }
  return "?";
}

void RripPolicy::attach(const CacheGeometry& geometry, const Trace&, Rng& rng) {
  rng_ = &rng;
  ways_ = geometry.ways;
  rrpv_.assign(std::size_t{geometry.num_sets} * ways_, static_cast<std::uint8_t>(max_rrpv()));
  dueling_.reset(geometry.num_sets);
}

std::uint8_t RripPolicy::default_insertion(std::uint32_t set) {
  const auto distant = static_cast<std::uint8_t>(max_rrpv());
  const auto lng = static_cast<std::uint8_t>(max_rrpv() - 1);
  bool bimodal = mode_ == RripInsertion::Bimodal;
  if (mode_ == RripInsertion::Dueling) bimodal = dueling_.use_b(set);
  if (!bimodal) return lng;
  return rng_->chance(epsilon_) ? lng : distant;
}

InsertDecision RripPolicy::decide_insert(const SetView& view, const AccessContext&) {
  if (mode_ == RripInsertion::Dueling) dueling_.record_miss(view.set);
  return InsertDecision::Insert;
}

std::uint32_t RripPolicy::choose_victim(const SetView& view, const AccessContext&) {
  std::span<std::uint8_t> set_rrpv(&rrpv_[std::size_t{view.set} * ways_], ways_);
  return rrip_victim(set_rrpv, view.eligible, static_cast<std::uint8_t>(max_rrpv()), &last_aging_rounds_);
}

void RripPolicy::on_insert(const SetView& view, std::uint32_t way, const AccessContext&) {
  set_rrpv(view.set, way, default_insertion(view.set));
}

void RripPolicy::on_hit(const SetView& view, std::uint32_t way, const AccessContext&) {
  set_rrpv(view.set, way, 0);
}

// --- SHiP-MEM --------------------------------------------------------------

ShipMemPolicy::ShipMemPolicy(std::uint32_t bits, std::uint32_t sampler_sets)
    : bits_(bits), sampler_count_(sampler_sets) {
  if (bits < 1 || bits > 7) throw std::invalid_argument("ship-mem: rrpv width must be in [1, 7]");
}

void ShipMemPolicy::attach(const CacheGeometry& geometry, const Trace&, Rng&) {
  ways_ = geometry.ways;
  const std::size_t slots = std::size_t{geometry.num_sets} * ways_;
  rrpv_.assign(slots, static_cast<std::uint8_t>((1u << bits_) - 1));
  outcome_.assign(slots, 0);
  region_.assign(slots, 0);
  sampler_.assign(geometry.num_sets, false);
  for (auto s : strided_sets(geometry.num_sets, std::min(sampler_count_, geometry.num_sets)))
    sampler_[s] = true;
  table_.clear();
}

std::uint8_t ShipMemPolicy::counter(std::uint64_t region) const {
  auto it = table_.find(region);
  return it == table_.end() ? kCounterInit : it->second;
}

std::uint32_t ShipMemPolicy::choose_victim(const SetView& view, const AccessContext&) {
  std::span<std::uint8_t> set_rrpv(&rrpv_[std::size_t{view.set} * ways_], ways_);
  return rrip_victim(set_rrpv, view.eligible, static_cast<std::uint8_t>((1u << bits_) - 1));
}

void ShipMemPolicy::on_evict(const SetView& view, std::uint32_t way, const AccessContext&) {
  const std::size_t slot = std::size_t{view.set} * ways_ + way;
  if (!sampler_[view.set] || outcome_[slot]) return;
  auto [it, inserted] = table_.try_emplace(region_[slot], kCounterInit);
  if (it->second > 0) --it->second;
}

void ShipMemPolicy::on_insert(const SetView& view, std::uint32_t way, const AccessContext& ctx) {
  const std::size_t slot = std::size_t{view.set} * ways_ + way;
  const std::uint64_t region = ctx.access.address / kRegionBytes;
  region_[slot] = region;
  outcome_[slot] = 0;
  const auto max_rrpv = static_cast<std::uint8_t>((1u << bits_) - 1);
  rrpv_[slot] = counter(region) == 0 ? max_rrpv : static_cast<std::uint8_t>(max_rrpv - 1);
}

void ShipMemPolicy::on_hit(const SetView& view, std::uint32_t way, const AccessContext&) {
  const std::size_t slot = std::size_t{view.set} * ways_ + way;
  rrpv_[slot] = 0;
  if (!sampler_[view.set]) return;
  outcome_[slot] = 1;
  auto [it, inserted] = table_.try_emplace(region_[slot], kCounterInit);
  if (it->second < kCounterMax) ++it->second;
}

// --- PIN-X -----------------------------------------------------------------

PinPolicy::PinPolicy(std::uint32_t x_percent, std::unique_ptr<ReplacementPolicy> base,
                     std::vector<AddressBoundRegister> abrs)
    : x_percent_(x_percent), base_(std::move(base)), hints_(std::move(abrs)) {
  if (x_percent != 25 && x_percent != 50 && x_percent != 75 && x_percent != 100)
    throw std::invalid_argument("pin: X must be one of 25, 50, 75, 100");
}

void PinPolicy::attach(const CacheGeometry& geometry, const Trace& trace, Rng& rng) {
  hints_.attach(geometry, trace);
  base_->attach(geometry, trace, rng);
  reserved_ = (geometry.ways * x_percent_ + 50) / 100;
  pinned_mask_.assign(geometry.num_sets, 0);
  pinned_count_.assign(geometry.num_sets, 0);
  pin_next_ = false;
}

InsertDecision PinPolicy::decide_insert(const SetView& view, const AccessContext& ctx) {
  const InsertDecision base_decision = base_->decide_insert(view, ctx);
  pin_next_ = hints_.hint(ctx.access) == ReuseHint::High && pinned_count_[view.set] < reserved_;
  if (view.full() && (view.eligible & ~pinned_mask_[view.set] & all_ways(view.ways())) == 0) {
    pin_next_ = false;
    return InsertDecision::Bypass;
  }
  if (base_decision == InsertDecision::Bypass) pin_next_ = false;
  return base_decision;
}

std::uint32_t PinPolicy::choose_victim(const SetView& view, const AccessContext& ctx) {
  const SetView unpinned{view.set, view.blocks, view.eligible & ~pinned_mask_[view.set]};
  return base_->choose_victim(unpinned, ctx);
}

void PinPolicy::on_evict(const SetView& view, std::uint32_t way, const AccessContext& ctx) {
  assert(!pinned(view.set, way));
  base_->on_evict(view, way, ctx);
}

void PinPolicy::on_insert(const SetView& view, std::uint32_t way, const AccessContext& ctx) {
  if (pin_next_) {
    pinned_mask_[view.set] |= WayMask{1} << way;
    ++pinned_count_[view.set];
    pin_next_ = false;
  }
  base_->on_insert(view, way, ctx);
}

void PinPolicy::on_hit(const SetView& view, std::uint32_t way, const AccessContext& ctx) {
  base_->on_hit(view, way, ctx);
}

// --- Random ----------------------------------------------------------------

std::uint32_t RandomPolicy::choose_victim(const SetView& view, const AccessContext&) {
  std::uint32_t candidates[64];
  std::uint32_t n = 0;
  for (std::uint32_t w = 0; w < view.ways(); ++w)
    if (view.is_eligible(w) && view.blocks[w].valid) candidates[n++] = w;
  if (n == 0) throw std::logic_error("random: no eligible victim");
  return candidates[rng_->below(n)];
}

// --- OPT -------------------------------------------------------------------

void OptPolicy::attach(const CacheGeometry& geometry, const Trace& trace, Rng&) {
  ways_ = geometry.ways;
  next_use_ = next_use_index(trace, geometry);
  slot_next_.assign(std::size_t{geometry.num_sets} * ways_, kNever);
}

InsertDecision OptPolicy::decide_insert(const SetView& view, const AccessContext& ctx) {
  if (!allow_bypass_ || !view.full()) return InsertDecision::Insert;
  const std::uint64_t* next = &slot_next_[std::size_t{view.set} * ways_];
  std::uint64_t farthest = 0;
  for (std::uint32_t w = 0; w < ways_; ++w)
    if (view.is_eligible(w)) farthest = std::max(farthest, next[w]);
  return next_use_[ctx.index] > farthest ? InsertDecision::Bypass : InsertDecision::Insert;
}

std::uint32_t OptPolicy::choose_victim(const SetView& view, const AccessContext&) {
  const std::uint64_t* next = &slot_next_[std::size_t{view.set} * ways_];
  std::uint32_t best = ways_;
  for (std::uint32_t w = 0; w < ways_; ++w) {
    if (!view.is_eligible(w)) continue;
    if (best == ways_ || next[w] > next[best]) best = w;
  }
  return best;
}

void OptPolicy::on_insert(const SetView& view, std::uint32_t way, const AccessContext& ctx) {
  slot_next_[std::size_t{view.set} * ways_ + way] = next_use_[ctx.index];
}

void OptPolicy::on_hit(const SetView& view, std::uint32_t way, const AccessContext& ctx) {
  slot_next_[std::size_t{view.set} * ways_ + way] = next_use_[ctx.index];
}

SimReport opt_oracle(const Trace& trace, const CacheGeometry& geometry, bool allow_bypass) {
  OptPolicy policy(allow_bypass);
  return simulate(trace, geometry, policy);
}

}  // namespace cachelab
