#include "cachelab/leeway.hpp"

#include <algorithm>
#include <stdexcept>

namespace cachelab {

const char* to_string(LeewayBank bank) { return bank == LeewayBank::Bop ? "bop" : "rop"; }

bool update_ldpt_bank(LdptBank& bank, std::uint8_t live_distance, VttPair vtt) {
  if (live_distance == bank.stable_live_distance) {
    bank.variance_count = 0;
    return false;
  }
  const bool increase = live_distance > bank.stable_live_distance;
  if (increase != bank.direction_increase) {
    bank.direction_increase = increase;
    bank.variance_count = 1;
  } else if (bank.variance_count < 7) {
    ++bank.variance_count;
  }
  if (bank.variance_count >= (increase ? vtt.increase : vtt.decrease)) {
    bank.stable_live_distance = live_distance;
    bank.variance_count = 0;
    return true;
  }
  return false;
}

Ldpt::Ldpt(std::uint32_t entries, std::uint8_t initial_stable) {
  if (entries == 0) throw std::invalid_argument("ldpt: needs at least one entry");
  LdptBank init;
  init.stable_live_distance = initial_stable;
  entries_.assign(entries, {init, init});
}

LeewayBank duel_select(std::uint64_t bop_misses, std::uint64_t rop_misses, LeewayBank incumbent) {
  if (bop_misses < rop_misses) return LeewayBank::Bop;
  if (rop_misses < bop_misses) return LeewayBank::Rop;
  return incumbent;
}

LeewayPolicy::LeewayPolicy(LeewayConfig config) : config_(config), nru_(config.base == LeewayBase::Nru ? config.nru_bits : 1) {
  if (config_.sampler_sets_per_policy == 0) throw std::invalid_argument("leeway: needs sampler sets");
  for (double p : {config_.bop_sampler_insert_probability, config_.rop_sampler_insert_probability})
    if (p < 0.0 || p > 1.0) throw std::invalid_argument("leeway: sampler probability out of [0, 1]");
  switch (config_.mode) {
    case LeewayMode::Dynamic: vtt_ = {kBopVtt, kRopVtt}; break;
    case LeewayMode::StaticBop: vtt_ = {kBopVtt, kRopVtt}; winner_ = LeewayBank::Bop; break;
    case LeewayMode::StaticRop: vtt_ = {kBopVtt, kRopVtt}; winner_ = LeewayBank::Rop; break;
    case LeewayMode::StaticVtt7: vtt_ = {kStaticVtt, kStaticVtt}; winner_ = LeewayBank::Bop; break;
  }
}

std::string LeewayPolicy::name() const {
  const std::string base = config_.base == LeewayBase::Lru ? "lru" : "nru" + std::to_string(config_.nru_bits);
  switch (config_.mode) {
    case LeewayMode::Dynamic: return "leeway-" + base;
    case LeewayMode::StaticBop: return config_.base == LeewayBase::Lru ? "leeway-static-bop" : "leeway-static-bop-" + base;
    case LeewayMode::StaticRop: return config_.base == LeewayBase::Lru ? "leeway-static-rop" : "leeway-static-rop-" + base;
    case LeewayMode::StaticVtt7: return config_.base == LeewayBase::Lru ? "leeway-static-vtt7" : "leeway-static-vtt7-" + base;
  }
  return "leeway";
}

void LeewayPolicy::attach(const CacheGeometry& geometry, const Trace& trace, Rng& rng) {
  rng_ = &rng;
  ways_ = geometry.ways;
  const std::uint32_t sets = geometry.num_sets;
  if (config_.base == LeewayBase::Lru) {
    stack_.reset(sets, ways_);
    max_distance_ = static_cast<std::uint8_t>(ways_);
  } else {
    nru_.attach(geometry, trace, rng);
    max_distance_ = static_cast<std::uint8_t>(nru_.max_class() + 1);
  }
  // Unseen PCs start at the largest distance, so nothing is bypassed or
  // predicted dead before the table has learned.
  ldpt_ = Ldpt(config_.ldpt_entries, max_distance_);

  const std::size_t slots = std::size_t{sets} * ways_;
  predicted_.assign(slots, 0);
  live_.assign(slots, 0);
  hash_pc_.assign(slots, 0);
  sampler_.assign(sets, kFollower);

  if (config_.mode == LeewayMode::Dynamic) {
    winner_ = LeewayBank::Bop;
    const std::uint32_t count = std::min(config_.sampler_sets_per_policy, sets / 2);
    if (count == 0) {
      sampler_[0] = static_cast<std::uint8_t>(LeewayBank::Bop);
    } else {
      const std::uint32_t stride = sets / count;
      for (auto s : strided_sets(sets, count, 0)) sampler_[s] = static_cast<std::uint8_t>(LeewayBank::Bop);
      for (auto s : strided_sets(sets, count, stride / 2)) sampler_[s] = static_cast<std::uint8_t>(LeewayBank::Rop);
    }
  } else {
    const std::uint32_t count = std::min(config_.sampler_sets_per_policy, sets);
    for (auto s : strided_sets(sets, count, 0)) sampler_[s] = static_cast<std::uint8_t>(winner_);
  }
  misses_ = {0, 0};
  sampler_accesses_ = 0;
  last_dead_ = false;
}

std::uint32_t LeewayPolicy::position_of(std::uint32_t set, std::uint32_t way) const {
  if (config_.base == LeewayBase::Lru) return static_cast<std::uint32_t>(stack_.position(set, way));
  return nru_.nru_class(set, way);
}

LeewayBank LeewayPolicy::governing_bank(std::uint32_t set) const {
  return is_sampler(set) ? sampler_bank(set) : winner_;
}

void LeewayPolicy::duel() {
  if (config_.mode != LeewayMode::Dynamic) return;
  winner_ = duel_select(misses_[0], misses_[1], winner_);
  misses_ = {0, 0};
  sampler_accesses_ = 0;
}

void LeewayPolicy::count_sampler_access(std::uint32_t set) {
  if (!is_sampler(set)) return;
  ++sampler_accesses_;
  if (config_.sampler_access_interval != 0 && sampler_accesses_ >= config_.sampler_access_interval) duel();
}

InsertDecision LeewayPolicy::decide_insert(const SetView& view, const AccessContext& ctx) {
  const std::uint32_t set = view.set;
  const LeewayBank bank = governing_bank(set);
  const bool sampler = is_sampler(set);
  if (sampler) ++misses_[static_cast<int>(bank)];

  const std::uint8_t stable = ldpt_.at(ctx.access.pc_signature, bank).stable_live_distance;
  pending_predicted_ = stable;
  InsertDecision decision = InsertDecision::Insert;
  if (stable == 0) {
    if (!sampler) {
      decision = InsertDecision::Bypass;
    } else {
      const double p = bank == LeewayBank::Bop ? config_.bop_sampler_insert_probability
                                               : config_.rop_sampler_insert_probability;
      decision = rng_->chance(p) ? InsertDecision::Insert : InsertDecision::Bypass;
    }
  }
  count_sampler_access(set);
  return decision;
}

std::uint32_t LeewayPolicy::choose_victim(const SetView& view, const AccessContext&) {
  const std::uint32_t set = view.set;
  std::uint32_t best = ways_;
  for (std::uint32_t w = 0; w < ways_; ++w) {
    if (!view.is_eligible(w) || !view.blocks[w].valid) continue;
    const std::uint32_t position = stack_position(set, w);
    const std::uint8_t predicted = predicted_[slot(set, w)];
    if (position <= predicted) continue;
    if (best == ways_) {
      best = w;
      continue;
    }
    const std::uint8_t best_predicted = predicted_[slot(set, best)];
    if (predicted < best_predicted ||
        (predicted == best_predicted && position > stack_position(set, best)))
      best = w;
  }
  last_dead_ = best != ways_;
  if (last_dead_) return best;
  if (config_.base == LeewayBase::Lru) return stack_.lru_way(view);
  return nru_.age_and_pick(view);
}

void LeewayPolicy::on_evict(const SetView& view, std::uint32_t way, const AccessContext& ctx) {
  const std::uint32_t set = view.set;
  const std::size_t s = slot(set, way);
  if (is_sampler(set)) {
    const LeewayBank bank = sampler_bank(set);
    update_ldpt_bank(ldpt_.at(hash_pc_[s], bank), live_[s], vtt_[static_cast<int>(bank)]);
    if (on_sampler_eviction)
      on_sampler_eviction({ctx.index, set, view.blocks[way].block, hash_pc_[s], live_[s], bank});
  }
  if (config_.base == LeewayBase::Lru) stack_.remove(set, way);
}

void LeewayPolicy::on_insert(const SetView& view, std::uint32_t way, const AccessContext& ctx) {
  const std::size_t s = slot(view.set, way);
  predicted_[s] = pending_predicted_;
  live_[s] = 0;
  hash_pc_[s] = ctx.access.pc_signature;
  if (config_.base == LeewayBase::Lru) stack_.insert_mru(view.set, way);
  else nru_.set_class(view.set, way, 0);
}

void LeewayPolicy::on_hit(const SetView& view, std::uint32_t way, const AccessContext&) {
  const std::uint32_t set = view.set;
  const std::size_t s = slot(set, way);
  // Read the position before promotion.
  const auto position = static_cast<std::uint8_t>(stack_position(set, way));
  if (is_sampler(set)) live_[s] = std::max(live_[s], position);
  predicted_[s] = std::max(predicted_[s], position);
  if (config_.base == LeewayBase::Lru) stack_.promote(set, way);
  else nru_.set_class(set, way, 0);
  count_sampler_access(set);
}

}  // namespace cachelab
