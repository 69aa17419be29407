#include "cachelab/cache.hpp"

#include <algorithm>
#include <bit>
#include <cassert>
#include <sstream>
#include <stdexcept>
#include <unordered_map>

namespace cachelab {

CacheGeometry CacheGeometry::from_capacity(std::uint64_t capacity_bytes, std::uint32_t ways,
                                           std::uint32_t block_bytes) {
  if (ways == 0 || block_bytes == 0) throw GeometryError("geometry: ways and block size must be positive");
  const std::uint64_t per_set = std::uint64_t{ways} * block_bytes;
  if (capacity_bytes == 0 || capacity_bytes % per_set != 0)
    throw GeometryError("geometry: capacity is not a multiple of ways * block size");
  CacheGeometry g{static_cast<std::uint32_t>(capacity_bytes / per_set), ways, block_bytes};
  g.validate();
  return g;
}

void CacheGeometry::validate() const {
  if (num_sets == 0 || !std::has_single_bit(num_sets))
    throw GeometryError("geometry: number of sets must be a power of two");
  if (ways == 0 || ways > 64) throw GeometryError("geometry: associativity must be in [1, 64]");
  if (block_bytes < 8 || !std::has_single_bit(block_bytes))
    throw GeometryError("geometry: block size must be a power of two >= 8");
}

std::uint64_t Rng::below(std::uint64_t n) {
  assert(n > 0);
  return static_cast<std::uint64_t>((static_cast<unsigned __int128>(next()) * n) >> 64);
}

bool SetView::full() const {
  return std::all_of(blocks.begin(), blocks.end(), [](const BlockSlot& b) { return b.valid; });
}

std::vector<std::uint64_t> next_use_index(const Trace& trace, const CacheGeometry& geometry) {
  std::vector<std::uint64_t> next(trace.size(), kNever);
  std::unordered_map<std::uint64_t, std::uint64_t> upcoming;
  upcoming.reserve(trace.size() / 4 + 16);
  for (std::size_t i = trace.size(); i-- > 0;) {
    const auto block = geometry.block_of(trace[i].address);
    auto [it, inserted] = upcoming.try_emplace(block, i);
    if (!inserted) {
      next[i] = it->second;
      it->second = i;
    }
  }
  return next;
}

DeadPredictionOracle::DeadPredictionOracle(const Trace& trace, const CacheGeometry& geometry)
    : next_use_(next_use_index(trace, geometry)), saturation_(trace.size(), kNever) {
  std::vector<std::vector<std::uint64_t>> per_set(geometry.num_sets);
  for (std::size_t i = 0; i < trace.size(); ++i)
    per_set[geometry.set_of(trace[i].address)].push_back(i);

  std::unordered_map<std::uint64_t, std::uint32_t> window;
  for (const auto& positions : per_set) {
    window.clear();
    std::size_t end = 0;  // window is positions[j, end)
    for (std::size_t j = 0; j < positions.size(); ++j) {
      while (window.size() < geometry.ways && end < positions.size()) {
        ++window[geometry.block_of(trace[positions[end]].address)];
        ++end;
      }
      if (window.size() >= geometry.ways) saturation_[positions[j]] = positions[end - 1];
      const auto head = geometry.block_of(trace[positions[j]].address);
      auto it = window.find(head);
      if (--it->second == 0) window.erase(it);
    }
  }
}

bool DeadPredictionOracle::correct(std::uint64_t evicted_last_access,
                                   std::uint64_t eviction_index) const {
  const std::uint64_t reuse = next_use_[evicted_last_access];
  if (reuse == kNever) return true;
  return saturation_[eviction_index] < reuse;
}

SimReport simulate(const Trace& trace, const CacheGeometry& geometry, ReplacementPolicy& policy,
                   const SimOptions& options) {
  geometry.validate();
  Rng rng(options.seed);
  policy.attach(geometry, trace, rng);

  SimReport report;
  report.policy = policy.name();
  report.trace_fingerprint = trace.fingerprint();
  report.geometry = geometry;
  report.total_instructions = trace.total_instructions();
  for (const auto& r : options.tracked_regions) report.regions.push_back({r});

  std::optional<DeadPredictionOracle> oracle;
  if (policy.predicts_dead()) oracle.emplace(trace, geometry);

  const std::uint32_t ways = geometry.ways;
  std::vector<BlockSlot> slots(std::size_t{geometry.num_sets} * ways);
  std::vector<std::uint32_t> occupancy(geometry.num_sets, 0);
  const WayMask every_way = all_ways(ways);
  const std::uint64_t interval = policy.interval_accesses();
  RunCounters counters;

  for (std::uint64_t i = 0; i < trace.size(); ++i) {
    const MemoryAccess& access = trace[i];
    const std::uint64_t block = geometry.block_of(access.address);
    const std::uint32_t set = geometry.set_of(access.address);
    const std::uint64_t tag = geometry.tag_of(access.address);
    BlockSlot* base = slots.data() + std::size_t{set} * ways;
    const SetView view{set, std::span<const BlockSlot>(base, ways), every_way};
    const AccessContext ctx{access, i, block, set};

    AccessEvent event;
    event.index = i;
    event.set = set;

    std::uint32_t way = ways;
    for (std::uint32_t w = 0; w < ways; ++w) {
      if (base[w].valid && base[w].tag == tag) {
        way = w;
        break;
      }
    }

    ++report.accesses;
    ++counters.accesses;
    if (way != ways) {
      ++report.hits;
      ++counters.hits;
      event.hit = true;
      event.way = way;
      policy.on_hit(view, way, ctx);
      base[way].last_access = i;
    } else {
      ++report.misses;
      ++counters.misses;
      if (policy.decide_insert(view, ctx) == InsertDecision::Bypass) {
        ++report.bypasses;
        event.bypassed = true;
      } else {
        if (occupancy[set] < ways) {
          for (way = 0; base[way].valid; ++way) {
          }
          ++occupancy[set];
        } else {
          way = policy.choose_victim(view, ctx);
          if (way >= ways || !base[way].valid)
            throw std::logic_error(policy.name() + ": choose_victim returned an invalid way");
          ++report.evictions;
          event.evicted_block = base[way].block;
          if (policy.last_victim_predicted_dead()) {
            event.evicted_predicted_dead = true;
            ++report.dead_predicted_evictions;
            if (oracle && oracle->correct(base[way].last_access, i)) ++report.dead_predictions_correct;
          }
          policy.on_evict(view, way, ctx);
        }
        base[way] = BlockSlot{true, tag, block, i};
        ++report.insertions;
        event.way = way;
        policy.on_insert(view, way, ctx);
      }
    }

    for (auto& region : report.regions) {
      if (region.range.contains(access.address)) {
        ++region.accesses;
        if (event.hit) ++region.hits;
      }
    }
    if (interval != 0 && counters.accesses % interval == 0) policy.on_interval(counters);
    if (options.observer) options.observer(event);
  }
  return report;
}

Trace filter_trace(const Trace& trace, const CacheGeometry& filter_geometry) {
  filter_geometry.validate();
  // Per set, blocks ordered MRU first.
  std::vector<std::vector<std::uint64_t>> stacks(filter_geometry.num_sets);
  std::vector<MemoryAccess> kept;
  std::uint64_t carried = 0;
  for (const auto& access : trace) {
    const auto block = filter_geometry.block_of(access.address);
    auto& stack = stacks[filter_geometry.set_of(access.address)];
    auto it = std::find(stack.begin(), stack.end(), block);
    if (it != stack.end()) {
      std::rotate(stack.begin(), it, it + 1);
      carried += access.inst_delta;
      continue;
    }
    stack.insert(stack.begin(), block);
    if (stack.size() > filter_geometry.ways) stack.pop_back();
    MemoryAccess out = access;
    const std::uint64_t delta = carried + access.inst_delta;
    out.inst_delta = static_cast<std::uint32_t>(std::min<std::uint64_t>(delta, UINT32_MAX));
    carried = 0;
    kept.push_back(out);
  }
  return Trace(std::move(kept));
}

}  // namespace cachelab
