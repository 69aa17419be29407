#include "cachelab/grasp.hpp"

#include <algorithm>
#include <sstream>

#include "cachelab/policies.hpp"

namespace cachelab {

AddressBoundRegister parse_abr(const std::string& text) {
  const auto colon = text.find(':');
  if (colon == std::string::npos) throw ConfigError("abr: expected start:end, got '" + text + "'");
  AddressBoundRegister abr;
  try {
    std::size_t used = 0;
    const std::string lo = text.substr(0, colon), hi = text.substr(colon + 1);
    abr.start = std::stoull(lo, &used, 0);
    if (used != lo.size()) throw std::invalid_argument(lo);
    abr.end = std::stoull(hi, &used, 0);
    if (used != hi.size()) throw std::invalid_argument(hi);
  } catch (const std::exception&) {
    throw ConfigError("abr: malformed bound in '" + text + "'");
  }
  if (abr.start >= abr.end) throw ConfigError("abr: start must be below end in '" + text + "'");
  return abr;
}

RegionMap::RegionMap(std::vector<AddressBoundRegister> abrs, std::uint64_t llc_capacity_bytes) {
  if (abrs.empty()) return;
  std::vector<AddressBoundRegister> sorted = abrs;
  std::sort(sorted.begin(), sorted.end(), [](auto& a, auto& b) { return a.start < b.start; });
  for (std::size_t i = 0; i < sorted.size(); ++i) {
    if (sorted[i].start >= sorted[i].end) throw ConfigError("abr: empty or inverted array bounds");
    if (i > 0 && sorted[i].start < sorted[i - 1].end) throw ConfigError("abr: registered arrays overlap");
  }
  region_bytes_ = llc_capacity_bytes / abrs.size();
  for (const auto& abr : abrs) {
    const std::uint64_t high_end = std::min(abr.end, abr.start + region_bytes_);
    const std::uint64_t moderate_end = std::min(abr.end, high_end + region_bytes_);
    arrays_.push_back({abr, {abr.start, high_end}, {high_end, moderate_end}});
  }
}

ReuseHint RegionMap::classify(std::uint64_t address) const {
  if (arrays_.empty()) return ReuseHint::Default;
  for (const auto& r : arrays_)
    if (r.high.contains(address)) return ReuseHint::High;
  for (const auto& r : arrays_)
    if (r.moderate.contains(address)) return ReuseHint::Moderate;
  return ReuseHint::Low;
}

ReuseHint classify(std::uint64_t address, const RegionMap& map) { return map.classify(address); }

Trace bake_hints(const Trace& trace, const RegionMap& map) {
  std::vector<MemoryAccess> records(trace.begin(), trace.end());
  for (auto& r : records) {
    r.reuse_hint = map.classify(r.address);
    r.hint_valid = r.reuse_hint != ReuseHint::Default;
  }
  return Trace(std::move(records));
}

void HintSource::attach(const CacheGeometry& geometry, const Trace& trace) {
  map_ = RegionMap(abrs_, geometry.capacity_bytes());
  if (map_.empty()) return;
  for (std::size_t i = 0; i < trace.size(); ++i) {
    const auto& r = trace[i];
    if (r.hint_valid && r.reuse_hint != map_.classify(r.address)) {
      std::ostringstream msg;
      msg << "hints: trace record " << i << " carries hint '" << to_string(r.reuse_hint)
          << "' but the registered ABRs classify it '" << to_string(map_.classify(r.address)) << "'";
      throw ConfigError(msg.str());
    }
  }
}

namespace {

class GraspPolicy final : public RripPolicy {
 public:
  GraspPolicy(std::vector<AddressBoundRegister> abrs, GraspKind kind, std::uint32_t bits)
      : RripPolicy(RripInsertion::Dueling, bits), kind_(kind), hints_(std::move(abrs)) {}

  std::string name() const override {
    switch (kind_) {
      case GraspKind::RripPlusHints: return "grasp-hints";
      case GraspKind::InsertionOnly: return "grasp-insert";
      case GraspKind::Full: return "grasp";
    }
    return "?";
  }

  void attach(const CacheGeometry& geometry, const Trace& trace, Rng& rng) override {
    RripPolicy::attach(geometry, trace, rng);
    hints_.attach(geometry, trace);
  }

  void on_insert(const SetView& view, std::uint32_t way, const AccessContext& ctx) override {
    const ReuseHint hint = hints_.hint(ctx.access);
    if (hint == ReuseHint::Default) return RripPolicy::on_insert(view, way, ctx);
    const auto distant = static_cast<std::uint8_t>(max_rrpv());
    const auto near_distant = static_cast<std::uint8_t>(max_rrpv() - 1);
    std::uint8_t value = distant;
    if (kind_ == GraspKind::RripPlusHints) {
      value = hint == ReuseHint::High ? near_distant : distant;
    } else {
      switch (hint) {
        case ReuseHint::High: value = 0; break;
        case ReuseHint::Moderate: value = near_distant; break;
        default: value = distant; break;
      }
    }
    set_rrpv(view.set, way, value);
  }

  void on_hit(const SetView& view, std::uint32_t way, const AccessContext& ctx) override {
    const ReuseHint hint = hints_.hint(ctx.access);
    if (kind_ == GraspKind::Full && (hint == ReuseHint::Moderate || hint == ReuseHint::Low)) {
      const std::uint8_t v = rrpv(view.set, way);
      if (v > 0) set_rrpv(view.set, way, static_cast<std::uint8_t>(v - 1));
      return;
    }
    set_rrpv(view.set, way, 0);
  }

 private:
  GraspKind kind_;
  HintSource hints_;
};

}  // namespace

std::unique_ptr<ReplacementPolicy> grasp_policy(std::vector<AddressBoundRegister> abrs, GraspKind kind,
                                                std::uint32_t rrpv_bits) {
  if (rrpv_bits != 3) throw std::invalid_argument("grasp: requires 3-bit RRPV");
  return std::make_unique<GraspPolicy>(std::move(abrs), kind, rrpv_bits);
}

}  // namespace cachelab
