#include <doctest.h>

#include "cachelab/factory.hpp"
#include "cachelab/grasp.hpp"
#include "cachelab/policies.hpp"
#include "support/oracles.hpp"

using namespace cachelab;

namespace {

Trace at(const std::vector<std::uint64_t>& addresses) {
  std::vector<MemoryAccess> r;
  for (auto a : addresses) {
    MemoryAccess m;
    m.address = a;
    r.push_back(m);
  }
  return Trace(r);
}

/// RRPV of the touched line after every access.
std::vector<int> rrpv_after(GraspKind kind, const Trace& t, std::vector<AddressBoundRegister> abrs) {
  const CacheGeometry g{1, 4, 64};
  auto p = grasp_policy(std::move(abrs), kind);
  auto* rrip = dynamic_cast<RripPolicy*>(p.get());
  REQUIRE(rrip != nullptr);
  std::vector<int> out;
  SimOptions o;
  o.observer = [&](const AccessEvent& e) { out.push_back(rrip->rrpv(e.set, e.way)); };
  simulate(t, g, *p, o);
  return out;
}

std::vector<AccessEvent> events(ReplacementPolicy& p, const Trace& t, const CacheGeometry& g, std::uint64_t seed) {
  std::vector<AccessEvent> out;
  SimOptions o;
  o.seed = seed;
  o.observer = [&](const AccessEvent& e) { out.push_back(e); };
  simulate(t, g, p, o);
  return out;
}

bool same(const std::vector<AccessEvent>& a, const std::vector<AccessEvent>& b) {
  if (a.size() != b.size()) return false;
  for (std::size_t i = 0; i < a.size(); ++i)
    if (a[i].hit != b[i].hit || a[i].bypassed != b[i].bypassed || a[i].way != b[i].way ||
        a[i].evicted_block != b[i].evicted_block)
      return false;
  return true;
}

const std::vector<AddressBoundRegister> kArray{{0, 4096}};  // 256-byte LLC: High [0,256), Moderate [256,512)

}  // namespace

TEST_CASE("ABR parsing") {
  CHECK(parse_abr("0x100:0x200") == AddressBoundRegister{0x100, 0x200});
  CHECK(parse_abr("16:32") == AddressBoundRegister{16, 32});
  CHECK_THROWS_AS(parse_abr("0x100"), ConfigError);
  CHECK_THROWS_AS(parse_abr("0x200:0x100"), ConfigError);
  CHECK_THROWS_AS(parse_abr("12:zz"), ConfigError);
  CHECK_THROWS_AS(parse_abr("12x:40"), ConfigError);
}

TEST_CASE("region classification") {
  SUBCASE("single array") {
    const RegionMap m({{0x1000, 0x1000 + 4 * 1024 * 1024}}, 1024 * 1024);
    CHECK(m.region_bytes() == 1024 * 1024);
    CHECK(m.classify(0x1000) == ReuseHint::High);
    CHECK(m.classify(0x1000 + 1024 * 1024 - 1) == ReuseHint::High);
    CHECK(m.classify(0x1000 + 1024 * 1024) == ReuseHint::Moderate);
    CHECK(m.classify(0x1000 + 2 * 1024 * 1024 - 1) == ReuseHint::Moderate);
    CHECK(m.classify(0x1000 + 2 * 1024 * 1024) == ReuseHint::Low);
    CHECK(m.classify(0x10) == ReuseHint::Low);
    CHECK(m.classify(0x100000000) == ReuseHint::Low);
  }
  SUBCASE("capacity is split across arrays") {
    const RegionMap m({{0, 1000}, {10000, 20000}}, 1000);
    CHECK(m.region_bytes() == 500);
    CHECK(m.classify(499) == ReuseHint::High);
    CHECK(m.classify(500) == ReuseHint::Moderate);
    CHECK(m.classify(10499) == ReuseHint::High);
    CHECK(m.classify(10999) == ReuseHint::Moderate);
    CHECK(m.classify(11000) == ReuseHint::Low);
  }
  SUBCASE("regions are clipped to small arrays") {
    const RegionMap m({{0, 100}}, 1000);
    CHECK(m.regions()[0].high.end == 100);
    CHECK(m.regions()[0].moderate.start == m.regions()[0].moderate.end);
    CHECK(m.classify(99) == ReuseHint::High);
    CHECK(m.classify(100) == ReuseHint::Low);
  }
  SUBCASE("no arrays means no hints") {
    const RegionMap m({}, 1000);
    CHECK(m.empty());
    CHECK(classify(5, m) == ReuseHint::Default);
  }
  CHECK_THROWS_AS(RegionMap({{0, 100}, {50, 200}}, 64), ConfigError);
}

TEST_CASE("GRASP insertion and hit rules") {
  // High, Moderate, Low(in array), Low(outside), then a hit on each.
  const Trace t = at({0, 256, 1024, 8192, 0, 256, 1024, 8192});
  CHECK(rrpv_after(GraspKind::Full, t, kArray) == std::vector<int>{0, 6, 7, 7, 0, 5, 6, 6});
  // Hint-assisted RRIP: High near-distant, the rest distant, hits promote to 0.
  CHECK(rrpv_after(GraspKind::RripPlusHints, t, kArray) == std::vector<int>{6, 7, 7, 7, 0, 0, 0, 0});
  // Insertion-only: GRASP insertion, RRIP hit promotion.
  CHECK(rrpv_after(GraspKind::InsertionOnly, t, kArray) == std::vector<int>{0, 6, 7, 7, 0, 0, 0, 0});
}

TEST_CASE("GRASP needs 3-bit RRPVs") {
  CHECK_THROWS_AS(grasp_policy({}, GraspKind::Full, 2), std::invalid_argument);
  CHECK(make_policy("grasp")->name() == "grasp");
  CHECK(make_policy("grasp-hints")->name() == "grasp-hints");
  CHECK(make_policy("grasp-insert")->name() == "grasp-insert");
}

TEST_CASE("baked hints follow the region map") {
  const CacheGeometry g{4, 4, 64};
  const Trace raw = oracle::random_trace(1, 2000, g, 200);
  const RegionMap m({{0, 64 * 100}}, g.capacity_bytes());
  const Trace baked = bake_hints(raw, m);
  for (std::size_t i = 0; i < raw.size(); ++i) {
    CHECK(baked[i].reuse_hint == m.classify(raw[i].address));
    CHECK(baked[i].hint_valid);
  }
  CHECK(bake_hints(raw, RegionMap()).has_hints() == false);
}

TEST_CASE("hints from ABRs and hints from the trace give identical runs") {
  for (std::uint64_t seed = 0; seed < 10; ++seed) {
    const CacheGeometry g{16, 4, 64};
    const Trace raw = oracle::random_trace(seed, 20000, g, 600);
    const std::vector<AddressBoundRegister> abrs{{0, 64 * 400}};
    const Trace baked = bake_hints(raw, RegionMap(abrs, g.capacity_bytes()));
    for (auto kind : {GraspKind::Full, GraspKind::RripPlusHints, GraspKind::InsertionOnly}) {
      auto from_abrs = grasp_policy(abrs, kind);
      auto from_trace = grasp_policy({}, kind);
      auto both = grasp_policy(abrs, kind);
      const auto a = events(*from_abrs, raw, g, seed);
      CHECK(same(a, events(*from_trace, baked, g, seed)));
      CHECK(same(a, events(*both, baked, g, seed)));
    }
  }
}

TEST_CASE("conflicting hint sources are a configuration error") {
  const CacheGeometry g{1, 4, 64};
  const std::vector<AddressBoundRegister> abrs{{0, 4096}};
  Trace baked = bake_hints(at({0, 300, 5000}), RegionMap(abrs, g.capacity_bytes()));
  std::vector<MemoryAccess> records(baked.begin(), baked.end());
  records[1].reuse_hint = ReuseHint::High;  // the map says Moderate
  const Trace bad(records);
  auto p = grasp_policy(abrs);
  CHECK_THROWS_AS(simulate(bad, g, *p), ConfigError);
  auto q = grasp_policy({});
  CHECK_NOTHROW(simulate(bad, g, *q));
}

TEST_CASE("GRASP without hints is DRRIP") {
  for (std::uint64_t seed = 0; seed < 10; ++seed) {
    const CacheGeometry g{128, 8, 64};
    const Trace t = oracle::random_trace(seed, 30000, g, 5000);
    auto grasp = make_policy("grasp");
    auto drrip = make_policy("drrip3");
    CHECK(same(events(*grasp, t, g, seed), events(*drrip, t, g, seed)));
  }
}

TEST_CASE("GRASP protects the High region against a scan") {
  // 1 set, 8 ways: four hot blocks reused between bursts of streaming Low blocks.
  const CacheGeometry g{1, 8, 64};
  std::vector<std::uint64_t> addrs;
  std::uint64_t cold = 1 << 20;
  for (int round = 0; round < 200; ++round) {
    for (std::uint64_t h = 0; h < 4; ++h) addrs.push_back(h * 64);
    for (int k = 0; k < 12; ++k) addrs.push_back(cold += 64);
  }
  const Trace t = at(addrs);
  const std::vector<AddressBoundRegister> abrs{{0, 1 << 24}};
  auto grasp = grasp_policy(abrs);
  auto lru = make_policy("lru");
  SimOptions o;
  o.tracked_regions = {{0, 256}};
  const auto gr = simulate(t, g, *grasp, o);
  const auto lr = simulate(t, g, *lru, o);
  CHECK(gr.regions[0].hit_rate() > 0.99 * 199.0 / 200.0);
  CHECK(lr.regions[0].hits == 0);
}
