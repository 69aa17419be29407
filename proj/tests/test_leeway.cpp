#include <doctest.h>

#include <algorithm>
#include <map>

#include "cachelab/factory.hpp"
#include "cachelab/leeway.hpp"
#include "support/oracles.hpp"

using namespace cachelab;

TEST_CASE("LDPT update: equal distance clears the variance count") {
  LdptBank b{5, 3, true};
  CHECK_FALSE(update_ldpt_bank(b, 5, kBopVtt));
  CHECK(b.stable_live_distance == 5);
  CHECK(b.variance_count == 0);
}

TEST_CASE("LDPT update: BOP drops at once and rises after seven") {
  LdptBank b{8, 0, false};
  CHECK(update_ldpt_bank(b, 3, kBopVtt));
  CHECK(b.stable_live_distance == 3);
  for (int i = 0; i < 6; ++i) {
    CHECK_FALSE(update_ldpt_bank(b, 5, kBopVtt));
    CHECK(b.variance_count == i + 1);
  }
  CHECK(update_ldpt_bank(b, 5, kBopVtt));
  CHECK(b.stable_live_distance == 5);
  CHECK(b.variance_count == 0);
}

TEST_CASE("LDPT update: ROP rises at once and drops after seven") {
  LdptBank b{2, 0, false};
  CHECK(update_ldpt_bank(b, 6, kRopVtt));
  CHECK(b.stable_live_distance == 6);
  for (int i = 0; i < 6; ++i) CHECK_FALSE(update_ldpt_bank(b, 1, kRopVtt));
  CHECK(update_ldpt_bank(b, 1, kRopVtt));
  CHECK(b.stable_live_distance == 1);
}

TEST_CASE("LDPT update: a direction change restarts the count at one") {
  LdptBank b{4, 0, false};
  for (int i = 0; i < 5; ++i) update_ldpt_bank(b, 6, kStaticVtt);
  CHECK(b.variance_count == 5);
  CHECK(b.direction_increase);
  update_ldpt_bank(b, 2, kStaticVtt);
  CHECK(b.variance_count == 1);
  CHECK_FALSE(b.direction_increase);
  CHECK(b.stable_live_distance == 4);
}

TEST_CASE("LDPT converges to a constant input within max(VTT) updates") {
  std::mt19937_64 rng(3);
  for (int trial = 0; trial < 5000; ++trial) {
    const VttPair vtt = std::array<VttPair, 3>{kBopVtt, kRopVtt, kStaticVtt}[rng() % 3];
    LdptBank b{static_cast<std::uint8_t>(rng() % 17), static_cast<std::uint8_t>(rng() % 8), (rng() & 1) != 0};
    const auto d = static_cast<std::uint8_t>(rng() % 17);
    int steps = 0;
    while (b.stable_live_distance != d && steps < 100) {
      update_ldpt_bank(b, d, vtt);
      ++steps;
    }
    CHECK(steps <= std::max(vtt.increase, vtt.decrease));
    CHECK(b.variance_count <= 7);
  }
}

TEST_CASE("duel keeps the incumbent on ties") {
  CHECK(duel_select(3, 5, LeewayBank::Rop) == LeewayBank::Bop);
  CHECK(duel_select(5, 3, LeewayBank::Bop) == LeewayBank::Rop);
  CHECK(duel_select(4, 4, LeewayBank::Rop) == LeewayBank::Rop);
  CHECK(duel_select(4, 4, LeewayBank::Bop) == LeewayBank::Bop);
}

TEST_CASE("LDPT is a tagless table indexed by signature modulo size") {
  Ldpt t(16, 8);
  CHECK(t.size() == 16);
  t.at(3, LeewayBank::Bop).stable_live_distance = 1;
  CHECK(t.at(19, LeewayBank::Bop).stable_live_distance == 1);
  CHECK(t.at(3, LeewayBank::Rop).stable_live_distance == 8);
  CHECK_THROWS_AS(Ldpt(0, 1), std::invalid_argument);
}

TEST_CASE("sampler layout and initial state") {
  Rng rng;
  SUBCASE("dynamic, large cache") {
    LeewayPolicy p;
    p.attach(CacheGeometry{1024, 16, 64}, Trace(), rng);
    int bop = 0, rop = 0;
    for (std::uint32_t s = 0; s < 1024; ++s) {
      if (!p.is_sampler(s)) continue;
      (p.sampler_bank(s) == LeewayBank::Bop ? bop : rop)++;
    }
    CHECK(bop == 64);
    CHECK(rop == 64);
    CHECK(p.sampler_bank(0) == LeewayBank::Bop);
    CHECK(p.sampler_bank(8) == LeewayBank::Rop);
    CHECK_FALSE(p.is_sampler(1));
    CHECK(p.winner() == LeewayBank::Bop);
    CHECK(p.max_distance() == 16);
    CHECK(p.ldpt().at(77, LeewayBank::Bop).stable_live_distance == 16);
  }
  SUBCASE("single set is a BOP sampler") {
    LeewayPolicy p;
    p.attach(CacheGeometry{1, 8, 64}, Trace(), rng);
    CHECK(p.is_sampler(0));
    CHECK(p.sampler_bank(0) == LeewayBank::Bop);
  }
  SUBCASE("static modes sample with their own bank only") {
    LeewayConfig c;
    c.mode = LeewayMode::StaticRop;
    LeewayPolicy p(c);
    p.attach(CacheGeometry{256, 4, 64}, Trace(), rng);
    int samplers = 0;
    for (std::uint32_t s = 0; s < 256; ++s)
      if (p.is_sampler(s)) {
        ++samplers;
        CHECK(p.sampler_bank(s) == LeewayBank::Rop);
      }
    CHECK(samplers == 64);
    CHECK(p.governing_bank(1) == LeewayBank::Rop);
  }
  SUBCASE("NRU base bounds distances by 2^bits") {
    LeewayConfig c;
    c.base = LeewayBase::Nru;
    c.nru_bits = 2;
    LeewayPolicy p(c);
    p.attach(CacheGeometry{4, 16, 64}, Trace(), rng);
    CHECK(p.max_distance() == 4);
    CHECK(p.name() == "leeway-nru2");
  }
  SUBCASE("static VTT7 uses seven in both directions") {
    LeewayConfig c;
    c.mode = LeewayMode::StaticVtt7;
    LeewayPolicy p(c);
    CHECK(p.vtt(LeewayBank::Bop).increase == 7);
    CHECK(p.vtt(LeewayBank::Bop).decrease == 7);
  }
}

TEST_CASE("configuration errors") {
  LeewayConfig c;
  c.sampler_sets_per_policy = 0;
  CHECK_THROWS_AS(LeewayPolicy{c}, std::invalid_argument);
  LeewayConfig d;
  d.bop_sampler_insert_probability = 1.5;
  CHECK_THROWS_AS(LeewayPolicy{d}, std::invalid_argument);
}

TEST_CASE("live distance matches a replayed recency model") {
  for (std::uint64_t seed = 0; seed < 8; ++seed) {
    const CacheGeometry g{4, 1u + static_cast<std::uint32_t>(seed % 8) * 2, 64};
    const Trace t = oracle::random_trace(seed, 20000, g, g.num_sets * g.ways * 3, 4);
    LeewayConfig c;
    c.mode = LeewayMode::StaticBop;  // every set samples
    LeewayPolicy p(c);

    std::vector<std::vector<std::uint64_t>> order(g.num_sets);  // resident blocks, MRU first
    std::map<std::uint64_t, std::uint8_t> live;
    std::uint64_t checked = 0, mismatches = 0;
    p.on_sampler_eviction = [&](const SamplerEviction& ev) {
      ++checked;
      if (live[ev.block] != ev.live_distance) ++mismatches;
    };
    SimOptions o;
    o.seed = seed;
    o.observer = [&](const AccessEvent& e) {
      auto& list = order[e.set];
      const std::uint64_t block = t[e.index].address / g.block_bytes;
      if (e.hit) {
        auto it = std::find(list.begin(), list.end(), block);
        REQUIRE(it != list.end());
        const auto pos = static_cast<std::uint8_t>(it - list.begin() + 1);
        live[block] = std::max(live[block], pos);
        list.erase(it);
        list.insert(list.begin(), block);
      } else if (!e.bypassed) {
        if (e.evicted_block) list.erase(std::find(list.begin(), list.end(), *e.evicted_block));
        list.insert(list.begin(), block);
        live[block] = 0;
      }
    };
    simulate(t, g, p, o);
    CAPTURE(seed);
    CHECK(checked > 0);
    CHECK(mismatches == 0);
  }
}

TEST_CASE("NRU-based live distances stay within 2^bits") {
  LeewayConfig c;
  c.base = LeewayBase::Nru;
  c.nru_bits = 2;
  c.mode = LeewayMode::StaticBop;
  LeewayPolicy p(c);
  std::uint8_t largest = 0;
  p.on_sampler_eviction = [&](const SamplerEviction& ev) { largest = std::max(largest, ev.live_distance); };
  const CacheGeometry g{4, 16, 64};
  simulate(oracle::random_trace(1, 20000, g, 300), g, p);
  CHECK(largest >= 1);
  CHECK(largest <= 4);
}

TEST_CASE("a duel installs the bank with fewer sampler misses and restarts the counts") {
  const CacheGeometry g{256, 8, 64};
  LeewayConfig c;
  c.sampler_access_interval = 0;
  LeewayPolicy p(c);
  simulate(oracle::random_trace(2, 50000, g, 4000), g, p);
  const auto bop = p.sampler_misses(LeewayBank::Bop);
  const auto rop = p.sampler_misses(LeewayBank::Rop);
  CHECK(bop + rop > 0);
  const LeewayBank expected = duel_select(bop, rop, p.winner());
  p.on_interval(RunCounters{});
  CHECK(p.winner() == expected);
  CHECK(p.governing_bank(1) == expected);
  CHECK(p.sampler_misses(LeewayBank::Bop) == 0);
  CHECK(p.sampler_misses(LeewayBank::Rop) == 0);
}

TEST_CASE("the overall access interval triggers duels through the interval hook") {
  LeewayConfig c;
  c.sampler_access_interval = 0;
  c.total_access_interval = 1000;
  LeewayPolicy p(c);
  CHECK(p.interval_accesses() == 1000);
  const CacheGeometry g{128, 4, 64};
  simulate(oracle::random_trace(3, 10500, g, 2000), g, p);
  // Counters restart at each duel, so at most the last 500 accesses remain.
  CHECK(p.sampler_misses(LeewayBank::Bop) + p.sampler_misses(LeewayBank::Rop) <= 500);
}

TEST_CASE("leeway names") {
  CHECK(make_policy("leeway-lru")->name() == "leeway-lru");
  CHECK(make_policy("leeway-nru3")->name() == "leeway-nru3");
  CHECK(make_policy("leeway-static-bop")->name() == "leeway-static-bop");
  CHECK(make_policy("leeway-static-vtt7")->name() == "leeway-static-vtt7");
}
