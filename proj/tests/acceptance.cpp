// Acceptance run: one PASS/FAIL line per criterion, plus INFO lines that
// are reported but not gated. Exit status is nonzero if any criterion fails.

#include <algorithm>
#include <chrono>
#include <cstdio>
#include <filesystem>
#include <functional>
#include <future>
#include <map>
#include <set>
#include <sstream>
#include <string>
#include <thread>
#include <unordered_map>
#include <vector>

#include "cachelab/analysis.hpp"
#include "cachelab/factory.hpp"
#include "cachelab/graph.hpp"
#include "cachelab/leeway.hpp"
#include "cachelab/policies.hpp"
#include "support/oracles.hpp"

using namespace cachelab;

namespace {

struct Outcome {
  bool pass = false;
  std::string detail;
};

std::string fmt(const char* f, auto... args) {
  char buf[512];
  std::snprintf(buf, sizeof buf, f, args...);
  return buf;
}

Trace from_blocks(const std::vector<std::uint64_t>& ids, const std::vector<std::uint16_t>& pcs = {}) {
  std::vector<MemoryAccess> r;
  r.reserve(ids.size());
  for (std::size_t i = 0; i < ids.size(); ++i) {
    MemoryAccess a;
    a.address = ids[i] * 64;
    if (!pcs.empty()) a.pc_signature = pcs[i];
    r.push_back(a);
  }
  return Trace(std::move(r));
}

std::vector<AccessEvent> events(ReplacementPolicy& p, const Trace& t, const CacheGeometry& g, std::uint64_t seed) {
  std::vector<AccessEvent> out;
  out.reserve(t.size());
  SimOptions o;
  o.seed = seed;
  o.observer = [&](const AccessEvent& e) { out.push_back(e); };
  simulate(t, g, p, o);
  return out;
}

bool same_decisions(const std::vector<AccessEvent>& a, const std::vector<AccessEvent>& b) {
  if (a.size() != b.size()) return false;
  for (std::size_t i = 0; i < a.size(); ++i)
    if (a[i].hit != b[i].hit || a[i].bypassed != b[i].bypassed || a[i].way != b[i].way ||
        a[i].evicted_block != b[i].evicted_block)
      return false;
  return true;
}

/// Runs fn(i) for i in [0, n) across hardware threads; results in order.
template <typename R>
std::vector<R> parallel_map(std::size_t n, const std::function<R(std::size_t)>& fn) {
  const std::size_t workers = std::max(1u, std::thread::hardware_concurrency());
  std::vector<R> out(n);
  std::vector<std::future<void>> jobs;
  for (std::size_t w = 0; w < workers; ++w)
    jobs.push_back(std::async(std::launch::async, [&, w] {
      for (std::size_t i = w; i < n; i += workers) out[i] = fn(i);
    }));
  for (auto& j : jobs) j.get();
  return out;
}

// --- shared random-trace suite (AC-2, AC-3) ---------------------------------

struct SuiteCase {
  CacheGeometry geometry;
  Trace trace;
};

SuiteCase suite_case(std::size_t i) {
  std::mt19937_64 rng(1000 + i);
  const std::uint32_t sets_choices[] = {1, 2, 4, 16, 64, 256};
  const std::uint32_t ways_choices[] = {1, 2, 4, 8, 12, 16};
  CacheGeometry g{sets_choices[rng() % 6], ways_choices[rng() % 6], 64};
  const std::size_t length = 1000 + rng() % 99001;
  const std::uint64_t universe = std::uint64_t{g.num_sets} * g.ways * (1 + rng() % 6);
  return {g, oracle::random_trace(rng(), length, g, universe, static_cast<std::uint16_t>(1 + rng() % 32))};
}

// --- criteria ----------------------------------------------------------------

Outcome ac1() {
  const std::string seq = "X A X A B X A A A B B B A X F X A B C P Q R S T X";
  std::vector<std::uint64_t> ids;
  std::vector<std::uint16_t> pcs;
  std::vector<std::size_t> x_at;
  for (char c : seq) {
    if (c == ' ') continue;
    if (c == 'X') x_at.push_back(ids.size());
    ids.push_back(static_cast<std::uint64_t>(c));
    pcs.push_back(static_cast<std::uint16_t>(c));  // one PC per letter
  }
  const Trace t = from_blocks(ids, pcs);
  const CacheGeometry g{1, 8, 64};

  const auto dist = reuse_distances(t, g);
  const auto naive = oracle::stack_distances(t, g);
  std::vector<std::uint64_t> x_dist;
  for (std::size_t k = 1; k + 1 < x_at.size(); ++k) x_dist.push_back(dist[x_at[k]]);

  auto lru = make_policy("lru");
  const auto lru_events = events(*lru, t, g, 0);
  int x_hits = 0;
  for (auto i : x_at) x_hits += lru_events[i].hit;
  const bool final_miss = !lru_events[x_at.back()].hit;
  bool hits_match_distance = true;
  for (std::size_t i = 0; i < t.size(); ++i)
    hits_match_distance &= lru_events[i].hit == (naive[i] != 0 && naive[i] <= g.ways);

  LeewayPolicy leeway;
  int x_live = -1;
  leeway.on_sampler_eviction = [&](const SamplerEviction& ev) {
    if (ev.block == 'X') x_live = ev.live_distance;
  };
  const auto lw_events = events(leeway, t, g, 0);
  bool leeway_matches_lru = true;
  for (std::size_t i = 0; i < t.size(); ++i) leeway_matches_lru &= lw_events[i].hit == lru_events[i].hit;

  const bool pass = x_dist == std::vector<std::uint64_t>{2, 3, 3, 2} && dist == naive && x_hits == 4 &&
                    final_miss && hits_match_distance && x_live == 3 && leeway_matches_lru;
  return {pass, fmt("X distances %llu,%llu,%llu,%llu; X hits %d; final X %s; live distance at eviction %d",
                    (unsigned long long)x_dist.at(0), (unsigned long long)x_dist.at(1),
                    (unsigned long long)x_dist.at(2), (unsigned long long)x_dist.at(3), x_hits,
                    final_miss ? "miss" : "hit", x_live)};
}

Outcome ac2() {
  struct R {
    std::uint64_t accesses = 0, mismatches = 0, distance_mismatches = 0;
  };
  const auto results = parallel_map<R>(200, [](std::size_t i) {
    const auto c = suite_case(i);
    const auto naive = oracle::stack_distances(c.trace, c.geometry);
    auto lru = make_policy("lru");
    const auto ev = events(*lru, c.trace, c.geometry, i);
    const auto fast = reuse_distances(c.trace, c.geometry);
    R r;
    r.accesses = c.trace.size();
    for (std::size_t k = 0; k < ev.size(); ++k) {
      r.mismatches += ev[k].hit != (naive[k] != 0 && naive[k] <= c.geometry.ways);
      r.distance_mismatches += fast[k] != naive[k];
    }
    return r;
  });
  R total;
  for (const auto& r : results) {
    total.accesses += r.accesses;
    total.mismatches += r.mismatches;
    total.distance_mismatches += r.distance_mismatches;
  }
  return {total.mismatches == 0 && total.distance_mismatches == 0,
          fmt("200 traces, %llu accesses, %llu hit/distance disagreements, %llu distance mismatches",
              (unsigned long long)total.accesses, (unsigned long long)total.mismatches,
              (unsigned long long)total.distance_mismatches)};
}

Outcome ac3() {
  std::vector<std::string> names;
  for (const auto& n : policy_names())
    if (n != "opt" && n != "opt-bypass") names.push_back(n);
  struct R {
    std::uint64_t checks = 0;
    std::vector<std::string> violations;
  };
  const auto results = parallel_map<R>(200, [&](std::size_t i) {
    const auto c = suite_case(i);
    R r;
    auto opt = make_policy("opt");
    auto optb = make_policy("opt-bypass");
    const auto m_opt = simulate(c.trace, c.geometry, *opt, {i}).misses;
    const auto m_optb = simulate(c.trace, c.geometry, *optb, {i}).misses;
    ++r.checks;
    if (m_optb > m_opt) r.violations.push_back(fmt("trace %zu: opt-bypass %llu > opt %llu", i,
                                                   (unsigned long long)m_optb, (unsigned long long)m_opt));
    for (const auto& name : names) {
      auto p = make_policy(name);
      const auto m = simulate(c.trace, c.geometry, *p, {i}).misses;
      // A policy that may bypass is bounded by the bypass-capable optimum.
      const auto bound = p->can_bypass() ? m_optb : m_opt;
      ++r.checks;
      if (bound > m)
        r.violations.push_back(fmt("trace %zu: %s %llu < bound %llu", i, name.c_str(), (unsigned long long)m,
                                   (unsigned long long)bound));
    }
    return r;
  });
  std::uint64_t checks = 0;
  std::vector<std::string> violations;
  for (const auto& r : results) {
    checks += r.checks;
    violations.insert(violations.end(), r.violations.begin(), r.violations.end());
  }
  std::string detail = fmt("%zu policies x 200 traces, %llu comparisons, %zu violations", names.size(),
                           (unsigned long long)checks, violations.size());
  if (!violations.empty()) detail += "; first: " + violations.front();
  return {violations.empty(), detail};
}

Outcome ac4() {
  // Every trace over <= 5 blocks is a relabeling of exactly one
  // restricted-growth string, and the optimum is label-invariant, so the
  // enumeration below covers all of them.
  const CacheGeometry g{1, 2, 64};
  std::uint64_t traces = 0, mismatches = 0;
  std::vector<int> refs;
  auto opt = make_policy("opt");
  auto optb = make_policy("opt-bypass");
  auto check = [&](const std::vector<int>& r) {
    std::vector<std::uint64_t> ids(r.begin(), r.end());
    const Trace t = from_blocks(ids);
    ++traces;
    mismatches += static_cast<int>(simulate(t, g, *opt).misses) != oracle::min_misses_dp(r, 2, false);
    mismatches += static_cast<int>(simulate(t, g, *optb).misses) != oracle::min_misses_dp(r, 2, true);
  };
  std::function<void(int)> grow = [&](int used) {
    if (!refs.empty()) check(refs);
    if (refs.size() == 12) return;
    for (int b = 0; b <= std::min(used, 4); ++b) {
      refs.push_back(b);
      grow(std::max(used, b + 1));
      refs.pop_back();
    }
  };
  grow(0);

  // Relabeled (non-canonical) traces, sampled.
  std::mt19937_64 rng(4);
  std::uint64_t relabeled = 0;
  for (int k = 0; k < 20000; ++k) {
    std::vector<int> r(1 + rng() % 12);
    for (auto& b : r) b = static_cast<int>(rng() % 5);
    check(r);
    ++relabeled;
  }
  return {mismatches == 0, fmt("%llu traces (%llu by exhaustive enumeration, %llu relabeled samples), %llu "
                               "mismatches against the decision-sequence search",
                               (unsigned long long)traces, (unsigned long long)(traces - relabeled),
                               (unsigned long long)relabeled, (unsigned long long)mismatches)};
}

Outcome ac5() {
  const CacheGeometry g{1, 16, 64};
  const Trace t = generate_pattern({PatternKind::Thrashing, 32, 64, 0, 64});
  auto run = [&](const std::string& n) {
    auto p = make_policy(n);
    return simulate(t, g, *p, {1});
  };
  const auto lru = run("lru"), dip = run("dip"), srrip = run("srrip2");
  const bool pass = lru.hits == 0 && dip.hit_rate() >= 0.25 && srrip.hit_rate() > 0;
  return {pass, fmt("LRU hits %llu; DIP hit rate %.4f; SRRIP hit rate %.4f", (unsigned long long)lru.hits,
                    dip.hit_rate(), srrip.hit_rate())};
}

Outcome ac6() {
  // Per round and set: a fresh PC-A triple x y z x y z (each second touch
  // at stack distance 3), then four fresh PC-B blocks.
  const CacheGeometry g{256, 16, 64};
  constexpr std::uint16_t kPcA = 1, kPcB = 2;
  constexpr int kRounds = 200;
  std::vector<std::uint64_t> ids;
  std::vector<std::uint16_t> pcs;
  std::uint64_t fresh = 0;
  for (int round = 0; round < kRounds; ++round) {
    for (std::uint32_t s = 0; s < g.num_sets; ++s) {
      std::uint64_t triple[3];
      for (auto& b : triple) b = (fresh++) * g.num_sets + s;
      for (int rep = 0; rep < 2; ++rep)
        for (auto b : triple) {
          ids.push_back(b);
          pcs.push_back(kPcA);
        }
      for (int k = 0; k < 4; ++k) {
        ids.push_back((fresh++) * g.num_sets + s);
        pcs.push_back(kPcB);
      }
    }
  }
  const Trace t = from_blocks(ids, pcs);

  LeewayConfig c;
  c.mode = LeewayMode::StaticBop;
  LeewayPolicy p(c);
  std::uint64_t b_follower = 0, b_bypassed = 0;
  std::vector<std::pair<std::uint64_t, std::uint64_t>> dead_evictions;  // (index, block)
  SimOptions o;
  o.seed = 6;
  o.observer = [&](const AccessEvent& e) {
    if (e.evicted_block && e.evicted_predicted_dead) dead_evictions.emplace_back(e.index, *e.evicted_block);
    if (e.index < t.size() / 2 || p.is_sampler(e.set) || t[e.index].pc_signature != kPcB) return;
    ++b_follower;
    b_bypassed += e.bypassed;
  };
  const auto report = simulate(t, g, p, o);

  // Independent dead-prediction check: correct iff the block is never used
  // again or `ways` distinct set blocks are referenced before its next use.
  std::unordered_map<std::uint64_t, std::vector<std::uint64_t>> uses;
  for (std::size_t i = 0; i < t.size(); ++i) uses[ids[i]].push_back(i);
  std::uint64_t correct = 0;
  for (const auto& [index, block] : dead_evictions) {
    const auto& u = uses[block];
    auto it = std::lower_bound(u.begin(), u.end(), index);
    if (it == u.end()) {
      ++correct;
      continue;
    }
    std::set<std::uint64_t> seen;
    for (std::uint64_t k = index; k < *it && seen.size() < g.ways; ++k)
      if (ids[k] % g.num_sets == block % g.num_sets) seen.insert(ids[k]);
    correct += seen.size() >= g.ways;
  }
  const double accuracy = dead_evictions.empty() ? 0.0 : double(correct) / double(dead_evictions.size());
  const int stable_a = p.ldpt().at(kPcA, LeewayBank::Bop).stable_live_distance;
  const int stable_b = p.ldpt().at(kPcB, LeewayBank::Bop).stable_live_distance;
  const double bypass_rate = b_follower ? double(b_bypassed) / double(b_follower) : 0.0;
  const bool pass = stable_a == 3 && stable_b == 0 && bypass_rate > 0.95 && accuracy > 0.90 &&
                    report.accuracy() > 0.90 && report.dead_predicted_evictions == dead_evictions.size();
  return {pass, fmt("stable(A)=%d stable(B)=%d; follower PC-B bypass rate %.4f; accuracy %.4f (engine %.4f) "
                    "over %zu dead-predicted evictions",
                    stable_a, stable_b, bypass_rate, accuracy, report.accuracy(), dead_evictions.size())};
}

struct GraspRun {
  SimReport drrip, grasp, pin;
  SkewMetrics skew;
};

GraspRun grasp_experiment(const CsrGraph& graph, std::uint32_t prop_bytes, bool with_pin) {
  GraspRun r;
  r.skew = skew_metrics(graph, DegreeKind::Out, 8, 64);
  const CsrGraph ordered = apply_remap(graph, family_reorder(graph, ReorderKind::Dbg, DegreeKind::Out));
  GraphTraceOptions to;
  to.prop_bytes = prop_bytes;
  to.mode = TraversalMode::Pull;
  const GraphTrace gt = gen_graph_trace(ordered, to);
  const auto g = CacheGeometry::from_capacity(256 * 1024, 16, 64);
  PolicyOptions po;
  po.abrs = gt.abrs;
  const RegionMap regions(gt.abrs, g.capacity_bytes());
  SimOptions so;
  so.seed = 7;
  so.tracked_regions = {regions.regions().at(0).high};
  std::vector<std::string> names{"drrip3", "grasp"};
  if (with_pin) names.push_back("pin100");
  const auto reports = parallel_map<SimReport>(names.size(), [&](std::size_t i) {
    auto p = make_policy(names[i], po);
    return simulate(gt.trace, g, *p, so);
  });
  r.drrip = reports[0];
  r.grasp = reports[1];
  if (with_pin) r.pin = reports[2];
  return r;
}

std::vector<std::string> info;

Outcome ac7() {
  const CsrGraph g = synth_powerlaw(100000, 16, 2.1, 1, EdgeDirection::In);
  const auto run = grasp_experiment(g, 16, false);
  const double elim = misses_eliminated_pct(run.drrip.misses, run.grasp.misses);
  const double hr_grasp = run.grasp.regions[0].hit_rate(), hr_drrip = run.drrip.regions[0].hit_rate();
  const bool skew_ok = run.skew.hot_fraction >= 0.05 && run.skew.hot_fraction <= 0.30;
  const bool pass = skew_ok && run.grasp.misses <= run.drrip.misses && (elim >= 2.0 || hr_grasp > hr_drrip);
  {
    const auto small = grasp_experiment(g, 8, false);
    info.push_back(fmt("AC-7 at 8-byte properties (hot footprint below LLC size): GRASP eliminates %.2f%% of "
                       "DRRIP misses",
                       misses_eliminated_pct(small.drrip.misses, small.grasp.misses)));
  }
  return {pass, fmt("hot_fraction %.4f; DRRIP misses %llu, GRASP misses %llu, eliminated %.2f%% (target 2%%); "
                    "High-region hit rate GRASP %.4f vs DRRIP %.4f",
                    run.skew.hot_fraction, (unsigned long long)run.drrip.misses,
                    (unsigned long long)run.grasp.misses, elim, hr_grasp, hr_drrip)};
}

Outcome ac8() {
  const CsrGraph g = synth_uniform(100000, 16, 1, EdgeDirection::In);
  const auto run = grasp_experiment(g, 16, true);
  const bool pass = double(run.grasp.misses) <= double(run.drrip.misses) * 1.005 && run.pin.misses >= run.grasp.misses;
  {
    const auto small = grasp_experiment(g, 8, true);
    info.push_back(fmt("AC-8 at 8-byte properties: GRASP %.2f%%, PIN-100 %.2f%% misses eliminated vs DRRIP",
                       misses_eliminated_pct(small.drrip.misses, small.grasp.misses),
                       misses_eliminated_pct(small.drrip.misses, small.pin.misses)));
  }
  return {pass, fmt("DRRIP %llu, GRASP %llu (%+.2f%% vs DRRIP, limit +0.50%%), PIN-100 %llu",
                    (unsigned long long)run.drrip.misses, (unsigned long long)run.grasp.misses,
                    100.0 * (double(run.grasp.misses) / double(run.drrip.misses) - 1.0),
                    (unsigned long long)run.pin.misses)};
}

Outcome ac9() {
  std::mt19937_64 rng(9);
  std::uint64_t failures = 0, skewed = 0;
  for (int trial = 0; trial < 100; ++trial) {
    CsrGraph graph;
    const std::uint64_t v = 50 + rng() % 3000;
    if (trial % 2 == 0) {
      graph = synth_powerlaw(v, 4 + double(rng() % 12), 2.3 + 0.1 * double(rng() % 8), rng());
    } else {
      std::vector<std::pair<std::uint64_t, std::uint64_t>> edges;
      const std::uint64_t e = rng() % (8 * v);
      for (std::uint64_t i = 0; i < e; ++i) edges.emplace_back(rng() % v, rng() % (1 + rng() % v));
      graph = csr_from_edges(v, edges, EdgeDirection::In);
    }
    const auto p = degree_profile(graph, DegreeKind::Out);
    const GroupingSpec specs[] = {dbg_default_spec(p.average), dbg_geometric_spec(1 + double(rng() % 16), p.max)};
    for (const auto& spec : specs) {
      // Exhaustive ranges: every degree lands in exactly one group.
      try {
        spec.validate(p);
      } catch (const GraphError&) {
        ++failures;
        continue;
      }
      for (auto d : p.degree) {
        int owners = 0;
        for (const auto& range : spec.groups) owners += range.contains(double(d));
        failures += owners != 1;
      }
      const auto m = dbg_reorder(p, spec);
      failures += !m.is_bijection();
      failures += !(m == oracle::bucket_sort_reference(p.degree, spec));
      // Partition exactness: every group occupies one contiguous ID range in order.
      std::vector<std::size_t> group_at(v);
      for (std::uint64_t x = 0; x < v; ++x) group_at[m.new_id[x]] = spec.group_of(double(p.degree[x]));
      failures += !std::is_sorted(group_at.begin(), group_at.end());
    }
    if (p.max > p.min) {
      ++skewed;
      const auto before = skew_metrics(p);
      const auto m = dbg_reorder(p, specs[0]);
      std::vector<std::uint64_t> moved(v);
      for (std::uint64_t x = 0; x < v; ++x) moved[m.new_id[x]] = p.degree[x];
      failures += skew_metrics(degree_profile(moved)).avg_hot_per_block < before.avg_hot_per_block;
    }
  }
  return {failures == 0, fmt("100 graphs (%llu skewed), %llu invariant failures", (unsigned long long)skewed,
                             (unsigned long long)failures)};
}

template <typename E, typename F>
bool throws_exactly(F&& f) {
  try {
    f();
  } catch (const E&) {
    return true;
  } catch (...) {
    return false;
  }
  return false;
}

Outcome ac10() {
  namespace fs = std::filesystem;
  int failures = 0;
  const auto dir = fs::temp_directory_path();
  for (std::uint64_t seed = 0; seed < 20; ++seed) {
    const CacheGeometry g{16, 8, 64};
    std::vector<MemoryAccess> records(oracle::random_trace(seed, 500 + seed * 50, g, 500).records());
    for (std::size_t i = 0; i < records.size(); i += 3) {
      records[i].reuse_hint = static_cast<ReuseHint>(1 + i % 3);
      records[i].hint_valid = true;
    }
    const Trace t(records);
    const auto bytes = encode_trace(t);
    failures += !(decode_trace(bytes) == t) || encode_trace(decode_trace(bytes)) != bytes;
    const auto path = dir / "cachelab_acceptance.ctr";
    write_trace(t, path);
    failures += encode_trace(read_trace(path)) != bytes;
    fs::remove(path);

    const CsrGraph graph = synth_powerlaw(200 + seed * 10, 6, 2.5, seed);
    const auto csr = encode_csr(graph);
    failures += !(decode_csr(csr) == graph) || encode_csr(decode_csr(csr)) != csr;
    const auto gpath = dir / "cachelab_acceptance.csr";
    write_csr(graph, gpath);
    failures += encode_csr(read_csr(gpath)) != csr;
    fs::remove(gpath);
  }

  const auto good = encode_trace(from_blocks({1, 2, 3}));
  auto magic = good;
  magic[0] ^= 0xff;
  auto version = good;
  version[4] = kTraceVersion + 1;
  const std::vector<std::uint8_t> short_header(good.begin(), good.begin() + 8);
  const std::vector<std::uint8_t> short_body(good.begin(), good.end() - 3);
  auto record = good;
  record[kTraceHeaderBytes + 10] = 0x10;
  const bool trace_errors_distinct =
      throws_exactly<BadMagicError>([&] { decode_trace(magic); }) &&
      throws_exactly<VersionMismatchError>([&] { decode_trace(version); }) &&
      throws_exactly<TruncatedTraceError>([&] { decode_trace(short_header); }) &&
      throws_exactly<TruncatedTraceError>([&] { decode_trace(short_body); }) &&
      throws_exactly<InvalidRecordError>([&] { decode_trace(record); }) &&
      !throws_exactly<BadMagicError>([&] { decode_trace(version); }) &&
      !throws_exactly<TruncatedTraceError>([&] { decode_trace(record); });

  const auto csr = encode_csr(synth_uniform(20, 2, 1));
  auto csr_magic = csr;
  csr_magic[1] = 'Z';
  const std::vector<std::uint8_t> csr_short(csr.begin(), csr.end() - 8);
  const bool csr_errors_distinct = throws_exactly<GraphBadMagicError>([&] { decode_csr(csr_magic); }) &&
                                   throws_exactly<GraphTruncatedError>([&] { decode_csr(csr_short); }) &&
                                   !throws_exactly<GraphTruncatedError>([&] { decode_csr(csr_magic); });
  const bool pass = failures == 0 && trace_errors_distinct && csr_errors_distinct;
  return {pass, fmt("20 trace and 20 CSR round trips, %d byte mismatches; distinct trace errors %s; distinct CSR "
                    "errors %s",
                    failures, trace_errors_distinct ? "yes" : "no", csr_errors_distinct ? "yes" : "no")};
}

Outcome ac11() {
  const auto mismatched = parallel_map<int>(50, [](std::size_t i) {
    std::mt19937_64 rng(500 + i);
    const CacheGeometry g{std::uint32_t{1} << (rng() % 9), 2 + static_cast<std::uint32_t>(rng() % 15), 64};
    const Trace t = oracle::random_trace(rng(), 5000 + rng() % 45000, g, std::uint64_t{g.num_sets} * g.ways * 4);
    auto grasp = grasp_policy({});
    auto drrip = make_policy("drrip3");
    return same_decisions(events(*grasp, t, g, i), events(*drrip, t, g, i)) ? 0 : 1;
  });
  int n = 0;
  for (int m : mismatched) n += m;
  return {n == 0, fmt("50 traces, %d with differing decisions", n)};
}

}  // namespace

int main() {
  const std::pair<const char*, Outcome (*)()> criteria[] = {
      {"AC-1", ac1}, {"AC-2", ac2}, {"AC-3", ac3}, {"AC-4", ac4},  {"AC-5", ac5},  {"AC-6", ac6},
      {"AC-7", ac7}, {"AC-8", ac8}, {"AC-9", ac9}, {"AC-10", ac10}, {"AC-11", ac11}};
  int failed = 0;
  for (const auto& [id, fn] : criteria) {
    const auto start = std::chrono::steady_clock::now();
    Outcome o;
    try {
      o = fn();
    } catch (const std::exception& e) {
      o = {false, std::string("exception: ") + e.what()};
    }
    const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    std::printf("%s %s (%.1fs) %s\n", id, o.pass ? "PASS" : "FAIL", secs, o.detail.c_str());
    std::fflush(stdout);
    failed += !o.pass;
  }
  for (const auto& line : info) std::printf("INFO %s\n", line.c_str());
  std::printf("%d/%zu criteria passed\n", static_cast<int>(std::size(criteria)) - failed, std::size(criteria));
  return failed ? 1 : 0;
}
