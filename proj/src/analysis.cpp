#include "cachelab/analysis.hpp"

#include <numeric>
#include <unordered_map>

#include <json.hpp>

namespace cachelab {

namespace {

class Fenwick {
 public:
  explicit Fenwick(std::size_t n = 0) : tree_(n + 1, 0) {}
  void add(std::size_t i, int delta) {
    for (++i; i < tree_.size(); i += i & (~i + 1)) tree_[i] += delta;
  }
  /// Sum over [0, i).
  std::int64_t prefix(std::size_t i) const {
    std::int64_t s = 0;
    for (; i > 0; i -= i & (~i + 1)) s += tree_[i];
    return s;
  }

 private:
  std::vector<std::int64_t> tree_;
};

void require_same_run(const SimReport& a, const SimReport& b) {
  if (a.trace_fingerprint != b.trace_fingerprint || a.accesses != b.accesses)
    throw ComparisonError("compare: report '" + a.policy + "' comes from a different trace than '" + b.policy + "'");
  if (!(a.geometry == b.geometry))
    throw ComparisonError("compare: report '" + a.policy + "' uses a different geometry than '" + b.policy + "'");
}

std::string csv_field(const std::string& text) {
  if (text.find_first_of(",\"\n") == std::string::npos) return text;
  std::string out = "\"";
  for (char c : text) {
    if (c == '"') out += '"';
    out += c;
  }
  return out + '"';
}

}  // namespace

std::uint64_t ReuseDistanceHistogram::total() const {
  return std::accumulate(counts.begin(), counts.end(), std::uint64_t{0}) + overflow + cold;
}

double ReuseDistanceHistogram::fraction_at_most(std::uint32_t d) const {
  const std::uint64_t n = total();
  if (n == 0) return 0.0;
  std::uint64_t s = 0;
  for (std::uint32_t i = 0; i < std::min<std::uint32_t>(d, cap); ++i) s += counts[i];
  if (d > cap) s += overflow;  // only exact when every overflow distance is <= d
  return static_cast<double>(s) / static_cast<double>(n);
}

std::vector<double> ReuseDistanceHistogram::cumulative() const {
  std::vector<double> out(cap);
  const std::uint64_t n = total();
  std::uint64_t s = 0;
  for (std::uint32_t i = 0; i < cap; ++i) {
    s += counts[i];
    out[i] = n ? static_cast<double>(s) / static_cast<double>(n) : 0.0;
  }
  return out;
}

std::vector<std::uint64_t> reuse_distances(const Trace& trace, const CacheGeometry& geometry) {
  geometry.validate();
  // Local time within each set; one Fenwick tree per set marks the latest
  // reference of every block seen so far.
  std::vector<std::uint64_t> local(trace.size());
  std::vector<std::uint64_t> per_set(geometry.num_sets, 0);
  for (std::size_t i = 0; i < trace.size(); ++i) local[i] = per_set[geometry.set_of(trace[i].address)]++;
  std::vector<Fenwick> trees;
  trees.reserve(geometry.num_sets);
  for (auto n : per_set) trees.emplace_back(n);

  std::unordered_map<std::uint64_t, std::uint64_t> last;  // block -> local time
  last.reserve(trace.size());
  std::vector<std::uint64_t> out(trace.size(), 0);
  for (std::size_t i = 0; i < trace.size(); ++i) {
    const std::uint64_t block = geometry.block_of(trace[i].address);
    Fenwick& tree = trees[geometry.set_of(trace[i].address)];
    const std::uint64_t now = local[i];
    auto it = last.find(block);
    if (it != last.end()) {
      const std::uint64_t prev = it->second;
      // Distinct blocks whose latest reference lies in [prev, now).
      out[i] = static_cast<std::uint64_t>(tree.prefix(now) - tree.prefix(prev));
      tree.add(prev, -1);
      it->second = now;
    } else {
      last.emplace(block, now);
    }
    tree.add(now, 1);
  }
  return out;
}

ReuseDistanceHistogram reuse_distance_distribution(const Trace& trace, const CacheGeometry& geometry,
                                                   std::uint32_t cap) {
  if (cap == 0) throw std::invalid_argument("histogram: cap must be positive");
  ReuseDistanceHistogram h;
  h.cap = cap;
  h.counts.assign(cap, 0);
  for (auto d : reuse_distances(trace, geometry)) {
    if (d == 0) ++h.cold;
    else if (d <= cap) ++h.counts[d - 1];
    else ++h.overflow;
  }
  return h;
}

double misses_eliminated_pct(std::uint64_t baseline_misses, std::uint64_t misses) {
  if (baseline_misses == 0) return 0.0;
  return 100.0 * (static_cast<double>(baseline_misses) - static_cast<double>(misses)) /
         static_cast<double>(baseline_misses);
}

CompareTable compare(const std::vector<SimReport>& reports, const SimReport& baseline) {
  CompareTable table;
  table.baseline = baseline.policy;
  for (const auto& r : reports) {
    require_same_run(r, baseline);
    table.rows.push_back({r.policy, r.misses, r.hit_rate(), misses_eliminated_pct(baseline.misses, r.misses),
                          r.coverage(), r.accuracy(), r.mpki()});
  }
  return table;
}

void write_report_csv(std::ostream& out, const std::vector<SimReport>& reports, const std::string& trace_name) {
  out << "trace,sets,ways,block_bytes,policy,accesses,hits,misses,hit_rate,insertions,bypasses,evictions,"
         "dead_predicted_evictions,coverage,accuracy,mpki,miss_per_kilo_access\n";
  for (const auto& r : reports) {
    out << csv_field(trace_name) << ',' << r.geometry.num_sets << ',' << r.geometry.ways << ',' << r.geometry.block_bytes << ','
        << csv_field(r.policy) << ',' << r.accesses << ',' << r.hits << ',' << r.misses << ',' << r.hit_rate() << ','
        << r.insertions << ',' << r.bypasses << ',' << r.evictions << ',' << r.dead_predicted_evictions << ','
        << r.coverage() << ',' << r.accuracy() << ',' << r.mpki() << ',' << r.miss_per_kilo_access() << '\n';
  }
}

void write_report_json(std::ostream& out, const std::vector<SimReport>& reports, const std::string& trace_name) {
  nlohmann::json rows = nlohmann::json::array();
  for (const auto& r : reports) {
    nlohmann::json regions = nlohmann::json::array();
    for (const auto& g : r.regions)
      regions.push_back({{"start", g.range.start}, {"end", g.range.end}, {"accesses", g.accesses},
                         {"hits", g.hits}, {"hit_rate", g.hit_rate()}});
    rows.push_back({{"trace", trace_name},
                    {"sets", r.geometry.num_sets},
                    {"ways", r.geometry.ways},
                    {"block_bytes", r.geometry.block_bytes},
                    {"policy", r.policy},
                    {"accesses", r.accesses},
                    {"hits", r.hits},
                    {"misses", r.misses},
                    {"hit_rate", r.hit_rate()},
                    {"insertions", r.insertions},
                    {"bypasses", r.bypasses},
                    {"evictions", r.evictions},
                    {"dead_predicted_evictions", r.dead_predicted_evictions},
                    {"coverage", r.coverage()},
                    {"accuracy", r.accuracy()},
                    {"mpki", r.mpki()},
                    {"miss_per_kilo_access", r.miss_per_kilo_access()},
                    {"regions", regions}});
  }
  out << rows.dump(2) << '\n';
}

void write_compare_csv(std::ostream& out, const CompareTable& table) {
  out << "policy,baseline,misses,hit_rate,misses_eliminated_pct,coverage,accuracy,mpki\n";
  for (const auto& r : table.rows)
    out << csv_field(r.policy) << ',' << csv_field(table.baseline) << ',' << r.misses << ',' << r.hit_rate << ','
        << r.misses_eliminated_pct << ',' << r.coverage << ',' << r.accuracy << ',' << r.mpki << '\n';
}

void write_compare_json(std::ostream& out, const CompareTable& table) {
  nlohmann::json rows = nlohmann::json::array();
  for (const auto& r : table.rows)
    rows.push_back({{"policy", r.policy},
                    {"misses", r.misses},
                    {"hit_rate", r.hit_rate},
                    {"misses_eliminated_pct", r.misses_eliminated_pct},
                    {"coverage", r.coverage},
                    {"accuracy", r.accuracy},
                    {"mpki", r.mpki}});
  out << nlohmann::json{{"baseline", table.baseline}, {"rows", rows}}.dump(2) << '\n';
}

void write_histogram_csv(std::ostream& out, const ReuseDistanceHistogram& h, bool cumulative) {
  if (cumulative) {
    out << "distance,cumulative_fraction\n";
    const auto cdf = h.cumulative();
    for (std::uint32_t d = 1; d <= h.cap; ++d) out << d << ',' << cdf[d - 1] << '\n';
    return;
  }
  out << "distance,count\n";
  for (std::uint32_t d = 1; d <= h.cap; ++d) out << d << ',' << h.counts[d - 1] << '\n';
  out << "overflow," << h.overflow << "\ninf," << h.cold << '\n';
}

void write_histogram_json(std::ostream& out, const ReuseDistanceHistogram& h) {
  out << nlohmann::json{{"cap", h.cap},
                        {"counts", h.counts},
                        {"overflow", h.overflow},
                        {"inf", h.cold},
                        {"total", h.total()},
                        {"cumulative", h.cumulative()}}
             .dump(2)
      << '\n';
}

}  // namespace cachelab
