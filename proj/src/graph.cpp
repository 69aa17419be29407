#include "cachelab/graph.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <cstring>
#include <fstream>
#include <iterator>
#include <map>
#include <numeric>
#include <sstream>
#include <string>

#include "cachelab/cache.hpp"

namespace cachelab {

namespace {

constexpr char kCsrMagic[4] = {'C', 'S', 'R', '1'};

void put_u64(std::vector<std::uint8_t>& out, std::uint64_t v) {
  for (int i = 0; i < 8; ++i) out.push_back(static_cast<std::uint8_t>(v >> (8 * i)));
}

std::uint64_t get_u64(const std::uint8_t* p) {
  std::uint64_t v = 0;
  for (int i = 0; i < 8; ++i) v |= static_cast<std::uint64_t>(p[i]) << (8 * i);
  return v;
}

std::vector<std::uint8_t> slurp(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw GraphError("cannot open " + path.string());
  return {std::istreambuf_iterator<char>(in), std::istreambuf_iterator<char>()};
}

void spill(const std::vector<std::uint8_t>& bytes, const std::filesystem::path& path) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw GraphError("cannot write " + path.string());
  out.write(reinterpret_cast<const char*>(bytes.data()), static_cast<std::streamsize>(bytes.size()));
}

template <typename T>
void shuffle(std::vector<T>& items, Rng& rng) {
  for (std::size_t i = items.size(); i > 1; --i) std::swap(items[i - 1], items[rng.below(i)]);
}

}  // namespace

void CsrGraph::validate() const {
  if (offsets.empty() || offsets.front() != 0) throw GraphError("csr: offsets must start at 0");
  if (offsets.back() != edges.size()) throw GraphError("csr: last offset must equal edge count");
  for (std::size_t i = 1; i < offsets.size(); ++i)
    if (offsets[i] < offsets[i - 1]) throw GraphError("csr: offsets must be non-decreasing");
  const std::uint64_t v = num_vertices();
  for (auto e : edges)
    if (e >= v) throw GraphError("csr: edge endpoint out of range");
}

CsrGraph csr_from_edges(std::uint64_t num_vertices,
                        const std::vector<std::pair<std::uint64_t, std::uint64_t>>& edges,
                        EdgeDirection direction, bool sort_adjacency) {
  CsrGraph g;
  g.direction = direction;
  g.offsets.assign(num_vertices + 1, 0);
  for (const auto& [src, dst] : edges) {
    if (src >= num_vertices || dst >= num_vertices) throw GraphError("edge endpoint exceeds vertex count");
    ++g.offsets[(direction == EdgeDirection::In ? dst : src) + 1];
  }
  std::partial_sum(g.offsets.begin(), g.offsets.end(), g.offsets.begin());
  g.edges.resize(edges.size());
  std::vector<std::uint64_t> fill(g.offsets.begin(), g.offsets.end() - 1);
  for (const auto& [src, dst] : edges) {
    if (direction == EdgeDirection::In) g.edges[fill[dst]++] = src;
    else g.edges[fill[src]++] = dst;
  }
  if (sort_adjacency)
    for (std::uint64_t v = 0; v < num_vertices; ++v)
      std::sort(g.edges.begin() + static_cast<std::ptrdiff_t>(g.offsets[v]),
                g.edges.begin() + static_cast<std::ptrdiff_t>(g.offsets[v + 1]));
  return g;
}

CsrGraph parse_edge_list(std::istream& in, const EdgeListOptions& options) {
  std::vector<std::pair<std::uint64_t, std::uint64_t>> edges;
  std::string line;
  std::uint64_t line_no = 0;
  std::uint64_t max_id = 0;
  bool any = false;
  while (std::getline(in, line)) {
    ++line_no;
    if (auto hash = line.find('#'); hash != std::string::npos) line.resize(hash);
    std::istringstream tokens(line);
    std::string tok;
    std::uint64_t ids[2];
    int n = 0;
    while (tokens >> tok) {
      if (n == 2) throw GraphFormatError("edge list line " + std::to_string(line_no) + ": expected two IDs");
      std::uint64_t value = 0;
      auto [ptr, ec] = std::from_chars(tok.data(), tok.data() + tok.size(), value);
      if (ec == std::errc::result_out_of_range)
        throw GraphFormatError("edge list line " + std::to_string(line_no) + ": ID overflow '" + tok + "'");
      if (ec != std::errc() || ptr != tok.data() + tok.size())
        throw GraphFormatError("edge list line " + std::to_string(line_no) + ": non-integer token '" + tok + "'");
      ids[n++] = value;
    }
    if (n == 0) continue;
    if (n != 2) throw GraphFormatError("edge list line " + std::to_string(line_no) + ": expected two IDs");
    if (options.num_vertices != 0 && !options.compact_ids &&
        (ids[0] >= options.num_vertices || ids[1] >= options.num_vertices))
      throw GraphFormatError("edge list line " + std::to_string(line_no) + ": ID overflow (vertex count " +
                             std::to_string(options.num_vertices) + ")");
    if (ids[0] == UINT64_MAX || ids[1] == UINT64_MAX)
      throw GraphFormatError("edge list line " + std::to_string(line_no) + ": ID overflow");
    max_id = std::max({max_id, ids[0], ids[1]});
    any = true;
    edges.emplace_back(ids[0], ids[1]);
  }

  std::uint64_t v = options.num_vertices;
  if (options.compact_ids) {
    std::vector<std::uint64_t> seen;
    seen.reserve(edges.size() * 2);
    for (const auto& [a, b] : edges) {
      seen.push_back(a);
      seen.push_back(b);
    }
    std::sort(seen.begin(), seen.end());
    seen.erase(std::unique(seen.begin(), seen.end()), seen.end());
    auto rank = [&](std::uint64_t id) {
      return static_cast<std::uint64_t>(std::lower_bound(seen.begin(), seen.end(), id) - seen.begin());
    };
    for (auto& [a, b] : edges) {
      a = rank(a);
      b = rank(b);
    }
    v = std::max<std::uint64_t>(v, seen.size());
  } else if (v == 0) {
    v = any ? max_id + 1 : 0;
  }
  return csr_from_edges(v, edges, options.direction, options.sort_adjacency);
}

CsrGraph load_edge_list(const std::filesystem::path& path, const EdgeListOptions& options) {
  std::ifstream in(path);
  if (!in) throw GraphError("cannot open " + path.string());
  return parse_edge_list(in, options);
}

std::vector<std::uint8_t> encode_csr(const CsrGraph& graph) {
  std::vector<std::uint8_t> out;
  out.reserve(4 + 16 + 8 * (graph.offsets.size() + graph.edges.size()));
  out.insert(out.end(), kCsrMagic, kCsrMagic + 4);
  put_u64(out, graph.num_vertices());
  put_u64(out, graph.num_edges());
  for (auto o : graph.offsets) put_u64(out, o);
  for (auto e : graph.edges) put_u64(out, e);
  return out;
}

CsrGraph decode_csr(const std::vector<std::uint8_t>& bytes, EdgeDirection direction) {
  if (bytes.size() < 4 || std::memcmp(bytes.data(), kCsrMagic, 4) != 0)
    throw GraphBadMagicError("csr: bad magic (expected \"CSR1\")");
  if (bytes.size() < 20) throw GraphTruncatedError("csr: truncated header");
  const std::uint64_t v = get_u64(bytes.data() + 4);
  const std::uint64_t e = get_u64(bytes.data() + 12);
  const std::uint64_t available = (bytes.size() - 20) / 8;
  if (v >= available || available - (v + 1) < e) throw GraphTruncatedError("csr: truncated arrays");
  if ((bytes.size() - 20) != 8 * (v + 1 + e)) throw GraphFormatError("csr: trailing bytes");
  CsrGraph g;
  g.direction = direction;
  g.offsets.resize(v + 1);
  g.edges.resize(e);
  const std::uint8_t* p = bytes.data() + 20;
  for (auto& o : g.offsets) o = get_u64(p), p += 8;
  for (auto& x : g.edges) x = get_u64(p), p += 8;
  try {
    g.validate();
  } catch (const GraphError& err) {
    throw GraphFormatError(err.what());
  }
  return g;
}

void write_csr(const CsrGraph& graph, const std::filesystem::path& path) { spill(encode_csr(graph), path); }

CsrGraph read_csr(const std::filesystem::path& path, EdgeDirection direction) {
  return decode_csr(slurp(path), direction);
}

CsrGraph load_graph(const std::filesystem::path& path, const EdgeListOptions& options) {
  {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw GraphError("cannot open " + path.string());
    char magic[4] = {};
    in.read(magic, 4);
    if (in.gcount() == 4 && std::memcmp(magic, kCsrMagic, 4) == 0) return read_csr(path, options.direction);
  }
  return load_edge_list(path, options);
}

std::vector<std::uint64_t> degrees(const CsrGraph& graph, DegreeKind kind) {
  const std::uint64_t v = graph.num_vertices();
  std::vector<std::uint64_t> listed(v), counted(v, 0);
  for (std::uint64_t i = 0; i < v; ++i) listed[i] = graph.offsets[i + 1] - graph.offsets[i];
  for (auto e : graph.edges) ++counted[e];
  // For an In graph the list length is the in-degree; occurrences in lists
  // are out-degrees. Out graphs are the mirror image.
  const bool listed_is_in = graph.direction == EdgeDirection::In;
  switch (kind) {
    case DegreeKind::In: return listed_is_in ? listed : counted;
    case DegreeKind::Out: return listed_is_in ? counted : listed;
    case DegreeKind::Sum:
      for (std::uint64_t i = 0; i < v; ++i) listed[i] += counted[i];
      return listed;
  }
  return listed;
}

DegreeProfile degree_profile(std::vector<std::uint64_t> degree) {
  DegreeProfile p;
  p.degree = std::move(degree);
  if (p.degree.empty()) return p;
  const double total = std::accumulate(p.degree.begin(), p.degree.end(), 0.0);
  p.average = total / static_cast<double>(p.degree.size());
  auto [lo, hi] = std::minmax_element(p.degree.begin(), p.degree.end());
  p.min = *lo;
  p.max = *hi;
  return p;
}

DegreeProfile degree_profile(const CsrGraph& graph, DegreeKind kind) {
  return degree_profile(degrees(graph, kind));
}

// --- grouping --------------------------------------------------------------

void GroupingSpec::validate(const DegreeProfile& profile) const {
  if (groups.empty()) throw GraphError("grouping: no groups");
  for (std::size_t k = 0; k < groups.size(); ++k) {
    if (!(groups[k].low < groups[k].high)) throw GraphError("grouping: empty or inverted range");
    if (k + 1 < groups.size() && groups[k + 1].high != groups[k].low)
      throw GraphError("grouping: ranges must be contiguous and descending");
  }
  if (!profile.degree.empty()) {
    if (!(groups.front().high > static_cast<double>(profile.max)))
      throw GraphError("grouping: top range must exceed the maximum degree");
    if (!(groups.back().low <= static_cast<double>(profile.min)))
      throw GraphError("grouping: bottom range must reach the minimum degree");
  }
}

std::size_t GroupingSpec::group_of(double d) const {
  auto it = std::partition_point(groups.begin(), groups.end(), [d](const DegreeRange& r) { return r.low > d; });
  if (it == groups.end() || !it->contains(d)) throw GraphError("grouping: degree outside every range");
  return static_cast<std::size_t>(it - groups.begin());
}

GroupingSpec dbg_default_spec(double average_degree) {
  GroupingSpec spec;
  if (!(average_degree > 0)) {
    spec.groups.push_back({0, kUnbounded});
    return spec;
  }
  const double a = average_degree;
  const double lows[] = {32 * a, 16 * a, 8 * a, 4 * a, 2 * a, a, a / 2, 0};
  double high = kUnbounded;
  for (double low : lows) {
    spec.groups.push_back({low, high});
    high = low;
  }
  return spec;
}

GroupingSpec dbg_geometric_spec(double threshold, std::uint64_t max_degree) {
  if (!(threshold > 0)) throw GraphError("grouping: threshold must be positive");
  GroupingSpec spec;
  const double ratio = static_cast<double>(max_degree) / threshold;
  const int top = ratio >= 1 ? static_cast<int>(std::floor(std::log2(ratio))) : 0;
  for (int n = top; n >= 0; --n)
    spec.groups.push_back({std::ldexp(threshold, n), std::ldexp(threshold, n + 1)});
  spec.groups.push_back({0, threshold});
  return spec;
}

namespace {

// Ranges [d0, inf), [d1, d0), ... for the given strictly descending degrees.
void append_per_degree(GroupingSpec& spec, const std::vector<std::uint64_t>& descending) {
  double high = kUnbounded;
  for (auto d : descending) {
    spec.groups.push_back({static_cast<double>(d), high});
    high = static_cast<double>(d);
  }
}

std::vector<std::uint64_t> distinct_descending(const std::vector<std::uint64_t>& degree) {
  std::vector<std::uint64_t> d = degree;
  std::sort(d.begin(), d.end(), std::greater<>());
  d.erase(std::unique(d.begin(), d.end()), d.end());
  return d;
}

}  // namespace

GroupingSpec sort_spec(const DegreeProfile& profile) {
  GroupingSpec spec;
  append_per_degree(spec, distinct_descending(profile.degree));
  if (spec.groups.empty()) spec.groups.push_back({0, kUnbounded});
  return spec;
}

GroupingSpec hub_sort_spec(const DegreeProfile& profile) {
  std::vector<std::uint64_t> hot;
  for (auto d : distinct_descending(profile.degree))
    if (static_cast<double>(d) >= profile.average) hot.push_back(d);
  GroupingSpec spec;
  append_per_degree(spec, hot);
  if (spec.groups.empty()) spec.groups.push_back({0, kUnbounded});
  else if (spec.groups.back().low > 0) spec.groups.push_back({0, spec.groups.back().low});
  return spec;
}

GroupingSpec hub_cluster_spec(const DegreeProfile& profile) {
  GroupingSpec spec;
  if (profile.average > 0) {
    spec.groups.push_back({profile.average, kUnbounded});
    spec.groups.push_back({0, profile.average});
  } else {
    spec.groups.push_back({0, kUnbounded});
  }
  return spec;
}

// --- remaps ----------------------------------------------------------------

bool VertexRemap::is_bijection() const {
  std::vector<bool> seen(new_id.size(), false);
  for (auto id : new_id) {
    if (id >= new_id.size() || seen[id]) return false;
    seen[id] = true;
  }
  return true;
}

VertexRemap VertexRemap::inverse() const {
  VertexRemap inv;
  inv.new_id.resize(new_id.size());
  for (std::uint64_t old = 0; old < new_id.size(); ++old) inv.new_id[new_id[old]] = old;
  return inv;
}

VertexRemap VertexRemap::identity(std::uint64_t n) {
  VertexRemap m;
  m.new_id.resize(n);
  std::iota(m.new_id.begin(), m.new_id.end(), 0);
  return m;
}

VertexRemap dbg_reorder(const DegreeProfile& profile, const GroupingSpec& spec) {
  spec.validate(profile);
  std::vector<std::vector<std::uint64_t>> groups(spec.groups.size());
  for (std::uint64_t v = 0; v < profile.degree.size(); ++v)
    groups[spec.group_of(static_cast<double>(profile.degree[v]))].push_back(v);
  VertexRemap m;
  m.new_id.resize(profile.degree.size());
  std::uint64_t id = 0;
  for (const auto& group : groups)
    for (auto v : group) m.new_id[v] = id++;
  return m;
}

VertexRemap dbg_reorder(const CsrGraph& graph, const GroupingSpec& spec, DegreeKind kind) {
  return dbg_reorder(degree_profile(graph, kind), spec);
}

VertexRemap family_reorder(const CsrGraph& graph, ReorderKind kind, DegreeKind degree_kind) {
  const DegreeProfile profile = degree_profile(graph, degree_kind);
  switch (kind) {
    case ReorderKind::Sort: return dbg_reorder(profile, sort_spec(profile));
    case ReorderKind::HubSort: return dbg_reorder(profile, hub_sort_spec(profile));
    case ReorderKind::HubCluster: return dbg_reorder(profile, hub_cluster_spec(profile));
    case ReorderKind::Dbg: return dbg_reorder(profile, dbg_default_spec(profile.average));
  }
  throw GraphError("unknown reorder kind");
}

VertexRemap random_reorder(std::uint64_t num_vertices, std::uint64_t granularity_blocks,
                           std::uint64_t seed, std::uint32_t prop_bytes, std::uint32_t block_bytes) {
  Rng rng(seed);
  VertexRemap m;
  m.new_id.resize(num_vertices);
  if (granularity_blocks == 0) {
    std::vector<std::uint64_t> order(num_vertices);
    std::iota(order.begin(), order.end(), 0);
    shuffle(order, rng);
    for (std::uint64_t i = 0; i < num_vertices; ++i) m.new_id[order[i]] = i;
    return m;
  }
  if (prop_bytes == 0 || block_bytes % prop_bytes != 0)
    throw GraphError("random reorder: property size must divide the block size");
  const std::uint64_t run = granularity_blocks * (block_bytes / prop_bytes);
  const std::uint64_t runs = (num_vertices + run - 1) / run;
  std::vector<std::uint64_t> order(runs);
  std::iota(order.begin(), order.end(), 0);
  shuffle(order, rng);
  std::uint64_t id = 0;
  for (auto r : order)
    for (std::uint64_t v = r * run; v < std::min(num_vertices, (r + 1) * run); ++v) m.new_id[v] = id++;
  return m;
}

CsrGraph apply_remap(const CsrGraph& graph, const VertexRemap& remap) {
  const std::uint64_t v = graph.num_vertices();
  if (remap.size() != v) throw GraphError("remap: size does not match vertex count");
  if (!remap.is_bijection()) throw GraphError("remap: not a bijection");
  const VertexRemap inv = remap.inverse();
  CsrGraph out;
  out.direction = graph.direction;
  out.offsets.assign(v + 1, 0);
  out.edges.reserve(graph.num_edges());
  for (std::uint64_t x = 0; x < v; ++x) {
    const auto start = out.edges.size();
    for (auto w : graph.neighbors(inv.new_id[x])) out.edges.push_back(remap.new_id[w]);
    std::sort(out.edges.begin() + static_cast<std::ptrdiff_t>(start), out.edges.end());
    out.offsets[x + 1] = out.edges.size();
  }
  return out;
}

std::vector<std::uint8_t> encode_remap(const VertexRemap& remap) {
  std::vector<std::uint8_t> out;
  out.reserve(8 * (remap.size() + 1));
  put_u64(out, remap.size());
  for (auto id : remap.new_id) put_u64(out, id);
  return out;
}

VertexRemap decode_remap(const std::vector<std::uint8_t>& bytes) {
  if (bytes.size() < 8) throw GraphTruncatedError("remap: truncated header");
  const std::uint64_t v = get_u64(bytes.data());
  if ((bytes.size() - 8) / 8 < v) throw GraphTruncatedError("remap: truncated body");
  if (bytes.size() - 8 != 8 * v) throw GraphFormatError("remap: trailing bytes");
  VertexRemap m;
  m.new_id.resize(v);
  for (std::uint64_t i = 0; i < v; ++i) m.new_id[i] = get_u64(bytes.data() + 8 + 8 * i);
  return m;
}

void write_remap(const VertexRemap& remap, const std::filesystem::path& path) {
  spill(encode_remap(remap), path);
}

VertexRemap read_remap(const std::filesystem::path& path) { return decode_remap(slurp(path)); }

// --- metrics ---------------------------------------------------------------

SkewMetrics skew_metrics(const DegreeProfile& profile, std::uint32_t prop_bytes, std::uint32_t block_bytes) {
  if (prop_bytes == 0 || block_bytes % prop_bytes != 0)
    throw std::invalid_argument("skew metrics: property size must divide the block size");
  SkewMetrics m;
  m.vertices = profile.degree.size();
  m.average_degree = profile.average;
  if (m.vertices == 0) return m;
  const std::uint64_t per_block = block_bytes / prop_bytes;
  double hot_edges = 0, all_edges = 0;
  std::uint64_t blocks_with_hot = 0;
  std::uint64_t current_block = UINT64_MAX;
  for (std::uint64_t v = 0; v < m.vertices; ++v) {
    all_edges += static_cast<double>(profile.degree[v]);
    if (!profile.hot(v)) continue;
    ++m.hot_vertices;
    hot_edges += static_cast<double>(profile.degree[v]);
    if (v / per_block != current_block) {
      current_block = v / per_block;
      ++blocks_with_hot;
    }
  }
  m.hot_fraction = static_cast<double>(m.hot_vertices) / static_cast<double>(m.vertices);
  m.hot_edge_coverage = all_edges > 0 ? hot_edges / all_edges : 0.0;
  m.avg_hot_per_block = blocks_with_hot ? static_cast<double>(m.hot_vertices) / blocks_with_hot : 0.0;
  m.hot_footprint_bytes = blocks_with_hot * block_bytes;
  return m;
}

SkewMetrics skew_metrics(const CsrGraph& graph, DegreeKind kind, std::uint32_t prop_bytes,
                         std::uint32_t block_bytes) {
  return skew_metrics(degree_profile(graph, kind), prop_bytes, block_bytes);
}

// --- synthesis -------------------------------------------------------------

namespace {

// Mean of a continuous power law with exponent alpha truncated to [lo, hi].
double truncated_powerlaw_mean(double alpha, double lo, double hi) {
  const double a = 1 - alpha;
  const double b = 2 - alpha;
  const double norm = (std::pow(hi, a) - std::pow(lo, a)) / a;
  const double first = std::abs(b) < 1e-12 ? std::log(hi / lo) : (std::pow(hi, b) - std::pow(lo, b)) / b;
  return first / norm;
}

}  // namespace

CsrGraph synth_powerlaw(std::uint64_t num_vertices, double avg_degree, double alpha, std::uint64_t seed,
                        EdgeDirection direction) {
  if (num_vertices < 2) throw std::invalid_argument("powerlaw: needs at least two vertices");
  if (!(avg_degree >= 1)) throw std::invalid_argument("powerlaw: average degree must be >= 1");
  if (!(alpha > 1)) throw std::invalid_argument("powerlaw: alpha must exceed 1");
  const double hi = static_cast<double>(num_vertices - 1);
  if (avg_degree > hi) throw GraphError("powerlaw: infeasible degree sequence (average exceeds V-1)");
  if (truncated_powerlaw_mean(alpha, 1.0, hi) > avg_degree)
    throw GraphError("powerlaw: infeasible degree sequence (alpha too small for this average)");

  Rng rng(seed);
  std::vector<double> quantile(num_vertices), jitter(num_vertices);
  for (std::uint64_t v = 0; v < num_vertices; ++v) {
    quantile[v] = rng.uniform();
    jitter[v] = rng.uniform();
  }
  const double a = 1 - alpha;
  const double hi_a = std::pow(hi, a);
  auto draw = [&](double x_min, std::uint64_t v) {
    const double lo_a = std::pow(x_min, a);
    return std::pow(lo_a + quantile[v] * (hi_a - lo_a), 1 / a);
  };
  auto sample_mean = [&](double x_min) {
    double s = 0;
    for (std::uint64_t v = 0; v < num_vertices; ++v) s += draw(x_min, v);
    return s / static_cast<double>(num_vertices);
  };
  // Every drawn quantile grows with the lower cutoff, so the sample mean does
  // too; bisect on the drawn sample so the realized mean hits the target.
  double lo_cut = 1.0, hi_cut = hi;
  if (sample_mean(lo_cut) > avg_degree) hi_cut = lo_cut;
  for (int i = 0; i < 100 && hi_cut - lo_cut > 1e-9; ++i) {
    const double mid = 0.5 * (lo_cut + hi_cut);
    if (sample_mean(mid) < avg_degree) lo_cut = mid;
    else hi_cut = mid;
  }
  const double x_min = 0.5 * (lo_cut + hi_cut);

  std::vector<std::uint64_t> degree(num_vertices);
  for (std::uint64_t v = 0; v < num_vertices; ++v) {
    // Stochastic rounding keeps the expected degree equal to the draw.
    const double rounded = std::floor(draw(x_min, v) + jitter[v]);
    degree[v] = static_cast<std::uint64_t>(std::clamp(rounded, 1.0, hi));
  }

  std::vector<double> cumulative(num_vertices);
  double total = 0;
  for (std::uint64_t v = 0; v < num_vertices; ++v) cumulative[v] = (total += static_cast<double>(degree[v]));

  std::vector<std::pair<std::uint64_t, std::uint64_t>> edges;
  edges.reserve(static_cast<std::size_t>(total));
  for (std::uint64_t u = 0; u < num_vertices; ++u) {
    for (std::uint64_t s = 0; s < degree[u]; ++s) {
      for (int attempt = 0; attempt < 8; ++attempt) {
        const double r = rng.uniform() * total;
        auto it = std::upper_bound(cumulative.begin(), cumulative.end(), r);
        const auto v = static_cast<std::uint64_t>(std::min<std::ptrdiff_t>(
            it - cumulative.begin(), static_cast<std::ptrdiff_t>(num_vertices - 1)));
        if (v != u) {
          edges.emplace_back(u, v);
          break;
        }
      }
    }
  }
  return csr_from_edges(num_vertices, edges, direction);
}

CsrGraph synth_uniform(std::uint64_t num_vertices, std::uint64_t degree, std::uint64_t seed,
                       EdgeDirection direction) {
  if (num_vertices < 2) throw std::invalid_argument("uniform graph: needs at least two vertices");
  Rng rng(seed);
  std::vector<std::pair<std::uint64_t, std::uint64_t>> edges;
  edges.reserve(num_vertices * degree);
  for (std::uint64_t u = 0; u < num_vertices; ++u) {
    for (std::uint64_t s = 0; s < degree; ++s) {
      std::uint64_t v = rng.below(num_vertices - 1);
      if (v >= u) ++v;
      edges.emplace_back(u, v);
    }
  }
  return csr_from_edges(num_vertices, edges, direction);
}

// --- traces ----------------------------------------------------------------

GraphTrace gen_graph_trace(const CsrGraph& graph, const GraphTraceOptions& options) {
  const bool pull = options.mode == TraversalMode::Pull;
  if (pull != (graph.direction == EdgeDirection::In))
    throw GraphError("graph trace: pull needs an in-edge CSR, push an out-edge CSR");
  if (options.prop_bytes == 0 || options.block_bytes == 0) throw std::invalid_argument("graph trace: zero size");

  const std::uint64_t v_count = graph.num_vertices();
  const std::uint64_t page = 4096;
  auto align = [page](std::uint64_t x) { return (x + page - 1) / page * page; };
  GraphTrace out;
  const std::uint64_t prop_end = options.prop_base_address + v_count * options.prop_bytes;
  out.abrs.push_back({options.prop_base_address, std::max(prop_end, options.prop_base_address + 1)});
  out.vertex_base = align(prop_end);
  out.edge_base = align(out.vertex_base + (v_count + 1) * options.vertex_bytes);

  std::vector<MemoryAccess> records;
  records.reserve(options.iterations * (2 * v_count + 2 * graph.num_edges()));
  auto emit = [&records](std::uint64_t address, std::uint16_t pc, bool write) {
    MemoryAccess a;
    a.address = address;
    a.pc_signature = pc;
    a.is_write = write;
    records.push_back(a);
  };

  for (std::uint32_t it = 0; it < options.iterations; ++it) {
    std::uint64_t last_edge_block = UINT64_MAX;
    for (std::uint64_t v = 0; v < v_count; ++v) {
      emit(out.vertex_base + v * options.vertex_bytes, kVertexArrayPc, false);
      for (std::uint64_t e = graph.offsets[v]; e < graph.offsets[v + 1]; ++e) {
        const std::uint64_t address = out.edge_base + e * options.edge_bytes;
        const std::uint64_t block = address / options.block_bytes;
        if (block != last_edge_block) {
          emit(address, kEdgeArrayPc, false);
          last_edge_block = block;
        }
      }
      for (auto u : graph.neighbors(v))
        emit(options.prop_base_address + u * options.prop_bytes, kNeighborPropertyPc, !pull);
      emit(options.prop_base_address + v * options.prop_bytes, kOwnPropertyPc, pull);
    }
  }
  out.trace = Trace(std::move(records));
  return out;
}

}  // namespace cachelab
