// cachelab: trace generation, graph reordering, simulation and comparison.

#include <CLI11.hpp>
#include <json.hpp>

#include <algorithm>
#include <cstring>
#include <deque>
#include <fstream>
#include <future>
#include <iostream>
#include <sstream>

#include "cachelab/analysis.hpp"
#include "cachelab/factory.hpp"
#include "cachelab/graph.hpp"
#include "cachelab/policies.hpp"

namespace cl = cachelab;

namespace {

/// Flat JSON object mirroring the flags: {"ways": 16, "abr": ["1:2"], "filter": "64x8"}.
/// Keys use '_' or '-'. Each key fills its option only when the command line
/// left it unset.
void apply_json_config(CLI::App* app, const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::invalid_argument("config: cannot open " + path);
  nlohmann::json j;
  try {
    in >> j;
  } catch (const nlohmann::json::exception& e) {
    throw std::invalid_argument(std::string("config: ") + e.what());
  }
  if (!j.is_object()) throw std::invalid_argument("config: top level must be a JSON object");
  for (const auto& [key, value] : j.items()) {
    std::string name = key;
    std::replace(name.begin(), name.end(), '_', '-');
    CLI::Option* opt = app->get_option_no_throw("--" + name);
    if (opt == nullptr || name == "config") throw std::invalid_argument("config: unknown key '" + key + "'");
    if (opt->count() > 0) continue;
    auto scalar = [&key](const nlohmann::json& v) -> std::string {
      if (v.is_string()) return v.get<std::string>();
      if (v.is_boolean()) return v.get<bool>() ? "true" : "false";
      if (v.is_number()) return v.dump();
      throw std::invalid_argument("config: unsupported value for '" + key + "'");
    };
    if (value.is_array())
      for (const auto& v : value) opt->add_result(scalar(v));
    else
      opt->add_result(scalar(value));
    try {
      opt->run_callback();
    } catch (const CLI::ParseError& e) {
      throw std::invalid_argument("config: '" + key + "': " + e.what());
    }
  }
}

// --- shared option groups ----------------------------------------------------

struct GeometryArgs {
  std::uint32_t sets = 0;
  std::uint32_t ways = 16;
  std::uint32_t block = 64;
  std::string capacity;

  void add(CLI::App* app) {
    auto* s = app->add_option("--sets", sets, "Number of sets (power of two)");
    auto* c = app->add_option("--capacity", capacity, "Capacity in bytes; K/M suffixes allowed (alternative to --sets)");
    s->excludes(c);
    app->add_option("--ways", ways, "Associativity (1..64)")->capture_default_str();
    app->add_option("--block", block, "Block size in bytes")->capture_default_str();
  }

  cl::CacheGeometry resolve() const {
    cl::CacheGeometry g;
    if (!capacity.empty()) {
      g = cl::CacheGeometry::from_capacity(parse_size(capacity), ways, block);
    } else {
      g.num_sets = sets ? sets : 1;
      g.ways = ways;
      g.block_bytes = block;
    }
    g.validate();
    return g;
  }

  static std::uint64_t parse_size(const std::string& text) {
    std::size_t used = 0;
    std::uint64_t v = std::stoull(text, &used, 0);
    const std::string suffix = text.substr(used);
    if (suffix == "K" || suffix == "k" || suffix == "KB") v <<= 10;
    else if (suffix == "M" || suffix == "m" || suffix == "MB") v <<= 20;
    else if (!suffix.empty()) throw std::invalid_argument("bad size '" + text + "'");
    return v;
  }
};

struct TraceArgs {
  std::string path;
  std::string gen;
  std::string filter;
  std::uint16_t pc = 0;

  void add(CLI::App* app) {
    auto* t = app->add_option("--trace", path, "Binary trace file");
    auto* g = app->add_option("--gen", gen, "Pattern generator spec, e.g. thrash:k=32,n=64");
    t->excludes(g);
    app->add_option("--filter", filter, "Filter cache SETSxWAYS run ahead of the LLC");
  }

  cl::Trace load(const cl::CacheGeometry& geometry) const {
    if (path.empty() == gen.empty()) throw std::invalid_argument("exactly one of --trace and --gen is required");
    cl::Trace trace = path.empty() ? cl::generate_pattern(cl::parse_pattern_spec(gen), pc) : cl::read_trace(path);
    if (!filter.empty()) {
      const auto x = filter.find('x');
      if (x == std::string::npos) throw std::invalid_argument("--filter expects SETSxWAYS");
      cl::CacheGeometry f;
      f.num_sets = static_cast<std::uint32_t>(std::stoul(filter.substr(0, x)));
      f.ways = static_cast<std::uint32_t>(std::stoul(filter.substr(x + 1)));
      f.block_bytes = geometry.block_bytes;
      f.validate();
      trace = cl::filter_trace(trace, f);
    }
    return trace;
  }

  std::string label() const { return path.empty() ? gen : path; }
};

struct PolicyArgs {
  std::vector<std::string> abrs;
  cl::PolicyOptions options;

  void add(CLI::App* app) {
    app->add_option("--abr", abrs, "Property array bounds start:end (repeatable)");
    app->add_option("--epsilon", options.bimodal_epsilon, "Bimodal insertion probability")->capture_default_str();
    app->add_option("--leaders", options.leader_sets, "Leader sets per dueling constituency")->capture_default_str();
    app->add_option("--psel-bits", options.psel_bits, "PSEL counter width")->capture_default_str();
    app->add_option("--ship-sampler-sets", options.ship_sampler_sets, "SHiP-MEM sampler sets")->capture_default_str();
    app->add_option("--pin-base", options.pin_base, "Base policy under PIN-X")->capture_default_str();
    app->add_option("--ldpt-entries", options.leeway.ldpt_entries, "Leeway predictor table entries")->capture_default_str();
    app->add_option("--sampler-sets", options.leeway.sampler_sets_per_policy, "Leeway sampler sets per update policy")
        ->capture_default_str();
    app->add_option("--duel-interval", options.leeway.sampler_access_interval,
                    "Leeway duel every N sampler accesses (0 = off)")
        ->capture_default_str();
    app->add_option("--duel-total-interval", options.leeway.total_access_interval,
                    "Leeway duel every N accesses (0 = off)")
        ->capture_default_str();
    app->add_option("--bop-prob", options.leeway.bop_sampler_insert_probability,
                    "Sampler insert probability for predicted-dead lines (BOP)")
        ->capture_default_str();
    app->add_option("--rop-prob", options.leeway.rop_sampler_insert_probability,
                    "Sampler insert probability for predicted-dead lines (ROP)")
        ->capture_default_str();
  }

  cl::PolicyOptions resolve() const {
    cl::PolicyOptions o = options;
    o.abrs.clear();
    for (const auto& a : abrs) o.abrs.push_back(cl::parse_abr(a));
    return o;
  }
};

struct OutputArgs {
  std::string format = "csv";
  std::string path;

  void add(CLI::App* app) {
    app->add_option("--format", format, "csv or json")->check(CLI::IsMember({"csv", "json"}))->capture_default_str();
    app->add_option("-o,--output", path, "Output file (default stdout)");
  }

  template <typename F>
  void emit(F&& write) const {
    if (path.empty()) {
      write(std::cout);
      return;
    }
    std::ofstream out(path);
    if (!out) throw std::runtime_error("cannot write " + path);
    write(out);
  }
};

cl::SimOptions sim_options(std::uint64_t seed, const cl::PolicyOptions& policy, const cl::CacheGeometry& g) {
  cl::SimOptions o;
  o.seed = seed;
  if (!policy.abrs.empty())
    for (const auto& r : cl::RegionMap(policy.abrs, g.capacity_bytes()).regions()) o.tracked_regions.push_back(r.high);
  return o;
}

cl::SimReport run_one(const std::string& name, const cl::Trace& trace, const cl::CacheGeometry& g,
                      const cl::PolicyOptions& policy, std::uint64_t seed) {
  auto p = cl::make_policy(name, policy);
  return cl::simulate(trace, g, *p, sim_options(seed, policy, g));
}

void write_reports(const OutputArgs& out, const std::vector<cl::SimReport>& reports, const std::string& label) {
  out.emit([&](std::ostream& os) {
    if (out.format == "json") cl::write_report_json(os, reports, label);
    else cl::write_report_csv(os, reports, label);
  });
}

cl::EdgeDirection parse_direction(const std::string& s) {
  return s == "out" ? cl::EdgeDirection::Out : cl::EdgeDirection::In;
}

cl::DegreeKind parse_degree(const std::string& s) {
  if (s == "in") return cl::DegreeKind::In;
  if (s == "sum") return cl::DegreeKind::Sum;
  return cl::DegreeKind::Out;
}

bool is_trace_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  char magic[4] = {};
  in.read(magic, 4);
  return in.gcount() == 4 && std::memcmp(magic, "CTR1", 4) == 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Cache replacement and graph locality laboratory"};
  app.require_subcommand(1);

  std::deque<std::pair<CLI::App*, std::string>> configs;  // stable references for the bound paths
  auto with_config = [&configs](CLI::App* sub) {
    configs.emplace_back(sub, std::string());
    sub->add_option("--config", configs.back().second, "Flat JSON file mirroring the flags; flags override it");
  };

  // simulate
  GeometryArgs sim_geo;
  TraceArgs sim_trace;
  PolicyArgs sim_policy;
  OutputArgs sim_out;
  std::string sim_name = "lru";
  std::uint64_t sim_seed = 1;
  auto* simulate = app.add_subcommand("simulate", "Run one policy over a trace");
  with_config(simulate);
  sim_geo.add(simulate);
  sim_trace.add(simulate);
  sim_policy.add(simulate);
  sim_out.add(simulate);
  simulate->add_option("--policy", sim_name, "Policy name")->capture_default_str();
  simulate->add_option("--seed", sim_seed, "Seed for every random draw of the run")->capture_default_str();

  // compare
  GeometryArgs cmp_geo;
  TraceArgs cmp_trace;
  PolicyArgs cmp_policy;
  OutputArgs cmp_out;
  std::string cmp_baseline = "lru";
  std::vector<std::string> cmp_names;
  std::uint64_t cmp_seed = 1;
  auto* compare = app.add_subcommand("compare", "Tabulate misses eliminated over a baseline");
  with_config(compare);
  cmp_geo.add(compare);
  cmp_trace.add(compare);
  cmp_policy.add(compare);
  cmp_out.add(compare);
  compare->add_option("--baseline", cmp_baseline, "Baseline policy")->capture_default_str();
  compare->add_option("--policies", cmp_names, "Comma-separated policies")->delimiter(',')->required();
  compare->add_option("--seed", cmp_seed, "Seed for every run")->capture_default_str();

  // opt
  GeometryArgs opt_geo;
  TraceArgs opt_trace;
  OutputArgs opt_out;
  bool opt_bypass = false;
  auto* opt = app.add_subcommand("opt", "Belady OPT miss count for a trace");
  with_config(opt);
  opt_geo.add(opt);
  opt_trace.add(opt);
  opt_out.add(opt);
  opt->add_flag("--bypass", opt_bypass, "Allow OPT to bypass");

  // gen-trace
  std::string gt_pattern, gt_graph, gt_out, gt_mode = "pull", gt_direction;
  std::uint16_t gt_pc = 0;
  std::uint32_t gt_prop = 8, gt_iterations = 1;
  auto* gen_trace = app.add_subcommand("gen-trace", "Write a pattern trace or a graph traversal trace");
  with_config(gen_trace);
  auto* gp = gen_trace->add_option("--pattern", gt_pattern, "Pattern spec, e.g. recency:k=8,n=4");
  auto* gg = gen_trace->add_option("--graph", gt_graph, "Graph (edge list or CSR) to traverse");
  gp->excludes(gg);
  gen_trace->add_option("--pc", gt_pc, "PC signature for pattern records");
  gen_trace->add_option("--mode", gt_mode, "pull or push")->check(CLI::IsMember({"pull", "push"}))->capture_default_str();
  gen_trace->add_option("--direction", gt_direction, "Adjacency direction of a CSR input: in or out (default from mode)")
      ->check(CLI::IsMember({"in", "out"}));
  gen_trace->add_option("--prop-bytes", gt_prop, "Property element size")->capture_default_str();
  gen_trace->add_option("--iterations", gt_iterations, "Traversal iterations")->capture_default_str();
  gen_trace->add_option("-o,--output", gt_out, "Trace file to write")->required();

  // gen-graph
  std::string gg_kind = "powerlaw", gg_out, gg_direction = "in";
  std::uint64_t gg_vertices = 100000, gg_seed = 1;
  double gg_degree = 16, gg_alpha = 2.1;
  auto* gen_graph = app.add_subcommand("gen-graph", "Synthesize a graph as binary CSR");
  with_config(gen_graph);
  gen_graph->add_option("--kind", gg_kind, "powerlaw or uniform")->check(CLI::IsMember({"powerlaw", "uniform"}))
      ->capture_default_str();
  gen_graph->add_option("--vertices", gg_vertices, "Vertex count")->capture_default_str();
  gen_graph->add_option("--degree", gg_degree, "Average degree")->capture_default_str();
  gen_graph->add_option("--alpha", gg_alpha, "Power-law exponent")->capture_default_str();
  gen_graph->add_option("--seed", gg_seed, "Seed")->capture_default_str();
  gen_graph->add_option("--direction", gg_direction, "Adjacency lists hold in- or out-neighbors")
      ->check(CLI::IsMember({"in", "out"}))
      ->capture_default_str();
  gen_graph->add_option("-o,--output", gg_out, "CSR file to write")->required();

  // reorder
  std::string ro_kind = "dbg", ro_in, ro_out, ro_map, ro_degree = "out", ro_direction = "in";
  std::uint64_t ro_granularity = 0, ro_seed = 1;
  auto* reorder = app.add_subcommand("reorder", "Relabel a graph's vertices");
  with_config(reorder);
  reorder->add_option("--kind", ro_kind, "dbg, sort, hubsort, hubcluster or random")
      ->check(CLI::IsMember({"dbg", "sort", "hubsort", "hubcluster", "random"}))
      ->capture_default_str();
  reorder->add_option("--degree", ro_degree, "Degree used for grouping: in, out or sum")
      ->check(CLI::IsMember({"in", "out", "sum"}))
      ->capture_default_str();
  reorder->add_option("--direction", ro_direction, "Adjacency direction of the input: in or out")
      ->check(CLI::IsMember({"in", "out"}))
      ->capture_default_str();
  reorder->add_option("--granularity", ro_granularity, "random: blocks per shuffled run (0 = per vertex)")
      ->capture_default_str();
  reorder->add_option("--seed", ro_seed, "random: seed")->capture_default_str();
  reorder->add_option("input", ro_in, "Edge list or CSR")->required();
  reorder->add_option("output", ro_out, "Reordered CSR")->required();
  reorder->add_option("remap", ro_map, "Remap file (old -> new)");

  // stats
  std::string st_path, st_degree = "out", st_direction = "in";
  bool st_histogram = false, st_cumulative = false;
  std::uint32_t st_cap = 64;
  GeometryArgs st_geo;
  OutputArgs st_out;
  auto* stats = app.add_subcommand("stats", "Summarize a graph or a trace");
  with_config(stats);
  stats->add_option("input", st_path, "Graph or trace file")->required();
  stats->add_option("--degree", st_degree, "Degree kind for hotness: in, out or sum")
      ->check(CLI::IsMember({"in", "out", "sum"}))
      ->capture_default_str();
  stats->add_option("--direction", st_direction, "Adjacency direction of the input graph")
      ->check(CLI::IsMember({"in", "out"}))
      ->capture_default_str();
  stats->add_flag("--histogram", st_histogram, "Trace: emit the reuse-distance distribution");
  stats->add_flag("--cumulative", st_cumulative, "With --histogram: emit the cumulative fraction");
  stats->add_option("--cap", st_cap, "Largest distance bucket")->capture_default_str();
  st_geo.add(stats);
  st_out.add(stats);

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    return app.exit(e);
  }

  try {
    for (const auto& [sub, path] : configs)
      if (*sub && !path.empty()) apply_json_config(sub, path);
    if (*simulate) {
      const auto g = sim_geo.resolve();
      const auto trace = sim_trace.load(g);
      const auto policy = sim_policy.resolve();
      write_reports(sim_out, {run_one(sim_name, trace, g, policy, sim_seed)}, sim_trace.label());
    } else if (*compare) {
      const auto g = cmp_geo.resolve();
      const auto trace = cmp_trace.load(g);
      const auto policy = cmp_policy.resolve();
      for (const auto& n : cmp_names) cl::make_policy(n, policy);  // fail fast on unknown names
      auto baseline = std::async(std::launch::async, run_one, cmp_baseline, std::cref(trace), g, policy, cmp_seed);
      std::vector<std::future<cl::SimReport>> runs;
      for (const auto& n : cmp_names)
        runs.push_back(std::async(std::launch::async, run_one, n, std::cref(trace), g, policy, cmp_seed));
      std::vector<cl::SimReport> reports;
      for (auto& r : runs) reports.push_back(r.get());
      const auto table = cl::compare(reports, baseline.get());
      cmp_out.emit([&](std::ostream& os) {
        if (cmp_out.format == "json") cl::write_compare_json(os, table);
        else cl::write_compare_csv(os, table);
      });
    } else if (*opt) {
      const auto g = opt_geo.resolve();
      const auto trace = opt_trace.load(g);
      write_reports(opt_out, {cl::opt_oracle(trace, g, opt_bypass)}, opt_trace.label());
    } else if (*gen_trace) {
      if (gt_pattern.empty() == gt_graph.empty()) throw std::invalid_argument("exactly one of --pattern and --graph is required");
      if (!gt_pattern.empty()) {
        cl::write_trace(cl::generate_pattern(cl::parse_pattern_spec(gt_pattern), gt_pc), gt_out);
      } else {
        cl::GraphTraceOptions o;
        o.mode = gt_mode == "push" ? cl::TraversalMode::Push : cl::TraversalMode::Pull;
        o.prop_bytes = gt_prop;
        o.iterations = gt_iterations;
        cl::EdgeListOptions el;
        el.direction = gt_direction.empty() ? (o.mode == cl::TraversalMode::Pull ? cl::EdgeDirection::In
                                                                                 : cl::EdgeDirection::Out)
                                            : parse_direction(gt_direction);
        const auto graph = cl::load_graph(gt_graph, el);
        const auto gt = cl::gen_graph_trace(graph, o);
        cl::write_trace(gt.trace, gt_out);
        for (const auto& abr : gt.abrs) std::cout << "abr=0x" << std::hex << abr.start << ":0x" << abr.end << std::dec << '\n';
      }
    } else if (*gen_graph) {
      const auto graph = gg_kind == "uniform"
                             ? cl::synth_uniform(gg_vertices, static_cast<std::uint64_t>(gg_degree), gg_seed,
                                                 parse_direction(gg_direction))
                             : cl::synth_powerlaw(gg_vertices, gg_degree, gg_alpha, gg_seed,
                                                  parse_direction(gg_direction));
      cl::write_csr(graph, gg_out);
    } else if (*reorder) {
      cl::EdgeListOptions el;
      el.direction = parse_direction(ro_direction);
      const auto graph = cl::load_graph(ro_in, el);
      cl::VertexRemap remap;
      if (ro_kind == "random") remap = cl::random_reorder(graph.num_vertices(), ro_granularity, ro_seed);
      else {
        const cl::ReorderKind kind = ro_kind == "sort"         ? cl::ReorderKind::Sort
                                     : ro_kind == "hubsort"    ? cl::ReorderKind::HubSort
                                     : ro_kind == "hubcluster" ? cl::ReorderKind::HubCluster
                                                               : cl::ReorderKind::Dbg;
        remap = cl::family_reorder(graph, kind, parse_degree(ro_degree));
      }
      cl::write_csr(cl::apply_remap(graph, remap), ro_out);
      if (!ro_map.empty()) cl::write_remap(remap, ro_map);
    } else if (*stats) {
      if (is_trace_file(st_path)) {
        const auto trace = cl::read_trace(st_path);
        const auto g = st_geo.resolve();
        if (st_histogram) {
          const auto h = cl::reuse_distance_distribution(trace, g, st_cap);
          st_out.emit([&](std::ostream& os) {
            if (st_out.format == "json") cl::write_histogram_json(os, h);
            else cl::write_histogram_csv(os, h, st_cumulative);
          });
        } else {
          std::uint64_t writes = 0, hinted = 0;
          std::vector<std::uint64_t> blocks;
          for (const auto& r : trace) {
            writes += r.is_write;
            hinted += r.hint_valid;
            blocks.push_back(g.block_of(r.address));
          }
          std::sort(blocks.begin(), blocks.end());
          const auto unique = static_cast<std::uint64_t>(std::unique(blocks.begin(), blocks.end()) - blocks.begin());
          st_out.emit([&](std::ostream& os) {
            if (st_out.format == "json") {
              os << nlohmann::json{{"accesses", trace.size()}, {"unique_blocks", unique}, {"writes", writes},
                                   {"hinted", hinted}, {"instructions", trace.total_instructions()},
                                   {"fingerprint", trace.fingerprint()}}
                        .dump(2)
                 << '\n';
            } else {
              os << "accesses,unique_blocks,writes,hinted,instructions,fingerprint\n"
                 << trace.size() << ',' << unique << ',' << writes << ',' << hinted << ','
                 << trace.total_instructions() << ',' << trace.fingerprint() << '\n';
            }
          });
        }
      } else {
        cl::EdgeListOptions el;
        el.direction = parse_direction(st_direction);
        const auto graph = cl::load_graph(st_path, el);
        const auto profile = cl::degree_profile(graph, parse_degree(st_degree));
        const auto m = cl::skew_metrics(profile);
        st_out.emit([&](std::ostream& os) {
          if (st_out.format == "json") {
            os << nlohmann::json{{"vertices", graph.num_vertices()}, {"edges", graph.num_edges()},
                                 {"average_degree", m.average_degree}, {"max_degree", profile.max},
                                 {"hot_vertices", m.hot_vertices}, {"hot_fraction", m.hot_fraction},
                                 {"hot_edge_coverage", m.hot_edge_coverage}, {"avg_hot_per_block", m.avg_hot_per_block},
                                 {"hot_footprint_bytes", m.hot_footprint_bytes}}
                      .dump(2)
               << '\n';
          } else {
            os << "vertices,edges,average_degree,max_degree,hot_vertices,hot_fraction,hot_edge_coverage,"
                  "avg_hot_per_block,hot_footprint_bytes\n"
               << graph.num_vertices() << ',' << graph.num_edges() << ',' << m.average_degree << ',' << profile.max
               << ',' << m.hot_vertices << ',' << m.hot_fraction << ',' << m.hot_edge_coverage << ','
               << m.avg_hot_per_block << ',' << m.hot_footprint_bytes << '\n';
          }
        });
      }
    }
  } catch (const std::exception& e) {
    std::cerr << "cachelab: error: " << e.what() << '\n';
    return 1;
  }
  return 0;
}
