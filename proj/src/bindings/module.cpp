// Python bindings: traces, simulation, comparison, reuse distances and
// graph locality tools. Reports come back as plain dicts.

#include <pybind11/operators.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>
#include <pybind11/stl/filesystem.h>

#include "cachelab/analysis.hpp"
#include "cachelab/factory.hpp"
#include "cachelab/graph.hpp"

namespace py = pybind11;
using namespace cachelab;

namespace {

py::dict report_dict(const SimReport& r) {
  py::dict d;
  d["policy"] = r.policy;
  d["sets"] = r.geometry.num_sets;
  d["ways"] = r.geometry.ways;
  d["block_bytes"] = r.geometry.block_bytes;
  d["accesses"] = r.accesses;
  d["hits"] = r.hits;
  d["misses"] = r.misses;
  d["hit_rate"] = r.hit_rate();
  d["insertions"] = r.insertions;
  d["bypasses"] = r.bypasses;
  d["evictions"] = r.evictions;
  d["dead_predicted_evictions"] = r.dead_predicted_evictions;
  d["coverage"] = r.coverage();
  d["accuracy"] = r.accuracy();
  d["mpki"] = r.mpki();
  py::list regions;
  for (const auto& g : r.regions) {
    py::dict x;
    x["start"] = g.range.start;
    x["end"] = g.range.end;
    x["accesses"] = g.accesses;
    x["hits"] = g.hits;
    x["hit_rate"] = g.hit_rate();
    regions.append(x);
  }
  d["regions"] = regions;
  return d;
}

std::vector<AddressBoundRegister> to_abrs(const std::vector<std::pair<std::uint64_t, std::uint64_t>>& pairs) {
  std::vector<AddressBoundRegister> out;
  for (const auto& [s, e] : pairs) out.push_back({s, e});
  return out;
}

SimReport run(const Trace& trace, const CacheGeometry& g, const std::string& policy, std::uint64_t seed,
              const std::vector<AddressBoundRegister>& abrs) {
  PolicyOptions o;
  o.abrs = abrs;
  auto p = make_policy(policy, o);
  SimOptions so;
  so.seed = seed;
  if (!abrs.empty()) {
    const RegionMap regions(abrs, g.capacity_bytes());
    for (const auto& r : regions.regions()) so.tracked_regions.push_back(r.high);
  }
  py::gil_scoped_release release;
  return simulate(trace, g, *p, so);
}

DegreeKind degree_kind(const std::string& s) {
  if (s == "in") return DegreeKind::In;
  if (s == "out") return DegreeKind::Out;
  if (s == "sum") return DegreeKind::Sum;
  throw std::invalid_argument("degree must be in, out or sum");
}

EdgeDirection direction(const std::string& s) {
  if (s == "in") return EdgeDirection::In;
  if (s == "out") return EdgeDirection::Out;
  throw std::invalid_argument("direction must be in or out");
}

}  // namespace

PYBIND11_MODULE(_core, m) {
  m.doc() = "Cache replacement and graph locality laboratory";

  py::register_exception<TraceFormatError>(m, "TraceFormatError", PyExc_ValueError);
  py::register_exception<GraphError>(m, "GraphError", PyExc_ValueError);

  py::class_<CacheGeometry>(m, "CacheGeometry")
      .def(py::init([](std::uint32_t sets, std::uint32_t ways, std::uint32_t block) {
             CacheGeometry g{sets, ways, block};
             g.validate();
             return g;
           }),
           py::arg("sets"), py::arg("ways"), py::arg("block_bytes") = 64)
      .def_static("from_capacity", &CacheGeometry::from_capacity, py::arg("capacity_bytes"), py::arg("ways"),
                  py::arg("block_bytes") = 64)
      .def_readonly("sets", &CacheGeometry::num_sets)
      .def_readonly("ways", &CacheGeometry::ways)
      .def_readonly("block_bytes", &CacheGeometry::block_bytes)
      .def_property_readonly("capacity_bytes", &CacheGeometry::capacity_bytes)
      .def("__repr__", [](const CacheGeometry& g) {
        return "CacheGeometry(sets=" + std::to_string(g.num_sets) + ", ways=" + std::to_string(g.ways) +
               ", block_bytes=" + std::to_string(g.block_bytes) + ")";
      });

  py::class_<Trace>(m, "Trace")
      .def(py::init([](const std::vector<std::uint64_t>& addresses, std::vector<std::uint16_t> pcs,
                       std::vector<bool> writes) {
             if (!pcs.empty() && pcs.size() != addresses.size())
               throw std::invalid_argument("pcs must match addresses in length");
             if (!writes.empty() && writes.size() != addresses.size())
               throw std::invalid_argument("writes must match addresses in length");
             std::vector<MemoryAccess> records(addresses.size());
             for (std::size_t i = 0; i < addresses.size(); ++i) {
               records[i].address = addresses[i];
               if (!pcs.empty()) records[i].pc_signature = pcs[i];
               if (!writes.empty()) records[i].is_write = writes[i];
             }
             return Trace(std::move(records));
           }),
           py::arg("addresses"), py::arg("pcs") = std::vector<std::uint16_t>{},
           py::arg("writes") = std::vector<bool>{})
      .def("__len__", &Trace::size)
      .def_property_readonly("addresses", [](const Trace& t) {
        std::vector<std::uint64_t> a;
        a.reserve(t.size());
        for (const auto& r : t) a.push_back(r.address);
        return a;
      })
      .def_property_readonly("pcs", [](const Trace& t) {
        std::vector<std::uint16_t> a;
        a.reserve(t.size());
        for (const auto& r : t) a.push_back(r.pc_signature);
        return a;
      })
      .def("to_bytes", [](const Trace& t) {
        const auto b = encode_trace(t);
        return py::bytes(reinterpret_cast<const char*>(b.data()), b.size());
      })
      .def_static("from_bytes", [](const py::bytes& data) {
        const std::string s = data;
        return decode_trace(std::vector<std::uint8_t>(s.begin(), s.end()));
      })
      .def(py::self == py::self);

  m.def("read_trace", &read_trace, py::arg("path"));
  m.def("write_trace", &write_trace, py::arg("trace"), py::arg("path"));
  m.def(
      "generate_pattern", [](const std::string& spec, std::uint16_t pc) { return generate_pattern(parse_pattern_spec(spec), pc); },
      py::arg("spec"), py::arg("pc") = 0);

  m.def("policy_names", &policy_names);
  m.def(
      "simulate",
      [](const Trace& t, const CacheGeometry& g, const std::string& policy, std::uint64_t seed,
         const std::vector<std::pair<std::uint64_t, std::uint64_t>>& abrs) {
        return report_dict(run(t, g, policy, seed, to_abrs(abrs)));
      },
      py::arg("trace"), py::arg("geometry"), py::arg("policy") = "lru", py::arg("seed") = 1,
      py::arg("abrs") = std::vector<std::pair<std::uint64_t, std::uint64_t>>{});
  m.def(
      "compare",
      [](const Trace& t, const CacheGeometry& g, const std::vector<std::string>& policies,
         const std::string& baseline, std::uint64_t seed,
         const std::vector<std::pair<std::uint64_t, std::uint64_t>>& abrs) {
        const auto a = to_abrs(abrs);
        const SimReport base = run(t, g, baseline, seed, a);
        std::vector<SimReport> reports;
        for (const auto& p : policies) reports.push_back(run(t, g, p, seed, a));
        py::list rows;
        for (const auto& row : cachelab::compare(reports, base).rows) {
          py::dict d;
          d["policy"] = row.policy;
          d["baseline"] = baseline;
          d["misses"] = row.misses;
          d["hit_rate"] = row.hit_rate;
          d["misses_eliminated_pct"] = row.misses_eliminated_pct;
          d["coverage"] = row.coverage;
          d["accuracy"] = row.accuracy;
          d["mpki"] = row.mpki;
          rows.append(d);
        }
        return rows;
      },
      py::arg("trace"), py::arg("geometry"), py::arg("policies"), py::arg("baseline") = "lru", py::arg("seed") = 1,
      py::arg("abrs") = std::vector<std::pair<std::uint64_t, std::uint64_t>>{});

  m.def("reuse_distances", &reuse_distances, py::arg("trace"), py::arg("geometry"));
  m.def(
      "reuse_histogram",
      [](const Trace& t, const CacheGeometry& g, std::uint32_t cap) {
        const auto h = reuse_distance_distribution(t, g, cap);
        py::dict d;
        d["counts"] = h.counts;
        d["overflow"] = h.overflow;
        d["inf"] = h.cold;
        d["cumulative"] = h.cumulative();
        return d;
      },
      py::arg("trace"), py::arg("geometry"), py::arg("cap") = 64);

  py::class_<CsrGraph>(m, "CsrGraph")
      .def_property_readonly("num_vertices", &CsrGraph::num_vertices)
      .def_property_readonly("num_edges", &CsrGraph::num_edges)
      .def_readonly("offsets", &CsrGraph::offsets)
      .def_readonly("edges", &CsrGraph::edges)
      .def("neighbors",
           [](const CsrGraph& g, std::uint64_t v) {
             if (v >= g.num_vertices()) throw py::index_error("vertex out of range");
             const auto n = g.neighbors(v);
             return std::vector<std::uint64_t>(n.begin(), n.end());
           })
      .def("degrees", [](const CsrGraph& g, const std::string& kind) { return degrees(g, degree_kind(kind)); },
           py::arg("kind") = "out")
      .def(py::self == py::self);

  m.def(
      "csr_from_edges",
      [](std::uint64_t n, const std::vector<std::pair<std::uint64_t, std::uint64_t>>& edges, const std::string& dir) {
        return csr_from_edges(n, edges, direction(dir));
      },
      py::arg("num_vertices"), py::arg("edges"), py::arg("direction") = "in");
  m.def(
      "synth_powerlaw",
      [](std::uint64_t v, double d, double alpha, std::uint64_t seed, const std::string& dir) {
        return synth_powerlaw(v, d, alpha, seed, direction(dir));
      },
      py::arg("vertices"), py::arg("avg_degree"), py::arg("alpha"), py::arg("seed") = 1, py::arg("direction") = "in");
  m.def(
      "synth_uniform",
      [](std::uint64_t v, std::uint64_t d, std::uint64_t seed, const std::string& dir) {
        return synth_uniform(v, d, seed, direction(dir));
      },
      py::arg("vertices"), py::arg("degree"), py::arg("seed") = 1, py::arg("direction") = "in");
  m.def(
      "read_csr", [](const std::filesystem::path& p, const std::string& dir) { return read_csr(p, direction(dir)); },
      py::arg("path"), py::arg("direction") = "in");
  m.def("write_csr", &write_csr, py::arg("graph"), py::arg("path"));

  m.def(
      "reorder",
      [](const CsrGraph& g, const std::string& kind, const std::string& degree, std::uint64_t seed,
         std::uint64_t granularity) {
        if (kind == "random") return random_reorder(g.num_vertices(), granularity, seed).new_id;
        const std::pair<const char*, ReorderKind> kinds[] = {{"dbg", ReorderKind::Dbg},
                                                             {"sort", ReorderKind::Sort},
                                                             {"hubsort", ReorderKind::HubSort},
                                                             {"hubcluster", ReorderKind::HubCluster}};
        for (const auto& [name, k] : kinds)
          if (kind == name) return family_reorder(g, k, degree_kind(degree)).new_id;
        throw std::invalid_argument("unknown reorder kind '" + kind + "'");
      },
      py::arg("graph"), py::arg("kind") = "dbg", py::arg("degree") = "out", py::arg("seed") = 1,
      py::arg("granularity") = 0, "Returns new_id[old_id].");
  m.def(
      "apply_remap", [](const CsrGraph& g, std::vector<std::uint64_t> new_id) { return apply_remap(g, {std::move(new_id)}); },
      py::arg("graph"), py::arg("new_id"));
  m.def(
      "skew_metrics",
      [](const CsrGraph& g, const std::string& degree, std::uint32_t prop_bytes, std::uint32_t block_bytes) {
        const auto s = skew_metrics(g, degree_kind(degree), prop_bytes, block_bytes);
        py::dict d;
        d["vertices"] = s.vertices;
        d["hot_vertices"] = s.hot_vertices;
        d["average_degree"] = s.average_degree;
        d["hot_fraction"] = s.hot_fraction;
        d["hot_edge_coverage"] = s.hot_edge_coverage;
        d["avg_hot_per_block"] = s.avg_hot_per_block;
        d["hot_footprint_bytes"] = s.hot_footprint_bytes;
        return d;
      },
      py::arg("graph"), py::arg("degree") = "out", py::arg("prop_bytes") = 8, py::arg("block_bytes") = 64);
  m.def(
      "graph_trace",
      [](const CsrGraph& g, std::uint32_t prop_bytes, const std::string& mode, std::uint32_t iterations) {
        GraphTraceOptions o;
        o.prop_bytes = prop_bytes;
        o.iterations = iterations;
        if (mode == "pull") o.mode = TraversalMode::Pull;
        else if (mode == "push") o.mode = TraversalMode::Push;
        else throw std::invalid_argument("mode must be pull or push");
        const auto t = gen_graph_trace(g, o);
        return py::make_tuple(t.trace, std::make_pair(t.abrs.front().start, t.abrs.front().end));
      },
      py::arg("graph"), py::arg("prop_bytes") = 8, py::arg("mode") = "pull", py::arg("iterations") = 1,
      "Returns (trace, (abr_start, abr_end)).");
}
