#pragma once

#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <limits>
#include <span>
#include <stdexcept>
#include <utility>
#include <vector>

#include "cachelab/grasp.hpp"
#include "cachelab/trace.hpp"

namespace cachelab {

struct GraphError : std::runtime_error {
  using std::runtime_error::runtime_error;
};
struct GraphFormatError : GraphError {
  using GraphError::GraphError;
};
struct GraphBadMagicError : GraphFormatError {
  using GraphFormatError::GraphFormatError;
};
struct GraphTruncatedError : GraphFormatError {
  using GraphFormatError::GraphFormatError;
};

/// In = adjacency lists hold in-neighbors (pull); Out = out-neighbors (push).
enum class EdgeDirection : std::uint8_t { In, Out };
enum class DegreeKind : std::uint8_t { In, Out, Sum };

/// Compressed sparse row graph: offsets (Vertex array, V+1 entries) and
/// edges (Edge array, E entries).
struct CsrGraph {
  std::vector<std::uint64_t> offsets{0};
  std::vector<std::uint64_t> edges;
  EdgeDirection direction = EdgeDirection::In;

  std::uint64_t num_vertices() const { return offsets.size() - 1; }
  std::uint64_t num_edges() const { return edges.size(); }
  std::span<const std::uint64_t> neighbors(std::uint64_t v) const {
    return {edges.data() + offsets[v], edges.data() + offsets[v + 1]};
  }
  void validate() const;

  friend bool operator==(const CsrGraph&, const CsrGraph&) = default;
};

/// Builds a CSR from (src, dst) pairs. For In graphs, lists are grouped by
/// destination and hold sources; for Out graphs the reverse.
CsrGraph csr_from_edges(std::uint64_t num_vertices,
                        const std::vector<std::pair<std::uint64_t, std::uint64_t>>& edges,
                        EdgeDirection direction, bool sort_adjacency = true);

struct EdgeListOptions {
  EdgeDirection direction = EdgeDirection::In;
  /// Vertex count; inferred as max ID + 1 when zero.
  std::uint64_t num_vertices = 0;
  /// Renumber the IDs that appear to 0..k-1, preserving their order.
  bool compact_ids = false;
  bool sort_adjacency = true;
};

/// Lines of "src dst"; '#' starts a comment.
CsrGraph parse_edge_list(std::istream& in, const EdgeListOptions& options = {});
CsrGraph load_edge_list(const std::filesystem::path& path, const EdgeListOptions& options = {});

std::vector<std::uint8_t> encode_csr(const CsrGraph& graph);
CsrGraph decode_csr(const std::vector<std::uint8_t>& bytes, EdgeDirection direction = EdgeDirection::In);
void write_csr(const CsrGraph& graph, const std::filesystem::path& path);
CsrGraph read_csr(const std::filesystem::path& path, EdgeDirection direction = EdgeDirection::In);

/// Loads a binary CSR ("CSR1" magic) or, failing that, an edge list.
CsrGraph load_graph(const std::filesystem::path& path, const EdgeListOptions& options = {});

std::vector<std::uint64_t> degrees(const CsrGraph& graph, DegreeKind kind);

struct DegreeProfile {
  std::vector<std::uint64_t> degree;
  double average = 0.0;
  std::uint64_t max = 0;
  std::uint64_t min = 0;
  bool hot(std::uint64_t v) const { return static_cast<double>(degree[v]) >= average; }
};
DegreeProfile degree_profile(std::vector<std::uint64_t> degree);
DegreeProfile degree_profile(const CsrGraph& graph, DegreeKind kind);

inline constexpr double kUnbounded = std::numeric_limits<double>::infinity();

/// Half-open degree range [low, high).
struct DegreeRange {
  double low = 0;
  double high = kUnbounded;
  bool contains(double d) const { return d >= low && d < high; }
};

/// Contiguous, descending, exhaustive degree ranges; hottest group first.
struct GroupingSpec {
  std::vector<DegreeRange> groups;
  /// Throws GraphError unless the ranges are contiguous and descending,
  /// and cover [profile.min, profile.max].
  void validate(const DegreeProfile& profile) const;
  /// Index of the group holding degree d.
  std::size_t group_of(double d) const;
};

/// The eight geometric ranges [32A, inf), [16A, 32A), ..., [A, 2A),
/// [A/2, A), [0, A/2) for average degree A.
GroupingSpec dbg_default_spec(double average_degree);
/// [0, C) followed by [2^n C, 2^(n+1) C) for n = 0 .. floor(log2(max/C)).
GroupingSpec dbg_geometric_spec(double threshold, std::uint64_t max_degree);
GroupingSpec sort_spec(const DegreeProfile& profile);
GroupingSpec hub_sort_spec(const DegreeProfile& profile);
GroupingSpec hub_cluster_spec(const DegreeProfile& profile);

/// old ID -> new ID.
struct VertexRemap {
  std::vector<std::uint64_t> new_id;

  std::uint64_t size() const { return new_id.size(); }
  bool is_bijection() const;
  VertexRemap inverse() const;
  static VertexRemap identity(std::uint64_t n);
  friend bool operator==(const VertexRemap&, const VertexRemap&) = default;
};

/// Single pass: append each vertex to the group holding its degree, then
/// number group by group. Within-group order is the original order.
VertexRemap dbg_reorder(const DegreeProfile& profile, const GroupingSpec& spec);
VertexRemap dbg_reorder(const CsrGraph& graph, const GroupingSpec& spec, DegreeKind kind);

enum class ReorderKind { Sort, HubSort, HubCluster, Dbg };
VertexRemap family_reorder(const CsrGraph& graph, ReorderKind kind, DegreeKind degree_kind);

/// granularity_blocks = 0: uniform random vertex permutation. Otherwise runs
/// of granularity_blocks * (block_bytes / prop_bytes) consecutive vertices
/// are shuffled as units.
VertexRemap random_reorder(std::uint64_t num_vertices, std::uint64_t granularity_blocks,
                           std::uint64_t seed, std::uint32_t prop_bytes = 8,
                           std::uint32_t block_bytes = 64);

/// Relabels vertices; adjacency lists of the result are sorted.
CsrGraph apply_remap(const CsrGraph& graph, const VertexRemap& remap);

std::vector<std::uint8_t> encode_remap(const VertexRemap& remap);
VertexRemap decode_remap(const std::vector<std::uint8_t>& bytes);
void write_remap(const VertexRemap& remap, const std::filesystem::path& path);
VertexRemap read_remap(const std::filesystem::path& path);

struct SkewMetrics {
  std::uint64_t vertices = 0;
  std::uint64_t hot_vertices = 0;
  double average_degree = 0.0;
  double hot_fraction = 0.0;
  double hot_edge_coverage = 0.0;
  /// Averaged over blocks holding at least one hot vertex.
  double avg_hot_per_block = 0.0;
  std::uint64_t hot_footprint_bytes = 0;
};

SkewMetrics skew_metrics(const DegreeProfile& profile, std::uint32_t prop_bytes = 8,
                         std::uint32_t block_bytes = 64);
SkewMetrics skew_metrics(const CsrGraph& graph, DegreeKind kind, std::uint32_t prop_bytes = 8,
                         std::uint32_t block_bytes = 64);

/// Truncated power-law degree sequence (exponent `alpha`, mean close to
/// `avg_degree`) wired by degree-weighted endpoint sampling; self-loops are
/// dropped.
CsrGraph synth_powerlaw(std::uint64_t num_vertices, double avg_degree, double alpha,
                        std::uint64_t seed, EdgeDirection direction = EdgeDirection::In);

/// Every vertex gets exactly `degree` out-edges to uniformly chosen
/// other vertices.
CsrGraph synth_uniform(std::uint64_t num_vertices, std::uint64_t degree, std::uint64_t seed,
                       EdgeDirection direction = EdgeDirection::In);

enum class TraversalMode { Pull, Push };

// PC signatures used for the graph trace's four access streams.
inline constexpr std::uint16_t kVertexArrayPc = 0x101;
inline constexpr std::uint16_t kEdgeArrayPc = 0x102;
inline constexpr std::uint16_t kNeighborPropertyPc = 0x103;
inline constexpr std::uint16_t kOwnPropertyPc = 0x104;

struct GraphTraceOptions {
  std::uint32_t prop_bytes = 8;
  std::uint64_t prop_base_address = 0x10000000;
  TraversalMode mode = TraversalMode::Pull;
  std::uint32_t block_bytes = 64;
  std::uint32_t vertex_bytes = 8;
  std::uint32_t edge_bytes = 4;
  std::uint32_t iterations = 1;
};

struct GraphTrace {
  Trace trace;
  std::vector<AddressBoundRegister> abrs;  // the Property Array
  std::uint64_t vertex_base = 0;
  std::uint64_t edge_base = 0;
};

/// Address stream of one vertex-centric iteration per `iterations`: for each
/// vertex, its Vertex-array entry, the Edge-array blocks its list touches
/// (each block once), one Property access per neighbor, then its own
/// Property element. Vertex and Edge arrays sit after the Property Array.
GraphTrace gen_graph_trace(const CsrGraph& graph, const GraphTraceOptions& options = {});

}  // namespace cachelab
