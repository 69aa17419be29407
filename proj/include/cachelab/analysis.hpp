#pragma once

#include <cstdint>
#include <ostream>
#include <stdexcept>
#include <string>
#include <vector>

#include "cachelab/cache.hpp"

namespace cachelab {

/// Per-set distinct-block reuse distances. A re-reference whose previous
/// reference to the same block was followed by d-1 other distinct blocks of
/// the set has distance d (so it hits in LRU iff d <= ways).
struct ReuseDistanceHistogram {
  std::uint32_t cap = 64;
  /// counts[d - 1] for d in 1..cap.
  std::vector<std::uint64_t> counts;
  std::uint64_t overflow = 0;  // finite distance above cap
  std::uint64_t cold = 0;      // first touch

  std::uint64_t total() const;
  std::uint64_t at(std::uint32_t distance) const { return counts.at(distance - 1); }
  /// Fraction of accesses with finite distance <= d.
  double fraction_at_most(std::uint32_t d) const;
  /// cumulative()[d - 1] = fraction_at_most(d) for d in 1..cap.
  std::vector<double> cumulative() const;
};

/// Distance of each access, 0 for first touches.
std::vector<std::uint64_t> reuse_distances(const Trace& trace, const CacheGeometry& geometry);

ReuseDistanceHistogram reuse_distance_distribution(const Trace& trace, const CacheGeometry& geometry,
                                                   std::uint32_t cap = 64);

struct ComparisonError : std::invalid_argument {
  using std::invalid_argument::invalid_argument;
};

struct CompareRow {
  std::string policy;
  std::uint64_t misses = 0;
  double hit_rate = 0.0;
  /// 100 * (baseline misses - misses) / baseline misses; 0 when the baseline has no misses.
  double misses_eliminated_pct = 0.0;
  double coverage = 0.0;
  double accuracy = 0.0;
  double mpki = 0.0;
};

struct CompareTable {
  std::string baseline;
  std::vector<CompareRow> rows;
};

double misses_eliminated_pct(std::uint64_t baseline_misses, std::uint64_t misses);

/// Rows follow the order of `reports`. Throws ComparisonError when any
/// report's trace or geometry differs from the baseline's.
CompareTable compare(const std::vector<SimReport>& reports, const SimReport& baseline);

// Emission. `trace_name` labels the trace column.
void write_report_csv(std::ostream& out, const std::vector<SimReport>& reports, const std::string& trace_name);
void write_report_json(std::ostream& out, const std::vector<SimReport>& reports, const std::string& trace_name);
void write_compare_csv(std::ostream& out, const CompareTable& table);
void write_compare_json(std::ostream& out, const CompareTable& table);
/// distance,count rows (plus "overflow" and "inf"), or distance,cumulative_fraction with `cumulative`.
void write_histogram_csv(std::ostream& out, const ReuseDistanceHistogram& histogram, bool cumulative = false);
void write_histogram_json(std::ostream& out, const ReuseDistanceHistogram& histogram);

}  // namespace cachelab
