#pragma once

#include <cstdint>
#include <filesystem>
#include <stdexcept>
#include <string>
#include <vector>

namespace cachelab {

inline constexpr std::uint16_t kPcSignatureBits = 14;
inline constexpr std::uint16_t kPcSignatureMask = (1u << kPcSignatureBits) - 1;

enum class ReuseHint : std::uint8_t { Default = 0, High = 1, Moderate = 2, Low = 3 };

const char* to_string(ReuseHint hint);

struct MemoryAccess {
  std::uint64_t address = 0;
  std::uint16_t pc_signature = 0;
  bool is_write = false;
  ReuseHint reuse_hint = ReuseHint::Default;
  bool hint_valid = false;
  std::uint32_t inst_delta = 1;

  friend bool operator==(const MemoryAccess&, const MemoryAccess&) = default;
};

/// Folds a full instruction address into a 14-bit signature by xor-ing
/// successive 14-bit slices.
std::uint16_t fold_pc(std::uint64_t pc);

class Trace {
 public:
  Trace() = default;
  explicit Trace(std::vector<MemoryAccess> records);

  const std::vector<MemoryAccess>& records() const { return records_; }
  std::size_t size() const { return records_.size(); }
  bool empty() const { return records_.empty(); }
  const MemoryAccess& operator[](std::size_t i) const { return records_[i]; }
  auto begin() const { return records_.begin(); }
  auto end() const { return records_.end(); }

  std::uint64_t total_instructions() const { return total_instructions_; }
  bool has_hints() const;

  /// Order-sensitive 64-bit digest of the serialized records; used to check
  /// that reports being compared came from the same trace.
  std::uint64_t fingerprint() const;

  friend bool operator==(const Trace& a, const Trace& b) { return a.records_ == b.records_; }

 private:
  std::vector<MemoryAccess> records_;
  std::uint64_t total_instructions_ = 0;
};

// Trace file errors. Each malformed-input condition has its own type so
// callers (and the CLI) can report them distinctly.
struct TraceFormatError : std::runtime_error {
  using std::runtime_error::runtime_error;
};
struct BadMagicError : TraceFormatError {
  using TraceFormatError::TraceFormatError;
};
struct VersionMismatchError : TraceFormatError {
  using TraceFormatError::TraceFormatError;
};
struct TruncatedTraceError : TraceFormatError {
  using TraceFormatError::TraceFormatError;
};
struct InvalidRecordError : TraceFormatError {
  using TraceFormatError::TraceFormatError;
};

inline constexpr std::size_t kTraceHeaderBytes = 16;
inline constexpr std::size_t kTraceRecordBytes = 16;
inline constexpr std::uint8_t kTraceVersion = 1;

std::vector<std::uint8_t> encode_trace(const Trace& trace);
Trace decode_trace(const std::vector<std::uint8_t>& bytes);

Trace read_trace(const std::filesystem::path& path);
void write_trace(const Trace& trace, const std::filesystem::path& path);

// Canonical LLC access patterns.
enum class PatternKind { RecencyFriendly, Streaming, Thrashing };

struct PatternSpec {
  PatternKind kind = PatternKind::Thrashing;
  std::uint64_t k = 1;
  std::uint64_t n = 1;
  std::uint64_t base_address = 0;
  std::uint64_t stride = 64;
};

struct InvalidSpecError : std::invalid_argument {
  using std::invalid_argument::invalid_argument;
};

/// RecencyFriendly: (a1..ak, ak..a1)^n. Streaming: a1..ak once.
/// Thrashing: (a1..ak)^n. a_i = base + (i-1)*stride.
Trace generate_pattern(const PatternSpec& spec, std::uint16_t pc = 0);

/// Parses "thrash:k=32,n=64[,base=..,stride=..]"; kinds are recency, stream, thrash.
PatternSpec parse_pattern_spec(const std::string& text);

}  // namespace cachelab
