#include "cachelab/trace.hpp"

#include <array>
#include <cstring>
#include <fstream>
#include <iterator>
#include <sstream>

namespace cachelab {

namespace {

constexpr std::array<char, 4> kMagic = {'C', 'T', 'R', '1'};

void put_le(std::vector<std::uint8_t>& out, std::uint64_t value, int bytes) {
  for (int i = 0; i < bytes; ++i) out.push_back(static_cast<std::uint8_t>(value >> (8 * i)));
}

std::uint64_t get_le(const std::uint8_t* p, int bytes) {
  std::uint64_t value = 0;
  for (int i = 0; i < bytes; ++i) value |= static_cast<std::uint64_t>(p[i]) << (8 * i);
  return value;
}

void validate(const MemoryAccess& a) {
  if (a.pc_signature > kPcSignatureMask)
    throw std::invalid_argument("pc_signature exceeds 14 bits");
  if (!a.hint_valid && a.reuse_hint != ReuseHint::Default)
    throw std::invalid_argument("reuse hint set without hint_valid");
}

}  // namespace

const char* to_string(ReuseHint hint) {
  switch (hint) {
    case ReuseHint::Default: return "default";
    case ReuseHint::High: return "high";
    case ReuseHint::Moderate: return "moderate";
    case ReuseHint::Low: return "low";
  }
  return "?";
}

std::uint16_t fold_pc(std::uint64_t pc) {
  std::uint64_t folded = 0;
  while (pc != 0) {
    folded ^= pc & kPcSignatureMask;
    pc >>= kPcSignatureBits;
  }
  return static_cast<std::uint16_t>(folded);
}

Trace::Trace(std::vector<MemoryAccess> records) : records_(std::move(records)) {
  for (const auto& r : records_) {
    validate(r);
    total_instructions_ += r.inst_delta;
  }
}

bool Trace::has_hints() const {
  for (const auto& r : records_)
    if (r.hint_valid) return true;
  return false;
}

std::uint64_t Trace::fingerprint() const {
  // FNV-1a over the on-disk record encoding.
  std::uint64_t h = 1469598103934665603ull;
  auto mix = [&h](std::uint64_t v, int bytes) {
    for (int i = 0; i < bytes; ++i) {
      h ^= (v >> (8 * i)) & 0xff;
      h *= 1099511628211ull;
    }
  };
  mix(records_.size(), 8);
  for (const auto& r : records_) {
    mix(r.address, 8);
    mix(r.pc_signature, 2);
    mix((r.is_write ? 1u : 0u) | (r.hint_valid ? 2u : 0u) | (static_cast<unsigned>(r.reuse_hint) << 2), 1);
    mix(r.inst_delta, 4);
  }
  return h;
}

std::vector<std::uint8_t> encode_trace(const Trace& trace) {
  std::vector<std::uint8_t> out;
  out.reserve(kTraceHeaderBytes + kTraceRecordBytes * trace.size());
  out.insert(out.end(), kMagic.begin(), kMagic.end());
  out.push_back(kTraceVersion);
  put_le(out, 0, 3);
  put_le(out, trace.size(), 8);
  for (const auto& r : trace) {
    put_le(out, r.address, 8);
    put_le(out, r.pc_signature, 2);
    std::uint8_t flags = 0;
    if (r.is_write) flags |= 0x1;
    if (r.hint_valid) flags |= 0x2;
    flags |= static_cast<std::uint8_t>(static_cast<unsigned>(r.reuse_hint) << 2);
    out.push_back(flags);
    out.push_back(0);
    put_le(out, r.inst_delta, 4);
  }
  return out;
}

Trace decode_trace(const std::vector<std::uint8_t>& bytes) {
  if (bytes.size() < 4 || std::memcmp(bytes.data(), kMagic.data(), 4) != 0)
    throw BadMagicError("trace: bad magic (expected \"CTR1\")");
  if (bytes.size() < kTraceHeaderBytes) throw TruncatedTraceError("trace: truncated header");
  if (bytes[4] != kTraceVersion) {
    std::ostringstream msg;
    msg << "trace: unsupported version " << static_cast<int>(bytes[4]);
    throw VersionMismatchError(msg.str());
  }
  const std::uint64_t count = get_le(bytes.data() + 8, 8);
  const std::uint64_t payload = bytes.size() - kTraceHeaderBytes;
  if (payload / kTraceRecordBytes < count) {
    std::ostringstream msg;
    msg << "trace: truncated record stream (header says " << count << " records, file holds "
        << payload / kTraceRecordBytes << ")";
    throw TruncatedTraceError(msg.str());
  }
  if (payload != count * kTraceRecordBytes)
    throw TraceFormatError("trace: trailing bytes after record stream");

  std::vector<MemoryAccess> records;
  records.reserve(count);
  const std::uint8_t* p = bytes.data() + kTraceHeaderBytes;
  for (std::uint64_t i = 0; i < count; ++i, p += kTraceRecordBytes) {
    MemoryAccess a;
    a.address = get_le(p, 8);
    const auto pc = static_cast<std::uint16_t>(get_le(p + 8, 2));
    if (pc > kPcSignatureMask) throw InvalidRecordError("trace: pc_signature has top bits set");
    a.pc_signature = pc;
    const std::uint8_t flags = p[10];
    if (flags & 0xf0) throw InvalidRecordError("trace: reserved flag bits set");
    a.is_write = flags & 0x1;
    a.hint_valid = flags & 0x2;
    a.reuse_hint = static_cast<ReuseHint>((flags >> 2) & 0x3);
    if (!a.hint_valid && a.reuse_hint != ReuseHint::Default)
      throw InvalidRecordError("trace: reuse hint without hint_valid");
    a.inst_delta = static_cast<std::uint32_t>(get_le(p + 12, 4));
    records.push_back(a);
  }
  return Trace(std::move(records));
}

Trace read_trace(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw std::runtime_error("cannot open trace " + path.string());
  std::vector<std::uint8_t> bytes((std::istreambuf_iterator<char>(in)), std::istreambuf_iterator<char>());
  return decode_trace(bytes);
}

void write_trace(const Trace& trace, const std::filesystem::path& path) {
  const auto bytes = encode_trace(trace);
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw std::runtime_error("cannot write trace " + path.string());
  out.write(reinterpret_cast<const char*>(bytes.data()), static_cast<std::streamsize>(bytes.size()));
}

Trace generate_pattern(const PatternSpec& spec, std::uint16_t pc) {
  if (spec.k == 0) throw InvalidSpecError("pattern: k must be >= 1");
  if (spec.n == 0) throw InvalidSpecError("pattern: n must be >= 1");
  if (spec.stride == 0) throw InvalidSpecError("pattern: stride must be >= 1");
  if (pc > kPcSignatureMask) throw InvalidSpecError("pattern: pc exceeds 14 bits");

  auto at = [&](std::uint64_t i) {
    MemoryAccess a;
    a.address = spec.base_address + i * spec.stride;
    a.pc_signature = pc;
    return a;
  };
  std::vector<MemoryAccess> records;
  switch (spec.kind) {
    case PatternKind::RecencyFriendly:
      records.reserve(2 * spec.k * spec.n);
      for (std::uint64_t r = 0; r < spec.n; ++r) {
        for (std::uint64_t i = 0; i < spec.k; ++i) records.push_back(at(i));
        for (std::uint64_t i = spec.k; i-- > 0;) records.push_back(at(i));
      }
      break;
    case PatternKind::Streaming:
      records.reserve(spec.k);
      for (std::uint64_t i = 0; i < spec.k; ++i) records.push_back(at(i));
      break;
    case PatternKind::Thrashing:
      records.reserve(spec.k * spec.n);
      for (std::uint64_t r = 0; r < spec.n; ++r)
        for (std::uint64_t i = 0; i < spec.k; ++i) records.push_back(at(i));
      break;
  }
  return Trace(std::move(records));
}

PatternSpec parse_pattern_spec(const std::string& text) {
  const auto colon = text.find(':');
  const std::string kind = text.substr(0, colon);
  PatternSpec spec;
  if (kind == "recency") spec.kind = PatternKind::RecencyFriendly;
  else if (kind == "stream") spec.kind = PatternKind::Streaming;
  else if (kind == "thrash") spec.kind = PatternKind::Thrashing;
  else throw InvalidSpecError("pattern: unknown kind '" + kind + "'");
  if (colon == std::string::npos) return spec;

  std::istringstream fields(text.substr(colon + 1));
  std::string field;
  while (std::getline(fields, field, ',')) {
    const auto eq = field.find('=');
    if (eq == std::string::npos) throw InvalidSpecError("pattern: expected key=value, got '" + field + "'");
    const std::string key = field.substr(0, eq);
    std::uint64_t value = 0;
    try {
      std::size_t used = 0;
      value = std::stoull(field.substr(eq + 1), &used, 0);
      if (used != field.size() - eq - 1) throw std::invalid_argument(field);
    } catch (const std::exception&) {
      throw InvalidSpecError("pattern: bad value in '" + field + "'");
    }
    if (key == "k") spec.k = value;
    else if (key == "n") spec.n = value;
    else if (key == "base") spec.base_address = value;
    else if (key == "stride") spec.stride = value;
    else throw InvalidSpecError("pattern: unknown key '" + key + "'");
  }
  return spec;
}

}  // namespace cachelab
