#pragma once

#include <cstdint>
#include <iosfwd>
#include <string>
#include <vector>

#include "refi/frame.hpp"
#include "refi/interp.hpp"
#include "refi/value.hpp"

namespace refi::trace_io {

/// One firing as it appears in a trace file, before payload decoding.
struct RawFiring {
  std::string source;
  Json payload;
};

/// One line of a trace file:
/// `{"t_ms": N, "firings": [{"source": "Monitor", "payload": {...}}]}`.
struct TraceRecord {
  std::int32_t t_ms = 0;
  std::vector<RawFiring> firings;
};

/// Parses JSON lines; blank lines are skipped. Throws interp::TraceError
/// naming the offending line.
std::vector<TraceRecord> parse_trace(std::istream& in);
void write_trace(std::ostream& out, const std::vector<TraceRecord>& records);

/// Decodes payloads: frame sources take `{"raw": hex, "signal": dBm,
/// "noise": dBm}`, TxPower an integer, opaque sources a hex string.
interp::Trace decode(const std::vector<TraceRecord>& records);
interp::Trace read_trace(std::istream& in);

Json frame_payload(const frame::Frame& f);

void write_effects(std::ostream& out, const interp::EffectLog& log);
std::string effects_to_string(const interp::EffectLog& log);

}  // namespace refi::trace_io
