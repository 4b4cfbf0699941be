#include "refi/trace_io.hpp"

#include <istream>
#include <ostream>
#include <sstream>

namespace refi::trace_io {
namespace {

[[noreturn]] void fail(std::size_t line, const std::string& msg) {
  throw interp::TraceError("trace line " + std::to_string(line) + ": " + msg);
}

std::int32_t int_field(const Json& j, const char* key, std::size_t line) {
  auto it = j.find(key);
  if (it == j.end() || !it->is_number_integer()) fail(line, std::string("'") + key + "' must be an integer");
  auto v = it->get<std::int64_t>();
  if (v < INT32_MIN || v > INT32_MAX) fail(line, std::string("'") + key + "' is out of range");
  return static_cast<std::int32_t>(v);
}

Value decode_payload(SourceKind kind, const Json& p, std::size_t line) {
  switch (kind) {
    case SourceKind::Monitor:
    case SourceKind::SentFrame:
    case SourceKind::ReceivedFrame: {
      if (!p.is_object()) fail(line, "frame payloads are objects with raw, signal and noise");
      auto raw_it = p.find("raw");
      if (raw_it == p.end() || !raw_it->is_string()) fail(line, "frame payload needs a hex 'raw' field");
      auto raw = from_hex(raw_it->get<std::string>());
      if (!raw) fail(line, "'raw' is not valid hex");
      frame::RxInfo rx{int_field(p, "signal", line), int_field(p, "noise", line)};
      auto f = frame::decode_frame(*raw, rx);
      if (!f) fail(line, "frame could not be decoded (too short or both DS bits set)");
      return frame::to_value(*f);
    }
    case SourceKind::TxPower:
    case SourceKind::ScanResult:
    case SourceKind::ChannelState:
    case SourceKind::IOCTL:
      try {
        return from_json(p, payload_type(kind));
      } catch (const std::invalid_argument& e) {
        fail(line, e.what());
      }
    case SourceKind::Timer:
      fail(line, "timer firings are generated by the runtime");
  }
  fail(line, "unknown source");
}

}  // namespace

std::vector<TraceRecord> parse_trace(std::istream& in) {
  std::vector<TraceRecord> out;
  std::string text;
  std::size_t line = 0;
  while (std::getline(in, text)) {
    ++line;
    if (text.find_first_not_of(" \t\r") == std::string::npos) continue;
    Json j;
    try {
      j = Json::parse(text);
    } catch (const Json::parse_error& e) {
      fail(line, std::string("invalid JSON: ") + e.what());
    }
    if (!j.is_object()) fail(line, "each line must be a JSON object");
    TraceRecord r;
    r.t_ms = int_field(j, "t_ms", line);
    if (r.t_ms < 0) fail(line, "'t_ms' must not be negative");
    auto fs = j.find("firings");
    if (fs == j.end() || !fs->is_array()) fail(line, "'firings' must be an array");
    for (const auto& f : *fs) {
      if (!f.is_object() || !f.contains("source") || !f["source"].is_string() || !f.contains("payload")) {
        fail(line, "each firing needs 'source' and 'payload'");
      }
      r.firings.push_back({f["source"].get<std::string>(), f["payload"]});
    }
    out.push_back(std::move(r));
  }
  return out;
}

void write_trace(std::ostream& out, const std::vector<TraceRecord>& records) {
  for (const auto& r : records) {
    Json j = Json::object();
    j["t_ms"] = r.t_ms;
    j["firings"] = Json::array();
    for (const auto& f : r.firings) j["firings"].push_back({{"source", f.source}, {"payload", f.payload}});
    out << j.dump() << '\n';
  }
}

interp::Trace decode(const std::vector<TraceRecord>& records) {
  interp::Trace out;
  std::size_t line = 0;
  for (const auto& r : records) {
    ++line;
    interp::EventBatch b;
    b.t_ms = r.t_ms;
    for (const auto& f : r.firings) {
      auto kind = source_kind_from_name(f.source);
      if (!kind) fail(line, "unknown source '" + f.source + "'");
      b.firings.push_back({SourceSpec{*kind, 0}, decode_payload(*kind, f.payload, line)});
    }
    out.push_back(std::move(b));
  }
  return out;
}

interp::Trace read_trace(std::istream& in) { return decode(parse_trace(in)); }

Json frame_payload(const frame::Frame& f) {
  Json j = Json::object();
  j["raw"] = to_hex(frame::serialize_frame(f));
  j["signal"] = f.signal;
  j["noise"] = f.noise;
  return j;
}

void write_effects(std::ostream& out, const interp::EffectLog& log) {
  for (const auto& r : log) out << interp::to_json(r).dump() << '\n';
}

std::string effects_to_string(const interp::EffectLog& log) {
  std::ostringstream out;
  write_effects(out, log);
  return out.str();
}

}  // namespace refi::trace_io
