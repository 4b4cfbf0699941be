#include "refi/sim.hpp"

#include <algorithm>
#include <cmath>
#include <cstdlib>
#include <map>
#include <numeric>
#include <random>
#include <stdexcept>

#include "refi/frame.hpp"

namespace refi::sim {

namespace {

const MacAddr kBroadcast = MacAddr::from_u64(0xFFFFFFFFFFFFULL);
const MacAddr kMonitorBssid = MacAddr::from_u64(0x0200000000AAULL);

MacAddr mac_from_json(const Json& j) {
  if (!j.is_string()) throw std::invalid_argument("MAC addresses are strings");
  auto m = MacAddr::parse(j.get<std::string>());
  if (!m) throw std::invalid_argument("'" + j.get<std::string>() + "' is not a MAC address");
  return *m;
}

std::vector<Breakpoint> envelope_from_json(const Json& j) {
  if (!j.is_array()) throw std::invalid_argument("envelopes are arrays of [t_ms, dB] pairs");
  std::vector<Breakpoint> out;
  for (const auto& p : j) {
    if (!p.is_array() || p.size() != 2 || !p[0].is_number_integer() || !p[1].is_number()) {
      throw std::invalid_argument("envelope breakpoints are [t_ms, dB] pairs");
    }
    out.push_back({p[0].get<std::int32_t>(), p[1].get<double>()});
  }
  for (std::size_t i = 1; i < out.size(); ++i) {
    if (out[i].t_ms <= out[i - 1].t_ms) throw std::invalid_argument("envelope breakpoints must have increasing t_ms");
  }
  return out;
}

Json envelope_to_json(const std::vector<Breakpoint>& env) {
  Json j = Json::array();
  for (const auto& b : env) j.push_back(Json::array({b.t_ms, b.db}));
  return j;
}

template <typename T>
void read(const Json& j, const char* key, T& out) {
  auto it = j.find(key);
  if (it == j.end()) return;
  try {
    out = it->get<T>();
  } catch (const Json::exception&) {
    throw std::invalid_argument(std::string("scenario field '") + key + "' has the wrong type");
  }
}

void validate(const ScenarioParams& p) {
  if (p.duration_ms < 0) throw std::invalid_argument("duration_ms must be non-negative");
  const auto& c = p.counting;
  if (c.window_ms <= 0) throw std::invalid_argument("window_ms must be positive");
  if (c.min_frames_per_window < 0 || c.max_frames_per_window < c.min_frames_per_window) {
    throw std::invalid_argument("frames per window must satisfy 0 <= min <= max");
  }
  if (c.noise_frames_per_window < 0) throw std::invalid_argument("noise_frames_per_window must be non-negative");
  const auto busiest = static_cast<std::int64_t>(c.devices.size()) * c.max_frames_per_window + c.noise_frames_per_window;
  if (busiest > c.window_ms) throw std::invalid_argument("more frames per window than milliseconds in a window");
  for (const auto& s : c.silences) {
    if (s.device < 0 || static_cast<std::size_t>(s.device) >= c.devices.size()) {
      throw std::invalid_argument("silence refers to an unknown device");
    }
  }
  const auto& f = p.filesharing;
  if (f.frame_period_ms < 2 || f.frame_period_ms % 2 != 0) {
    throw std::invalid_argument("frame_period_ms must be an even number >= 2");
  }
  if (f.jitter_db < 0) throw std::invalid_argument("jitter_db must be non-negative");
}

frame::Frame management_frame(const MacAddr& src, std::int32_t signal, std::int32_t noise) {
  frame::Frame f;
  f.fc_type = 0;
  f.sub_type = 4;  // probe request
  f.type = frame::classify(f.fc_type, frame::kFromTdls);
  f.ds_type = frame::kFromTdls;
  f.src = src;
  f.dst = kBroadcast;
  f.bssid = kBroadcast;
  f.signal = signal;
  f.noise = noise;
  f.snr = signal - noise;
  return f;
}

frame::Frame data_frame(std::int32_t ds_type, const MacAddr& src, const MacAddr& dst, const MacAddr& bssid,
                        std::int32_t signal, std::int32_t noise) {
  frame::Frame f;
  f.fc_type = 2;
  f.sub_type = 0;
  f.to_ds = ds_type == frame::kToAp;
  f.from_ds = ds_type == frame::kFromAp;
  f.ds_type = ds_type;
  f.type = frame::classify(f.fc_type, ds_type);
  f.src = src;
  f.dst = dst;
  f.bssid = bssid;
  f.signal = signal;
  f.noise = noise;
  f.snr = signal - noise;
  return f;
}

trace_io::TraceRecord monitor_record(std::int32_t t, const frame::Frame& f) {
  trace_io::TraceRecord r;
  r.t_ms = t;
  r.firings.push_back({"Monitor", trace_io::frame_payload(f)});
  return r;
}

}  // namespace

std::vector<MacAddr> default_devices(int count) {
  std::vector<MacAddr> out;
  for (int i = 0; i < count; ++i) out.push_back(MacAddr::from_u64(0x020000000101ULL + static_cast<std::uint64_t>(i)));
  return out;
}

ScenarioParams default_counting_scenario() {
  ScenarioParams p;
  p.duration_ms = 10000;
  p.counting.devices = default_devices(5);
  p.counting.noise_frames_per_window = 2;
  return p;
}

ScenarioParams default_filesharing_scenario() {
  ScenarioParams p;
  p.duration_ms = 55000;
  auto& f = p.filesharing;
  f.frame_period_ms = 6000;
  f.jitter_db = 1;
  f.direct_snr = {{0, 23}, {8000, 23}, {25000, -2}, {47000, 65}, {55000, 65}};
  f.ap_snr = {{0, 20}, {55000, 20}};
  return p;
}

ScenarioParams scenario_from_json(const Json& j, ScenarioParams base) {
  if (!j.is_object()) throw std::invalid_argument("a scenario is a JSON object");
  read(j, "seed", base.seed);
  read(j, "duration_ms", base.duration_ms);
  if (auto it = j.find("counting"); it != j.end()) {
    if (!it->is_object()) throw std::invalid_argument("'counting' must be an object");
    auto& c = base.counting;
    if (auto d = it->find("devices"); d != it->end()) {
      if (d->is_number_integer()) {
        c.devices = default_devices(d->get<int>());
      } else if (d->is_array()) {
        c.devices.clear();
        for (const auto& m : *d) c.devices.push_back(mac_from_json(m));
      } else {
        throw std::invalid_argument("'devices' is a count or a list of MAC addresses");
      }
    }
    read(*it, "window_ms", c.window_ms);
    read(*it, "min_frames_per_window", c.min_frames_per_window);
    read(*it, "max_frames_per_window", c.max_frames_per_window);
    read(*it, "noise_frames_per_window", c.noise_frames_per_window);
    if (auto s = it->find("silences"); s != it->end()) {
      c.silences.clear();
      for (const auto& e : *s) {
        Silence x;
        read(e, "device", x.device);
        read(e, "from_window", x.from_window);
        read(e, "to_window", x.to_window);
        c.silences.push_back(x);
      }
    }
  }
  if (auto it = j.find("filesharing"); it != j.end()) {
    if (!it->is_object()) throw std::invalid_argument("'filesharing' must be an object");
    auto& f = base.filesharing;
    if (auto m = it->find("receiver"); m != it->end()) f.receiver = mac_from_json(*m);
    if (auto m = it->find("sender"); m != it->end()) f.sender = mac_from_json(*m);
    if (auto m = it->find("access_point"); m != it->end()) f.access_point = mac_from_json(*m);
    read(*it, "frame_period_ms", f.frame_period_ms);
    read(*it, "noise_dbm", f.noise_dbm);
    read(*it, "jitter_db", f.jitter_db);
    if (auto e = it->find("direct_snr"); e != it->end()) f.direct_snr = envelope_from_json(*e);
    if (auto e = it->find("ap_snr"); e != it->end()) f.ap_snr = envelope_from_json(*e);
  }
  validate(base);
  return base;
}

Json to_json(const ScenarioParams& p) {
  Json j = Json::object();
  j["seed"] = p.seed;
  j["duration_ms"] = p.duration_ms;
  Json c = Json::object();
  c["devices"] = Json::array();
  for (const auto& m : p.counting.devices) c["devices"].push_back(to_string(m));
  c["window_ms"] = p.counting.window_ms;
  c["min_frames_per_window"] = p.counting.min_frames_per_window;
  c["max_frames_per_window"] = p.counting.max_frames_per_window;
  c["noise_frames_per_window"] = p.counting.noise_frames_per_window;
  c["silences"] = Json::array();
  for (const auto& s : p.counting.silences) {
    c["silences"].push_back({{"device", s.device}, {"from_window", s.from_window}, {"to_window", s.to_window}});
  }
  j["counting"] = c;
  const auto& f = p.filesharing;
  j["filesharing"] = {
      {"receiver", to_string(f.receiver)},
      {"sender", to_string(f.sender)},
      {"access_point", to_string(f.access_point)},
      {"frame_period_ms", f.frame_period_ms},
      {"noise_dbm", f.noise_dbm},
      {"jitter_db", f.jitter_db},
      {"direct_snr", envelope_to_json(f.direct_snr)},
      {"ap_snr", envelope_to_json(f.ap_snr)},
  };
  return j;
}

void apply_seed_override(ScenarioParams& p) {
  const char* env = std::getenv("REFI_SEED");
  if (!env || !*env) return;
  char* end = nullptr;
  const auto v = std::strtoull(env, &end, 10);
  if (*end != '\0') throw std::invalid_argument(std::string("REFI_SEED is not an unsigned integer: ") + env);
  p.seed = v;
}

double envelope_at(const std::vector<Breakpoint>& env, std::int32_t t_ms) {
  if (env.empty()) return 0;
  if (t_ms <= env.front().t_ms) return env.front().db;
  if (t_ms >= env.back().t_ms) return env.back().db;
  auto hi = std::upper_bound(env.begin(), env.end(), t_ms, [](std::int32_t t, const Breakpoint& b) { return t < b.t_ms; });
  auto lo = hi - 1;
  const double frac = static_cast<double>(t_ms - lo->t_ms) / static_cast<double>(hi->t_ms - lo->t_ms);
  return lo->db + frac * (hi->db - lo->db);
}

std::vector<trace_io::TraceRecord> gen_counting_trace(const ScenarioParams& p) {
  validate(p);
  const auto& c = p.counting;
  std::mt19937_64 rng(p.seed);
  auto uniform = [&rng](int lo, int hi) { return std::uniform_int_distribution<int>(lo, hi)(rng); };

  std::vector<trace_io::TraceRecord> out;
  const int windows = (p.duration_ms + c.window_ms - 1) / c.window_ms;
  std::vector<int> offsets(static_cast<std::size_t>(c.window_ms));
  for (int w = 1; w <= windows; ++w) {
    const std::int32_t start = (w - 1) * c.window_ms;
    const std::int32_t length = std::min(c.window_ms, p.duration_ms - start);
    std::vector<frame::Frame> frames;
    for (std::size_t d = 0; d < c.devices.size(); ++d) {
      const bool silent = std::any_of(c.silences.begin(), c.silences.end(), [&](const Silence& s) {
        return s.device == static_cast<int>(d) && s.from_window <= w && w <= s.to_window;
      });
      if (silent) continue;
      const int n = uniform(c.min_frames_per_window, c.max_frames_per_window);
      for (int i = 0; i < n; ++i) frames.push_back(management_frame(c.devices[d], uniform(-80, -40), -95));
    }
    for (int i = 0; i < c.noise_frames_per_window; ++i) {
      const auto stranger = MacAddr::from_u64(0x02000000FF00ULL + static_cast<std::uint64_t>(uniform(0, 255)));
      frames.push_back(data_frame(frame::kToAp, stranger, kBroadcast, kMonitorBssid, uniform(-85, -50), -95));
    }
    if (static_cast<int>(frames.size()) > length) frames.resize(static_cast<std::size_t>(length));
    // Distinct timestamps: a random sample of offsets within the window.
    std::iota(offsets.begin(), offsets.end(), 0);
    std::shuffle(offsets.begin(), offsets.begin() + length, rng);
    std::vector<std::pair<std::int32_t, frame::Frame>> timed;
    for (std::size_t i = 0; i < frames.size(); ++i) timed.emplace_back(start + offsets[i], frames[i]);
    std::sort(timed.begin(), timed.end(), [](const auto& a, const auto& b) { return a.first < b.first; });
    for (const auto& [t, f] : timed) out.push_back(monitor_record(t, f));
  }
  out.push_back({p.duration_ms, {}});
  return out;
}

std::vector<trace_io::TraceRecord> gen_filesharing_trace(const ScenarioParams& p) {
  validate(p);
  const auto& f = p.filesharing;
  std::mt19937_64 rng(p.seed);
  auto jitter = [&]() { return f.jitter_db ? std::uniform_int_distribution<int>(-f.jitter_db, f.jitter_db)(rng) : 0; };

  std::vector<trace_io::TraceRecord> out;
  const std::int32_t half = f.frame_period_ms / 2;
  for (std::int32_t t = 0, i = 0; t < p.duration_ms; t += half, ++i) {
    const bool direct = i % 2 == 0;
    const auto& env = direct ? f.direct_snr : f.ap_snr;
    const auto snr = static_cast<std::int32_t>(std::lround(envelope_at(env, t))) + jitter();
    const std::int32_t signal = f.noise_dbm + snr;
    frame::Frame fr = direct ? data_frame(frame::kFromTdls, f.sender, f.receiver, f.access_point, signal, f.noise_dbm)
                             : data_frame(frame::kFromAp, f.sender, f.receiver, f.access_point, signal, f.noise_dbm);
    out.push_back(monitor_record(t, fr));
  }
  out.push_back({p.duration_ms, {}});
  return out;
}

}  // namespace refi::sim
