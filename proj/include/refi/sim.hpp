#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "refi/trace_io.hpp"
#include "refi/value.hpp"

namespace refi::sim {

/// Piecewise-linear SNR envelope point.
struct Breakpoint {
  std::int32_t t_ms = 0;
  double db = 0;
};

/// A device that sends nothing in windows [from_window, to_window].
/// Window k (k >= 1) covers [(k-1)*window_ms, k*window_ms).
struct Silence {
  int device = 0;
  int from_window = 0;
  int to_window = 0;
};

struct CountingParams {
  std::vector<MacAddr> devices;
  std::int32_t window_ms = 200;
  int min_frames_per_window = 1;
  int max_frames_per_window = 3;
  std::vector<Silence> silences;
  /// Data frames from unrelated addresses; the counting program filters
  /// them out.
  int noise_frames_per_window = 0;
};

struct FileSharingParams {
  MacAddr receiver = MacAddr::from_u64(0x020000000001ULL);
  MacAddr sender = MacAddr::from_u64(0x020000000002ULL);
  MacAddr access_point = MacAddr::from_u64(0x0200000000FEULL);
  /// A direct frame and a relayed frame are sent once per period, half a
  /// period apart.
  std::int32_t frame_period_ms = 100;
  std::int32_t noise_dbm = -90;
  int jitter_db = 0;
  std::vector<Breakpoint> direct_snr;
  std::vector<Breakpoint> ap_snr;
};

struct ScenarioParams {
  std::uint64_t seed = 1;
  std::int32_t duration_ms = 10000;
  CountingParams counting;
  FileSharingParams filesharing;
};

/// `count` locally administered addresses 02:00:00:00:01:01, ...
std::vector<MacAddr> default_devices(int count);

/// Five devices, 10 s.
ScenarioParams default_counting_scenario();

/// 55 s walk: direct-path SNR high at both ends and lowest around 25 s,
/// relayed-path SNR flat.
ScenarioParams default_filesharing_scenario();

/// Reads a scenario; absent fields keep the defaults of `base`. `devices`
/// may be a count or a list of MAC strings. Throws std::invalid_argument.
ScenarioParams scenario_from_json(const Json& j, ScenarioParams base = {});
Json to_json(const ScenarioParams& p);

/// Replaces the seed with the REFI_SEED environment variable when set.
void apply_seed_override(ScenarioParams& p);

/// Linear interpolation between breakpoints, constant beyond the ends.
double envelope_at(const std::vector<Breakpoint>& env, std::int32_t t_ms);

/// Monitor firings with management frames from every non-silent device
/// (between min and max per window, at distinct millisecond timestamps),
/// followed by a horizon marker at duration_ms.
std::vector<trace_io::TraceRecord> gen_counting_trace(const ScenarioParams& p);

/// Monitor firings alternating direct (FROM_TDLS) and relayed (FROM_AP)
/// data frames addressed to the receiver, with SNR sampled from the
/// envelopes, followed by a horizon marker at duration_ms.
std::vector<trace_io::TraceRecord> gen_filesharing_trace(const ScenarioParams& p);

}  // namespace refi::sim
