#pragma once

// Helpers shared by the test binaries: corpus access, independent oracles,
// a random well-typed program generator and checks on emitted C.

#include <cstdint>
#include <map>
#include <optional>
#include <random>
#include <set>
#include <string>
#include <vector>

#include "refi/compiler.hpp"
#include "refi/interp.hpp"
#include "refi/trace_io.hpp"

namespace refi::testing {

// ---------------------------------------------------------------------------
// Corpus

std::string corpus_path(const std::string& name);
std::string read_file(const std::string& path);

/// Compiles corpus/<stem>.rfi with corpus/<stem>.sig when present.
CompiledProgram load_corpus_program(const std::string& stem);
surface::SignatureTable load_corpus_sigs(const std::string& stem);

/// Corpus scenario configs (corpus/scenarios/*.json) with their kind.
struct CorpusScenario {
  std::string name;
  std::string kind;  // "counting" or "filesharing"
  std::string path;
};
std::vector<CorpusScenario> corpus_scenarios();

/// Trace of a corpus scenario, generated with the simulator.
std::vector<trace_io::TraceRecord> corpus_trace(const CorpusScenario& s);

// ---------------------------------------------------------------------------
// Independent oracles. These read trace records directly (raw frame bytes)
// and never go through the interpreter.

/// Source address (ADDR2 bytes 16..21) and frame-control byte of a Monitor
/// payload.
struct RawFrameView {
  std::uint8_t fc0 = 0;
  std::uint8_t fc1 = 0;
  std::uint64_t addr1 = 0;
  std::uint64_t addr2 = 0;
  std::uint64_t addr3 = 0;
  std::int32_t signal = 0;
  std::int32_t noise = 0;
};
RawFrameView view_frame(const Json& payload);

/// Number of distinct management-frame transmitters per window
/// [(k-1)*window, k*window), for every window k with k*window <= horizon.
std::vector<int> distinct_senders_per_window(const std::vector<trace_io::TraceRecord>& trace, int window_ms);

/// Channel sequence from the hop recurrence c' = (c % 20) + 1 starting at 0,
/// one value per 10 ms tick up to the horizon.
std::vector<int> channel_hops(int horizon_ms, int tick_ms);

/// Replays the incremental per-key SNR averages (truncating division by the
/// running count of frames to `receiver`) and returns the decision after
/// every frame to the receiver: true when the direct average beats the
/// relayed one.
struct Decision {
  std::int32_t t_ms = 0;
  bool direct_better = false;
};
std::vector<Decision> tdls_decisions(const std::vector<trace_io::TraceRecord>& trace, std::uint64_t receiver);

/// Largest number of bytes held at any executed schedule position over a
/// trace: persistent state plus every transient value whose storage is
/// reserved at that position (from its producer up to its last reader).
/// Liveness is recomputed here from the graph edges, and positions are
/// counted only when the node at that position actually triggers.
std::size_t instrumented_peak_bytes(const CompiledProgram& cp, const interp::Trace& trace);

/// Frame header test vectors: every 802.11 type and DS-bit combination with
/// four subtype/flag patterns each (64 in total), random bytes elsewhere.
struct HeaderVector {
  std::uint8_t fc0 = 0;
  std::uint8_t fc1 = 0;
  std::vector<std::uint8_t> raw;
};
std::vector<HeaderVector> header_vectors();

/// Recomputes every decoded field from the raw bytes with shifts and masks
/// and compares against decode_frame/parse_frame. One message per mismatch.
std::vector<std::string> header_vector_mismatches(const std::vector<HeaderVector>& vectors);

// ---------------------------------------------------------------------------
// Random programs

struct RandomProgram {
  std::string source;
  interp::Trace trace;
};

struct RandomProgramOptions {
  int max_reactives = 20;
  int max_batches = 100;
};

/// A well-typed program with full inline annotations (no signature table)
/// using every reactive kind, and a random trace for it. Function bodies are
/// total: they never divide by a non-constant or overflow a collection.
RandomProgram random_program(std::uint64_t seed, const RandomProgramOptions& options = {});

// ---------------------------------------------------------------------------
// Emitted C

/// Runs the C compiler in syntax-only mode with -Wall -Wextra -Werror.
/// Returns std::nullopt on success, otherwise the compiler output. Throws
/// when no compiler is configured.
std::optional<std::string> c_syntax_errors(const std::string& c_source);
bool have_c_compiler();

/// Checks deallocation placement in the update() function of emitted C:
/// every transient `<x>_value` gets exactly one deallocate, no read follows
/// it, and nothing but braces, guards, other deallocates and further
/// assignments of the same consumer separate it from the last mention.
/// Returns the violations found.
std::vector<std::string> deallocation_violations(const std::string& c_source, const CompiledProgram& cp);

/// Number of group guards in update(): every `if` except the inner checks
/// of choices and fold-all arms.
int group_guard_count(const std::string& c_source, const CompiledProgram& cp);

/// Path of the refi executable.
std::string cli_path();

}  // namespace refi::testing
