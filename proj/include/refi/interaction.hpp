#pragma once

#include <optional>
#include <string>
#include <string_view>

#include "refi/types.hpp"

namespace refi {

/// Event sources offered by the firmware runtime.
enum class SourceKind { SentFrame, ReceivedFrame, Monitor, ScanResult, ChannelState, TxPower, IOCTL, Timer };

/// Side effects an observer may request.
enum class EffectKind { SendFrame, SwitchChannel, ChangeCSI, SetTxPower, SendToOS, SetTDLS };

/// Opaque payloads (scan results, channel state, ioctl buffers) are carried
/// as byte blobs of this length.
inline constexpr int kOpaquePayloadBytes = 64;

struct SourceSpec {
  SourceKind kind = SourceKind::Monitor;
  int period_ms = 0;  // Timer only, always positive

  friend bool operator==(const SourceSpec&, const SourceSpec&) = default;
};

/// "Monitor", "Timer(10ms)", ...
std::string to_string(const SourceSpec& s);
std::string_view source_kind_name(SourceKind k);
std::optional<SourceKind> source_kind_from_name(std::string_view name);

/// Type of the value a source delivers when it fires.
TypeTag payload_type(SourceKind k);

std::string_view effect_name(EffectKind e);
std::optional<EffectKind> effect_from_name(std::string_view name);

/// Required input type of an effect; std::nullopt means any type (SendToOS).
std::optional<TypeTag> effect_input_type(EffectKind e);

}  // namespace refi
