#include "refi/interaction.hpp"

#include <array>
#include <utility>

#include "refi/frame.hpp"

namespace refi {
namespace {

constexpr std::array<std::pair<SourceKind, std::string_view>, 8> kSources{{
    {SourceKind::SentFrame, "SentFrame"},
    {SourceKind::ReceivedFrame, "ReceivedFrame"},
    {SourceKind::Monitor, "Monitor"},
    {SourceKind::ScanResult, "ScanResult"},
    {SourceKind::ChannelState, "ChannelState"},
    {SourceKind::TxPower, "TxPower"},
    {SourceKind::IOCTL, "IOCTL"},
    {SourceKind::Timer, "Timer"},
}};

constexpr std::array<std::pair<EffectKind, std::string_view>, 6> kEffects{{
    {EffectKind::SendFrame, "SendFrame"},
    {EffectKind::SwitchChannel, "SwitchChannel"},
    {EffectKind::ChangeCSI, "ChangeCSI"},
    {EffectKind::SetTxPower, "SetTxPower"},
    {EffectKind::SendToOS, "SendToOS"},
    {EffectKind::SetTDLS, "SetTDLS"},
}};

}  // namespace

std::string_view source_kind_name(SourceKind k) {
  for (const auto& [kind, name] : kSources) {
    if (kind == k) return name;
  }
  return "?";
}

std::optional<SourceKind> source_kind_from_name(std::string_view name) {
  for (const auto& [kind, n] : kSources) {
    if (n == name) return kind;
  }
  return std::nullopt;
}

std::string to_string(const SourceSpec& s) {
  std::string out(source_kind_name(s.kind));
  if (s.kind == SourceKind::Timer) out += "(" + std::to_string(s.period_ms) + "ms)";
  return out;
}

TypeTag payload_type(SourceKind k) {
  switch (k) {
    case SourceKind::SentFrame:
    case SourceKind::ReceivedFrame:
    case SourceKind::Monitor:
      return frame::frame_type();
    case SourceKind::ScanResult:
    case SourceKind::ChannelState:
    case SourceKind::IOCTL:
      return TypeTag::bytes(kOpaquePayloadBytes);
    case SourceKind::TxPower:
      return TypeTag::int32();
    case SourceKind::Timer:
      return TypeTag::time_ms();
  }
  return TypeTag::unit();
}

std::string_view effect_name(EffectKind e) {
  for (const auto& [kind, name] : kEffects) {
    if (kind == e) return name;
  }
  return "?";
}

std::optional<EffectKind> effect_from_name(std::string_view name) {
  for (const auto& [kind, n] : kEffects) {
    if (n == name) return kind;
  }
  return std::nullopt;
}

std::optional<TypeTag> effect_input_type(EffectKind e) {
  switch (e) {
    case EffectKind::SendFrame: return frame::frame_type();
    case EffectKind::SwitchChannel: return TypeTag::int32();
    case EffectKind::ChangeCSI: return TypeTag::bytes(kOpaquePayloadBytes);
    case EffectKind::SetTxPower: return TypeTag::int32();
    case EffectKind::SendToOS: return std::nullopt;
    case EffectKind::SetTDLS: return TypeTag::boolean();
  }
  return std::nullopt;
}

}  // namespace refi
