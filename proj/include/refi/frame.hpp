#pragma once

#include <cstdint>
#include <optional>
#include <span>
#include <vector>

#include "refi/types.hpp"
#include "refi/value.hpp"

namespace refi::frame {

// Byte offsets into a captured frame buffer. The first six bytes are the
// capture header written by the monitor hook.
inline constexpr std::size_t kFcOffset = 6;
inline constexpr std::size_t kDurationOffset = 8;
inline constexpr std::size_t kAddr1Offset = 10;
inline constexpr std::size_t kAddr2Offset = 16;
inline constexpr std::size_t kAddr3Offset = 22;
inline constexpr std::size_t kSeqCtlOffset = 28;
inline constexpr std::size_t kMinLength = kSeqCtlOffset + 2;

// Distribution-system direction of a frame (`ds_type`).
inline constexpr std::int32_t kFromAp = 0;
inline constexpr std::int32_t kToAp = 1;
inline constexpr std::int32_t kFromTdls = 2;

// Frame classes exposed to programs as `frame.type`. Management and control
// frames are classified by 802.11 type alone; data frames by direction.
inline constexpr std::int32_t kManagement = 0;
inline constexpr std::int32_t kControl = 1;
inline constexpr std::int32_t kFromApToDst = 2;
inline constexpr std::int32_t kFromSrcToAp = 3;
inline constexpr std::int32_t kFromSrcToDst = 4;
inline constexpr std::int32_t kOther = 5;

struct RxInfo {
  std::int32_t signal = 0;  // dBm
  std::int32_t noise = 0;   // dBm
};

struct Frame {
  std::int32_t version = 0;
  std::int32_t type = kOther;  // frame class, see above
  std::int32_t fc_type = 0;    // raw 802.11 type field
  std::int32_t sub_type = 0;
  bool to_ds = false;
  bool from_ds = false;
  bool more_frags = false;
  bool retry = false;
  bool pwr_mngmt = false;
  bool more_data = false;
  bool protected_ = false;
  bool order = false;
  std::int32_t duration = 0;
  std::int32_t seq_ctl = 0;
  MacAddr src;
  MacAddr dst;
  MacAddr bssid;
  std::int32_t signal = 0;
  std::int32_t noise = 0;
  std::int32_t snr = 0;
  std::int32_t ds_type = kFromTdls;

  friend bool operator==(const Frame&, const Frame&) = default;
};

/// Class code for an (802.11 type, ds_type) combination.
std::int32_t classify(std::int32_t fc_type, std::int32_t ds_type);

/// Decodes any frame with a valid direction. Returns std::nullopt for
/// buffers shorter than kMinLength or with both DS bits set.
std::optional<Frame> decode_frame(std::span<const std::uint8_t> raw, RxInfo rx);

/// Strict variant accepting only plain data frames (type 2, subtype 0).
std::optional<Frame> parse_frame(std::span<const std::uint8_t> raw, RxInfo rx);

/// Inverse of decode_frame on the fields it reads; produces kMinLength bytes
/// with a zeroed capture header. Uses fc_type/sub_type/version/flags and
/// places addresses according to (to_ds, from_ds).
std::vector<std::uint8_t> serialize_frame(const Frame& f);

/// The record type `Frame` as seen by programs.
const TypeTag& frame_type();

Value to_value(const Frame& f);
Frame from_value(const Value& v);

}  // namespace refi::frame
