#include "refi/frame.hpp"

#include <algorithm>

namespace refi::frame {
namespace {

MacAddr read_mac(std::span<const std::uint8_t> raw, std::size_t offset) {
  MacAddr m;
  std::copy_n(raw.begin() + static_cast<std::ptrdiff_t>(offset), 6, m.octets.begin());
  return m;
}

void write_mac(std::vector<std::uint8_t>& raw, std::size_t offset, const MacAddr& m) {
  std::copy(m.octets.begin(), m.octets.end(), raw.begin() + static_cast<std::ptrdiff_t>(offset));
}

std::int32_t read_le16(std::span<const std::uint8_t> raw, std::size_t offset) {
  return static_cast<std::int32_t>(raw[offset] | (raw[offset + 1] << 8));
}

void write_le16(std::vector<std::uint8_t>& raw, std::size_t offset, std::int32_t v) {
  raw[offset] = static_cast<std::uint8_t>(v & 0xFF);
  raw[offset + 1] = static_cast<std::uint8_t>((v >> 8) & 0xFF);
}

}  // namespace

std::int32_t classify(std::int32_t fc_type, std::int32_t ds_type) {
  switch (fc_type) {
    case 0: return kManagement;
    case 1: return kControl;
    case 2:
      if (ds_type == kFromAp) return kFromApToDst;
      if (ds_type == kToAp) return kFromSrcToAp;
      return kFromSrcToDst;
    default: return kOther;
  }
}

std::optional<Frame> decode_frame(std::span<const std::uint8_t> raw, RxInfo rx) {
  if (raw.size() < kMinLength) return std::nullopt;
  const std::uint8_t fc = raw[kFcOffset];
  const std::uint8_t flags = raw[kFcOffset + 1];

  Frame f;
  f.version = fc & 0x03;
  f.fc_type = (fc & 0x0C) >> 2;
  f.sub_type = (fc & 0xF0) >> 4;
  f.to_ds = flags & 0x01;
  f.from_ds = (flags & 0x02) >> 1;
  f.more_frags = (flags & 0x04) >> 2;
  f.retry = (flags & 0x08) >> 3;
  f.pwr_mngmt = (flags & 0x10) >> 4;
  f.more_data = (flags & 0x20) >> 5;
  f.protected_ = (flags & 0x40) >> 6;
  f.order = (flags & 0x80) >> 7;
  f.duration = read_le16(raw, kDurationOffset);

  const MacAddr a1 = read_mac(raw, kAddr1Offset);
  const MacAddr a2 = read_mac(raw, kAddr2Offset);
  const MacAddr a3 = read_mac(raw, kAddr3Offset);
  if (!f.to_ds && f.from_ds) {
    f.ds_type = kFromAp;
    f.dst = a1;
    f.bssid = a2;
    f.src = a3;
  } else if (f.to_ds && !f.from_ds) {
    f.ds_type = kToAp;
    f.bssid = a1;
    f.src = a2;
    f.dst = a3;
  } else if (!f.to_ds && !f.from_ds) {
    f.ds_type = kFromTdls;
    f.dst = a1;
    f.src = a2;
    f.bssid = a3;
  } else {
    return std::nullopt;
  }

  f.seq_ctl = read_le16(raw, kSeqCtlOffset);
  f.signal = rx.signal;
  f.noise = rx.noise;
  f.snr = rx.signal - rx.noise;
  f.type = classify(f.fc_type, f.ds_type);
  return f;
}

std::optional<Frame> parse_frame(std::span<const std::uint8_t> raw, RxInfo rx) {
  if (raw.size() < kMinLength) return std::nullopt;
  const std::uint8_t fc = raw[kFcOffset];
  if (((fc & 0x0C) >> 2) != 2 || ((fc & 0xF0) >> 4) != 0) return std::nullopt;
  return decode_frame(raw, rx);
}

std::vector<std::uint8_t> serialize_frame(const Frame& f) {
  std::vector<std::uint8_t> raw(kMinLength, 0);
  raw[kFcOffset] = static_cast<std::uint8_t>((f.version & 0x03) | ((f.fc_type & 0x03) << 2) | ((f.sub_type & 0x0F) << 4));
  raw[kFcOffset + 1] = static_cast<std::uint8_t>(f.to_ds | (f.from_ds << 1) | (f.more_frags << 2) | (f.retry << 3) |
                                                 (f.pwr_mngmt << 4) | (f.more_data << 5) | (f.protected_ << 6) |
                                                 (f.order << 7));
  write_le16(raw, kDurationOffset, f.duration);
  if (!f.to_ds && f.from_ds) {
    write_mac(raw, kAddr1Offset, f.dst);
    write_mac(raw, kAddr2Offset, f.bssid);
    write_mac(raw, kAddr3Offset, f.src);
  } else if (f.to_ds && !f.from_ds) {
    write_mac(raw, kAddr1Offset, f.bssid);
    write_mac(raw, kAddr2Offset, f.src);
    write_mac(raw, kAddr3Offset, f.dst);
  } else {
    write_mac(raw, kAddr1Offset, f.dst);
    write_mac(raw, kAddr2Offset, f.src);
    write_mac(raw, kAddr3Offset, f.bssid);
  }
  write_le16(raw, kSeqCtlOffset, f.seq_ctl);
  return raw;
}

const TypeTag& frame_type() {
  static const TypeTag t = [] {
    const TypeTag i = TypeTag::int32();
    const TypeTag b = TypeTag::boolean();
    const TypeTag m = TypeTag::mac_addr();
    return TypeTag::record("Frame",
                           {"version", "type", "fc_type", "sub_type", "to_ds", "from_ds", "more_frags", "retry",
                            "pwr_mngmt", "more_data", "protected", "order", "duration", "seq_ctl", "src", "dst",
                            "bssid", "signal", "noise", "snr", "ds_type"},
                           {i, i, i, i, b, b, b, b, b, b, b, b, i, i, m, m, m, i, i, i, i});
  }();
  return t;
}

Value to_value(const Frame& f) {
  return Value::record({
      Value::int32(f.version),     Value::int32(f.type),        Value::int32(f.fc_type),
      Value::int32(f.sub_type),    Value::boolean(f.to_ds),     Value::boolean(f.from_ds),
      Value::boolean(f.more_frags), Value::boolean(f.retry),    Value::boolean(f.pwr_mngmt),
      Value::boolean(f.more_data), Value::boolean(f.protected_), Value::boolean(f.order),
      Value::int32(f.duration),    Value::int32(f.seq_ctl),     Value::mac(f.src),
      Value::mac(f.dst),           Value::mac(f.bssid),         Value::int32(f.signal),
      Value::int32(f.noise),       Value::int32(f.snr),         Value::int32(f.ds_type),
  });
}

Frame from_value(const Value& v) {
  const auto& r = v.as_record().fields;
  Frame f;
  f.version = r[0].as_int32();
  f.type = r[1].as_int32();
  f.fc_type = r[2].as_int32();
  f.sub_type = r[3].as_int32();
  f.to_ds = r[4].as_bool();
  f.from_ds = r[5].as_bool();
  f.more_frags = r[6].as_bool();
  f.retry = r[7].as_bool();
  f.pwr_mngmt = r[8].as_bool();
  f.more_data = r[9].as_bool();
  f.protected_ = r[10].as_bool();
  f.order = r[11].as_bool();
  f.duration = r[12].as_int32();
  f.seq_ctl = r[13].as_int32();
  f.src = r[14].as_mac();
  f.dst = r[15].as_mac();
  f.bssid = r[16].as_mac();
  f.signal = r[17].as_int32();
  f.noise = r[18].as_int32();
  f.snr = r[19].as_int32();
  f.ds_type = r[20].as_int32();
  return f;
}

}  // namespace refi::frame
