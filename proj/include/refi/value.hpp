#pragma once

#include <array>
#include <cstdint>
#include <memory>
#include <optional>
#include <string>
#include <string_view>
#include <utility>
#include <variant>
#include <vector>

#include <json.hpp>

#include "refi/types.hpp"

namespace refi {

using Json = nlohmann::ordered_json;

struct MacAddr {
  std::array<std::uint8_t, 6> octets{};

  /// Big-endian packing into the low 48 bits (octet 0 is most significant).
  std::uint64_t to_u64() const;
  static MacAddr from_u64(std::uint64_t v);
  /// Accepts "aa:bb:cc:dd:ee:ff" (case-insensitive hex).
  static std::optional<MacAddr> parse(std::string_view text);

  friend bool operator==(const MacAddr&, const MacAddr&) = default;
  friend auto operator<=>(const MacAddr&, const MacAddr&) = default;
};

std::string to_string(const MacAddr& m);

struct TimeMs {
  std::int32_t ms = 0;
  friend bool operator==(const TimeMs&, const TimeMs&) = default;
};

struct Bytes {
  std::vector<std::uint8_t> data;
  friend bool operator==(const Bytes&, const Bytes&) = default;
};

struct RecordValue;
struct PairValue;
struct SetValue;
struct MapValue;

/// Immutable runtime value. Aggregates are shared and never mutated in
/// place, so copying a Value is cheap and gives value semantics.
class Value {
 public:
  using Storage = std::variant<std::monostate, std::int32_t, bool, TimeMs, MacAddr, Bytes,
                               std::shared_ptr<const RecordValue>, std::shared_ptr<const PairValue>,
                               std::shared_ptr<const SetValue>, std::shared_ptr<const MapValue>>;

  Value() = default;
  explicit Value(Storage s) : storage_(std::move(s)) {}

  static Value unit() { return Value(); }
  static Value int32(std::int32_t v) { return Value(Storage(v)); }
  static Value boolean(bool v) { return Value(Storage(v)); }
  static Value time_ms(std::int32_t ms) { return Value(Storage(TimeMs{ms})); }
  static Value mac(MacAddr m) { return Value(Storage(m)); }
  static Value bytes(std::vector<std::uint8_t> b) { return Value(Storage(Bytes{std::move(b)})); }
  static Value record(std::vector<Value> fields);
  static Value pair(Value fst, Value snd);
  static Value set(SetValue s);
  static Value map(MapValue m);

  bool is_unit() const { return std::holds_alternative<std::monostate>(storage_); }
  bool is_int32() const { return std::holds_alternative<std::int32_t>(storage_); }
  bool is_bool() const { return std::holds_alternative<bool>(storage_); }
  bool is_time() const { return std::holds_alternative<TimeMs>(storage_); }

  /// Int32 or TimeMs viewed as a plain 32-bit integer.
  std::int32_t as_integer() const;
  std::int32_t as_int32() const;
  bool as_bool() const;
  const MacAddr& as_mac() const;
  const Bytes& as_bytes() const;
  const RecordValue& as_record() const;
  const PairValue& as_pair() const;
  const SetValue& as_set() const;
  const MapValue& as_map() const;

  const Storage& storage() const { return storage_; }

  friend bool operator==(const Value& a, const Value& b);

 private:
  Storage storage_;
};

struct RecordValue {
  std::vector<Value> fields;
};

struct PairValue {
  Value fst;
  Value snd;
};

/// Fixed-capacity set; members are kept in insertion order.
struct SetValue {
  int capacity = kDefaultCapacity;
  std::vector<Value> members;

  bool contains(const Value& v) const;
};

/// Fixed-capacity map; entries are kept in first-insertion order.
struct MapValue {
  int capacity = kDefaultCapacity;
  std::vector<std::pair<Value, Value>> entries;

  const Value* find(const Value& key) const;
};

/// Human-readable rendering for diagnostics.
std::string debug_string(const Value& v);

/// Zero value of a type (all-zero scalars, empty collections).
Value zero_value(const TypeTag& t);

/// True when the value's shape matches the type (recursively).
bool conforms(const Value& v, const TypeTag& t);

Json to_json(const Value& v, const TypeTag& t);

/// Throws std::invalid_argument describing the mismatch.
Value from_json(const Json& j, const TypeTag& t);

std::string to_hex(const std::vector<std::uint8_t>& data);
std::optional<std::vector<std::uint8_t>> from_hex(std::string_view text);

}  // namespace refi
