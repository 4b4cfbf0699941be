#include "refi/value.hpp"

#include <cstdio>
#include <stdexcept>

#include "refi/diagnostics.hpp"

namespace refi {
namespace {

int hex_digit(char c) {
  if (c >= '0' && c <= '9') return c - '0';
  if (c >= 'a' && c <= 'f') return c - 'a' + 10;
  if (c >= 'A' && c <= 'F') return c - 'A' + 10;
  return -1;
}

template <typename T>
const T& get_or_throw(const Value::Storage& s, const char* what) {
  if (const T* p = std::get_if<T>(&s)) return *p;
  throw InternalError(std::string("value is not ") + what);
}

}  // namespace

std::uint64_t MacAddr::to_u64() const {
  std::uint64_t v = 0;
  for (std::uint8_t o : octets) v = (v << 8) | o;
  return v;
}

MacAddr MacAddr::from_u64(std::uint64_t v) {
  MacAddr m;
  for (int i = 5; i >= 0; --i) {
    m.octets[static_cast<std::size_t>(i)] = static_cast<std::uint8_t>(v & 0xFF);
    v >>= 8;
  }
  return m;
}

std::optional<MacAddr> MacAddr::parse(std::string_view text) {
  if (text.size() != 17) return std::nullopt;
  MacAddr m;
  for (std::size_t i = 0; i < 6; ++i) {
    int hi = hex_digit(text[i * 3]);
    int lo = hex_digit(text[i * 3 + 1]);
    if (hi < 0 || lo < 0) return std::nullopt;
    if (i < 5 && text[i * 3 + 2] != ':') return std::nullopt;
    m.octets[i] = static_cast<std::uint8_t>(hi * 16 + lo);
  }
  return m;
}

std::string to_string(const MacAddr& m) {
  char buf[18];
  std::snprintf(buf, sizeof buf, "%02x:%02x:%02x:%02x:%02x:%02x", m.octets[0], m.octets[1], m.octets[2],
                m.octets[3], m.octets[4], m.octets[5]);
  return buf;
}

Value Value::record(std::vector<Value> fields) {
  return Value(Storage(std::make_shared<const RecordValue>(RecordValue{std::move(fields)})));
}

Value Value::pair(Value fst, Value snd) {
  return Value(Storage(std::make_shared<const PairValue>(PairValue{std::move(fst), std::move(snd)})));
}

Value Value::set(SetValue s) { return Value(Storage(std::make_shared<const SetValue>(std::move(s)))); }

Value Value::map(MapValue m) { return Value(Storage(std::make_shared<const MapValue>(std::move(m)))); }

std::int32_t Value::as_integer() const {
  if (const auto* t = std::get_if<TimeMs>(&storage_)) return t->ms;
  return get_or_throw<std::int32_t>(storage_, "an integer");
}

std::int32_t Value::as_int32() const { return get_or_throw<std::int32_t>(storage_, "Int32"); }
bool Value::as_bool() const { return get_or_throw<bool>(storage_, "Bool"); }
const MacAddr& Value::as_mac() const { return get_or_throw<MacAddr>(storage_, "MacAddr"); }
const Bytes& Value::as_bytes() const { return get_or_throw<Bytes>(storage_, "Bytes"); }

const RecordValue& Value::as_record() const {
  return *get_or_throw<std::shared_ptr<const RecordValue>>(storage_, "a record");
}
const PairValue& Value::as_pair() const {
  return *get_or_throw<std::shared_ptr<const PairValue>>(storage_, "a pair");
}
const SetValue& Value::as_set() const { return *get_or_throw<std::shared_ptr<const SetValue>>(storage_, "a set"); }
const MapValue& Value::as_map() const { return *get_or_throw<std::shared_ptr<const MapValue>>(storage_, "a map"); }

bool operator==(const Value& a, const Value& b) {
  if (a.storage_.index() != b.storage_.index()) return false;
  return std::visit(
      [&](const auto& x) -> bool {
        using T = std::decay_t<decltype(x)>;
        const auto& y = std::get<T>(b.storage_);
        if constexpr (std::is_same_v<T, std::shared_ptr<const RecordValue>>) {
          return x == y || x->fields == y->fields;
        } else if constexpr (std::is_same_v<T, std::shared_ptr<const PairValue>>) {
          return x == y || (x->fst == y->fst && x->snd == y->snd);
        } else if constexpr (std::is_same_v<T, std::shared_ptr<const SetValue>>) {
          return x == y || (x->capacity == y->capacity && x->members == y->members);
        } else if constexpr (std::is_same_v<T, std::shared_ptr<const MapValue>>) {
          return x == y || (x->capacity == y->capacity && x->entries == y->entries);
        } else {
          return x == y;
        }
      },
      a.storage_);
}

bool SetValue::contains(const Value& v) const {
  for (const auto& m : members) {
    if (m == v) return true;
  }
  return false;
}

const Value* MapValue::find(const Value& key) const {
  for (const auto& [k, v] : entries) {
    if (k == key) return &v;
  }
  return nullptr;
}

std::string to_hex(const std::vector<std::uint8_t>& data) {
  static constexpr char kDigits[] = "0123456789abcdef";
  std::string out;
  out.reserve(data.size() * 2);
  for (std::uint8_t b : data) {
    out.push_back(kDigits[b >> 4]);
    out.push_back(kDigits[b & 0xF]);
  }
  return out;
}

std::optional<std::vector<std::uint8_t>> from_hex(std::string_view text) {
  if (text.size() % 2 != 0) return std::nullopt;
  std::vector<std::uint8_t> out;
  out.reserve(text.size() / 2);
  for (std::size_t i = 0; i < text.size(); i += 2) {
    int hi = hex_digit(text[i]);
    int lo = hex_digit(text[i + 1]);
    if (hi < 0 || lo < 0) return std::nullopt;
    out.push_back(static_cast<std::uint8_t>(hi * 16 + lo));
  }
  return out;
}

std::string debug_string(const Value& v) {
  return std::visit(
      [](const auto& x) -> std::string {
        using T = std::decay_t<decltype(x)>;
        if constexpr (std::is_same_v<T, std::monostate>) {
          return "()";
        } else if constexpr (std::is_same_v<T, std::int32_t>) {
          return std::to_string(x);
        } else if constexpr (std::is_same_v<T, bool>) {
          return x ? "true" : "false";
        } else if constexpr (std::is_same_v<T, TimeMs>) {
          return std::to_string(x.ms) + "ms";
        } else if constexpr (std::is_same_v<T, MacAddr>) {
          return to_string(x);
        } else if constexpr (std::is_same_v<T, Bytes>) {
          return "0x" + to_hex(x.data);
        } else if constexpr (std::is_same_v<T, std::shared_ptr<const RecordValue>>) {
          std::string out = "{";
          for (std::size_t i = 0; i < x->fields.size(); ++i) {
            if (i) out += ", ";
            out += debug_string(x->fields[i]);
          }
          return out + "}";
        } else if constexpr (std::is_same_v<T, std::shared_ptr<const PairValue>>) {
          return "(" + debug_string(x->fst) + ", " + debug_string(x->snd) + ")";
        } else if constexpr (std::is_same_v<T, std::shared_ptr<const SetValue>>) {
          std::string out = "set{";
          for (std::size_t i = 0; i < x->members.size(); ++i) {
            if (i) out += ", ";
            out += debug_string(x->members[i]);
          }
          return out + "}";
        } else {
          std::string out = "map{";
          for (std::size_t i = 0; i < x->entries.size(); ++i) {
            if (i) out += ", ";
            out += debug_string(x->entries[i].first) + ": " + debug_string(x->entries[i].second);
          }
          return out + "}";
        }
      },
      v.storage());
}

Value zero_value(const TypeTag& t) {
  switch (t.kind) {
    case TypeKind::Int32: return Value::int32(0);
    case TypeKind::Bool: return Value::boolean(false);
    case TypeKind::TimeMs: return Value::time_ms(0);
    case TypeKind::MacAddr: return Value::mac({});
    case TypeKind::Unit: return Value::unit();
    case TypeKind::Bytes: return Value::bytes(std::vector<std::uint8_t>(static_cast<std::size_t>(t.length)));
    case TypeKind::Record: {
      std::vector<Value> fields;
      for (const auto& f : t.args) fields.push_back(zero_value(f));
      return Value::record(std::move(fields));
    }
    case TypeKind::Pair: return Value::pair(zero_value(t.args[0]), zero_value(t.args[1]));
    case TypeKind::FixedSet: return Value::set(SetValue{t.length, {}});
    case TypeKind::FixedMap: return Value::map(MapValue{t.length, {}});
  }
  return Value::unit();
}

bool conforms(const Value& v, const TypeTag& t) {
  const auto& s = v.storage();
  switch (t.kind) {
    case TypeKind::Int32: return std::holds_alternative<std::int32_t>(s);
    case TypeKind::Bool: return std::holds_alternative<bool>(s);
    case TypeKind::TimeMs: return std::holds_alternative<TimeMs>(s);
    case TypeKind::MacAddr: return std::holds_alternative<MacAddr>(s);
    case TypeKind::Unit: return std::holds_alternative<std::monostate>(s);
    case TypeKind::Bytes: {
      const auto* b = std::get_if<Bytes>(&s);
      return b && b->data.size() == static_cast<std::size_t>(t.length);
    }
    case TypeKind::Record: {
      const auto* r = std::get_if<std::shared_ptr<const RecordValue>>(&s);
      if (!r || (*r)->fields.size() != t.args.size()) return false;
      for (std::size_t i = 0; i < t.args.size(); ++i) {
        if (!conforms((*r)->fields[i], t.args[i])) return false;
      }
      return true;
    }
    case TypeKind::Pair: {
      const auto* p = std::get_if<std::shared_ptr<const PairValue>>(&s);
      return p && conforms((*p)->fst, t.args[0]) && conforms((*p)->snd, t.args[1]);
    }
    case TypeKind::FixedSet: {
      const auto* p = std::get_if<std::shared_ptr<const SetValue>>(&s);
      if (!p || (*p)->capacity != t.length || static_cast<int>((*p)->members.size()) > t.length) return false;
      for (const auto& m : (*p)->members) {
        if (!conforms(m, t.args[0])) return false;
      }
      return true;
    }
    case TypeKind::FixedMap: {
      const auto* p = std::get_if<std::shared_ptr<const MapValue>>(&s);
      if (!p || (*p)->capacity != t.length || static_cast<int>((*p)->entries.size()) > t.length) return false;
      for (const auto& [k, val] : (*p)->entries) {
        if (!conforms(k, t.args[0]) || !conforms(val, t.args[1])) return false;
      }
      return true;
    }
  }
  return false;
}

Json to_json(const Value& v, const TypeTag& t) {
  switch (t.kind) {
    case TypeKind::Int32: return v.as_int32();
    case TypeKind::Bool: return v.as_bool();
    case TypeKind::TimeMs: return v.as_integer();
    case TypeKind::MacAddr: return to_string(v.as_mac());
    case TypeKind::Unit: return nullptr;
    case TypeKind::Bytes: return to_hex(v.as_bytes().data);
    case TypeKind::Record: {
      Json out = Json::object();
      const auto& r = v.as_record();
      for (std::size_t i = 0; i < t.args.size(); ++i) out[t.field_names[i]] = to_json(r.fields[i], t.args[i]);
      return out;
    }
    case TypeKind::Pair: {
      const auto& p = v.as_pair();
      return Json::array({to_json(p.fst, t.args[0]), to_json(p.snd, t.args[1])});
    }
    case TypeKind::FixedSet: {
      Json out = Json::array();
      for (const auto& m : v.as_set().members) out.push_back(to_json(m, t.args[0]));
      return out;
    }
    case TypeKind::FixedMap: {
      Json out = Json::array();
      for (const auto& [k, val] : v.as_map().entries) {
        out.push_back(Json::array({to_json(k, t.args[0]), to_json(val, t.args[1])}));
      }
      return out;
    }
  }
  return nullptr;
}

namespace {

std::int32_t json_int32(const Json& j) {
  if (!j.is_number_integer()) throw std::invalid_argument("expected an integer, got " + j.dump());
  auto v = j.get<std::int64_t>();
  if (v < INT32_MIN || v > INT32_MAX) throw std::invalid_argument("integer out of 32-bit range: " + j.dump());
  return static_cast<std::int32_t>(v);
}

}  // namespace

Value from_json(const Json& j, const TypeTag& t) {
  switch (t.kind) {
    case TypeKind::Int32: return Value::int32(json_int32(j));
    case TypeKind::TimeMs: return Value::time_ms(json_int32(j));
    case TypeKind::Bool:
      if (!j.is_boolean()) throw std::invalid_argument("expected a boolean, got " + j.dump());
      return Value::boolean(j.get<bool>());
    case TypeKind::MacAddr: {
      auto m = j.is_string() ? MacAddr::parse(j.get<std::string>()) : std::nullopt;
      if (!m) throw std::invalid_argument("expected a MAC address string, got " + j.dump());
      return Value::mac(*m);
    }
    case TypeKind::Unit:
      if (!j.is_null()) throw std::invalid_argument("expected null, got " + j.dump());
      return Value::unit();
    case TypeKind::Bytes: {
      auto b = j.is_string() ? from_hex(j.get<std::string>()) : std::nullopt;
      if (!b || b->size() != static_cast<std::size_t>(t.length)) {
        throw std::invalid_argument("expected " + std::to_string(t.length) + " hex-encoded bytes");
      }
      return Value::bytes(std::move(*b));
    }
    case TypeKind::Record: {
      if (!j.is_object()) throw std::invalid_argument("expected an object for " + t.name);
      std::vector<Value> fields;
      for (std::size_t i = 0; i < t.args.size(); ++i) {
        auto it = j.find(t.field_names[i]);
        if (it == j.end()) throw std::invalid_argument("missing field '" + t.field_names[i] + "'");
        fields.push_back(from_json(*it, t.args[i]));
      }
      return Value::record(std::move(fields));
    }
    case TypeKind::Pair:
      if (!j.is_array() || j.size() != 2) throw std::invalid_argument("expected a two-element array");
      return Value::pair(from_json(j[0], t.args[0]), from_json(j[1], t.args[1]));
    case TypeKind::FixedSet: {
      if (!j.is_array() || static_cast<int>(j.size()) > t.length) {
        throw std::invalid_argument("expected an array of at most " + std::to_string(t.length) + " elements");
      }
      SetValue s{t.length, {}};
      for (const auto& e : j) {
        Value m = from_json(e, t.args[0]);
        if (!s.contains(m)) s.members.push_back(std::move(m));
      }
      return Value::set(std::move(s));
    }
    case TypeKind::FixedMap: {
      if (!j.is_array() || static_cast<int>(j.size()) > t.length) {
        throw std::invalid_argument("expected an array of at most " + std::to_string(t.length) + " entries");
      }
      MapValue m{t.length, {}};
      for (const auto& e : j) {
        if (!e.is_array() || e.size() != 2) throw std::invalid_argument("map entries are [key, value] arrays");
        Value k = from_json(e[0], t.args[0]);
        if (m.find(k)) throw std::invalid_argument("duplicate map key " + e[0].dump());
        m.entries.emplace_back(std::move(k), from_json(e[1], t.args[1]));
      }
      return Value::map(std::move(m));
    }
  }
  throw std::invalid_argument("unsupported type");
}

}  // namespace refi
