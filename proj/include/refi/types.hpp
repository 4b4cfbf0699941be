#pragma once

#include <string>
#include <vector>

namespace refi {

enum class TypeKind { Int32, Bool, TimeMs, MacAddr, Bytes, Record, Pair, FixedSet, FixedMap, Unit };

inline constexpr int kDefaultCapacity = 256;

/// Fixed-size value type carried by reactives. Reactive types are never
/// nested inside a TypeTag; that is enforced by construction (there is no
/// TypeKind for them).
struct TypeTag {
  TypeKind kind = TypeKind::Unit;
  int length = 0;  // Bytes: byte count; FixedSet/FixedMap: capacity in entries
  std::string name;  // Record only
  std::vector<std::string> field_names;  // Record only
  std::vector<TypeTag> args;  // Record fields, Pair (fst, snd), set element, map (key, value)

  static TypeTag of(TypeKind k) {
    TypeTag t;
    t.kind = k;
    return t;
  }
  static TypeTag int32() { return of(TypeKind::Int32); }
  static TypeTag boolean() { return of(TypeKind::Bool); }
  static TypeTag time_ms() { return of(TypeKind::TimeMs); }
  static TypeTag mac_addr() { return of(TypeKind::MacAddr); }
  static TypeTag unit() { return of(TypeKind::Unit); }
  static TypeTag bytes(int n);
  static TypeTag pair(TypeTag fst, TypeTag snd);
  static TypeTag set(TypeTag elem, int capacity = kDefaultCapacity);
  static TypeTag map(TypeTag key, TypeTag value, int capacity = kDefaultCapacity);
  static TypeTag record(std::string name, std::vector<std::string> names, std::vector<TypeTag> types);

  /// Int32 and TimeMs share integer arithmetic in function bodies.
  bool is_integral() const { return kind == TypeKind::Int32 || kind == TypeKind::TimeMs; }

  /// Index of a record field (or fst/snd of a pair), -1 when absent.
  int field_index(const std::string& field) const;
  const TypeTag* field_type(const std::string& field) const;

  friend bool operator==(const TypeTag&, const TypeTag&) = default;
};

std::string to_string(const TypeTag& t);

struct ReactiveType {
  enum class Kind { Reactive, Fold, Observer };

  Kind kind = Kind::Reactive;
  TypeTag inner;

  static ReactiveType reactive(TypeTag t) { return {Kind::Reactive, std::move(t)}; }
  static ReactiveType fold(TypeTag t) { return {Kind::Fold, std::move(t)}; }
  static ReactiveType observer() { return {Kind::Observer, TypeTag::unit()}; }

  bool is_observer() const { return kind == Kind::Observer; }

  friend bool operator==(const ReactiveType&, const ReactiveType&) = default;
};

std::string to_string(const ReactiveType& t);

/// SUBTYPE: a Fold[A] is usable where Reactive[A] is required, never the
/// reverse. Observers are only compatible with observers.
bool is_subtype(const ReactiveType& actual, const ReactiveType& required);

}  // namespace refi
