#include "refi/types.hpp"

namespace refi {

TypeTag TypeTag::bytes(int n) {
  TypeTag t = of(TypeKind::Bytes);
  t.length = n;
  return t;
}

TypeTag TypeTag::pair(TypeTag fst, TypeTag snd) {
  TypeTag t = of(TypeKind::Pair);
  t.field_names = {"fst", "snd"};
  t.args = {std::move(fst), std::move(snd)};
  return t;
}

TypeTag TypeTag::set(TypeTag elem, int capacity) {
  TypeTag t = of(TypeKind::FixedSet);
  t.length = capacity;
  t.args = {std::move(elem)};
  return t;
}

TypeTag TypeTag::map(TypeTag key, TypeTag value, int capacity) {
  TypeTag t = of(TypeKind::FixedMap);
  t.length = capacity;
  t.args = {std::move(key), std::move(value)};
  return t;
}

TypeTag TypeTag::record(std::string name, std::vector<std::string> names, std::vector<TypeTag> types) {
  TypeTag t = of(TypeKind::Record);
  t.name = std::move(name);
  t.field_names = std::move(names);
  t.args = std::move(types);
  return t;
}

int TypeTag::field_index(const std::string& field) const {
  if (kind != TypeKind::Record && kind != TypeKind::Pair) return -1;
  for (std::size_t i = 0; i < field_names.size(); ++i) {
    if (field_names[i] == field) return static_cast<int>(i);
  }
  return -1;
}

const TypeTag* TypeTag::field_type(const std::string& field) const {
  int i = field_index(field);
  return i < 0 ? nullptr : &args[static_cast<std::size_t>(i)];
}

std::string to_string(const TypeTag& t) {
  switch (t.kind) {
    case TypeKind::Int32: return "Int32";
    case TypeKind::Bool: return "Bool";
    case TypeKind::TimeMs: return "TimeMs";
    case TypeKind::MacAddr: return "MacAddr";
    case TypeKind::Unit: return "Unit";
    case TypeKind::Bytes: return "Bytes[" + std::to_string(t.length) + "]";
    case TypeKind::Record: return t.name;
    case TypeKind::Pair: return "Pair[" + to_string(t.args[0]) + ", " + to_string(t.args[1]) + "]";
    case TypeKind::FixedSet:
      return "Set[" + to_string(t.args[0]) + ", " + std::to_string(t.length) + "]";
    case TypeKind::FixedMap:
      return "Map[" + to_string(t.args[0]) + ", " + to_string(t.args[1]) + ", " +
             std::to_string(t.length) + "]";
  }
  return "?";
}

std::string to_string(const ReactiveType& t) {
  switch (t.kind) {
    case ReactiveType::Kind::Reactive: return "Reactive[" + to_string(t.inner) + "]";
    case ReactiveType::Kind::Fold: return "Fold[" + to_string(t.inner) + "]";
    case ReactiveType::Kind::Observer: return "Observer";
  }
  return "?";
}

bool is_subtype(const ReactiveType& actual, const ReactiveType& required) {
  using K = ReactiveType::Kind;
  if (required.kind == K::Observer || actual.kind == K::Observer) {
    return required.kind == actual.kind;
  }
  if (actual.inner != required.inner) return false;
  return required.kind == K::Reactive || actual.kind == K::Fold;
}

}  // namespace refi
