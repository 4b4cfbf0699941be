#pragma once

#include <cstddef>
#include <cstdint>
#include <map>
#include <memory>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

#include "refi/diagnostics.hpp"
#include "refi/types.hpp"
#include "refi/value.hpp"

namespace refi::minic {

/// Byte size of a value of type `t` under the packed size model:
/// collections cost capacity * entry size plus a 4-byte count.
std::size_t size_of(const TypeTag& t);

/// Sentinel returned by hashmap_get for absent keys.
inline constexpr std::int32_t kMapEntryMissing = INT32_MIN;

/// Width of keys produced by compound_key: 6 MAC bytes, a 4-byte
/// little-endian tag, zero padding.
inline constexpr int kCompoundKeyBytes = 15;

/// Raised when evaluation of a function body fails at run time (division by
/// zero, collection overflow).
class EflError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

struct Constant {
  std::string name;
  TypeTag type;
  Value value;
  std::string literal;  // source spelling, used for #define emission
};

/// Named compile-time constants visible inside function bodies.
class ConstantTable {
 public:
  /// Table pre-populated with the frame class codes and MAP_ENTRY_MISSING.
  static ConstantTable with_builtins();

  /// Throws CompileError on redefinition.
  void add(Constant c, Span span = {});
  const Constant* find(const std::string& name) const;
  bool is_builtin(const std::string& name) const;

  /// User-declared constants in declaration order.
  const std::vector<Constant>& user_constants() const { return user_; }

 private:
  std::map<std::string, Constant> all_;
  std::vector<Constant> user_;
};

/// Parses a literal constant value (`42`, `-3`, `true`, `02:00:00:00:00:01`).
/// Throws CompileError when the spelling does not denote a value of `type`.
Value parse_literal(std::string_view text, const TypeTag& type, Span span = {});

struct Signature {
  std::vector<TypeTag> params;
  TypeTag result;

  friend bool operator==(const Signature&, const Signature&) = default;
};

std::string to_string(const Signature& s);

struct Expr;
using ExprPtr = std::shared_ptr<const Expr>;

struct Expr {
  enum class Kind { IntLit, BoolLit, Local, Constant, Field, Call, Unary, Binary, Ternary };

  Kind kind = Kind::IntLit;
  Span span;
  TypeTag type;            // checked type
  std::int32_t int_value = 0;
  bool bool_value = false;
  std::string name;        // local/constant/callee name, field name, or operator spelling
  int slot = -1;           // Local: variable slot; Field: field index
  std::vector<ExprPtr> args;
};

struct Stmt {
  enum class Kind { Decl, Assign, If, Return, Block, Expr };

  Kind kind = Kind::Expr;
  Span span;
  int slot = -1;  // Decl/Assign target
  TypeTag target_type;
  ExprPtr expr;   // initializer, assigned value, condition, returned value
  std::vector<Stmt> then_body;  // If then-branch or Block contents
  std::vector<Stmt> else_body;
  bool has_else = false;
};

/// A checked function body together with its verbatim source.
struct FnIR {
  std::string name;
  std::vector<std::string> param_names;
  Signature signature;
  std::vector<Stmt> body;
  int slot_count = 0;
  bool expression_body = false;  // `{ expr }` form
  std::string raw_body;          // text between the braces, trimmed
  std::vector<std::size_t> sizeof_offsets;  // positions of `sizeof` in raw_body
  Span span;
};

/// Parses and type-checks `body` (the text inside the braces, or a bare
/// expression) against the signature. `origin` is the position of the first
/// character of `body` in the enclosing file.
FnIR parse_fn(std::string name, std::vector<std::string> param_names, Signature signature,
              std::string_view body, const ConstantTable& constants, Span origin = {});

/// Evaluates a checked function. Arguments must conform to the signature.
Value eval_fn(const FnIR& fn, const std::vector<Value>& args, const ConstantTable& constants);

/// Builtin helpers shared by the evaluator and by tests.
Value hashset_add(const Value& set, const Value& elem);
std::int32_t cardinality(const Value& collection);
Value hashmap_put(const Value& map, const Value& key, const Value& value);
std::int32_t hashmap_get(const Value& map, const Value& key);
Value compound_key(const MacAddr& mac, std::int32_t tag);

}  // namespace refi::minic
