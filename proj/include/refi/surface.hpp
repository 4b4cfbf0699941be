#pragma once

#include <map>
#include <memory>
#include <optional>
#include <string>
#include <string_view>
#include <variant>
#include <vector>

#include "refi/diagnostics.hpp"
#include "refi/interaction.hpp"
#include "refi/minic.hpp"
#include "refi/types.hpp"

namespace refi::surface {

// ---------------------------------------------------------------------------
// Shared syntax pieces

struct LambdaParam {
  std::string name;
  std::optional<TypeTag> type;
};

/// `x => { ... }`, `(a, b) => { ... }` or `(a: Int32, b: Int32): Int32 => { ... }`.
struct Lambda {
  std::vector<LambdaParam> params;
  std::optional<TypeTag> result;
  std::string body;  // text between the braces
  Span body_span;    // position of the first character after `{`
  Span span;

  /// True when every parameter and the result carry a type.
  bool fully_annotated() const;
};

/// A function argument: either a reference to a `def` or an inline lambda.
struct FnRef {
  std::string name;  // empty for inline lambdas
  std::optional<Lambda> lambda;
  Span span;
};

/// Initial value expression of a fold or change, kept as EFL source text.
struct InitExpr {
  std::string text;
  Span span;
};

struct ConstDecl {
  std::string name;
  TypeTag type;
  std::string literal;
  Span span;
};

struct SigDecl {
  std::string name;
  minic::Signature signature;
  Span span;
};

// ---------------------------------------------------------------------------
// Surface program

struct SExpr;
using SExprPtr = std::shared_ptr<const SExpr>;

struct FoldArm {
  SExprPtr input;
  FnRef fn;
};

/// Reactive expression as written, before flattening.
struct SExpr {
  enum class Kind { Ref, Source, Tuple, Map, Filter, Fold, FoldAll, Choice, Snapshot, Change, Observe };

  Kind kind = Kind::Ref;
  Span span;
  std::string name;            // Ref
  std::string interaction;     // Source/Observe: interaction name as written
  SourceSpec source;           // Source, when `interaction` names a source
  EffectKind effect = EffectKind::SendToOS;  // Observe
  std::vector<SExprPtr> operands;  // receiver (possibly a Tuple), choice operands, snapshot (trigger, sampled)
  std::optional<FnRef> fn;     // Map, Filter, Fold
  std::optional<InitExpr> init;  // Fold, FoldAll, Change
  std::vector<FoldArm> arms;   // FoldAll
};

struct FnDef {
  std::string name;
  Lambda lambda;
  Span span;
};

struct ValDef {
  std::string name;
  std::optional<ReactiveType> annotation;
  SExprPtr expr;
  Span span;
};

struct ExprStmt {
  SExprPtr expr;
  Span span;
};

using Statement = std::variant<ConstDecl, SigDecl, FnDef, ValDef, ExprStmt>;

struct SurfaceProgram {
  std::vector<Statement> statements;
};

/// Parses a `.rfi` source. Checks single binding and def-before-use of
/// reactive and function names.
SurfaceProgram parse_program(std::string_view text);

/// Parses a standalone type such as `Fold[Set[MacAddr, 8]]` or `Pair[Int32, Bool]`.
ReactiveType parse_reactive_type(std::string_view text);
TypeTag parse_type(std::string_view text);

// ---------------------------------------------------------------------------
// Core (single-assignment) program

enum class ReactiveKind { Source, Map, Filter, Fold, FoldAll, Choice, Snapshot, Change, Observe };

std::string_view kind_name(ReactiveKind k);

/// A named function: a user `def` or a lambda lifted out of a reactive.
struct CoreFn {
  std::string name;
  Lambda lambda;
  bool lifted = false;
  Span span;
};

/// One reactive definition in single-assignment form.
struct CoreDef {
  std::string name;
  ReactiveKind kind = ReactiveKind::Source;
  std::optional<ReactiveType> annotation;
  /// Source/Observe: interaction name as written. The typer checks that it
  /// names a source (resp. an effect); `source`/`effect` are valid only then.
  std::string interaction;
  SourceSpec source;
  EffectKind effect = EffectKind::SendToOS;
  /// Map/Fold: tuple inputs; Filter/Change/Observe: one input;
  /// Choice: (left, right); Snapshot: (trigger, sampled); FoldAll: arm inputs.
  std::vector<std::string> inputs;
  std::vector<std::string> fns;  // Map/Filter/Fold: one; FoldAll: one per arm
  std::optional<InitExpr> init;
  Span span;
};

struct CoreProgram {
  std::vector<ConstDecl> constants;
  std::vector<SigDecl> signatures;
  std::vector<CoreFn> functions;
  std::vector<CoreDef> defs;

  const CoreDef* find_def(const std::string& name) const;
  const CoreFn* find_fn(const std::string& name) const;
};

/// Flattens chains into fresh-named definitions (`_g<N>`), lifts inline
/// lambdas into named functions (`<node>_fn`, `<node>_arm<i>`).
CoreProgram desugar(const SurfaceProgram& p);

/// Renders a core program as surface text that parses and desugars back to
/// the same core program.
std::string print_core(const CoreProgram& p);

/// Equality ignoring source spans.
bool same_structure(const CoreProgram& a, const CoreProgram& b);

// ---------------------------------------------------------------------------
// Signature files

/// Function signatures and constants supplied next to a program.
struct SignatureTable {
  std::map<std::string, minic::Signature> functions;
  std::vector<ConstDecl> constants;
};

/// Lines of the form `name : (T1, T2) -> T` or `name = literal : T`;
/// `//` comments and blank lines are ignored.
SignatureTable parse_signature_table(std::string_view text);

}  // namespace refi::surface
