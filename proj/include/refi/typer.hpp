#pragma once

#include <cstddef>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "refi/minic.hpp"
#include "refi/surface.hpp"
#include "refi/types.hpp"

namespace refi::typer {

/// A core program with a type for every definition and a checked body for
/// every function it uses.
struct TypedProgram {
  surface::CoreProgram core;
  minic::ConstantTable constants;
  std::vector<ReactiveType> types;                    // parallel to core.defs
  std::vector<std::optional<minic::FnIR>> inits;      // Fold/FoldAll/Change initial values
  std::map<std::string, minic::FnIR> functions;       // keyed by function name

  int index_of(const std::string& def) const;  // -1 when absent
  const ReactiveType& type_of(const std::string& def) const;
  const minic::FnIR& function(const std::string& name) const;
};

/// Applies the typing rules. Errors name the violated rule (`SNAPSHOT: ...`).
/// Function signatures come from `sig` declarations in the program, the
/// signature table, or complete inline annotations, in that order.
TypedProgram typecheck(const surface::CoreProgram& p, const surface::SignatureTable& sigs = {});

/// Byte size of every definition's value (0 for observers).
std::vector<std::size_t> size_check(const TypedProgram& tp);

}  // namespace refi::typer
