#pragma once

#include <string>

#include "refi/compiler.hpp"
#include "refi/types.hpp"

namespace refi::codegen {

struct Options {
  /// Shown in the banner comment of the emitted file when non-empty.
  std::string source_name;
};

/// Emits a C translation unit defining init() and update() for the
/// firmware runtime declared in refi_runtime.h.
///
/// update() evaluates the grouped schedule: one guard per group, filter
/// groups nested inside the block of their input when possible, and one
/// deallocate() per transient value placed after its last read.
std::string emit_c(const CompiledProgram& cp, const Options& options = {});

/// C spelling of a value type (`int32_t`, `frame_t`, `pair_int32_mac_t`, ...).
std::string c_type(const TypeTag& t);

}  // namespace refi::codegen
