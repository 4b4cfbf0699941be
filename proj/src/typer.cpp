#include "refi/typer.hpp"

namespace refi::typer {

using surface::CoreDef;
using surface::ReactiveKind;

int TypedProgram::index_of(const std::string& def) const {
  for (std::size_t i = 0; i < core.defs.size(); ++i) {
    if (core.defs[i].name == def) return static_cast<int>(i);
  }
  return -1;
}

const ReactiveType& TypedProgram::type_of(const std::string& def) const {
  int i = index_of(def);
  if (i < 0) throw InternalError("no definition named '" + def + "'");
  return types[static_cast<std::size_t>(i)];
}

const minic::FnIR& TypedProgram::function(const std::string& name) const {
  auto it = functions.find(name);
  if (it == functions.end()) throw InternalError("no checked function named '" + name + "'");
  return it->second;
}

namespace {

class Checker {
 public:
  Checker(const surface::CoreProgram& p, const surface::SignatureTable& sigs) : sigs_(sigs) {
    tp_.core = p;
    tp_.constants = minic::ConstantTable::with_builtins();
    for (const auto& c : sigs.constants) add_constant(c);
    for (const auto& c : p.constants) add_constant(c);
    for (const auto& s : p.signatures) {
      if (inline_sigs_.count(s.name)) throw CompileError(s.span, "duplicate signature for '" + s.name + "'");
      inline_sigs_[s.name] = s.signature;
    }
  }

  TypedProgram run() {
    for (const auto& d : tp_.core.defs) {
      tp_.inits.emplace_back();
      tp_.types.push_back(check(d));
      if (d.annotation) {
        const ReactiveType& actual = tp_.types.back();
        if (!is_subtype(actual, *d.annotation)) {
          throw CompileError(d.span, "SUBTYPE: '" + d.name + "' has type " + to_string(actual) +
                                         ", which is not usable as the declared " + to_string(*d.annotation));
        }
        tp_.types.back() = *d.annotation;
      }
      types_[d.name] = tp_.types.back();
    }
    return std::move(tp_);
  }

 private:
  void add_constant(const surface::ConstDecl& c) {
    tp_.constants.add(minic::Constant{c.name, c.type, minic::parse_literal(c.literal, c.type, c.span), c.literal},
                      c.span);
  }

  const ReactiveType& input(const CoreDef& d, std::size_t i, const char* rule) const {
    const ReactiveType& t = types_.at(d.inputs[i]);
    if (t.is_observer()) {
      throw CompileError(d.span, std::string(rule) + ": '" + d.inputs[i] + "' is an observer and produces no values");
    }
    return t;
  }

  /// Resolves the signature of a function and checks its body once.
  const minic::FnIR& function(const std::string& name, Span use, const char* rule) {
    if (auto it = tp_.functions.find(name); it != tp_.functions.end()) return it->second;
    const surface::CoreFn* fn = tp_.core.find_fn(name);
    if (!fn) throw CompileError(use, std::string(rule) + ": unknown function '" + name + "'");
    const surface::Lambda& l = fn->lambda;

    std::optional<minic::Signature> sig;
    if (auto it = inline_sigs_.find(name); it != inline_sigs_.end()) {
      sig = it->second;
    } else if (auto jt = sigs_.functions.find(name); jt != sigs_.functions.end()) {
      sig = jt->second;
    }
    if (sig) {
      if (sig->params.size() != l.params.size()) {
        throw CompileError(fn->span, std::string(rule) + ": '" + name + "' has " + std::to_string(l.params.size()) +
                                         " parameter(s) but its signature " + minic::to_string(*sig) + " has " +
                                         std::to_string(sig->params.size()));
      }
      for (std::size_t i = 0; i < l.params.size(); ++i) {
        if (l.params[i].type && *l.params[i].type != sig->params[i]) {
          throw CompileError(fn->span, "parameter '" + l.params[i].name + "' of '" + name + "' is annotated " +
                                           to_string(*l.params[i].type) + " but its signature says " +
                                           to_string(sig->params[i]));
        }
      }
      if (l.result && *l.result != sig->result) {
        throw CompileError(fn->span, "result of '" + name + "' is annotated " + to_string(*l.result) +
                                         " but its signature says " + to_string(sig->result));
      }
    } else if (l.fully_annotated()) {
      sig.emplace();
      for (const auto& p : l.params) sig->params.push_back(*p.type);
      sig->result = *l.result;
    } else {
      throw CompileError(fn->span, std::string(rule) + ": unknown signature for function '" + name +
                                       "'; annotate its parameters and result or add it to the signature table");
    }

    std::vector<std::string> names;
    for (const auto& p : l.params) names.push_back(p.name);
    auto fir = minic::parse_fn(name, std::move(names), *sig, l.body, tp_.constants, l.body_span);
    return tp_.functions.emplace(name, std::move(fir)).first->second;
  }

  void check_init(const CoreDef& d, const TypeTag& type, const char* rule) {
    const auto& init = *d.init;
    minic::Signature sig{{}, type};
    try {
      tp_.inits.back() = minic::parse_fn(d.name + "_init", {}, sig, init.text, tp_.constants, init.span);
    } catch (const CompileError& e) {
      throw CompileError(e.span(), std::string(rule) + ": initial value of '" + d.name + "': " + e.message());
    }
  }

  static std::string param_mismatch(const char* rule, const CoreDef& d, std::size_t param, const std::string& input,
                                    const TypeTag& want, const TypeTag& got) {
    return std::string(rule) + ": parameter " + std::to_string(param + 1) + " of '" + d.fns.front() +
           "' expects " + to_string(want) + " but input '" + input + "' carries " + to_string(got);
  }

  ReactiveType check(const CoreDef& d) {
    switch (d.kind) {
      case ReactiveKind::Source: {
        auto k = source_kind_from_name(d.interaction);
        if (!k) {
          throw CompileError(d.span, "SOURCE: '" + d.interaction + "' is an effect, not an event source");
        }
        return ReactiveType::reactive(payload_type(*k));
      }

      case ReactiveKind::Observe: {
        auto k = effect_from_name(d.interaction);
        if (!k) throw CompileError(d.span, "OBSERVE: '" + d.interaction + "' is an event source, not an effect");
        const ReactiveType& in = input(d, 0, "OBSERVE");
        auto want = effect_input_type(*k);
        if (want && *want != in.inner) {
          throw CompileError(d.span, "OBSERVE: " + d.interaction + " expects " + to_string(*want) + " but '" +
                                         d.inputs[0] + "' carries " + to_string(in.inner));
        }
        return ReactiveType::observer();
      }

      case ReactiveKind::Filter: {
        const ReactiveType& in = input(d, 0, "FILTER");
        const auto& fn = function(d.fns[0], d.span, "FILTER");
        if (fn.signature.params.size() != 1) {
          throw CompileError(d.span, "FILTER: predicate '" + d.fns[0] + "' must take exactly one parameter");
        }
        if (fn.signature.params[0] != in.inner) {
          throw CompileError(d.span, param_mismatch("FILTER", d, 0, d.inputs[0], fn.signature.params[0], in.inner));
        }
        if (fn.signature.result.kind != TypeKind::Bool) {
          throw CompileError(d.span, "FILTER: predicate '" + d.fns[0] + "' must return Bool, not " +
                                         to_string(fn.signature.result));
        }
        return ReactiveType::reactive(in.inner);
      }

      case ReactiveKind::Map: {
        const auto& fn = function(d.fns[0], d.span, "MAP");
        if (fn.signature.params.size() != d.inputs.size()) {
          throw CompileError(d.span, "MAP: arity mismatch: '" + d.fns[0] + "' takes " +
                                         std::to_string(fn.signature.params.size()) + " parameter(s) but " +
                                         std::to_string(d.inputs.size()) + " input(s) are given");
        }
        for (std::size_t i = 0; i < d.inputs.size(); ++i) {
          const ReactiveType& in = input(d, i, "MAP");
          if (fn.signature.params[i] != in.inner) {
            throw CompileError(d.span, param_mismatch("MAP", d, i, d.inputs[i], fn.signature.params[i], in.inner));
          }
        }
        return ReactiveType::reactive(fn.signature.result);
      }

      case ReactiveKind::Fold: {
        const auto& fn = function(d.fns[0], d.span, "FOLD");
        if (fn.signature.params.size() != d.inputs.size() + 1) {
          throw CompileError(d.span, "FOLD: arity mismatch: '" + d.fns[0] + "' takes " +
                                         std::to_string(fn.signature.params.size()) +
                                         " parameter(s) but needs the accumulator plus " +
                                         std::to_string(d.inputs.size()) + " input(s)");
        }
        const TypeTag& acc = fn.signature.result;
        if (fn.signature.params[0] != acc) {
          throw CompileError(d.span, "FOLD: accumulator parameter of '" + d.fns[0] + "' has type " +
                                         to_string(fn.signature.params[0]) + " but the function returns " +
                                         to_string(acc));
        }
        for (std::size_t i = 0; i < d.inputs.size(); ++i) {
          const ReactiveType& in = input(d, i, "FOLD");
          if (fn.signature.params[i + 1] != in.inner) {
            throw CompileError(d.span,
                               param_mismatch("FOLD", d, i + 1, d.inputs[i], fn.signature.params[i + 1], in.inner));
          }
        }
        check_init(d, acc, "FOLD");
        return ReactiveType::fold(acc);
      }

      case ReactiveKind::FoldAll: {
        std::optional<TypeTag> acc;
        for (std::size_t i = 0; i < d.inputs.size(); ++i) {
          const auto& fn = function(d.fns[i], d.span, "FOLDALL");
          const ReactiveType& in = input(d, i, "FOLDALL");
          const auto& ps = fn.signature.params;
          if (ps.size() != 2) {
            throw CompileError(d.span, "FOLDALL: arm function '" + d.fns[i] +
                                           "' must take the accumulator and one input");
          }
          if (!acc) acc = fn.signature.result;
          if (fn.signature.result != *acc || ps[0] != *acc) {
            throw CompileError(d.span, "FOLDALL: arm '" + d.fns[i] + "' has signature " +
                                           minic::to_string(fn.signature) + ", expected (" + to_string(*acc) +
                                           ", A) -> " + to_string(*acc));
          }
          if (ps[1] != in.inner) {
            throw CompileError(d.span, "FOLDALL: arm '" + d.fns[i] + "' expects " + to_string(ps[1]) +
                                           " but input '" + d.inputs[i] + "' carries " + to_string(in.inner));
          }
        }
        check_init(d, *acc, "FOLDALL");
        return ReactiveType::fold(*acc);
      }

      case ReactiveKind::Choice: {
        const ReactiveType& l = input(d, 0, "CHOICE");
        const ReactiveType& r = input(d, 1, "CHOICE");
        if (l.inner != r.inner) {
          throw CompileError(d.span, "CHOICE: operands must carry the same type, but '" + d.inputs[0] +
                                         "' carries " + to_string(l.inner) + " and '" + d.inputs[1] + "' carries " +
                                         to_string(r.inner));
        }
        return ReactiveType::reactive(l.inner);
      }

      case ReactiveKind::Snapshot: {
        input(d, 0, "SNAPSHOT");
        const ReactiveType& sampled = input(d, 1, "SNAPSHOT");
        if (sampled.kind != ReactiveType::Kind::Fold) {
          throw CompileError(d.span, "SNAPSHOT: the sampled reactive '" + d.inputs[1] + "' must be a Fold, but has type " +
                                         to_string(sampled));
        }
        return ReactiveType::reactive(sampled.inner);
      }

      case ReactiveKind::Change: {
        const ReactiveType& in = input(d, 0, "CHANGE");
        check_init(d, in.inner, "CHANGE");
        return ReactiveType::fold(TypeTag::pair(in.inner, in.inner));
      }
    }
    throw InternalError("unhandled reactive kind");
  }

  const surface::SignatureTable& sigs_;
  std::map<std::string, minic::Signature> inline_sigs_;
  std::map<std::string, ReactiveType> types_;
  TypedProgram tp_;
};

}  // namespace

TypedProgram typecheck(const surface::CoreProgram& p, const surface::SignatureTable& sigs) {
  return Checker(p, sigs).run();
}

std::vector<std::size_t> size_check(const TypedProgram& tp) {
  std::vector<std::size_t> out;
  out.reserve(tp.types.size());
  for (const auto& t : tp.types) out.push_back(t.is_observer() ? 0 : minic::size_of(t.inner));
  return out;
}

}  // namespace refi::typer
