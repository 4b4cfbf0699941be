#include "refi/minic.hpp"

#include <cctype>
#include <charconv>
#include <limits>
#include <optional>
#include <set>

#include "refi/frame.hpp"

namespace refi::minic {

std::size_t size_of(const TypeTag& t) {
  switch (t.kind) {
    case TypeKind::Int32:
    case TypeKind::TimeMs: return 4;
    case TypeKind::Bool: return 1;
    case TypeKind::MacAddr: return 6;
    case TypeKind::Unit: return 0;
    case TypeKind::Bytes: return static_cast<std::size_t>(t.length);
    case TypeKind::Record: {
      std::size_t n = 0;
      for (const auto& f : t.args) n += size_of(f);
      return n;
    }
    case TypeKind::Pair: return size_of(t.args[0]) + size_of(t.args[1]);
    case TypeKind::FixedSet: return static_cast<std::size_t>(t.length) * size_of(t.args[0]) + 4;
    case TypeKind::FixedMap:
      return static_cast<std::size_t>(t.length) * (size_of(t.args[0]) + size_of(t.args[1])) + 4;
  }
  throw InternalError("unsizable type");
}

// ---------------------------------------------------------------------------
// Constants

ConstantTable ConstantTable::with_builtins() {
  ConstantTable t;
  auto add_int = [&t](const char* name, std::int32_t v, std::string literal) {
    t.all_[name] = Constant{name, TypeTag::int32(), Value::int32(v), std::move(literal)};
  };
  add_int("MANAGEMENT", frame::kManagement, "0");
  add_int("CONTROL", frame::kControl, "1");
  add_int("FROM_AP_TP_DST", frame::kFromApToDst, "2");
  add_int("FROM_SRC_TO_AP", frame::kFromSrcToAp, "3");
  add_int("FROM_SRC_TO_DST", frame::kFromSrcToDst, "4");
  add_int("OTHER_FRAME", frame::kOther, "5");
  add_int("MAP_ENTRY_MISSING", kMapEntryMissing, "(-2147483647 - 1)");
  return t;
}

void ConstantTable::add(Constant c, Span span) {
  if (all_.count(c.name)) throw CompileError(span, "constant '" + c.name + "' is already defined");
  all_[c.name] = c;
  user_.push_back(std::move(c));
}

const Constant* ConstantTable::find(const std::string& name) const {
  auto it = all_.find(name);
  return it == all_.end() ? nullptr : &it->second;
}

bool ConstantTable::is_builtin(const std::string& name) const {
  if (!all_.count(name)) return false;
  for (const auto& c : user_) {
    if (c.name == name) return false;
  }
  return true;
}

namespace {

std::optional<std::int64_t> parse_integer(std::string_view text) {
  bool negative = false;
  if (!text.empty() && text.front() == '-') {
    negative = true;
    text.remove_prefix(1);
  }
  int base = 10;
  if (text.size() > 2 && text[0] == '0' && (text[1] == 'x' || text[1] == 'X')) {
    base = 16;
    text.remove_prefix(2);
  }
  if (text.empty()) return std::nullopt;
  std::uint64_t v = 0;
  auto [ptr, ec] = std::from_chars(text.data(), text.data() + text.size(), v, base);
  if (ec != std::errc() || ptr != text.data() + text.size()) return std::nullopt;
  if (v > static_cast<std::uint64_t>(std::numeric_limits<std::int32_t>::max()) + (negative ? 1 : 0)) {
    return std::nullopt;
  }
  std::int64_t s = static_cast<std::int64_t>(v);
  return negative ? -s : s;
}

}  // namespace

Value parse_literal(std::string_view text, const TypeTag& type, Span span) {
  const std::string shown(text);
  switch (type.kind) {
    case TypeKind::Int32:
    case TypeKind::TimeMs: {
      auto v = parse_integer(text);
      if (!v) throw CompileError(span, "'" + shown + "' is not a 32-bit integer literal");
      auto i = static_cast<std::int32_t>(*v);
      return type.kind == TypeKind::Int32 ? Value::int32(i) : Value::time_ms(i);
    }
    case TypeKind::Bool:
      if (text == "true") return Value::boolean(true);
      if (text == "false") return Value::boolean(false);
      throw CompileError(span, "'" + shown + "' is not a Bool literal");
    case TypeKind::MacAddr: {
      auto m = MacAddr::parse(text);
      if (!m) throw CompileError(span, "'" + shown + "' is not a MAC address literal");
      return Value::mac(*m);
    }
    default:
      throw CompileError(span, "constants of type " + to_string(type) + " are not supported");
  }
}

std::string to_string(const Signature& s) {
  std::string out = "(";
  for (std::size_t i = 0; i < s.params.size(); ++i) {
    if (i) out += ", ";
    out += to_string(s.params[i]);
  }
  return out + ") -> " + to_string(s.result);
}

// ---------------------------------------------------------------------------
// Builtins

Value hashset_add(const Value& set, const Value& elem) {
  const SetValue& s = set.as_set();
  if (s.contains(elem)) return set;
  if (static_cast<int>(s.members.size()) >= s.capacity) {
    throw EflError("hashset_add: capacity of " + std::to_string(s.capacity) + " entries exceeded");
  }
  SetValue next = s;
  next.members.push_back(elem);
  return Value::set(std::move(next));
}

std::int32_t cardinality(const Value& collection) {
  if (const auto* s = std::get_if<std::shared_ptr<const SetValue>>(&collection.storage())) {
    return static_cast<std::int32_t>((*s)->members.size());
  }
  return static_cast<std::int32_t>(collection.as_map().entries.size());
}

Value hashmap_put(const Value& map, const Value& key, const Value& value) {
  const MapValue& m = map.as_map();
  MapValue next = m;
  for (auto& [k, v] : next.entries) {
    if (k == key) {
      v = value;
      return Value::map(std::move(next));
    }
  }
  if (static_cast<int>(m.entries.size()) >= m.capacity) {
    throw EflError("hashmap_put: capacity of " + std::to_string(m.capacity) + " entries exceeded");
  }
  next.entries.emplace_back(key, value);
  return Value::map(std::move(next));
}

std::int32_t hashmap_get(const Value& map, const Value& key) {
  const Value* v = map.as_map().find(key);
  return v ? v->as_integer() : kMapEntryMissing;
}

Value compound_key(const MacAddr& mac, std::int32_t tag) {
  std::vector<std::uint8_t> key(kCompoundKeyBytes, 0);
  for (std::size_t i = 0; i < 6; ++i) key[i] = mac.octets[i];
  auto u = static_cast<std::uint32_t>(tag);
  for (std::size_t i = 0; i < 4; ++i) key[6 + i] = static_cast<std::uint8_t>((u >> (8 * i)) & 0xFF);
  return Value::bytes(std::move(key));
}

namespace {

// ---------------------------------------------------------------------------
// Lexer

struct Tok {
  enum class Kind { Int, Ident, Punct, End };
  Kind kind = Kind::End;
  std::string text;
  std::int64_t value = 0;
  Span span;
  std::size_t offset = 0;
};

bool is_ident_start(char c) { return std::isalpha(static_cast<unsigned char>(c)) || c == '_'; }
bool is_ident_char(char c) { return std::isalnum(static_cast<unsigned char>(c)) || c == '_'; }

std::vector<Tok> lex(std::string_view src, Span origin) {
  std::vector<Tok> out;
  int line = origin.line == 0 ? 1 : origin.line;
  int col = origin.column == 0 ? 1 : origin.column;
  std::size_t i = 0;
  auto advance = [&](std::size_t n) {
    for (std::size_t k = 0; k < n && i < src.size(); ++k, ++i) {
      if (src[i] == '\n') {
        ++line;
        col = 1;
      } else {
        ++col;
      }
    }
  };
  while (i < src.size()) {
    char c = src[i];
    if (std::isspace(static_cast<unsigned char>(c))) {
      advance(1);
      continue;
    }
    if (src.substr(i, 2) == "//") {
      while (i < src.size() && src[i] != '\n') advance(1);
      continue;
    }
    if (src.substr(i, 2) == "/*") {
      Span start{line, col};
      auto end = src.find("*/", i + 2);
      if (end == std::string_view::npos) throw CompileError(start, "unterminated comment");
      advance(end + 2 - i);
      continue;
    }
    Tok t;
    t.span = {line, col};
    t.offset = i;
    if (std::isdigit(static_cast<unsigned char>(c))) {
      std::size_t j = i;
      if (src.substr(i, 2) == "0x" || src.substr(i, 2) == "0X") {
        j += 2;
        while (j < src.size() && std::isxdigit(static_cast<unsigned char>(src[j]))) ++j;
      } else {
        while (j < src.size() && std::isdigit(static_cast<unsigned char>(src[j]))) ++j;
      }
      if (j < src.size() && is_ident_char(src[j])) {
        throw CompileError(t.span, "malformed number '" + std::string(src.substr(i, j + 1 - i)) + "'");
      }
      t.kind = Tok::Kind::Int;
      t.text = std::string(src.substr(i, j - i));
      auto v = parse_integer(t.text);
      if (!v) throw CompileError(t.span, "integer literal '" + t.text + "' does not fit in 32 bits");
      t.value = *v;
      advance(j - i);
    } else if (is_ident_start(c)) {
      std::size_t j = i;
      while (j < src.size() && is_ident_char(src[j])) ++j;
      t.kind = Tok::Kind::Ident;
      t.text = std::string(src.substr(i, j - i));
      advance(j - i);
    } else {
      static constexpr std::string_view kTwo[] = {"&&", "||", "==", "!=", "<=", ">="};
      static constexpr std::string_view kOne = "+-*/%<>!~&|^?:(),.;={}";
      t.kind = Tok::Kind::Punct;
      for (auto op : kTwo) {
        if (src.substr(i, 2) == op) t.text = std::string(op);
      }
      if (t.text.empty()) {
        if (kOne.find(c) == std::string_view::npos) {
          throw CompileError(t.span, std::string("unexpected character '") + c + "' in function body");
        }
        t.text = std::string(1, c);
      }
      advance(t.text.size());
    }
    out.push_back(std::move(t));
  }
  Tok end;
  end.kind = Tok::Kind::End;
  end.span = {line, col};
  end.offset = src.size();
  out.push_back(end);
  return out;
}

// ---------------------------------------------------------------------------
// Parser and checker

bool assignable(const TypeTag& from, const TypeTag& to) {
  return from == to || (from.is_integral() && to.is_integral());
}

bool is_c_keyword(const std::string& s) {
  static const std::set<std::string> words{
      "auto",   "break",  "case",    "char",   "const",    "continue", "default",  "do",
      "double", "else",   "enum",    "extern", "float",    "for",      "goto",     "if",
      "inline", "int",    "long",    "register", "restrict", "return", "short",    "signed",
      "sizeof", "static", "struct",  "switch", "typedef",  "union",    "unsigned", "void",
      "volatile", "while", "bool",   "true",   "false",    "_Bool",    "_Generic", "_Static_assert",
  };
  return words.count(s) > 0;
}

bool is_type_keyword(const std::string& s) { return s == "int" || s == "int32_t" || s == "bool"; }

bool is_keyword(const std::string& s) {
  return is_type_keyword(s) || s == "if" || s == "else" || s == "return" || s == "true" || s == "false";
}

int precedence(const std::string& op) {
  if (op == "||") return 1;
  if (op == "&&") return 2;
  if (op == "|") return 3;
  if (op == "^") return 4;
  if (op == "&") return 5;
  if (op == "==" || op == "!=") return 6;
  if (op == "<" || op == "<=" || op == ">" || op == ">=") return 7;
  if (op == "+" || op == "-") return 8;
  if (op == "*" || op == "/" || op == "%") return 9;
  return 0;
}

class Parser {
 public:
  Parser(std::vector<Tok> toks, const ConstantTable& constants) : toks_(std::move(toks)), constants_(constants) {}

  void declare_params(const std::vector<std::string>& names, const std::vector<TypeTag>& types, Span span) {
    scopes_.emplace_back();
    for (std::size_t i = 0; i < names.size(); ++i) declare(names[i], types[i], span);
  }

  int slot_count() const { return static_cast<int>(slot_types_.size()); }

  bool statement_form() const {
    if (toks_.front().kind == Tok::Kind::Ident && is_keyword(toks_.front().text) && toks_.front().text != "true" &&
        toks_.front().text != "false") {
      return true;
    }
    if (toks_.front().kind == Tok::Kind::Punct && toks_.front().text == "{") return true;
    for (const auto& t : toks_) {
      if (t.kind == Tok::Kind::Punct && t.text == ";") return true;
    }
    return false;
  }

  std::vector<Stmt> expression_body(const TypeTag& result) {
    Stmt ret;
    ret.kind = Stmt::Kind::Return;
    ret.span = peek().span;
    ret.target_type = result;
    ret.expr = expression(&result);
    expect_end();
    require_assignable(ret.expr, result, "returned value");
    return {ret};
  }

  std::vector<Stmt> statement_body(const TypeTag& result) {
    result_ = result;
    std::vector<Stmt> body;
    while (peek().kind != Tok::Kind::End) body.push_back(statement());
    if (!definitely_returns(body)) {
      throw CompileError(toks_.back().span, "function body may finish without returning a " + to_string(result));
    }
    return body;
  }

  std::vector<std::size_t> sizeof_offsets() const {
    std::vector<std::size_t> out;
    for (const auto& t : toks_) {
      if (t.kind == Tok::Kind::Ident && t.text == "sizeof") out.push_back(t.offset);
    }
    return out;
  }

 private:
  const Tok& peek(std::size_t ahead = 0) const { return toks_[std::min(pos_ + ahead, toks_.size() - 1)]; }
  const Tok& next() { return toks_[pos_ < toks_.size() - 1 ? pos_++ : pos_]; }

  bool is_punct(const std::string& p, std::size_t ahead = 0) const {
    return peek(ahead).kind == Tok::Kind::Punct && peek(ahead).text == p;
  }

  bool accept(const std::string& p) {
    if (!is_punct(p)) return false;
    next();
    return true;
  }

  const Tok& expect(const std::string& p) {
    if (!is_punct(p)) throw CompileError(peek().span, "expected '" + p + "' but found " + describe(peek()));
    return next();
  }

  void expect_end() {
    if (peek().kind != Tok::Kind::End) {
      throw CompileError(peek().span, "unexpected " + describe(peek()) + " after expression");
    }
  }

  static std::string describe(const Tok& t) {
    if (t.kind == Tok::Kind::End) return "end of body";
    return "'" + t.text + "'";
  }

  int declare(const std::string& name, const TypeTag& type, Span span) {
    if (is_c_keyword(name)) throw CompileError(span, "'" + name + "' is a reserved word");
    if (constants_.find(name)) throw CompileError(span, "'" + name + "' shadows a constant");
    if (scopes_.back().count(name)) throw CompileError(span, "'" + name + "' is already declared in this scope");
    int slot = static_cast<int>(slot_types_.size());
    slot_types_.push_back(type);
    scopes_.back()[name] = slot;
    return slot;
  }

  std::optional<int> lookup(const std::string& name) const {
    for (auto it = scopes_.rbegin(); it != scopes_.rend(); ++it) {
      auto f = it->find(name);
      if (f != it->end()) return f->second;
    }
    return std::nullopt;
  }

  static void require_assignable(const ExprPtr& e, const TypeTag& to, const std::string& what) {
    if (!assignable(e->type, to)) {
      throw CompileError(e->span, what + " has type " + to_string(e->type) + ", expected " + to_string(to));
    }
  }

  static bool definitely_returns(const std::vector<Stmt>& body) {
    for (const auto& s : body) {
      if (definitely_returns(s)) return true;
    }
    return false;
  }

  static bool definitely_returns(const Stmt& s) {
    switch (s.kind) {
      case Stmt::Kind::Return: return true;
      case Stmt::Kind::Block: return definitely_returns(s.then_body);
      case Stmt::Kind::If: return s.has_else && definitely_returns(s.then_body) && definitely_returns(s.else_body);
      default: return false;
    }
  }

  // Statements ------------------------------------------------------------

  Stmt statement() {
    const Tok& t = peek();
    Stmt s;
    s.span = t.span;
    if (is_punct("{")) {
      next();
      s.kind = Stmt::Kind::Block;
      scopes_.emplace_back();
      while (!is_punct("}")) {
        if (peek().kind == Tok::Kind::End) throw CompileError(peek().span, "missing '}'");
        s.then_body.push_back(statement());
      }
      next();
      scopes_.pop_back();
      return s;
    }
    if (t.kind == Tok::Kind::Ident && t.text == "if") {
      next();
      s.kind = Stmt::Kind::If;
      expect("(");
      TypeTag b = TypeTag::boolean();
      s.expr = expression(&b);
      if (s.expr->type != b) throw CompileError(s.expr->span, "if condition must be Bool, got " + to_string(s.expr->type));
      expect(")");
      s.then_body.push_back(scoped_statement());
      if (peek().kind == Tok::Kind::Ident && peek().text == "else") {
        next();
        s.has_else = true;
        s.else_body.push_back(scoped_statement());
      }
      return s;
    }
    if (t.kind == Tok::Kind::Ident && t.text == "return") {
      next();
      s.kind = Stmt::Kind::Return;
      s.target_type = result_;
      s.expr = expression(&result_);
      require_assignable(s.expr, result_, "returned value");
      expect(";");
      return s;
    }
    if (t.kind == Tok::Kind::Ident && is_type_keyword(t.text)) {
      next();
      s.kind = Stmt::Kind::Decl;
      s.target_type = t.text == "bool" ? TypeTag::boolean() : TypeTag::int32();
      const Tok& name = next();
      if (name.kind != Tok::Kind::Ident || is_keyword(name.text)) {
        throw CompileError(name.span, "expected a variable name after '" + t.text + "'");
      }
      expect("=");
      s.expr = expression(&s.target_type);
      require_assignable(s.expr, s.target_type, "initializer of '" + name.text + "'");
      expect(";");
      s.slot = declare(name.text, s.target_type, name.span);
      return s;
    }
    if (t.kind == Tok::Kind::Ident && is_punct("=", 1)) {
      const Tok& name = next();
      next();
      auto slot = lookup(name.text);
      if (!slot) {
        throw CompileError(name.span, "assignment to undeclared name '" + name.text + "'");
      }
      s.kind = Stmt::Kind::Assign;
      s.slot = *slot;
      s.target_type = slot_types_[static_cast<std::size_t>(*slot)];
      s.expr = expression(&s.target_type);
      require_assignable(s.expr, s.target_type, "assigned value");
      expect(";");
      return s;
    }
    s.kind = Stmt::Kind::Expr;
    s.expr = expression(nullptr);
    expect(";");
    return s;
  }

  Stmt scoped_statement() {
    scopes_.emplace_back();
    Stmt s = statement();
    scopes_.pop_back();
    return s;
  }

  // Expressions -----------------------------------------------------------

  ExprPtr expression(const TypeTag* expected) {
    ExprPtr cond = binary(1, expected);
    if (!is_punct("?")) return cond;
    Span span = next().span;
    if (cond->type.kind != TypeKind::Bool) throw CompileError(cond->span, "condition of '?:' must be Bool");
    ExprPtr a = expression(expected);
    expect(":");
    ExprPtr b = expression(expected);
    auto e = std::make_shared<Expr>();
    e->kind = Expr::Kind::Ternary;
    e->span = span;
    if (a->type == b->type) {
      e->type = a->type;
    } else if (a->type.is_integral() && b->type.is_integral()) {
      e->type = TypeTag::int32();
    } else {
      throw CompileError(span, "branches of '?:' have types " + to_string(a->type) + " and " + to_string(b->type));
    }
    e->args = {cond, a, b};
    return e;
  }

  ExprPtr binary(int min_prec, const TypeTag* expected) {
    ExprPtr lhs = unary(expected);
    while (peek().kind == Tok::Kind::Punct) {
      int prec = precedence(peek().text);
      if (prec == 0 || prec < min_prec) break;
      Tok op = next();
      ExprPtr rhs = binary(prec + 1, nullptr);
      lhs = make_binary(op, lhs, rhs);
    }
    return lhs;
  }

  static ExprPtr make_binary(const Tok& op, ExprPtr l, ExprPtr r) {
    auto e = std::make_shared<Expr>();
    e->kind = Expr::Kind::Binary;
    e->span = op.span;
    e->name = op.text;
    const std::string& o = op.text;
    auto mismatch = [&]() {
      return CompileError(op.span, "operator '" + o + "' cannot combine " + to_string(l->type) + " and " +
                                       to_string(r->type));
    };
    if (o == "&&" || o == "||") {
      if (l->type.kind != TypeKind::Bool || r->type.kind != TypeKind::Bool) throw mismatch();
      e->type = TypeTag::boolean();
    } else if (o == "==" || o == "!=") {
      bool ok = (l->type.is_integral() && r->type.is_integral()) ||
                (l->type == r->type && (l->type.kind == TypeKind::Bool || l->type.kind == TypeKind::MacAddr));
      if (!ok) throw mismatch();
      e->type = TypeTag::boolean();
    } else if (o == "<" || o == "<=" || o == ">" || o == ">=") {
      if (!l->type.is_integral() || !r->type.is_integral()) throw mismatch();
      e->type = TypeTag::boolean();
    } else {
      if (!l->type.is_integral() || !r->type.is_integral()) throw mismatch();
      e->type = TypeTag::int32();
    }
    e->args = {std::move(l), std::move(r)};
    return e;
  }

  ExprPtr unary(const TypeTag* expected) {
    if (is_punct("-") || is_punct("!") || is_punct("~")) {
      Tok op = next();
      ExprPtr operand = unary(nullptr);
      auto e = std::make_shared<Expr>();
      e->kind = Expr::Kind::Unary;
      e->span = op.span;
      e->name = op.text;
      if (op.text == "!") {
        if (operand->type.kind != TypeKind::Bool) throw CompileError(op.span, "operator '!' needs a Bool operand");
        e->type = TypeTag::boolean();
      } else {
        if (!operand->type.is_integral()) {
          throw CompileError(op.span, "operator '" + op.text + "' needs an integer operand");
        }
        e->type = TypeTag::int32();
      }
      e->args = {std::move(operand)};
      return e;
    }
    return postfix(expected);
  }

  ExprPtr postfix(const TypeTag* expected) {
    ExprPtr e = primary(expected);
    while (is_punct(".")) {
      next();
      const Tok& field = next();
      if (field.kind != Tok::Kind::Ident) throw CompileError(field.span, "expected a field name after '.'");
      int index = e->type.field_index(field.text);
      if (index < 0) {
        throw CompileError(field.span, "type " + to_string(e->type) + " has no field '" + field.text + "'");
      }
      auto f = std::make_shared<Expr>();
      f->kind = Expr::Kind::Field;
      f->span = field.span;
      f->name = field.text;
      f->slot = index;
      f->type = e->type.args[static_cast<std::size_t>(index)];
      f->args = {e};
      e = f;
    }
    return e;
  }

  ExprPtr primary(const TypeTag* expected) {
    const Tok& t = peek();
    auto e = std::make_shared<Expr>();
    e->span = t.span;
    if (t.kind == Tok::Kind::Int) {
      next();
      if (t.value > std::numeric_limits<std::int32_t>::max()) {
        throw CompileError(t.span, "integer literal '" + t.text + "' does not fit in 32 bits");
      }
      e->kind = Expr::Kind::IntLit;
      e->int_value = static_cast<std::int32_t>(t.value);
      e->type = TypeTag::int32();
      return e;
    }
    if (is_punct("(")) {
      next();
      ExprPtr inner = expression(expected);
      expect(")");
      return inner;
    }
    if (t.kind != Tok::Kind::Ident) throw CompileError(t.span, "expected an expression but found " + describe(t));
    next();
    if (t.text == "true" || t.text == "false") {
      e->kind = Expr::Kind::BoolLit;
      e->bool_value = t.text == "true";
      e->type = TypeTag::boolean();
      return e;
    }
    if (is_keyword(t.text)) throw CompileError(t.span, "unexpected keyword '" + t.text + "'");
    if (is_punct("(")) return call(t, expected);
    if (auto slot = lookup(t.text)) {
      e->kind = Expr::Kind::Local;
      e->name = t.text;
      e->slot = *slot;
      e->type = slot_types_[static_cast<std::size_t>(*slot)];
      return e;
    }
    if (const Constant* c = constants_.find(t.text)) {
      e->kind = Expr::Kind::Constant;
      e->name = t.text;
      e->type = c->type;
      return e;
    }
    throw CompileError(t.span, "reference to undeclared name '" + t.text + "'");
  }

  ExprPtr call(const Tok& callee, const TypeTag* expected) {
    expect("(");
    std::vector<ExprPtr> args;
    const std::string& f = callee.text;
    auto arg_expected = [&](std::size_t index) -> std::optional<TypeTag> {
      // Later arguments of put/add inherit element types from the collection.
      if (args.empty()) return std::nullopt;
      const TypeTag& c = args[0]->type;
      if (f == "hashset_add" && c.kind == TypeKind::FixedSet && index == 1) return c.args[0];
      if (f == "hashmap_put" && c.kind == TypeKind::FixedMap && index >= 1) return c.args[index - 1];
      if (f == "hashmap_get" && c.kind == TypeKind::FixedMap && index == 1) return c.args[0];
      return std::nullopt;
    };
    if (!is_punct(")")) {
      do {
        auto ex = arg_expected(args.size());
        args.push_back(expression(ex ? &*ex : nullptr));
      } while (accept(","));
    }
    expect(")");

    auto e = std::make_shared<Expr>();
    e->kind = Expr::Kind::Call;
    e->span = callee.span;
    e->name = f;
    auto arity = [&](std::size_t n) {
      if (args.size() != n) {
        throw CompileError(callee.span, f + " takes " + std::to_string(n) + " argument(s), got " +
                                            std::to_string(args.size()));
      }
    };
    auto arg_error = [&](std::size_t i, const std::string& want) {
      return CompileError(args[i]->span, "argument " + std::to_string(i + 1) + " of " + f + " must be " + want +
                                             ", got " + to_string(args[i]->type));
    };

    if (f == "hashset_new" || f == "hashmap_new") {
      arity(0);
      TypeKind want = f == "hashset_new" ? TypeKind::FixedSet : TypeKind::FixedMap;
      if (!expected || expected->kind != want) {
        throw CompileError(callee.span, f + "() needs a known " + (want == TypeKind::FixedSet ? "Set" : "Map") +
                                            " type from its context");
      }
      e->type = *expected;
    } else if (f == "hashset_add") {
      arity(2);
      if (args[0]->type.kind != TypeKind::FixedSet) throw arg_error(0, "a Set");
      if (!assignable(args[1]->type, args[0]->type.args[0])) throw arg_error(1, to_string(args[0]->type.args[0]));
      e->type = args[0]->type;
    } else if (f == "sizeof") {
      arity(1);
      if (args[0]->type.kind != TypeKind::FixedSet && args[0]->type.kind != TypeKind::FixedMap) {
        throw arg_error(0, "a Set or Map");
      }
      e->type = TypeTag::int32();
    } else if (f == "hashmap_get") {
      arity(2);
      if (args[0]->type.kind != TypeKind::FixedMap) throw arg_error(0, "a Map");
      if (!args[0]->type.args[1].is_integral()) {
        throw CompileError(callee.span, "hashmap_get is only defined for maps with integer values");
      }
      if (!assignable(args[1]->type, args[0]->type.args[0])) throw arg_error(1, to_string(args[0]->type.args[0]));
      e->type = TypeTag::int32();
    } else if (f == "hashmap_put") {
      arity(3);
      if (args[0]->type.kind != TypeKind::FixedMap) throw arg_error(0, "a Map");
      if (!assignable(args[1]->type, args[0]->type.args[0])) throw arg_error(1, to_string(args[0]->type.args[0]));
      if (!assignable(args[2]->type, args[0]->type.args[1])) throw arg_error(2, to_string(args[0]->type.args[1]));
      e->type = args[0]->type;
    } else if (f == "compound_key") {
      arity(2);
      if (args[0]->type.kind != TypeKind::MacAddr) throw arg_error(0, "MacAddr");
      if (!args[1]->type.is_integral()) throw arg_error(1, "Int32");
      e->type = TypeTag::bytes(kCompoundKeyBytes);
    } else {
      throw CompileError(callee.span, "unknown builtin function '" + f + "'");
    }
    e->args = std::move(args);
    return e;
  }

  std::vector<Tok> toks_;
  std::size_t pos_ = 0;
  const ConstantTable& constants_;
  std::vector<std::map<std::string, int>> scopes_;
  std::vector<TypeTag> slot_types_;
  TypeTag result_;
};

std::string trim(std::string_view s) {
  std::size_t b = 0;
  std::size_t e = s.size();
  while (b < e && std::isspace(static_cast<unsigned char>(s[b]))) ++b;
  while (e > b && std::isspace(static_cast<unsigned char>(s[e - 1]))) --e;
  return std::string(s.substr(b, e - b));
}

// ---------------------------------------------------------------------------
// Evaluator

std::int32_t wrap(std::int64_t v) { return static_cast<std::int32_t>(static_cast<std::uint32_t>(v)); }

Value coerce(Value v, const TypeTag& to) {
  if (to.kind == TypeKind::TimeMs && !v.is_time()) return Value::time_ms(v.as_integer());
  if (to.kind == TypeKind::Int32 && v.is_time()) return Value::int32(v.as_integer());
  return v;
}

class Evaluator {
 public:
  Evaluator(const ConstantTable& constants, int slots) : constants_(constants), slots_(static_cast<std::size_t>(slots)) {}

  Value& slot(int i) { return slots_[static_cast<std::size_t>(i)]; }

  bool exec_all(const std::vector<Stmt>& body, Value& ret) {
    for (const auto& s : body) {
      if (exec(s, ret)) return true;
    }
    return false;
  }

  bool exec(const Stmt& s, Value& ret) {
    switch (s.kind) {
      case Stmt::Kind::Decl:
      case Stmt::Kind::Assign:
        slot(s.slot) = coerce(eval(*s.expr), s.target_type);
        return false;
      case Stmt::Kind::If:
        if (eval(*s.expr).as_bool()) return exec_all(s.then_body, ret);
        return s.has_else && exec_all(s.else_body, ret);
      case Stmt::Kind::Return:
        ret = coerce(eval(*s.expr), s.target_type);
        return true;
      case Stmt::Kind::Block:
        return exec_all(s.then_body, ret);
      case Stmt::Kind::Expr:
        eval(*s.expr);
        return false;
    }
    return false;
  }

  Value eval(const Expr& e) {
    switch (e.kind) {
      case Expr::Kind::IntLit: return Value::int32(e.int_value);
      case Expr::Kind::BoolLit: return Value::boolean(e.bool_value);
      case Expr::Kind::Local: return slot(e.slot);
      case Expr::Kind::Constant: return constants_.find(e.name)->value;
      case Expr::Kind::Field: {
        Value base = eval(*e.args[0]);
        if (e.args[0]->type.kind == TypeKind::Pair) {
          return e.slot == 0 ? base.as_pair().fst : base.as_pair().snd;
        }
        return base.as_record().fields[static_cast<std::size_t>(e.slot)];
      }
      case Expr::Kind::Unary: {
        Value v = eval(*e.args[0]);
        if (e.name == "!") return Value::boolean(!v.as_bool());
        if (e.name == "-") return Value::int32(wrap(-static_cast<std::int64_t>(v.as_integer())));
        return Value::int32(~v.as_integer());
      }
      case Expr::Kind::Ternary:
        return coerce(eval(*e.args[0]).as_bool() ? eval(*e.args[1]) : eval(*e.args[2]), e.type);
      case Expr::Kind::Binary: return binary(e);
      case Expr::Kind::Call: return call(e);
    }
    throw InternalError("unknown expression kind");
  }

 private:
  Value binary(const Expr& e) {
    const std::string& o = e.name;
    if (o == "&&") return Value::boolean(eval(*e.args[0]).as_bool() && eval(*e.args[1]).as_bool());
    if (o == "||") return Value::boolean(eval(*e.args[0]).as_bool() || eval(*e.args[1]).as_bool());
    Value l = eval(*e.args[0]);
    Value r = eval(*e.args[1]);
    if (o == "==" || o == "!=") {
      bool eq = e.args[0]->type.is_integral() ? l.as_integer() == r.as_integer() : l == r;
      return Value::boolean(o == "==" ? eq : !eq);
    }
    std::int64_t a = l.as_integer();
    std::int64_t b = r.as_integer();
    if (o == "<") return Value::boolean(a < b);
    if (o == "<=") return Value::boolean(a <= b);
    if (o == ">") return Value::boolean(a > b);
    if (o == ">=") return Value::boolean(a >= b);
    if (o == "+") return Value::int32(wrap(a + b));
    if (o == "-") return Value::int32(wrap(a - b));
    if (o == "*") return Value::int32(wrap(a * b));
    if (o == "/" || o == "%") {
      if (b == 0) throw EflError(o == "/" ? "division by zero" : "remainder by zero");
      // INT32_MIN / -1 wraps to INT32_MIN; computing in 64 bits gives exactly that.
      return Value::int32(wrap(o == "/" ? a / b : a % b));
    }
    auto ua = static_cast<std::uint32_t>(a);
    auto ub = static_cast<std::uint32_t>(b);
    if (o == "&") return Value::int32(static_cast<std::int32_t>(ua & ub));
    if (o == "|") return Value::int32(static_cast<std::int32_t>(ua | ub));
    if (o == "^") return Value::int32(static_cast<std::int32_t>(ua ^ ub));
    throw InternalError("unknown operator " + o);
  }

  Value call(const Expr& e) {
    const std::string& f = e.name;
    if (f == "hashset_new" || f == "hashmap_new") return zero_value(e.type);
    std::vector<Value> a;
    a.reserve(e.args.size());
    for (const auto& arg : e.args) a.push_back(eval(*arg));
    if (f == "hashset_add") return hashset_add(a[0], coerce(a[1], e.args[0]->type.args[0]));
    if (f == "sizeof") return Value::int32(cardinality(a[0]));
    if (f == "hashmap_get") return Value::int32(hashmap_get(a[0], coerce(a[1], e.args[0]->type.args[0])));
    if (f == "hashmap_put") {
      const TypeTag& m = e.args[0]->type;
      return hashmap_put(a[0], coerce(a[1], m.args[0]), coerce(a[2], m.args[1]));
    }
    if (f == "compound_key") return compound_key(a[0].as_mac(), a[1].as_integer());
    throw InternalError("unknown builtin " + f);
  }

  const ConstantTable& constants_;
  std::vector<Value> slots_;
};

}  // namespace

FnIR parse_fn(std::string name, std::vector<std::string> param_names, Signature signature, std::string_view body,
              const ConstantTable& constants, Span origin) {
  if (param_names.size() != signature.params.size()) {
    throw CompileError(origin, "function '" + name + "' has " + std::to_string(param_names.size()) +
                                   " parameter(s) but its signature " + to_string(signature) + " has " +
                                   std::to_string(signature.params.size()));
  }
  FnIR fn;
  fn.name = std::move(name);
  fn.span = origin;

  // Keep the trimmed text and shift the origin to its first character.
  std::size_t lead = 0;
  Span start = origin;
  while (lead < body.size() && std::isspace(static_cast<unsigned char>(body[lead]))) {
    if (body[lead] == '\n') {
      ++start.line;
      start.column = 1;
    } else {
      ++start.column;
    }
    ++lead;
  }
  fn.raw_body = trim(body);

  Parser p(lex(fn.raw_body, start), constants);
  p.declare_params(param_names, signature.params, origin);
  if (fn.raw_body.empty()) throw CompileError(origin, "function '" + fn.name + "' has an empty body");
  if (p.statement_form()) {
    fn.body = p.statement_body(signature.result);
  } else {
    fn.expression_body = true;
    fn.body = p.expression_body(signature.result);
  }
  fn.slot_count = p.slot_count();
  fn.sizeof_offsets = p.sizeof_offsets();
  fn.param_names = std::move(param_names);
  fn.signature = std::move(signature);
  return fn;
}

Value eval_fn(const FnIR& fn, const std::vector<Value>& args, const ConstantTable& constants) {
  if (args.size() != fn.signature.params.size()) {
    throw InternalError("eval_fn: '" + fn.name + "' called with " + std::to_string(args.size()) + " argument(s)");
  }
  Evaluator ev(constants, fn.slot_count);
  for (std::size_t i = 0; i < args.size(); ++i) ev.slot(static_cast<int>(i)) = args[i];
  Value ret;
  if (!ev.exec_all(fn.body, ret)) throw InternalError("function '" + fn.name + "' finished without a value");
  return ret;
}

}  // namespace refi::minic
