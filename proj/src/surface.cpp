#include "refi/surface.hpp"

#include <algorithm>
#include <cctype>
#include <charconv>
#include <set>
#include <sstream>

#include "refi/frame.hpp"

namespace refi::surface {
namespace {

// ---------------------------------------------------------------------------
// Lexer

struct Token {
  enum class Kind { Ident, Int, Duration, Mac, Punct, Braced, End };
  Kind kind = Kind::End;
  std::string text;      // identifier/punct spelling, literal spelling, or braced contents
  std::int64_t value = 0;  // Int, Duration
  Span span;
  Span inner;            // Braced: position after `{`
  std::size_t begin = 0;  // offsets into the source
  std::size_t end = 0;
};

bool ident_start(char c) { return std::isalpha(static_cast<unsigned char>(c)) || c == '_'; }
bool ident_char(char c) { return std::isalnum(static_cast<unsigned char>(c)) || c == '_'; }
bool hex(char c) { return std::isxdigit(static_cast<unsigned char>(c)) != 0; }

bool mac_at(std::string_view s, std::size_t i) {
  if (i + 17 > s.size()) return false;
  for (std::size_t k = 0; k < 17; ++k) {
    char c = s[i + k];
    if (k % 3 == 2 ? c != ':' : !hex(c)) return false;
  }
  return i + 17 == s.size() || !ident_char(s[i + 17]);
}

class Lexer {
 public:
  explicit Lexer(std::string_view src) : src_(src) {}

  std::vector<Token> run() {
    std::vector<Token> out;
    while (true) {
      skip_trivia();
      Token t;
      t.span = here();
      t.begin = i_;
      if (i_ >= src_.size()) {
        t.end = i_;
        out.push_back(t);
        return out;
      }
      char c = src_[i_];
      if (mac_at(src_, i_)) {
        t.kind = Token::Kind::Mac;
        t.text = std::string(src_.substr(i_, 17));
        advance(17);
      } else if (std::isdigit(static_cast<unsigned char>(c))) {
        std::size_t j = i_;
        while (j < src_.size() && std::isdigit(static_cast<unsigned char>(src_[j]))) ++j;
        std::string digits(src_.substr(i_, j - i_));
        auto [p, ec] = std::from_chars(digits.data(), digits.data() + digits.size(), t.value);
        // 2^31 is allowed through so that a negated literal can reach INT32_MIN.
        if (ec != std::errc() || t.value > std::int64_t{INT32_MAX} + 1) {
          throw CompileError(t.span, "integer literal '" + digits + "' is out of range");
        }
        (void)p;
        t.kind = Token::Kind::Int;
        t.text = digits;
        if (src_.substr(j, 2) == "ms" && (j + 2 == src_.size() || !ident_char(src_[j + 2]))) {
          t.kind = Token::Kind::Duration;
          t.text += "ms";
          j += 2;
        } else if (j < src_.size() && ident_char(src_[j])) {
          throw CompileError(t.span, "malformed literal starting with '" + digits + "'");
        }
        advance(j - i_);
      } else if (ident_start(c)) {
        std::size_t j = i_;
        while (j < src_.size() && ident_char(src_[j])) ++j;
        t.kind = Token::Kind::Ident;
        t.text = std::string(src_.substr(i_, j - i_));
        advance(j - i_);
      } else if (c == '{') {
        t.kind = Token::Kind::Braced;
        braced(t);
      } else {
        static constexpr std::string_view kTwo[] = {"=>", "->", "||"};
        static constexpr std::string_view kOne = ".,()[]:=;-";
        t.kind = Token::Kind::Punct;
        for (auto op : kTwo) {
          if (src_.substr(i_, 2) == op) t.text = std::string(op);
        }
        if (t.text.empty()) {
          if (kOne.find(c) == std::string_view::npos) {
            throw CompileError(t.span, std::string("unexpected character '") + c + "'");
          }
          t.text = std::string(1, c);
        }
        advance(t.text.size());
      }
      t.end = i_;
      out.push_back(std::move(t));
    }
  }

 private:
  Span here() const { return {line_, col_}; }

  void advance(std::size_t n) {
    for (std::size_t k = 0; k < n && i_ < src_.size(); ++k, ++i_) {
      if (src_[i_] == '\n') {
        ++line_;
        col_ = 1;
      } else {
        ++col_;
      }
    }
  }

  void skip_trivia() {
    while (i_ < src_.size()) {
      if (std::isspace(static_cast<unsigned char>(src_[i_]))) {
        advance(1);
      } else if (src_.substr(i_, 2) == "//") {
        while (i_ < src_.size() && src_[i_] != '\n') advance(1);
      } else if (src_.substr(i_, 2) == "/*") {
        Span start = here();
        auto e = src_.find("*/", i_ + 2);
        if (e == std::string_view::npos) throw CompileError(start, "unterminated comment");
        advance(e + 2 - i_);
      } else {
        return;
      }
    }
  }

  // Captures a balanced `{ ... }` region verbatim; comments inside are
  // skipped when matching braces.
  void braced(Token& t) {
    Span open = here();
    advance(1);
    t.inner = here();
    std::size_t start = i_;
    int depth = 1;
    while (i_ < src_.size()) {
      if (src_.substr(i_, 2) == "//") {
        while (i_ < src_.size() && src_[i_] != '\n') advance(1);
        continue;
      }
      if (src_.substr(i_, 2) == "/*") {
        auto e = src_.find("*/", i_ + 2);
        if (e == std::string_view::npos) throw CompileError(here(), "unterminated comment");
        advance(e + 2 - i_);
        continue;
      }
      char c = src_[i_];
      if (c == '{') ++depth;
      if (c == '}' && --depth == 0) {
        t.text = std::string(src_.substr(start, i_ - start));
        advance(1);
        return;
      }
      advance(1);
    }
    throw CompileError(open, "unbalanced '{'");
  }

  std::string_view src_;
  std::size_t i_ = 0;
  int line_ = 1;
  int col_ = 1;
};

// ---------------------------------------------------------------------------
// Parser

class Parser {
 public:
  explicit Parser(std::string_view src) : src_(src), toks_(Lexer(src).run()) {}

  SurfaceProgram program() {
    SurfaceProgram p;
    while (!at_end()) {
      p.statements.push_back(statement());
      accept(";");
    }
    return p;
  }

  SignatureTable signature_table() {
    SignatureTable t;
    while (!at_end()) {
      const Token& name = ident("a function or constant name");
      if (accept(":")) {
        if (t.functions.count(name.text)) throw CompileError(name.span, "duplicate signature for '" + name.text + "'");
        t.functions[name.text] = signature();
      } else if (accept("=")) {
        ConstDecl c;
        c.name = name.text;
        c.span = name.span;
        c.literal = literal();
        expect(":");
        c.type = type();
        minic::parse_literal(c.literal, c.type, c.span);
        for (const auto& other : t.constants) {
          if (other.name == c.name) throw CompileError(c.span, "duplicate constant '" + c.name + "'");
        }
        t.constants.push_back(std::move(c));
      } else {
        throw CompileError(peek().span, "expected ':' or '=' after '" + name.text + "'");
      }
      accept(";");
    }
    return t;
  }

  ReactiveType whole_reactive_type() {
    ReactiveType t = reactive_type();
    expect_end();
    return t;
  }

  TypeTag whole_type() {
    TypeTag t = type();
    expect_end();
    return t;
  }

 private:
  // Token helpers ----------------------------------------------------------

  const Token& peek(std::size_t ahead = 0) const { return toks_[std::min(pos_ + ahead, toks_.size() - 1)]; }
  const Token& next() { return toks_[pos_ < toks_.size() - 1 ? pos_++ : pos_]; }
  bool at_end() const { return peek().kind == Token::Kind::End; }

  bool is(const std::string& p, std::size_t ahead = 0) const {
    return peek(ahead).kind == Token::Kind::Punct && peek(ahead).text == p;
  }

  bool is_word(const std::string& w, std::size_t ahead = 0) const {
    return peek(ahead).kind == Token::Kind::Ident && peek(ahead).text == w;
  }

  bool accept(const std::string& p) {
    if (!is(p)) return false;
    next();
    return true;
  }

  const Token& expect(const std::string& p) {
    if (!is(p)) throw CompileError(peek().span, "expected '" + p + "' but found " + describe(peek()));
    return next();
  }

  void expect_end() {
    if (!at_end()) throw CompileError(peek().span, "unexpected " + describe(peek()));
  }

  const Token& ident(const std::string& what) {
    if (peek().kind != Token::Kind::Ident) throw CompileError(peek().span, "expected " + what + " but found " + describe(peek()));
    return next();
  }

  static std::string describe(const Token& t) {
    switch (t.kind) {
      case Token::Kind::End: return "end of input";
      case Token::Kind::Braced: return "'{'";
      default: return "'" + t.text + "'";
    }
  }

  std::size_t matching_paren(std::size_t open) const {
    int depth = 0;
    for (std::size_t k = open; k < toks_.size(); ++k) {
      if (toks_[k].kind != Token::Kind::Punct) continue;
      if (toks_[k].text == "(") ++depth;
      if (toks_[k].text == ")" && --depth == 0) return k;
    }
    throw CompileError(toks_[open].span, "unbalanced '('");
  }

  // Binding checks ---------------------------------------------------------

  void bind(const std::string& name, Span span, bool reactive) {
    if (bound_.count(name)) throw CompileError(span, "duplicate binding of '" + name + "'");
    bound_.insert(name);
    (reactive ? vals_ : defs_).insert(name);
  }

  void use_reactive(const Token& t) const {
    if (vals_.count(t.text)) return;
    if (defs_.count(t.text)) throw CompileError(t.span, "'" + t.text + "' is a function, not a reactive");
    if (consts_.count(t.text)) throw CompileError(t.span, "'" + t.text + "' is a constant, not a reactive");
    throw CompileError(t.span, "use of '" + t.text + "' before its definition");
  }

  void use_function(const Token& t) const {
    if (defs_.count(t.text)) return;
    if (vals_.count(t.text)) throw CompileError(t.span, "'" + t.text + "' is a reactive, not a function");
    throw CompileError(t.span, "use of function '" + t.text + "' before its definition");
  }

  // Statements -------------------------------------------------------------

  Statement statement() {
    const Token& t = peek();
    if (is_word("const")) {
      next();
      ConstDecl c;
      const Token& name = ident("a constant name");
      c.name = name.text;
      c.span = t.span;
      expect(":");
      c.type = type();
      expect("=");
      c.literal = literal();
      minic::parse_literal(c.literal, c.type, name.span);
      if (consts_.count(c.name) || bound_.count(c.name)) {
        throw CompileError(name.span, "duplicate binding of '" + c.name + "'");
      }
      consts_.insert(c.name);
      return c;
    }
    if (is_word("sig")) {
      next();
      SigDecl s;
      s.name = ident("a function name").text;
      s.span = t.span;
      expect(":");
      s.signature = signature();
      return s;
    }
    if (is_word("def")) {
      next();
      FnDef d;
      const Token& name = ident("a function name");
      d.name = name.text;
      d.span = t.span;
      expect("=");
      d.lambda = lambda();
      if (consts_.count(d.name)) throw CompileError(name.span, "duplicate binding of '" + d.name + "'");
      bind(d.name, name.span, false);
      return d;
    }
    if (is_word("val")) {
      next();
      ValDef v;
      const Token& name = ident("a reactive name");
      v.name = name.text;
      v.span = t.span;
      if (accept(":")) v.annotation = reactive_type();
      expect("=");
      v.expr = rexpr();
      if (consts_.count(v.name)) throw CompileError(name.span, "duplicate binding of '" + v.name + "'");
      bind(v.name, name.span, true);
      return v;
    }
    ExprStmt s;
    s.span = t.span;
    s.expr = rexpr();
    return s;
  }

  std::string literal() {
    const Token& t = peek();
    if (is("-") && peek(1).kind == Token::Kind::Int) {
      next();
      return "-" + next().text;
    }
    if (t.kind == Token::Kind::Int || t.kind == Token::Kind::Mac) return next().text;
    if (is_word("true") || is_word("false")) return next().text;
    throw CompileError(t.span, "expected a literal but found " + describe(t));
  }

  // Types ------------------------------------------------------------------

  int int_literal() {
    const Token& t = peek();
    if (t.kind != Token::Kind::Int) throw CompileError(t.span, "expected an integer but found " + describe(t));
    next();
    if (t.value <= 0) throw CompileError(t.span, "size must be positive");
    if (t.value > INT32_MAX) throw CompileError(t.span, "size " + t.text + " is out of range");
    return static_cast<int>(t.value);
  }

  ReactiveType reactive_type() {
    const Token& t = peek();
    if (is_word("Reactive") || is_word("Fold")) {
      bool fold = t.text == "Fold";
      next();
      expect("[");
      TypeTag inner = type();
      expect("]");
      return fold ? ReactiveType::fold(inner) : ReactiveType::reactive(inner);
    }
    if (is_word("Observer")) {
      next();
      return ReactiveType::observer();
    }
    throw CompileError(t.span, "expected Reactive[...], Fold[...] or Observer but found " + describe(t));
  }

  TypeTag type() {
    const Token& t = ident("a type");
    const std::string& n = t.text;
    if (n == "Int32" || n == "Int") return TypeTag::int32();
    if (n == "Bool") return TypeTag::boolean();
    if (n == "TimeMs") return TypeTag::time_ms();
    if (n == "MacAddr") return TypeTag::mac_addr();
    if (n == "Unit") return TypeTag::unit();
    if (n == "Frame") return frame_type_tag();
    if (n == "Bytes") {
      expect("[");
      int len = int_literal();
      expect("]");
      return TypeTag::bytes(len);
    }
    if (n == "Pair") {
      expect("[");
      TypeTag a = type();
      expect(",");
      TypeTag b = type();
      expect("]");
      return TypeTag::pair(std::move(a), std::move(b));
    }
    if (n == "Set") {
      expect("[");
      TypeTag e = type();
      int cap = kDefaultCapacity;
      if (accept(",")) cap = int_literal();
      expect("]");
      return TypeTag::set(std::move(e), cap);
    }
    if (n == "Map") {
      expect("[");
      TypeTag k = type();
      expect(",");
      TypeTag v = type();
      int cap = kDefaultCapacity;
      if (accept(",")) cap = int_literal();
      expect("]");
      return TypeTag::map(std::move(k), std::move(v), cap);
    }
    if (n == "Reactive" || n == "Fold" || n == "Observer") {
      throw CompileError(t.span, "reactive type '" + n + "' cannot appear inside a value type");
    }
    throw CompileError(t.span, "unknown type '" + n + "'");
  }

  static TypeTag frame_type_tag() { return frame::frame_type(); }

  minic::Signature signature() {
    minic::Signature s;
    expect("(");
    if (!is(")")) {
      do {
        s.params.push_back(type());
      } while (accept(","));
    }
    expect(")");
    expect("->");
    s.result = type();
    return s;
  }

  // Functions --------------------------------------------------------------

  Lambda lambda() {
    Lambda l;
    l.span = peek().span;
    if (peek().kind == Token::Kind::Ident && is("=>", 1)) {
      l.params.push_back({next().text, std::nullopt});
    } else {
      expect("(");
      if (!is(")")) {
        do {
          LambdaParam p;
          p.name = ident("a parameter name").text;
          if (accept(":")) p.type = type();
          l.params.push_back(std::move(p));
        } while (accept(","));
      }
      expect(")");
      if (accept(":")) l.result = type();
    }
    expect("=>");
    const Token& body = peek();
    if (body.kind != Token::Kind::Braced) throw CompileError(body.span, "expected '{' to start a function body");
    next();
    l.body = body.text;
    l.body_span = body.inner;
    std::set<std::string> seen;
    for (const auto& p : l.params) {
      if (!seen.insert(p.name).second) throw CompileError(l.span, "duplicate parameter '" + p.name + "'");
    }
    return l;
  }

  bool lambda_ahead() const {
    if (peek().kind == Token::Kind::Ident && is("=>", 1)) return true;
    if (!is("(")) return false;
    std::size_t close = matching_paren(pos_);
    const Token& after = toks_[std::min(close + 1, toks_.size() - 1)];
    return after.kind == Token::Kind::Punct && (after.text == "=>" || after.text == ":");
  }

  FnRef fn_ref() {
    FnRef f;
    f.span = peek().span;
    if (lambda_ahead()) {
      f.lambda = lambda();
      return f;
    }
    const Token& name = ident("a function name or lambda");
    use_function(name);
    f.name = name.text;
    return f;
  }

  InitExpr init_expr() {
    expect("(");
    InitExpr init;
    init.span = peek().span;
    if (peek().kind == Token::Kind::Braced && is(")", 1)) {
      const Token& b = next();
      init.text = b.text;
      init.span = b.inner;
    } else {
      std::size_t close = matching_paren(pos_ - 1);
      if (close == pos_) throw CompileError(peek().span, "missing initial value");
      init.text = std::string(src_.substr(peek().begin, toks_[close - 1].end - peek().begin));
      pos_ = close;
    }
    expect(")");
    return init;
  }

  // Reactive expressions ---------------------------------------------------

  static SExprPtr make(SExpr e) { return std::make_shared<const SExpr>(std::move(e)); }

  SExprPtr rexpr() {
    SExprPtr left = chain();
    while (is("||")) {
      Span span = next().span;
      SExprPtr right = chain();
      SExpr c;
      c.kind = SExpr::Kind::Choice;
      c.span = span;
      c.operands = {reject_tuple(left), reject_tuple(right)};
      left = make(std::move(c));
    }
    return reject_tuple(left);
  }

  static SExprPtr reject_tuple(const SExprPtr& e) {
    if (e->kind == SExpr::Kind::Tuple) {
      throw CompileError(e->span, "a tuple of reactives can only be the receiver of map or fold");
    }
    return e;
  }

  SExprPtr chain() {
    SExprPtr e = primary();
    while (is(".")) {
      next();
      e = method(e);
    }
    return e;
  }

  SExprPtr primary() {
    const Token& t = peek();
    if (is("(")) {
      next();
      std::vector<SExprPtr> elems;
      do {
        elems.push_back(rexpr());
      } while (accept(","));
      expect(")");
      if (elems.size() == 1) return elems[0];
      SExpr tuple;
      tuple.kind = SExpr::Kind::Tuple;
      tuple.span = t.span;
      tuple.operands = std::move(elems);
      return make(std::move(tuple));
    }
    if (is_word("Source")) {
      next();
      SExpr s;
      s.kind = SExpr::Kind::Source;
      s.span = t.span;
      expect("(");
      const Token& kind = ident("an interaction name");
      auto k = source_kind_from_name(kind.text);
      if (!k && !effect_from_name(kind.text)) throw CompileError(kind.span, "unknown interaction '" + kind.text + "'");
      s.interaction = kind.text;
      if (k) s.source.kind = *k;
      if (k == SourceKind::Timer) {
        expect("(");
        const Token& d = peek();
        if (d.kind != Token::Kind::Duration) throw CompileError(d.span, "expected a period such as 10ms");
        next();
        if (d.value <= 0) throw CompileError(d.span, "timer period must be positive");
        if (d.value > INT32_MAX) throw CompileError(d.span, "timer period is out of range");
        s.source.period_ms = static_cast<int>(d.value);
        expect(")");
      }
      expect(")");
      return make(std::move(s));
    }
    if (is_word("fold")) {
      next();
      SExpr f;
      f.kind = SExpr::Kind::FoldAll;
      f.span = t.span;
      f.init = init_expr();
      expect("(");
      do {
        FoldArm arm;
        arm.input = chain();
        reject_tuple(arm.input);
        expect("->");
        arm.fn = fn_ref();
        f.arms.push_back(std::move(arm));
      } while (accept(","));
      expect(")");
      return make(std::move(f));
    }
    if (t.kind == Token::Kind::Ident) {
      next();
      use_reactive(t);
      SExpr r;
      r.kind = SExpr::Kind::Ref;
      r.span = t.span;
      r.name = t.text;
      return make(std::move(r));
    }
    throw CompileError(t.span, "expected a reactive expression but found " + describe(t));
  }

  SExprPtr method(const SExprPtr& receiver) {
    const Token& m = ident("a combinator name");
    SExpr e;
    e.span = m.span;
    e.operands = {receiver};
    bool tuple_ok = false;
    if (m.text == "map" || m.text == "filter") {
      e.kind = m.text == "map" ? SExpr::Kind::Map : SExpr::Kind::Filter;
      tuple_ok = e.kind == SExpr::Kind::Map;
      expect("(");
      e.fn = fn_ref();
      expect(")");
    } else if (m.text == "fold") {
      e.kind = SExpr::Kind::Fold;
      tuple_ok = true;
      e.init = init_expr();
      if (!is("(")) throw CompileError(peek().span, "expected the fold function after the initial value");
      std::size_t close = matching_paren(pos_);
      const Token& after = toks_[std::min(close + 1, toks_.size() - 1)];
      if (after.kind == Token::Kind::Punct && (after.text == "=>" || after.text == ":")) {
        // `.fold(init)(acc, x) => { ... }`: the parentheses are the parameter list.
        FnRef f;
        f.span = peek().span;
        f.lambda = lambda();
        e.fn = std::move(f);
      } else {
        expect("(");
        e.fn = fn_ref();
        expect(")");
      }
    } else if (m.text == "snapshot") {
      e.kind = SExpr::Kind::Snapshot;
      expect("(");
      e.operands.push_back(rexpr());
      expect(")");
    } else if (m.text == "change") {
      e.kind = SExpr::Kind::Change;
      e.init = init_expr();
    } else if (m.text == "observe") {
      e.kind = SExpr::Kind::Observe;
      expect("(");
      const Token& eff = ident("an effect name");
      auto k = effect_from_name(eff.text);
      if (!k && !source_kind_from_name(eff.text)) {
        throw CompileError(eff.span, "unknown interaction '" + eff.text + "'");
      }
      e.interaction = eff.text;
      if (k) e.effect = *k;
      expect(")");
      if (receiver->kind == SExpr::Kind::Tuple) {
        throw CompileError(m.span, "observe takes a single input; combine the inputs with map first");
      }
    } else {
      throw CompileError(m.span, "unknown combinator '" + m.text + "'");
    }
    if (!tuple_ok) reject_tuple(receiver);
    return make(std::move(e));
  }

  std::string_view src_;
  std::vector<Token> toks_;
  std::size_t pos_ = 0;
  std::set<std::string> bound_;
  std::set<std::string> vals_;
  std::set<std::string> defs_;
  std::set<std::string> consts_;
};

// ---------------------------------------------------------------------------
// Desugaring

class Desugarer {
 public:
  explicit Desugarer(const SurfaceProgram& p) {
    for (const auto& s : p.statements) {
      if (const auto* v = std::get_if<ValDef>(&s)) note_name(v->name);
      if (const auto* d = std::get_if<FnDef>(&s)) note_name(d->name);
      if (const auto* c = std::get_if<ConstDecl>(&s)) used_.insert(c->name);
    }
  }

  CoreProgram run(const SurfaceProgram& p) {
    for (const auto& s : p.statements) {
      if (const auto* c = std::get_if<ConstDecl>(&s)) {
        out_.constants.push_back(*c);
      } else if (const auto* sig = std::get_if<SigDecl>(&s)) {
        out_.signatures.push_back(*sig);
      } else if (const auto* d = std::get_if<FnDef>(&s)) {
        out_.functions.push_back(CoreFn{d->name, d->lambda, false, d->span});
      } else if (const auto* v = std::get_if<ValDef>(&s)) {
        if (v->expr->kind == SExpr::Kind::Ref) {
          throw CompileError(v->span, "'" + v->name + "' only renames '" + v->expr->name +
                                          "'; use the original name instead");
        }
        flatten(*v->expr, v->name, v->annotation);
      } else if (const auto* e = std::get_if<ExprStmt>(&s)) {
        if (e->expr->kind == SExpr::Kind::Ref) {
          throw CompileError(e->span, "statement '" + e->expr->name + "' has no effect");
        }
        flatten(*e->expr, std::nullopt, std::nullopt);
      }
    }
    return std::move(out_);
  }

 private:
  void note_name(const std::string& name) {
    used_.insert(name);
    if (name.size() > 2 && name.compare(0, 2, "_g") == 0 &&
        std::all_of(name.begin() + 2, name.end(), [](char c) { return std::isdigit(static_cast<unsigned char>(c)); })) {
      next_fresh_ = std::max(next_fresh_, std::stoi(name.substr(2)) + 1);
    }
  }

  std::string fresh() {
    std::string n;
    do {
      n = "_g" + std::to_string(next_fresh_++);
    } while (used_.count(n));
    used_.insert(n);
    return n;
  }

  std::string unique(const std::string& base) {
    std::string n = base;
    for (int k = 2; used_.count(n); ++k) n = base + std::to_string(k);
    used_.insert(n);
    return n;
  }

  std::string lift(const FnRef& f, const std::string& name) {
    if (!f.lambda) return f.name;
    std::string fn = unique(name);
    out_.functions.push_back(CoreFn{fn, *f.lambda, true, f.span});
    return fn;
  }

  std::string flatten(const SExpr& e, std::optional<std::string> target, std::optional<ReactiveType> annotation) {
    if (e.kind == SExpr::Kind::Ref) return e.name;

    CoreDef d;
    d.span = e.span;
    std::vector<std::string> inputs;
    auto add_inputs = [&](const SExprPtr& op) {
      if (op->kind == SExpr::Kind::Tuple) {
        for (const auto& x : op->operands) inputs.push_back(flatten(*x, std::nullopt, std::nullopt));
      } else {
        inputs.push_back(flatten(*op, std::nullopt, std::nullopt));
      }
    };
    if (e.kind == SExpr::Kind::FoldAll) {
      for (const auto& arm : e.arms) inputs.push_back(flatten(*arm.input, std::nullopt, std::nullopt));
    } else {
      for (const auto& op : e.operands) add_inputs(op);
    }

    d.name = target ? *target : fresh();
    d.annotation = std::move(annotation);
    d.inputs = std::move(inputs);
    d.init = e.init;
    d.interaction = e.interaction;
    switch (e.kind) {
      case SExpr::Kind::Source:
        d.kind = ReactiveKind::Source;
        d.source = e.source;
        break;
      case SExpr::Kind::Map: d.kind = ReactiveKind::Map; break;
      case SExpr::Kind::Filter: d.kind = ReactiveKind::Filter; break;
      case SExpr::Kind::Fold: d.kind = ReactiveKind::Fold; break;
      case SExpr::Kind::FoldAll: d.kind = ReactiveKind::FoldAll; break;
      case SExpr::Kind::Choice: d.kind = ReactiveKind::Choice; break;
      case SExpr::Kind::Snapshot: d.kind = ReactiveKind::Snapshot; break;
      case SExpr::Kind::Change: d.kind = ReactiveKind::Change; break;
      case SExpr::Kind::Observe:
        d.kind = ReactiveKind::Observe;
        d.effect = e.effect;
        break;
      case SExpr::Kind::Tuple:
        throw CompileError(e.span, "a tuple of reactives can only be the receiver of map or fold");
      case SExpr::Kind::Ref: break;
    }
    if (e.fn) d.fns.push_back(lift(*e.fn, d.name + "_fn"));
    for (std::size_t i = 0; i < e.arms.size(); ++i) {
      d.fns.push_back(lift(e.arms[i].fn, d.name + "_arm" + std::to_string(i)));
    }
    out_.defs.push_back(std::move(d));
    return out_.defs.back().name;
  }

  CoreProgram out_;
  std::set<std::string> used_;
  int next_fresh_ = 1;
};

// ---------------------------------------------------------------------------
// Printing

std::string print_lambda(const Lambda& l) {
  std::string out;
  bool bare = l.params.size() == 1 && !l.params[0].type && !l.result;
  if (bare) {
    out = l.params[0].name;
  } else {
    out = "(";
    for (std::size_t i = 0; i < l.params.size(); ++i) {
      if (i) out += ", ";
      out += l.params[i].name;
      if (l.params[i].type) out += ": " + to_string(*l.params[i].type);
    }
    out += ")";
    if (l.result) out += ": " + to_string(*l.result);
  }
  return out + " => {" + l.body + "}";
}

bool same_lambda(const Lambda& a, const Lambda& b) {
  if (a.params.size() != b.params.size() || a.result != b.result || a.body != b.body) return false;
  for (std::size_t i = 0; i < a.params.size(); ++i) {
    if (a.params[i].name != b.params[i].name || a.params[i].type != b.params[i].type) return false;
  }
  return true;
}

}  // namespace

bool Lambda::fully_annotated() const {
  return result.has_value() && std::all_of(params.begin(), params.end(), [](const auto& p) { return p.type.has_value(); });
}

std::string_view kind_name(ReactiveKind k) {
  switch (k) {
    case ReactiveKind::Source: return "source";
    case ReactiveKind::Map: return "map";
    case ReactiveKind::Filter: return "filter";
    case ReactiveKind::Fold: return "fold";
    case ReactiveKind::FoldAll: return "fold-all";
    case ReactiveKind::Choice: return "choice";
    case ReactiveKind::Snapshot: return "snapshot";
    case ReactiveKind::Change: return "change";
    case ReactiveKind::Observe: return "observe";
  }
  return "?";
}

const CoreDef* CoreProgram::find_def(const std::string& name) const {
  for (const auto& d : defs) {
    if (d.name == name) return &d;
  }
  return nullptr;
}

const CoreFn* CoreProgram::find_fn(const std::string& name) const {
  for (const auto& f : functions) {
    if (f.name == name) return &f;
  }
  return nullptr;
}

SurfaceProgram parse_program(std::string_view text) { return Parser(text).program(); }

ReactiveType parse_reactive_type(std::string_view text) { return Parser(text).whole_reactive_type(); }

TypeTag parse_type(std::string_view text) { return Parser(text).whole_type(); }

SignatureTable parse_signature_table(std::string_view text) { return Parser(text).signature_table(); }

CoreProgram desugar(const SurfaceProgram& p) { return Desugarer(p).run(p); }

std::string print_core(const CoreProgram& p) {
  std::ostringstream out;
  for (const auto& c : p.constants) out << "const " << c.name << " : " << to_string(c.type) << " = " << c.literal << "\n";
  for (const auto& s : p.signatures) out << "sig " << s.name << " : " << minic::to_string(s.signature) << "\n";
  for (const auto& f : p.functions) out << "def " << f.name << " = " << print_lambda(f.lambda) << "\n";
  for (const auto& d : p.defs) {
    out << "val " << d.name;
    if (d.annotation) out << " : " << to_string(*d.annotation);
    out << " = ";
    auto receiver = [&]() {
      if (d.inputs.size() == 1) return d.inputs[0];
      std::string r = "(";
      for (std::size_t i = 0; i < d.inputs.size(); ++i) r += (i ? ", " : "") + d.inputs[i];
      return r + ")";
    };
    switch (d.kind) {
      case ReactiveKind::Source:
        out << "Source(" << (source_kind_from_name(d.interaction) ? to_string(d.source) : d.interaction) << ")";
        break;
      case ReactiveKind::Map: out << receiver() << ".map(" << d.fns[0] << ")"; break;
      case ReactiveKind::Filter: out << receiver() << ".filter(" << d.fns[0] << ")"; break;
      case ReactiveKind::Fold: out << receiver() << ".fold({" << d.init->text << "})(" << d.fns[0] << ")"; break;
      case ReactiveKind::FoldAll:
        out << "fold({" << d.init->text << "})(";
        for (std::size_t i = 0; i < d.inputs.size(); ++i) out << (i ? ", " : "") << d.inputs[i] << " -> " << d.fns[i];
        out << ")";
        break;
      case ReactiveKind::Choice: out << d.inputs[0] << " || " << d.inputs[1]; break;
      case ReactiveKind::Snapshot: out << d.inputs[0] << ".snapshot(" << d.inputs[1] << ")"; break;
      case ReactiveKind::Change: out << d.inputs[0] << ".change({" << d.init->text << "})"; break;
      case ReactiveKind::Observe: out << d.inputs[0] << ".observe(" << d.interaction << ")"; break;
    }
    out << "\n";
  }
  return out.str();
}

bool same_structure(const CoreProgram& a, const CoreProgram& b) {
  if (a.constants.size() != b.constants.size() || a.signatures.size() != b.signatures.size() ||
      a.functions.size() != b.functions.size() || a.defs.size() != b.defs.size()) {
    return false;
  }
  for (std::size_t i = 0; i < a.constants.size(); ++i) {
    const auto& x = a.constants[i];
    const auto& y = b.constants[i];
    if (x.name != y.name || x.type != y.type || x.literal != y.literal) return false;
  }
  for (std::size_t i = 0; i < a.signatures.size(); ++i) {
    if (a.signatures[i].name != b.signatures[i].name || a.signatures[i].signature != b.signatures[i].signature) {
      return false;
    }
  }
  for (std::size_t i = 0; i < a.functions.size(); ++i) {
    // Lifted functions print as defs, so only names and lambdas must agree.
    if (a.functions[i].name != b.functions[i].name || !same_lambda(a.functions[i].lambda, b.functions[i].lambda)) {
      return false;
    }
  }
  for (std::size_t i = 0; i < a.defs.size(); ++i) {
    const auto& x = a.defs[i];
    const auto& y = b.defs[i];
    if (x.name != y.name || x.kind != y.kind || x.annotation != y.annotation || x.inputs != y.inputs ||
        x.fns != y.fns || x.init.has_value() != y.init.has_value()) {
      return false;
    }
    if (x.init && x.init->text != y.init->text) return false;
    if (x.interaction != y.interaction) return false;
    if (x.kind == ReactiveKind::Source && x.source != y.source) return false;
    if (x.kind == ReactiveKind::Observe && x.effect != y.effect) return false;
  }
  return true;
}

}  // namespace refi::surface
