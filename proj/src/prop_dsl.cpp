#include "rover/prop_dsl.hpp"

#include <algorithm>
#include <cctype>
#include <fstream>
#include <sstream>

namespace rover {

// ---------------------------------------------------------------------------
// Construction and printing

namespace {

std::string cmp_text(CmpOp op) {
  switch (op) {
    case CmpOp::Eq: return "==";
    case CmpOp::Ne: return "!=";
    case CmpOp::Lt: return "<";
    case CmpOp::Le: return "<=";
    case CmpOp::Gt: return ">";
    case CmpOp::Ge: return ">=";
  }
  return "==";
}

std::string atom_text(const AtomSpec& a) {
  const auto quoted = [](const std::string& s) { return Json(s).dump(); };
  switch (a.kind) {
    case AtomKind::Topic: return "topic(" + quoted(a.arg) + ")";
    case AtomKind::Kind: return "kind(" + quoted(a.arg) + ")";
    case AtomKind::Sender: return "sender(" + quoted(a.arg) + ")";
    case AtomKind::Receiver: return "receiver(" + quoted(a.arg) + ")";
    case AtomKind::Believes: return "believes(" + a.arg + ")";
    case AtomKind::Action: return "action(" + a.arg + ")";
    case AtomKind::Payload:
    case AtomKind::World: {
      std::string s = a.kind == AtomKind::Payload ? "payload" : "world";
      for (const auto& p : a.path) s += "." + p;
      return s + " " + cmp_text(a.cmp) + " " + a.literal.dump();
    }
  }
  return "?";
}

std::string join(const std::vector<Formula>& kids, std::string_view sep) {
  std::string s = "(";
  for (std::size_t i = 0; i < kids.size(); ++i) {
    if (i > 0) s += sep;
    s += kids[i]->text;
  }
  return s + ")";
}

std::string node_text(const Node& n) {
  switch (n.op) {
    case Op::True: return "true";
    case Op::False: return "false";
    case Op::Atom: return atom_text(n.atom);
    case Op::Not: return "!" + n.kids[0]->text;
    case Op::And: return join(n.kids, " && ");
    case Op::Or: return join(n.kids, " || ");
    case Op::Implies: return join(n.kids, " => ");
    case Op::Until: return join(n.kids, " until ");
    case Op::Precedes: return join(n.kids, " precedes ");
    case Op::Always: return "always " + n.kids[0]->text;
    case Op::Never: return "never " + n.kids[0]->text;
    case Op::Eventually: return "eventually " + n.kids[0]->text;
    case Op::Within: return "eventually[<=" + std::to_string(n.bound) + "] " + n.kids[0]->text;
    case Op::By: return "eventually[@" + std::to_string(n.deadline) + "] " + n.kids[0]->text;
  }
  return "?";
}

const Formula& const_true() {
  static const Formula f = [] {
    auto n = std::make_shared<Node>();
    n->op = Op::True;
    n->text = "true";
    return Formula(n);
  }();
  return f;
}

const Formula& const_false() {
  static const Formula f = [] {
    auto n = std::make_shared<Node>();
    n->op = Op::False;
    n->text = "false";
    return Formula(n);
  }();
  return f;
}

}  // namespace

Formula make_const(bool value) { return value ? const_true() : const_false(); }

Formula make_atom(AtomSpec atom) {
  auto n = std::make_shared<Node>();
  n->op = Op::Atom;
  n->atom = std::move(atom);
  n->text = atom_text(n->atom);
  return n;
}

Formula make_node(Op op, std::vector<Formula> kids, int bound, Tick deadline) {
  auto n = std::make_shared<Node>();
  n->op = op;
  n->kids = std::move(kids);
  n->bound = bound;
  n->deadline = deadline;
  n->has_deadline = op == Op::By;
  for (const auto& k : n->kids) n->has_deadline = n->has_deadline || k->has_deadline;
  n->text = node_text(*n);
  return n;
}

std::string print(const Formula& f) { return f->text; }
bool same(const Formula& a, const Formula& b) { return a->text == b->text; }

// ---------------------------------------------------------------------------
// Lexer

namespace {

enum class Tok { Ident, String, Number, Sym, End };

struct Token {
  Tok kind{Tok::End};
  std::string text;
  Json value;
  int line{1};
  int col{1};
};

[[noreturn]] void syntax_error(int line, int col, const std::string& msg) {
  throw Error("SyntaxError", std::to_string(line) + ":" + std::to_string(col) + ": " + msg);
}

std::vector<Token> lex(std::string_view src) {
  std::vector<Token> out;
  int line = 1;
  int col = 1;
  std::size_t i = 0;
  const auto advance = [&](std::size_t n) {
    for (std::size_t k = 0; k < n; ++k) {
      if (src[i] == '\n') {
        ++line;
        col = 1;
      } else {
        ++col;
      }
      ++i;
    }
  };
  while (i < src.size()) {
    const char c = src[i];
    if (std::isspace(static_cast<unsigned char>(c))) {
      advance(1);
      continue;
    }
    if (c == '#') {
      while (i < src.size() && src[i] != '\n') advance(1);
      continue;
    }
    Token t;
    t.line = line;
    t.col = col;
    if (std::isalpha(static_cast<unsigned char>(c)) || c == '_') {
      std::size_t j = i;
      while (j < src.size() && (std::isalnum(static_cast<unsigned char>(src[j])) || src[j] == '_')) ++j;
      t.kind = Tok::Ident;
      t.text = std::string(src.substr(i, j - i));
      advance(j - i);
    } else if (std::isdigit(static_cast<unsigned char>(c)) ||
               (c == '-' && i + 1 < src.size() && std::isdigit(static_cast<unsigned char>(src[i + 1])))) {
      std::size_t j = i + 1;
      bool real = false;
      while (j < src.size() && (std::isdigit(static_cast<unsigned char>(src[j])) || src[j] == '.')) {
        real = real || src[j] == '.';
        ++j;
      }
      t.kind = Tok::Number;
      t.text = std::string(src.substr(i, j - i));
      try {
        t.value = real ? Json(std::stod(t.text)) : Json(std::stoll(t.text));
      } catch (const std::exception&) {
        syntax_error(line, col, "bad number '" + t.text + "'");
      }
      advance(j - i);
    } else if (c == '"') {
      std::size_t j = i + 1;
      while (j < src.size() && src[j] != '"') {
        if (src[j] == '\\') ++j;
        if (j < src.size() && src[j] == '\n') syntax_error(line, col, "unterminated string");
        ++j;
      }
      if (j >= src.size()) syntax_error(line, col, "unterminated string");
      t.kind = Tok::String;
      t.text = std::string(src.substr(i, j + 1 - i));
      try {
        t.value = Json::parse(t.text);
      } catch (const std::exception&) {
        syntax_error(line, col, "bad string literal");
      }
      advance(j + 1 - i);
    } else {
      static const std::vector<std::string> kSyms{"&&", "||", "=>", "==", "!=", "<=", ">=", "(", ")",
                                                  "[",  "]",  ",",  ".",  ":",  ";",  "!",  "<",  ">", "@"};
      bool found = false;
      for (const auto& s : kSyms) {
        if (src.substr(i, s.size()) == s) {
          t.kind = Tok::Sym;
          t.text = s;
          advance(s.size());
          found = true;
          break;
        }
      }
      if (!found) syntax_error(line, col, std::string("unexpected character '") + c + "'");
    }
    out.push_back(std::move(t));
  }
  Token end;
  end.line = line;
  end.col = col;
  out.push_back(end);
  return out;
}

// ---------------------------------------------------------------------------
// Parser

class Parser {
 public:
  explicit Parser(std::vector<Token> toks) : toks_(std::move(toks)) {}

  std::vector<PropertySpec> file() {
    std::vector<PropertySpec> out;
    while (!at_end()) {
      const Token& kw = peek();
      if (!is_ident("prop")) syntax_error(kw.line, kw.col, "expected 'prop'");
      next();
      const Token& name = peek();
      if (name.kind != Tok::Ident) syntax_error(name.line, name.col, "expected property name");
      next();
      expect(":");
      PropertySpec spec{name.text, formula(), kw.line};
      if (is_sym(";")) next();
      for (const auto& p : out) {
        if (p.name == spec.name) syntax_error(name.line, name.col, "duplicate property '" + spec.name + "'");
      }
      out.push_back(std::move(spec));
    }
    return out;
  }

  Formula whole() {
    Formula f = formula();
    if (!at_end()) {
      const auto& t = peek();
      syntax_error(t.line, t.col, "unexpected '" + t.text + "'");
    }
    return f;
  }

 private:
  const Token& peek(std::size_t ahead = 0) const {
    return toks_[std::min(pos_ + ahead, toks_.size() - 1)];
  }
  const Token& next() { return toks_[pos_ < toks_.size() - 1 ? pos_++ : pos_]; }
  bool at_end() const { return peek().kind == Tok::End; }
  bool is_sym(std::string_view s, std::size_t ahead = 0) const {
    return peek(ahead).kind == Tok::Sym && peek(ahead).text == s;
  }
  bool is_ident(std::string_view s) const { return peek().kind == Tok::Ident && peek().text == s; }
  void expect(std::string_view s) {
    if (!is_sym(s)) {
      const auto& t = peek();
      syntax_error(t.line, t.col,
                   "expected '" + std::string(s) + "' but found '" + (t.kind == Tok::End ? "end of input" : t.text) + "'");
    }
    next();
  }

  Formula formula() {
    Formula lhs = temporal_binary();
    if (is_sym("=>") || is_ident("implies")) {
      next();
      Formula rhs = formula();
      return make_node(Op::Implies, {lhs, rhs});
    }
    return lhs;
  }

  Formula temporal_binary() {
    Formula lhs = disjunction();
    if (is_ident("until") || is_ident("precedes")) {
      const Op op = peek().text == "until" ? Op::Until : Op::Precedes;
      next();
      Formula rhs = disjunction();
      return make_node(op, {lhs, rhs});
    }
    return lhs;
  }

  Formula disjunction() {
    std::vector<Formula> kids{conjunction()};
    while (is_sym("||")) {
      next();
      kids.push_back(conjunction());
    }
    return kids.size() == 1 ? kids[0] : make_node(Op::Or, std::move(kids));
  }

  Formula conjunction() {
    std::vector<Formula> kids{unary()};
    while (is_sym("&&")) {
      next();
      kids.push_back(unary());
    }
    return kids.size() == 1 ? kids[0] : make_node(Op::And, std::move(kids));
  }

  Formula unary() {
    if (is_sym("!")) {
      next();
      return make_node(Op::Not, {unary()});
    }
    if (is_ident("always")) {
      next();
      return make_node(Op::Always, {unary()});
    }
    if (is_ident("never")) {
      next();
      return make_node(Op::Never, {unary()});
    }
    if (is_ident("eventually")) {
      next();
      if (is_sym("[")) {
        next();
        expect("<=");
        const Token& k = peek();
        if (k.kind != Tok::Number || !k.value.is_number_integer()) {
          syntax_error(k.line, k.col, "expected an integer bound");
        }
        const auto bound = k.value.get<std::int64_t>();
        if (bound <= 0) {
          throw Error("NonPositiveBound", std::to_string(k.line) + ":" + std::to_string(k.col) +
                                              ": bound must be positive, got " + k.text);
        }
        next();
        expect("]");
        return make_node(Op::Within, {unary()}, static_cast<int>(bound));
      }
      return make_node(Op::Eventually, {unary()});
    }
    return primary();
  }

  Formula primary() {
    const Token& t = peek();
    if (is_sym("(")) {
      next();
      Formula f = formula();
      expect(")");
      return f;
    }
    if (t.kind != Tok::Ident) {
      syntax_error(t.line, t.col, "expected a formula but found '" + (t.kind == Tok::End ? std::string("end of input") : t.text) + "'");
    }
    const std::string word = t.text;
    if (word == "true" || word == "false") {
      next();
      return make_const(word == "true");
    }
    if (word == "topic" || word == "kind" || word == "sender" || word == "receiver") {
      next();
      expect("(");
      const Token& s = peek();
      if (s.kind != Tok::String) syntax_error(s.line, s.col, "expected a string");
      AtomSpec a;
      a.kind = word == "topic" ? AtomKind::Topic
               : word == "kind" ? AtomKind::Kind
               : word == "sender" ? AtomKind::Sender
                                  : AtomKind::Receiver;
      a.arg = s.value.get<std::string>();
      next();
      expect(")");
      return make_atom(std::move(a));
    }
    if (word == "believes" || word == "action") {
      next();
      expect("(");
      AtomSpec a;
      a.kind = word == "believes" ? AtomKind::Believes : AtomKind::Action;
      a.arg = term();
      expect(")");
      return make_atom(std::move(a));
    }
    if (word == "sequence") {
      next();
      expect("(");
      std::vector<Formula> steps{formula()};
      while (is_sym(",")) {
        next();
        steps.push_back(formula());
      }
      expect(")");
      if (steps.size() < 2) syntax_error(t.line, t.col, "sequence needs at least two steps");
      std::vector<Formula> links;
      for (std::size_t i = 0; i + 1 < steps.size(); ++i) {
        links.push_back(make_node(Op::Precedes, {steps[i], steps[i + 1]}));
      }
      return links.size() == 1 ? links[0] : make_node(Op::And, std::move(links));
    }
    if (word == "payload" || word == "world") {
      next();
      AtomSpec a;
      a.kind = word == "payload" ? AtomKind::Payload : AtomKind::World;
      const auto& known = word == "payload" ? known_payload_fields() : known_world_fields();
      if (!is_sym(".")) syntax_error(peek().line, peek().col, "expected '.' after " + word);
      while (is_sym(".")) {
        next();
        const Token& f = peek();
        if (f.kind == Tok::Ident) {
          if (known.count(f.text) == 0) {
            throw Error("UnknownField", std::to_string(f.line) + ":" + std::to_string(f.col) + ": " +
                                            word + " has no field '" + f.text + "'");
          }
        } else if (!(f.kind == Tok::Number && f.value.is_number_integer() && f.value.get<std::int64_t>() >= 0)) {
          syntax_error(f.line, f.col, "expected a field name");
        }
        a.path.push_back(f.text);
        next();
      }
      const Token& op = peek();
      static const std::vector<std::pair<std::string, CmpOp>> kOps{
          {"==", CmpOp::Eq}, {"!=", CmpOp::Ne}, {"<=", CmpOp::Le},
          {">=", CmpOp::Ge}, {"<", CmpOp::Lt},  {">", CmpOp::Gt}};
      bool matched = false;
      for (const auto& [s, o] : kOps) {
        if (is_sym(s)) {
          a.cmp = o;
          matched = true;
          break;
        }
      }
      if (!matched) syntax_error(op.line, op.col, "expected a comparison operator");
      next();
      const Token& lit = peek();
      if (lit.kind == Tok::Number || lit.kind == Tok::String) {
        a.literal = lit.value;
      } else if (lit.kind == Tok::Ident && (lit.text == "true" || lit.text == "false")) {
        a.literal = lit.text == "true";
      } else if (lit.kind == Tok::Ident && lit.text == "null") {
        a.literal = nullptr;
      } else {
        syntax_error(lit.line, lit.col, "expected a literal");
      }
      next();
      return make_atom(std::move(a));
    }
    syntax_error(t.line, t.col, "unknown predicate '" + word + "'");
  }

  // Ground term: name or number, optionally applied to argument terms.
  std::string term() {
    const Token& t = peek();
    if (t.kind != Tok::Ident && t.kind != Tok::Number) syntax_error(t.line, t.col, "expected a term");
    std::string s = t.text;
    next();
    if (is_sym("(")) {
      next();
      s += "(" + term();
      while (is_sym(",")) {
        next();
        s += "," + term();
      }
      expect(")");
      s += ")";
    }
    return s;
  }

  std::vector<Token> toks_;
  std::size_t pos_{0};
};

}  // namespace

Formula parse_formula(std::string_view source) { return Parser(lex(source)).whole(); }

std::vector<PropertySpec> parse_properties(std::string_view source) {
  return Parser(lex(source)).file();
}

std::vector<PropertySpec> load_properties(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw Error("ConfigError", "cannot read property file " + path);
  std::stringstream ss;
  ss << in.rdbuf();
  return parse_properties(ss.str());
}

const std::set<std::string>& known_payload_fields() {
  static const std::set<std::string> kFields{
      "action", "at",     "cmd",    "counter", "dir",    "distance", "done",  "effector",
      "env",    "id",     "joints", "kind",    "module", "origin",   "posture", "rad",
      "ready",  "request", "speed", "speeds",  "status", "stopped",  "target", "total",
      "wind",   "wp",     "x",      "y"};
  return kFields;
}

const std::set<std::string>& known_world_fields() {
  static const std::set<std::string> kFields{"x", "y", "at", "env", "wind", "rad", "arm", "mast"};
  return kFields;
}

std::string action_term(const Json& p) {
  if (!p.is_object() || !p.contains("action")) return {};
  const auto name = p.value("action", std::string());
  std::string args;
  if (name == "control_wheels") {
    args = p.value("dir", std::string()) + "," + std::to_string(p.value("speed", 0)) + "," +
           std::to_string(p.value("distance", 0));
  } else if (name == "move_to_waypoint") {
    args = p.value("wp", std::string());
  } else {
    args = p.value("cmd", std::string());
  }
  return name + "(" + args + ")";
}

// ---------------------------------------------------------------------------
// Semantics

void EvalContext::observe(const Json& event) {
  const auto it = event.find("kind");
  if (it == event.end() || !it->is_string()) return;
  if (*it == "beliefs") {
    beliefs.clear();
    for (const auto& b : event.at("beliefs")) beliefs.insert(b.get<std::string>());
  } else if (*it == "world") {
    world = event.at("world");
  }
}

namespace {

const Json* lookup(const Json& root, const std::vector<std::string>& path) {
  const Json* cur = &root;
  for (const auto& key : path) {
    if (cur->is_object()) {
      const auto it = cur->find(key);
      if (it == cur->end()) return nullptr;
      cur = &*it;
    } else if (cur->is_array() && !key.empty() && std::isdigit(static_cast<unsigned char>(key[0]))) {
      const auto idx = std::stoul(key);
      if (idx >= cur->size()) return nullptr;
      cur = &(*cur)[idx];
    } else {
      return nullptr;
    }
  }
  return cur;
}

template <typename T>
bool compare(const T& a, const T& b, CmpOp op) {
  switch (op) {
    case CmpOp::Eq: return a == b;
    case CmpOp::Ne: return !(a == b);
    case CmpOp::Lt: return a < b;
    case CmpOp::Le: return a < b || a == b;
    case CmpOp::Gt: return b < a;
    case CmpOp::Ge: return b < a || a == b;
  }
  return false;
}

bool compare_json(const Json& v, const Json& lit, CmpOp op) {
  if (v.is_number() && lit.is_number()) return compare(v.get<double>(), lit.get<double>(), op);
  if (v.is_string() && lit.is_string()) return compare(v.get<std::string>(), lit.get<std::string>(), op);
  if (v.is_boolean() && lit.is_boolean() && (op == CmpOp::Eq || op == CmpOp::Ne)) {
    return compare(v.get<bool>(), lit.get<bool>(), op);
  }
  if (lit.is_null() && (op == CmpOp::Eq || op == CmpOp::Ne)) return (v.is_null()) == (op == CmpOp::Eq);
  return false;  // type mismatch never holds
}

bool field_is(const Json& event, const char* key, const std::string& want) {
  const auto it = event.find(key);
  return it != event.end() && it->is_string() && it->get_ref<const std::string&>() == want;
}

Formula mk_not(const Formula& f) {
  if (f->op == Op::True) return const_false();
  if (f->op == Op::False) return const_true();
  if (f->op == Op::Not) return f->kids[0];
  return make_node(Op::Not, {f});
}

Formula mk_nary(Op op, std::vector<Formula> parts) {
  const Op unit = op == Op::And ? Op::True : Op::False;
  const Op zero = op == Op::And ? Op::False : Op::True;
  std::vector<Formula> flat;
  for (auto& p : parts) {
    if (p->op == zero) return p;
    if (p->op == unit) continue;
    if (p->op == op) {
      flat.insert(flat.end(), p->kids.begin(), p->kids.end());
    } else {
      flat.push_back(std::move(p));
    }
  }
  std::sort(flat.begin(), flat.end(), [](const Formula& a, const Formula& b) { return a->text < b->text; });
  flat.erase(std::unique(flat.begin(), flat.end(), [](const Formula& a, const Formula& b) { return a->text == b->text; }),
             flat.end());
  if (flat.empty()) return make_const(op == Op::And);
  if (flat.size() == 1) return flat[0];
  return make_node(op, std::move(flat));
}

Tick event_tick(const Json& e) {
  const auto it = e.find("t");
  return it != e.end() && it->is_number_integer() ? it->get<Tick>() : 0;
}

}  // namespace

bool eval_atom(const AtomSpec& a, const Json& e, const EvalContext& ctx) {
  switch (a.kind) {
    case AtomKind::Topic: return field_is(e, "topic", a.arg);
    case AtomKind::Kind: return field_is(e, "kind", a.arg);
    case AtomKind::Sender: return field_is(e, "sender", a.arg);
    case AtomKind::Receiver: return field_is(e, "receiver", a.arg);
    case AtomKind::Believes: return ctx.beliefs.count(a.arg) != 0;
    case AtomKind::Action: {
      if (!field_is(e, "kind", "publish") || !field_is(e, "topic", "/agent/action")) return false;
      const auto it = e.find("payload");
      return it != e.end() && action_term(*it) == a.arg;
    }
    case AtomKind::Payload: {
      const auto it = e.find("payload");
      if (it == e.end()) return false;
      const Json* v = lookup(*it, a.path);
      return v != nullptr && compare_json(*v, a.literal, a.cmp);
    }
    case AtomKind::World: {
      const Json* v = lookup(ctx.world, a.path);
      return v != nullptr && compare_json(*v, a.literal, a.cmp);
    }
  }
  return false;
}

Formula progress(const Formula& f, const Json& e, const EvalContext& ctx) {
  switch (f->op) {
    case Op::True:
    case Op::False: return f;
    case Op::Atom: return make_const(eval_atom(f->atom, e, ctx));
    case Op::Not: return mk_not(progress(f->kids[0], e, ctx));
    case Op::And:
    case Op::Or: {
      std::vector<Formula> parts;
      parts.reserve(f->kids.size());
      for (const auto& k : f->kids) parts.push_back(progress(k, e, ctx));
      return mk_nary(f->op, std::move(parts));
    }
    case Op::Implies:
      return mk_nary(Op::Or, {mk_not(progress(f->kids[0], e, ctx)), progress(f->kids[1], e, ctx)});
    case Op::Always: return mk_nary(Op::And, {progress(f->kids[0], e, ctx), f});
    case Op::Never: return mk_nary(Op::And, {mk_not(progress(f->kids[0], e, ctx)), f});
    case Op::Eventually: return mk_nary(Op::Or, {progress(f->kids[0], e, ctx), f});
    case Op::Within: {
      const Tick now = event_tick(e);
      return progress(make_node(Op::By, {f->kids[0]}, f->bound, now + f->bound), e, ctx);
    }
    case Op::By:
      if (event_tick(e) > f->deadline) return const_false();
      return mk_nary(Op::Or, {progress(f->kids[0], e, ctx), f});
    case Op::Until:
      return mk_nary(Op::Or, {progress(f->kids[1], e, ctx),
                              mk_nary(Op::And, {progress(f->kids[0], e, ctx), f})});
    case Op::Precedes:
      return mk_nary(Op::Or, {progress(f->kids[0], e, ctx),
                              mk_nary(Op::And, {mk_not(progress(f->kids[1], e, ctx)), f})});
  }
  return f;
}

std::string blame(const Formula& f, const Json& e, const EvalContext& ctx) {
  switch (f->op) {
    case Op::And:
      for (const auto& k : f->kids) {
        if (progress(k, e, ctx)->op == Op::False) return blame(k, e, ctx);
      }
      return f->text;
    case Op::Always: return blame(f->kids[0], e, ctx);
    case Op::Never: return f->kids[0]->text;
    case Op::Implies: return blame(f->kids[1], e, ctx);
    case Op::By: return "eventually[<=" + std::to_string(f->bound) + "] " + f->kids[0]->text;
    default: return f->text;
  }
}

std::string_view to_string(VerdictStatus s) {
  switch (s) {
    case VerdictStatus::Satisfied: return "Satisfied";
    case VerdictStatus::Violated: return "Violated";
    case VerdictStatus::Undetermined: return "Undetermined";
  }
  return "Undetermined";
}

VerdictStatus finalize(const Formula& f) {
  using V = VerdictStatus;
  switch (f->op) {
    case Op::True: return V::Satisfied;
    case Op::False: return V::Violated;
    case Op::Always:
    case Op::Never:
    case Op::Precedes: return V::Satisfied;
    case Op::Not: {
      const auto v = finalize(f->kids[0]);
      return v == V::Satisfied ? V::Violated : v == V::Violated ? V::Satisfied : V::Undetermined;
    }
    case Op::And: {
      V out = V::Satisfied;
      for (const auto& k : f->kids) {
        const auto v = finalize(k);
        if (v == V::Violated) return V::Violated;
        if (v == V::Undetermined) out = V::Undetermined;
      }
      return out;
    }
    case Op::Or: {
      V out = V::Violated;
      for (const auto& k : f->kids) {
        const auto v = finalize(k);
        if (v == V::Satisfied) return V::Satisfied;
        if (v == V::Undetermined) out = V::Undetermined;
      }
      return out;
    }
    case Op::Implies:
      return finalize(mk_nary(Op::Or, {mk_not(f->kids[0]), f->kids[1]}));
    default: return V::Undetermined;
  }
}

std::string relative_text(const Formula& f, Tick now) {
  if (!f->has_deadline) return f->text;
  if (f->op == Op::By) {
    return "eventually[@+" + std::to_string(f->deadline - now) + "] " + relative_text(f->kids[0], now);
  }
  std::vector<std::string> parts;
  for (const auto& k : f->kids) parts.push_back(relative_text(k, now));
  std::string sep;
  switch (f->op) {
    case Op::Not: return "!" + parts[0];
    case Op::Always: return "always " + parts[0];
    case Op::Never: return "never " + parts[0];
    case Op::Eventually: return "eventually " + parts[0];
    case Op::Within: return "eventually[<=" + std::to_string(f->bound) + "] " + parts[0];
    case Op::And: sep = " && "; break;
    case Op::Or: sep = " || "; break;
    case Op::Implies: sep = " => "; break;
    case Op::Until: sep = " until "; break;
    case Op::Precedes: sep = " precedes "; break;
    default: return f->text;
  }
  // And/Or kids were sorted by absolute text; re-sort so the key is shift invariant.
  if (f->op == Op::And || f->op == Op::Or) std::sort(parts.begin(), parts.end());
  std::string s = "(";
  for (std::size_t i = 0; i < parts.size(); ++i) s += (i ? sep : "") + parts[i];
  return s + ")";
}

Json Verdict::to_json() const {
  Json v = Json::array();
  for (const auto& x : violations) {
    v.push_back({{"index", x.index}, {"t", x.t}, {"seq", x.seq}, {"subformula", x.subformula}});
  }
  return {{"status", rover::to_string(status)}, {"violations", std::move(v)}};
}

std::optional<Violation> Progression::step(const Json& event, std::size_t index) {
  ctx_.observe(event);
  seen_ = true;
  if (satisfied_) return std::nullopt;
  Formula next = progress(residual_, event, ctx_);
  if (next->op == Op::False) {
    Violation v{index, event_tick(event), event.value("seq", std::int64_t{-1}), blame(residual_, event, ctx_)};
    violations_.push_back(v);
    residual_ = original_;
    return v;
  }
  residual_ = std::move(next);
  satisfied_ = residual_->op == Op::True;
  return std::nullopt;
}

Verdict Progression::verdict() const {
  Verdict v;
  v.violations = violations_;
  if (!violations_.empty()) {
    v.status = VerdictStatus::Violated;
  } else if (satisfied_) {
    v.status = VerdictStatus::Satisfied;
  } else if (!seen_) {
    v.status = VerdictStatus::Undetermined;
  } else {
    v.status = finalize(residual_);
  }
  return v;
}

Verdict evaluate(const PropertySpec& spec, const std::vector<Json>& trace) {
  Progression p(spec.formula);
  for (std::size_t i = 0; i < trace.size(); ++i) {
    if (field_is(trace[i], "kind", "verdict")) continue;
    p.step(trace[i], i);
  }
  return p.verdict();
}

bool contains(const Formula& f, Op op) {
  if (f->op == op) return true;
  return std::any_of(f->kids.begin(), f->kids.end(), [&](const Formula& k) { return contains(k, op); });
}

bool has_atom(const Formula& f, AtomKind kind) {
  if (f->op == Op::Atom) return f->atom.kind == kind;
  return std::any_of(f->kids.begin(), f->kids.end(), [&](const Formula& k) { return has_atom(k, kind); });
}

bool runtime_legal(const Formula& f) { return !contains(f, Op::Eventually) && !contains(f, Op::Until); }

std::set<std::string> topics_of(const Formula& f) {
  std::set<std::string> out;
  if (f->op == Op::Atom && f->atom.kind == AtomKind::Topic) out.insert(f->atom.arg);
  for (const auto& k : f->kids) {
    auto sub = topics_of(k);
    out.insert(sub.begin(), sub.end());
  }
  return out;
}

}  // namespace rover
