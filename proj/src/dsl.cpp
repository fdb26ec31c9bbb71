#include "chasemith/dsl.hpp"

#include <algorithm>
#include <map>
#include <set>
#include <sstream>

namespace chasemith {

ParseError::ParseError(std::size_t l, std::size_t c, const std::string& msg)
    : Error(std::to_string(l) + ":" + std::to_string(c) + ": " + msg), line(l), col(c) {}

const Procedure& Workspace::procedure(const std::string& name) const {
  for (const auto& p : catalog)
    if (p.name == name) return p;
  throw Error("unknown procedure " + name);
}

const NamedGoal& Workspace::goal(const std::string& name) const {
  for (const auto& g : goals)
    if (g.name == name) return g;
  throw Error("unknown goal " + name);
}

namespace {

enum class Kind { Ident, Number, String, Punct, End };

struct Token {
  Kind kind = Kind::End;
  std::string text;
  std::size_t line = 1;
  std::size_t col = 1;
};

bool ident_start(char c) { return std::isalpha(static_cast<unsigned char>(c)) || c == '_'; }
bool ident_char(char c) { return std::isalnum(static_cast<unsigned char>(c)) || c == '_'; }
bool digit(char c) { return c >= '0' && c <= '9'; }

std::vector<Token> lex(const std::string& s) {
  std::vector<Token> out;
  std::size_t k = 0, line = 1, col = 1;
  auto advance = [&](std::size_t n) {
    for (std::size_t j = 0; j < n; ++j, ++k) {
      if (s[k] == '\n') {
        ++line;
        col = 1;
      } else {
        ++col;
      }
    }
  };
  while (k < s.size()) {
    char c = s[k];
    if (c == '#') {
      while (k < s.size() && s[k] != '\n') advance(1);
      continue;
    }
    if (std::isspace(static_cast<unsigned char>(c))) {
      advance(1);
      continue;
    }
    Token t;
    t.line = line;
    t.col = col;
    if (ident_start(c)) {
      std::size_t e = k;
      while (e < s.size() && ident_char(s[e])) ++e;
      t.kind = Kind::Ident;
      t.text = s.substr(k, e - k);
      advance(e - k);
    } else if (digit(c) || (c == '-' && k + 1 < s.size() && digit(s[k + 1]))) {
      std::size_t e = k + 1;
      while (e < s.size() && digit(s[e])) ++e;
      if (e + 1 < s.size() && s[e] == '.' && digit(s[e + 1])) {
        ++e;
        while (e < s.size() && digit(s[e])) ++e;
      }
      t.kind = Kind::Number;
      t.text = s.substr(k, e - k);
      advance(e - k);
    } else if (c == '"') {
      std::size_t e = k + 1;
      std::string text;
      while (e < s.size() && s[e] != '"') {
        if (s[e] == '\\' && e + 1 < s.size()) ++e;
        if (s[e] == '\n') throw ParseError(line, col, "unterminated string");
        text += s[e++];
      }
      if (e >= s.size()) throw ParseError(line, col, "unterminated string");
      t.kind = Kind::String;
      t.text = text;
      advance(e + 1 - k);
    } else if (c == '-' && k + 1 < s.size() && s[k + 1] == '>') {
      t.kind = Kind::Punct;
      t.text = "->";
      advance(2);
    } else if (std::string("{}()[],:.&=*;").find(c) != std::string::npos) {
      t.kind = Kind::Punct;
      t.text = std::string(1, c);
      advance(1);
    } else {
      throw ParseError(line, col, std::string("unexpected character '") + c + "'");
    }
    out.push_back(std::move(t));
  }
  Token end;
  end.line = line;
  end.col = col;
  out.push_back(end);
  return out;
}

struct Located {
  Atom atom;
  std::size_t line;
  std::size_t col;
};

class Parser {
 public:
  explicit Parser(const std::string& text) : toks_(lex(text)) {}

  Dependency single() {
    Dependency d = dependency();
    if (!at_end()) fail(peek(), "unexpected trailing input" + found());
    return d;
  }

  Workspace run() {
    while (!at_end()) {
      const Token& t = peek();
      if (is_word("schema")) schema_block();
      else if (is_word("instance")) instance_block();
      else if (is_word("procedure")) procedure_block();
      else if (is_word("goal")) goal_block();
      else fail(t, "expected schema, instance, procedure or goal block");
    }
    validate();
    return std::move(w_);
  }

 private:
  std::vector<Token> toks_;
  std::size_t pos_ = 0;
  Workspace w_;
  std::vector<Located> facts_;
  std::vector<Located> atoms_;

  [[noreturn]] void fail(const Token& t, const std::string& msg) { throw ParseError(t.line, t.col, msg); }

  const Token& peek(std::size_t ahead = 0) const { return toks_[std::min(pos_ + ahead, toks_.size() - 1)]; }
  bool at_end() const { return peek().kind == Kind::End; }
  bool is_punct(const std::string& p, std::size_t ahead = 0) const {
    return peek(ahead).kind == Kind::Punct && peek(ahead).text == p;
  }
  bool is_word(const std::string& w, std::size_t ahead = 0) const {
    return peek(ahead).kind == Kind::Ident && peek(ahead).text == w;
  }
  const Token& next() { return toks_[pos_ < toks_.size() - 1 ? pos_++ : pos_]; }

  void expect(const std::string& p) {
    if (!is_punct(p)) fail(peek(), "expected '" + p + "'" + found());
    next();
  }
  void expect_word(const std::string& w) {
    if (!is_word(w)) fail(peek(), "expected '" + w + "'" + found());
    next();
  }
  std::string found() const {
    if (at_end()) return " but reached end of input";
    return " but found '" + peek().text + "'";
  }
  std::string ident(const std::string& what) {
    if (peek().kind != Kind::Ident) fail(peek(), "expected " + what + found());
    return next().text;
  }
  bool skip(const std::string& p) {
    if (!is_punct(p)) return false;
    next();
    return true;
  }

  void schema_block() {
    next();
    expect("{");
    while (!skip("}")) {
      expect_word("relation");
      const Token& at = peek();
      std::string r = ident("relation name");
      if (w_.schema.has(r)) fail(at, "duplicate relation " + r);
      expect("(");
      std::vector<AttrName> attrs;
      std::set<AttrName> seen;
      while (!skip(")")) {
        const Token& a = peek();
        attrs.push_back(ident("attribute name"));
        if (!seen.insert(attrs.back()).second) fail(a, "duplicate attribute " + attrs.back());
        if (!is_punct(")")) expect(",");
      }
      w_.schema.define(r, attrs);
      skip(";");
    }
  }

  void instance_block() {
    next();
    expect("{");
    while (!skip("}")) {
      Token at = peek();
      Atom a = parse_atom();
      facts_.push_back({a, at.line, at.col});
      skip(";");
    }
  }

  Term term() {
    const Token& t = peek();
    if (t.kind == Kind::Number || t.kind == Kind::String) return Term::constant(val(next().text));
    if (t.kind == Kind::Ident) {
      if (!std::islower(static_cast<unsigned char>(t.text[0])))
        fail(t, "constant '" + t.text + "' must be quoted or numeric; variables start lowercase");
      return var(next().text);
    }
    fail(t, "expected a term" + found());
  }

  Atom parse_atom() {
    const Token& at = peek();
    std::string r = ident("relation name");
    expect("(");
    std::vector<std::pair<AttrName, Term>> args;
    std::set<AttrName> seen;
    while (!skip(")")) {
      const Token& a = peek();
      std::string name = ident("attribute name");
      if (!seen.insert(name).second) fail(a, "attribute " + name + " bound twice");
      expect(":");
      args.push_back({name, term()});
      if (!is_punct(")")) expect(",");
    }
    Atom out = atom(r, args);
    atoms_.push_back({out, at.line, at.col});
    return out;
  }

  std::vector<Atom> atoms() {
    std::vector<Atom> out{parse_atom()};
    while (is_punct("&") || (is_punct(",") && peek(1).kind == Kind::Ident && is_punct("(", 2))) {
      next();
      out.push_back(parse_atom());
    }
    return out;
  }

  // Optional "exists v1, v2." prefix.
  std::vector<std::string> exists_prefix() {
    std::vector<std::string> vs;
    if (!is_word("exists")) return vs;
    next();
    do {
      const Token& t = peek();
      vs.push_back(ident("variable"));
      if (!std::islower(static_cast<unsigned char>(vs.back()[0]))) fail(t, "variables start lowercase");
    } while (skip(","));
    expect(".");
    return vs;
  }

  ConjunctiveQuery cq() {
    const Token& at = peek();
    auto ex = exists_prefix();
    auto body = atoms();
    auto vs = vars_of(body);
    ConjunctiveQuery q;
    q.atoms = body;
    for (const auto& e : ex)
      if (std::find(vs.begin(), vs.end(), e) == vs.end()) fail(at, "quantified variable " + e + " does not occur");
    q.existential_vars = ex;
    for (const auto& v : vs)
      if (std::find(ex.begin(), ex.end(), v) == ex.end()) q.free_vars.push_back(v);
    return q;
  }

  Tgd tgd() {
    const Token& at = peek();
    Tgd t;
    t.premise = atoms();
    expect("->");
    auto ex = exists_prefix();
    t.conclusion = atoms();
    auto pv = t.premise_vars();
    for (const auto& e : ex)
      if (std::find(pv.begin(), pv.end(), e) != pv.end()) fail(at, "existential variable " + e + " occurs in the premise");
    for (const auto& v : vars_of(t.conclusion))
      if (std::find(pv.begin(), pv.end(), v) == pv.end() && std::find(ex.begin(), ex.end(), v) == ex.end())
        fail(at, "conclusion variable " + v + " is neither in the premise nor quantified");
    auto real = t.existentials();
    for (const auto& e : ex)
      if (std::find(real.begin(), real.end(), e) == real.end()) fail(at, "quantified variable " + e + " does not occur");
    return t;
  }

  Egd egd() {
    const Token& at = peek();
    Egd e;
    e.premise = atoms();
    expect("->");
    e.lhs = ident("variable");
    expect("=");
    e.rhs = ident("variable");
    auto vs = vars_of(e.premise);
    for (const auto& v : {e.lhs, e.rhs})
      if (std::find(vs.begin(), vs.end(), v) == vs.end()) fail(at, "egd variable " + v + " is not in the premise");
    return e;
  }

  StructureConstraint structure_constraint() {
    const Token& at = peek();
    std::string r = ident("relation name");
    expect("[");
    if (skip("*")) {
      expect("]");
      return star(r);
    }
    std::vector<AttrName> attrs;
    while (!skip("]")) {
      attrs.push_back(ident("attribute name"));
      if (!is_punct("]")) expect(",");
    }
    if (attrs.empty()) fail(at, "structure constraint on " + r + " needs attributes or *");
    return structure(r, attrs);
  }

  Dependency dependency() {
    if (is_word("tgd") && is_punct(":", 1)) {
      next();
      next();
      return tgd();
    }
    if (is_word("egd") && is_punct(":", 1)) {
      next();
      next();
      return egd();
    }
    if (peek().kind == Kind::Ident && is_punct("[", 1)) return structure_constraint();
    fail(peek(), "expected 'tgd:', 'egd:' or a structure constraint" + found());
  }

  void procedure_block() {
    next();
    const Token& at = peek();
    Procedure p;
    p.name = ident("procedure name");
    for (const auto& q : w_.catalog)
      if (q.name == p.name) fail(at, "duplicate procedure " + p.name);
    expect("{");
    std::set<std::string> done;
    while (!skip("}")) {
      const Token& sec = peek();
      std::string s = ident("section name");
      if (s != "scope" && s != "pre" && s != "post" && s != "preserve")
        fail(sec, "unknown section " + s + "; expected scope, pre, post or preserve");
      if (!done.insert(s).second) fail(sec, "duplicate section " + s);
      expect("{");
      while (!skip("}")) {
        if (s == "scope") p.scope.push_back(structure_constraint());
        else if (s == "pre") p.pre.push_back(dependency());
        else if (s == "post") p.post.push_back(dependency());
        else if (is_word("total") && peek(1).kind == Kind::Ident && !is_punct("(", 2)) {
          next();
          p.preserve.push_back(TotalQuery{ident("relation name")});
        } else {
          p.preserve.push_back(cq());
        }
        skip(";");
      }
    }
    w_.catalog.push_back(std::move(p));
  }

  void goal_block() {
    next();
    const Token& at = peek();
    NamedGoal g;
    g.name = ident("goal name");
    for (const auto& h : w_.goals)
      if (h.name == g.name) fail(at, "duplicate goal " + g.name);
    expect("{");
    const Token& kind = peek();
    std::string k = ident("goal kind");
    expect(":");
    if (k == "tgd") g.goal.goal = tgd();
    else if (k == "egd") g.goal.goal = egd();
    else if (k == "query") g.goal.goal = cq();
    else fail(kind, "unknown goal kind " + k + "; expected tgd, egd or query");
    skip(";");
    expect("}");
    w_.goals.push_back(std::move(g));
  }

  void validate() {
    std::map<RelName, std::set<AttrName>> known;
    std::set<RelName> rels;
    for (const auto& [r, attrs] : w_.schema.relations()) {
      rels.insert(r);
      known[r].insert(attrs.begin(), attrs.end());
    }
    auto note = [&](const StructureConstraint& c) {
      rels.insert(c.rel);
      known[c.rel].insert(c.attrs.begin(), c.attrs.end());
    };
    for (const auto& p : w_.catalog) {
      for (const auto& c : p.scope) note(c);
      for (const auto* ds : {&p.pre, &p.post})
        for (const auto& d : *ds)
          if (const auto* c = std::get_if<StructureConstraint>(&d)) note(*c);
    }
    for (const auto& p : w_.catalog)
      for (const auto& q : p.preserve)
        if (const auto* t = std::get_if<TotalQuery>(&q); t && !rels.count(t->rel))
          throw Error("procedure " + p.name + ": unknown relation " + t->rel + " in total query");
    std::set<std::pair<std::size_t, std::size_t>> facts;
    w_.instance = Instance(w_.schema);
    for (const auto& f : facts_) {
      facts.insert({f.line, f.col});
      if (!w_.schema.has(f.atom.rel)) throw ParseError(f.line, f.col, "unknown relation " + f.atom.rel);
      if (f.atom.attrs() != w_.schema.attrs(f.atom.rel))
        throw ParseError(f.line, f.col, "fact must bind exactly the attributes of " + f.atom.rel);
      Tuple t;
      for (const auto& [a, term] : f.atom.args) {
        if (term.is_var) throw ParseError(f.line, f.col, "facts must be ground");
        t.push_back(term.value);
      }
      w_.instance.insert(f.atom.rel, t);
    }
    for (const auto& a : atoms_) {
      if (facts.count({a.line, a.col})) continue;
      if (!rels.count(a.atom.rel)) throw ParseError(a.line, a.col, "unknown relation " + a.atom.rel);
      for (const auto& [attr, _] : a.atom.args)
        if (!known[a.atom.rel].count(attr))
          throw ParseError(a.line, a.col, "unknown attribute " + attr + " of " + a.atom.rel);
    }
  }
};

std::string value_text(const Value& v) { return Term::constant(v).str(); }

}  // namespace

Workspace parse_spec(const std::string& text) { return Parser(text).run(); }

Dependency parse_dependency(const std::string& text) { return Parser(text).single(); }

std::string serialize(const Workspace& w) {
  std::ostringstream os;
  os << "schema {\n";
  for (const auto& [r, attrs] : w.schema.relations()) {
    os << "  relation " << r << "(";
    for (std::size_t k = 0; k < attrs.size(); ++k) os << (k ? ", " : "") << attrs[k];
    os << ")\n";
  }
  os << "}\n\ninstance {\n";
  for (const auto& [r, rows] : w.instance.data())
    for (const auto& t : rows) {
      const auto& attrs = w.instance.schema().attrs(r);
      os << "  " << r << "(";
      for (std::size_t k = 0; k < t.size(); ++k) os << (k ? ", " : "") << attrs[k] << ": " << value_text(t[k]);
      os << ")\n";
    }
  os << "}\n";
  auto section = [&](const std::string& name, const std::vector<std::string>& items) {
    os << "  " << name << " {";
    if (items.empty()) {
      os << "}\n";
      return;
    }
    os << "\n";
    for (const auto& s : items) os << "    " << s << "\n";
    os << "  }\n";
  };
  auto dep = [](const Dependency& d) {
    if (const auto* t = std::get_if<Tgd>(&d)) return "tgd: " + t->str();
    if (const auto* e = std::get_if<Egd>(&d)) return "egd: " + e->str();
    return std::get<StructureConstraint>(d).str();
  };
  for (const auto& p : w.catalog) {
    os << "\nprocedure " << p.name << " {\n";
    std::vector<std::string> items;
    for (const auto& c : p.scope) items.push_back(c.str());
    section("scope", items);
    items.clear();
    for (const auto& d : p.pre) items.push_back(dep(d));
    section("pre", items);
    items.clear();
    for (const auto& d : p.post) items.push_back(dep(d));
    section("post", items);
    items.clear();
    for (const auto& q : p.preserve) {
      if (const auto* t = std::get_if<TotalQuery>(&q)) items.push_back("total " + t->rel);
      else items.push_back(std::get<ConjunctiveQuery>(q).str());
    }
    section("preserve", items);
    os << "}\n";
  }
  for (const auto& g : w.goals) {
    os << "\ngoal " << g.name << " {\n  ";
    if (const auto* t = std::get_if<Tgd>(&g.goal.goal)) os << "tgd: " << t->str();
    else if (const auto* e = std::get_if<Egd>(&g.goal.goal)) os << "egd: " << e->str();
    else os << "query: " << std::get<ConjunctiveQuery>(g.goal.goal).str();
    os << "\n}\n";
  }
  return os.str();
}

}  // namespace chasemith
