#include "chasemith/cli.hpp"

#include <CLI11.hpp>

#include <cmath>
#include <cstdlib>
#include <fstream>
#include <optional>
#include <sstream>

#include "chasemith/dsl.hpp"
#include "chasemith/dynschema.hpp"
#include "chasemith/json_io.hpp"
#include "chasemith/oracle.hpp"

namespace chasemith {

namespace {

using nlohmann::json;

struct Budget {
  std::size_t gamma_cap = kDefaultGammaCap;
  std::size_t max_tuples = 1000000;
  std::size_t ucq = kDefaultUcqBudget;
  std::size_t oracle = kDefaultOracleBudget;
};

Budget budget_from_env() {
  Budget b;
  const char* env = std::getenv("CHASEMITH_BUDGET");
  if (!env || !*env) return b;
  char* end = nullptr;
  unsigned long long n = std::strtoull(env, &end, 10);
  if (*end != '\0' || n == 0) throw Error(std::string("CHASEMITH_BUDGET must be a positive integer, got ") + env);
  b.gamma_cap = b.max_tuples = b.ucq = b.oracle = static_cast<std::size_t>(n);
  return b;
}

Workspace load(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw Error("cannot read " + path);
  std::stringstream ss;
  ss << in.rdbuf();
  try {
    return parse_spec(ss.str());
  } catch (const ParseError& e) {
    throw Error(path + ":" + e.what());
  }
}

std::vector<Procedure> sequence(const Workspace& w, const std::vector<std::string>& names) {
  std::vector<Procedure> out;
  for (const auto& n : names) out.push_back(w.procedure(n));
  return out;
}

std::string tuple_text(const Tuple& t) {
  std::string out = "(";
  for (std::size_t k = 0; k < t.size(); ++k) out += (k ? ", " : "") + Term::constant(t[k]).str();
  return out + ")";
}

std::string flag_text(bool b) { return b ? "yes" : "no"; }

struct Common {
  std::string file;
  std::vector<std::string> seq;
  bool json = false;
  std::string semantics = "static";
};

Semantics semantics_of(const std::string& s) { return s == "dynamic" ? Semantics::Dynamic : Semantics::Static; }

int cmd_check(const Common& c, std::ostream& out) {
  auto w = load(c.file);
  json procs = json::array();
  for (const auto& p : w.catalog) {
    auto cls = classify(p);
    auto f = classify_tgd_set(post_tgds(p));
    procs.push_back({{"name", p.name},
                     {"safe_scope", cls.safe_scope},
                     {"safe_alteration", cls.safe_alteration},
                     {"forces_alteration", cls.forces_alteration},
                     {"post_full", f.full},
                     {"post_acyclic", f.acyclic},
                     {"post_weakly_acyclic", f.weakly_acyclic}});
  }
  json goals = json::array();
  for (const auto& g : w.goals) {
    std::string kind = std::holds_alternative<Tgd>(g.goal.goal)   ? "tgd"
                       : std::holds_alternative<Egd>(g.goal.goal) ? "egd"
                                                                  : "query";
    goals.push_back({{"name", g.name}, {"kind", kind}, {"text", g.goal.str()}});
  }
  if (c.json) {
    out << render({{"relations", w.schema.size()},
                   {"tuples", w.instance.tuple_count()},
                   {"procedures", procs},
                   {"goals", goals}});
    return kExitYes;
  }
  out << "OK " << w.schema.size() << " relations, " << w.instance.tuple_count() << " tuples, " << w.catalog.size()
      << " procedures, " << w.goals.size() << " goals\n";
  for (const auto& p : procs)
    out << "procedure " << p["name"].get<std::string>() << ": safe-scope " << flag_text(p["safe_scope"])
        << ", safe-alteration " << flag_text(p["safe_alteration"]) << ", post full " << flag_text(p["post_full"])
        << ", post acyclic " << flag_text(p["post_acyclic"]) << "\n";
  for (const auto& g : goals)
    out << "goal " << g["name"].get<std::string>() << " (" << g["kind"].get<std::string>() << "): "
        << g["text"].get<std::string>() << "\n";
  return kExitYes;
}

int yes_no(bool b, std::ostream& out, bool as_json, json extra = json::object()) {
  if (as_json) {
    extra["answer"] = b;
    out << render(extra);
  } else {
    out << (b ? "YES" : "NO") << "\n";
  }
  return b ? kExitYes : kExitNo;
}

int cmd_applicability(const Common& c, bool dynamic, std::ostream& out) {
  auto w = load(c.file);
  auto ps = sequence(w, c.seq);
  if (dynamic) {
    auto f = applicability_dyn(ps, w.schema);
    if (!c.json)
      for (const auto& line : f.trace) out << line << "\n";
    return yes_no(f.ok, out, c.json, {{"trace", f.trace}});
  }
  auto r = check_applicability_sequence(ps, w.schema);
  if (!r.supported) throw Unsupported(r.trace.empty() ? "sequence outside the decidable class" : r.trace.back());
  if (!c.json)
    for (const auto& line : r.trace) out << line << "\n";
  return yes_no(r.answer, out, c.json, {{"trace", r.trace}});
}

int cmd_nonempty(const Common& c, std::ostream& out) {
  auto w = load(c.file);
  return yes_no(dyn_nonempty(w.instance, sequence(w, c.seq)), out, c.json);
}

int cmd_apply(const Common& c, const Budget& b, std::ostream& out) {
  auto w = load(c.file);
  auto ps = sequence(w, c.seq);
  if (semantics_of(c.semantics) == Semantics::Static) {
    out << render({{"skb", skb_json(outcomes_skb(w.instance, ps, nullptr, b.gamma_cap))}});
    return kExitYes;
  }
  auto r = outcomes_condtab(w.instance, ps, b.max_tuples);
  if (r.status == CondStatus::EmptyOutcome) {
    out << render({{"empty", true}, {"diagnostic", r.diagnostic}});
    return kExitNo;
  }
  out << render({{"empty", false}, {"table", table_json(r.table)}});
  return kExitYes;
}

ScopedKnowledgeBase load_skb(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw Error("cannot read " + path);
  try {
    return skb_from_json(json::parse(in));
  } catch (const json::exception& e) {
    throw Error(path + ": " + e.what());
  }
}

int cmd_entails(const Common& c, const std::string& goal, const std::string& skb, const Budget& b, std::ostream& out) {
  auto w = load(c.file);
  const auto& g = w.goal(goal).goal;
  auto k = skb.empty() ? outcomes_skb(w.instance, sequence(w, c.seq), nullptr, b.gamma_cap) : load_skb(skb);
  EntailResult r;
  if (const auto* t = std::get_if<Tgd>(&g.goal)) r = skb_satisfies_tgd_general(k, *t, b.ucq);
  else if (const auto* e = std::get_if<Egd>(&g.goal)) r = skb_satisfies_egd(k, *e);
  else throw Error("goal " + goal + " is a query; entails needs a tgd or egd");
  if (c.json) {
    out << render(entail_json(r));
  } else {
    out << (r.holds ? "YES" : "NO") << "\n";
    if (!r.note.empty()) out << "note: " << r.note << "\n";
  }
  return r.holds ? kExitYes : kExitNo;
}

const ConjunctiveQuery& query_goal(const Workspace& w, const std::string& name) {
  const auto* q = std::get_if<ConjunctiveQuery>(&w.goal(name).goal.goal);
  if (!q) throw Error("goal " + name + " is not a query");
  return *q;
}

int cmd_certain(const Common& c, const std::string& query, const Budget& b, std::ostream& out) {
  auto w = load(c.file);
  const auto& q = query_goal(w, query);
  auto ps = sequence(w, c.seq);
  if (semantics_of(c.semantics) == Semantics::Dynamic) {
    if (!q.is_boolean()) throw Unsupported("dynamic certain answers are decided for boolean queries only");
    auto r = outcomes_condtab(w.instance, ps, b.max_tuples);
    if (r.status == CondStatus::EmptyOutcome)
      return yes_no(true, out, c.json, {{"vacuous", true}, {"diagnostic", r.diagnostic}});
    return yes_no(certain_boolean(r.table, q), out, c.json);
  }
  auto k = outcomes_skb(w.instance, ps, nullptr, b.gamma_cap);
  if (q.is_boolean()) return yes_no(certain_boolean(k, q), out, c.json);
  auto ans = certain_answers(k, q);
  if (c.json) {
    json rows = json::array();
    for (const auto& t : ans) {
      json row = json::array();
      for (const auto& v : t) row.push_back(value_json(v));
      rows.push_back(row);
    }
    out << render({{"free_vars", q.free_vars}, {"answers", rows}});
  } else {
    for (const auto& t : ans) out << tuple_text(t) << "\n";
  }
  return kExitYes;
}

struct ReadyFlags {
  std::string goal;
  std::string goal_file;
  std::size_t max_len = 0;
  unsigned threads = 1;
  std::vector<std::string> catalog;
  bool prove_bound = false;
};

int cmd_ready(const Common& c, const ReadyFlags& f, const Budget& b, std::ostream& out) {
  auto w = load(c.file);
  ReadinessGoal goal;
  if (!f.goal_file.empty()) {
    auto gw = load(f.goal_file);
    if (gw.goals.empty()) throw Error(f.goal_file + " declares no goal");
    goal = f.goal.empty() ? gw.goals.front().goal : gw.goal(f.goal).goal;
  } else {
    if (f.goal.empty()) throw Error("ready needs --goal or --goal-file");
    goal = w.goal(f.goal).goal;
  }
  auto cat = f.catalog.empty() ? w.catalog : sequence(w, f.catalog);
  auto mode = semantics_of(c.semantics);
  if (f.prove_bound) {
    double lb = proven_bound_log2(w.instance, cat, goal, mode);
    if (lb >= 63 || static_cast<double>(f.max_len) < std::exp2(lb)) {
      std::ostringstream msg;
      msg << "max-len " << f.max_len << " is below the proven sequence bound 2^" << lb;
      throw Error(msg.str());
    }
  }
  ReadinessOptions opts;
  opts.max_len = f.max_len;
  opts.threads = f.threads;
  opts.gamma_cap = b.gamma_cap;
  opts.max_tuples = b.max_tuples;
  auto a = ready(w.instance, cat, goal, mode, opts);
  if (c.json) {
    out << render(answer_json(a));
  } else {
    switch (a.status) {
      case ReadinessStatus::Witness: {
        out << "WITNESS";
        for (const auto& n : a.witness) out << " " << n;
        out << "\n";
        break;
      }
      case ReadinessStatus::NoWithinBound: out << "NO-WITHIN-BOUND " << a.bound << "\n"; break;
      case ReadinessStatus::Unsupported: out << "UNSUPPORTED " << a.reason << "\n"; break;
    }
    if (!a.reason.empty() && a.status == ReadinessStatus::NoWithinBound) out << "note: " << a.reason << "\n";
    out << "nodes " << a.stats.nodes << ", dedup hits " << a.stats.dedup_hits << "\n";
  }
  switch (a.status) {
    case ReadinessStatus::Witness: return kExitYes;
    case ReadinessStatus::NoWithinBound: return kExitNoWithinBound;
    case ReadinessStatus::Unsupported: return kExitUnsupported;
  }
  return kExitUnsupported;
}

struct OracleFlags {
  std::string what;
  std::string goal;
  std::size_t fresh = 0;
  std::size_t extra_tuples = 1;
  std::size_t extra_attrs = 0;
  std::size_t extra_rels = 0;
};

int cmd_oracle(const Common& c, const OracleFlags& f, const Budget& b, std::ostream& out) {
  auto w = load(c.file);
  auto u = universe_for(w.instance, f.fresh);
  u.max_extra_tuples = f.extra_tuples;
  u.max_extra_attrs = f.extra_attrs;
  u.max_extra_rels = f.extra_rels;
  u.budget = b.oracle;
  for (const auto& p : w.catalog)
    for (const auto& t : post_tgds(p))
      for (const auto* atoms : {&t.premise, &t.conclusion})
        for (const auto& v : constants_of(*atoms))
          if (std::find(u.values.begin(), u.values.end(), v) == u.values.end()) u.values.push_back(v);
  auto outs = enumerate_outcomes_seq(w.instance, sequence(w, c.seq), u, semantics_of(c.semantics));
  if (f.what == "outcomes") {
    if (c.json) {
      json all = json::array();
      for (const auto& j : outs) all.push_back(instance_json(j));
      out << render({{"count", outs.size()}, {"outcomes", all}});
    } else {
      out << "outcomes " << outs.size() << "\n";
    }
    return kExitYes;
  }
  const auto& g = w.goal(f.goal).goal;
  OracleVerdict v;
  if (const auto* q = std::get_if<ConjunctiveQuery>(&g.goal)) {
    if (f.what != "certain") throw Error("goal " + f.goal + " is a query; use oracle certain");
    v = oracle_certain(outs, *q);
  } else {
    if (f.what != "entails") throw Error("goal " + f.goal + " is a dependency; use oracle entails");
    v = oracle_entails(outs, std::get_if<Tgd>(&g.goal) ? Dependency(std::get<Tgd>(g.goal)) : Dependency(std::get<Egd>(g.goal)));
  }
  return yes_no(v.holds, out, c.json, {{"outcomes", outs.size()}, {"vacuous", v.vacuous}});
}

void add_common(CLI::App* sub, Common& c, bool seq = true) {
  sub->add_option("file", c.file, "workspace file (.wf)")->required();
  if (seq) sub->add_option("--seq", c.seq, "procedure sequence, comma separated")->delimiter(',');
  sub->add_flag("--json", c.json, "emit JSON");
}

void add_semantics(CLI::App* sub, Common& c) {
  sub->add_option("--semantics", c.semantics, "static or dynamic")
      ->check(CLI::IsMember({"static", "dynamic"}))
      ->capture_default_str();
}

}  // namespace

int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  CLI::App app{"chasemith: outcomes, entailment and readiness for data-processing procedures"};
  app.require_subcommand(1);
  Common c;
  bool dynamic = false;
  std::string goal, query, skb;
  ReadyFlags rf;
  OracleFlags of;

  auto* check = app.add_subcommand("check", "validate a workspace and classify its procedures");
  add_common(check, c, false);
  auto* appl = app.add_subcommand("applicability", "is the sequence applicable on the workspace schema");
  add_common(appl, c);
  appl->add_flag("--dynamic", dynamic, "fold minimal schemas");
  auto* nonempty = app.add_subcommand("nonempty", "does the sequence have a dynamic outcome");
  add_common(nonempty, c);
  auto* apply = app.add_subcommand("apply", "represent the outcomes of a sequence");
  add_common(apply, c);
  add_semantics(apply, c);
  auto* entails = app.add_subcommand("entails", "do all outcomes satisfy a dependency goal");
  add_common(entails, c);
  entails->add_option("--goal", goal, "goal name")->required();
  entails->add_option("--skb", skb, "SKB JSON as written by apply, instead of --seq");
  auto* certain = app.add_subcommand("certain", "certain answers of a query goal");
  add_common(certain, c);
  add_semantics(certain, c);
  certain->add_option("--query", query, "goal name")->required();
  auto* ready_cmd = app.add_subcommand("ready", "search for a sequence that makes the goal hold");
  add_common(ready_cmd, c, false);
  add_semantics(ready_cmd, c);
  ready_cmd->add_option("--goal", rf.goal, "goal name");
  ready_cmd->add_option("--goal-file", rf.goal_file, "file holding a goal block");
  ready_cmd->add_option("--max-len", rf.max_len, "longest sequence searched")->required();
  ready_cmd->add_option("--threads", rf.threads, "worker threads")->check(CLI::Range(1u, 256u));
  ready_cmd->add_option("--catalog", rf.catalog, "restrict the catalog, comma separated")->delimiter(',');
  ready_cmd->add_flag("--prove-bound", rf.prove_bound, "refuse when max-len is below the proven bound");
  auto* oracle = app.add_subcommand("oracle", "bounded brute-force enumeration");
  oracle->add_option("what", of.what, "outcomes, certain or entails")
      ->required()
      ->check(CLI::IsMember({"outcomes", "certain", "entails"}));
  add_common(oracle, c);
  add_semantics(oracle, c);
  oracle->add_option("--goal", of.goal, "goal name for certain or entails");
  oracle->add_option("--fresh", of.fresh, "fresh values added to the universe");
  oracle->add_option("--extra-tuples", of.extra_tuples, "tuples added per step");
  oracle->add_option("--extra-attrs", of.extra_attrs, "attribute slots added per step");
  oracle->add_option("--extra-rels", of.extra_rels, "relations added per step");
  auto* fmt = app.add_subcommand("format", "print the workspace in canonical form");
  add_common(fmt, c, false);

  std::vector<std::string> rev(args.rbegin(), args.rend());
  try {
    app.parse(rev);
  } catch (const CLI::ParseError& e) {
    std::ostringstream o, e2;
    int code = app.exit(e, o, e2);
    out << o.str();
    err << e2.str();
    return code == 0 ? kExitYes : kExitInput;
  }

  try {
    Budget b = budget_from_env();
    if (*check) return cmd_check(c, out);
    if (*appl) return cmd_applicability(c, dynamic, out);
    if (*nonempty) return cmd_nonempty(c, out);
    if (*apply) return cmd_apply(c, b, out);
    if (*entails) return cmd_entails(c, goal, skb, b, out);
    if (*certain) return cmd_certain(c, query, b, out);
    if (*ready_cmd) return cmd_ready(c, rf, b, out);
    if (*oracle) {
      if (of.what != "outcomes" && of.goal.empty()) throw Error("oracle " + of.what + " needs --goal");
      return cmd_oracle(c, of, b, out);
    }
    if (*fmt) {
      out << serialize(load(c.file));
      return kExitYes;
    }
  } catch (const Unsupported& e) {
    err << "unsupported: " << e.what() << "\n";
    return kExitUnsupported;
  } catch (const ResourceError& e) {
    err << "resource limit: " << e.what() << "\n";
    return kExitUnsupported;
  } catch (const Error& e) {
    err << "error: " << e.what() << "\n";
    return kExitInput;
  }
  return kExitInput;
}

}  // namespace chasemith
