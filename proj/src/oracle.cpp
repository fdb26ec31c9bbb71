#include "chasemith/oracle.hpp"

#include <algorithm>
#include <functional>

namespace chasemith {

UniverseBound universe_for(const Instance& i, std::size_t fresh) {
  UniverseBound u;
  auto d = i.active_domain();
  u.values.assign(d.begin(), d.end());
  for (std::size_t k = 1; k <= fresh; ++k) {
    std::string name = "f" + std::to_string(k);
    while (d.count(Value::constant(name))) name += "'";
    u.values.push_back(Value::constant(name));
  }
  return u;
}

std::size_t extra_tuples(const Instance& j, const Instance& i) {
  std::size_t n = 0;
  for (const auto& [r, rows] : j.data()) {
    std::size_t covered = 0;
    if (i.schema().has(r) && schema_extends(Schema{{r, j.schema().attrs(r)}}, Schema{{r, i.schema().attrs(r)}})) {
      auto proj = project(j, r, i.schema().attrs(r));
      for (const auto& t : i.rows(r)) covered += proj.count(t);
    }
    n += rows.size() - covered;
  }
  return n;
}

namespace {

struct RelPlan {
  RelName rel;
  std::vector<AttrName> attrs;
  // Positions of the original attributes inside attrs, or empty for a new relation.
  std::vector<int> old_pos;
  std::vector<int> new_pos;
  const std::set<Tuple>* old_rows = nullptr;
  // Projection onto the original attributes must equal the original rows.
  bool pinned = false;
  // Original rows must all reappear.
  bool keep_all = false;
};

std::vector<Tuple> all_tuples(std::size_t arity, const std::vector<Value>& vals) {
  std::vector<Tuple> out{Tuple{}};
  for (std::size_t k = 0; k < arity; ++k) {
    std::vector<Tuple> next;
    for (const auto& t : out)
      for (const auto& v : vals) {
        Tuple u = t;
        u.push_back(v);
        next.push_back(std::move(u));
      }
    out = std::move(next);
  }
  return out;
}

// Calls f(rows, extras) for every admissible content of one relation.
void relation_options(const RelPlan& plan, const std::vector<Value>& vals, std::size_t budget,
                      const std::function<void(const std::set<Tuple>&, std::size_t)>& f) {
  std::vector<Tuple> old(plan.old_rows ? std::vector<Tuple>(plan.old_rows->begin(), plan.old_rows->end())
                                       : std::vector<Tuple>{});
  std::vector<Tuple> exts = all_tuples(plan.new_pos.size(), vals);
  auto merge = [&](const Tuple& o, const Tuple& e) {
    Tuple t(plan.attrs.size());
    for (std::size_t k = 0; k < plan.old_pos.size(); ++k) t[static_cast<std::size_t>(plan.old_pos[k])] = o[k];
    for (std::size_t k = 0; k < plan.new_pos.size(); ++k) t[static_cast<std::size_t>(plan.new_pos[k])] = e[k];
    return t;
  };
  // Tuples whose original projection is not an original row.
  std::vector<Tuple> outside;
  if (!plan.pinned) {
    std::set<Tuple> olds(old.begin(), old.end());
    for (const auto& t : all_tuples(plan.attrs.size(), vals)) {
      Tuple o;
      for (int p : plan.old_pos) o.push_back(t[static_cast<std::size_t>(p)]);
      if (!olds.count(o)) outside.push_back(t);
    }
  }

  std::set<Tuple> rows;
  std::function<void(std::size_t, std::size_t)> pick_outside = [&](std::size_t k, std::size_t used) {
    if (k == outside.size()) {
      f(rows, used);
      return;
    }
    pick_outside(k + 1, used);
    if (used < budget) {
      rows.insert(outside[k]);
      pick_outside(k + 1, used + 1);
      rows.erase(outside[k]);
    }
  };
  // Chooses, for old row k, nothing (when allowed) or a nonempty set of extensions.
  std::function<void(std::size_t, std::size_t)> cover = [&](std::size_t k, std::size_t used) {
    if (k == old.size()) {
      pick_outside(0, used);
      return;
    }
    if (!plan.pinned && !plan.keep_all) cover(k + 1, used);
    std::vector<Tuple> chosen;
    std::function<void(std::size_t, std::size_t)> ext = [&](std::size_t e, std::size_t u) {
      if (e == exts.size()) {
        if (!chosen.empty()) cover(k + 1, u);
        return;
      }
      ext(e + 1, u);
      std::size_t cost = chosen.empty() ? 0 : 1;
      if (u + cost > budget) return;
      Tuple t = merge(old[k], exts[e]);
      chosen.push_back(t);
      rows.insert(t);
      ext(e + 1, u + cost);
      rows.erase(t);
      chosen.pop_back();
    };
    ext(0, used);
  };
  cover(0, 0);
}

std::vector<AttrName> attr_pool(const Procedure& p, std::size_t fresh) {
  std::set<AttrName> out;
  auto from_atoms = [&](const std::vector<Atom>& atoms) {
    for (const auto& a : atoms)
      for (const auto& at : a.attrs()) out.insert(at);
  };
  for (const auto& d : p.post) {
    if (const auto* t = std::get_if<Tgd>(&d)) {
      from_atoms(t->premise);
      from_atoms(t->conclusion);
    } else if (const auto* e = std::get_if<Egd>(&d)) {
      from_atoms(e->premise);
    } else {
      for (const auto& a : std::get<StructureConstraint>(d).attrs) out.insert(a);
    }
  }
  for (const auto& q : p.preserve)
    if (const auto* cq = std::get_if<ConjunctiveQuery>(&q)) from_atoms(cq->atoms);
  for (std::size_t k = 1; k <= fresh; ++k) {
    std::string name = "x" + std::to_string(k);
    while (out.count(name)) name += "'";
    out.insert(name);
  }
  return {out.begin(), out.end()};
}

std::vector<RelName> rel_pool(const Procedure& p, const Schema& s, std::size_t fresh) {
  std::set<RelName> out;
  auto add = [&](const RelName& r) {
    if (!s.has(r)) out.insert(r);
  };
  for (const auto& d : p.post) {
    if (const auto* t = std::get_if<Tgd>(&d)) {
      for (const auto& a : t->premise) add(a.rel);
      for (const auto& a : t->conclusion) add(a.rel);
    } else if (const auto* e = std::get_if<Egd>(&d)) {
      for (const auto& a : e->premise) add(a.rel);
    } else {
      add(std::get<StructureConstraint>(d).rel);
    }
  }
  for (std::size_t k = 1; k <= fresh; ++k) {
    std::string name = "X" + std::to_string(k);
    while (out.count(name) || s.has(name)) name += "'";
    out.insert(name);
  }
  return {out.begin(), out.end()};
}

// Every schema extending s within the attribute and relation bounds.
std::vector<Schema> candidate_schemas(const Procedure& p, const Schema& s, const UniverseBound& u) {
  auto attrs = attr_pool(p, u.max_extra_attrs);
  auto rels = rel_pool(p, s, u.max_extra_rels);
  std::vector<std::pair<RelName, std::vector<AttrName>>> slots;
  for (const auto& [r, a] : s.relations()) slots.push_back({r, a});
  std::vector<Schema> out;
  Schema cur;
  std::function<void(std::size_t, std::size_t)> grow_old;
  std::function<void(std::size_t, std::size_t, std::size_t)> add_new;
  // Subsets of the attribute pool (excluding `have`) of size <= room.
  auto subsets = [&](const std::vector<AttrName>& have, std::size_t room,
                     const std::function<void(const std::vector<AttrName>&)>& f) {
    std::vector<AttrName> avail;
    for (const auto& a : attrs)
      if (std::find(have.begin(), have.end(), a) == have.end()) avail.push_back(a);
    std::vector<AttrName> pick;
    std::function<void(std::size_t)> rec = [&](std::size_t k) {
      if (k == avail.size()) {
        f(pick);
        return;
      }
      rec(k + 1);
      if (pick.size() < room) {
        pick.push_back(avail[k]);
        rec(k + 1);
        pick.pop_back();
      }
    };
    rec(0);
  };
  add_new = [&](std::size_t k, std::size_t attr_room, std::size_t rel_room) {
    if (k == rels.size()) {
      out.push_back(cur);
      return;
    }
    add_new(k + 1, attr_room, rel_room);
    if (rel_room == 0) return;
    subsets({}, attr_room, [&](const std::vector<AttrName>& pick) {
      Schema saved = cur;
      cur.define(rels[k], pick);
      add_new(k + 1, attr_room - pick.size(), rel_room - 1);
      cur = saved;
    });
  };
  grow_old = [&](std::size_t k, std::size_t attr_room) {
    if (k == slots.size()) {
      add_new(0, attr_room, u.max_extra_rels);
      return;
    }
    subsets(slots[k].second, attr_room, [&](const std::vector<AttrName>& pick) {
      auto all = slots[k].second;
      all.insert(all.end(), pick.begin(), pick.end());
      Schema saved = cur;
      cur.define(slots[k].first, all);
      grow_old(k + 1, attr_room - pick.size());
      cur = saved;
    });
  };
  grow_old(0, u.max_extra_attrs);
  return out;
}

}  // namespace

std::set<Instance> enumerate_outcomes(const Instance& i, const Procedure& p, const UniverseBound& u, Semantics mode) {
  std::set<Instance> out;
  if (!is_applicable(p, i)) return out;
  std::set<RelName> scoped_star, scoped_part;
  for (const auto& c : p.scope) (c.wildcard ? scoped_star : scoped_part).insert(c.rel);
  std::set<RelName> totals;
  for (const auto& q : p.preserve)
    if (const auto* t = std::get_if<TotalQuery>(&q)) totals.insert(t->rel);

  std::vector<Schema> schemas =
      mode == Semantics::Static ? std::vector<Schema>{i.schema()} : candidate_schemas(p, i.schema(), u);
  std::size_t tried = 0;
  for (const auto& s : schemas) {
    std::vector<RelPlan> plans;
    for (const auto& [r, attrs] : s.relations()) {
      RelPlan plan;
      plan.rel = r;
      plan.attrs = attrs;
      if (i.schema().has(r)) {
        const auto& old = i.schema().attrs(r);
        for (const auto& a : old) plan.old_pos.push_back(s.position(r, a));
        plan.old_rows = &i.rows(r);
        plan.pinned = !scoped_star.count(r) && !scoped_part.count(r);
        // A total query pins the arity of its relation.
        plan.keep_all = totals.count(r) > 0;
      }
      for (std::size_t k = 0; k < attrs.size(); ++k)
        if (std::find(plan.old_pos.begin(), plan.old_pos.end(), static_cast<int>(k)) == plan.old_pos.end())
          plan.new_pos.push_back(static_cast<int>(k));
      if (plan.keep_all && !plan.new_pos.empty()) {
        plans.clear();
        break;
      }
      plans.push_back(plan);
    }
    if (plans.size() != s.relations().size()) continue;

    Instance j(s);
    std::function<void(std::size_t, std::size_t)> rec = [&](std::size_t k, std::size_t used) {
      if (k == plans.size()) {
        if (++tried > u.budget)
          throw ResourceError("oracle budget exceeded after " + std::to_string(tried - 1) + " candidates");
        if (is_possible_outcome(p, i, j, mode, ScopeQueryMode::PerRelation)) out.insert(j);
        return;
      }
      std::size_t room = u.max_extra_tuples == kUnbounded ? kUnbounded : u.max_extra_tuples - used;
      relation_options(plans[k], u.values, room, [&](const std::set<Tuple>& rows, std::size_t extra) {
        j.clear(plans[k].rel);
        for (const auto& t : rows) j.insert(plans[k].rel, t);
        rec(k + 1, room == kUnbounded ? used : used + extra);
      });
      j.clear(plans[k].rel);
    };
    rec(0, 0);
  }
  return out;
}

std::set<Instance> enumerate_outcomes_seq(const Instance& i, const std::vector<Procedure>& ps, const UniverseBound& u,
                                          Semantics mode) {
  std::set<Instance> cur{i};
  for (const auto& p : ps) {
    std::set<Instance> next;
    for (const auto& j : cur) {
      auto step = enumerate_outcomes(j, p, u, mode);
      next.insert(step.begin(), step.end());
    }
    cur = std::move(next);
  }
  return cur;
}

OracleVerdict oracle_certain(const std::set<Instance>& outcomes, const ConjunctiveQuery& q) {
  OracleVerdict v;
  v.vacuous = outcomes.empty();
  for (const auto& j : outcomes)
    if (!compatible(q, j.schema()) || eval_cq(q, j).empty()) {
      v.holds = false;
      break;
    }
  return v;
}

OracleVerdict oracle_entails(const std::set<Instance>& outcomes, const Dependency& d) {
  OracleVerdict v;
  v.vacuous = outcomes.empty();
  for (const auto& j : outcomes)
    if (!satisfies(j, d)) {
      v.holds = false;
      break;
    }
  return v;
}

}  // namespace chasemith
