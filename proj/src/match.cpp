#include "chasemith/match.hpp"

#include <algorithm>

namespace chasemith {

Pattern::Pattern(std::vector<Atom> atoms, const std::vector<std::string>& leading) : atoms_(std::move(atoms)) {
  vars_ = leading;
  for (const auto& v : vars_of(atoms_))
    if (std::find(vars_.begin(), vars_.end(), v) == vars_.end()) vars_.push_back(v);
}

int Pattern::slot(const std::string& v) const {
  auto it = std::find(vars_.begin(), vars_.end(), v);
  return it == vars_.end() ? -1 : static_cast<int>(it - vars_.begin());
}

bool Pattern::compile(const Instance& inst, const Binding& seed, std::vector<Compiled>& out) const {
  std::vector<Compiled> cs;
  cs.reserve(atoms_.size());
  for (const auto& a : atoms_) {
    if (!inst.schema().has(a.rel)) return false;
    Compiled c;
    c.rows = &inst.rows(a.rel);
    for (const auto& [attr, t] : a.args) {
      int p = inst.schema().position(a.rel, attr);
      if (p < 0) return false;
      c.pos.push_back(p);
      c.slot.push_back(t.is_var ? slot(t.var) : -1);
      c.konst.push_back(t.is_var ? Value{} : t.value);
    }
    if (c.rows->empty()) return false;
    cs.push_back(std::move(c));
  }
  // Greedy join order: most already-bound slots first, then smallest relation.
  std::vector<char> bound(vars_.size(), 0);
  for (std::size_t k = 0; k < seed.bound.size() && k < bound.size(); ++k) bound[k] = seed.bound[k];
  std::vector<char> used(cs.size(), 0);
  out.clear();
  for (std::size_t step = 0; step < cs.size(); ++step) {
    int best = -1;
    long best_score = 0;
    std::size_t best_rows = 0;
    for (std::size_t k = 0; k < cs.size(); ++k) {
      if (used[k]) continue;
      long score = 0;
      for (std::size_t j = 0; j < cs[k].slot.size(); ++j) {
        int s = cs[k].slot[j];
        if (s < 0 || bound[s]) ++score;
      }
      std::size_t rows = cs[k].rows->size();
      if (best < 0 || score > best_score || (score == best_score && rows < best_rows)) {
        best = static_cast<int>(k);
        best_score = score;
        best_rows = rows;
      }
    }
    used[best] = 1;
    for (int s : cs[best].slot)
      if (s >= 0) bound[s] = 1;
    out.push_back(cs[best]);
  }
  return true;
}

}  // namespace chasemith
