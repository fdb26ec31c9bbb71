#pragma once

#include <string>
#include <utility>
#include <vector>

#include "chasemith/lang.hpp"

namespace chasemith {

// Partial assignment over the slots of a Pattern.
struct Binding {
  std::vector<Value> vals;
  std::vector<char> bound;

  explicit Binding(std::size_t n = 0) : vals(n), bound(n, 0) {}
  void set(int slot, Value v) {
    vals[slot] = std::move(v);
    bound[slot] = 1;
  }
};

// A conjunction of atoms compiled against variable slots. Homomorphisms
// into an instance are enumerated by backtracking.
class Pattern {
 public:
  Pattern() = default;
  explicit Pattern(std::vector<Atom> atoms, const std::vector<std::string>& leading = {});

  const std::vector<std::string>& vars() const { return vars_; }
  const std::vector<Atom>& atoms() const { return atoms_; }
  int slot(const std::string& v) const;
  std::size_t size() const { return vars_.size(); }
  Binding empty_binding() const { return Binding(vars_.size()); }

  // Calls f(vals) for each total extension of seed; f returns false to stop.
  // Returns false if enumeration was stopped.
  template <class F>
  bool for_each(const Instance& inst, const Binding& seed, F&& f) const;
  bool exists(const Instance& inst, const Binding& seed) const {
    return !for_each(inst, seed, [](const std::vector<Value>&) { return false; });
  }
  bool exists(const Instance& inst) const { return exists(inst, empty_binding()); }

 private:
  struct Compiled {
    const std::set<Tuple>* rows = nullptr;
    std::vector<int> pos;
    std::vector<int> slot;
    std::vector<Value> konst;
  };
  bool compile(const Instance& inst, const Binding& seed, std::vector<Compiled>& out) const;

  template <class F>
  bool step(const std::vector<Compiled>& cs, std::size_t k, Binding& b, F& f) const;

  std::vector<Atom> atoms_;
  std::vector<std::string> vars_;
};

template <class F>
bool Pattern::for_each(const Instance& inst, const Binding& seed, F&& f) const {
  std::vector<Compiled> cs;
  if (!compile(inst, seed, cs)) return true;
  Binding b = seed;
  if (b.vals.size() < vars_.size()) {
    b.vals.resize(vars_.size());
    b.bound.resize(vars_.size(), 0);
  }
  return step(cs, 0, b, f);
}

template <class F>
bool Pattern::step(const std::vector<Compiled>& cs, std::size_t k, Binding& b, F& f) const {
  if (k == cs.size()) return f(static_cast<const std::vector<Value>&>(b.vals));
  const Compiled& c = cs[k];
  std::vector<int> newly;
  for (const auto& row : *c.rows) {
    bool ok = true;
    newly.clear();
    for (std::size_t j = 0; j < c.pos.size() && ok; ++j) {
      const Value& v = row[c.pos[j]];
      int s = c.slot[j];
      if (s < 0) {
        ok = (v == c.konst[j]);
      } else if (b.bound[s]) {
        ok = (b.vals[s] == v);
      } else {
        b.vals[s] = v;
        b.bound[s] = 1;
        newly.push_back(s);
      }
    }
    if (ok && !step(cs, k + 1, b, f)) {
      for (int s : newly) b.bound[s] = 0;
      return false;
    }
    for (int s : newly) b.bound[s] = 0;
  }
  return true;
}

}  // namespace chasemith
