#include "chasemith/relmodel.hpp"

#include <algorithm>

namespace chasemith {

std::string Value::str() const { return null ? "_:n" + std::to_string(id) : text; }

Value val(const std::string& s) { return Value::constant(s); }
Value val(long long n) { return Value::constant(std::to_string(n)); }

Schema::Schema(std::initializer_list<std::pair<const RelName, std::vector<AttrName>>> rels) {
  for (const auto& [r, a] : rels) define(r, a);
}

void Schema::define(const RelName& r, std::vector<AttrName> attrs) {
  std::sort(attrs.begin(), attrs.end());
  attrs.erase(std::unique(attrs.begin(), attrs.end()), attrs.end());
  rels_[r] = std::move(attrs);
}

const std::vector<AttrName>& Schema::attrs(const RelName& r) const {
  auto it = rels_.find(r);
  if (it == rels_.end()) throw Error("unknown relation " + r);
  return it->second;
}

int Schema::position(const RelName& r, const AttrName& a) const {
  auto it = rels_.find(r);
  if (it == rels_.end()) return -1;
  auto pos = std::lower_bound(it->second.begin(), it->second.end(), a);
  if (pos == it->second.end() || *pos != a) return -1;
  return static_cast<int>(pos - it->second.begin());
}

Instance::Instance(Schema s) : schema_(std::move(s)) {
  for (const auto& [r, _] : schema_.relations()) data_[r];
}

const std::set<Tuple>& Instance::rows(const RelName& r) const {
  auto it = data_.find(r);
  if (it == data_.end()) throw Error("unknown relation " + r);
  return it->second;
}

bool Instance::insert(const RelName& r, Tuple t) {
  if (!schema_.has(r)) throw Error("unknown relation " + r);
  if (t.size() != schema_.attrs(r).size())
    throw Error("arity mismatch for " + r);
  return data_[r].insert(std::move(t)).second;
}

bool Instance::insert(const RelName& r, const NamedTuple& t) {
  const auto& attrs = schema_.attrs(r);
  if (t.size() != attrs.size()) throw Error("tuple for " + r + " must bind exactly its attributes");
  Tuple row;
  for (const auto& a : attrs) {
    auto it = t.find(a);
    if (it == t.end()) throw Error("tuple for " + r + " lacks attribute " + a);
    row.push_back(it->second);
  }
  return insert(r, std::move(row));
}

bool Instance::erase(const RelName& r, const Tuple& t) {
  auto it = data_.find(r);
  return it != data_.end() && it->second.erase(t) > 0;
}

bool Instance::contains(const RelName& r, const Tuple& t) const {
  auto it = data_.find(r);
  return it != data_.end() && it->second.count(t) > 0;
}

void Instance::clear(const RelName& r) { data_[r].clear(); }

std::size_t Instance::tuple_count() const {
  std::size_t n = 0;
  for (const auto& [_, rows] : data_) n += rows.size();
  return n;
}

std::set<Value> Instance::active_domain() const {
  std::set<Value> out;
  for (const auto& [_, rows] : data_)
    for (const auto& t : rows) out.insert(t.begin(), t.end());
  return out;
}

std::vector<Value> Instance::nulls() const {
  std::vector<Value> out;
  for (const auto& v : active_domain())
    if (v.is_null()) out.push_back(v);
  return out;
}

NamedTuple Instance::named(const RelName& r, const Tuple& t) const {
  NamedTuple out;
  const auto& attrs = schema_.attrs(r);
  for (std::size_t k = 0; k < attrs.size(); ++k) out[attrs[k]] = t[k];
  return out;
}

bool schema_extends(const Schema& s2, const Schema& s1) {
  for (const auto& [r, attrs] : s1.relations()) {
    if (!s2.has(r)) return false;
    const auto& big = s2.attrs(r);
    if (!std::includes(big.begin(), big.end(), attrs.begin(), attrs.end())) return false;
  }
  return true;
}

bool instance_extends(const Instance& j, const Instance& i) {
  if (!schema_extends(j.schema(), i.schema())) return false;
  for (const auto& [r, attrs] : i.schema().relations()) {
    const auto& mine = i.rows(r);
    if (mine.empty()) continue;
    auto proj = project(j, r, attrs);
    for (const auto& t : mine)
      if (!proj.count(t)) return false;
  }
  return true;
}

bool is_subinstance(const Instance& small, const Instance& big) {
  if (small.schema() != big.schema()) return false;
  for (const auto& [r, rows] : small.data()) {
    const auto& other = big.rows(r);
    if (!std::includes(other.begin(), other.end(), rows.begin(), rows.end())) return false;
  }
  return true;
}

std::set<Tuple> project(const Instance& i, const RelName& r, const std::vector<AttrName>& attrs) {
  std::vector<int> pos;
  for (const auto& a : attrs) {
    int p = i.schema().position(r, a);
    if (p < 0) throw Error("relation " + r + " has no attribute " + a);
    pos.push_back(p);
  }
  std::set<Tuple> out;
  for (const auto& t : i.rows(r)) {
    Tuple row;
    row.reserve(pos.size());
    for (int p : pos) row.push_back(t[p]);
    out.insert(std::move(row));
  }
  return out;
}

}  // namespace chasemith
