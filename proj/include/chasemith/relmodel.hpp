#pragma once

#include <compare>
#include <cstdint>
#include <map>
#include <set>
#include <stdexcept>
#include <string>
#include <vector>

namespace chasemith {

class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Raised when an algorithm is asked to work outside the fragment it decides.
class Unsupported : public Error {
 public:
  using Error::Error;
};

// Raised when a configured resource cap is hit.
class ResourceError : public Error {
 public:
  using Error::Error;
};

using AttrName = std::string;
using RelName = std::string;

// A domain constant or a labeled null. Constants are identified by their
// canonical text; nulls by a numeric label.
struct Value {
  bool null = false;
  std::uint64_t id = 0;
  std::string text;

  static Value constant(std::string s) {
    Value v;
    v.text = std::move(s);
    return v;
  }
  static Value make_null(std::uint64_t label) {
    Value v;
    v.null = true;
    v.id = label;
    return v;
  }

  bool is_null() const { return null; }
  std::string str() const;

  friend bool operator==(const Value& a, const Value& b) {
    return a.null == b.null && (a.null ? a.id == b.id : a.text == b.text);
  }
  friend std::strong_ordering operator<=>(const Value& a, const Value& b) {
    if (a.null != b.null) return a.null ? std::strong_ordering::greater : std::strong_ordering::less;
    if (a.null) return a.id <=> b.id;
    int c = a.text.compare(b.text);
    return c < 0 ? std::strong_ordering::less : c > 0 ? std::strong_ordering::greater : std::strong_ordering::equal;
  }
};

Value val(const std::string& s);
Value val(long long n);

// Positional tuple; positions follow the relation's attribute order.
using Tuple = std::vector<Value>;
using NamedTuple = std::map<AttrName, Value>;

class Schema {
 public:
  Schema() = default;
  Schema(std::initializer_list<std::pair<const RelName, std::vector<AttrName>>> rels);

  // Attributes are stored sorted and deduplicated.
  void define(const RelName& r, std::vector<AttrName> attrs);
  bool has(const RelName& r) const { return rels_.count(r) > 0; }
  const std::vector<AttrName>& attrs(const RelName& r) const;
  // Index of attribute a in relation r, or -1.
  int position(const RelName& r, const AttrName& a) const;
  bool has_attr(const RelName& r, const AttrName& a) const { return position(r, a) >= 0; }
  const std::map<RelName, std::vector<AttrName>>& relations() const { return rels_; }
  std::size_t size() const { return rels_.size(); }

  friend bool operator==(const Schema&, const Schema&) = default;
  friend auto operator<=>(const Schema&, const Schema&) = default;

 private:
  std::map<RelName, std::vector<AttrName>> rels_;
};

class Instance {
 public:
  Instance() = default;
  explicit Instance(Schema s);

  const Schema& schema() const { return schema_; }
  const std::set<Tuple>& rows(const RelName& r) const;
  const std::map<RelName, std::set<Tuple>>& data() const { return data_; }

  // Returns true when the tuple was new.
  bool insert(const RelName& r, Tuple t);
  bool insert(const RelName& r, const NamedTuple& t);
  bool erase(const RelName& r, const Tuple& t);
  bool contains(const RelName& r, const Tuple& t) const;
  void clear(const RelName& r);

  // Adds a relation (empty) to the schema, or widens an existing one.
  // Existing tuples are padded using pad(rel, attr, row_index).
  template <class Pad>
  void extend_relation(const RelName& r, const std::vector<AttrName>& attrs, Pad pad);

  std::size_t tuple_count() const;
  std::set<Value> active_domain() const;
  std::vector<Value> nulls() const;
  NamedTuple named(const RelName& r, const Tuple& t) const;

  friend bool operator==(const Instance&, const Instance&) = default;
  friend auto operator<=>(const Instance& a, const Instance& b) {
    if (auto c = a.schema_ <=> b.schema_; c != 0) return c;
    return a.data_ <=> b.data_;
  }

 private:
  Schema schema_;
  std::map<RelName, std::set<Tuple>> data_;
};

bool schema_extends(const Schema& s2, const Schema& s1);
bool instance_extends(const Instance& j, const Instance& i);
bool is_subinstance(const Instance& small, const Instance& big);

// Restriction of every tuple of r to attrs (in the given order).
std::set<Tuple> project(const Instance& i, const RelName& r, const std::vector<AttrName>& attrs);

template <class Pad>
void Instance::extend_relation(const RelName& r, const std::vector<AttrName>& attrs, Pad pad) {
  std::vector<AttrName> old = schema_.has(r) ? schema_.attrs(r) : std::vector<AttrName>{};
  std::vector<AttrName> merged = old;
  merged.insert(merged.end(), attrs.begin(), attrs.end());
  schema_.define(r, merged);
  const auto& now = schema_.attrs(r);
  if (now == old) {
    data_[r];
    return;
  }
  std::set<Tuple> rebuilt;
  std::size_t row = 0;
  for (const auto& t : data_[r]) {
    Tuple nt;
    nt.reserve(now.size());
    for (const auto& a : now) {
      int p = -1;
      for (std::size_t k = 0; k < old.size(); ++k)
        if (old[k] == a) p = static_cast<int>(k);
      nt.push_back(p >= 0 ? t[p] : pad(r, a, row));
    }
    rebuilt.insert(std::move(nt));
    ++row;
  }
  data_[r] = std::move(rebuilt);
}

}  // namespace chasemith
