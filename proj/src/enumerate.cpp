#include "ctds/enumerate.hpp"

#include <algorithm>
#include <numeric>
#include <string_view>
#include <unordered_map>

#include "ctds/error.hpp"

namespace ctds {

namespace {

class Enumerator {
 public:
  Enumerator(const CnfFormula& f, std::size_t max_solutions)
      : f_(f), max_solutions_(max_solutions), occurs_(f.num_vars()), free_(f.num_clauses()),
        satisfied_(f.num_clauses(), 0), values_(f.num_vars(), 0) {
    for (std::size_t m = 0; m < f.num_clauses(); ++m) {
      free_[m] = f.clause_length(m);
      for (const Literal& l : f.clause(m)) occurs_[l.var].push_back({m, l.sign});
    }
  }

  std::vector<Assignment> run() {
    descend(0);
    return std::move(found_);
  }

 private:
  struct Occurrence {
    std::size_t clause;
    std::int8_t sign;
  };

  // Returns false if some clause became fully falsified.
  bool assign(std::size_t v, std::int8_t value) {
    values_[v] = value;
    bool ok = true;
    for (const auto& o : occurs_[v]) {
      if (o.sign == value) {
        ++satisfied_[o.clause];
      } else if (--free_[o.clause] == 0 && satisfied_[o.clause] == 0) {
        ok = false;
      }
    }
    return ok;
  }

  void unassign(std::size_t v) {
    const std::int8_t value = values_[v];
    for (const auto& o : occurs_[v]) {
      if (o.sign == value) {
        --satisfied_[o.clause];
      } else {
        ++free_[o.clause];
      }
    }
    values_[v] = 0;
  }

  void descend(std::size_t v) {
    if (v == f_.num_vars()) {
      if (found_.size() >= max_solutions_) {
        throw Error(ErrorCode::TooLarge, "more than " + std::to_string(max_solutions_) + " solutions");
      }
      found_.push_back(values_);
      return;
    }
    for (std::int8_t value : {std::int8_t{-1}, std::int8_t{1}}) {
      if (assign(v, value)) descend(v + 1);
      unassign(v);
    }
  }

  const CnfFormula& f_;
  std::size_t max_solutions_;
  std::vector<std::vector<Occurrence>> occurs_;
  std::vector<std::size_t> free_;
  std::vector<std::size_t> satisfied_;
  Assignment values_;
  std::vector<Assignment> found_;
};

std::string_view key_of(const Assignment& a) {
  return {reinterpret_cast<const char*>(a.data()), a.size()};
}

}  // namespace

std::vector<Assignment> enumerate_solutions(const CnfFormula& formula, std::size_t max_vars, std::size_t max_solutions) {
  if (formula.num_vars() > max_vars) {
    throw Error(ErrorCode::TooLarge, "N=" + std::to_string(formula.num_vars()) + " exceeds the enumeration limit " +
                                         std::to_string(max_vars));
  }
  return Enumerator(formula, max_solutions).run();
}

std::size_t ClusterSet::find(const Assignment& a) const {
  const auto it = std::lower_bound(solutions.begin(), solutions.end(), a);
  if (it != solutions.end() && *it == a) return cluster_of[static_cast<std::size_t>(it - solutions.begin())];
  // Unsorted input: fall back to a scan.
  for (std::size_t i = 0; i < solutions.size(); ++i) {
    if (solutions[i] == a) return cluster_of[i];
  }
  return npos;
}

ClusterSet cluster_solutions(std::vector<Assignment> solutions) {
  const std::size_t count = solutions.size();
  std::unordered_map<std::string_view, std::size_t> index;
  index.reserve(count * 2);
  for (std::size_t i = 0; i < count; ++i) {
    if (i > 0 && solutions[i].size() != solutions[0].size()) {
      throw Error(ErrorCode::LengthMismatch, "solutions have different lengths");
    }
    index.emplace(key_of(solutions[i]), i);
  }

  std::vector<std::size_t> parent(count);
  std::iota(parent.begin(), parent.end(), 0);
  auto root = [&](std::size_t x) {
    while (parent[x] != x) {
      parent[x] = parent[parent[x]];
      x = parent[x];
    }
    return x;
  };
  for (std::size_t i = 0; i < count; ++i) {
    Assignment probe = solutions[i];
    for (std::size_t v = 0; v < probe.size(); ++v) {
      probe[v] = static_cast<std::int8_t>(-probe[v]);
      const auto it = index.find(key_of(probe));
      if (it != index.end()) {
        const std::size_t a = root(i), b = root(it->second);
        if (a != b) parent[std::max(a, b)] = std::min(a, b);
      }
      probe[v] = static_cast<std::int8_t>(-probe[v]);
    }
  }

  ClusterSet set;
  set.cluster_of.assign(count, 0);
  std::vector<std::size_t> id_of_root(count, ClusterSet::npos);
  for (std::size_t i = 0; i < count; ++i) {
    const std::size_t r = root(i);
    if (id_of_root[r] == ClusterSet::npos) {
      id_of_root[r] = set.clusters.size();
      set.clusters.emplace_back();
    }
    set.cluster_of[i] = id_of_root[r];
    set.clusters[id_of_root[r]].push_back(i);
  }
  set.solutions = std::move(solutions);
  return set;
}

}  // namespace ctds
