#pragma once

#include <cstddef>
#include <vector>

#include "ctds/formula.hpp"

namespace ctds {

/// Every satisfying assignment, in lexicographic order (-1 before +1).
/// Refuses formulas with more than `max_vars` variables, or more than
/// `max_solutions` models, with Error(TooLarge).
std::vector<Assignment> enumerate_solutions(const CnfFormula& formula, std::size_t max_vars = 26,
                                            std::size_t max_solutions = std::size_t{1} << 22);

/// Connected components of the Hamming-distance-1 graph on a solution set.
struct ClusterSet {
  std::vector<Assignment> solutions;
  std::vector<std::size_t> cluster_of;              // per solution
  std::vector<std::vector<std::size_t>> clusters;   // member indices, ascending

  std::size_t num_clusters() const { return clusters.size(); }
  /// Cluster id of an assignment, or npos when it is not in the set.
  std::size_t find(const Assignment& a) const;

  static constexpr std::size_t npos = static_cast<std::size_t>(-1);
};

/// Cluster ids follow the order of each cluster's first member in `solutions`.
ClusterSet cluster_solutions(std::vector<Assignment> solutions);

}  // namespace ctds
