#pragma once

#include "rbd/core/types.hpp"

#include <limits>
#include <stdexcept>
#include <vector>

namespace rbd {

template <class VecT>
struct NearestResult {
  int index = -1;
  double distance = 0.0;
  VecT offset;  // reference[index] -> query, i.e. query - reference[index]
};

/// Exhaustive nearest neighbor. Ties break to the lowest index.
template <class VecT>
NearestResult<VecT> nearest_neighbor(const VecT& query, const std::vector<VecT>& reference) {
  if (reference.empty()) throw std::invalid_argument("empty reference set");
  int best = 0;
  double best_d2 = (query - reference[0]).squaredNorm();
  for (int i = 1; i < static_cast<int>(reference.size()); ++i) {
    const double d2 = (query - reference[i]).squaredNorm();
    if (d2 < best_d2) {
      best_d2 = d2;
      best = i;
    }
  }
  return {best, std::sqrt(best_d2), query - reference[best]};
}

template <class VecT>
std::vector<NearestResult<VecT>> nearest_neighbor(const std::vector<VecT>& queries,
                                                  const std::vector<VecT>& reference) {
  std::vector<NearestResult<VecT>> out;
  out.reserve(queries.size());
  for (const auto& q : queries) out.push_back(nearest_neighbor(q, reference));
  return out;
}

namespace detail {
template <class VecT>
double directed_mean(const std::vector<VecT>& from, const std::vector<VecT>& to) {
  double sum = 0.0;
  for (const auto& p : from) sum += nearest_neighbor(p, to).distance;
  return sum / static_cast<double>(from.size());
}

template <class VecT>
double directed_max(const std::vector<VecT>& from, const std::vector<VecT>& to) {
  double m = 0.0;
  for (const auto& p : from) m = std::max(m, nearest_neighbor(p, to).distance);
  return m;
}
}  // namespace detail

/// Symmetric average of the two directed mean closest-point distances.
template <class VecT>
double chamfer(const std::vector<VecT>& a, const std::vector<VecT>& b) {
  if (a.empty() || b.empty()) throw std::invalid_argument("undefined metric");
  return 0.5 * (detail::directed_mean(a, b) + detail::directed_mean(b, a));
}

/// max over both directed maximum closest-point distances.
template <class VecT>
double hausdorff(const std::vector<VecT>& a, const std::vector<VecT>& b) {
  if (a.empty() || b.empty()) throw std::invalid_argument("undefined metric");
  return std::max(detail::directed_max(a, b), detail::directed_max(b, a));
}

}  // namespace rbd
