#pragma once

#include <cstddef>
#include <vector>

namespace obsmeas {

struct Interval {
  double lo;
  double hi;

  double length() const { return hi - lo; }
  double midpoint() const { return 0.5 * (lo + hi); }
};

/// Finite union of disjoint open intervals inside (0, T), kept sorted.
class TimeSet {
 public:
  /// Clips to [0, T], drops empty pieces and merges overlapping ones.
  /// Throws ValidationError when nothing of positive measure remains.
  TimeSet(double horizon, std::vector<Interval> raw);

  double horizon() const { return horizon_; }
  const std::vector<Interval>& intervals() const { return intervals_; }
  double measure() const { return measure_; }

  /// Pieces of E inside (a, b).
  std::vector<Interval> restrict_to(double a, double b) const;

  bool contains(double t) const;

 private:
  double horizon_;
  std::vector<Interval> intervals_;
  double measure_;
};

TimeSet make_time_set(double horizon, std::vector<Interval> raw);

/// Midpoint of the longest interval, earliest one on ties.
double density_point(const TimeSet& E);

/// |E intersect (a, b)|.
double intersect_measure(const TimeSet& E, double a, double b);

/// Decreasing points l_1 > l_2 > ... converging to `limit` with geometric
/// gaps l_{m+1} - l_{m+2} = q (l_m - l_{m+1}).
struct TelescopeSequence {
  double limit = 0.0;
  double ratio = 0.0;
  std::vector<double> points;
  /// |E intersect (l_{m+1}, l_m)| / (l_m - l_{m+1}), one per gap.
  std::vector<double> measure_fractions;

  std::size_t gap_count() const { return points.empty() ? 0 : points.size() - 1; }
  double gap(std::size_t m) const { return points[m] - points[m + 1]; }
};

inline constexpr double kDefaultTruncation = 1e-12;

/// Sequence accumulating at density_point(E). The first point is
/// l_1 = l + min(1, beta - l)/2 where (alpha, beta) is the interval of E
/// holding l, so every gap lies inside E. Points are kept while
/// l_m - l >= truncation.
TelescopeSequence telescope_for_density(const TimeSet& E, double q,
                                        double truncation = kDefaultTruncation);

/// Same construction around an explicit limit inside the interval (alpha, beta)
/// of E; exposed so callers can place the limit elsewhere.
TelescopeSequence telescope_at(const TimeSet& E, double limit, double first_point, double q,
                               double truncation = kDefaultTruncation);

/// Points q^m T, m >= 0, down to q^m T >= truncation.
TelescopeSequence geometric_horizon_sequence(double horizon, double q,
                                             double truncation = kDefaultTruncation);

}  // namespace obsmeas
