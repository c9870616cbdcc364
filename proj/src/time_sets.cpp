#include "obsmeas/time_sets.hpp"

#include "obsmeas/errors.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

namespace obsmeas {

TimeSet::TimeSet(double horizon, std::vector<Interval> raw) : horizon_(horizon), measure_(0.0) {
  if (!(horizon > 0.0) || !std::isfinite(horizon)) {
    throw ValidationError("time set horizon must be positive");
  }
  std::vector<Interval> clipped;
  for (const auto& iv : raw) {
    if (!std::isfinite(iv.lo) || !std::isfinite(iv.hi)) {
      throw ValidationError("time set interval has non-finite endpoint");
    }
    const double lo = std::max(iv.lo, 0.0);
    const double hi = std::min(iv.hi, horizon);
    if (hi > lo) clipped.push_back({lo, hi});
  }
  std::sort(clipped.begin(), clipped.end(),
            [](const Interval& x, const Interval& y) { return x.lo < y.lo; });
  for (const auto& iv : clipped) {
    if (!intervals_.empty() && iv.lo < intervals_.back().hi) {
      intervals_.back().hi = std::max(intervals_.back().hi, iv.hi);
    } else {
      intervals_.push_back(iv);
    }
  }
  for (const auto& iv : intervals_) measure_ += iv.length();
  if (!(measure_ > 0.0)) {
    throw ValidationError("time set has zero measure inside (0, T)");
  }
}

std::vector<Interval> TimeSet::restrict_to(double a, double b) const {
  std::vector<Interval> out;
  for (const auto& iv : intervals_) {
    const double lo = std::max(iv.lo, a);
    const double hi = std::min(iv.hi, b);
    if (hi > lo) out.push_back({lo, hi});
  }
  return out;
}

bool TimeSet::contains(double t) const {
  return std::any_of(intervals_.begin(), intervals_.end(),
                     [t](const Interval& iv) { return iv.lo < t && t < iv.hi; });
}

TimeSet make_time_set(double horizon, std::vector<Interval> raw) {
  return TimeSet(horizon, std::move(raw));
}

double density_point(const TimeSet& E) {
  const Interval* best = &E.intervals().front();
  for (const auto& iv : E.intervals()) {
    if (iv.length() > best->length()) best = &iv;
  }
  return best->midpoint();
}

double intersect_measure(const TimeSet& E, double a, double b) {
  if (!(a < b)) throw ValidationError("intersect_measure: query needs a < b");
  double total = 0.0;
  for (const auto& iv : E.restrict_to(a, b)) total += iv.length();
  return total;
}

namespace {

void check_ratio(double q) {
  if (!(q > 0.0 && q < 1.0)) {
    std::ostringstream os;
    os << "telescoping ratio q = " << q << " must lie in (0, 1)";
    throw ValidationError(os.str());
  }
}

TelescopeSequence build(double limit, double first, double q, double truncation) {
  TelescopeSequence seq;
  seq.limit = limit;
  seq.ratio = q;
  const double span = first - limit;
  // l_m = limit + q^{m-1} span, m >= 1
  double factor = 1.0;
  while (span * factor >= truncation) {
    seq.points.push_back(limit + span * factor);
    factor *= q;
  }
  return seq;
}

}  // namespace

TelescopeSequence telescope_at(const TimeSet& E, double limit, double first_point, double q,
                               double truncation) {
  check_ratio(q);
  if (!(first_point > limit)) throw ValidationError("telescope: first point must exceed limit");
  if (!(truncation > 0.0)) throw ValidationError("telescope: truncation must be positive");
  TelescopeSequence seq = build(limit, first_point, q, truncation);
  for (std::size_t m = 0; m < seq.gap_count(); ++m) {
    const double hi = seq.points[m];
    const double lo = seq.points[m + 1];
    seq.measure_fractions.push_back(intersect_measure(E, lo, hi) / (hi - lo));
  }
  return seq;
}

TelescopeSequence telescope_for_density(const TimeSet& E, double q, double truncation) {
  check_ratio(q);
  const double l = density_point(E);
  const Interval* home = nullptr;
  for (const auto& iv : E.intervals()) {
    if (iv.lo < l && l < iv.hi) home = &iv;
  }
  const double room = home->hi - l;
  const double first = std::min(home->hi, l + std::min(1.0, room) / 2.0);
  return telescope_at(E, l, first, q, truncation);
}

TelescopeSequence geometric_horizon_sequence(double horizon, double q, double truncation) {
  check_ratio(q);
  if (!(horizon > 0.0)) throw ValidationError("geometric sequence: horizon must be positive");
  TelescopeSequence seq = build(0.0, horizon, q, truncation);
  seq.measure_fractions.assign(seq.gap_count(), 1.0);
  return seq;
}

}  // namespace obsmeas
