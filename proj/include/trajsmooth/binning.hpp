#pragma once

#include <cstddef>
#include <vector>

#include "trajsmooth/model.hpp"

namespace trajsmooth {

struct BinningConfig {
  double Omega = 1.2;   // hull-area growth ratio that ends a stable bin
  double omega = 0.01;  // km^2; growth attributable to the oldest point that marks it as travel

  bool valid() const { return Omega > 1.0 && omega > 0.0; }
};

enum class BinKind { stable, momentary };

/// Time indices are 0-based and inclusive.
struct Bin {
  std::size_t first = 0;
  std::size_t last = 0;
  Point2 center;
  BinKind kind = BinKind::momentary;

  std::size_t size() const { return last - first + 1; }
};

struct BinSegmentation {
  std::vector<std::size_t> start_times;  // increasing, one per bin
  std::vector<Bin> bins;                 // in time order, partitioning 0..T-1
  std::vector<Point2> X_est;
  std::vector<Regime> S_est;

  std::size_t stable_count() const;
  std::size_t momentary_count() const;
  /// Start time of the bin holding each time index.
  std::vector<std::size_t> bin_start_per_time() const;
};

/// Fills missing positions by linear interpolation in the time index; leading and
/// trailing gaps take the nearest observed value. Throws std::domain_error when
/// nothing is observed.
std::vector<Point2> interpolate_gaps(const ObservationSeries& obs);

/// Convex-hull binning over a gap-free position series (T >= 4).
BinSegmentation run_binning(const std::vector<Point2>& filled, const BinningConfig& cfg);

/// Stable membership -> pause, momentary -> flight.
std::vector<Regime> binning_to_labels(const BinSegmentation& seg);

}  // namespace trajsmooth
