#pragma once

#include <cstdint>
#include <iosfwd>
#include <map>
#include <string>
#include <vector>

#include "trajsmooth/binning.hpp"
#include "trajsmooth/gibbs.hpp"
#include "trajsmooth/metrics.hpp"
#include "trajsmooth/model.hpp"

namespace trajsmooth {

inline constexpr double kKmPerDegree = 111.32;
inline constexpr std::size_t kMinutesPerDay = 1440;

struct RawFix {
  std::string person_id;
  double timestamp = 0.0;  // seconds since the epoch
  double lat = 0.0;
  double lon = 0.0;
};

struct GeoOrigin {
  double lat = 0.0;
  double lon = 0.0;
};

/// Coordinate-wise mean of latitudes and longitudes. Throws std::domain_error when empty.
GeoOrigin center_origin(const std::vector<RawFix>& fixes);

/// Local equirectangular projection about `origin`, in km (x east, y north).
Point2 degrees_to_km(const RawFix& fix, const GeoOrigin& origin);

struct TimedPoint {
  double timestamp = 0.0;
  Point2 p;
};

/// Averages the fixes falling in each half-open minute [day_start + 60t, day_start + 60(t+1)).
/// Throws std::invalid_argument for a fix outside the T-minute window.
ObservationSeries minute_aggregate(const std::vector<TimedPoint>& fixes, double day_start,
                                   std::size_t T = kMinutesPerDay);

/// Re-centers the observed points on their mean and rotates them by one angle drawn
/// uniformly from [0, 2 pi).
ObservationSeries obfuscate(const ObservationSeries& series, Rng& rng);

struct PersonDay {
  std::string person_id;
  std::string date;  // YYYY-MM-DD in local civil time
  double day_start = 0.0;
  std::size_t n_fixes = 0;
  ObservationSeries obs;
};

/// Groups fixes by person and local civil day, projects each group about its own
/// origin, aggregates to minutes and obfuscates. The rotation of a group is seeded from
/// `seed` and the group's fix values only, so relabeling people changes nothing else.
std::vector<PersonDay> preprocess_fixes(const std::vector<RawFix>& fixes, std::int64_t tz_offset_seconds,
                                        std::uint64_t seed);

/// Local civil date of a timestamp and the epoch second at which that day starts.
std::pair<std::string, double> civil_day(double timestamp, std::int64_t tz_offset_seconds);

// ---- CSV ------------------------------------------------------------------------------

/// Fixed-precision decimal text used by every writer (9 significant digits).
std::string format_number(double v);

struct CsvWarning {
  std::size_t line = 0;
  std::string message;
};

/// Header-indexed table of raw string fields.
struct CsvTable {
  std::vector<std::string> header;
  std::vector<std::vector<std::string>> rows;
  std::vector<std::size_t> lines;  // 1-based source line of each row

  /// Column index; throws std::invalid_argument naming the missing column.
  std::size_t column(const std::string& name) const;
  bool has_column(const std::string& name) const;
};

CsvTable read_csv(std::istream& in);
CsvTable read_csv_file(const std::string& path);

double parse_double(const std::string& field);
long long parse_integer(const std::string& field);

struct RawFixFile {
  std::vector<RawFix> fixes;
  std::vector<CsvWarning> warnings;  // malformed rows, skipped
};

RawFixFile read_raw_fixes(std::istream& in);
void write_raw_fixes(std::ostream& out, const std::vector<RawFix>& fixes);

ObservationSeries read_observations(std::istream& in);
void write_observations(std::ostream& out, const ObservationSeries& obs);

LatentTrajectory read_truth(std::istream& in);
void write_truth(std::ostream& out, const LatentTrajectory& truth);

void write_segmentation(std::ostream& out, const BinSegmentation& seg);

struct SegmentationTable {
  std::vector<Point2> X_est;
  std::vector<Regime> S_est;
  std::vector<std::size_t> bin_start;  // 1-based
};
SegmentationTable read_segmentation(std::istream& in);

void write_summary(std::ostream& out, const PosteriorSummary& summary);
PosteriorSummary read_summary(std::istream& in);

void write_draws(std::ostream& out, const std::vector<McmcDraw>& draws);

struct DrawTable {
  std::vector<LatentTrajectory> draws;
};
DrawTable read_draws(std::istream& in);

void write_per_run(std::ostream& out, const std::vector<std::pair<RunMetrics, RunMetrics>>& pairs);
void write_benchmark_summary(std::ostream& out, const BenchmarkSummary& summary,
                             const std::array<Method, 2>& methods);

/// Reads the whole file; throws std::runtime_error when it cannot be opened.
std::string read_text_file(const std::string& path);
void write_text_file(const std::string& path, const std::string& text);

}  // namespace trajsmooth
