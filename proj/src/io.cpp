#include "trajsmooth/io.hpp"

#include <algorithm>
#include <bit>
#include <charconv>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <istream>
#include <numbers>
#include <ostream>
#include <sstream>
#include <stdexcept>

namespace trajsmooth {

GeoOrigin center_origin(const std::vector<RawFix>& fixes) {
  if (fixes.empty()) throw std::domain_error("center_origin: no fixes");
  double lat = 0.0;
  double lon = 0.0;
  for (const auto& f : fixes) {
    lat += f.lat;
    lon += f.lon;
  }
  const auto n = static_cast<double>(fixes.size());
  return {lat / n, lon / n};
}

Point2 degrees_to_km(const RawFix& fix, const GeoOrigin& origin) {
  const double coslat = std::cos(origin.lat * std::numbers::pi / 180.0);
  return {(fix.lon - origin.lon) * kKmPerDegree * coslat, (fix.lat - origin.lat) * kKmPerDegree};
}

ObservationSeries minute_aggregate(const std::vector<TimedPoint>& fixes, double day_start, std::size_t T) {
  std::vector<Point2> sum(T);
  std::vector<std::size_t> count(T, 0);
  for (const auto& f : fixes) {
    const double minute = std::floor((f.timestamp - day_start) / 60.0);
    if (!(minute >= 0.0 && minute < static_cast<double>(T))) {
      throw std::invalid_argument("minute_aggregate: fix outside the day window");
    }
    const auto t = static_cast<std::size_t>(minute);
    sum[t] += f.p;
    ++count[t];
  }
  ObservationSeries out;
  out.Y.resize(T);
  for (std::size_t t = 0; t < T; ++t) {
    if (count[t] > 0) out.Y[t] = sum[t] / static_cast<double>(count[t]);
  }
  return out;
}

ObservationSeries obfuscate(const ObservationSeries& series, Rng& rng) {
  const double angle = 2.0 * std::numbers::pi * sample_uniform(rng);
  ObservationSeries out = series;
  Point2 mean{0.0, 0.0};
  std::size_t n = 0;
  for (const auto& y : series.Y) {
    if (!y) continue;
    mean += *y;
    ++n;
  }
  if (n == 0) return out;
  mean = mean / static_cast<double>(n);
  const double c = std::cos(angle);
  const double s = std::sin(angle);
  for (auto& y : out.Y) {
    if (!y) continue;
    const Point2 d = *y - mean;
    *y = Point2{c * d.x - s * d.y, s * d.x + c * d.y};
  }
  return out;
}

std::pair<std::string, double> civil_day(double timestamp, std::int64_t tz_offset_seconds) {
  using namespace std::chrono;
  const auto local = static_cast<std::int64_t>(std::floor(timestamp)) + tz_offset_seconds;
  std::int64_t day = local / 86400;
  if (local % 86400 < 0) --day;
  const year_month_day ymd{sys_days{days{day}}};
  char buf[16];
  std::snprintf(buf, sizeof buf, "%04d-%02u-%02u", static_cast<int>(ymd.year()),
                static_cast<unsigned>(ymd.month()), static_cast<unsigned>(ymd.day()));
  return {buf, static_cast<double>(day * 86400 - tz_offset_seconds)};
}

namespace {

std::uint64_t fnv1a(std::uint64_t h, double v) {
  auto bits = std::bit_cast<std::uint64_t>(v);
  for (int i = 0; i < 8; ++i) {
    h ^= bits & 0xffU;
    h *= 0x100000001b3ULL;
    bits >>= 8;
  }
  return h;
}

}  // namespace

std::vector<PersonDay> preprocess_fixes(const std::vector<RawFix>& fixes, std::int64_t tz_offset_seconds,
                                        std::uint64_t seed) {
  std::map<std::pair<std::string, std::string>, std::vector<RawFix>> groups;
  std::map<std::pair<std::string, std::string>, double> starts;
  for (const auto& f : fixes) {
    auto [date, start] = civil_day(f.timestamp, tz_offset_seconds);
    const std::pair key{f.person_id, date};
    groups[key].push_back(f);
    starts[key] = start;
  }
  std::vector<PersonDay> out;
  out.reserve(groups.size());
  for (auto& [key, group] : groups) {
    std::stable_sort(group.begin(), group.end(),
                     [](const RawFix& a, const RawFix& b) { return a.timestamp < b.timestamp; });
    const GeoOrigin origin = center_origin(group);
    std::vector<TimedPoint> pts;
    pts.reserve(group.size());
    std::uint64_t h = 0xcbf29ce484222325ULL;
    for (const auto& f : group) {
      pts.push_back({f.timestamp, degrees_to_km(f, origin)});
      h = fnv1a(fnv1a(fnv1a(h, f.timestamp), f.lat), f.lon);
    }
    PersonDay pd;
    pd.person_id = key.first;
    pd.date = key.second;
    pd.day_start = starts[key];
    pd.n_fixes = group.size();
    auto rng = make_rng(seed, {h});
    pd.obs = obfuscate(minute_aggregate(pts, pd.day_start), rng);
    out.push_back(std::move(pd));
  }
  return out;
}

// ---- CSV ------------------------------------------------------------------------------

std::string format_number(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.9g", v);
  return buf;
}

std::size_t CsvTable::column(const std::string& name) const {
  const auto it = std::find(header.begin(), header.end(), name);
  if (it == header.end()) throw std::invalid_argument("missing column '" + name + "'");
  return static_cast<std::size_t>(it - header.begin());
}

bool CsvTable::has_column(const std::string& name) const {
  return std::find(header.begin(), header.end(), name) != header.end();
}

namespace {

std::vector<std::string> split_fields(const std::string& line) {
  std::vector<std::string> out;
  std::string cur;
  for (char ch : line) {
    if (ch == ',') {
      out.push_back(std::move(cur));
      cur.clear();
    } else if (ch != '\r') {
      cur.push_back(ch);
    }
  }
  out.push_back(std::move(cur));
  return out;
}

std::string trim(const std::string& s) {
  const auto b = s.find_first_not_of(" \t");
  if (b == std::string::npos) return {};
  const auto e = s.find_last_not_of(" \t");
  return s.substr(b, e - b + 1);
}

std::runtime_error row_error(std::size_t line, const std::string& what) {
  return std::runtime_error("line " + std::to_string(line) + ": " + what);
}

}  // namespace

CsvTable read_csv(std::istream& in) {
  CsvTable table;
  std::string line;
  std::size_t lineno = 0;
  bool have_header = false;
  while (std::getline(in, line)) {
    ++lineno;
    if (trim(line).empty()) continue;
    auto fields = split_fields(line);
    for (auto& f : fields) f = trim(f);
    if (!have_header) {
      table.header = std::move(fields);
      have_header = true;
      continue;
    }
    table.rows.push_back(std::move(fields));
    table.lines.push_back(lineno);
  }
  if (!have_header) throw std::runtime_error("empty CSV input");
  return table;
}

CsvTable read_csv_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open '" + path + "'");
  return read_csv(in);
}

double parse_double(const std::string& field) {
  double v = 0.0;
  const char* b = field.data();
  const char* e = b + field.size();
  const auto [p, ec] = std::from_chars(b, e, v);
  if (field.empty() || ec != std::errc{} || p != e || !std::isfinite(v)) {
    throw std::invalid_argument("not a finite number: '" + field + "'");
  }
  return v;
}

long long parse_integer(const std::string& field) {
  long long v = 0;
  const char* b = field.data();
  const char* e = b + field.size();
  const auto [p, ec] = std::from_chars(b, e, v);
  if (field.empty() || ec != std::errc{} || p != e) throw std::invalid_argument("not an integer: '" + field + "'");
  return v;
}

namespace {

struct Columns {
  std::vector<std::size_t> idx;
  std::size_t width = 0;
};

Columns require(const CsvTable& t, std::initializer_list<const char*> names) {
  Columns c;
  for (const char* n : names) c.idx.push_back(t.column(n));
  c.width = t.header.size();
  return c;
}

const std::string& field(const CsvTable& t, std::size_t row, std::size_t col) {
  if (t.rows[row].size() != t.header.size()) {
    throw row_error(t.lines[row], "expected " + std::to_string(t.header.size()) + " fields, found " +
                                      std::to_string(t.rows[row].size()));
  }
  return t.rows[row][col];
}

template <class F>
auto at_line(const CsvTable& t, std::size_t row, F&& f) {
  try {
    return f();
  } catch (const std::invalid_argument& e) {
    throw row_error(t.lines[row], e.what());
  }
}

// Rows must carry t = 1, 2, ... in order.
void check_time(const CsvTable& t, std::size_t row, std::size_t col, std::size_t expected) {
  const long long v = at_line(t, row, [&] { return parse_integer(field(t, row, col)); });
  if (v != static_cast<long long>(expected)) {
    throw row_error(t.lines[row], "expected t=" + std::to_string(expected) + ", found " + std::to_string(v));
  }
}

Regime parse_state(const CsvTable& t, std::size_t row, std::size_t col) {
  const long long v = at_line(t, row, [&] { return parse_integer(field(t, row, col)); });
  if (v != 0 && v != 1) throw row_error(t.lines[row], "state must be 0 or 1");
  return v == 1 ? Regime::flight : Regime::pause;
}

double number(const CsvTable& t, std::size_t row, std::size_t col) {
  return at_line(t, row, [&] { return parse_double(field(t, row, col)); });
}

std::string sanitize(std::string s) {
  for (char& ch : s) {
    if (ch == ',' || ch == '\n' || ch == '\r') ch = ';';
  }
  return s;
}

}  // namespace

RawFixFile read_raw_fixes(std::istream& in) {
  const CsvTable t = read_csv(in);
  const auto c = require(t, {"person_id", "timestamp", "lat", "lon"});
  RawFixFile out;
  for (std::size_t r = 0; r < t.rows.size(); ++r) {
    try {
      RawFix f;
      f.person_id = field(t, r, c.idx[0]);
      if (f.person_id.empty()) throw std::invalid_argument("empty person_id");
      f.timestamp = parse_double(field(t, r, c.idx[1]));
      f.lat = parse_double(field(t, r, c.idx[2]));
      f.lon = parse_double(field(t, r, c.idx[3]));
      if (std::abs(f.lat) > 90.0) throw std::invalid_argument("latitude out of range");
      if (std::abs(f.lon) > 180.0) throw std::invalid_argument("longitude out of range");
      out.fixes.push_back(std::move(f));
    } catch (const std::exception& e) {
      std::string msg = e.what();
      const std::string prefix = "line " + std::to_string(t.lines[r]) + ": ";
      if (msg.rfind(prefix, 0) == 0) msg = msg.substr(prefix.size());
      out.warnings.push_back({t.lines[r], msg});
    }
  }
  return out;
}

void write_raw_fixes(std::ostream& out, const std::vector<RawFix>& fixes) {
  out << "person_id,timestamp,lat,lon\n";
  for (const auto& f : fixes) {
    out << f.person_id << ',' << format_number(f.timestamp) << ',' << format_number(f.lat) << ','
        << format_number(f.lon) << '\n';
  }
}

ObservationSeries read_observations(std::istream& in) {
  const CsvTable t = read_csv(in);
  const auto c = require(t, {"t", "x_km", "y_km", "observed"});
  ObservationSeries obs;
  obs.Y.resize(t.rows.size());
  for (std::size_t r = 0; r < t.rows.size(); ++r) {
    check_time(t, r, c.idx[0], r + 1);
    const long long z = at_line(t, r, [&] { return parse_integer(field(t, r, c.idx[3])); });
    if (z == 1) {
      obs.Y[r] = Point2{number(t, r, c.idx[1]), number(t, r, c.idx[2])};
    } else if (z == 0) {
      if (!field(t, r, c.idx[1]).empty() || !field(t, r, c.idx[2]).empty()) {
        throw row_error(t.lines[r], "coordinates given for an unobserved row");
      }
    } else {
      throw row_error(t.lines[r], "observed must be 0 or 1");
    }
  }
  if (obs.Y.empty()) throw std::runtime_error("observation file has no rows");
  return obs;
}

void write_observations(std::ostream& out, const ObservationSeries& obs) {
  out << "t,x_km,y_km,observed\n";
  for (std::size_t t = 0; t < obs.size(); ++t) {
    out << t + 1 << ',';
    if (obs.Y[t]) {
      out << format_number(obs.Y[t]->x) << ',' << format_number(obs.Y[t]->y) << ",1\n";
    } else {
      out << ",,0\n";
    }
  }
}

LatentTrajectory read_truth(std::istream& in) {
  const CsvTable t = read_csv(in);
  const auto c = require(t, {"t", "x_true", "y_true", "state"});
  LatentTrajectory traj;
  for (std::size_t r = 0; r < t.rows.size(); ++r) {
    check_time(t, r, c.idx[0], r + 1);
    traj.X.push_back({number(t, r, c.idx[1]), number(t, r, c.idx[2])});
    traj.S.push_back(parse_state(t, r, c.idx[3]));
  }
  return traj;
}

void write_truth(std::ostream& out, const LatentTrajectory& truth) {
  out << "t,x_true,y_true,state\n";
  for (std::size_t t = 0; t < truth.size(); ++t) {
    out << t + 1 << ',' << format_number(truth.X[t].x) << ',' << format_number(truth.X[t].y) << ','
        << to_int(truth.S[t]) << '\n';
  }
}

void write_segmentation(std::ostream& out, const BinSegmentation& seg) {
  const auto starts = seg.bin_start_per_time();
  out << "t,x_est,y_est,state,bin_start\n";
  for (std::size_t t = 0; t < seg.X_est.size(); ++t) {
    out << t + 1 << ',' << format_number(seg.X_est[t].x) << ',' << format_number(seg.X_est[t].y) << ','
        << to_int(seg.S_est[t]) << ',' << starts[t] + 1 << '\n';
  }
}

SegmentationTable read_segmentation(std::istream& in) {
  const CsvTable t = read_csv(in);
  const auto c = require(t, {"t", "x_est", "y_est", "state", "bin_start"});
  SegmentationTable out;
  for (std::size_t r = 0; r < t.rows.size(); ++r) {
    check_time(t, r, c.idx[0], r + 1);
    out.X_est.push_back({number(t, r, c.idx[1]), number(t, r, c.idx[2])});
    out.S_est.push_back(parse_state(t, r, c.idx[3]));
    const long long b = at_line(t, r, [&] { return parse_integer(field(t, r, c.idx[4])); });
    if (b < 1 || b > static_cast<long long>(r + 1)) throw row_error(t.lines[r], "bin_start out of range");
    out.bin_start.push_back(static_cast<std::size_t>(b));
  }
  return out;
}

void write_summary(std::ostream& out, const PosteriorSummary& s) {
  out << "t,mean_x,mean_y,lo_x,hi_x,lo_y,hi_y,motion_prob\n";
  for (std::size_t t = 0; t < s.mean.size(); ++t) {
    out << t + 1 << ',' << format_number(s.mean[t].x) << ',' << format_number(s.mean[t].y) << ','
        << format_number(s.lo[t].x) << ',' << format_number(s.hi[t].x) << ',' << format_number(s.lo[t].y) << ','
        << format_number(s.hi[t].y) << ',' << format_number(s.motion_prob[t]) << '\n';
  }
}

PosteriorSummary read_summary(std::istream& in) {
  const CsvTable t = read_csv(in);
  const auto c = require(t, {"t", "mean_x", "mean_y", "lo_x", "hi_x", "lo_y", "hi_y", "motion_prob"});
  PosteriorSummary s;
  for (std::size_t r = 0; r < t.rows.size(); ++r) {
    check_time(t, r, c.idx[0], r + 1);
    s.mean.push_back({number(t, r, c.idx[1]), number(t, r, c.idx[2])});
    s.lo.push_back({number(t, r, c.idx[3]), number(t, r, c.idx[5])});
    s.hi.push_back({number(t, r, c.idx[4]), number(t, r, c.idx[6])});
    const double p = number(t, r, c.idx[7]);
    if (p < 0.0 || p > 1.0) throw row_error(t.lines[r], "motion_prob outside [0, 1]");
    s.motion_prob.push_back(p);
  }
  return s;
}

void write_draws(std::ostream& out, const std::vector<McmcDraw>& draws) {
  out << "draw,t,x,y,s\n";
  for (std::size_t d = 0; d < draws.size(); ++d) {
    const auto& tr = draws[d].trajectory;
    for (std::size_t t = 0; t < tr.size(); ++t) {
      out << d << ',' << t + 1 << ',' << format_number(tr.X[t].x) << ',' << format_number(tr.X[t].y) << ','
          << to_int(tr.S[t]) << '\n';
    }
  }
}

DrawTable read_draws(std::istream& in) {
  const CsvTable t = read_csv(in);
  const auto c = require(t, {"draw", "t", "x", "y", "s"});
  DrawTable out;
  for (std::size_t r = 0; r < t.rows.size(); ++r) {
    const long long d = at_line(t, r, [&] { return parse_integer(field(t, r, c.idx[0])); });
    if (d < 0 || d > static_cast<long long>(out.draws.size())) throw row_error(t.lines[r], "draws out of order");
    if (d == static_cast<long long>(out.draws.size())) out.draws.emplace_back();
    auto& tr = out.draws.back();
    if (d + 1 != static_cast<long long>(out.draws.size())) throw row_error(t.lines[r], "draws out of order");
    check_time(t, r, c.idx[1], tr.size() + 1);
    tr.X.push_back({number(t, r, c.idx[2]), number(t, r, c.idx[3])});
    tr.S.push_back(parse_state(t, r, c.idx[4]));
  }
  return out;
}

void write_per_run(std::ostream& out, const std::vector<std::pair<RunMetrics, RunMetrics>>& pairs) {
  out << "dataset,seed,method,rmsd_total,rmsd_missing,rmsd_observed,misclass_total,misclass_missing,"
         "misclass_observed,realized_missing_fraction,aborted,error\n";
  auto row = [&](const RunMetrics& m) {
    out << m.dataset << ',' << m.seed << ',' << m.method;
    for (double v : m.rmsd) out << ',' << (m.aborted ? "" : format_number(v));
    for (double v : m.misclassification) out << ',' << (m.aborted ? "" : format_number(v));
    out << ',' << format_number(m.realized_missing_fraction) << ',' << (m.aborted ? 1 : 0) << ','
        << sanitize(m.error) << '\n';
  };
  for (const auto& [a, b] : pairs) {
    row(a);
    row(b);
  }
}

void write_benchmark_summary(std::ostream& out, const BenchmarkSummary& s, const std::array<Method, 2>& methods) {
  out << "split,rmsd_ratio,misclass_diff,numerator,denominator,n_datasets,n_excluded\n";
  for (Split sp : kSplits) {
    const auto i = static_cast<std::size_t>(sp);
    out << to_string(sp) << ',' << format_number(s.geo_mean_rmsd_ratio[i]) << ','
        << format_number(s.mean_misclass_diff[i]) << ',' << to_string(methods[0]) << ',' << to_string(methods[1])
        << ',' << s.n_datasets << ',' << s.n_excluded << '\n';
  }
}

std::string read_text_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw std::runtime_error("cannot open '" + path + "'");
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

void write_text_file(const std::string& path, const std::string& text) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::runtime_error("cannot write '" + path + "'");
  out << text;
  if (!out) throw std::runtime_error("write failed for '" + path + "'");
}

}  // namespace trajsmooth
