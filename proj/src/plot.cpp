#include "trajsmooth/plot.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <limits>
#include <sstream>
#include <stdexcept>

namespace trajsmooth {

namespace {

std::string fmt(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.2f", v);
  return buf;
}

std::string label(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.3g", v);
  return buf;
}

struct Range {
  double lo = std::numeric_limits<double>::infinity();
  double hi = -std::numeric_limits<double>::infinity();

  void add(double v) {
    lo = std::min(lo, v);
    hi = std::max(hi, v);
  }
  void finish() {
    if (!(lo <= hi)) {
      lo = -1.0;
      hi = 1.0;
    } else if (hi - lo < 1e-9) {
      lo -= 1.0;
      hi += 1.0;
    } else {
      const double pad = 0.05 * (hi - lo);
      lo -= pad;
      hi += pad;
    }
  }
};

using Coord = double Point2::*;

struct Panel {
  double left, top, width, height;
  std::size_t T;
  Range v;
  std::string title;

  double px(double t) const {
    return left + (T > 1 ? t / static_cast<double>(T - 1) : 0.5) * width;
  }
  double py(double value) const { return top + (v.hi - value) / (v.hi - v.lo) * height; }
};

class Svg {
 public:
  Svg(double w, double h) : w_(w), h_(h) {}

  void frame(const Panel& p) {
    body_ << "<rect class=\"frame\" x=\"" << fmt(p.left) << "\" y=\"" << fmt(p.top) << "\" width=\""
          << fmt(p.width) << "\" height=\"" << fmt(p.height) << "\" fill=\"none\" stroke=\"#444\"/>\n";
    body_ << "<text x=\"" << fmt(p.left) << "\" y=\"" << fmt(p.top - 6) << "\" font-size=\"12\">" << p.title
          << "</text>\n";
    for (int i = 0; i <= 4; ++i) {
      const double value = p.v.lo + (p.v.hi - p.v.lo) * i / 4.0;
      body_ << "<text x=\"" << fmt(p.left - 6) << "\" y=\"" << fmt(p.py(value) + 4)
            << "\" font-size=\"10\" text-anchor=\"end\">" << label(value) << "</text>\n";
    }
    const std::size_t step = p.T >= 1440 ? 240 : std::max<std::size_t>(1, p.T / 6);
    for (std::size_t t = 0; t < p.T; t += step) {
      body_ << "<text x=\"" << fmt(p.px(static_cast<double>(t))) << "\" y=\"" << fmt(p.top + p.height + 14)
            << "\" font-size=\"10\" text-anchor=\"middle\">" << t + 1 << "</text>\n";
    }
  }

  // One half-step-wide rectangle around each time step in [first, last].
  void shade(const Panel& p, std::size_t first, std::size_t last, double opacity, const char* cls) {
    const double half = p.T > 1 ? 0.5 * p.width / static_cast<double>(p.T - 1) : 0.5 * p.width;
    const double x0 = std::max(p.left, p.px(static_cast<double>(first)) - half);
    const double x1 = std::min(p.left + p.width, p.px(static_cast<double>(last)) + half);
    body_ << "<rect class=\"" << cls << "\" x=\"" << fmt(x0) << "\" y=\"" << fmt(p.top) << "\" width=\""
          << fmt(x1 - x0) << "\" height=\"" << fmt(p.height) << "\" fill=\"#7b2d8e\" fill-opacity=\""
          << fmt(opacity) << "\"/>\n";
  }

  void polyline(const Panel& p, const std::vector<Point2>& pts, Coord c, const char* cls, const char* color,
                double stroke, double opacity) {
    body_ << "<polyline class=\"" << cls << "\" fill=\"none\" stroke=\"" << color << "\" stroke-width=\""
          << fmt(stroke) << "\" stroke-opacity=\"" << fmt(opacity) << "\" points=\"";
    for (std::size_t t = 0; t < pts.size(); ++t) {
      if (t) body_ << ' ';
      body_ << fmt(p.px(static_cast<double>(t))) << ',' << fmt(p.py(pts[t].*c));
    }
    body_ << "\"/>\n";
  }

  void observations(const Panel& p, const ObservationSeries& obs, Coord c) {
    for (std::size_t t = 0; t < obs.size(); ++t) {
      if (!obs.Y[t]) continue;
      body_ << "<circle class=\"obs\" cx=\"" << fmt(p.px(static_cast<double>(t))) << "\" cy=\""
            << fmt(p.py((*obs.Y[t]).*c)) << "\" r=\"1.3\" fill=\"#1f5fbf\"/>\n";
    }
  }

  std::string str() const {
    std::ostringstream out;
    out << "<?xml version=\"1.0\" encoding=\"UTF-8\"?>\n"
        << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << fmt(w_) << "\" height=\"" << fmt(h_)
        << "\" viewBox=\"0 0 " << fmt(w_) << ' ' << fmt(h_) << "\">\n"
        << "<rect class=\"background\" x=\"0\" y=\"0\" width=\"" << fmt(w_) << "\" height=\"" << fmt(h_)
        << "\" fill=\"white\"/>\n"
        << body_.str() << "</svg>\n";
    return out.str();
  }

 private:
  double w_, h_;
  std::ostringstream body_;
};

void check_length(std::size_t T, std::size_t n, const char* what) {
  if (n != 0 && n != T) {
    throw std::invalid_argument(std::string("plot: ") + what + " has " + std::to_string(n) + " rows, expected " +
                                std::to_string(T));
  }
}

Range value_range(Coord c, const ObservationSeries& obs, std::initializer_list<const std::vector<Point2>*> series,
                  const std::vector<LatentTrajectory>& draws) {
  Range r;
  for (const auto& y : obs.Y) {
    if (y) r.add((*y).*c);
  }
  for (const auto* s : series) {
    for (const auto& pt : *s) r.add(pt.*c);
  }
  for (const auto& d : draws) {
    for (const auto& pt : d.X) r.add(pt.*c);
  }
  r.finish();
  return r;
}

std::vector<const LatentTrajectory*> thin(const std::vector<LatentTrajectory>& draws, std::size_t max) {
  std::vector<const LatentTrajectory*> out;
  if (draws.empty() || max == 0) return out;
  const std::size_t n = std::min(max, draws.size());
  for (std::size_t i = 0; i < n; ++i) out.push_back(&draws[i * draws.size() / n]);
  return out;
}

// Runs of equal motion probability become single rectangles; zero runs are skipped.
void shade_probability(Svg& svg, const Panel& p, const std::vector<double>& prob) {
  std::size_t t = 0;
  while (t < prob.size()) {
    std::size_t e = t;
    while (e + 1 < prob.size() && prob[e + 1] == prob[t]) ++e;
    if (prob[t] > 0.0) svg.shade(p, t, e, prob[t], "motion");
    t = e + 1;
  }
}

void shade_travel(Svg& svg, const Panel& p, const std::vector<Regime>& S) {
  std::size_t t = 0;
  while (t < S.size()) {
    if (S[t] != Regime::flight) {
      ++t;
      continue;
    }
    std::size_t e = t;
    while (e + 1 < S.size() && S[e + 1] == Regime::flight) ++e;
    svg.shade(p, t, e, 0.35, "travel");
    t = e + 1;
  }
}

constexpr double kMarginLeft = 60.0;
constexpr double kMarginRight = 20.0;
constexpr double kMarginTop = 28.0;
constexpr double kGap = 44.0;

std::vector<Panel> layout(const PlotOptions& opt, std::size_t rows, std::size_t T) {
  const double h = (opt.height - kMarginTop - kGap * static_cast<double>(rows)) / static_cast<double>(rows);
  if (h <= 10.0 || opt.width <= kMarginLeft + kMarginRight + 10.0) {
    throw std::invalid_argument("plot: dimensions too small for the layout");
  }
  std::vector<Panel> out;
  for (std::size_t r = 0; r < rows; ++r) {
    Panel p{kMarginLeft, kMarginTop + static_cast<double>(r) * (h + kGap), opt.width - kMarginLeft - kMarginRight,
            h, T, {}, {}};
    out.push_back(p);
  }
  return out;
}

void smoother_panel(Svg& svg, Panel p, Coord c, const ObservationSeries& obs, const PosteriorSummary& s,
                    const std::vector<LatentTrajectory>& draws, const PlotOptions& opt) {
  const auto shown = thin(draws, opt.max_draws);
  std::vector<LatentTrajectory> kept;
  for (const auto* d : shown) kept.push_back(*d);
  p.v = value_range(c, obs, {&s.mean}, kept);
  svg.frame(p);
  shade_probability(svg, p, s.motion_prob);
  for (const auto& d : kept) svg.polyline(p, d.X, c, "draw", "#888888", 0.6, 0.35);
  svg.observations(p, obs, c);
  svg.polyline(p, s.mean, c, "estimate", "#d62728", 1.4, 1.0);
}

void segmentation_panel(Svg& svg, Panel p, Coord c, const ObservationSeries& obs, const SegmentationTable& seg) {
  p.v = value_range(c, obs, {&seg.X_est}, {});
  svg.frame(p);
  shade_travel(svg, p, seg.S_est);
  svg.observations(p, obs, c);
  svg.polyline(p, seg.X_est, c, "estimate", "#d62728", 1.4, 1.0);
}

}  // namespace

std::string plot_smoother_svg(const ObservationSeries& obs, const PosteriorSummary& summary,
                              const std::vector<LatentTrajectory>& draws, const PlotOptions& opt) {
  const std::size_t T = summary.mean.size();
  if (T == 0) throw std::invalid_argument("plot: empty summary");
  check_length(T, obs.size(), "observation series");
  for (const auto& d : draws) check_length(T, d.size(), "draw");
  Svg svg(opt.width, opt.height);
  auto panels = layout(opt, 2, T);
  panels[0].title = "x (km)";
  panels[1].title = "y (km)";
  smoother_panel(svg, panels[0], &Point2::x, obs, summary, draws, opt);
  smoother_panel(svg, panels[1], &Point2::y, obs, summary, draws, opt);
  return svg.str();
}

std::string plot_segmentation_svg(const ObservationSeries& obs, const SegmentationTable& seg,
                                  const PlotOptions& opt) {
  const std::size_t T = seg.X_est.size();
  if (T == 0) throw std::invalid_argument("plot: empty segmentation");
  check_length(T, obs.size(), "observation series");
  Svg svg(opt.width, opt.height);
  auto panels = layout(opt, 2, T);
  panels[0].title = "x (km)";
  panels[1].title = "y (km)";
  segmentation_panel(svg, panels[0], &Point2::x, obs, seg);
  segmentation_panel(svg, panels[1], &Point2::y, obs, seg);
  return svg.str();
}

std::string plot_comparison_svg(const ObservationSeries& obs, const SegmentationTable& seg,
                                const PosteriorSummary& summary, const std::vector<LatentTrajectory>& draws,
                                const PlotOptions& opt) {
  const std::size_t T = summary.mean.size();
  if (T == 0) throw std::invalid_argument("plot: empty summary");
  check_length(T, seg.X_est.size(), "segmentation");
  check_length(T, obs.size(), "observation series");
  for (const auto& d : draws) check_length(T, d.size(), "draw");
  Svg svg(opt.width, opt.height);
  auto panels = layout(opt, 4, T);
  panels[0].title = "binning: x (km)";
  panels[1].title = "binning: y (km)";
  panels[2].title = "smoother: x (km)";
  panels[3].title = "smoother: y (km)";
  segmentation_panel(svg, panels[0], &Point2::x, obs, seg);
  segmentation_panel(svg, panels[1], &Point2::y, obs, seg);
  smoother_panel(svg, panels[2], &Point2::x, obs, summary, draws, opt);
  smoother_panel(svg, panels[3], &Point2::y, obs, summary, draws, opt);
  return svg.str();
}

}  // namespace trajsmooth
