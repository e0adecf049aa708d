#include "trajsmooth/binning.hpp"

#include <algorithm>
#include <limits>
#include <span>
#include <stdexcept>

namespace trajsmooth {

std::size_t BinSegmentation::stable_count() const {
  std::size_t n = 0;
  for (const auto& b : bins) n += b.kind == BinKind::stable;
  return n;
}

std::size_t BinSegmentation::momentary_count() const { return bins.size() - stable_count(); }

std::vector<std::size_t> BinSegmentation::bin_start_per_time() const {
  std::vector<std::size_t> out(X_est.size());
  for (const auto& b : bins) {
    for (std::size_t t = b.first; t <= b.last; ++t) out[t] = b.first;
  }
  return out;
}

std::vector<Point2> interpolate_gaps(const ObservationSeries& obs) {
  const std::size_t T = obs.size();
  std::vector<Point2> out(T);
  std::size_t prev = T;  // last observed index, T = none yet
  for (std::size_t t = 0; t < T; ++t) {
    if (!obs.observed(t)) continue;
    out[t] = *obs.Y[t];
    if (prev == T) {
      for (std::size_t u = 0; u < t; ++u) out[u] = out[t];
    } else {
      const double span = static_cast<double>(t - prev);
      for (std::size_t u = prev + 1; u < t; ++u) {
        const double w = static_cast<double>(u - prev) / span;
        out[u] = out[prev] + w * (out[t] - out[prev]);
      }
    }
    prev = t;
  }
  if (prev == T) throw std::domain_error("interpolate_gaps: series has no observed positions");
  for (std::size_t u = prev + 1; u < T; ++u) out[u] = out[prev];
  return out;
}

namespace {

// A*/A. A zero-area hull (a point or a segment) that gains area or extent has grown
// without bound; one that gains neither has not grown.
double growth_ratio(double grown, double base, bool extent_grew) {
  if (base > 0.0) return grown / base;
  return grown > 0.0 || extent_grew ? std::numeric_limits<double>::infinity() : 1.0;
}

class Binner {
 public:
  Binner(const std::vector<Point2>& y, const BinningConfig& cfg) : y_(y), cfg_(cfg) {
    seg_.X_est.resize(y.size());
    seg_.S_est.resize(y.size());
  }

  BinSegmentation run() {
    const std::size_t T = y_.size();
    // The current bin B is always the contiguous range [s, s + n); B* = [s, t].
    std::size_t s = 0;
    std::size_t n = 0;
    double A = 0.0;
    for (std::size_t t = 0; t < T; ++t) {
      if (n < 3) {
        ++n;
        continue;
      }
      if (n == 3) A = area(s, t);
      const double A_star = area(s, t + 1);
      const bool extent_grew = A == 0.0 && A_star == 0.0 && outside_box(s, t, y_[t]);
      if (growth_ratio(A_star, A, extent_grew) > cfg_.Omega) {
        if (n > 3) {
          // the hull grew much: close the stable bin [s, t-1] and open a new one at t
          emit_stable(s, t - 1);
          s = t;
          n = 1;
        } else {
          // three members and a large jump: the oldest is a travel point
          emit_momentary(s);
          ++s;
        }
      } else if (n == 3 || n == 4) {
        // onset test: how much of B*'s hull is owed to its oldest member
        const double A_tilde = area(s + 1, t + 1);
        if (A_star - A_tilde > cfg_.omega) {
          emit_momentary(s);
          ++s;
          A = A_tilde;
        } else {
          ++n;
          A = A_star;
        }
      } else {
        ++n;
        A = A_star;
      }
    }
    // end of data: the open bin is closed with the same membership rule
    if (n > 3) {
      emit_stable(s, s + n - 1);
    } else {
      for (std::size_t u = s; u < s + n; ++u) emit_momentary(u);
    }
    return std::move(seg_);
  }

 private:
  double area(std::size_t first, std::size_t end) const {
    return hull_area(std::span<const Point2>(y_.data() + first, end - first));
  }

  // Outside the bounding box of [first, end). For collinear members this box is spanned
  // by their segment.
  bool outside_box(std::size_t first, std::size_t end, const Point2& p) const {
    double lx = y_[first].x, hx = lx, ly = y_[first].y, hy = ly;
    for (std::size_t u = first + 1; u < end; ++u) {
      lx = std::min(lx, y_[u].x);
      hx = std::max(hx, y_[u].x);
      ly = std::min(ly, y_[u].y);
      hy = std::max(hy, y_[u].y);
    }
    return p.x < lx || p.x > hx || p.y < ly || p.y > hy;
  }

  void emit_stable(std::size_t first, std::size_t last) {
    const Point2 center = points_centroid(std::span<const Point2>(y_.data() + first, last - first + 1));
    for (std::size_t u = first; u <= last; ++u) {
      seg_.X_est[u] = center;
      seg_.S_est[u] = Regime::pause;
    }
    seg_.bins.push_back({first, last, center, BinKind::stable});
    seg_.start_times.push_back(first);
  }

  void emit_momentary(std::size_t t) {
    seg_.X_est[t] = y_[t];
    seg_.S_est[t] = Regime::flight;
    seg_.bins.push_back({t, t, y_[t], BinKind::momentary});
    seg_.start_times.push_back(t);
  }

  const std::vector<Point2>& y_;
  BinningConfig cfg_;
  BinSegmentation seg_;
};

}  // namespace

BinSegmentation run_binning(const std::vector<Point2>& filled, const BinningConfig& cfg) {
  if (filled.size() < 4) throw std::domain_error("run_binning: need at least 4 positions");
  if (!cfg.valid()) throw std::invalid_argument("run_binning: require Omega > 1 and omega > 0");
  return Binner(filled, cfg).run();
}

std::vector<Regime> binning_to_labels(const BinSegmentation& seg) {
  std::vector<Regime> labels(seg.X_est.size(), Regime::pause);
  for (const auto& b : seg.bins) {
    const Regime r = b.kind == BinKind::stable ? Regime::pause : Regime::flight;
    for (std::size_t t = b.first; t <= b.last; ++t) labels[t] = r;
  }
  return labels;
}

}  // namespace trajsmooth
