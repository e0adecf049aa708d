#pragma once

#include <string>
#include <vector>

#include "trajsmooth/config.hpp"
#include "trajsmooth/gibbs.hpp"
#include "trajsmooth/io.hpp"

namespace trajsmooth {

/// x(t) and y(t) panels: motion-probability shading in purple, sampled draws in grey,
/// observations in blue and the posterior mean in red.
std::string plot_smoother_svg(const ObservationSeries& obs, const PosteriorSummary& summary,
                              const std::vector<LatentTrajectory>& draws, const PlotOptions& opt);

/// x(t) and y(t) panels of a binning result with travel periods shaded.
std::string plot_segmentation_svg(const ObservationSeries& obs, const SegmentationTable& seg,
                                  const PlotOptions& opt);

/// Four panels: binning x/y on top, smoother x/y below.
std::string plot_comparison_svg(const ObservationSeries& obs, const SegmentationTable& seg,
                                const PosteriorSummary& summary, const std::vector<LatentTrajectory>& draws,
                                const PlotOptions& opt);

}  // namespace trajsmooth
