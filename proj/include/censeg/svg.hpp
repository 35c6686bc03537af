#ifndef CENSEG_SVG_HPP
#define CENSEG_SVG_HPP

#include <span>
#include <string>
#include <utility>
#include <vector>

#include "censeg/anomaly.hpp"
#include "censeg/changepoint.hpp"
#include "censeg/ingest.hpp"
#include "censeg/station_graph.hpp"

namespace censeg {

// Coarse series on a log10 y scale with vertical lines at the break dates.
std::string svg_segmentation_plot(const CoarseSeries& series, const Segmentation& seg);

// Score-versus-complexity curve with the selected knee highlighted.
std::string svg_elbow_plot(std::span<const std::pair<double, double>> points,
                           std::size_t knee_index, const std::string& x_label,
                           const std::string& y_label);

// (W_bar, I_bar) scatter colored by Pareto level.
std::string svg_pareto_plot(std::span<const ClusterScore> scores);

// Station map colored by the Pareto level of each station's cluster.
std::string svg_station_map(const StationGraph& g, const Clustering& clustering,
                            std::span<const ClusterScore> scores);

}  // namespace censeg

#endif
