#include "censeg/svg.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <sstream>

#include "censeg/error.hpp"

namespace censeg {

namespace {

constexpr double kWidth = 800.0;
constexpr double kHeight = 420.0;
constexpr double kMargin = 55.0;

const char* level_color(int level) {
    switch (level) {
        case 1: return "#d62728";
        case 2: return "#ff7f0e";
        case 3: return "#2ca02c";
        case 4: return "#1f77b4";
        default: return "#7f7f7f";
    }
}

struct Frame {
    double x0, x1, y0, y1;  // data ranges

    double px(double x) const {
        const double t = x1 > x0 ? (x - x0) / (x1 - x0) : 0.5;
        return kMargin + t * (kWidth - 2 * kMargin);
    }
    double py(double y) const {
        const double t = y1 > y0 ? (y - y0) / (y1 - y0) : 0.5;
        return kHeight - kMargin - t * (kHeight - 2 * kMargin);
    }
};

std::string header() {
    std::ostringstream s;
    s << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << kWidth << "\" height=\"" << kHeight
      << "\" viewBox=\"0 0 " << kWidth << " " << kHeight << "\">\n"
      << "<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n";
    return s.str();
}

void axes(std::ostringstream& s, const std::string& x_label, const std::string& y_label) {
    char buf[256];
    std::snprintf(buf, sizeof buf,
                  "<line x1=\"%.1f\" y1=\"%.1f\" x2=\"%.1f\" y2=\"%.1f\" stroke=\"black\"/>\n",
                  kMargin, kHeight - kMargin, kWidth - kMargin, kHeight - kMargin);
    s << buf;
    std::snprintf(buf, sizeof buf,
                  "<line x1=\"%.1f\" y1=\"%.1f\" x2=\"%.1f\" y2=\"%.1f\" stroke=\"black\"/>\n",
                  kMargin, kMargin, kMargin, kHeight - kMargin);
    s << buf;
    std::snprintf(buf, sizeof buf,
                  "<text x=\"%.1f\" y=\"%.1f\" font-size=\"13\" text-anchor=\"middle\">%s</text>\n",
                  kWidth / 2, kHeight - 12.0, x_label.c_str());
    s << buf;
    std::snprintf(buf, sizeof buf,
                  "<text x=\"14\" y=\"%.1f\" font-size=\"13\" text-anchor=\"middle\" "
                  "transform=\"rotate(-90 14 %.1f)\">%s</text>\n",
                  kHeight / 2, kHeight / 2, y_label.c_str());
    s << buf;
}

}  // namespace

std::string svg_segmentation_plot(const CoarseSeries& series, const Segmentation& seg) {
    if (series.empty()) fail(errc::invalid, "svg: empty series");
    double ymin = 1e300, ymax = -1e300;
    for (const auto& e : series.entries) {
        ymin = std::min(ymin, e.y_bar);
        ymax = std::max(ymax, e.y_bar);
    }
    Frame f{static_cast<double>(series.entries.front().day),
            static_cast<double>(series.entries.back().day), std::log10(ymin), std::log10(ymax)};
    std::ostringstream s;
    s << header();
    char buf[256];
    for (const auto& e : series.entries) {
        std::snprintf(buf, sizeof buf,
                      "<circle cx=\"%.2f\" cy=\"%.2f\" r=\"1.6\" fill=\"%s\"/>\n",
                      f.px(static_cast<double>(e.day)), f.py(std::log10(e.y_bar)),
                      e.censored ? "#9ecae1" : "#08519c");
        s << buf;
    }
    for (const std::size_t b : seg.breaks) {
        const double x = f.px(static_cast<double>(series.entries[b].day));
        std::snprintf(buf, sizeof buf,
                      "<line x1=\"%.2f\" y1=\"%.1f\" x2=\"%.2f\" y2=\"%.1f\" stroke=\"#d62728\" "
                      "stroke-dasharray=\"4 3\"/>\n",
                      x, kMargin, x, kHeight - kMargin);
        s << buf;
        std::snprintf(buf, sizeof buf,
                      "<text x=\"%.2f\" y=\"%.1f\" font-size=\"10\" fill=\"#d62728\" "
                      "text-anchor=\"middle\">%s</text>\n",
                      x, kMargin - 6.0, format_date(series.entries[b].day).c_str());
        s << buf;
    }
    axes(s, "date", "log10 daily max (ug/L)");
    s << "</svg>\n";
    return s.str();
}

std::string svg_elbow_plot(std::span<const std::pair<double, double>> points,
                           std::size_t knee_index, const std::string& x_label,
                           const std::string& y_label) {
    if (points.empty()) fail(errc::invalid, "svg: empty elbow curve");
    double xmin = 1e300, xmax = -1e300, ymin = 1e300, ymax = -1e300;
    for (const auto& [x, y] : points) {
        xmin = std::min(xmin, x);
        xmax = std::max(xmax, x);
        ymin = std::min(ymin, y);
        ymax = std::max(ymax, y);
    }
    Frame f{xmin, xmax, ymin, ymax};
    std::ostringstream s;
    s << header();
    s << "<polyline fill=\"none\" stroke=\"#1f77b4\" points=\"";
    char buf[256];
    for (const auto& [x, y] : points) {
        std::snprintf(buf, sizeof buf, "%.2f,%.2f ", f.px(x), f.py(y));
        s << buf;
    }
    s << "\"/>\n";
    for (std::size_t i = 0; i < points.size(); ++i) {
        std::snprintf(buf, sizeof buf, "<circle cx=\"%.2f\" cy=\"%.2f\" r=\"%s\" fill=\"%s\"/>\n",
                      f.px(points[i].first), f.py(points[i].second),
                      i == knee_index ? "5" : "3", i == knee_index ? "#d62728" : "#1f77b4");
        s << buf;
    }
    axes(s, x_label, y_label);
    s << "</svg>\n";
    return s.str();
}

std::string svg_pareto_plot(std::span<const ClusterScore> scores) {
    if (scores.empty()) fail(errc::invalid, "svg: no cluster scores");
    double xmax = 0.0, ymax = 0.0;
    for (const auto& c : scores) {
        xmax = std::max(xmax, c.w_bar);
        ymax = std::max(ymax, c.i_bar);
    }
    Frame f{0.0, xmax > 0 ? xmax : 1.0, 0.0, ymax > 0 ? ymax : 1.0};
    std::ostringstream s;
    s << header();
    char buf[320];
    for (const auto& c : scores) {
        std::snprintf(buf, sizeof buf,
                      "<circle cx=\"%.2f\" cy=\"%.2f\" r=\"5\" fill=\"%s\" stroke=\"black\" "
                      "stroke-width=\"0.5\"/>\n",
                      f.px(c.w_bar), f.py(c.i_bar), level_color(c.pareto_level));
        s << buf;
        std::snprintf(buf, sizeof buf,
                      "<text x=\"%.2f\" y=\"%.2f\" font-size=\"10\">c%zu (L%d)</text>\n",
                      f.px(c.w_bar) + 7.0, f.py(c.i_bar) - 4.0, c.cluster_id, c.pareto_level);
        s << buf;
    }
    axes(s, "heterogeneity W", "intensity I");
    s << "</svg>\n";
    return s.str();
}

std::string svg_station_map(const StationGraph& g, const Clustering& clustering,
                            std::span<const ClusterScore> scores) {
    if (g.station_count() == 0) fail(errc::invalid, "svg: empty graph");
    std::vector<int> level_of_cluster(clustering.n_clusters, 0);
    for (const auto& c : scores)
        if (c.cluster_id < level_of_cluster.size()) level_of_cluster[c.cluster_id] = c.pareto_level;
    double xmin = 1e300, xmax = -1e300, ymin = 1e300, ymax = -1e300;
    for (const auto& st : g.stations()) {
        xmin = std::min(xmin, st.x);
        xmax = std::max(xmax, st.x);
        ymin = std::min(ymin, st.y);
        ymax = std::max(ymax, st.y);
    }
    Frame f{xmin, xmax > xmin ? xmax : xmin + 1.0, ymin, ymax > ymin ? ymax : ymin + 1.0};
    std::ostringstream s;
    s << header();
    char buf[320];
    for (std::size_t i = 0; i < g.station_count(); ++i) {
        const auto& st = g.stations()[i];
        const int level = level_of_cluster[clustering.assignment[i]];
        std::snprintf(buf, sizeof buf,
                      "<circle cx=\"%.2f\" cy=\"%.2f\" r=\"5\" fill=\"%s\" stroke=\"black\" "
                      "stroke-width=\"0.5\"><title>%s</title></circle>\n",
                      f.px(st.x), f.py(st.y), level_color(level), st.id.c_str());
        s << buf;
    }
    axes(s, "x (m)", "y (m)");
    s << "</svg>\n";
    return s.str();
}

}  // namespace censeg
