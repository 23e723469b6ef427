#include "dflsim/svg_plot.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <limits>
#include <map>
#include <sstream>

#include "dflsim/errors.hpp"

namespace dflsim {

namespace {

constexpr double kWidth = 760.0;
constexpr double kHeight = 480.0;
constexpr double kLeft = 70.0;
constexpr double kRight = kWidth - 170.0; // room for the legend
constexpr double kTop = 40.0;
constexpr double kBottom = kHeight - 55.0;

const char* kPalette[] = {"#1f77b4", "#d62728", "#2ca02c", "#ff7f0e",
                          "#9467bd", "#8c564b", "#e377c2", "#7f7f7f"};

std::string num(double v) {
    char buf[48];
    std::snprintf(buf, sizeof(buf), "%.6g", v);
    return buf;
}

struct Series {
    std::string label;
    std::vector<double> x;
    std::vector<double> mean;
    std::vector<double> std_dev;
};

bool is_numeric_seed(const std::string& s) {
    if (s.empty()) return false;
    return s.find_first_not_of("0123456789") == std::string::npos;
}

void mean_std(const std::vector<double>& v, double& mean, double& sd) {
    mean = 0.0;
    for (double x : v) mean += x;
    mean /= static_cast<double>(v.size());
    double var = 0.0;
    for (double x : v) var += (x - mean) * (x - mean);
    sd = std::sqrt(var / static_cast<double>(v.size()));
}

std::vector<Series> build_iter_series(const std::vector<ResultRow>& table) {
    // (sweep_value, scheme) -> seed -> iteration -> cost
    std::map<std::pair<double, std::string>, std::map<std::string, std::map<int, double>>> groups;
    for (const ResultRow& r : table) {
        if (!is_numeric_seed(r.seed) || r.iteration < 0) continue;
        groups[{r.sweep_value, r.scheme}][r.seed][r.iteration] = r.c_global;
    }
    if (groups.empty()) throw validation_error("no per-iteration data rows for cost_vs_iter");
    const bool multi_sweep = [&] {
        double first = groups.begin()->first.first;
        for (const auto& [key, unused] : groups) {
            if (key.first != first) return true;
        }
        return false;
    }();

    std::vector<Series> series;
    for (const auto& [key, seeds] : groups) {
        Series s;
        s.label = key.second;
        if (multi_sweep) s.label += "@" + num(key.first);
        int max_iter = 0;
        for (const auto& [seed, curve] : seeds) max_iter = std::max(max_iter, curve.rbegin()->first);
        for (int t = 0; t <= max_iter; ++t) {
            std::vector<double> vals;
            for (const auto& [seed, curve] : seeds) {
                auto it = curve.upper_bound(t); // carry the last recorded cost forward
                if (it == curve.begin()) continue;
                --it;
                if (std::isfinite(it->second)) vals.push_back(it->second);
            }
            if (vals.empty()) continue;
            double m = 0.0, sd = 0.0;
            mean_std(vals, m, sd);
            s.x.push_back(t);
            s.mean.push_back(m);
            s.std_dev.push_back(sd);
        }
        if (!s.x.empty()) series.push_back(std::move(s));
    }
    return series;
}

std::vector<Series> build_sweep_series(const std::vector<ResultRow>& table) {
    // scheme -> sweep_value -> final cost per seed (max iteration per seed)
    std::map<std::string, std::map<double, std::map<std::string, std::pair<int, double>>>> groups;
    for (const ResultRow& r : table) {
        if (!is_numeric_seed(r.seed) || r.iteration < 0) continue;
        auto& slot = groups[r.scheme][r.sweep_value][r.seed];
        if (slot.first <= r.iteration) slot = {r.iteration, r.c_global};
    }
    if (groups.empty()) throw validation_error("no data rows for cost_vs_sweep");

    std::vector<Series> series;
    for (const auto& [scheme, by_value] : groups) {
        Series s;
        s.label = scheme;
        for (const auto& [value, seeds] : by_value) {
            std::vector<double> vals;
            for (const auto& [seed, iter_cost] : seeds) {
                if (std::isfinite(iter_cost.second)) vals.push_back(iter_cost.second);
            }
            if (vals.empty()) continue;
            double m = 0.0, sd = 0.0;
            mean_std(vals, m, sd);
            s.x.push_back(value);
            s.mean.push_back(m);
            s.std_dev.push_back(sd);
        }
        if (!s.x.empty()) series.push_back(std::move(s));
    }
    return series;
}

} // namespace

PlotKind plot_kind_from_string(const std::string& name) {
    if (name == "cost_vs_iter") return PlotKind::CostVsIter;
    if (name == "cost_vs_sweep") return PlotKind::CostVsSweep;
    throw validation_error("unknown plot kind '" + name + "'");
}

std::string render_plot(const std::vector<ResultRow>& table, PlotKind kind) {
    const std::vector<Series> series =
        kind == PlotKind::CostVsIter ? build_iter_series(table) : build_sweep_series(table);

    double x_min = std::numeric_limits<double>::infinity();
    double x_max = -x_min;
    double y_min = x_min;
    double y_max = -x_min;
    bool nonnegative = true;
    for (const Series& s : series) {
        for (std::size_t i = 0; i < s.x.size(); ++i) {
            x_min = std::min(x_min, s.x[i]);
            x_max = std::max(x_max, s.x[i]);
            y_min = std::min(y_min, s.mean[i] - s.std_dev[i]);
            y_max = std::max(y_max, s.mean[i] + s.std_dev[i]);
            if (s.mean[i] < 0.0) nonnegative = false;
        }
    }
    if (x_min == x_max) {
        x_min -= 0.5;
        x_max += 0.5;
    }
    if (y_min == y_max) {
        y_min -= 0.5;
        y_max += 0.5;
    }
    const double y_pad = 0.05 * (y_max - y_min);
    y_min -= y_pad;
    y_max += y_pad;
    // a std band on a nonnegative quantity should not drag the axis below zero
    if (nonnegative && y_min < 0.0) y_min = 0.0;

    auto sx = [&](double x) { return kLeft + (x - x_min) / (x_max - x_min) * (kRight - kLeft); };
    auto sy = [&](double y) {
        const double clamped = std::clamp(y, y_min, y_max);
        return kBottom - (clamped - y_min) / (y_max - y_min) * (kBottom - kTop);
    };

    std::ostringstream svg;
    svg << "<?xml version=\"1.0\" encoding=\"UTF-8\"?>\n"
        << "<svg xmlns=\"http://www.w3.org/2000/svg\" version=\"1.1\" width=\"" << kWidth
        << "\" height=\"" << kHeight << "\" viewBox=\"0 0 " << kWidth << " " << kHeight << "\">\n"
        << "<rect x=\"0\" y=\"0\" width=\"" << kWidth << "\" height=\"" << kHeight
        << "\" fill=\"white\"/>\n";

    // axes + ticks
    svg << "<line x1=\"" << kLeft << "\" y1=\"" << kBottom << "\" x2=\"" << kRight << "\" y2=\""
        << kBottom << "\" stroke=\"black\"/>\n"
        << "<line x1=\"" << kLeft << "\" y1=\"" << kTop << "\" x2=\"" << kLeft << "\" y2=\""
        << kBottom << "\" stroke=\"black\"/>\n";
    // integer x ticks when the axis is a small integer range (iteration plots)
    std::vector<double> x_ticks;
    const bool integral_x = x_min == std::floor(x_min) && x_max == std::floor(x_max) &&
                            x_max - x_min >= 1.0 && x_max - x_min <= 10.0;
    if (integral_x) {
        for (double t = x_min; t <= x_max; t += 1.0) x_ticks.push_back(t);
    } else {
        for (int t = 0; t <= 5; ++t) x_ticks.push_back(x_min + (x_max - x_min) * t / 5.0);
    }
    for (double fx : x_ticks) {
        svg << "<line x1=\"" << num(sx(fx)) << "\" y1=\"" << kBottom << "\" x2=\"" << num(sx(fx))
            << "\" y2=\"" << kBottom + 5 << "\" stroke=\"black\"/>\n"
            << "<text x=\"" << num(sx(fx)) << "\" y=\"" << kBottom + 20
            << "\" font-size=\"11\" text-anchor=\"middle\">" << num(fx) << "</text>\n";
    }
    for (int t = 0; t <= 5; ++t) {
        const double fy = y_min + (y_max - y_min) * t / 5.0;
        svg << "<line x1=\"" << kLeft - 5 << "\" y1=\"" << num(sy(fy)) << "\" x2=\"" << kLeft
            << "\" y2=\"" << num(sy(fy)) << "\" stroke=\"black\"/>\n"
            << "<text x=\"" << kLeft - 8 << "\" y=\"" << num(sy(fy) + 4)
            << "\" font-size=\"11\" text-anchor=\"end\">" << num(fy) << "</text>\n";
    }
    const std::string x_label =
        kind == PlotKind::CostVsIter ? "iteration" : (table.empty() ? "sweep" : table.front().sweep_param);
    svg << "<text x=\"" << (kLeft + kRight) / 2 << "\" y=\"" << kHeight - 12
        << "\" font-size=\"13\" text-anchor=\"middle\">" << x_label << "</text>\n"
        << "<text x=\"18\" y=\"" << (kTop + kBottom) / 2
        << "\" font-size=\"13\" text-anchor=\"middle\" transform=\"rotate(-90 18 "
        << (kTop + kBottom) / 2 << ")\">cost</text>\n";

    for (std::size_t si = 0; si < series.size(); ++si) {
        const Series& s = series[si];
        const char* color = kPalette[si % (sizeof(kPalette) / sizeof(kPalette[0]))];

        if (s.x.size() >= 2) {
            svg << "<polygon fill=\"" << color << "\" fill-opacity=\"0.15\" stroke=\"none\" points=\"";
            for (std::size_t i = 0; i < s.x.size(); ++i) {
                svg << num(sx(s.x[i])) << "," << num(sy(s.mean[i] + s.std_dev[i])) << " ";
            }
            for (std::size_t i = s.x.size(); i-- > 0;) {
                svg << num(sx(s.x[i])) << "," << num(sy(s.mean[i] - s.std_dev[i]));
                if (i > 0) svg << " ";
            }
            svg << "\"/>\n";
            svg << "<polyline fill=\"none\" stroke=\"" << color << "\" stroke-width=\"2\" points=\"";
            for (std::size_t i = 0; i < s.x.size(); ++i) {
                svg << num(sx(s.x[i])) << "," << num(sy(s.mean[i]));
                if (i + 1 < s.x.size()) svg << " ";
            }
            svg << "\"/>\n";
        }
        for (std::size_t i = 0; i < s.x.size(); ++i) {
            svg << "<circle cx=\"" << num(sx(s.x[i])) << "\" cy=\"" << num(sy(s.mean[i]))
                << "\" r=\"3\" fill=\"" << color << "\"/>\n";
        }

        const double ly = kTop + 18.0 * static_cast<double>(si);
        svg << "<line x1=\"" << kRight + 12 << "\" y1=\"" << num(ly) << "\" x2=\"" << kRight + 34
            << "\" y2=\"" << num(ly) << "\" stroke=\"" << color << "\" stroke-width=\"2\"/>\n"
            << "<text x=\"" << kRight + 40 << "\" y=\"" << num(ly + 4) << "\" font-size=\"12\">"
            << s.label << "</text>\n";
    }

    svg << "</svg>\n";
    return svg.str();
}

void emit_plot(const std::vector<ResultRow>& table, PlotKind kind, const std::string& path) {
    const std::string text = render_plot(table, kind);
    std::ofstream out(path, std::ios::binary);
    if (!out) throw io_error("cannot open for writing: " + path);
    out << text;
    if (!out) throw io_error("write failed: " + path);
}

} // namespace dflsim
