#pragma once

#include <string>
#include <vector>

#include "dflsim/experiment.hpp"

namespace dflsim {

enum class PlotKind { CostVsIter, CostVsSweep };

PlotKind plot_kind_from_string(const std::string& name); // throws validation_error

// Self-contained SVG 1.1: one polyline per scheme (per sweep value for
// cost_vs_iter over a sweep), seed means with a shaded +-1 std band, axes and
// a legend. cost_vs_iter carries a converged seed's last cost forward so the
// mean at iteration t always averages all seeds.
std::string render_plot(const std::vector<ResultRow>& table, PlotKind kind);
void emit_plot(const std::vector<ResultRow>& table, PlotKind kind, const std::string& path);

} // namespace dflsim
