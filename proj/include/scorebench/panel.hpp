// Dated multivariate panels: CSV ingestion, return/change transforms and
// summary statistics.
#pragma once

#include <Eigen/Dense>
#include <string>
#include <vector>

#include "scorebench/dates.hpp"

namespace scorebench {

enum class PanelKind { Levels, LogReturns, Differences };

const char* panel_kind_name(PanelKind kind);
PanelKind panel_kind_from_name(const std::string& name);

enum class ChangeMode { LogReturn, Difference };

struct SeriesPanel {
    std::string name;                 // identifier used by the grid and reports
    std::vector<Date> dates;          // strictly increasing
    Eigen::MatrixXd values;           // T x d, all finite
    std::vector<std::string> labels;  // d asset names
    PanelKind kind = PanelKind::Levels;

    Eigen::Index rows() const { return values.rows(); }
    Eigen::Index cols() const { return values.cols(); }
};

// Enforces the panel invariants: strictly increasing dates, finite entries,
// d >= 2, consistent shapes. Throws on violation.
void validate_panel(const SeriesPanel& panel);

struct SummaryStats {
    std::vector<std::string> labels;
    std::vector<double> mean;
    std::vector<double> volatility;  // sample standard deviation
    std::vector<double> skewness;
    std::vector<double> kurtosis;    // raw standardized fourth moment (Gaussian ~ 3)
};

// Reads a panel from CSV: header row, first column `date` (ISO-8601),
// remaining columns numeric. Rows with any missing or non-finite value are
// hard errors identifying the row and column.
SeriesPanel load_csv(const std::string& path);

// Writes the CSV layout load_csv reads, with values printed at full
// round-trip precision (%.17g).
void write_csv(const SeriesPanel& panel, const std::string& path);

// Log returns ln(x_t/x_{t-1}) or first differences x_t - x_{t-1}; the output
// drops the first date.
SeriesPanel to_changes(const SeriesPanel& panel, ChangeMode mode);

SummaryStats summary_statistics(const SeriesPanel& panel);

// Table-style rendering of summary statistics (one row per column).
std::string format_summary(const SummaryStats& stats);

}  // namespace scorebench
