#include "scorebench/panel.hpp"

#include <cmath>
#include <cstdio>
#include <fstream>
#include <sstream>

#include "scorebench/errors.hpp"
#include "scorebench/stats.hpp"

namespace scorebench {

const char* panel_kind_name(PanelKind kind) {
    switch (kind) {
        case PanelKind::Levels: return "levels";
        case PanelKind::LogReturns: return "log-returns";
        case PanelKind::Differences: return "differences";
    }
    return "unknown";
}

PanelKind panel_kind_from_name(const std::string& name) {
    if (name == "levels") return PanelKind::Levels;
    if (name == "log-returns") return PanelKind::LogReturns;
    if (name == "differences") return PanelKind::Differences;
    fail(Err::ConfigError, "unknown panel kind '" + name + "'");
}

void validate_panel(const SeriesPanel& panel) {
    if (panel.cols() < 2)
        fail(Err::MissingColumn, "panel '" + panel.name + "' needs at least 2 value columns");
    if (static_cast<Eigen::Index>(panel.dates.size()) != panel.rows())
        fail(Err::LengthMismatch, "panel '" + panel.name + "': dates/rows mismatch");
    if (static_cast<Eigen::Index>(panel.labels.size()) != panel.cols())
        fail(Err::LengthMismatch, "panel '" + panel.name + "': labels/columns mismatch");
    for (std::size_t i = 1; i < panel.dates.size(); ++i) {
        if (!(panel.dates[i - 1] < panel.dates[i]))
            fail(Err::NonMonotoneDates, "panel '" + panel.name + "': date " +
                                            panel.dates[i].iso() + " at row " + std::to_string(i) +
                                            " does not increase");
    }
    for (Eigen::Index r = 0; r < panel.rows(); ++r)
        for (Eigen::Index c = 0; c < panel.cols(); ++c)
            if (!std::isfinite(panel.values(r, c)))
                fail(Err::NonFiniteValue, "panel '" + panel.name + "': row " + std::to_string(r) +
                                              " column '" + panel.labels[c] + "'");
}

namespace {

std::vector<std::string> split_csv_line(const std::string& line) {
    std::vector<std::string> out;
    std::string cur;
    for (char ch : line) {
        if (ch == ',') {
            out.push_back(cur);
            cur.clear();
        } else if (ch != '\r') {
            cur.push_back(ch);
        }
    }
    out.push_back(cur);
    return out;
}

std::string trim(const std::string& s) {
    std::size_t b = s.find_first_not_of(" \t");
    if (b == std::string::npos) return "";
    std::size_t e = s.find_last_not_of(" \t");
    return s.substr(b, e - b + 1);
}

}  // namespace

SeriesPanel load_csv(const std::string& path) {
    std::ifstream in(path);
    if (!in) fail(Err::IoError, "cannot open '" + path + "'");

    std::string line;
    if (!std::getline(in, line)) fail(Err::MissingColumn, "'" + path + "' is empty");
    auto header = split_csv_line(line);
    if (header.empty() || trim(header[0]) != "date")
        fail(Err::MissingColumn, "'" + path + "': first header column must be 'date'");
    if (header.size() < 3)
        fail(Err::MissingColumn, "'" + path + "': need at least 2 value columns");

    SeriesPanel panel;
    panel.kind = PanelKind::Levels;
    for (std::size_t c = 1; c < header.size(); ++c) {
        std::string label = trim(header[c]);
        if (label.empty())
            fail(Err::MissingColumn, "'" + path + "': empty header for column " + std::to_string(c));
        panel.labels.push_back(label);
    }

    std::vector<std::vector<double>> rows;
    std::size_t lineno = 1;
    while (std::getline(in, line)) {
        ++lineno;
        if (trim(line).empty()) continue;
        auto fields = split_csv_line(line);
        if (fields.size() != header.size())
            fail(Err::MissingColumn, "'" + path + "' row " + std::to_string(lineno) + ": expected " +
                                         std::to_string(header.size()) + " fields, got " +
                                         std::to_string(fields.size()));
        Date d;
        try {
            d = parse_date(trim(fields[0]));
        } catch (const Error&) {
            fail(Err::UnparseableDate,
                 "'" + path + "' row " + std::to_string(lineno) + ": '" + trim(fields[0]) + "'");
        }
        if (!panel.dates.empty() && !(panel.dates.back() < d))
            fail(Err::NonMonotoneDates, "'" + path + "' row " + std::to_string(lineno) + ": date " +
                                            d.iso() + " does not increase");
        std::vector<double> row;
        for (std::size_t c = 1; c < fields.size(); ++c) {
            std::string f = trim(fields[c]);
            double v = 0.0;
            std::size_t used = 0;
            bool ok = !f.empty();
            if (ok) {
                try {
                    v = std::stod(f, &used);
                } catch (...) {
                    ok = false;
                }
            }
            if (!ok || used != f.size() || !std::isfinite(v))
                fail(Err::NonFiniteValue, "'" + path + "' row " + std::to_string(lineno) +
                                              " column '" + panel.labels[c - 1] + "': '" + f + "'");
            row.push_back(v);
        }
        panel.dates.push_back(d);
        rows.push_back(std::move(row));
    }

    panel.values.resize(static_cast<Eigen::Index>(rows.size()),
                        static_cast<Eigen::Index>(panel.labels.size()));
    for (std::size_t r = 0; r < rows.size(); ++r)
        for (std::size_t c = 0; c < rows[r].size(); ++c)
            panel.values(static_cast<Eigen::Index>(r), static_cast<Eigen::Index>(c)) = rows[r][c];

    validate_panel(panel);
    return panel;
}

void write_csv(const SeriesPanel& panel, const std::string& path) {
    std::ofstream out(path);
    if (!out) fail(Err::IoError, "cannot write '" + path + "'");
    out << "date";
    for (const auto& label : panel.labels) out << ',' << label;
    out << '\n';
    char buf[40];
    for (Eigen::Index r = 0; r < panel.rows(); ++r) {
        out << panel.dates[static_cast<std::size_t>(r)].iso();
        for (Eigen::Index c = 0; c < panel.cols(); ++c) {
            std::snprintf(buf, sizeof(buf), "%.17g", panel.values(r, c));
            out << ',' << buf;
        }
        out << '\n';
    }
    if (!out) fail(Err::IoError, "write failed for '" + path + "'");
}

SeriesPanel to_changes(const SeriesPanel& panel, ChangeMode mode) {
    validate_panel(panel);
    if (panel.kind != PanelKind::Levels)
        fail(Err::ConfigError, "to_changes expects a levels panel, got " +
                                   std::string(panel_kind_name(panel.kind)));
    if (panel.rows() < 2) fail(Err::InsufficientHistory, "need at least 2 rows to difference");

    SeriesPanel out;
    out.name = panel.name;
    out.labels = panel.labels;
    out.kind = mode == ChangeMode::LogReturn ? PanelKind::LogReturns : PanelKind::Differences;
    out.dates.assign(panel.dates.begin() + 1, panel.dates.end());
    out.values.resize(panel.rows() - 1, panel.cols());

    for (Eigen::Index r = 1; r < panel.rows(); ++r) {
        for (Eigen::Index c = 0; c < panel.cols(); ++c) {
            if (mode == ChangeMode::LogReturn) {
                double prev = panel.values(r - 1, c);
                double cur = panel.values(r, c);
                if (prev <= 0.0 || cur <= 0.0)
                    fail(Err::NonPositiveLevel, "log-return needs positive levels; row " +
                                                    std::to_string(r) + " column '" +
                                                    panel.labels[c] + "'");
                out.values(r - 1, c) = std::log(cur / prev);
            } else {
                out.values(r - 1, c) = panel.values(r, c) - panel.values(r - 1, c);
            }
        }
    }
    return out;
}

SummaryStats summary_statistics(const SeriesPanel& panel) {
    validate_panel(panel);
    const Eigen::Index T = panel.rows();
    if (T < 4) fail(Err::InsufficientHistory, "summary statistics need T >= 4");

    SummaryStats stats;
    stats.labels = panel.labels;
    for (Eigen::Index c = 0; c < panel.cols(); ++c) {
        double mu = panel.values.col(c).mean();
        double m2 = 0.0, m3 = 0.0, m4 = 0.0;
        for (Eigen::Index r = 0; r < T; ++r) {
            double d = panel.values(r, c) - mu;
            double d2 = d * d;
            m2 += d2;
            m3 += d2 * d;
            m4 += d2 * d2;
        }
        double n = static_cast<double>(T);
        m2 /= n;
        m3 /= n;
        m4 /= n;
        if (m2 <= 0.0)
            fail(Err::DegenerateColumn, "column '" + panel.labels[c] + "' is constant");
        stats.mean.push_back(mu);
        stats.volatility.push_back(std::sqrt(m2 * n / (n - 1.0)));
        stats.skewness.push_back(m3 / std::pow(m2, 1.5));
        stats.kurtosis.push_back(m4 / (m2 * m2));
    }
    return stats;
}

std::string format_summary(const SummaryStats& stats) {
    std::ostringstream os;
    char buf[160];
    std::snprintf(buf, sizeof(buf), "%-16s %12s %12s %12s %12s\n", "Asset", "Mean", "Volatility",
                  "Skewness", "Kurtosis");
    os << buf;
    for (std::size_t i = 0; i < stats.labels.size(); ++i) {
        std::snprintf(buf, sizeof(buf), "%-16s %12.4f %12.4f %12.4f %12.4f\n",
                      stats.labels[i].c_str(), stats.mean[i], stats.volatility[i],
                      stats.skewness[i], stats.kurtosis[i]);
        os << buf;
    }
    return os.str();
}

}  // namespace scorebench
