#include "scorebench/metrics.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>

#include <json.hpp>

#include "scorebench/errors.hpp"
#include "scorebench/rng.hpp"
#include "scorebench/stats.hpp"

namespace scorebench {

namespace fs = std::filesystem;
using ordered_json = nlohmann::ordered_json;

MeanRelativeScore mean_relative_score(std::span<const double> scores_m,
                                      std::span<const double> scores_dgp, double eps_ratio) {
    if (scores_m.size() != scores_dgp.size())
        fail(Err::LengthMismatch, "mean_relative_score: unpaired inputs");
    if (scores_m.empty()) fail(Err::EmptyInput, "mean_relative_score: empty inputs");
    KahanSum acc;
    int used = 0;
    MeanRelativeScore out;
    for (std::size_t i = 0; i < scores_m.size(); ++i) {
        if (std::abs(scores_dgp[i]) < eps_ratio) {
            ++out.excluded;
            continue;
        }
        acc.add(scores_m[i] / scores_dgp[i]);
        ++used;
    }
    if (used == 0)
        fail(Err::AllPairsExcluded, "mean_relative_score: every DGP score is below the guard");
    out.value = acc.value() / used;
    return out;
}

std::vector<double> score_differences(std::span<const double> scores_m,
                                      std::span<const double> scores_dgp) {
    if (scores_m.size() != scores_dgp.size())
        fail(Err::LengthMismatch, "score_differences: unpaired inputs");
    std::vector<double> out(scores_m.size());
    for (std::size_t i = 0; i < scores_m.size(); ++i) out[i] = scores_m[i] - scores_dgp[i];
    return out;
}

double error_rate(std::span<const double> diffs) {
    if (diffs.empty()) fail(Err::EmptyInput, "error_rate: empty input");
    std::size_t negatives = 0;
    for (double d : diffs)
        if (d < 0.0) ++negatives;
    return static_cast<double>(negatives) / static_cast<double>(diffs.size());
}

double discrimination_heuristic(std::span<const double> mean_scores, std::size_t dgp_index,
                                double eps_ratio) {
    if (mean_scores.empty()) fail(Err::EmptyInput, "discrimination_heuristic: empty input");
    if (dgp_index >= mean_scores.size())
        fail(Err::LengthMismatch, "discrimination_heuristic: dgp index out of range");
    double denom = mean_scores[dgp_index];
    if (std::abs(denom) < eps_ratio)
        fail(Err::DegenerateDgpScore, "discrimination_heuristic: DGP mean score below the guard");
    KahanSum acc;
    for (double s : mean_scores) acc.add(s / denom);
    return acc.value() / static_cast<double>(mean_scores.size());
}

BandEstimate bootstrap_band(std::span<const double> scores, int subsample, int reps, double lo_q,
                            double hi_q, std::uint64_t seed) {
    if (scores.empty()) fail(Err::EmptyInput, "bootstrap_band: empty scores");
    if (subsample < 1 || static_cast<std::size_t>(subsample) > scores.size())
        fail(Err::SubsampleExceedsN, "bootstrap_band: subsample " + std::to_string(subsample) +
                                         " exceeds N=" + std::to_string(scores.size()));
    if (reps < 1) fail(Err::ConfigError, "bootstrap_band: reps must be positive");
    Rng rng(seed);
    std::vector<double> means(static_cast<std::size_t>(reps));
    for (int rep = 0; rep < reps; ++rep) {
        double sum = 0.0;
        for (int i = 0; i < subsample; ++i) sum += scores[rng.index(scores.size())];
        means[static_cast<std::size_t>(rep)] = sum / static_cast<double>(subsample);
    }
    std::sort(means.begin(), means.end());
    BandEstimate band;
    band.lower = empirical_quantile_sorted(means, lo_q);
    band.upper = empirical_quantile_sorted(means, hi_q);
    return band;
}

double bootstrap_mean_quantile(std::span<const double> xs, int reps, double q,
                               std::uint64_t seed) {
    if (xs.empty()) fail(Err::EmptyInput, "bootstrap_mean_quantile: empty input");
    Rng rng(seed);
    std::vector<double> means(static_cast<std::size_t>(reps));
    for (int rep = 0; rep < reps; ++rep) {
        double sum = 0.0;
        for (std::size_t i = 0; i < xs.size(); ++i) sum += xs[rng.index(xs.size())];
        means[static_cast<std::size_t>(rep)] = sum / static_cast<double>(xs.size());
    }
    std::sort(means.begin(), means.end());
    return empirical_quantile_sorted(means, q);
}

KdeCurve kde_differences(std::span<const double> diffs, double clip_lo_q, double clip_hi_q,
                         int grid_points) {
    if (diffs.size() < 10) fail(Err::TooFewPoints, "kde_differences: need at least 10 points");
    if (grid_points < 2) fail(Err::ConfigError, "kde_differences: grid too small");

    const std::size_t n = diffs.size();
    std::vector<double> sorted(diffs.begin(), diffs.end());
    std::sort(sorted.begin(), sorted.end());

    KdeCurve out;
    out.clip_lo = empirical_quantile_sorted(sorted, clip_lo_q);
    out.clip_hi = empirical_quantile_sorted(sorted, clip_hi_q);
    out.mean = mean(diffs);
    std::size_t negatives = 0;
    for (double d : diffs)
        if (d < 0.0) ++negatives;
    out.negative_mass = static_cast<double>(negatives) / static_cast<double>(n);

    double sd = 0.0;
    for (double d : diffs) sd += (d - out.mean) * (d - out.mean);
    sd = std::sqrt(sd / static_cast<double>(n > 1 ? n - 1 : 1));
    double h = 1.06 * sd * std::pow(static_cast<double>(n), -0.2);
    if (!(h > 0.0)) h = 1e-12 * (1.0 + std::abs(out.mean));
    out.bandwidth = h;
    if (out.clip_hi <= out.clip_lo) out.clip_hi = out.clip_lo + h;

    // Linear binning followed by a truncated-kernel convolution; points more
    // than 8 bandwidths outside the window contribute < 1e-14 and are dropped.
    const double window_lo = out.clip_lo - 8.0 * h;
    const double window_hi = out.clip_hi + 8.0 * h;
    const int n_bins = 2048;
    const double bin_width = (window_hi - window_lo) / n_bins;
    std::vector<double> bin_mass(static_cast<std::size_t>(n_bins), 0.0);
    for (double d : sorted) {
        if (d < window_lo || d > window_hi) continue;
        double pos = (d - window_lo) / bin_width - 0.5;
        int b0 = static_cast<int>(std::floor(pos));
        double frac = pos - b0;
        if (b0 >= 0 && b0 < n_bins) bin_mass[static_cast<std::size_t>(b0)] += 1.0 - frac;
        if (b0 + 1 >= 0 && b0 + 1 < n_bins) bin_mass[static_cast<std::size_t>(b0 + 1)] += frac;
    }

    const int support = std::min(n_bins, static_cast<int>(std::ceil(8.0 * h / bin_width)) + 1);
    std::vector<double> kernel(static_cast<std::size_t>(support), 0.0);
    const double norm = 1.0 / (static_cast<double>(n) * h);
    for (int k = 0; k < support; ++k)
        kernel[static_cast<std::size_t>(k)] = norm * norm_pdf(k * bin_width / h);

    std::vector<double> bin_density(static_cast<std::size_t>(n_bins), 0.0);
    for (int b = 0; b < n_bins; ++b) {
        double mass = bin_mass[static_cast<std::size_t>(b)];
        if (mass == 0.0) continue;
        int lo = std::max(0, b - support + 1);
        int hi = std::min(n_bins - 1, b + support - 1);
        for (int j = lo; j <= hi; ++j)
            bin_density[static_cast<std::size_t>(j)] +=
                mass * kernel[static_cast<std::size_t>(std::abs(j - b))];
    }

    out.x.resize(static_cast<std::size_t>(grid_points));
    out.density.resize(static_cast<std::size_t>(grid_points));
    const double step = (out.clip_hi - out.clip_lo) / grid_points;
    for (int gidx = 0; gidx < grid_points; ++gidx) {
        double x = out.clip_lo + (gidx + 0.5) * step;
        double pos = (x - window_lo) / bin_width - 0.5;
        int b0 = static_cast<int>(std::floor(pos));
        double frac = pos - b0;
        double lo_val = (b0 >= 0 && b0 < n_bins) ? bin_density[static_cast<std::size_t>(b0)] : 0.0;
        double hi_val =
            (b0 + 1 >= 0 && b0 + 1 < n_bins) ? bin_density[static_cast<std::size_t>(b0 + 1)] : 0.0;
        out.x[static_cast<std::size_t>(gidx)] = x;
        out.density[static_cast<std::size_t>(gidx)] = (1.0 - frac) * lo_val + frac * hi_val;
    }
    return out;
}

std::vector<double> moving_average(std::span<const double> series, int window) {
    if (window < 1) fail(Err::ConfigError, "moving_average: window must be >= 1");
    std::vector<double> out(series.size());
    double running = 0.0;
    for (std::size_t i = 0; i < series.size(); ++i) {
        running += series[i];
        if (i >= static_cast<std::size_t>(window)) running -= series[i - window];
        std::size_t count = std::min<std::size_t>(i + 1, static_cast<std::size_t>(window));
        out[i] = running / static_cast<double>(count);
    }
    return out;
}

// ---------------------------------------------------------------------------
// Tensor-level report

MetricReport build_report(const ScoreTensor& tensor, const MetricReportOptions& options) {
    MetricReport report;
    report.tensor = &tensor;
    report.options = options;

    const std::size_t n_rules = tensor.rules.size();
    const std::size_t n_models = tensor.models.size();

    // dgp name -> model axis index (for the self cell)
    std::vector<std::size_t> dgp_model(tensor.dgps.size());
    for (std::size_t g = 0; g < tensor.dgps.size(); ++g)
        dgp_model[g] = tensor.model_index(tensor.dgps[g]);

    for (std::size_t p = 0; p < tensor.panels.size(); ++p) {
        for (std::size_t r = 0; r < n_rules; ++r) {
            std::vector<double> cell_error_rates;
            std::vector<double> heuristic_values;
            std::vector<double> date_avg_error_rates;
            long propriety_pass = 0, propriety_total = 0;

            for (std::size_t g = 0; g < tensor.dgps.size(); ++g) {
                // Pooled differences per candidate model across dates.
                std::vector<std::vector<double>> pooled(n_models);

                for (std::size_t t = 0; t < tensor.dates[p].size(); ++t) {
                    if (!tensor.present(p, t, g, r, dgp_model[g])) continue;
                    const auto& dgp_scores = tensor.scores(p, t, g, r, dgp_model[g]);

                    std::vector<double> mean_scores(n_models, 0.0);
                    std::vector<bool> have(n_models, false);
                    std::vector<double> date_rates;
                    bool cell_pass = true;
                    bool cell_any = false;

                    for (std::size_t m = 0; m < n_models; ++m) {
                        if (!tensor.present(p, t, g, r, m)) continue;
                        const auto& scores = tensor.scores(p, t, g, r, m);

                        CellMetrics cm;
                        cm.panel = p;
                        cm.rule = r;
                        cm.dgp = g;
                        cm.date = t;
                        cm.model = m;
                        cm.mean_relative =
                            mean_relative_score(scores, dgp_scores, options.eps_ratio);
                        report.total_exclusions += cm.mean_relative.excluded;

                        std::vector<double> ratios;
                        ratios.reserve(scores.size());
                        for (std::size_t i = 0; i < scores.size(); ++i)
                            if (std::abs(dgp_scores[i]) >= options.eps_ratio)
                                ratios.push_back(scores[i] / dgp_scores[i]);
                        int sub = std::min<int>(options.subsample,
                                                static_cast<int>(ratios.size()));
                        std::uint64_t band_seed = seed_combine(
                            seed_combine(seed_combine(seed_combine(options.seed, tensor.panels[p]),
                                                      tensor.rules[r].name()),
                                         tensor.dgps[g]),
                            seed_combine(seed_combine(std::uint64_t{0}, tensor.models[m]),
                                         static_cast<std::uint64_t>(t)));
                        cm.band = bootstrap_band(ratios, sub, options.bootstrap_reps, 0.25, 0.75,
                                                 band_seed);

                        std::vector<double> diffs = score_differences(scores, dgp_scores);
                        cm.diff_mean = mean(diffs);
                        cm.error_rate = error_rate(diffs);

                        have[m] = true;
                        mean_scores[m] = mean(scores);
                        report.cells.push_back(cm);

                        if (m != dgp_model[g]) {
                            cell_error_rates.push_back(cm.error_rate);
                            date_rates.push_back(cm.error_rate);
                            auto& pool = pooled[m];
                            pool.insert(pool.end(), diffs.begin(), diffs.end());
                            cell_any = true;
                            if (cm.mean_relative.value < options.propriety_threshold)
                                cell_pass = false;
                        }
                    }

                    // Discrimination heuristic over the present roster.
                    std::vector<double> present_means;
                    std::size_t dgp_pos = 0;
                    for (std::size_t m = 0; m < n_models; ++m) {
                        if (!have[m]) continue;
                        if (m == dgp_model[g]) dgp_pos = present_means.size();
                        present_means.push_back(mean_scores[m]);
                    }
                    if (!present_means.empty()) {
                        HeuristicPoint hp;
                        hp.panel = p;
                        hp.rule = r;
                        hp.dgp = g;
                        hp.date = t;
                        hp.models_present = static_cast<int>(present_means.size());
                        hp.value =
                            discrimination_heuristic(present_means, dgp_pos, options.eps_ratio);
                        report.heuristics.push_back(hp);
                        heuristic_values.push_back(hp.value);
                    }
                    if (!date_rates.empty()) date_avg_error_rates.push_back(mean(date_rates));
                    if (cell_any) {
                        ++propriety_total;
                        if (cell_pass) ++propriety_pass;
                    }
                }

                for (std::size_t m = 0; m < n_models; ++m) {
                    if (pooled[m].size() < 10) continue;
                    PooledCurve curve;
                    curve.panel = p;
                    curve.rule = r;
                    curve.dgp = g;
                    curve.model = m;
                    curve.curve = kde_differences(pooled[m]);
                    curve.pooled_error_rate = error_rate(pooled[m]);
                    report.curves.push_back(std::move(curve));
                }
            }

            RuleAggregate agg;
            agg.panel = p;
            agg.rule = r;
            agg.error_rate_mean_cells = cell_error_rates.empty() ? 0.0 : mean(cell_error_rates);
            agg.error_rate_models_then_dates =
                date_avg_error_rates.empty() ? 0.0 : mean(date_avg_error_rates);
            agg.avg_heuristic = heuristic_values.empty() ? 0.0 : mean(heuristic_values);
            agg.propriety_cell_share =
                propriety_total == 0
                    ? 0.0
                    : static_cast<double>(propriety_pass) / static_cast<double>(propriety_total);
            report.aggregates.push_back(agg);
        }
    }

    // Cross-panel rule averages and orderings.
    for (std::size_t r = 0; r < n_rules; ++r) {
        std::vector<double> rates, heuristics;
        for (const auto& agg : report.aggregates) {
            if (agg.rule != r) continue;
            rates.push_back(agg.error_rate_mean_cells);
            heuristics.push_back(agg.avg_heuristic);
        }
        report.rule_avg_error_rate[tensor.rules[r].name()] = rates.empty() ? 0.0 : mean(rates);
        report.rule_avg_heuristic[tensor.rules[r].name()] =
            heuristics.empty() ? 0.0 : mean(heuristics);
    }
    for (const auto& [name, value] : report.rule_avg_error_rate)
        report.error_rate_ordering.push_back(name);
    std::sort(report.error_rate_ordering.begin(), report.error_rate_ordering.end(),
              [&](const std::string& a, const std::string& b) {
                  return report.rule_avg_error_rate.at(a) < report.rule_avg_error_rate.at(b);
              });
    for (const auto& [name, value] : report.rule_avg_heuristic)
        report.heuristic_ordering.push_back(name);
    std::sort(report.heuristic_ordering.begin(), report.heuristic_ordering.end(),
              [&](const std::string& a, const std::string& b) {
                  return report.rule_avg_heuristic.at(a) < report.rule_avg_heuristic.at(b);
              });
    return report;
}

// ---------------------------------------------------------------------------
// Report files

namespace {

std::string fmt(double v) {
    char buf[40];
    std::snprintf(buf, sizeof(buf), "%.17g", v);
    return buf;
}

std::ofstream open_out(const fs::path& path) {
    std::ofstream out(path);
    if (!out) fail(Err::IoError, "cannot write '" + path.string() + "'");
    return out;
}

}  // namespace

void write_report(const MetricReport& report, const std::string& directory) {
    const ScoreTensor& tensor = *report.tensor;
    fs::path root(directory);
    std::error_code ec;
    fs::create_directories(root / "figures", ec);
    if (ec) fail(Err::IoError, "cannot create '" + (root / "figures").string() + "'");

    {
        auto out = open_out(root / "report.csv");
        out << "panel,rule,dgp,model,date,metric,value\n";
        auto row = [&](const CellMetrics& cm, const char* metric, double value) {
            out << tensor.panels[cm.panel] << ',' << tensor.rules[cm.rule].name() << ','
                << tensor.dgps[cm.dgp] << ',' << tensor.models[cm.model] << ','
                << tensor.dates[cm.panel][cm.date].iso() << ',' << metric << ',' << fmt(value)
                << '\n';
        };
        for (const auto& cm : report.cells) {
            row(cm, "mean_relative_score", cm.mean_relative.value);
            row(cm, "excluded_pairs", cm.mean_relative.excluded);
            row(cm, "band_lower", cm.band.lower);
            row(cm, "band_upper", cm.band.upper);
            row(cm, "score_diff_mean", cm.diff_mean);
            row(cm, "error_rate", cm.error_rate);
        }
        for (const auto& hp : report.heuristics) {
            out << tensor.panels[hp.panel] << ',' << tensor.rules[hp.rule].name() << ','
                << tensor.dgps[hp.dgp] << ",," << tensor.dates[hp.panel][hp.date].iso()
                << ",discrimination_heuristic," << fmt(hp.value) << '\n';
        }
    }

    {
        auto out = open_out(root / "figures" / "fig3_mean_relative_scores.csv");
        out << "panel,rule,dgp,model,date,mean_relative_score,band_lower,band_upper\n";
        for (const auto& cm : report.cells) {
            out << tensor.panels[cm.panel] << ',' << tensor.rules[cm.rule].name() << ','
                << tensor.dgps[cm.dgp] << ',' << tensor.models[cm.model] << ','
                << tensor.dates[cm.panel][cm.date].iso() << ',' << fmt(cm.mean_relative.value)
                << ',' << fmt(cm.band.lower) << ',' << fmt(cm.band.upper) << '\n';
        }
    }

    {
        auto meta = open_out(root / "figures" / "fig4_difference_density_meta.csv");
        meta << "panel,rule,dgp,model,error_rate,diff_mean,clip_lo,clip_hi,bandwidth,"
                "negative_mass\n";
        auto out = open_out(root / "figures" / "fig4_difference_density.csv");
        out << "panel,rule,dgp,model,x,density\n";
        for (const auto& pc : report.curves) {
            meta << tensor.panels[pc.panel] << ',' << tensor.rules[pc.rule].name() << ','
                 << tensor.dgps[pc.dgp] << ',' << tensor.models[pc.model] << ','
                 << fmt(pc.pooled_error_rate) << ',' << fmt(pc.curve.mean) << ','
                 << fmt(pc.curve.clip_lo) << ',' << fmt(pc.curve.clip_hi) << ','
                 << fmt(pc.curve.bandwidth) << ',' << fmt(pc.curve.negative_mass) << '\n';
            for (std::size_t i = 0; i < pc.curve.x.size(); ++i) {
                out << tensor.panels[pc.panel] << ',' << tensor.rules[pc.rule].name() << ','
                    << tensor.dgps[pc.dgp] << ',' << tensor.models[pc.model] << ','
                    << fmt(pc.curve.x[i]) << ',' << fmt(pc.curve.density[i]) << '\n';
            }
        }
    }

    {
        auto out = open_out(root / "figures" / "fig5_error_rates.csv");
        out << "panel,rule,aggregation,value\n";
        for (const auto& agg : report.aggregates) {
            out << tensor.panels[agg.panel] << ',' << tensor.rules[agg.rule].name()
                << ",mean-cells," << fmt(agg.error_rate_mean_cells) << '\n';
            out << tensor.panels[agg.panel] << ',' << tensor.rules[agg.rule].name()
                << ",models-then-dates," << fmt(agg.error_rate_models_then_dates) << '\n';
        }
        // Per-DGP breakdown alongside the pooled aggregate.
        auto by_dgp = open_out(root / "figures" / "fig5_error_rates_by_dgp.csv");
        by_dgp << "panel,rule,dgp,value\n";
        for (std::size_t p = 0; p < tensor.panels.size(); ++p) {
            for (std::size_t r = 0; r < tensor.rules.size(); ++r) {
                for (std::size_t g = 0; g < tensor.dgps.size(); ++g) {
                    std::vector<double> rates;
                    for (const auto& cm : report.cells) {
                        if (cm.panel != p || cm.rule != r || cm.dgp != g) continue;
                        if (tensor.models[cm.model] == tensor.dgps[g]) continue;
                        rates.push_back(cm.error_rate);
                    }
                    if (rates.empty()) continue;
                    by_dgp << tensor.panels[p] << ',' << tensor.rules[r].name() << ','
                           << tensor.dgps[g] << ',' << fmt(mean(rates)) << '\n';
                }
            }
        }
    }

    {
        auto out = open_out(root / "figures" / "fig6_discrimination_heuristic.csv");
        out << "panel,rule,dgp,date,heuristic,heuristic_ma\n";
        for (std::size_t p = 0; p < tensor.panels.size(); ++p) {
            for (std::size_t r = 0; r < tensor.rules.size(); ++r) {
                for (std::size_t g = 0; g < tensor.dgps.size(); ++g) {
                    std::vector<const HeuristicPoint*> pts;
                    for (const auto& hp : report.heuristics)
                        if (hp.panel == p && hp.rule == r && hp.dgp == g) pts.push_back(&hp);
                    if (pts.empty()) continue;
                    std::vector<double> series;
                    for (const auto* hp : pts) series.push_back(hp->value);
                    std::vector<double> smooth = moving_average(series, report.options.ma_window);
                    for (std::size_t i = 0; i < pts.size(); ++i) {
                        out << tensor.panels[p] << ',' << tensor.rules[r].name() << ','
                            << tensor.dgps[g] << ',' << tensor.dates[p][pts[i]->date].iso() << ','
                            << fmt(series[i]) << ',' << fmt(smooth[i]) << '\n';
                    }
                }
            }
        }
    }

    {
        ordered_json summary;
        summary["rules"] = ordered_json::array();
        for (const auto& rule : tensor.rules) summary["rules"].push_back(rule.name());
        ordered_json err, heur, share;
        for (const auto& rule : tensor.rules) {
            err[rule.name()] = report.rule_avg_error_rate.at(rule.name());
            heur[rule.name()] = report.rule_avg_heuristic.at(rule.name());
            std::vector<double> shares;
            for (const auto& agg : report.aggregates)
                if (tensor.rules[agg.rule].name() == rule.name())
                    shares.push_back(agg.propriety_cell_share);
            share[rule.name()] = shares.empty() ? 0.0 : mean(shares);
        }
        summary["average_error_rate"] = std::move(err);
        summary["error_rate_ordering"] = report.error_rate_ordering;
        summary["average_discrimination_heuristic"] = std::move(heur);
        summary["heuristic_ordering"] = report.heuristic_ordering;
        summary["propriety_cell_share"] = std::move(share);
        summary["ratio_exclusions"] = report.total_exclusions;
        summary["absent_cells"] = tensor.absent.size();
        summary["bootstrap"] = ordered_json{{"subsample", report.options.subsample},
                                            {"repetitions", report.options.bootstrap_reps},
                                            {"seed", report.options.seed}};
        auto out = open_out(root / "summary.json");
        out << summary.dump(2) << '\n';
    }
}

}  // namespace scorebench
