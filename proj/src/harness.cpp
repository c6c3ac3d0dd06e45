#include "scorebench/harness.hpp"

#include <algorithm>
#include <atomic>
#include <cctype>
#include <cmath>
#include <cstdio>
#include <cstring>
#include <filesystem>
#include <fstream>
#include <map>
#include <memory>
#include <thread>

#include <json.hpp>

#include "scorebench/errors.hpp"
#include "scorebench/rng.hpp"

namespace scorebench {

namespace fs = std::filesystem;
using ordered_json = nlohmann::ordered_json;

// ---------------------------------------------------------------------------
// Rules

std::string RuleSpec::name() const {
    char buf[32];
    double p = param;
    if (p == static_cast<long>(p))
        std::snprintf(buf, sizeof(buf), "%ld", static_cast<long>(p));
    else
        std::snprintf(buf, sizeof(buf), "%g", p);
    return std::string(kind == Kind::EnergyScore ? "ES(" : "VS(") + buf + ")";
}

RuleSpec rule_from_name(const std::string& name) {
    auto open = name.find('(');
    auto close = name.find(')');
    if (open == std::string::npos || close == std::string::npos || close < open)
        fail(Err::ConfigError, "bad rule name '" + name + "'");
    std::string head = name.substr(0, open);
    double param = std::stod(name.substr(open + 1, close - open - 1));
    RuleSpec rule;
    rule.param = param;
    if (head == "ES")
        rule.kind = RuleSpec::Kind::EnergyScore;
    else if (head == "VS")
        rule.kind = RuleSpec::Kind::VariogramScore;
    else
        fail(Err::ConfigError, "bad rule name '" + name + "'");
    return rule;
}

std::vector<RuleSpec> default_rules() {
    return {
        {RuleSpec::Kind::EnergyScore, 1.0},
        {RuleSpec::Kind::VariogramScore, 0.5},
        {RuleSpec::Kind::VariogramScore, 1.0},
        {RuleSpec::Kind::VariogramScore, 2.0},
    };
}

// ---------------------------------------------------------------------------
// Grid validation

namespace {

bool filesystem_safe(const std::string& name) {
    if (name.empty()) return false;
    for (char c : name)
        if (!(std::isalnum(static_cast<unsigned char>(c)) || c == '-' || c == '_' || c == '.' ||
              c == '(' || c == ')'))
            return false;
    return true;
}

}  // namespace

void validate_grid_spec(const GridSpec& spec) {
    if (spec.panels.empty()) fail(Err::BadGridSpec, "grid needs at least one panel");
    if (spec.models.empty()) fail(Err::BadGridSpec, "grid needs at least one model");
    if (spec.n_draws < 1) fail(Err::BadGridSpec, "n_draws must be positive");
    if (spec.subsample < 1 || spec.subsample > spec.n_draws)
        fail(Err::BadGridSpec, "need 1 <= subsample <= n_draws");
    std::vector<std::string> names;
    for (const auto& panel : spec.panels) {
        if (!filesystem_safe(panel.name))
            fail(Err::BadGridSpec, "panel name '" + panel.name + "' is not filesystem safe");
        validate_panel(panel);
        names.push_back(panel.name);
    }
    std::sort(names.begin(), names.end());
    if (std::adjacent_find(names.begin(), names.end()) != names.end())
        fail(Err::BadGridSpec, "duplicate panel names");
    names.clear();
    for (const auto& model : spec.models) {
        if (!filesystem_safe(model.name))
            fail(Err::BadGridSpec, "model name '" + model.name + "' is not filesystem safe");
        names.push_back(model.name);
    }
    std::sort(names.begin(), names.end());
    if (std::adjacent_find(names.begin(), names.end()) != names.end())
        fail(Err::BadGridSpec, "duplicate model names");
    for (const auto& dgp : spec.dgps) {
        bool found = false;
        for (const auto& model : spec.models) found = found || model.name == dgp;
        if (!found) fail(Err::BadGridSpec, "dgp '" + dgp + "' is not in the roster");
    }
}

// ---------------------------------------------------------------------------
// Evaluation dates

std::vector<Eigen::Index> evaluation_date_rows(const SeriesPanel& panel, int min_history) {
    if (min_history < 0) fail(Err::BadGridSpec, "min_history must be >= 0");
    if (panel.rows() <= min_history)
        fail(Err::InsufficientHistory, "panel '" + panel.name + "' has " +
                                           std::to_string(panel.rows()) + " rows, needs more than " +
                                           std::to_string(min_history));
    std::vector<Eigen::Index> rows;
    int last_year = -1, last_quarter = -1;
    for (Eigen::Index r = 0; r < panel.rows(); ++r) {
        const Date& d = panel.dates[static_cast<std::size_t>(r)];
        if (d.year != last_year || d.quarter() != last_quarter) {
            last_year = d.year;
            last_quarter = d.quarter();
            if (r >= min_history) rows.push_back(r);
        }
    }
    return rows;
}

std::vector<Date> evaluation_dates(const SeriesPanel& panel, int min_history) {
    std::vector<Date> dates;
    for (Eigen::Index r : evaluation_date_rows(panel, min_history))
        dates.push_back(panel.dates[static_cast<std::size_t>(r)]);
    return dates;
}

// ---------------------------------------------------------------------------
// ScoreTensor

void ScoreTensor::allocate() {
    panel_offsets_.assign(panels.size() + 1, 0);
    const std::size_t per_date = dgps.size() * rules.size() * models.size();
    for (std::size_t p = 0; p < panels.size(); ++p)
        panel_offsets_[p + 1] = panel_offsets_[p] + dates[p].size() * per_date;
    cells_.assign(panel_offsets_.back(), {});
}

std::size_t ScoreTensor::cell_index(std::size_t panel, std::size_t date, std::size_t dgp,
                                    std::size_t rule, std::size_t model) const {
    return panel_offsets_[panel] +
           ((date * dgps.size() + dgp) * rules.size() + rule) * models.size() + model;
}

const std::vector<double>& ScoreTensor::scores(std::size_t panel, std::size_t date,
                                               std::size_t dgp, std::size_t rule,
                                               std::size_t model) const {
    return cells_[cell_index(panel, date, dgp, rule, model)];
}

std::vector<double>& ScoreTensor::scores_mut(std::size_t panel, std::size_t date, std::size_t dgp,
                                             std::size_t rule, std::size_t model) {
    return cells_[cell_index(panel, date, dgp, rule, model)];
}

bool ScoreTensor::present(std::size_t panel, std::size_t date, std::size_t dgp, std::size_t rule,
                          std::size_t model) const {
    return !scores(panel, date, dgp, rule, model).empty();
}

std::size_t ScoreTensor::panel_index(const std::string& name) const {
    for (std::size_t i = 0; i < panels.size(); ++i)
        if (panels[i] == name) return i;
    fail(Err::MissingTensor, "panel '" + name + "' not in tensor");
}

std::size_t ScoreTensor::model_index(const std::string& name) const {
    for (std::size_t i = 0; i < models.size(); ++i)
        if (models[i] == name) return i;
    fail(Err::MissingTensor, "model '" + name + "' not in tensor");
}

std::size_t ScoreTensor::rule_index(const std::string& name) const {
    for (std::size_t i = 0; i < rules.size(); ++i)
        if (rules[i].name() == name) return i;
    fail(Err::MissingTensor, "rule '" + name + "' not in tensor");
}

// ---------------------------------------------------------------------------
// Scoring inputs

std::vector<double> scoring_inputs(const Eigen::MatrixXd& ensemble,
                                   const Eigen::MatrixXd& realisations, const RuleSpec& rule) {
    if (ensemble.cols() != realisations.cols())
        fail(Err::LengthMismatch, "ensemble and realisations disagree on dimension");
    const Eigen::Index n = realisations.rows();
    std::vector<double> out(static_cast<std::size_t>(n));
    if (rule.kind == RuleSpec::Kind::EnergyScore) {
        EnergyScoreContext ctx(ensemble, rule.param);
        for (Eigen::Index i = 0; i < n; ++i)
            out[static_cast<std::size_t>(i)] = ctx.score(realisations.row(i).transpose());
    } else {
        VariogramScoreContext ctx(ensemble, rule.param);
        for (Eigen::Index i = 0; i < n; ++i)
            out[static_cast<std::size_t>(i)] = ctx.score(realisations.row(i).transpose());
    }
    return out;
}

// ---------------------------------------------------------------------------
// Grid execution

std::uint64_t model_fingerprint(const ModelSpec& spec) {
    std::uint64_t h = seed_combine(0x5c03ebe4c4ULL, model_kind_name(spec.kind));
    h = seed_combine(h, static_cast<std::uint64_t>(spec.window));
    h = seed_combine(h, static_cast<std::uint64_t>(spec.factors));
    h = seed_combine(h, static_cast<std::uint64_t>(spec.bags));
    std::vector<double> taus =
        spec.quantiles.empty() ? default_quantile_partition() : spec.quantiles;
    for (double tau : taus) {
        std::uint64_t bits;
        static_assert(sizeof(bits) == sizeof(tau));
        std::memcpy(&bits, &tau, sizeof(bits));
        h = seed_combine(h, bits);
    }
    return h;
}

namespace {

std::uint64_t stream_seed(std::uint64_t root, const std::string& panel, const Date& date,
                          std::uint64_t fingerprint, const char* purpose) {
    std::uint64_t h = seed_combine(root, panel);
    h = seed_combine(h, static_cast<std::uint64_t>(date.serial()));
    h = seed_combine(h, fingerprint);
    return seed_combine(h, purpose);
}

struct CellResult {
    // scores[dgp][rule][model]; empty vector = absent
    std::vector<std::vector<std::vector<std::vector<double>>>> scores;
    std::vector<AbsentCell> absent;
};

CellResult run_cell(const GridSpec& spec, const std::vector<RuleSpec>& rules,
                    const std::vector<std::size_t>& dgp_model_idx, std::size_t panel_idx,
                    Eigen::Index date_row) {
    const SeriesPanel& panel = spec.panels[panel_idx];
    const Date date = panel.dates[static_cast<std::size_t>(date_row)];
    const std::size_t n_models = spec.models.size();

    CellResult result;
    result.scores.assign(
        dgp_model_idx.size(),
        std::vector<std::vector<std::vector<double>>>(
            rules.size(), std::vector<std::vector<double>>(n_models)));

    // Stage 1: calibrate the roster on windows ending the day before `date`.
    // CCC and DCC share univariate fits per window length.
    std::map<int, std::vector<EgarchTParams>> univariate_cache;
    std::vector<std::optional<CalibratedModel>> fits(n_models);
    for (std::size_t m = 0; m < n_models; ++m) {
        const ModelSpec& ms = spec.models[m];
        try {
            CalibrationWindow window = make_window(panel, date_row - 1, ms.window);
            std::uint64_t fit_seed =
                stream_seed(spec.root_seed, panel.name, date, model_fingerprint(ms), "fit");
            if (ms.kind == ModelKind::CccGarch || ms.kind == ModelKind::DccGarch) {
                if (window.values.rows() < kMinGarchWindow)
                    fail(Err::InsufficientWindow,
                         "mv-garch needs >= " + std::to_string(kMinGarchWindow) + " rows, got " +
                             std::to_string(window.values.rows()));
                auto cached = univariate_cache.find(ms.window);
                if (cached == univariate_cache.end()) {
                    std::vector<EgarchTParams> uni;
                    std::vector<double> column(static_cast<std::size_t>(window.values.rows()));
                    for (Eigen::Index c = 0; c < window.values.cols(); ++c) {
                        for (Eigen::Index r = 0; r < window.values.rows(); ++r)
                            column[static_cast<std::size_t>(r)] = window.values(r, c);
                        uni.push_back(fit_egarch_t(column));
                    }
                    cached = univariate_cache.emplace(ms.window, std::move(uni)).first;
                }
                CalibratedModel model;
                model.model_id = ms.name;
                model.window_end = window.end_date;
                model.fit_seed = fit_seed;
                model.impl = fit_mv_garch(
                    window, ms.kind == ModelKind::CccGarch ? MvGarchKind::CCC : MvGarchKind::DCC,
                    &cached->second);
                fits[m] = std::move(model);
            } else {
                fits[m] = fit_model(ms, window, fit_seed);
            }
        } catch (const Error& e) {
            result.absent.push_back({panel.name, date, ms.name, e.what()});
        }
    }

    // Forecast ensembles, one per fitted model, shared across DGPs.
    std::vector<std::optional<Eigen::MatrixXd>> ensembles(n_models);
    for (std::size_t m = 0; m < n_models; ++m) {
        if (!fits[m]) continue;
        std::uint64_t seed = stream_seed(spec.root_seed, panel.name, date,
                                         model_fingerprint(spec.models[m]), "ensemble");
        ensembles[m] = sample_model(*fits[m], spec.n_draws, seed);
    }

    // Hoisted draw-draw terms per (model, rule).
    std::vector<std::vector<std::unique_ptr<EnergyScoreContext>>> es_ctx(n_models);
    std::vector<std::vector<std::unique_ptr<VariogramScoreContext>>> vs_ctx(n_models);
    for (std::size_t m = 0; m < n_models; ++m) {
        es_ctx[m].resize(rules.size());
        vs_ctx[m].resize(rules.size());
        if (!ensembles[m]) continue;
        for (std::size_t r = 0; r < rules.size(); ++r) {
            if (rules[r].kind == RuleSpec::Kind::EnergyScore)
                es_ctx[m][r] = std::make_unique<EnergyScoreContext>(*ensembles[m], rules[r].param);
            else
                vs_ctx[m][r] = std::make_unique<VariogramScoreContext>(*ensembles[m], rules[r].param);
        }
    }

    // Stages 2 and 3: realisations from each DGP, scored under every rule by
    // every model.
    for (std::size_t g = 0; g < dgp_model_idx.size(); ++g) {
        std::size_t dgp_m = dgp_model_idx[g];
        if (!fits[dgp_m]) continue;  // absent DGP: whole slice stays empty
        std::uint64_t seed = stream_seed(spec.root_seed, panel.name, date,
                                         model_fingerprint(spec.models[dgp_m]), "realisations");
        Eigen::MatrixXd realisations = sample_model(*fits[dgp_m], spec.n_draws, seed);
        const Eigen::Index n = realisations.rows();

        for (std::size_t r = 0; r < rules.size(); ++r) {
            const bool is_vs = rules[r].kind == RuleSpec::Kind::VariogramScore;
            // Observation-side variograms are shared by all models.
            std::vector<std::vector<double>> obs_vario;
            if (is_vs) {
                obs_vario.reserve(static_cast<std::size_t>(n));
                for (Eigen::Index i = 0; i < n; ++i)
                    obs_vario.push_back(VariogramScoreContext::observation_variogram(
                        realisations.row(i).transpose(), rules[r].param));
            }
            for (std::size_t m = 0; m < n_models; ++m) {
                if (!ensembles[m]) continue;
                std::vector<double>& out = result.scores[g][r][m];
                out.resize(static_cast<std::size_t>(n));
                if (is_vs) {
                    for (Eigen::Index i = 0; i < n; ++i)
                        out[static_cast<std::size_t>(i)] =
                            vs_ctx[m][r]->score_from_variogram(obs_vario[static_cast<std::size_t>(i)]);
                } else {
                    for (Eigen::Index i = 0; i < n; ++i)
                        out[static_cast<std::size_t>(i)] =
                            es_ctx[m][r]->score(realisations.row(i).transpose());
                }
            }
        }
    }
    return result;
}

}  // namespace

ScoreTensor run_grid(const GridSpec& spec, int threads) {
    validate_grid_spec(spec);
    const std::vector<RuleSpec> rules = spec.rules.empty() ? default_rules() : spec.rules;
    std::vector<std::string> dgps = spec.dgps;
    if (dgps.empty())
        for (const auto& model : spec.models) dgps.push_back(model.name);

    int min_history = 0;
    for (const auto& model : spec.models) min_history = std::max(min_history, model.window);
    // The window ends the day before the evaluation date, so min_history rows
    // must strictly precede each date.

    ScoreTensor tensor;
    for (const auto& panel : spec.panels) tensor.panels.push_back(panel.name);
    tensor.rules = rules;
    for (const auto& model : spec.models) tensor.models.push_back(model.name);
    tensor.dgps = dgps;
    tensor.n_draws = spec.n_draws;
    tensor.subsample = spec.subsample;
    tensor.root_seed = spec.root_seed;

    std::vector<std::size_t> dgp_model_idx;
    for (const auto& name : dgps) {
        for (std::size_t m = 0; m < spec.models.size(); ++m)
            if (spec.models[m].name == name) dgp_model_idx.push_back(m);
    }

    struct WorkItem {
        std::size_t panel;
        std::size_t date;
        Eigen::Index row;
    };
    std::vector<WorkItem> work;
    tensor.dates.resize(spec.panels.size());
    for (std::size_t p = 0; p < spec.panels.size(); ++p) {
        std::vector<Eigen::Index> rows = evaluation_date_rows(spec.panels[p], min_history);
        if (spec.max_dates > 0 && static_cast<int>(rows.size()) > spec.max_dates)
            rows.resize(static_cast<std::size_t>(spec.max_dates));
        if (rows.empty())
            fail(Err::InsufficientHistory,
                 "panel '" + spec.panels[p].name + "' has no evaluation dates");
        for (std::size_t t = 0; t < rows.size(); ++t) {
            tensor.dates[p].push_back(spec.panels[p].dates[static_cast<std::size_t>(rows[t])]);
            work.push_back({p, t, rows[t]});
        }
    }
    tensor.allocate();

    std::vector<CellResult> results(work.size());
    const int n_threads = std::max(1, std::min<int>(threads, static_cast<int>(work.size())));
    std::atomic<std::size_t> next{0};
    auto worker = [&]() {
        for (;;) {
            std::size_t i = next.fetch_add(1);
            if (i >= work.size()) break;
            results[i] = run_cell(spec, rules, dgp_model_idx, work[i].panel, work[i].row);
        }
    };
    if (n_threads == 1) {
        worker();
    } else {
        std::vector<std::thread> pool;
        for (int i = 0; i < n_threads; ++i) pool.emplace_back(worker);
        for (auto& th : pool) th.join();
    }

    // Deterministic assembly in work order.
    for (std::size_t i = 0; i < work.size(); ++i) {
        const WorkItem& item = work[i];
        CellResult& cell = results[i];
        for (const auto& absent : cell.absent) tensor.absent.push_back(absent);
        for (std::size_t g = 0; g < dgps.size(); ++g)
            for (std::size_t r = 0; r < rules.size(); ++r)
                for (std::size_t m = 0; m < spec.models.size(); ++m)
                    tensor.scores_mut(item.panel, item.date, g, r, m) =
                        std::move(cell.scores[g][r][m]);
    }
    return tensor;
}

// ---------------------------------------------------------------------------
// Persistence

namespace {

std::string format_score(double v) {
    char buf[40];
    std::snprintf(buf, sizeof(buf), "%.17g", v);
    return buf;
}

}  // namespace

void write_tensor(const ScoreTensor& tensor, const std::string& directory) {
    fs::path root(directory);
    std::error_code ec;
    fs::create_directories(root / "scores", ec);
    if (ec) fail(Err::IoError, "cannot create '" + (root / "scores").string() + "'");

    ordered_json manifest;
    manifest["schema_version"] = 1;
    manifest["root_seed"] = tensor.root_seed;
    manifest["n_draws"] = tensor.n_draws;
    manifest["subsample"] = tensor.subsample;
    manifest["panels"] = tensor.panels;
    ordered_json dates = ordered_json::array();
    for (const auto& panel_dates : tensor.dates) {
        ordered_json list = ordered_json::array();
        for (const auto& d : panel_dates) list.push_back(d.iso());
        dates.push_back(std::move(list));
    }
    manifest["dates"] = std::move(dates);
    ordered_json rule_list = ordered_json::array();
    for (const auto& rule : tensor.rules) rule_list.push_back(rule.name());
    manifest["rules"] = std::move(rule_list);
    manifest["models"] = tensor.models;
    manifest["dgps"] = tensor.dgps;
    ordered_json absent = ordered_json::array();
    for (const auto& cell : tensor.absent)
        absent.push_back(ordered_json{{"panel", cell.panel},
                                      {"date", cell.date.iso()},
                                      {"model", cell.model},
                                      {"reason", cell.reason}});
    manifest["absent_cells"] = std::move(absent);

    for (std::size_t p = 0; p < tensor.panels.size(); ++p) {
        for (std::size_t g = 0; g < tensor.dgps.size(); ++g) {
            fs::path dir = root / "scores" / tensor.panels[p] / tensor.dgps[g];
            fs::create_directories(dir, ec);
            if (ec) fail(Err::IoError, "cannot create '" + dir.string() + "'");
            for (std::size_t t = 0; t < tensor.dates[p].size(); ++t) {
                fs::path file = dir / (tensor.dates[p][t].iso() + ".csv");
                std::ofstream out(file);
                if (!out) fail(Err::IoError, "cannot write '" + file.string() + "'");
                out << "draw_index,rule,model,score\n";
                for (std::size_t r = 0; r < tensor.rules.size(); ++r) {
                    for (std::size_t m = 0; m < tensor.models.size(); ++m) {
                        const auto& scores = tensor.scores(p, t, g, r, m);
                        for (std::size_t i = 0; i < scores.size(); ++i)
                            out << i << ',' << tensor.rules[r].name() << ','
                                << tensor.models[m] << ',' << format_score(scores[i]) << '\n';
                    }
                }
                if (!out) fail(Err::IoError, "write failed for '" + file.string() + "'");
            }
        }
    }

    std::ofstream mf(root / "manifest.json");
    if (!mf) fail(Err::IoError, "cannot write manifest.json");
    mf << manifest.dump(2) << '\n';
    if (!mf) fail(Err::IoError, "write failed for manifest.json");
}

ScoreTensor read_tensor(const std::string& directory) {
    fs::path root(directory);
    std::ifstream mf(root / "manifest.json");
    if (!mf) fail(Err::MissingTensor, "no manifest.json under '" + directory + "'");
    ordered_json manifest;
    try {
        mf >> manifest;
    } catch (const std::exception& e) {
        fail(Err::MissingTensor, std::string("manifest.json unreadable: ") + e.what());
    }

    ScoreTensor tensor;
    tensor.root_seed = manifest.at("root_seed").get<std::uint64_t>();
    tensor.n_draws = manifest.at("n_draws").get<int>();
    tensor.subsample = manifest.at("subsample").get<int>();
    tensor.panels = manifest.at("panels").get<std::vector<std::string>>();
    for (const auto& list : manifest.at("dates")) {
        std::vector<Date> dates;
        for (const auto& iso : list) dates.push_back(parse_date(iso.get<std::string>()));
        tensor.dates.push_back(std::move(dates));
    }
    for (const auto& name : manifest.at("rules"))
        tensor.rules.push_back(rule_from_name(name.get<std::string>()));
    tensor.models = manifest.at("models").get<std::vector<std::string>>();
    tensor.dgps = manifest.at("dgps").get<std::vector<std::string>>();
    for (const auto& cell : manifest.at("absent_cells"))
        tensor.absent.push_back({cell.at("panel").get<std::string>(),
                                 parse_date(cell.at("date").get<std::string>()),
                                 cell.at("model").get<std::string>(),
                                 cell.at("reason").get<std::string>()});
    tensor.allocate();

    for (std::size_t p = 0; p < tensor.panels.size(); ++p) {
        for (std::size_t g = 0; g < tensor.dgps.size(); ++g) {
            fs::path dir = root / "scores" / tensor.panels[p] / tensor.dgps[g];
            for (std::size_t t = 0; t < tensor.dates[p].size(); ++t) {
                fs::path file = dir / (tensor.dates[p][t].iso() + ".csv");
                std::ifstream in(file);
                if (!in) fail(Err::MissingTensor, "missing partition '" + file.string() + "'");
                std::string line;
                std::getline(in, line);  // header
                while (std::getline(in, line)) {
                    if (line.empty()) continue;
                    // draw_index,rule,model,score
                    std::size_t c1 = line.find(',');
                    std::size_t c2 = line.find(',', c1 + 1);
                    std::size_t c3 = line.find(',', c2 + 1);
                    if (c1 == std::string::npos || c2 == std::string::npos ||
                        c3 == std::string::npos)
                        fail(Err::MissingTensor, "bad row in '" + file.string() + "'");
                    std::size_t draw = std::stoul(line.substr(0, c1));
                    std::size_t r = tensor.rule_index(line.substr(c1 + 1, c2 - c1 - 1));
                    std::size_t m = tensor.model_index(line.substr(c2 + 1, c3 - c2 - 1));
                    double score = std::stod(line.substr(c3 + 1));
                    auto& cell = tensor.scores_mut(p, t, g, r, m);
                    if (cell.size() <= draw) cell.resize(draw + 1);
                    cell[draw] = score;
                }
            }
        }
    }
    return tensor;
}

}  // namespace scorebench
