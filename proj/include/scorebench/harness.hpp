// The DGP-rotation simulation grid. For every (panel, quarterly date) the
// whole roster is calibrated on windows ending the day before, each model in
// turn is designated the data generating process and sampled for N
// realisations, and every model's forecast ensemble is scored against those
// same realisations under every rule.
#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "scorebench/models.hpp"
#include "scorebench/panel.hpp"
#include "scorebench/scoring.hpp"

namespace scorebench {

// ---------------------------------------------------------------------------
// Rules

struct RuleSpec {
    enum class Kind { EnergyScore, VariogramScore };
    Kind kind = Kind::EnergyScore;
    double param = 1.0;  // beta for ES, p for VS

    std::string name() const;
};

RuleSpec rule_from_name(const std::string& name);

// ES(1), VS(0.5), VS(1), VS(2).
std::vector<RuleSpec> default_rules();

// ---------------------------------------------------------------------------
// Grid specification

struct GridSpec {
    std::vector<SeriesPanel> panels;  // each with a unique, filesystem-safe name
    std::vector<ModelSpec> models;    // unique names
    std::vector<RuleSpec> rules;      // empty -> default_rules()
    std::vector<std::string> dgps;    // roster names used as DGP; empty -> all
    int n_draws = 5000;
    int subsample = 100;  // carried through to reporting
    std::uint64_t root_seed = 42;
    int max_dates = 0;  // cap on evaluation dates per panel; 0 = no cap
};

void validate_grid_spec(const GridSpec& spec);

// ---------------------------------------------------------------------------
// Evaluation dates

// First available panel date of each calendar quarter that has at least
// min_history strictly preceding rows.
std::vector<Date> evaluation_dates(const SeriesPanel& panel, int min_history);
std::vector<Eigen::Index> evaluation_date_rows(const SeriesPanel& panel, int min_history);

// ---------------------------------------------------------------------------
// Score tensor

struct AbsentCell {
    std::string panel;
    Date date;
    std::string model;
    std::string reason;
};

// Scores S_{i,t}^s(m, m*) with full index metadata. A cell holds the N
// scores of model m against the N realisations drawn from DGP m*; cells hit
// by calibration failures stay empty and are listed in `absent`.
class ScoreTensor {
  public:
    std::vector<std::string> panels;
    std::vector<std::vector<Date>> dates;  // per panel
    std::vector<RuleSpec> rules;
    std::vector<std::string> models;
    std::vector<std::string> dgps;
    int n_draws = 0;
    int subsample = 0;
    std::uint64_t root_seed = 0;
    std::vector<AbsentCell> absent;

    void allocate();

    std::size_t cell_index(std::size_t panel, std::size_t date, std::size_t dgp, std::size_t rule,
                           std::size_t model) const;
    const std::vector<double>& scores(std::size_t panel, std::size_t date, std::size_t dgp,
                                      std::size_t rule, std::size_t model) const;
    std::vector<double>& scores_mut(std::size_t panel, std::size_t date, std::size_t dgp,
                                    std::size_t rule, std::size_t model);
    bool present(std::size_t panel, std::size_t date, std::size_t dgp, std::size_t rule,
                 std::size_t model) const;

    std::size_t panel_index(const std::string& name) const;
    std::size_t model_index(const std::string& name) const;
    std::size_t rule_index(const std::string& name) const;

  private:
    std::vector<std::size_t> panel_offsets_;
    std::vector<std::vector<double>> cells_;
};

// ---------------------------------------------------------------------------
// Execution

// Applies one rule to every realisation row: element i is S(ensemble, y_i).
std::vector<double> scoring_inputs(const Eigen::MatrixXd& ensemble,
                                   const Eigen::MatrixXd& realisations, const RuleSpec& rule);

// Runs the four-stage protocol over the whole grid. Deterministic for a fixed
// root seed: every random stream is derived from
// (root_seed, panel, date, model fingerprint, purpose), so thread count and
// execution order cannot change any value. Calibration failures are recorded
// and the affected cells skipped.
ScoreTensor run_grid(const GridSpec& spec, int threads = 1);

// ---------------------------------------------------------------------------
// Persistence: scores/<panel>/<dgp>/<date>.csv partitions plus manifest.json.

void write_tensor(const ScoreTensor& tensor, const std::string& directory);
ScoreTensor read_tensor(const std::string& directory);

// Stream fingerprint of a model configuration (not its roster name): roster
// entries with identical configurations share ensembles and realisations.
std::uint64_t model_fingerprint(const ModelSpec& spec);

}  // namespace scorebench
