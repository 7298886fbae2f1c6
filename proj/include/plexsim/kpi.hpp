#ifndef PLEXSIM_KPI_HPP
#define PLEXSIM_KPI_HPP

#include <map>
#include <string>
#include <vector>

#include "plexsim/inference.hpp"
#include "plexsim/outbreak.hpp"
#include "plexsim/strategies.hpp"

namespace plexsim {

// Monte Carlo protocol: for each retained posterior draw, simulate
// n_replicates outbreaks and run every strategy on them (paired trees and
// test draws when `pairing` is on), then summarize draw-level statistics
// across draws.
struct EvaluationPlan {
    PathogenProfile pathogen; // pathogen.hyper_draws must be set
    std::vector<StrategyKind> strategies;
    std::size_t n_posterior_draws = 1000;
    std::size_t n_replicates = 250;
    std::uint64_t master_seed = 0;
    bool pairing = true;
    SimLimits limits;
    int workers = 0; // 0 = hardware concurrency

    void validate() const;
};

enum class Metric {
    DetectionProbability,
    UndetectedGivenFiveSymptomatic,
    TimeToFirstPositive,        // detected outbreaks only
    InfectionsAtFirstPositive,  // detected outbreaks only
    LfdTestsUsed,
    PcrTestsUsed,
    TimeToConfirmation,         // LfdConfirmPcr, confirmed outbreaks only
    InfectionsAtConfirmation,
    PcrAwaitingConfirmation,
    AllAsymptomaticFraction,
};

const char* to_string(Metric metric);
const std::vector<Metric>& all_metrics();

// Equal-tailed summary over draw-level statistics. n_draws counts the draws
// whose replicate set defined the metric; when it is zero the metric is
// undefined and the numeric fields are NaN.
struct MetricSummary {
    double mean;
    double q_lower;
    double q_upper;
    std::size_t n_draws = 0;
};

struct KpiTable {
    std::vector<StrategyKind> strategies;
    std::map<StrategyKind, std::map<Metric, MetricSummary>> summary;
    // draw-level statistics (NaN where undefined), kept for pairing checks
    // and sweep post-processing
    std::map<StrategyKind, std::map<Metric, std::vector<double>>> draw_stats;
    std::map<StrategyKind, long> truncated_runs;
    std::size_t n_posterior_draws_used = 0;
    std::size_t n_replicates = 0;
    double interval_mass = 0.95;
};

KpiTable evaluate(const EvaluationPlan& plan, const LfdModel& lfd, const PcrModel& pcr);

// Sensitivity-analysis grid: one axis varied, everything else at baseline.
struct SweepGrid {
    enum class Axis { PcrLod, PcrSensitivity, R0, PAsymptomatic, LfdShift };
    Axis axis;
    std::vector<double> values;

    static std::vector<double> default_values(Axis axis);
    void validate() const;
};

const char* to_string(SweepGrid::Axis axis);
std::optional<SweepGrid::Axis> axis_from_string(const std::string& name);

struct SweepCell {
    double value;
    KpiTable table;
};

std::vector<SweepCell> sweep(const EvaluationPlan& base_plan, const SweepGrid& grid,
                             const LfdModel& lfd, const PcrModel& pcr);

// report emission (column contract kpi-v1, see README)
void write_kpi_csv(const KpiTable& table, const std::string& path);
void write_kpi_json(const KpiTable& table, std::uint64_t seed, bool pairing,
                    const std::string& path);
void write_sweep_csv(SweepGrid::Axis axis, const std::vector<SweepCell>& cells,
                     const std::string& path);
void write_curve_csv(const std::vector<std::pair<std::string, IncidenceCurve>>& curves,
                     const std::string& path);

} // namespace plexsim

#endif
