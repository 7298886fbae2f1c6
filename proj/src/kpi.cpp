#include "plexsim/kpi.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <limits>
#include <mutex>
#include <stdexcept>
#include <thread>

#include <json.hpp>

namespace plexsim {

namespace {

constexpr double kNaN = std::numeric_limits<double>::quiet_NaN();

std::string format_number(double v)
{
    if (std::isnan(v)) return "NA";
    char buf[64];
    std::snprintf(buf, sizeof(buf), "%.10g", v);
    return buf;
}

// type-7 (linear interpolation) quantile of a sorted vector
double quantile_sorted(const std::vector<double>& sorted, double q)
{
    if (sorted.empty()) return kNaN;
    if (sorted.size() == 1) return sorted.front();
    const double h = q * static_cast<double>(sorted.size() - 1);
    const std::size_t lo = static_cast<std::size_t>(std::floor(h));
    const std::size_t hi = std::min(lo + 1, sorted.size() - 1);
    const double frac = h - static_cast<double>(lo);
    return sorted[lo] * (1.0 - frac) + sorted[hi] * frac;
}

struct DrawAccumulator {
    long n = 0;
    long n_detected = 0;
    long n_had_five = 0;
    long n_undetected_given_five = 0;
    long n_confirmed = 0;
    long n_all_asym = 0;
    long n_truncated = 0;
    double sum_t_first = 0.0;
    double sum_infections_first = 0.0;
    double sum_lfd = 0.0;
    double sum_pcr = 0.0;
    double sum_t_confirm = 0.0;
    double sum_infections_confirm = 0.0;
    double sum_pcr_awaiting = 0.0;

    void add(const StrategyOutcome& o)
    {
        ++n;
        if (o.detected) {
            ++n_detected;
            sum_t_first += *o.t_first_positive;
            sum_infections_first += static_cast<double>(o.infections_at_first_positive);
        }
        if (o.had_five_symptomatic) {
            ++n_had_five;
            if (!o.detected) ++n_undetected_given_five;
        }
        if (o.t_confirmation) {
            ++n_confirmed;
            sum_t_confirm += *o.t_confirmation;
            sum_infections_confirm += static_cast<double>(o.infections_at_confirmation);
            sum_pcr_awaiting += static_cast<double>(o.n_pcr_awaiting_confirmation);
        }
        if (o.all_asymptomatic) ++n_all_asym;
        if (o.truncated) ++n_truncated;
        sum_lfd += static_cast<double>(o.n_lfd_used);
        sum_pcr += static_cast<double>(o.n_pcr_used);
    }

    // draw-level statistic per metric; NaN when the denominator is empty
    double stat(Metric metric) const
    {
        const double dn = static_cast<double>(n);
        switch (metric) {
        case Metric::DetectionProbability:
            return static_cast<double>(n_detected) / dn;
        case Metric::UndetectedGivenFiveSymptomatic:
            return n_had_five > 0
                       ? static_cast<double>(n_undetected_given_five) / n_had_five
                       : kNaN;
        case Metric::TimeToFirstPositive:
            return n_detected > 0 ? sum_t_first / n_detected : kNaN;
        case Metric::InfectionsAtFirstPositive:
            return n_detected > 0 ? sum_infections_first / n_detected : kNaN;
        case Metric::LfdTestsUsed:
            return sum_lfd / dn;
        case Metric::PcrTestsUsed:
            return sum_pcr / dn;
        case Metric::TimeToConfirmation:
            return n_confirmed > 0 ? sum_t_confirm / n_confirmed : kNaN;
        case Metric::InfectionsAtConfirmation:
            return n_confirmed > 0 ? sum_infections_confirm / n_confirmed : kNaN;
        case Metric::PcrAwaitingConfirmation:
            return n_confirmed > 0 ? sum_pcr_awaiting / n_confirmed : kNaN;
        case Metric::AllAsymptomaticFraction:
            return static_cast<double>(n_all_asym) / dn;
        }
        return kNaN;
    }
};

} // namespace

const char* to_string(Metric metric)
{
    switch (metric) {
    case Metric::DetectionProbability: return "detection_probability";
    case Metric::UndetectedGivenFiveSymptomatic: return "undetected_given_five_symptomatic";
    case Metric::TimeToFirstPositive: return "time_to_first_positive";
    case Metric::InfectionsAtFirstPositive: return "infections_at_first_positive";
    case Metric::LfdTestsUsed: return "lfd_tests_used";
    case Metric::PcrTestsUsed: return "pcr_tests_used";
    case Metric::TimeToConfirmation: return "time_to_confirmation";
    case Metric::InfectionsAtConfirmation: return "infections_at_confirmation";
    case Metric::PcrAwaitingConfirmation: return "pcr_tests_awaiting_confirmation";
    case Metric::AllAsymptomaticFraction: return "all_asymptomatic_fraction";
    }
    return "?";
}

const std::vector<Metric>& all_metrics()
{
    static const std::vector<Metric> metrics = {
        Metric::DetectionProbability,
        Metric::UndetectedGivenFiveSymptomatic,
        Metric::TimeToFirstPositive,
        Metric::InfectionsAtFirstPositive,
        Metric::LfdTestsUsed,
        Metric::PcrTestsUsed,
        Metric::TimeToConfirmation,
        Metric::InfectionsAtConfirmation,
        Metric::PcrAwaitingConfirmation,
        Metric::AllAsymptomaticFraction,
    };
    return metrics;
}

void EvaluationPlan::validate() const
{
    if (strategies.empty()) throw std::invalid_argument("plan: no strategies selected");
    if (n_posterior_draws == 0) throw std::invalid_argument("plan: n_posterior_draws must be > 0");
    if (n_replicates == 0) throw std::invalid_argument("plan: n_replicates must be > 0");
    if (!pathogen.valid()) throw std::invalid_argument("plan: invalid pathogen profile");
    if (!limits.valid()) throw std::invalid_argument("plan: invalid sim limits");
    if (pathogen.hyper_draws == nullptr || pathogen.hyper_draws->draws.empty()) {
        throw std::invalid_argument("plan: no posterior draws attached to the pathogen profile");
    }
}

KpiTable evaluate(const EvaluationPlan& plan, const LfdModel& lfd, const PcrModel& pcr)
{
    plan.validate();
    if (!lfd.valid()) throw std::invalid_argument("evaluate: invalid LFD model");
    if (!pcr.valid()) throw std::invalid_argument("evaluate: invalid PCR model");

    const auto& posterior = plan.pathogen.hyper_draws->draws;
    const std::size_t n_draws = std::min(plan.n_posterior_draws, posterior.size());
    const std::size_t n_strat = plan.strategies.size();

    // one slot per (draw, strategy); filled in any order, reduced in order
    std::vector<std::vector<DrawAccumulator>> acc(n_draws,
                                                  std::vector<DrawAccumulator>(n_strat));

    auto run_draw = [&](std::size_t k) {
        const PopulationHyperparams& hyper = posterior[k];
        for (std::size_t r = 0; r < plan.n_replicates; ++r) {
            if (plan.pairing) {
                SharedOutbreak ob(simulate_tree(plan.pathogen, hyper, plan.limits,
                                                derive_seed(plan.master_seed, 0xA11, k, r)));
                const TestDraws draws{derive_seed(plan.master_seed, 0x7E57, k, r)};
                for (std::size_t s = 0; s < n_strat; ++s) {
                    acc[k][s].add(run_strategy(ob, plan.strategies[s], lfd, pcr, draws));
                }
            } else {
                for (std::size_t s = 0; s < n_strat; ++s) {
                    SharedOutbreak ob(simulate_tree(
                        plan.pathogen, hyper, plan.limits,
                        derive_seed(plan.master_seed, 0xA11, k, r, 1000 + s)));
                    const TestDraws draws{
                        derive_seed(plan.master_seed, 0x7E57, k, r, 1000 + s)};
                    acc[k][s].add(run_strategy(ob, plan.strategies[s], lfd, pcr, draws));
                }
            }
        }
    };

    int workers = plan.workers > 0 ? plan.workers
                                   : static_cast<int>(std::thread::hardware_concurrency());
    workers = std::clamp<int>(workers, 1, static_cast<int>(n_draws));
    if (workers <= 1) {
        for (std::size_t k = 0; k < n_draws; ++k) run_draw(k);
    } else {
        std::atomic<std::size_t> next{0};
        std::exception_ptr failure;
        std::mutex failure_mutex;
        std::vector<std::thread> pool;
        for (int w = 0; w < workers; ++w) {
            pool.emplace_back([&]() {
                try {
                    for (std::size_t k = next.fetch_add(1); k < n_draws; k = next.fetch_add(1)) {
                        run_draw(k);
                    }
                } catch (...) {
                    std::lock_guard<std::mutex> lock(failure_mutex);
                    if (!failure) failure = std::current_exception();
                }
            });
        }
        for (auto& t : pool) t.join();
        if (failure) std::rethrow_exception(failure);
    }

    KpiTable table;
    table.strategies = plan.strategies;
    table.n_posterior_draws_used = n_draws;
    table.n_replicates = plan.n_replicates;

    const double tail = 0.5 * (1.0 - table.interval_mass);
    std::vector<double> values;
    for (std::size_t s = 0; s < n_strat; ++s) {
        const StrategyKind kind = plan.strategies[s];
        long truncated = 0;
        for (std::size_t k = 0; k < n_draws; ++k) truncated += acc[k][s].n_truncated;
        table.truncated_runs[kind] = truncated;
        for (const Metric metric : all_metrics()) {
            auto& stats = table.draw_stats[kind][metric];
            stats.resize(n_draws);
            values.clear();
            for (std::size_t k = 0; k < n_draws; ++k) {
                stats[k] = acc[k][s].stat(metric);
                if (!std::isnan(stats[k])) values.push_back(stats[k]);
            }
            MetricSummary summary;
            summary.n_draws = values.size();
            if (values.empty()) {
                summary.mean = summary.q_lower = summary.q_upper = kNaN;
            } else {
                double sum = 0.0;
                for (const double v : values) sum += v;
                summary.mean = sum / static_cast<double>(values.size());
                std::sort(values.begin(), values.end());
                summary.q_lower = quantile_sorted(values, tail);
                summary.q_upper = quantile_sorted(values, 1.0 - tail);
            }
            table.summary[kind][metric] = summary;
        }
    }
    return table;
}

const char* to_string(SweepGrid::Axis axis)
{
    switch (axis) {
    case SweepGrid::Axis::PcrLod: return "pcr_lod";
    case SweepGrid::Axis::PcrSensitivity: return "pcr_sensitivity";
    case SweepGrid::Axis::R0: return "r0";
    case SweepGrid::Axis::PAsymptomatic: return "p_asymptomatic";
    case SweepGrid::Axis::LfdShift: return "lfd_shift";
    }
    return "?";
}

std::optional<SweepGrid::Axis> axis_from_string(const std::string& name)
{
    for (const auto axis : {SweepGrid::Axis::PcrLod, SweepGrid::Axis::PcrSensitivity,
                            SweepGrid::Axis::R0, SweepGrid::Axis::PAsymptomatic,
                            SweepGrid::Axis::LfdShift}) {
        if (name == to_string(axis)) return axis;
    }
    return std::nullopt;
}

std::vector<double> SweepGrid::default_values(Axis axis)
{
    switch (axis) {
    case Axis::PcrLod: return {std::log10(100.0), std::log10(500.0), std::log10(1000.0)};
    case Axis::PcrSensitivity: return {0.90, 0.95, 0.99};
    case Axis::R0: return {1.25, 1.5, 2.0};
    case Axis::PAsymptomatic: return {0.20, 0.33, 0.50};
    case Axis::LfdShift: return {-1.0, 0.0, 1.0};
    }
    return {};
}

void SweepGrid::validate() const
{
    if (values.empty()) throw std::invalid_argument("sweep: empty values list");
    for (const double v : values) {
        if (!std::isfinite(v)) throw std::invalid_argument("sweep: non-finite axis value");
        switch (axis) {
        case Axis::PcrSensitivity:
            if (v < 0.0 || v > 1.0) {
                throw std::invalid_argument("sweep: pcr_sensitivity values must be in [0,1]");
            }
            break;
        case Axis::R0:
            if (v < 0.0) throw std::invalid_argument("sweep: r0 values must be >= 0");
            break;
        case Axis::PAsymptomatic:
            if (v < 0.0 || v > 1.0) {
                throw std::invalid_argument("sweep: p_asymptomatic values must be in [0,1]");
            }
            break;
        case Axis::PcrLod:
        case Axis::LfdShift:
            break; // any finite value on the log10 scale
        }
    }
}

std::vector<SweepCell> sweep(const EvaluationPlan& base_plan, const SweepGrid& grid,
                             const LfdModel& lfd, const PcrModel& pcr)
{
    grid.validate();
    std::vector<SweepCell> cells;
    cells.reserve(grid.values.size());
    for (std::size_t i = 0; i < grid.values.size(); ++i) {
        const double value = grid.values[i];
        EvaluationPlan plan = base_plan;
        LfdModel cell_lfd = lfd;
        PcrModel cell_pcr = pcr;
        switch (grid.axis) {
        case SweepGrid::Axis::PcrLod: cell_pcr.lod = value; break;
        case SweepGrid::Axis::PcrSensitivity: cell_pcr.sens_above_lod = value; break;
        case SweepGrid::Axis::R0: plan.pathogen.r0 = value; break;
        case SweepGrid::Axis::PAsymptomatic: plan.pathogen.p_asymptomatic = value; break;
        case SweepGrid::Axis::LfdShift: cell_lfd.shift = value; break;
        }
        // per-cell derived streams from the shared master seed
        plan.master_seed =
            derive_seed(base_plan.master_seed, 0x5eed, static_cast<std::uint64_t>(grid.axis), i);
        cells.push_back(SweepCell{value, evaluate(plan, cell_lfd, cell_pcr)});
    }
    return cells;
}

void write_kpi_csv(const KpiTable& table, const std::string& path)
{
    std::ofstream out(path);
    if (!out) throw std::runtime_error("cannot write " + path);
    out << "strategy,metric,mean,q_lower,q_upper,n_draws\n";
    for (const StrategyKind kind : table.strategies) {
        for (const Metric metric : all_metrics()) {
            const MetricSummary& s = table.summary.at(kind).at(metric);
            out << to_string(kind) << ',' << to_string(metric) << ',' << format_number(s.mean)
                << ',' << format_number(s.q_lower) << ',' << format_number(s.q_upper) << ','
                << s.n_draws << '\n';
        }
    }
}

void write_kpi_json(const KpiTable& table, std::uint64_t seed, bool pairing,
                    const std::string& path)
{
    nlohmann::json j;
    j["schema"] = "plexsim-kpi-v1";
    j["seed"] = seed;
    j["pairing"] = pairing;
    j["n_posterior_draws_used"] = table.n_posterior_draws_used;
    j["n_replicates"] = table.n_replicates;
    j["interval_mass"] = table.interval_mass;
    j["conditioning"] = {
        {"time_to_first_positive", "detected outbreaks only"},
        {"infections_at_first_positive", "detected outbreaks only"},
        {"time_to_confirmation", "confirmed outbreaks only (LfdConfirmPcr)"},
        {"infections_at_confirmation", "confirmed outbreaks only (LfdConfirmPcr)"},
        {"pcr_tests_awaiting_confirmation", "confirmed outbreaks only (LfdConfirmPcr)"},
        {"lfd_tests_used", "all outbreaks"},
        {"pcr_tests_used", "all outbreaks"},
    };
    for (const StrategyKind kind : table.strategies) {
        nlohmann::json js;
        for (const Metric metric : all_metrics()) {
            const MetricSummary& s = table.summary.at(kind).at(metric);
            nlohmann::json jm;
            jm["mean"] = std::isnan(s.mean) ? nlohmann::json() : nlohmann::json(s.mean);
            jm["q_lower"] = std::isnan(s.q_lower) ? nlohmann::json() : nlohmann::json(s.q_lower);
            jm["q_upper"] = std::isnan(s.q_upper) ? nlohmann::json() : nlohmann::json(s.q_upper);
            jm["n_draws"] = s.n_draws;
            js[to_string(metric)] = jm;
        }
        js["truncated_runs"] = table.truncated_runs.at(kind);
        j["strategies"][to_string(kind)] = js;
    }
    std::ofstream out(path);
    if (!out) throw std::runtime_error("cannot write " + path);
    out << j.dump(2) << '\n';
}

void write_sweep_csv(SweepGrid::Axis axis, const std::vector<SweepCell>& cells,
                     const std::string& path)
{
    std::ofstream out(path);
    if (!out) throw std::runtime_error("cannot write " + path);
    out << "axis,value,strategy,metric,mean,q_lower,q_upper,n_draws\n";
    for (const SweepCell& cell : cells) {
        for (const StrategyKind kind : cell.table.strategies) {
            for (const Metric metric : all_metrics()) {
                const MetricSummary& s = cell.table.summary.at(kind).at(metric);
                out << to_string(axis) << ',' << format_number(cell.value) << ','
                    << to_string(kind) << ',' << to_string(metric) << ','
                    << format_number(s.mean) << ',' << format_number(s.q_lower) << ','
                    << format_number(s.q_upper) << ',' << s.n_draws << '\n';
            }
        }
    }
}

void write_curve_csv(const std::vector<std::pair<std::string, IncidenceCurve>>& curves,
                     const std::string& path)
{
    std::ofstream out(path);
    if (!out) throw std::runtime_error("cannot write " + path);
    out << "pathogen,t,mean_cumulative_infections\n";
    for (const auto& [name, curve] : curves) {
        for (std::size_t i = 0; i < curve.time.size(); ++i) {
            out << name << ',' << format_number(curve.time[i]) << ','
                << format_number(curve.mean_cumulative[i]) << '\n';
        }
    }
}

} // namespace plexsim
