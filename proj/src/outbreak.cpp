#include "plexsim/outbreak.hpp"

#include <cmath>
#include <stdexcept>

namespace plexsim {

InfectionStream::InfectionStream(const PathogenProfile& profile,
                                 const PopulationHyperparams& hyper, const SimLimits& limits,
                                 std::uint64_t seed)
    : profile_(profile), hyper_(hyper), limits_(limits), rng_(seed)
{
    if (!profile.valid()) throw std::invalid_argument("simulate_tree: invalid pathogen profile");
    if (!hyper.valid()) throw std::invalid_argument("simulate_tree: invalid hyperparameters");
    if (!limits.valid()) throw std::invalid_argument("simulate_tree: invalid limits");
    queue_.push(Pending{0.0, std::nullopt}); // single index case seeds the outbreak
}

std::optional<InfectionRecord> InfectionStream::next()
{
    if (finished_) return std::nullopt;
    if (queue_.empty()) {
        finished_ = true;
        // an empty queue is genuine extinction only if no offspring were
        // dropped for falling beyond the time window
        truncated_ = suppressed_beyond_window_;
        return std::nullopt;
    }
    if (emitted_ >= limits_.max_infections) {
        finished_ = true;
        truncated_ = true;
        return std::nullopt;
    }

    const Pending pending = queue_.top();
    queue_.pop();

    InfectionRecord rec;
    rec.id = emitted_++;
    rec.parent = pending.parent;
    rec.t_infect = pending.t_infect;
    rec.symptomatic = !rng_.bernoulli(profile_.p_asymptomatic);
    if (rec.symptomatic) {
        rec.t_onset = rec.t_infect + sample(profile_.incubation, rng_);
    }
    rec.trajectory = sample_trajectory(hyper_, rng_);

    const long n_offspring = rng_.poisson(profile_.r0);
    for (long k = 0; k < n_offspring; ++k) {
        const double t_child = rec.t_infect + sample(profile_.generation_time, rng_);
        if (t_child <= limits_.max_time) {
            queue_.push(Pending{t_child, rec.id});
        } else {
            suppressed_beyond_window_ = true;
        }
    }
    return rec;
}

InfectionStream simulate_tree(const PathogenProfile& profile,
                              const PopulationHyperparams& hyper, const SimLimits& limits,
                              std::uint64_t seed)
{
    return InfectionStream(profile, hyper, limits, seed);
}

IncidenceCurve cumulative_incidence_curve(const PathogenProfile& profile,
                                          const PopulationHyperparams& hyper, double horizon,
                                          std::size_t n_sims, std::uint64_t seed,
                                          bool condition_on_survival, double grid_step)
{
    if (horizon <= 0.0) throw std::invalid_argument("cumulative_incidence_curve: horizon <= 0");
    if (grid_step <= 0.0) throw std::invalid_argument("cumulative_incidence_curve: grid_step <= 0");

    const std::size_t n_points = static_cast<std::size_t>(std::floor(horizon / grid_step)) + 1;
    IncidenceCurve curve;
    curve.time.resize(n_points);
    curve.mean_cumulative.assign(n_points, 0.0);
    for (std::size_t i = 0; i < n_points; ++i) curve.time[i] = static_cast<double>(i) * grid_step;

    SimLimits limits;
    limits.max_time = horizon; // infections past the horizon never enter the grid
    std::vector<double> counts(n_points);

    for (std::size_t s = 0; s < n_sims; ++s) {
        InfectionStream stream(profile, hyper, limits, derive_seed(seed, s));
        counts.assign(n_points, 0.0);
        while (auto rec = stream.next()) {
            // increment at the first grid point with t >= t_infect, prefix-sum below
            const std::size_t first =
                static_cast<std::size_t>(std::ceil(rec->t_infect / grid_step));
            if (first < n_points) counts[first] += 1.0;
        }
        for (std::size_t i = 1; i < n_points; ++i) counts[i] += counts[i - 1];
        // survival at the horizon means the tree was still producing
        // infections when it hit a cap, i.e. it did not die out within view
        const bool survived = stream.truncated();
        if (condition_on_survival && !survived) continue;
        ++curve.n_used;
        for (std::size_t i = 0; i < n_points; ++i) curve.mean_cumulative[i] += counts[i];
    }
    if (curve.n_used > 0) {
        for (double& v : curve.mean_cumulative) v /= static_cast<double>(curve.n_used);
    }
    return curve;
}

} // namespace plexsim
