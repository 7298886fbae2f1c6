#ifndef PLEXSIM_OUTBREAK_HPP
#define PLEXSIM_OUTBREAK_HPP

#include <cstddef>
#include <optional>
#include <queue>
#include <vector>

#include "plexsim/dist.hpp"
#include "plexsim/kinetics.hpp"
#include "plexsim/random.hpp"

namespace plexsim {

struct PosteriorDraws; // inference.hpp

// Transmission and symptom configuration for one pathogen. Trajectory
// hyperparameters are supplied per posterior draw (see kpi::evaluate);
// `hyper_draws` is an optional non-owning reference to the fitted draws.
struct PathogenProfile {
    double r0 = 1.5;                 // expected secondary infections per case
    DistSpec generation_time;        // delay from infection to transmitting
    DistSpec incubation;             // delay from infection to symptom onset
    double p_asymptomatic = 0.33;
    const PosteriorDraws* hyper_draws = nullptr;

    bool valid() const
    {
        return r0 >= 0.0 && p_asymptomatic >= 0.0 && p_asymptomatic <= 1.0 &&
               generation_time.valid() && incubation.valid();
    }
};

// One infection in the transmission tree. `t_onset` is present iff the case
// is symptomatic.
struct InfectionRecord {
    std::size_t id = 0;
    std::optional<std::size_t> parent; // none for the index case
    double t_infect = 0.0;             // days from outbreak start
    bool symptomatic = false;
    std::optional<double> t_onset;
    TrajectoryParams trajectory;
};

// Supercritical branching processes need caps; hitting one ends the stream
// with `truncated() == true` rather than throwing.
struct SimLimits {
    std::size_t max_infections = 10000;
    double max_time = 365.0;

    bool valid() const { return max_infections > 0 && max_time > 0.0; }
};

// Lazily ordered stream of infections: each call to next() emits the record
// with the smallest remaining infection time. Offspring counts are
// Poisson(r0); offspring times are parent time + generation-time draws, so
// emitted times are nondecreasing. The stream ends at extinction or when a
// limit is reached.
class InfectionStream {
public:
    InfectionStream(const PathogenProfile& profile, const PopulationHyperparams& hyper,
                    const SimLimits& limits, std::uint64_t seed);

    std::optional<InfectionRecord> next();
    bool truncated() const { return truncated_; }
    bool finished() const { return finished_; }
    std::size_t emitted() const { return emitted_; }

private:
    struct Pending {
        double t_infect;
        std::optional<std::size_t> parent;
        bool operator>(const Pending& other) const { return t_infect > other.t_infect; }
    };

    PathogenProfile profile_;
    PopulationHyperparams hyper_;
    SimLimits limits_;
    RngStream rng_;
    std::priority_queue<Pending, std::vector<Pending>, std::greater<Pending>> queue_;
    std::size_t emitted_ = 0;
    bool truncated_ = false;
    bool finished_ = false;
    bool suppressed_beyond_window_ = false;
};

InfectionStream simulate_tree(const PathogenProfile& profile,
                              const PopulationHyperparams& hyper, const SimLimits& limits,
                              std::uint64_t seed);

// Monte Carlo mean of cumulative infections over a uniform time grid
// (Figure-4 style epidemic curves). When `condition_on_survival` is set,
// trees that went extinct before the horizon are excluded.
struct IncidenceCurve {
    std::vector<double> time;
    std::vector<double> mean_cumulative;
    std::size_t n_used = 0; // simulations contributing (== n_sims unless conditioned)
};

IncidenceCurve cumulative_incidence_curve(const PathogenProfile& profile,
                                          const PopulationHyperparams& hyper, double horizon,
                                          std::size_t n_sims, std::uint64_t seed,
                                          bool condition_on_survival = false,
                                          double grid_step = 1.0);

} // namespace plexsim

#endif
