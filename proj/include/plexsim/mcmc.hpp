#ifndef PLEXSIM_MCMC_HPP
#define PLEXSIM_MCMC_HPP

#include <algorithm>
#include <cmath>

#include "plexsim/random.hpp"

namespace plexsim::mcmc {

// Robbins-Monro step-size adaptation toward a target acceptance rate. The
// adaptation magnitude decays as n^-decay, so the kernel is diminishingly
// adaptive and the chain remains valid when adaptation never switches off.
struct AdaptiveScale {
    double log_step;
    double target;
    double decay = 0.6;
    long n_updates = 0;
    long n_accepted = 0;
    long n_proposed = 0;

    explicit AdaptiveScale(double initial_step = 0.4, double target_rate = 0.3)
        : log_step(std::log(initial_step)), target(target_rate)
    {
    }

    double step() const { return std::exp(log_step); }

    void adapt(double accept_prob)
    {
        ++n_updates;
        log_step += std::pow(static_cast<double>(n_updates), -decay) * (accept_prob - target);
        log_step = std::clamp(log_step, -15.0, 5.0);
    }

    void record(bool accepted)
    {
        ++n_proposed;
        if (accepted) ++n_accepted;
    }

    void reset_counters()
    {
        n_proposed = 0;
        n_accepted = 0;
    }

    double acceptance_rate() const
    {
        return n_proposed > 0 ? static_cast<double>(n_accepted) / n_proposed : 0.0;
    }
};

// One scalar random-walk Metropolis update. `logdens` must return -inf for
// states outside the support; `cached` holds logdens(x) and is kept in sync.
template <class LogDens>
bool rw_step(double& x, double& cached, AdaptiveScale& scale, LogDens&& logdens, RngStream& rng)
{
    const double proposal = x + scale.step() * rng.normal(0.0, 1.0);
    const double lp = logdens(proposal);
    const double log_ratio = lp - cached;
    const double accept_prob = log_ratio >= 0.0 ? 1.0 : std::exp(log_ratio);
    const bool accepted = rng.uniform() < accept_prob;
    if (accepted) {
        x = proposal;
        cached = lp;
    }
    scale.adapt(accept_prob);
    scale.record(accepted);
    return accepted;
}

// Integrated autocorrelation time via Geyer's initial positive sequence;
// returns the effective sample size of the series.
double effective_sample_size(const double* draws, std::size_t n);

} // namespace plexsim::mcmc

#endif
