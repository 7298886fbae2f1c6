#ifndef PLEXSIM_KINETICS_HPP
#define PLEXSIM_KINETICS_HPP

#include "plexsim/random.hpp"

namespace plexsim {

// One case's viral concentration trajectory: a piecewise linear hat on the
// log10 gene copies/ml scale, rising from 0 at infection to the peak and
// falling back through 0 at clearance.
struct TrajectoryParams {
    double peak = 0.0;           // peak concentration, log10 gene copies/ml
    double days_to_peak = 0.0;   // delay from infection to peak, days
    double days_to_clear = 0.0;  // delay from peak to clearance, days

    bool valid() const;
};

// Population-level distribution of trajectories: peak ~ lognormal, the two
// delays ~ gamma (shape/rate), plus the observation noise sd used when
// fitting to swab data.
struct PopulationHyperparams {
    double mu_p = 0.0;      // log-scale mean of the peak distribution
    double sigma_p = 1.0;   // log-scale sd of the peak distribution
    double alpha_i2p = 1.0; // infection-to-peak gamma shape
    double beta_i2p = 1.0;  // infection-to-peak gamma rate
    double alpha_p2c = 1.0; // peak-to-clearance gamma shape
    double beta_p2c = 1.0;  // peak-to-clearance gamma rate
    double sigma_obs = 1.0; // observation noise sd, log10 scale

    bool valid() const;
};

// Concentration at infectious age tau (days since infection), unclamped:
// negative values after clearance mean "no detectable virus" and are
// interpreted by the test models, not here.
double viral_concentration(double tau, const TrajectoryParams& params);

// Draw one case's trajectory from the population distributions.
TrajectoryParams sample_trajectory(const PopulationHyperparams& hyper, RngStream& rng);

} // namespace plexsim

#endif
