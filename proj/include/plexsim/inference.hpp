#ifndef PLEXSIM_INFERENCE_HPP
#define PLEXSIM_INFERENCE_HPP

#include <map>
#include <string>
#include <vector>

#include "plexsim/dataset.hpp"
#include "plexsim/kinetics.hpp"
#include "plexsim/random.hpp"

namespace plexsim {

struct NormalPrior {
    double mean = 0.0;
    double sd = 1.0;
};

// Weakly informative priors for the six population parameters (normal,
// truncated to the positive half-line where the parameter requires it) and
// a half-normal scale for the observation noise sd.
struct PriorSet {
    NormalPrior mu_p;
    NormalPrior sigma_p;
    NormalPrior alpha_i2p;
    NormalPrior beta_i2p;
    NormalPrior alpha_p2c;
    NormalPrior beta_p2c;
    double sigma_obs_scale = 2.0;

    bool valid() const;
};

struct FitConfig {
    int n_chains = 4;
    long n_iterations = 100000; // per chain, burn-in included
    double burn_in_fraction = 0.5;
    int n_retained = 1000; // pooled across chains
    double target_acceptance = 0.3;
    double accept_band_low = 0.2;
    double accept_band_high = 0.5;
    double ess_floor = 100.0;
    int workers = 0; // 0 = one thread per chain, capped at hardware

    void validate() const;
};

struct FitDiagnostics {
    std::map<std::string, double> acceptance; // per proposal block, post burn-in
    std::map<std::string, double> ess;        // per hyperparameter, summed over chains
    std::vector<std::string> warnings;
};

struct PosteriorDraws {
    std::vector<PopulationHyperparams> draws;
    FitDiagnostics diagnostics;
};

// Full-model joint log density: observation terms (censored observations
// contribute the normal mass below the censoring threshold), population
// densities of the per-case trajectory parameters, incubation densities for
// onset-anchored data, and the hyperpriors. Out-of-support states return
// -inf rather than throwing.
double log_posterior(const Dataset& dataset, const std::vector<TrajectoryParams>& case_params,
                     const std::vector<double>& latent_incubations,
                     const PopulationHyperparams& hyper, const PriorSet& priors);

// Adaptive random-walk Metropolis-within-Gibbs over the blocks
// {per-case trajectory params}, {latent incubations}, {hyperparameters}.
// Positive quantities move on the log scale with the Jacobian folded into
// the acceptance ratio. Returns exactly config.n_retained pooled draws.
PosteriorDraws fit(const Dataset& dataset, const PriorSet& priors, const FitConfig& config,
                   std::uint64_t seed);

// Posterior draw files: one CSV row per retained draw, columns
// mu_p,sigma_p,alpha_i2p,beta_i2p,alpha_p2c,beta_p2c,sigma_obs.
void save_posterior(const PosteriorDraws& draws, const std::string& path);
PosteriorDraws load_posterior(const std::string& path);

} // namespace plexsim

#endif
