#ifndef PLEXSIM_PRESETS_HPP
#define PLEXSIM_PRESETS_HPP

#include <string>
#include <vector>

#include "plexsim/inference.hpp"
#include "plexsim/outbreak.hpp"

namespace plexsim {

// Built-in pathogen profiles (sars2, flu-a, flu-b). Generation-time and
// incubation parameters follow the published literature estimates listed in
// the README; flu-b reuses the flu-a delay distributions for lack of data.
PathogenProfile pathogen_preset(const std::string& name);
const std::vector<std::string>& pathogen_preset_names();

// Built-in prior sets for trajectory fitting ("sars2-mid-turbinate",
// "influenza").
PriorSet prior_preset(const std::string& name);
const std::vector<std::string>& prior_preset_names();

// Prior-predictive hyperparameter draws: each population parameter sampled
// from its prior, truncated to the positive half-line where required, so
// the simulation pipeline runs without a fitted posterior.
PosteriorDraws sample_prior_predictive(const PriorSet& priors, std::size_t n_draws,
                                       std::uint64_t seed);

} // namespace plexsim

#endif
