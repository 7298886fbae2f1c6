#ifndef PLEXSIM_CONFIG_HPP
#define PLEXSIM_CONFIG_HPP

#include <optional>
#include <string>
#include <vector>

#include "plexsim/dataset.hpp"
#include "plexsim/inference.hpp"
#include "plexsim/kpi.hpp"
#include "plexsim/outbreak.hpp"
#include "plexsim/strategies.hpp"
#include "plexsim/testmodels.hpp"

namespace plexsim {

// Parsed run configuration (JSON schema plexsim-config-v1, documented in the
// README). Flags override file values; the seed must come from one of them.
struct RunConfig {
    std::uint64_t seed = 0;
    bool seed_set = false;
    int workers = 0;
    std::string out_dir = "out";

    std::string pathogen_name = "custom";
    PathogenProfile pathogen;

    std::optional<LfdModel> lfd; // mandatory for simulate/sweep, never defaulted
    PcrModel pcr;

    std::vector<StrategyKind> strategies; // defaults to all five
    std::size_t n_posterior_draws = 1000;
    std::size_t n_replicates = 250;
    bool pairing = true;
    SimLimits limits;
    std::string posterior_file;
    bool prior_predictive = false;
    std::string prior_preset_name = "sars2-mid-turbinate";
    bool emit_curves = false;

    struct CurvesSection {
        double horizon = 50.0;
        std::size_t n_sims = 1000;
        double grid_step = 1.0;
        bool condition_on_survival = false;
        std::vector<std::string> pathogens; // presets; defaults to all three
    } curves;

    struct FitSection {
        bool present = false;
        std::string dataset;
        AnchorMode anchor_mode = AnchorMode::InfectionAnchored;
        double censor_threshold = 0.0;
        std::optional<DistSpec> incubation_prior;
        PriorSet priors;
        FitConfig mcmc;
    } fit;

    struct SweepSection {
        bool present = false;
        std::optional<SweepGrid::Axis> axis;
        std::vector<double> values; // empty = axis defaults
    } sweep;
};

RunConfig load_config(const std::string& path);

} // namespace plexsim

#endif
