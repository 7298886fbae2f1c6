#include "plexsim/config.hpp"

#include <fstream>
#include <stdexcept>

#include <json.hpp>

#include "plexsim/presets.hpp"

namespace plexsim {

namespace {

using nlohmann::json;

[[noreturn]] void fail(const std::string& message)
{
    throw std::invalid_argument("config: " + message);
}

double get_number(const json& j, const std::string& key, const std::string& context)
{
    if (!j.contains(key) || !j.at(key).is_number()) {
        fail(context + ": missing or non-numeric field '" + key + "'");
    }
    return j.at(key).get<double>();
}

double get_number_or(const json& j, const std::string& key, double fallback,
                     const std::string& context)
{
    if (!j.contains(key)) return fallback;
    if (!j.at(key).is_number()) fail(context + ": field '" + key + "' must be a number");
    return j.at(key).get<double>();
}

bool get_bool_or(const json& j, const std::string& key, bool fallback,
                 const std::string& context)
{
    if (!j.contains(key)) return fallback;
    if (!j.at(key).is_boolean()) fail(context + ": field '" + key + "' must be a boolean");
    return j.at(key).get<bool>();
}

DistSpec parse_dist(const json& j, const std::string& context)
{
    if (!j.is_object() || !j.contains("family")) {
        fail(context + ": expected {family, a, b}");
    }
    return parse_dist_spec(j.at("family").get<std::string>(), get_number(j, "a", context),
                           get_number(j, "b", context));
}

NormalPrior parse_prior(const json& j, const std::string& context)
{
    NormalPrior p;
    p.mean = get_number(j, "mean", context);
    p.sd = get_number(j, "sd", context);
    if (!(p.sd > 0.0)) fail(context + ": prior sd must be positive");
    return p;
}

void parse_pathogen(const json& j, RunConfig& cfg)
{
    if (!j.is_object()) fail("'pathogen' must be an object");
    if (j.contains("preset")) {
        cfg.pathogen_name = j.at("preset").get<std::string>();
        cfg.pathogen = pathogen_preset(cfg.pathogen_name); // throws listing valid names
    } else {
        cfg.pathogen_name = "custom";
        cfg.pathogen.generation_time = parse_dist(j.at("generation_time"), "pathogen.generation_time");
        cfg.pathogen.incubation = parse_dist(j.at("incubation"), "pathogen.incubation");
    }
    cfg.pathogen.r0 = get_number_or(j, "r0", cfg.pathogen.r0, "pathogen");
    cfg.pathogen.p_asymptomatic =
        get_number_or(j, "p_asymptomatic", cfg.pathogen.p_asymptomatic, "pathogen");
    if (!cfg.pathogen.valid()) fail("pathogen parameters out of domain");
}

void parse_simulate(const json& j, RunConfig& cfg)
{
    if (j.contains("strategies")) {
        if (!j.at("strategies").is_array() || j.at("strategies").empty()) {
            fail("simulate.strategies must be a non-empty array");
        }
        cfg.strategies.clear();
        for (const auto& name : j.at("strategies")) {
            const auto kind = strategy_from_string(name.get<std::string>());
            if (!kind) {
                std::string valid;
                for (const StrategyKind k : all_strategies()) {
                    valid += (valid.empty() ? "" : ", ") + std::string(to_string(k));
                }
                fail("unknown strategy '" + name.get<std::string>() + "' (valid: " + valid + ")");
            }
            cfg.strategies.push_back(*kind);
        }
    }
    cfg.n_posterior_draws = static_cast<std::size_t>(
        get_number_or(j, "n_posterior_draws", static_cast<double>(cfg.n_posterior_draws), "simulate"));
    cfg.n_replicates = static_cast<std::size_t>(
        get_number_or(j, "n_replicates", static_cast<double>(cfg.n_replicates), "simulate"));
    cfg.pairing = get_bool_or(j, "pairing", cfg.pairing, "simulate");
    cfg.limits.max_infections = static_cast<std::size_t>(get_number_or(
        j, "max_infections", static_cast<double>(cfg.limits.max_infections), "simulate"));
    cfg.limits.max_time = get_number_or(j, "max_time", cfg.limits.max_time, "simulate");
    if (j.contains("posterior_file")) {
        cfg.posterior_file = j.at("posterior_file").get<std::string>();
    }
    cfg.prior_predictive = get_bool_or(j, "prior_predictive", cfg.prior_predictive, "simulate");
    if (j.contains("prior_preset")) {
        cfg.prior_preset_name = j.at("prior_preset").get<std::string>();
        prior_preset(cfg.prior_preset_name); // validate now
    }
    cfg.emit_curves = get_bool_or(j, "emit_curves", cfg.emit_curves, "simulate");
    if (!(cfg.n_posterior_draws > 0) || !(cfg.n_replicates > 0)) {
        fail("simulate: draw and replicate counts must be positive");
    }
    if (!cfg.limits.valid()) fail("simulate: limits must be positive");
}

void parse_fit(const json& j, RunConfig& cfg)
{
    auto& fit = cfg.fit;
    fit.present = true;
    if (!j.contains("dataset")) fail("fit.dataset is required");
    fit.dataset = j.at("dataset").get<std::string>();
    const std::string anchor = j.contains("anchor_mode")
                                   ? j.at("anchor_mode").get<std::string>()
                                   : std::string("infection");
    if (anchor == "infection") {
        fit.anchor_mode = AnchorMode::InfectionAnchored;
    } else if (anchor == "onset") {
        fit.anchor_mode = AnchorMode::OnsetAnchored;
    } else {
        fail("fit.anchor_mode must be 'infection' or 'onset'");
    }
    fit.censor_threshold = get_number(j, "censor_threshold", "fit");
    if (j.contains("incubation_prior")) {
        fit.incubation_prior = parse_dist(j.at("incubation_prior"), "fit.incubation_prior");
    }
    if (fit.anchor_mode == AnchorMode::OnsetAnchored && !fit.incubation_prior) {
        fail("fit: onset-anchored data requires fit.incubation_prior");
    }

    if (!j.contains("priors")) fail("fit.priors is required (preset name or explicit priors)");
    const auto& jp = j.at("priors");
    if (jp.is_string()) {
        fit.priors = prior_preset(jp.get<std::string>());
    } else if (jp.is_object()) {
        fit.priors.mu_p = parse_prior(jp.at("mu_p"), "fit.priors.mu_p");
        fit.priors.sigma_p = parse_prior(jp.at("sigma_p"), "fit.priors.sigma_p");
        fit.priors.alpha_i2p = parse_prior(jp.at("alpha_i2p"), "fit.priors.alpha_i2p");
        fit.priors.beta_i2p = parse_prior(jp.at("beta_i2p"), "fit.priors.beta_i2p");
        fit.priors.alpha_p2c = parse_prior(jp.at("alpha_p2c"), "fit.priors.alpha_p2c");
        fit.priors.beta_p2c = parse_prior(jp.at("beta_p2c"), "fit.priors.beta_p2c");
    } else {
        fail("fit.priors must be a preset name or an object");
    }
    fit.priors.sigma_obs_scale =
        get_number_or(j, "sigma_obs_scale", fit.priors.sigma_obs_scale, "fit");

    fit.mcmc.n_chains = static_cast<int>(get_number_or(j, "chains", fit.mcmc.n_chains, "fit"));
    fit.mcmc.n_iterations =
        static_cast<long>(get_number_or(j, "iterations", static_cast<double>(fit.mcmc.n_iterations), "fit"));
    fit.mcmc.burn_in_fraction =
        get_number_or(j, "burn_in_fraction", fit.mcmc.burn_in_fraction, "fit");
    fit.mcmc.n_retained =
        static_cast<int>(get_number_or(j, "retained", fit.mcmc.n_retained, "fit"));
    fit.mcmc.validate();
}

void parse_sweep(const json& j, RunConfig& cfg)
{
    cfg.sweep.present = true;
    if (j.contains("axis")) {
        const std::string name = j.at("axis").get<std::string>();
        cfg.sweep.axis = axis_from_string(name);
        if (!cfg.sweep.axis) {
            fail("unknown sweep axis '" + name +
                 "' (valid: pcr_lod, pcr_sensitivity, r0, p_asymptomatic, lfd_shift)");
        }
    }
    if (j.contains("values")) {
        if (!j.at("values").is_array() || j.at("values").empty()) {
            fail("sweep.values must be a non-empty array");
        }
        for (const auto& v : j.at("values")) {
            if (!v.is_number()) fail("sweep.values entries must be numbers");
            cfg.sweep.values.push_back(v.get<double>());
        }
    }
}

void parse_curves(const json& j, RunConfig& cfg)
{
    cfg.curves.horizon = get_number_or(j, "horizon", cfg.curves.horizon, "curves");
    cfg.curves.n_sims = static_cast<std::size_t>(
        get_number_or(j, "n_sims", static_cast<double>(cfg.curves.n_sims), "curves"));
    cfg.curves.grid_step = get_number_or(j, "grid_step", cfg.curves.grid_step, "curves");
    cfg.curves.condition_on_survival =
        get_bool_or(j, "condition_on_survival", false, "curves");
    if (j.contains("pathogens")) {
        for (const auto& name : j.at("pathogens")) {
            pathogen_preset(name.get<std::string>()); // validate
            cfg.curves.pathogens.push_back(name.get<std::string>());
        }
    }
    if (!(cfg.curves.horizon > 0.0) || cfg.curves.n_sims == 0 || !(cfg.curves.grid_step > 0.0)) {
        fail("curves: horizon, n_sims and grid_step must be positive");
    }
}

} // namespace

RunConfig load_config(const std::string& path)
{
    std::ifstream in(path);
    if (!in) throw std::invalid_argument("cannot open config file: " + path);

    json j;
    try {
        in >> j;
    } catch (const json::parse_error& e) {
        throw std::invalid_argument("config parse error in " + path + ": " + e.what());
    }

    if (!j.contains("schema") || j.at("schema") != "plexsim-config-v1") {
        fail("missing or unsupported schema (expected \"plexsim-config-v1\")");
    }

    RunConfig cfg;
    cfg.strategies = all_strategies();

    if (j.contains("seed")) {
        if (!j.at("seed").is_number_unsigned() && !j.at("seed").is_number_integer()) {
            fail("seed must be a non-negative integer");
        }
        cfg.seed = j.at("seed").get<std::uint64_t>();
        cfg.seed_set = true;
    }
    cfg.workers = static_cast<int>(get_number_or(j, "workers", 0.0, "config"));
    if (j.contains("out_dir")) cfg.out_dir = j.at("out_dir").get<std::string>();

    if (j.contains("pathogen")) parse_pathogen(j.at("pathogen"), cfg);

    if (j.contains("lfd")) {
        const auto& jl = j.at("lfd");
        LfdModel lfd;
        lfd.beta0 = get_number(jl, "beta0", "lfd");
        lfd.beta1 = get_number(jl, "beta1", "lfd");
        lfd.shift = get_number_or(jl, "shift", 0.0, "lfd");
        if (!lfd.valid()) fail("lfd.beta1 must be positive");
        cfg.lfd = lfd;
    }
    if (j.contains("pcr")) {
        const auto& jp = j.at("pcr");
        cfg.pcr.lod = get_number_or(jp, "lod_log10", cfg.pcr.lod, "pcr");
        cfg.pcr.sens_above_lod = get_number_or(jp, "sensitivity", cfg.pcr.sens_above_lod, "pcr");
        cfg.pcr.turnaround = get_number_or(jp, "turnaround_days", cfg.pcr.turnaround, "pcr");
        if (!cfg.pcr.valid()) fail("pcr parameters out of domain");
    }

    if (j.contains("simulate")) parse_simulate(j.at("simulate"), cfg);
    if (j.contains("fit")) parse_fit(j.at("fit"), cfg);
    if (j.contains("sweep")) parse_sweep(j.at("sweep"), cfg);
    if (j.contains("curves")) parse_curves(j.at("curves"), cfg);

    return cfg;
}

} // namespace plexsim
