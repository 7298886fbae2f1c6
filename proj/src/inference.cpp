#include "plexsim/inference.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <limits>
#include <numeric>
#include <mutex>
#include <sstream>
#include <stdexcept>
#include <thread>

#include "plexsim/dist.hpp"
#include "plexsim/mcmc.hpp"

namespace plexsim {

namespace {

constexpr double kNegInf = -std::numeric_limits<double>::infinity();

// trajectory value without parameter validation; inference proposals are
// positive by construction (log-scale moves) and tau may be negative while
// a latent infection time is being explored
double traj_value(double tau, const TrajectoryParams& p)
{
    if (tau <= p.days_to_peak) return p.peak * (tau / p.days_to_peak);
    return p.peak - (tau - p.days_to_peak) * (p.peak / p.days_to_clear);
}

double obs_loglik_case(const Dataset& ds, std::size_t c, const TrajectoryParams& params,
                       double incubation, double sigma_obs)
{
    double total = 0.0;
    for (const std::size_t idx : ds.obs_by_case[c]) {
        const auto& rec = ds.records[idx];
        const double tau = rec.t_anchor + incubation;
        const double v = traj_value(tau, params);
        if (rec.censored) {
            // mass on the undetectable side of the censoring threshold
            total += normal_log_cdf((ds.censor_threshold - v) / sigma_obs);
        } else {
            total += normal_log_pdf(*rec.value, v, sigma_obs);
        }
    }
    return total;
}

double population_loglik(const TrajectoryParams& params, const PopulationHyperparams& hyper,
                         double& out_p, double& out_i2p, double& out_p2c)
{
    out_p = lognormal_log_pdf(params.peak, hyper.mu_p, hyper.sigma_p);
    out_i2p = gamma_log_pdf(params.days_to_peak, hyper.alpha_i2p, hyper.beta_i2p);
    out_p2c = gamma_log_pdf(params.days_to_clear, hyper.alpha_p2c, hyper.beta_p2c);
    return out_p + out_i2p + out_p2c;
}

double positive_normal_prior(double x, const NormalPrior& prior)
{
    if (x <= 0.0) return kNegInf;
    // truncation constant omitted: it does not depend on x
    return normal_log_pdf(x, prior.mean, prior.sd);
}

double half_normal_log_pdf(double x, double scale)
{
    if (x <= 0.0) return kNegInf;
    return std::log(2.0) + normal_log_pdf(x, 0.0, scale);
}

double hyperprior_loglik(const PopulationHyperparams& hyper, const PriorSet& priors)
{
    double total = normal_log_pdf(hyper.mu_p, priors.mu_p.mean, priors.mu_p.sd);
    total += positive_normal_prior(hyper.sigma_p, priors.sigma_p);
    total += positive_normal_prior(hyper.alpha_i2p, priors.alpha_i2p);
    total += positive_normal_prior(hyper.beta_i2p, priors.beta_i2p);
    total += positive_normal_prior(hyper.alpha_p2c, priors.alpha_p2c);
    total += positive_normal_prior(hyper.beta_p2c, priors.beta_p2c);
    total += half_normal_log_pdf(hyper.sigma_obs, priors.sigma_obs_scale);
    return total;
}

} // namespace

bool PriorSet::valid() const
{
    for (const NormalPrior* p :
         {&mu_p, &sigma_p, &alpha_i2p, &beta_i2p, &alpha_p2c, &beta_p2c}) {
        if (!std::isfinite(p->mean) || !(p->sd > 0.0)) return false;
    }
    return sigma_obs_scale > 0.0;
}

void FitConfig::validate() const
{
    if (n_chains < 1) throw std::invalid_argument("fit: n_chains must be >= 1");
    if (n_iterations < 2) throw std::invalid_argument("fit: n_iterations must be >= 2");
    if (!(burn_in_fraction >= 0.0 && burn_in_fraction < 1.0)) {
        throw std::invalid_argument("fit: burn_in_fraction must be in [0,1)");
    }
    if (n_retained < 1) throw std::invalid_argument("fit: n_retained must be >= 1");
    const long burn = static_cast<long>(n_iterations * burn_in_fraction);
    const long post = n_iterations - burn;
    if (static_cast<long>(n_chains) * post < n_retained) {
        throw std::invalid_argument("fit: chains x post-burn-in iterations (" +
                                    std::to_string(n_chains * post) +
                                    ") cannot yield n_retained = " + std::to_string(n_retained));
    }
}

double log_posterior(const Dataset& dataset, const std::vector<TrajectoryParams>& case_params,
                     const std::vector<double>& latent_incubations,
                     const PopulationHyperparams& hyper, const PriorSet& priors)
{
    const std::size_t n = dataset.n_cases();
    if (case_params.size() != n) {
        throw std::invalid_argument("log_posterior: case_params size mismatch");
    }
    const bool onset = dataset.anchor_mode == AnchorMode::OnsetAnchored;
    if (onset && latent_incubations.size() != n) {
        throw std::invalid_argument("log_posterior: latent_incubations size mismatch");
    }
    if (!priors.valid()) throw std::invalid_argument("log_posterior: invalid priors");

    if (!hyper.valid()) return kNegInf;
    for (const auto& params : case_params) {
        if (!params.valid()) return kNegInf;
    }
    if (onset) {
        for (const double inc : latent_incubations) {
            if (!(inc > 0.0) || !std::isfinite(inc)) return kNegInf;
        }
    }

    double total = hyperprior_loglik(hyper, priors);
    for (std::size_t c = 0; c < n; ++c) {
        const double incubation = onset ? latent_incubations[c] : 0.0;
        total += obs_loglik_case(dataset, c, case_params[c], incubation, hyper.sigma_obs);
        double a, b, d;
        total += population_loglik(case_params[c], hyper, a, b, d);
        if (onset) total += log_pdf(*dataset.incubation_prior, latent_incubations[c]);
    }
    return total;
}

namespace {

using mcmc::AdaptiveScale;

struct ChainResult {
    std::vector<PopulationHyperparams> retained;
    // post burn-in acceptance counters: {accepted, proposed} per block
    std::map<std::string, std::pair<long, long>> acceptance;
    std::map<std::string, double> ess;
};

class ChainRunner {
public:
    ChainRunner(const Dataset& ds, const PriorSet& priors, const FitConfig& cfg,
                std::uint64_t seed, int chain_index)
        : ds_(ds), priors_(priors), cfg_(cfg), rng_(derive_seed(seed, 0x101, chain_index)),
          onset_(ds.anchor_mode == AnchorMode::OnsetAnchored), n_(ds.n_cases())
    {
    }

    ChainResult run(int quota);

private:
    const Dataset& ds_;
    const PriorSet& priors_;
    const FitConfig& cfg_;
    RngStream rng_;
    bool onset_;
    std::size_t n_;

    // state: per-case logs and transformed hyper coordinates
    std::vector<std::array<double, 3>> case_logs_; // log peak, log d_i2p, log d_p2c
    std::vector<TrajectoryParams> case_params_;
    std::vector<double> log_incub_;
    std::vector<double> incub_;
    double mu_p_ = 0.0;
    double log_sigma_p_ = 0.0;
    double log_alpha_i2p_ = 0.0, log_beta_i2p_ = 0.0;
    double log_alpha_p2c_ = 0.0, log_beta_p2c_ = 0.0;
    double log_sigma_obs_ = 0.0;

    // cached log-density pieces
    std::vector<double> obs_ll_, pop_p_, pop_i2p_, pop_p2c_, incub_ll_;
    std::vector<double> scratch_;

    std::vector<AdaptiveScale> case_scales_;
    std::vector<AdaptiveScale> incub_scales_;
    std::map<std::string, AdaptiveScale> hyper_scales_;

    PopulationHyperparams current_hyper() const
    {
        PopulationHyperparams h;
        h.mu_p = mu_p_;
        h.sigma_p = std::exp(log_sigma_p_);
        h.alpha_i2p = std::exp(log_alpha_i2p_);
        h.beta_i2p = std::exp(log_beta_i2p_);
        h.alpha_p2c = std::exp(log_alpha_p2c_);
        h.beta_p2c = std::exp(log_beta_p2c_);
        h.sigma_obs = std::exp(log_sigma_obs_);
        return h;
    }

    void initialize();
    void refresh_caches();
    void check_initial_state();
    void update_cases();
    void update_incubations();
    void update_hyperparams();
};

void ChainRunner::initialize()
{
    case_logs_.resize(n_);
    case_params_.resize(n_);
    const double incub_mean = onset_ ? dist_mean(*ds_.incubation_prior) : 0.0;

    std::vector<double> log_peaks, d_i2p0, d_p2c0;
    for (std::size_t c = 0; c < n_; ++c) {
        double best_value = -std::numeric_limits<double>::infinity();
        double best_t = 0.0;
        double last_t = 0.0;
        for (const std::size_t idx : ds_.obs_by_case[c]) {
            const auto& rec = ds_.records[idx];
            last_t = std::max(last_t, rec.t_anchor);
            if (rec.value && *rec.value > best_value) {
                best_value = *rec.value;
                best_t = rec.t_anchor;
            }
        }
        const double p0 = std::max(best_value, std::max(ds_.censor_threshold, 0.0) + 0.5);
        double t_peak0 = best_t + (onset_ ? incub_mean : 0.0);
        t_peak0 = std::clamp(t_peak0, 0.5, 30.0);
        const double t_clear0 = std::max(2.0, last_t + (onset_ ? incub_mean : 0.0) - t_peak0);

        case_logs_[c] = {std::log(p0) + 0.05 * rng_.normal(0.0, 1.0),
                         std::log(t_peak0) + 0.05 * rng_.normal(0.0, 1.0),
                         std::log(t_clear0) + 0.05 * rng_.normal(0.0, 1.0)};
        log_peaks.push_back(case_logs_[c][0]);
        d_i2p0.push_back(std::exp(case_logs_[c][1]));
        d_p2c0.push_back(std::exp(case_logs_[c][2]));
    }

    auto moments = [](const std::vector<double>& xs) {
        const double m = std::accumulate(xs.begin(), xs.end(), 0.0) / xs.size();
        double v = 0.0;
        for (const double x : xs) v += (x - m) * (x - m);
        v = xs.size() > 1 ? v / (xs.size() - 1) : 0.25;
        return std::pair<double, double>(m, std::max(v, 1e-2));
    };

    const auto [mp, vp] = moments(log_peaks);
    mu_p_ = mp;
    log_sigma_p_ = std::log(std::max(0.2, std::sqrt(vp)));
    const auto [mi, vi] = moments(d_i2p0);
    log_alpha_i2p_ = std::log(std::clamp(mi * mi / vi, 0.2, 50.0));
    log_beta_i2p_ = std::log(std::clamp(mi / vi, 0.05, 50.0));
    const auto [mc, vc] = moments(d_p2c0);
    log_alpha_p2c_ = std::log(std::clamp(mc * mc / vc, 0.2, 50.0));
    log_beta_p2c_ = std::log(std::clamp(mc / vc, 0.05, 50.0));
    log_sigma_obs_ = 0.0;

    // small per-chain jitter keeps multi-chain starts dispersed
    for (double* x : {&mu_p_, &log_sigma_p_, &log_alpha_i2p_, &log_beta_i2p_, &log_alpha_p2c_,
                      &log_beta_p2c_, &log_sigma_obs_}) {
        *x += 0.05 * rng_.normal(0.0, 1.0);
    }

    if (onset_) {
        log_incub_.resize(n_);
        incub_.resize(n_);
        for (std::size_t c = 0; c < n_; ++c) {
            log_incub_[c] = std::log(std::max(incub_mean, 0.25)) + 0.05 * rng_.normal(0.0, 1.0);
        }
    }

    case_scales_.assign(n_, AdaptiveScale(0.4, cfg_.target_acceptance));
    incub_scales_.assign(onset_ ? n_ : 0, AdaptiveScale(0.4, cfg_.target_acceptance));
    for (const char* name : {"mu_p", "sigma_p", "alpha_i2p", "beta_i2p", "alpha_p2c",
                             "beta_p2c", "sigma_obs"}) {
        hyper_scales_.emplace(name, AdaptiveScale(0.25, cfg_.target_acceptance));
    }

    refresh_caches();
    check_initial_state();
}

void ChainRunner::refresh_caches()
{
    const PopulationHyperparams hyper = current_hyper();
    obs_ll_.resize(n_);
    pop_p_.resize(n_);
    pop_i2p_.resize(n_);
    pop_p2c_.resize(n_);
    incub_ll_.assign(n_, 0.0);
    scratch_.resize(n_);
    for (std::size_t c = 0; c < n_; ++c) {
        case_params_[c] = TrajectoryParams{std::exp(case_logs_[c][0]), std::exp(case_logs_[c][1]),
                                           std::exp(case_logs_[c][2])};
        if (onset_) incub_[c] = std::exp(log_incub_[c]);
        obs_ll_[c] = obs_loglik_case(ds_, c, case_params_[c], onset_ ? incub_[c] : 0.0,
                                     hyper.sigma_obs);
        population_loglik(case_params_[c], hyper, pop_p_[c], pop_i2p_[c], pop_p2c_[c]);
        if (onset_) incub_ll_[c] = log_pdf(*ds_.incubation_prior, incub_[c]);
    }
}

void ChainRunner::check_initial_state()
{
    const PopulationHyperparams hyper = current_hyper();
    const double hp = hyperprior_loglik(hyper, priors_);
    if (!std::isfinite(hp)) {
        throw std::runtime_error("fit initialization: non-finite hyperprior density");
    }
    for (std::size_t c = 0; c < n_; ++c) {
        if (!std::isfinite(obs_ll_[c])) {
            throw std::runtime_error("fit initialization: non-finite observation likelihood "
                                     "for case '" + ds_.case_ids[c] + "'");
        }
        if (!std::isfinite(pop_p_[c] + pop_i2p_[c] + pop_p2c_[c])) {
            throw std::runtime_error("fit initialization: non-finite population density "
                                     "for case '" + ds_.case_ids[c] + "'");
        }
        if (onset_ && !std::isfinite(incub_ll_[c])) {
            throw std::runtime_error("fit initialization: non-finite incubation density "
                                     "for case '" + ds_.case_ids[c] + "'");
        }
    }
}

void ChainRunner::update_cases()
{
    const PopulationHyperparams hyper = current_hyper();
    for (std::size_t c = 0; c < n_; ++c) {
        AdaptiveScale& scale = case_scales_[c];
        const double s = scale.step();
        std::array<double, 3> prop_logs;
        double jacobian_delta = 0.0;
        for (int k = 0; k < 3; ++k) {
            prop_logs[k] = case_logs_[c][k] + s * rng_.normal(0.0, 1.0);
            jacobian_delta += prop_logs[k] - case_logs_[c][k];
        }
        const TrajectoryParams prop{std::exp(prop_logs[0]), std::exp(prop_logs[1]),
                                    std::exp(prop_logs[2])};
        const double prop_obs =
            obs_loglik_case(ds_, c, prop, onset_ ? incub_[c] : 0.0, hyper.sigma_obs);
        double pp, pi, pc;
        const double prop_pop = population_loglik(prop, hyper, pp, pi, pc);
        const double cur = obs_ll_[c] + pop_p_[c] + pop_i2p_[c] + pop_p2c_[c];
        const double log_ratio = prop_obs + prop_pop - cur + jacobian_delta;
        const double accept_prob = log_ratio >= 0.0 ? 1.0 : std::exp(log_ratio);
        const bool accepted = rng_.uniform() < accept_prob;
        if (accepted) {
            case_logs_[c] = prop_logs;
            case_params_[c] = prop;
            obs_ll_[c] = prop_obs;
            pop_p_[c] = pp;
            pop_i2p_[c] = pi;
            pop_p2c_[c] = pc;
        }
        scale.adapt(accept_prob);
        scale.record(accepted);
    }
}

void ChainRunner::update_incubations()
{
    if (!onset_) return;
    const double sigma_obs = std::exp(log_sigma_obs_);
    for (std::size_t c = 0; c < n_; ++c) {
        AdaptiveScale& scale = incub_scales_[c];
        const double prop_log = log_incub_[c] + scale.step() * rng_.normal(0.0, 1.0);
        const double prop = std::exp(prop_log);
        const double prop_obs = obs_loglik_case(ds_, c, case_params_[c], prop, sigma_obs);
        const double prop_inc = log_pdf(*ds_.incubation_prior, prop);
        const double log_ratio = (prop_obs + prop_inc + prop_log) -
                                 (obs_ll_[c] + incub_ll_[c] + log_incub_[c]);
        const double accept_prob = log_ratio >= 0.0 ? 1.0 : std::exp(log_ratio);
        const bool accepted = rng_.uniform() < accept_prob;
        if (accepted) {
            log_incub_[c] = prop_log;
            incub_[c] = prop;
            obs_ll_[c] = prop_obs;
            incub_ll_[c] = prop_inc;
        }
        scale.adapt(accept_prob);
        scale.record(accepted);
    }
}

void ChainRunner::update_hyperparams()
{
    auto sum_of = [](const std::vector<double>& xs) {
        return std::accumulate(xs.begin(), xs.end(), 0.0);
    };

    // mu_p: natural-scale walk over the lognormal peak terms
    {
        AdaptiveScale& scale = hyper_scales_.at("mu_p");
        const double sigma_p = std::exp(log_sigma_p_);
        double cached = sum_of(pop_p_) + normal_log_pdf(mu_p_, priors_.mu_p.mean, priors_.mu_p.sd);
        auto dens = [&](double m) {
            for (std::size_t c = 0; c < n_; ++c) {
                scratch_[c] = lognormal_log_pdf(case_params_[c].peak, m, sigma_p);
            }
            return sum_of(scratch_) + normal_log_pdf(m, priors_.mu_p.mean, priors_.mu_p.sd);
        };
        if (mcmc::rw_step(mu_p_, cached, scale, dens, rng_)) std::swap(pop_p_, scratch_);
    }

    // sigma_p, log-scale
    {
        AdaptiveScale& scale = hyper_scales_.at("sigma_p");
        double cached = sum_of(pop_p_) +
                        positive_normal_prior(std::exp(log_sigma_p_), priors_.sigma_p) +
                        log_sigma_p_;
        auto dens = [&](double ls) {
            const double s = std::exp(ls);
            for (std::size_t c = 0; c < n_; ++c) {
                scratch_[c] = lognormal_log_pdf(case_params_[c].peak, mu_p_, s);
            }
            return sum_of(scratch_) + positive_normal_prior(s, priors_.sigma_p) + ls;
        };
        if (mcmc::rw_step(log_sigma_p_, cached, scale, dens, rng_)) std::swap(pop_p_, scratch_);
    }

    // gamma shape/rate pairs for both delay distributions, log-scale
    struct GammaCoord {
        const char* name;
        double* coord;
        bool is_shape;
        double* other;
        std::vector<double>* cache;
        const NormalPrior* prior;
        int field; // 1 = days_to_peak, 2 = days_to_clear
    };
    const GammaCoord coords[] = {
        {"alpha_i2p", &log_alpha_i2p_, true, &log_beta_i2p_, &pop_i2p_, &priors_.alpha_i2p, 1},
        {"beta_i2p", &log_beta_i2p_, false, &log_alpha_i2p_, &pop_i2p_, &priors_.beta_i2p, 1},
        {"alpha_p2c", &log_alpha_p2c_, true, &log_beta_p2c_, &pop_p2c_, &priors_.alpha_p2c, 2},
        {"beta_p2c", &log_beta_p2c_, false, &log_alpha_p2c_, &pop_p2c_, &priors_.beta_p2c, 2},
    };
    for (const auto& gc : coords) {
        AdaptiveScale& scale = hyper_scales_.at(gc.name);
        double cached = sum_of(*gc.cache) +
                        positive_normal_prior(std::exp(*gc.coord), *gc.prior) + *gc.coord;
        auto dens = [&](double lx) {
            const double x = std::exp(lx);
            const double other = std::exp(*gc.other);
            const double shape = gc.is_shape ? x : other;
            const double rate = gc.is_shape ? other : x;
            for (std::size_t c = 0; c < n_; ++c) {
                const double d = gc.field == 1 ? case_params_[c].days_to_peak
                                               : case_params_[c].days_to_clear;
                scratch_[c] = gamma_log_pdf(d, shape, rate);
            }
            return sum_of(scratch_) + positive_normal_prior(x, *gc.prior) + lx;
        };
        if (mcmc::rw_step(*gc.coord, cached, scale, dens, rng_)) std::swap(*gc.cache, scratch_);
    }

    // sigma_obs, log-scale; touches every observation term
    {
        AdaptiveScale& scale = hyper_scales_.at("sigma_obs");
        double cached = sum_of(obs_ll_) +
                        half_normal_log_pdf(std::exp(log_sigma_obs_), priors_.sigma_obs_scale) +
                        log_sigma_obs_;
        auto dens = [&](double ls) {
            const double s = std::exp(ls);
            for (std::size_t c = 0; c < n_; ++c) {
                scratch_[c] =
                    obs_loglik_case(ds_, c, case_params_[c], onset_ ? incub_[c] : 0.0, s);
            }
            return sum_of(scratch_) + half_normal_log_pdf(s, priors_.sigma_obs_scale) + ls;
        };
        if (mcmc::rw_step(log_sigma_obs_, cached, scale, dens, rng_)) std::swap(obs_ll_, scratch_);
    }
}

ChainResult ChainRunner::run(int quota)
{
    initialize();

    const long burn = static_cast<long>(cfg_.n_iterations * cfg_.burn_in_fraction);
    const long post = cfg_.n_iterations - burn;
    const long thin = std::max<long>(1, post / std::max(quota, 1));

    std::vector<PopulationHyperparams> candidates;
    bool counters_reset = false;

    for (long iter = 0; iter < cfg_.n_iterations; ++iter) {
        update_cases();
        update_incubations();
        update_hyperparams();

        if (iter == burn - 1 || (burn == 0 && iter == 0 && !counters_reset)) {
            // acceptance diagnostics cover the post burn-in phase only
            for (auto& s : case_scales_) s.reset_counters();
            for (auto& s : incub_scales_) s.reset_counters();
            for (auto& [name, s] : hyper_scales_) s.reset_counters();
            counters_reset = true;
        }
        if (iter >= burn && (iter - burn) % thin == thin - 1) {
            candidates.push_back(current_hyper());
        }
    }

    ChainResult result;
    // keep the latest `quota` thinned states
    const std::size_t take = std::min<std::size_t>(quota, candidates.size());
    result.retained.assign(candidates.end() - take, candidates.end());

    long case_acc = 0, case_prop = 0;
    for (const auto& s : case_scales_) {
        case_acc += s.n_accepted;
        case_prop += s.n_proposed;
    }
    result.acceptance["case_params"] = {case_acc, case_prop};
    if (onset_) {
        long inc_acc = 0, inc_prop = 0;
        for (const auto& s : incub_scales_) {
            inc_acc += s.n_accepted;
            inc_prop += s.n_proposed;
        }
        result.acceptance["incubation"] = {inc_acc, inc_prop};
    }
    for (const auto& [name, s] : hyper_scales_) {
        result.acceptance[name] = {s.n_accepted, s.n_proposed};
    }

    const std::size_t m = result.retained.size();
    std::vector<double> series(m);
    const std::pair<const char*, double PopulationHyperparams::*> fields[] = {
        {"mu_p", &PopulationHyperparams::mu_p},
        {"sigma_p", &PopulationHyperparams::sigma_p},
        {"alpha_i2p", &PopulationHyperparams::alpha_i2p},
        {"beta_i2p", &PopulationHyperparams::beta_i2p},
        {"alpha_p2c", &PopulationHyperparams::alpha_p2c},
        {"beta_p2c", &PopulationHyperparams::beta_p2c},
        {"sigma_obs", &PopulationHyperparams::sigma_obs},
    };
    for (const auto& [name, member] : fields) {
        for (std::size_t i = 0; i < m; ++i) series[i] = result.retained[i].*member;
        result.ess[name] = mcmc::effective_sample_size(series.data(), m);
    }
    return result;
}

} // namespace

PosteriorDraws fit(const Dataset& dataset, const PriorSet& priors, const FitConfig& config,
                   std::uint64_t seed)
{
    if (dataset.n_cases() == 0) throw std::invalid_argument("fit: empty dataset");
    if (!priors.valid()) throw std::invalid_argument("fit: invalid priors");
    config.validate();

    // per-chain retention quotas pool to exactly n_retained
    std::vector<int> quotas(config.n_chains, config.n_retained / config.n_chains);
    for (int i = 0; i < config.n_retained % config.n_chains; ++i) ++quotas[i];

    std::vector<ChainResult> results(config.n_chains);
    int workers = config.workers > 0 ? config.workers
                                     : static_cast<int>(std::thread::hardware_concurrency());
    workers = std::clamp(workers, 1, config.n_chains);

    std::exception_ptr failure;
    std::mutex failure_mutex;
    std::vector<std::thread> threads;
    for (int w = 0; w < workers; ++w) {
        threads.emplace_back([&, w]() {
            try {
                for (int chain = w; chain < config.n_chains; chain += workers) {
                    ChainRunner runner(dataset, priors, config, seed, chain);
                    results[chain] = runner.run(quotas[chain]);
                }
            } catch (...) {
                std::lock_guard<std::mutex> lock(failure_mutex);
                if (!failure) failure = std::current_exception();
            }
        });
    }
    for (auto& t : threads) t.join();
    if (failure) std::rethrow_exception(failure);

    PosteriorDraws out;
    std::map<std::string, std::pair<long, long>> pooled_acc;
    for (const auto& res : results) {
        out.draws.insert(out.draws.end(), res.retained.begin(), res.retained.end());
        for (const auto& [name, counts] : res.acceptance) {
            pooled_acc[name].first += counts.first;
            pooled_acc[name].second += counts.second;
        }
        for (const auto& [name, ess] : res.ess) out.diagnostics.ess[name] += ess;
    }
    for (const auto& [name, counts] : pooled_acc) {
        out.diagnostics.acceptance[name] =
            counts.second > 0 ? static_cast<double>(counts.first) / counts.second : 0.0;
    }

    for (const auto& [name, rate] : out.diagnostics.acceptance) {
        if (rate < config.accept_band_low || rate > config.accept_band_high) {
            char buf[160];
            std::snprintf(buf, sizeof(buf),
                          "acceptance rate for block '%s' is %.3f, outside [%.2f, %.2f]",
                          name.c_str(), rate, config.accept_band_low, config.accept_band_high);
            out.diagnostics.warnings.emplace_back(buf);
        }
    }
    for (const auto& [name, ess] : out.diagnostics.ess) {
        if (ess < config.ess_floor) {
            char buf[160];
            std::snprintf(buf, sizeof(buf), "effective sample size for '%s' is %.1f (< %.1f)",
                          name.c_str(), ess, config.ess_floor);
            out.diagnostics.warnings.emplace_back(buf);
        }
    }
    return out;
}

void save_posterior(const PosteriorDraws& draws, const std::string& path)
{
    std::ofstream out(path);
    if (!out) throw std::runtime_error("cannot write posterior file: " + path);
    out << "mu_p,sigma_p,alpha_i2p,beta_i2p,alpha_p2c,beta_p2c,sigma_obs\n";
    char buf[512];
    for (const auto& d : draws.draws) {
        std::snprintf(buf, sizeof(buf), "%.17g,%.17g,%.17g,%.17g,%.17g,%.17g,%.17g\n", d.mu_p,
                      d.sigma_p, d.alpha_i2p, d.beta_i2p, d.alpha_p2c, d.beta_p2c, d.sigma_obs);
        out << buf;
    }
}

PosteriorDraws load_posterior(const std::string& path)
{
    std::ifstream in(path);
    if (!in) throw std::runtime_error("cannot open posterior file: " + path);
    std::string line;
    if (!std::getline(in, line) ||
        line != "mu_p,sigma_p,alpha_i2p,beta_i2p,alpha_p2c,beta_p2c,sigma_obs") {
        throw std::runtime_error(path + ": unrecognized posterior header");
    }
    PosteriorDraws out;
    std::size_t row = 1;
    while (std::getline(in, line)) {
        ++row;
        if (line.empty()) continue;
        PopulationHyperparams d;
        std::stringstream ss(line);
        char comma;
        if (!(ss >> d.mu_p >> comma >> d.sigma_p >> comma >> d.alpha_i2p >> comma >>
              d.beta_i2p >> comma >> d.alpha_p2c >> comma >> d.beta_p2c >> comma >>
              d.sigma_obs)) {
            throw std::runtime_error(path + ": row " + std::to_string(row) + ": malformed draw");
        }
        if (!d.valid()) {
            throw std::runtime_error(path + ": row " + std::to_string(row) +
                                     ": draw violates positivity constraints");
        }
        out.draws.push_back(d);
    }
    if (out.draws.empty()) throw std::runtime_error(path + ": no draws");
    return out;
}

} // namespace plexsim
