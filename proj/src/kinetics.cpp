#include "plexsim/kinetics.hpp"

#include <cmath>
#include <stdexcept>

namespace plexsim {

bool TrajectoryParams::valid() const
{
    return std::isfinite(peak) && peak > 0.0 && std::isfinite(days_to_peak) &&
           days_to_peak > 0.0 && std::isfinite(days_to_clear) && days_to_clear > 0.0;
}

bool PopulationHyperparams::valid() const
{
    return std::isfinite(mu_p) && std::isfinite(sigma_p) && sigma_p > 0.0 &&
           alpha_i2p > 0.0 && beta_i2p > 0.0 && alpha_p2c > 0.0 && beta_p2c > 0.0 &&
           sigma_obs > 0.0 && std::isfinite(alpha_i2p) && std::isfinite(beta_i2p) &&
           std::isfinite(alpha_p2c) && std::isfinite(beta_p2c) && std::isfinite(sigma_obs);
}

double viral_concentration(double tau, const TrajectoryParams& params)
{
    if (!params.valid()) {
        throw std::invalid_argument("viral_concentration: trajectory parameters must be "
                                    "strictly positive and finite");
    }
    if (tau <= params.days_to_peak) {
        // tau/days_to_peak is exactly 1 at the peak, so f(d_i2p) == peak
        return params.peak * (tau / params.days_to_peak);
    }
    return params.peak - (tau - params.days_to_peak) * (params.peak / params.days_to_clear);
}

TrajectoryParams sample_trajectory(const PopulationHyperparams& hyper, RngStream& rng)
{
    if (!hyper.valid()) {
        throw std::invalid_argument("sample_trajectory: invalid population hyperparameters");
    }
    TrajectoryParams params;
    params.peak = rng.lognormal(hyper.mu_p, hyper.sigma_p);
    params.days_to_peak = rng.gamma(hyper.alpha_i2p, hyper.beta_i2p);
    params.days_to_clear = rng.gamma(hyper.alpha_p2c, hyper.beta_p2c);
    return params;
}

} // namespace plexsim
