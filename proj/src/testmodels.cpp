#include "plexsim/testmodels.hpp"

#include <stdexcept>

#include "plexsim/dist.hpp"

namespace plexsim {

double lfd_sensitivity(double v, const LfdModel& model)
{
    if (!model.valid()) {
        throw std::invalid_argument("lfd_sensitivity: beta1 must be positive");
    }
    if (v <= 0.0) return 0.0;
    return logistic(model.beta0 + model.beta1 * (v + model.shift));
}

double pcr_positive_prob(double v, const PcrModel& model)
{
    if (!model.valid()) {
        throw std::invalid_argument("pcr_positive_prob: invalid PCR model");
    }
    return v < model.lod ? 0.0 : model.sens_above_lod;
}

bool sample_result(double prob, RngStream& rng)
{
    if (!(prob >= 0.0 && prob <= 1.0)) {
        throw std::invalid_argument("sample_result: probability outside [0,1]");
    }
    return rng.bernoulli(prob);
}

} // namespace plexsim
