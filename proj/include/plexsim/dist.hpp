#ifndef PLEXSIM_DIST_HPP
#define PLEXSIM_DIST_HPP

#include <string>

#include "plexsim/random.hpp"

namespace plexsim {

// Descriptor for the delay distributions used in outbreak simulation and as
// incubation priors in inference. Gamma uses shape/rate; lognormal uses the
// mean/sd of log(x).
struct DistSpec {
    enum class Family { Gamma, Lognormal };

    Family family = Family::Gamma;
    double a = 1.0; // gamma shape / lognormal logmean
    double b = 1.0; // gamma rate  / lognormal logsd

    bool valid() const;
};

double sample(const DistSpec& spec, RngStream& rng);
double log_pdf(const DistSpec& spec, double x);
double dist_mean(const DistSpec& spec);

DistSpec parse_dist_spec(const std::string& family, double a, double b);

// density/cdf helpers (all log versions safe in the far tails)
double logistic(double x);
double normal_log_pdf(double x, double mean, double sd);
double normal_cdf(double z);
double normal_log_cdf(double z);
double gamma_log_pdf(double x, double shape, double rate);
double lognormal_log_pdf(double x, double logmean, double logsd);

} // namespace plexsim

#endif
