#include "plexsim/dist.hpp"

#include <cmath>
#include <limits>
#include <stdexcept>

namespace plexsim {

namespace {
constexpr double kLogSqrt2Pi = 0.91893853320467274178; // log(sqrt(2*pi))
constexpr double kNegInf = -std::numeric_limits<double>::infinity();
} // namespace

bool DistSpec::valid() const
{
    if (!std::isfinite(a) || !std::isfinite(b)) return false;
    if (family == Family::Gamma) return a > 0.0 && b > 0.0;
    return b > 0.0; // lognormal logmean may be any real
}

double sample(const DistSpec& spec, RngStream& rng)
{
    if (spec.family == DistSpec::Family::Gamma) return rng.gamma(spec.a, spec.b);
    return rng.lognormal(spec.a, spec.b);
}

double log_pdf(const DistSpec& spec, double x)
{
    if (spec.family == DistSpec::Family::Gamma) return gamma_log_pdf(x, spec.a, spec.b);
    return lognormal_log_pdf(x, spec.a, spec.b);
}

double dist_mean(const DistSpec& spec)
{
    if (spec.family == DistSpec::Family::Gamma) return spec.a / spec.b;
    return std::exp(spec.a + 0.5 * spec.b * spec.b);
}

DistSpec parse_dist_spec(const std::string& family, double a, double b)
{
    DistSpec spec;
    if (family == "gamma") {
        spec.family = DistSpec::Family::Gamma;
    } else if (family == "lognormal") {
        spec.family = DistSpec::Family::Lognormal;
    } else {
        throw std::invalid_argument("unknown distribution family '" + family +
                                    "' (expected gamma or lognormal)");
    }
    spec.a = a;
    spec.b = b;
    if (!spec.valid()) {
        throw std::invalid_argument("invalid " + family + " parameters (" +
                                    std::to_string(a) + ", " + std::to_string(b) + ")");
    }
    return spec;
}

double logistic(double x)
{
    // evaluate from the side that cannot overflow
    if (x >= 0.0) return 1.0 / (1.0 + std::exp(-x));
    const double e = std::exp(x);
    return e / (1.0 + e);
}

double normal_log_pdf(double x, double mean, double sd)
{
    const double z = (x - mean) / sd;
    return -0.5 * z * z - std::log(sd) - kLogSqrt2Pi;
}

double normal_cdf(double z)
{
    return 0.5 * std::erfc(-z / std::sqrt(2.0));
}

double normal_log_cdf(double z)
{
    // erfc underflows near z = -38; switch to the asymptotic expansion of
    // the Mills ratio well before that.
    if (z > -10.0) return std::log(normal_cdf(z));
    const double z2 = z * z;
    // log phi(z) - log(-z) + log(1 - 1/z^2 + 3/z^4 - 15/z^6)
    const double series = 1.0 - 1.0 / z2 + 3.0 / (z2 * z2) - 15.0 / (z2 * z2 * z2);
    return -0.5 * z2 - kLogSqrt2Pi - std::log(-z) + std::log(series);
}

double gamma_log_pdf(double x, double shape, double rate)
{
    if (x <= 0.0) return kNegInf;
    return shape * std::log(rate) - std::lgamma(shape) + (shape - 1.0) * std::log(x) - rate * x;
}

double lognormal_log_pdf(double x, double logmean, double logsd)
{
    if (x <= 0.0) return kNegInf;
    const double lx = std::log(x);
    return normal_log_pdf(lx, logmean, logsd) - lx;
}

} // namespace plexsim
