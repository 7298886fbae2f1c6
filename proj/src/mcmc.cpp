#include "plexsim/mcmc.hpp"

#include <vector>

namespace plexsim::mcmc {

double effective_sample_size(const double* draws, std::size_t n)
{
    if (n < 4) return static_cast<double>(n);

    double mean = 0.0;
    for (std::size_t i = 0; i < n; ++i) mean += draws[i];
    mean /= static_cast<double>(n);

    std::vector<double> centered(n);
    for (std::size_t i = 0; i < n; ++i) centered[i] = draws[i] - mean;

    auto autocov = [&](std::size_t lag) {
        double s = 0.0;
        for (std::size_t i = 0; i + lag < n; ++i) s += centered[i] * centered[i + lag];
        return s / static_cast<double>(n);
    };

    const double c0 = autocov(0);
    if (c0 <= 0.0) return static_cast<double>(n); // constant series

    // sum consecutive pairs of autocorrelations while the pair sums stay
    // positive (initial positive sequence)
    double tau = 1.0;
    const std::size_t max_lag = n / 2;
    for (std::size_t lag = 1; lag + 1 <= max_lag; lag += 2) {
        const double pair = (autocov(lag) + autocov(lag + 1)) / c0;
        if (pair <= 0.0) break;
        tau += 2.0 * pair;
    }
    return static_cast<double>(n) / tau;
}

} // namespace plexsim::mcmc
