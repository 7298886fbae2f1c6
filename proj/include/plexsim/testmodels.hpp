#ifndef PLEXSIM_TESTMODELS_HPP
#define PLEXSIM_TESTMODELS_HPP

#include "plexsim/random.hpp"

namespace plexsim {

// Logistic LFD sensitivity curve on the log10 gene copies/ml scale. The
// coefficients are deliberately not defaulted: they must come from a fitted
// published estimate supplied in configuration (see README). `shift` moves
// the curve along the concentration axis; shift = +1 behaves like a device
// seeing 10x more virus in the same sample.
struct LfdModel {
    double beta0 = 0.0;
    double beta1 = 0.0; // per log10 gene copies/ml; must be > 0
    double shift = 0.0;

    bool valid() const { return beta1 > 0.0; }
};

// PCR as a step function: samples at or above the limit of detection are
// detected with probability `sens_above_lod`, below it never. Results
// arrive `turnaround` days after the swab is taken.
struct PcrModel {
    double lod = 2.6989700043360187;  // log10(500) gene copies/ml
    double sens_above_lod = 0.95;
    double turnaround = 2.0;          // days

    bool valid() const
    {
        return sens_above_lod >= 0.0 && sens_above_lod <= 1.0 && turnaround >= 0.0;
    }
};

// Probability an LFD returns positive at concentration v (log10 scale).
// v <= 0 means the case has no detectable virus and always tests negative.
double lfd_sensitivity(double v, const LfdModel& model);

// Probability a PCR returns positive at concentration v. v exactly at the
// LoD counts as detectable.
double pcr_positive_prob(double v, const PcrModel& model);

// Bernoulli draw for a single test result.
bool sample_result(double prob, RngStream& rng);

} // namespace plexsim

#endif
