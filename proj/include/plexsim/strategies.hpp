#ifndef PLEXSIM_STRATEGIES_HPP
#define PLEXSIM_STRATEGIES_HPP

#include <optional>
#include <string>
#include <vector>

#include "plexsim/outbreak.hpp"
#include "plexsim/testmodels.hpp"

namespace plexsim {

// The five testing policies applied to the first five symptomatic cases.
enum class StrategyKind {
    AllLfd,
    AllPcr,
    Concurrent,
    LfdConfirmPcr,
    LfdRetestPcrIfAllNeg,
};

const char* to_string(StrategyKind kind);
std::optional<StrategyKind> strategy_from_string(const std::string& name);
const std::vector<StrategyKind>& all_strategies();

// Detection result, timing, infection counts and test consumption for one
// outbreak under one strategy. Confirmation fields are only populated for
// LfdConfirmPcr.
struct StrategyOutcome {
    bool detected = false;
    std::optional<double> t_first_positive;
    std::size_t infections_at_first_positive = 0;
    int n_lfd_used = 0; // dispatched at or before t_first_positive (all, if undetected)
    int n_pcr_used = 0;
    bool had_five_symptomatic = false;
    bool all_asymptomatic = false; // died out containing only asymptomatic cases
    bool truncated = false;        // a sim limit ended the stream before full resolution

    std::optional<double> t_confirmation;
    std::size_t infections_at_confirmation = 0;
    int n_pcr_awaiting_confirmation = 0; // dispatched in (t_first_positive, t_confirmation]
    bool confirmation_failed = false;    // detected, but every confirmatory PCR came back negative
};

// Materialize-on-demand view of an infection stream so several strategies
// can run against one tree. Records are cached in emission order.
class SharedOutbreak {
public:
    explicit SharedOutbreak(InfectionStream stream);
    static SharedOutbreak from_records(std::vector<InfectionRecord> records,
                                       bool truncated = false);

    // materializes up to index i; nullptr once the stream has ended
    const InfectionRecord* record(std::size_t i);
    bool stream_done() const { return done_; }
    bool truncated() const { return truncated_; }
    std::size_t n_materialized() const { return records_.size(); }
    std::size_t symptomatic_seen() const { return n_symptomatic_; }

    // number of infections with t_infect <= t; pulls the stream as needed
    std::size_t infections_at(double t);
    // pulls until k symptomatic infections are known or the stream ends
    bool has_k_symptomatic(std::size_t k);

private:
    SharedOutbreak() = default;
    bool pull();

    std::optional<InfectionStream> stream_;
    std::vector<InfectionRecord> records_;
    bool done_ = false;
    bool truncated_ = false;
    std::size_t n_symptomatic_ = 0;
};

// Identity-keyed test randomness: the uniform for a given (case, device)
// pair depends only on the seed and the identity, so strategies sharing a
// seed see common random numbers test by test.
struct TestDraws {
    std::uint64_t seed = 0;

    double lfd_uniform(std::size_t case_id) const
    {
        return unit_from_hash(derive_seed(seed, 0x1f0, case_id));
    }
    double pcr_uniform(std::size_t case_id) const
    {
        return unit_from_hash(derive_seed(seed, 0x9c4, case_id));
    }
};

StrategyOutcome run_strategy(SharedOutbreak& outbreak, StrategyKind kind, const LfdModel& lfd,
                             const PcrModel& pcr, const TestDraws& draws);

// Convenience overload owning its stream.
StrategyOutcome run_strategy(InfectionStream stream, StrategyKind kind, const LfdModel& lfd,
                             const PcrModel& pcr, std::uint64_t test_seed);

} // namespace plexsim

#endif
