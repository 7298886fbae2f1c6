#include "plexsim/strategies.hpp"

#include <algorithm>
#include <limits>
#include <queue>
#include <stdexcept>

namespace plexsim {

namespace {
constexpr double kInf = std::numeric_limits<double>::infinity();
constexpr int kMaxTested = 5; // first five symptomatic cases, hard cap
} // namespace

const char* to_string(StrategyKind kind)
{
    switch (kind) {
    case StrategyKind::AllLfd: return "AllLfd";
    case StrategyKind::AllPcr: return "AllPcr";
    case StrategyKind::Concurrent: return "Concurrent";
    case StrategyKind::LfdConfirmPcr: return "LfdConfirmPcr";
    case StrategyKind::LfdRetestPcrIfAllNeg: return "LfdRetestPcrIfAllNeg";
    }
    return "?";
}

std::optional<StrategyKind> strategy_from_string(const std::string& name)
{
    for (const StrategyKind kind : all_strategies()) {
        if (name == to_string(kind)) return kind;
    }
    return std::nullopt;
}

const std::vector<StrategyKind>& all_strategies()
{
    static const std::vector<StrategyKind> kinds = {
        StrategyKind::AllLfd, StrategyKind::AllPcr, StrategyKind::Concurrent,
        StrategyKind::LfdConfirmPcr, StrategyKind::LfdRetestPcrIfAllNeg};
    return kinds;
}

SharedOutbreak::SharedOutbreak(InfectionStream stream) : stream_(std::move(stream)) {}

SharedOutbreak SharedOutbreak::from_records(std::vector<InfectionRecord> records, bool truncated)
{
    for (std::size_t i = 1; i < records.size(); ++i) {
        if (records[i].t_infect < records[i - 1].t_infect) {
            throw std::invalid_argument("SharedOutbreak: records must be ordered by t_infect");
        }
    }
    SharedOutbreak ob;
    ob.records_ = std::move(records);
    ob.done_ = true;
    ob.truncated_ = truncated;
    for (const auto& rec : ob.records_) {
        if (rec.symptomatic) ++ob.n_symptomatic_;
    }
    return ob;
}

bool SharedOutbreak::pull()
{
    if (done_ || !stream_) {
        done_ = true;
        return false;
    }
    auto rec = stream_->next();
    if (!rec) {
        done_ = true;
        truncated_ = stream_->truncated();
        return false;
    }
    if (rec->symptomatic) ++n_symptomatic_;
    records_.push_back(std::move(*rec));
    return true;
}

const InfectionRecord* SharedOutbreak::record(std::size_t i)
{
    while (records_.size() <= i && pull()) {
    }
    return i < records_.size() ? &records_[i] : nullptr;
}

std::size_t SharedOutbreak::infections_at(double t)
{
    while (!done_ && (records_.empty() || records_.back().t_infect <= t)) pull();
    const auto it = std::upper_bound(records_.begin(), records_.end(), t,
                                     [](double value, const InfectionRecord& rec) {
                                         return value < rec.t_infect;
                                     });
    return static_cast<std::size_t>(it - records_.begin());
}

bool SharedOutbreak::has_k_symptomatic(std::size_t k)
{
    while (!done_ && n_symptomatic_ < k) pull();
    return n_symptomatic_ >= k;
}

namespace {

struct Arrival {
    double t;
    std::size_t seq; // deterministic tie order by dispatch sequence
    std::size_t case_idx;
    bool positive;
    bool operator>(const Arrival& other) const
    {
        return t != other.t ? t > other.t : seq > other.seq;
    }
};

} // namespace

StrategyOutcome run_strategy(SharedOutbreak& ob, StrategyKind kind, const LfdModel& lfd,
                             const PcrModel& pcr, const TestDraws& draws)
{
    if (!lfd.valid()) throw std::invalid_argument("run_strategy: invalid LFD model");
    if (!pcr.valid()) throw std::invalid_argument("run_strategy: invalid PCR model");

    StrategyOutcome out;

    // onset events discovered as the stream is pulled: (t_onset, record idx)
    using OnsetEvent = std::pair<double, std::size_t>;
    std::priority_queue<OnsetEvent, std::vector<OnsetEvent>, std::greater<OnsetEvent>> onsets;
    std::priority_queue<Arrival, std::vector<Arrival>, std::greater<Arrival>> arrivals;

    std::size_t cursor = 0;
    auto pull_one = [&]() -> bool {
        const InfectionRecord* rec = ob.record(cursor);
        if (!rec) return false;
        if (rec->symptomatic) onsets.emplace(*rec->t_onset, cursor);
        ++cursor;
        return true;
    };

    int tested = 0;
    int lfd_negatives = 0;
    std::size_t dispatch_seq = 0;
    std::vector<std::size_t> tested_cases;
    std::vector<double> lfd_dispatch;
    std::vector<double> pcr_dispatch;
    std::optional<double> t_first;
    std::optional<double> t_confirm;

    auto concentration_at = [&](std::size_t idx, double t) {
        const InfectionRecord& rec = *ob.record(idx);
        return viral_concentration(t - rec.t_infect, rec.trajectory);
    };
    // sample is taken at dispatch time; the result arrives after turnaround
    auto dispatch_pcr = [&](std::size_t idx, double t) {
        const double prob = pcr_positive_prob(concentration_at(idx, t), pcr);
        const bool positive = draws.pcr_uniform(idx) < prob;
        arrivals.push(Arrival{t + pcr.turnaround, dispatch_seq++, idx, positive});
        pcr_dispatch.push_back(t);
    };

    while (true) {
        const bool more_tests_possible = tested < kMaxTested &&
                                         !(ob.stream_done() && onsets.empty());
        if (t_first) {
            if (kind != StrategyKind::LfdConfirmPcr) break;
            if (t_confirm) break;
            if (arrivals.empty() && !more_tests_possible) {
                out.confirmation_failed = true;
                break;
            }
        } else if (arrivals.empty() && !more_tests_possible) {
            break; // nothing pending can produce a positive: undetected
        }

        const double t_arrival = arrivals.empty() ? kInf : arrivals.top().t;
        const double t_onset = onsets.empty() ? kInf : onsets.top().first;
        const double t_next = std::min(t_arrival, t_onset);
        if (t_next == kInf) {
            pull_one(); // discover more onsets (or learn the stream ended)
            continue;
        }
        // an event at t_next is safe to process only once every infection up
        // to t_next is known, so no earlier onset can still be discovered
        if (!ob.stream_done()) {
            const InfectionRecord* peek = ob.record(cursor);
            if (peek && peek->t_infect <= t_next) {
                pull_one();
                continue;
            }
        }

        if (t_arrival <= t_onset) {
            const Arrival arrival = arrivals.top();
            arrivals.pop();
            if (arrival.positive) {
                if (kind == StrategyKind::LfdConfirmPcr) {
                    if (!t_confirm) t_confirm = arrival.t;
                } else if (!t_first) {
                    t_first = arrival.t;
                }
            }
            continue;
        }

        const auto [t_on, idx] = onsets.top();
        onsets.pop();
        if (tested >= kMaxTested) continue; // beyond the first five: never tested
        ++tested;
        tested_cases.push_back(idx);

        if (kind == StrategyKind::AllPcr) {
            dispatch_pcr(idx, t_on);
            continue;
        }

        lfd_dispatch.push_back(t_on);
        const double sens = lfd_sensitivity(concentration_at(idx, t_on), lfd);
        const bool positive = draws.lfd_uniform(idx) < sens;
        if (positive) {
            if (!t_first) t_first = t_on; // LFD results are instantaneous
            if (kind == StrategyKind::LfdConfirmPcr) dispatch_pcr(idx, t_on);
        } else {
            ++lfd_negatives;
            if (kind == StrategyKind::Concurrent) dispatch_pcr(idx, t_on);
            if (kind == StrategyKind::LfdRetestPcrIfAllNeg && lfd_negatives == kMaxTested) {
                // all five negative: retest everyone at this instant, against
                // their concentration now (some may already have cleared)
                for (const std::size_t tested_idx : tested_cases) {
                    dispatch_pcr(tested_idx, t_on);
                }
            }
        }
    }

    out.detected = t_first.has_value();
    out.t_first_positive = t_first;

    auto count_up_to = [](const std::vector<double>& times, double t) {
        return static_cast<int>(std::count_if(times.begin(), times.end(),
                                              [t](double x) { return x <= t; }));
    };
    if (out.detected) {
        out.n_lfd_used = count_up_to(lfd_dispatch, *t_first);
        out.n_pcr_used = count_up_to(pcr_dispatch, *t_first);
        out.infections_at_first_positive = ob.infections_at(*t_first);
    } else {
        out.n_lfd_used = static_cast<int>(lfd_dispatch.size());
        out.n_pcr_used = static_cast<int>(pcr_dispatch.size());
    }
    if (kind == StrategyKind::LfdConfirmPcr && t_confirm) {
        out.t_confirmation = t_confirm;
        out.infections_at_confirmation = ob.infections_at(*t_confirm);
        out.n_pcr_awaiting_confirmation =
            static_cast<int>(std::count_if(pcr_dispatch.begin(), pcr_dispatch.end(),
                                           [&](double t) { return t > *t_first && t <= *t_confirm; }));
    }

    out.had_five_symptomatic = ob.has_k_symptomatic(kMaxTested);
    out.all_asymptomatic =
        ob.stream_done() && !ob.truncated() && ob.symptomatic_seen() == 0;
    out.truncated = ob.truncated();
    return out;
}

StrategyOutcome run_strategy(InfectionStream stream, StrategyKind kind, const LfdModel& lfd,
                             const PcrModel& pcr, std::uint64_t test_seed)
{
    SharedOutbreak ob(std::move(stream));
    return run_strategy(ob, kind, lfd, pcr, TestDraws{test_seed});
}

} // namespace plexsim
