#ifndef PLEXSIM_DATASET_HPP
#define PLEXSIM_DATASET_HPP

#include <optional>
#include <string>
#include <vector>

#include "plexsim/dist.hpp"

namespace plexsim {

// Whether observation times are measured from a known infection time
// (challenge-style data) or from symptom onset (household-style data, where
// the infection time must be inferred via a latent incubation period).
enum class AnchorMode { InfectionAnchored, OnsetAnchored };

// One swab observation. A negative test carries no value and is treated as
// a censored observation of the trajectory (concentration below the
// dataset's censoring threshold).
struct ObservationRecord {
    std::string case_id;
    double t_anchor = 0.0; // days relative to the dataset anchor
    std::optional<double> value; // log10 gene copies/ml, present iff detected
    bool censored = false;

    bool valid() const { return value.has_value() != censored; }
};

struct Dataset {
    AnchorMode anchor_mode = AnchorMode::InfectionAnchored;
    std::vector<ObservationRecord> records;
    double censor_threshold = 0.0; // log10 gene copies/ml
    std::optional<DistSpec> incubation_prior; // required iff onset-anchored

    // case bookkeeping, in order of first appearance
    std::vector<std::string> case_ids;
    std::vector<std::vector<std::size_t>> obs_by_case;

    std::size_t n_cases() const { return case_ids.size(); }

    static Dataset from_records(AnchorMode mode, std::vector<ObservationRecord> records,
                                double censor_threshold,
                                std::optional<DistSpec> incubation_prior = {});
};

// Reads the documented CSV schema (header `case_id,t_anchor,value,censored`,
// schema v1). Censored rows must leave `value` empty; detected rows must
// fill it. Errors name the offending row.
Dataset load_dataset(const std::string& path, AnchorMode mode, double censor_threshold,
                     std::optional<DistSpec> incubation_prior = {});

// Writes a dataset back out in the same schema (used by the synthetic-data
// tooling and tests).
void save_dataset(const Dataset& dataset, const std::string& path);

} // namespace plexsim

#endif
