#include "plexsim/dataset.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <sstream>
#include <stdexcept>
#include <unordered_map>

namespace plexsim {

namespace {

std::vector<std::string> split_csv_line(const std::string& line)
{
    std::vector<std::string> fields;
    std::string field;
    std::stringstream ss(line);
    while (std::getline(ss, field, ',')) fields.push_back(field);
    if (!line.empty() && line.back() == ',') fields.emplace_back();
    return fields;
}

std::string trim(const std::string& s)
{
    const auto begin = s.find_first_not_of(" \t\r\n");
    if (begin == std::string::npos) return "";
    const auto end = s.find_last_not_of(" \t\r\n");
    return s.substr(begin, end - begin + 1);
}

bool parse_bool(const std::string& raw, std::size_t row)
{
    std::string s = trim(raw);
    std::transform(s.begin(), s.end(), s.begin(), [](unsigned char c) { return std::tolower(c); });
    if (s == "1" || s == "true") return true;
    if (s == "0" || s == "false") return false;
    throw std::runtime_error("row " + std::to_string(row) +
                             ": censored must be one of 0/1/true/false, got '" + raw + "'");
}

double parse_double(const std::string& raw, const std::string& name, std::size_t row)
{
    try {
        std::size_t pos = 0;
        const double v = std::stod(trim(raw), &pos);
        if (pos != trim(raw).size() || !std::isfinite(v)) throw std::invalid_argument(raw);
        return v;
    } catch (const std::exception&) {
        throw std::runtime_error("row " + std::to_string(row) + ": " + name +
                                 " is not a finite number: '" + raw + "'");
    }
}

} // namespace

Dataset Dataset::from_records(AnchorMode mode, std::vector<ObservationRecord> records,
                              double censor_threshold, std::optional<DistSpec> incubation_prior)
{
    Dataset ds;
    ds.anchor_mode = mode;
    ds.records = std::move(records);
    ds.censor_threshold = censor_threshold;
    ds.incubation_prior = incubation_prior;

    if (ds.records.empty()) throw std::runtime_error("dataset: no records");
    if (mode == AnchorMode::OnsetAnchored && !incubation_prior.has_value()) {
        throw std::runtime_error("dataset: onset-anchored data requires an incubation prior");
    }
    if (incubation_prior && !incubation_prior->valid()) {
        throw std::runtime_error("dataset: invalid incubation prior");
    }

    std::unordered_map<std::string, std::size_t> index;
    for (std::size_t i = 0; i < ds.records.size(); ++i) {
        const auto& rec = ds.records[i];
        if (!rec.valid()) {
            throw std::runtime_error("record " + std::to_string(i + 1) +
                                     ": exactly one of value/censored must be set");
        }
        auto [it, inserted] = index.try_emplace(rec.case_id, ds.case_ids.size());
        if (inserted) {
            ds.case_ids.push_back(rec.case_id);
            ds.obs_by_case.emplace_back();
        }
        ds.obs_by_case[it->second].push_back(i);
    }
    return ds;
}

Dataset load_dataset(const std::string& path, AnchorMode mode, double censor_threshold,
                     std::optional<DistSpec> incubation_prior)
{
    std::ifstream in(path);
    if (!in) throw std::runtime_error("cannot open dataset file: " + path);

    std::string line;
    if (!std::getline(in, line)) throw std::runtime_error(path + ": no records");
    if (trim(line) != "case_id,t_anchor,value,censored") {
        throw std::runtime_error(path + ": unrecognized header (expected schema v1 "
                                        "'case_id,t_anchor,value,censored'), got '" +
                                 trim(line) + "'");
    }

    std::vector<ObservationRecord> records;
    std::size_t row = 1; // header was row 1
    while (std::getline(in, line)) {
        ++row;
        if (trim(line).empty()) continue;
        const auto fields = split_csv_line(line);
        if (fields.size() != 4) {
            throw std::runtime_error(path + ": row " + std::to_string(row) + ": expected 4 fields, got " +
                                     std::to_string(fields.size()));
        }
        ObservationRecord rec;
        rec.case_id = trim(fields[0]);
        if (rec.case_id.empty()) {
            throw std::runtime_error(path + ": row " + std::to_string(row) + ": empty case_id");
        }
        rec.t_anchor = parse_double(fields[1], "t_anchor", row);
        rec.censored = parse_bool(fields[3], row);
        const std::string value_field = trim(fields[2]);
        if (!value_field.empty()) rec.value = parse_double(value_field, "value", row);
        if (rec.value.has_value() && rec.censored) {
            throw std::runtime_error(path + ": row " + std::to_string(row) +
                                     ": a censored row must not carry a value");
        }
        if (!rec.value.has_value() && !rec.censored) {
            throw std::runtime_error(path + ": row " + std::to_string(row) +
                                     ": missing value on an uncensored row");
        }
        records.push_back(std::move(rec));
    }
    if (records.empty()) throw std::runtime_error(path + ": no records");

    try {
        return Dataset::from_records(mode, std::move(records), censor_threshold, incubation_prior);
    } catch (const std::runtime_error& e) {
        throw std::runtime_error(path + ": " + e.what());
    }
}

void save_dataset(const Dataset& dataset, const std::string& path)
{
    std::ofstream out(path);
    if (!out) throw std::runtime_error("cannot write dataset file: " + path);
    out << "case_id,t_anchor,value,censored\n";
    char buf[64];
    for (const auto& rec : dataset.records) {
        out << rec.case_id << ',';
        std::snprintf(buf, sizeof(buf), "%.10g", rec.t_anchor);
        out << buf << ',';
        if (rec.value) {
            std::snprintf(buf, sizeof(buf), "%.10g", *rec.value);
            out << buf;
        }
        out << ',' << (rec.censored ? 1 : 0) << '\n';
    }
}

} // namespace plexsim
