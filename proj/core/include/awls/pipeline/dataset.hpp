#pragma once

#include <array>
#include <cstdint>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "awls/grid/load_profile.hpp"
#include "awls/grid/network_case.hpp"
#include "awls/grid/topology.hpp"
#include "awls/nn/train.hpp"

namespace awls {

/// Per-bus multipliers of the nominal load; a profile picks one band with
/// equal probability and draws each bus factor uniformly inside it.
struct LoadBands {
    std::vector<std::array<double, 2>> bands{{0.80, 0.93}, {0.93, 1.07}, {1.07, 1.20}};
    void validate() const;
};

std::vector<LoadProfile> sample_profiles(const NetworkCase& c, std::size_t n, const LoadBands& bands,
                                         std::uint64_t seed);

struct DatasetConfig {
    std::vector<BranchId> candidate_lines;
    std::size_t k = 3;
    std::size_t n_profiles = 200;
    std::size_t n_topologies = 0;  // 0 = the whole budget set
    std::size_t max_samples = 0;   // 0 = every (topology, profile) pair
    bool exclude_islanding = true;
    LoadBands bands;
    std::uint64_t seed = 0;
    int jobs = 1;
};

struct Sample {
    std::size_t topology = 0;  // index into Dataset::topologies
    std::size_t profile = 0;   // index into Dataset::profiles
    double label = 0.0;
    std::vector<double> bus_shed;
};

struct Dataset {
    std::string case_id;
    DatasetConfig config;
    std::vector<Topology> topologies;
    std::vector<LoadProfile> profiles;
    std::vector<Sample> samples;  // topology-major

    /// Labels lie in [0, total demand of their profile].
    void validate(double tol = 1e-6) const;
};

Dataset gen_dataset(const NetworkCase& c, const DatasetConfig& config, const std::string& case_id = {});

/// [x (every branch); pd; qd].
std::vector<double> surrogate_input(const Topology& topo, const LoadProfile& load);

/// Listed profiles crossed with listed topologies (indices into the dataset).
struct SampleSelection {
    std::vector<std::size_t> profiles;
    std::vector<std::size_t> topologies;

    static SampleSelection all_topologies(const Dataset& d, std::vector<std::size_t> profiles);
};

/// Samples whose profile index is listed, as surrogate inputs and labels.
TrainingSet to_training_set(const Dataset& d, const std::vector<std::size_t>& profiles);
TrainingSet to_training_set(const Dataset& d, const SampleSelection& sel);
/// Per-area shed samples (sum of bus_shed over each area's buses).
std::vector<std::vector<double>> area_labels(const Dataset& d, const std::vector<int>& area_of, int num_areas,
                                             const std::vector<std::size_t>& profiles);
std::vector<std::vector<double>> area_labels(const Dataset& d, const std::vector<int>& area_of, int num_areas,
                                             const SampleSelection& sel);

struct ProfileSplit {
    std::vector<std::size_t> train;
    std::vector<std::size_t> test;
};
/// Seeded shuffle of the profile indices; the first fraction trains.
ProfileSplit split_profiles(std::size_t n_profiles, double train_fraction, std::uint64_t seed);

struct DataSplit {
    SampleSelection train;
    SampleSelection test;
};

/// Profile split with every topology on both sides.
DataSplit profile_split(const Dataset& d, double train_fraction, std::uint64_t seed);

/// Out-of-sample by outage count: topologies with at most max_train_outages
/// lines off train, together with extra_fraction of the heavier ones drawn
/// from their top_fraction by mean label; the other heavier ones test. All
/// profiles are used on both sides.
DataSplit outage_count_split(const Dataset& d, std::size_t max_train_outages, double extra_fraction,
                             double top_fraction, std::uint64_t seed);

/// Out-of-sample by line set: topologies whose outages all lie in base_lines
/// train, with extra_fraction of the others drawn uniformly; the rest test.
DataSplit line_set_split(const NetworkCase& c, const Dataset& d, const std::vector<BranchId>& base_lines,
                         double extra_fraction, std::uint64_t seed);

/// JSON-lines: a header record, then topology, profile and sample records.
void write_dataset(const Dataset& d, std::ostream& out);
Dataset read_dataset(std::istream& in);

nlohmann::json bands_to_json(const LoadBands& b);
LoadBands bands_from_json(const nlohmann::json& j);

}  // namespace awls
