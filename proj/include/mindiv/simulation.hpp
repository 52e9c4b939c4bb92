#pragma once

#include <cstdint>
#include <random>
#include <string>
#include <vector>

#include "mindiv/estimators.hpp"

namespace mindiv {

enum class Contaminant { Normal3, Normal10, Logistic, Cauchy };

/// Accepts "normal3", "normal10", "logistic", "cauchy".
Contaminant contaminant_from_name(const std::string& name);
std::string to_string(Contaminant c);

/// (1 - eps) N(0, sigma^2) + eps Q_sigma, where Q_sigma is the contaminant
/// with scale sigma (normal3/normal10 are N(0, (k sigma)^2)).
struct ContaminationModel {
    double base_sigma = 1.0;
    double epsilon = 0.1;
    Contaminant contaminant = Contaminant::Cauchy;

    void validate() const;
};

/// If `from_contaminant` is given it receives one flag per draw.
std::vector<double> sample_contaminated(const ContaminationModel& model, int n, std::mt19937_64& rng,
                                        std::vector<bool>* from_contaminant = nullptr);

/// Generator for replication `rep` of a study seeded with `seed`.
std::mt19937_64 replication_rng(std::uint64_t seed, std::uint64_t rep);

struct StudyRow {
    std::string estimator;
    double alpha = 0.0;
    double mse = 0.0;
    double mean_estimate = 0.0;
    int failures = 0;
    // pooled sums over successful replications
    double sum_sq_error = 0.0;
    double sum_estimate = 0.0;
    int successes = 0;
};

struct StudyResult {
    std::vector<StudyRow> rows;
    int replications = 0;
    std::uint64_t seed = 0;
};

struct StudyOptions {
    int threads = 0;               // 0: hardware concurrency
    std::uint64_t first_rep = 0;   // replication index offset, for chunked runs
};

/// Fits every spec to `reps` samples of size n from the model (NormalScale
/// family) and accumulates squared errors against base_sigma. Failed fits are
/// counted and left out of the MSE. Output is independent of the thread count.
StudyResult run_study(const ContaminationModel& model, int n, int reps, const std::vector<EstimatorSpec>& specs,
                      std::uint64_t seed, const StudyOptions& options = {});

/// Combines chunked results by summing their pooled sums.
StudyResult pool(const std::vector<StudyResult>& parts);

std::string report_csv(const StudyResult& r);
std::string report_json(const StudyResult& r);
/// Inverse of report_json.
StudyResult parse_report_json(const std::string& text);

}  // namespace mindiv
