#ifndef ADDBO_BENCH_HPP
#define ADDBO_BENCH_HPP
#pragma once

#include <cstdint>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

#include <json.hpp>

#include "addbo/acquisition.hpp"
#include "addbo/testfns.hpp"

namespace addbo {

struct ExperimentConfig {
    FunctionKind function = FunctionKind::ackley;
    Index dim = 5;
    Method method = Method::ts;
    Index batch_size = 1;
    Index init_count = 20;
    Index total_acquisitions = 100;
    Index candidate_count = 500;
    Index refit_every = 10;  ///< acquisitions between hyperparameter refits
    Index max_group_dim = 5;
    Index replicates = 10;
    std::uint64_t base_seed = 0;
    double beta = 2.0;
    int fit_steps = 1000;
    double fit_step_size = 1e-4;
    /// When false, round_seconds is written as 0 so output is byte-reproducible.
    bool record_timing = true;
    unsigned threads = 1;
    std::string output;

    /// Throws ConfigError.
    void validate() const;
};

/// Reads any subset of the ExperimentConfig fields; missing keys keep defaults.
[[nodiscard]] ExperimentConfig config_from_json(const nlohmann::json& j);
[[nodiscard]] nlohmann::json config_to_json(const ExperimentConfig& config);

/// One evaluated point.
struct RunRecord {
    Index replicate = 0;
    Index eval_index = 0;
    std::string method;
    std::uint64_t seed = 0;
    double value = 0.0;
    double bov = 0.0;  ///< best observed value up to and including this evaluation
    double round_seconds = 0.0;
    Vector x;
};

struct ReplicateResult {
    std::vector<RunRecord> records;
    /// Fitted model after each refit, tagged with the number of evaluations seen.
    std::vector<nlohmann::json> models;
};

[[nodiscard]] std::uint64_t replicate_seed(const ExperimentConfig& config, Index replicate);

/// Runs one replicate. Depends only on (config, replicate), so replicates may
/// run in any order or concurrently.
[[nodiscard]] ReplicateResult run_replicate(const ExperimentConfig& config, Index replicate);

/// All replicates, on config.threads workers, ordered by (replicate, eval_index).
[[nodiscard]] std::vector<RunRecord> run_experiment(const ExperimentConfig& config,
                                                    std::vector<nlohmann::json>* models = nullptr);

void write_csv(std::ostream& out, const std::vector<RunRecord>& records, Index p);
/// Parses the format written by write_csv. Throws ConfigError on malformed input.
[[nodiscard]] std::vector<RunRecord> read_csv(std::istream& in);
/// Shortest round-trip decimal form.
[[nodiscard]] std::string format_double(double value);

/// Linear-interpolation quantile (Hyndman-Fan type 7). `values` nonempty.
[[nodiscard]] double quantile(std::vector<double> values, double q);

struct TrajectoryPoint {
    Index eval_index;
    Index replicates;
    double median;
    double q25;
    double q75;
};

struct GapSummary {
    std::vector<double> log10_gaps;  ///< one per replicate, in replicate order
    double median;
    double q25;
    double q75;
};

struct MethodSummary {
    std::string method;
    std::vector<TrajectoryPoint> trajectory;
    std::optional<GapSummary> final_gap;
};

/// log10 of (bov - optimum), floored at 1e-12.
[[nodiscard]] double log10_gap(double bov, double optimum);

/// Per-method BOV quantiles across replicates at every evaluation index, and
/// final log10 optimality gaps when `optimum` is given.
[[nodiscard]] std::vector<MethodSummary> summarize(const std::vector<RunRecord>& records,
                                                   std::optional<double> optimum = std::nullopt);

/// log10 gaps of the BOV at `eval_index`, one per replicate of `method`.
[[nodiscard]] std::vector<double> gaps_at(const std::vector<RunRecord>& records, const std::string& method,
                                          Index eval_index, double optimum);

void write_summary_csv(std::ostream& out, const std::vector<MethodSummary>& summaries);

struct SurfaceRow {
    double x1;
    double x2;
    double mean;
    double exact_variance;
    double additive_variance;
    double exact_draw;
    double additive_draw;
};

/// Dense resolution x resolution grid over [0, 1]^2 for a model with two
/// singleton groups: exact and additive predictive variance plus one draw
/// from each posterior. Raw output units.
[[nodiscard]] std::vector<SurfaceRow> export_surface(const AdditiveGpModel& model, const Dataset& data,
                                                     Index resolution, RngStream& rng);

void write_surface_csv(std::ostream& out, const std::vector<SurfaceRow>& rows);

}  // namespace addbo

#endif  // ADDBO_BENCH_HPP
