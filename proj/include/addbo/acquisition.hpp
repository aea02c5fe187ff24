#ifndef ADDBO_ACQUISITION_HPP
#define ADDBO_ACQUISITION_HPP
#pragma once

#include <span>
#include <string>
#include <string_view>

#include "addbo/sampling.hpp"

namespace addbo {

/// ts: joint Thompson sampling; ats: marginal (additive) Thompson sampling;
/// alcb: additive lower confidence bound.
enum class Method { ts, ats, alcb };

[[nodiscard]] std::string to_string(Method method);
/// Throws ConfigError for unknown names.
[[nodiscard]] Method parse_method(std::string_view name);

struct AcquisitionRequest {
    Method method = Method::ts;
    Index batch_size = 1;
    double beta = 2.0;
    Index candidate_count = 500;

    void validate() const;
};

/// count x p matrix of iid U[0, 1] entries, filled row by row.
[[nodiscard]] Matrix candidate_grid(Index p, Index count, RngStream& rng);

/// Index of the smallest entry; ties go to the lowest index.
[[nodiscard]] Index argmin_first(const VectorRef& values);

/// For each sample column, concatenates the per-group argmin candidate
/// coordinates into a full point. Returns count x P.
[[nodiscard]] Matrix assemble_minimizers(const AdditiveStructure& structure, const GroupSampleSet& samples);

/// Thompson sampling over the projected candidate set. Each batch member is
/// one sample column whose noise comes from its own stream, so permuting the
/// streams permutes the selected rows. `sampler` must be joint or marginal.
[[nodiscard]] Matrix ts_select(const AdditiveGpModel& model, const Dataset& data, SubfunctionSampler sampler,
                               const MatrixRef& candidates, std::span<const RngStream> column_streams);

/// Convenience overload: column b uses rng.split(b).
[[nodiscard]] Matrix ts_select(const AdditiveGpModel& model, const Dataset& data, SubfunctionSampler sampler,
                               const MatrixRef& candidates, Index batch_size, const RngStream& rng);

/// Per-group argmin of mu_m - beta sigma_m over the projected candidates
/// (marginal moments, standardized units), concatenated. Batches use the
/// kriging believer: the chosen point is added with its exact predictive mean
/// as a pseudo-observation and hyperparameters stay fixed.
[[nodiscard]] Matrix alcb_select(const AdditiveGpModel& model, const Dataset& data, const MatrixRef& candidates,
                                 double beta, Index batch_size);

/// Draws a fresh candidate grid and proposes request.batch_size points.
[[nodiscard]] Matrix acquire(const AdditiveGpModel& model, const Dataset& data, const AcquisitionRequest& request,
                             const RngStream& rng);

}  // namespace addbo

#endif  // ADDBO_ACQUISITION_HPP
