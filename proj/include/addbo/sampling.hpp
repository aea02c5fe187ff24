#ifndef ADDBO_SAMPLING_HPP
#define ADDBO_SAMPLING_HPP
#pragma once

#include <span>
#include <vector>

#include "addbo/model.hpp"

namespace addbo {

/// Candidates Z_m (B_m x d_m) and sampled subfunction values (B_m x count,
/// standardized units) for one group.
struct GroupSamples {
    Matrix candidates;
    Matrix values;
};

struct GroupSampleSet {
    std::vector<GroupSamples> groups;
    /// Number of sampling-covariance Cholesky factorizations performed.
    Index covariance_factorizations = 0;

    [[nodiscard]] Index count() const { return groups.empty() ? 0 : groups.front().values.cols(); }
};

/// Exact stacked posterior of [f_1(Z_1); ...; f_M(Z_M)] given y.
struct JointPosteriorSpec {
    Vector mean;
    Matrix covariance;
    std::vector<Index> offsets;  ///< offsets[m] is the first row of group m; offsets[M] is the total

    [[nodiscard]] Index group_size(Index m) const;
    [[nodiscard]] Matrix block(Index i, Index j) const;
};

/// Throws ShapeError unless there is one candidate matrix per group with the
/// group's dimension.
void check_candidates(const AdditiveGpModel& model, std::span<const Matrix> z);

[[nodiscard]] JointPosteriorSpec naive_joint_posterior(const AdditiveGpModel& model, const Dataset& data,
                                                       std::span<const Matrix> z);

/// Exact joint draws through a single Cholesky factorization of the stacked
/// covariance. Cubic in sum_m B_m; meant as an oracle and small-M fallback.
[[nodiscard]] GroupSampleSet sample_naive(const AdditiveGpModel& model, const Dataset& data,
                                          std::span<const Matrix> z, Index count, RngStream& rng);

/// Each group drawn from its own marginal posterior, ignoring cross-group
/// covariance. Noise is consumed group by group in ascending order.
[[nodiscard]] GroupSampleSet sample_marginal(const AdditiveGpModel& model, const Dataset& data,
                                             std::span<const Matrix> z, Index count, RngStream& rng);

/// sample_marginal with caller-supplied standard normals; noise[m] is B_m x count.
[[nodiscard]] GroupSampleSet sample_marginal_from_noise(const AdditiveGpModel& model, const Dataset& data,
                                                        std::span<const Matrix> z, std::span<const Matrix> noise);

/// Posterior of the stacked [f_m(P_m X); f_m(Z_m)] given that
///   residual = sum_{j in remaining} f_j(P_j X) + noise,
/// i.e. y minus the design-point values of every group outside `remaining`.
/// The Gram is C = sum_{j in remaining} K_j(P_j X, P_j X) + tau^2 I.
[[nodiscard]] PredictiveGaussian residual_conditional(const AdditiveGpModel& model, const Dataset& data, Index m,
                                                      std::span<const Index> remaining, const VectorRef& residual,
                                                      const MatrixRef& z_m);

/// Exact joint draws by autoregressive residual conditioning. Groups are
/// processed last to first, so group m conditions on the residual after
/// removing groups m+1..M-1 and uses the Gram over groups 0..m. One
/// factorization per group is shared by all `count` columns. Noise matrices
/// are drawn in processing order.
[[nodiscard]] GroupSampleSet sample_joint(const AdditiveGpModel& model, const Dataset& data,
                                          std::span<const Matrix> z, Index count, RngStream& rng);

/// sample_joint with caller-supplied standard normals; noise[m] is
/// (N + B_m) x count, rows ordered as [design points; candidates]. The result
/// is affine in the noise.
[[nodiscard]] GroupSampleSet sample_joint_from_noise(const AdditiveGpModel& model, const Dataset& data,
                                                     std::span<const Matrix> z, std::span<const Matrix> noise);

enum class SubfunctionSampler { naive, marginal, joint };

/// Rows of standard-normal noise `sampler` consumes for group m per column.
[[nodiscard]] Index noise_rows(SubfunctionSampler sampler, const Dataset& data, const MatrixRef& z_m);

}  // namespace addbo

#endif  // ADDBO_SAMPLING_HPP
