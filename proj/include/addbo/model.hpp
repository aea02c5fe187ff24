#ifndef ADDBO_MODEL_HPP
#define ADDBO_MODEL_HPP
#pragma once

#include <vector>

#include <json.hpp>

#include "addbo/kernels.hpp"
#include "addbo/numerics.hpp"
#include "addbo/structure.hpp"

namespace addbo {

/// Design points in the unit cube (one per row) with raw responses.
class Dataset {
public:
    Dataset(Matrix x, Vector y);
    /// An empty dataset over p input coordinates.
    [[nodiscard]] static Dataset empty(Index p) { return Dataset(Matrix(0, p), Vector(0)); }

    [[nodiscard]] const Matrix& x() const noexcept { return x_; }
    [[nodiscard]] const Vector& y() const noexcept { return y_; }
    [[nodiscard]] Index size() const noexcept { return x_.rows(); }
    [[nodiscard]] Index dim() const noexcept { return x_.cols(); }

    /// Copy with the given rows appended.
    [[nodiscard]] Dataset appended(const MatrixRef& x, const VectorRef& y) const;

private:
    Matrix x_;
    Vector y_;
};

/// Gaussian over a finite set of points. Variances are clamped at zero on read.
struct PredictiveGaussian {
    Vector mean;
    Matrix covariance;

    [[nodiscard]] Vector variance() const { return covariance.diagonal().cwiseMax(0.0); }
};

/// Additive GP: sum of independent zero-mean subfunction GPs, one per group,
/// plus iid Gaussian noise. Responses are standardized with (y_shift, y_scale)
/// before entering any posterior computation.
class AdditiveGpModel {
public:
    static constexpr double kNoiseFloor = 1e-6;

    AdditiveGpModel(AdditiveStructure structure, std::vector<SubKernel> kernels, double noise_variance,
                    double y_shift = 0.0, double y_scale = 1.0);

    /// Default hyperparameters (l_j = 0.5 sqrt(d_m), s^2_m = 1/M, tau^2 = 1e-2)
    /// and standardization constants taken from `data`.
    [[nodiscard]] static AdditiveGpModel with_defaults(AdditiveStructure structure, const Dataset& data);

    [[nodiscard]] const AdditiveStructure& structure() const noexcept { return structure_; }
    [[nodiscard]] const std::vector<SubKernel>& kernels() const noexcept { return kernels_; }
    [[nodiscard]] const SubKernel& kernel(Index m) const;
    [[nodiscard]] Index num_groups() const noexcept { return structure_.num_groups(); }
    [[nodiscard]] Index dim() const noexcept { return structure_.dim(); }
    [[nodiscard]] double noise_variance() const noexcept { return noise_variance_; }
    [[nodiscard]] double y_shift() const noexcept { return y_shift_; }
    [[nodiscard]] double y_scale() const noexcept { return y_scale_; }
    /// Sum of signal variances, the prior variance of f at any point.
    [[nodiscard]] double prior_variance() const;

    [[nodiscard]] Vector standardize(const VectorRef& y) const;

    /// Unconstrained parameters: each group's [log l..., log s^2] in group
    /// order, then log tau^2.
    [[nodiscard]] Vector parameters() const;
    [[nodiscard]] Index num_parameters() const;
    /// Copy with new unconstrained parameters; tau^2 is clamped to the floor.
    [[nodiscard]] AdditiveGpModel with_parameters(const VectorRef& params) const;

private:
    AdditiveStructure structure_;
    std::vector<SubKernel> kernels_;
    double noise_variance_;
    double y_shift_;
    double y_scale_;
};

/// Per-dataset quantities shared by every posterior computation.
struct TrainingCache {
    std::vector<Matrix> projected;  ///< P_m X
    std::vector<Matrix> grams;      ///< K_m(P_m X, P_m X)
    PsdFactor factor;               ///< of sum_m grams + tau^2 I
    Vector y_std;
    Vector alpha;                   ///< factor^{-1} y_std
};

[[nodiscard]] TrainingCache make_training_cache(const AdditiveGpModel& model, const Dataset& data);

/// Sum over groups of K_m(P_m A, P_m B).
[[nodiscard]] Matrix summed_cov(const AdditiveGpModel& model, const MatrixRef& a, const MatrixRef& b);

/// Factor of sum_m K_m(P_m X, P_m X) + tau^2 I.
[[nodiscard]] PsdFactor train_gram(const AdditiveGpModel& model, const Dataset& data);

/// Posterior of f(X_new) with all cross-group terms, in raw output units.
[[nodiscard]] PredictiveGaussian predict_exact(const AdditiveGpModel& model, const Dataset& data,
                                               const MatrixRef& x_new);

/// Same mean as predict_exact; the covariance drops every cross-group
/// ("bilateral") correction term.
[[nodiscard]] PredictiveGaussian predict_additive(const AdditiveGpModel& model, const Dataset& data,
                                                  const MatrixRef& x_new);

/// Marginal posterior of f_m(Z_m) given y, standardized units.
[[nodiscard]] PredictiveGaussian subfunction_marginal(const AdditiveGpModel& model, const Dataset& data, Index m,
                                                      const MatrixRef& z_m);

/// Mean and variance only of subfunction_marginal.
struct MarginalMoments {
    Vector mean;
    Vector variance;
};
[[nodiscard]] MarginalMoments subfunction_marginal_moments(const AdditiveGpModel& model, const TrainingCache& cache,
                                                           Index m, const MatrixRef& z_m);

/// -1/2 (y^T K^-1 y + log det K + N log 2 pi) on standardized responses.
[[nodiscard]] double log_marginal_likelihood(const AdditiveGpModel& model, const Dataset& data);

/// Gradient of log_marginal_likelihood in parameters() order.
[[nodiscard]] Vector lml_gradient(const AdditiveGpModel& model, const Dataset& data);

struct FitOptions {
    int steps = 1000;
    double step_size = 1e-4;
    double beta1 = 0.9;
    double beta2 = 0.999;
    double epsilon = 1e-8;
};

struct FitResult {
    AdditiveGpModel model;
    double initial_lml;
    double best_lml;
};

/// Adam ascent on the log marginal likelihood. Returns the best parameters
/// seen, so best_lml >= initial_lml. Deterministic.
[[nodiscard]] FitResult fit(const AdditiveGpModel& model, const Dataset& data, const FitOptions& options = {});

[[nodiscard]] nlohmann::json model_to_json(const AdditiveGpModel& model);
[[nodiscard]] AdditiveGpModel model_from_json(const nlohmann::json& j);

}  // namespace addbo

#endif  // ADDBO_MODEL_HPP
