#ifndef ADDBO_NUMERICS_HPP
#define ADDBO_NUMERICS_HPP
#pragma once

#include <Eigen/Dense>

#include "addbo/rng.hpp"

namespace addbo {

using Index = Eigen::Index;
using Matrix = Eigen::MatrixXd;
using Vector = Eigen::VectorXd;
using MatrixRef = Eigen::Ref<const Eigen::MatrixXd>;
using VectorRef = Eigen::Ref<const Eigen::VectorXd>;

/// Diagonal jitter escalation for Cholesky retries. The first attempt uses no
/// jitter; retries add initial_rel * scale, growing by `growth` each time up to
/// max_rel * scale, where scale is the mean diagonal of the input.
struct JitterSchedule {
    double initial_rel = 1e-8;
    double growth = 10.0;
    double max_rel = 1e-2;
};

/// Lower Cholesky factor of A + jitter * I.
class PsdFactor {
public:
    PsdFactor() = default;
    PsdFactor(Matrix lower, double jitter_used) : lower_(std::move(lower)), jitter_used_(jitter_used) {}

    [[nodiscard]] const Matrix& lower() const noexcept { return lower_; }
    [[nodiscard]] double jitter_used() const noexcept { return jitter_used_; }
    [[nodiscard]] Index dim() const noexcept { return lower_.rows(); }

    /// lower * lower^T
    [[nodiscard]] Matrix reconstruct() const;
    [[nodiscard]] double log_det() const;

private:
    Matrix lower_;
    double jitter_used_ = 0.0;
};

/// Factors a symmetric PSD matrix with the smallest jitter in the schedule that
/// succeeds. Throws ShapeError for non-square or asymmetric input (relative
/// tolerance 1e-8) and SingularityError if the largest jitter still fails.
[[nodiscard]] PsdFactor factor_psd(const MatrixRef& a, const JitterSchedule& schedule = {});

/// Solves (A + jitter I) X = B.
[[nodiscard]] Matrix solve_with_factor(const PsdFactor& factor, const Matrix& b);
[[nodiscard]] Vector solve_with_factor(const PsdFactor& factor, const Vector& b);

/// Solves L X = B (half solve); handy for quadratic forms.
[[nodiscard]] Matrix half_solve(const PsdFactor& factor, const MatrixRef& b);

/// rows x cols matrix of iid N(0, 1) draws, filled column by column.
[[nodiscard]] Matrix standard_normal(Index rows, Index cols, RngStream& rng);

/// `count` draws of N(mean, L L^T) as the columns of an n x count matrix.
[[nodiscard]] Matrix sample_gaussian(const VectorRef& mean, const PsdFactor& factor, Index count, RngStream& rng);

/// Symmetric part of a square matrix.
[[nodiscard]] Matrix symmetrize(const MatrixRef& a);

}  // namespace addbo

#endif  // ADDBO_NUMERICS_HPP
