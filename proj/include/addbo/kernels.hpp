#ifndef ADDBO_KERNELS_HPP
#define ADDBO_KERNELS_HPP
#pragma once

#include <vector>

#include "addbo/numerics.hpp"

namespace addbo {

/// Anisotropic squared-exponential kernel on one coordinate group,
///   k(x, x') = s^2 exp(-1/2 sum_j ((x_j - x'_j) / l_j)^2).
/// Hyperparameters live on log scale: [log l_1, ..., log l_d, log s^2].
class SubKernel {
public:
    SubKernel(Vector lengthscales, double signal_variance);

    /// Builds a kernel from its unconstrained parameter vector (length d + 1).
    [[nodiscard]] static SubKernel from_log_params(const VectorRef& log_params);

    [[nodiscard]] Index dim() const noexcept { return lengthscales_.size(); }
    [[nodiscard]] Index num_params() const noexcept { return dim() + 1; }
    [[nodiscard]] const Vector& lengthscales() const noexcept { return lengthscales_; }
    [[nodiscard]] double signal_variance() const noexcept { return signal_variance_; }
    [[nodiscard]] Vector log_params() const;

private:
    Vector lengthscales_;
    double signal_variance_;
};

[[nodiscard]] double kernel_eval(const SubKernel& k, const VectorRef& x, const VectorRef& x2);

/// K(A, B): entry (j, l) is k(A.row(j), B.row(l)).
[[nodiscard]] Matrix cross_cov(const SubKernel& k, const MatrixRef& a, const MatrixRef& b);

/// Derivatives of K(A, A) with respect to each log parameter, in
/// log_params() order.
[[nodiscard]] std::vector<Matrix> cross_cov_param_grad(const SubKernel& k, const MatrixRef& a);

}  // namespace addbo

#endif  // ADDBO_KERNELS_HPP
