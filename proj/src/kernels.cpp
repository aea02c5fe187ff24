#include "addbo/kernels.hpp"

#include <cmath>
#include <string>

#include "addbo/errors.hpp"

namespace addbo {

SubKernel::SubKernel(Vector lengthscales, double signal_variance)
    : lengthscales_(std::move(lengthscales)), signal_variance_(signal_variance) {
    if (lengthscales_.size() == 0) {
        throw ShapeError("SubKernel: at least one lengthscale is required");
    }
    if (!(lengthscales_.array() > 0.0).all() || !lengthscales_.allFinite()) {
        throw PreconditionError("SubKernel: lengthscales must be positive and finite");
    }
    if (!(signal_variance_ > 0.0) || !std::isfinite(signal_variance_)) {
        throw PreconditionError("SubKernel: signal variance must be positive and finite");
    }
}

SubKernel SubKernel::from_log_params(const VectorRef& log_params) {
    if (log_params.size() < 2) {
        throw ShapeError("SubKernel::from_log_params: need at least two parameters");
    }
    const Index d = log_params.size() - 1;
    return SubKernel(log_params.head(d).array().exp().matrix(), std::exp(log_params(d)));
}

Vector SubKernel::log_params() const {
    Vector out(num_params());
    out.head(dim()) = lengthscales_.array().log().matrix();
    out(dim()) = std::log(signal_variance_);
    return out;
}

double kernel_eval(const SubKernel& k, const VectorRef& x, const VectorRef& x2) {
    if (x.size() != k.dim() || x2.size() != k.dim()) {
        throw ShapeError("kernel_eval: point dimension does not match kernel dimension " + std::to_string(k.dim()));
    }
    const double r2 = ((x - x2).array() / k.lengthscales().array()).square().sum();
    return k.signal_variance() * std::exp(-0.5 * r2);
}

Matrix cross_cov(const SubKernel& k, const MatrixRef& a, const MatrixRef& b) {
    if (a.cols() != k.dim() || b.cols() != k.dim()) {
        throw ShapeError("cross_cov: inputs have " + std::to_string(a.cols()) + " and " + std::to_string(b.cols()) +
                         " columns, kernel dimension is " + std::to_string(k.dim()));
    }
    const Eigen::ArrayXd inv_ell = k.lengthscales().array().inverse();
    // Scaled points stored as columns for contiguous access.
    const Matrix sa = inv_ell.matrix().asDiagonal() * a.transpose();
    const Matrix sb = inv_ell.matrix().asDiagonal() * b.transpose();
    Matrix out(a.rows(), b.rows());
    for (Index c = 0; c < b.rows(); ++c) {
        for (Index r = 0; r < a.rows(); ++r) {
            out(r, c) = k.signal_variance() * std::exp(-0.5 * (sa.col(r) - sb.col(c)).squaredNorm());
        }
    }
    return out;
}

std::vector<Matrix> cross_cov_param_grad(const SubKernel& k, const MatrixRef& a) {
    const Matrix base = cross_cov(k, a, a);
    std::vector<Matrix> grads;
    grads.reserve(static_cast<std::size_t>(k.num_params()));
    const Index n = a.rows();
    for (Index j = 0; j < k.dim(); ++j) {
        const double inv_l2 = 1.0 / (k.lengthscales()(j) * k.lengthscales()(j));
        Matrix g(n, n);
        for (Index c = 0; c < n; ++c) {
            for (Index r = 0; r < n; ++r) {
                const double diff = a(r, j) - a(c, j);
                g(r, c) = base(r, c) * diff * diff * inv_l2;
            }
        }
        grads.push_back(std::move(g));
    }
    grads.push_back(base);
    return grads;
}

}  // namespace addbo
