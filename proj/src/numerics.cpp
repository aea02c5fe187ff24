#include "addbo/numerics.hpp"

#include <cmath>
#include <string>

#include "addbo/errors.hpp"

namespace addbo {

Matrix PsdFactor::reconstruct() const { return lower_ * lower_.transpose(); }

double PsdFactor::log_det() const { return 2.0 * lower_.diagonal().array().log().sum(); }

Matrix symmetrize(const MatrixRef& a) { return 0.5 * (a + a.transpose()); }

namespace {

bool try_cholesky(const Matrix& a, double jitter, Matrix& lower) {
    Matrix shifted = a;
    shifted.diagonal().array() += jitter;
    Eigen::LLT<Matrix> llt(shifted);
    if (llt.info() != Eigen::Success) {
        return false;
    }
    lower = llt.matrixL();
    // LLT only rejects non-positive pivots; a vanishing diagonal is as bad.
    return (lower.diagonal().array() > 0.0).all() && lower.allFinite();
}

}  // namespace

PsdFactor factor_psd(const MatrixRef& a, const JitterSchedule& schedule) {
    if (a.rows() != a.cols()) {
        throw ShapeError("factor_psd: matrix is " + std::to_string(a.rows()) + "x" + std::to_string(a.cols()));
    }
    const Index n = a.rows();
    if (n == 0) {
        return PsdFactor(Matrix(0, 0), 0.0);
    }
    const double magnitude = std::max(1.0, a.cwiseAbs().maxCoeff());
    if ((a - a.transpose()).cwiseAbs().maxCoeff() > 1e-8 * magnitude) {
        throw ShapeError("factor_psd: matrix is not symmetric");
    }
    const Matrix sym = symmetrize(a);
    double scale = sym.diagonal().mean();
    if (!(scale > 0.0)) {
        scale = 1.0;
    }

    Matrix lower;
    if (try_cholesky(sym, 0.0, lower)) {
        return PsdFactor(std::move(lower), 0.0);
    }
    const double max_jitter = schedule.max_rel * scale * (1.0 + 1e-12);
    for (double jitter = schedule.initial_rel * scale; jitter <= max_jitter; jitter *= schedule.growth) {
        if (try_cholesky(sym, jitter, lower)) {
            return PsdFactor(std::move(lower), jitter);
        }
    }
    throw SingularityError("factor_psd: Cholesky failed at maximum jitter " + std::to_string(schedule.max_rel * scale));
}

Matrix solve_with_factor(const PsdFactor& factor, const Matrix& b) {
    if (b.rows() != factor.dim()) {
        throw ShapeError("solve_with_factor: right-hand side has " + std::to_string(b.rows()) +
                         " rows, factor dimension is " + std::to_string(factor.dim()));
    }
    const auto lower = factor.lower().triangularView<Eigen::Lower>();
    Matrix x = lower.solve(b);
    lower.transpose().solveInPlace(x);
    return x;
}

Vector solve_with_factor(const PsdFactor& factor, const Vector& b) {
    if (b.size() != factor.dim()) {
        throw ShapeError("solve_with_factor: right-hand side has " + std::to_string(b.size()) +
                         " rows, factor dimension is " + std::to_string(factor.dim()));
    }
    const auto lower = factor.lower().triangularView<Eigen::Lower>();
    Vector x = lower.solve(b);
    lower.transpose().solveInPlace(x);
    return x;
}

Matrix half_solve(const PsdFactor& factor, const MatrixRef& b) {
    if (b.rows() != factor.dim()) {
        throw ShapeError("half_solve: dimension mismatch");
    }
    return factor.lower().triangularView<Eigen::Lower>().solve(b);
}

Matrix standard_normal(Index rows, Index cols, RngStream& rng) {
    Matrix out(rows, cols);
    for (Index j = 0; j < cols; ++j) {
        for (Index i = 0; i < rows; ++i) {
            out(i, j) = rng.normal();
        }
    }
    return out;
}

Matrix sample_gaussian(const VectorRef& mean, const PsdFactor& factor, Index count, RngStream& rng) {
    if (mean.size() != factor.dim()) {
        throw ShapeError("sample_gaussian: mean length does not match factor dimension");
    }
    if (count <= 0) {
        return Matrix(mean.size(), 0);
    }
    Matrix draws = factor.lower().triangularView<Eigen::Lower>() * standard_normal(mean.size(), count, rng);
    draws.colwise() += mean;
    return draws;
}

}  // namespace addbo
