#include "addbo/sampling.hpp"

#include <algorithm>
#include <string>

#include "addbo/errors.hpp"

namespace addbo {

namespace {

std::size_t at(Index m) { return static_cast<std::size_t>(m); }

void check_noise(std::span<const Matrix> noise, std::span<const Index> expected_rows) {
    if (noise.size() != expected_rows.size()) {
        throw ShapeError("noise: expected one matrix per group");
    }
    for (std::size_t m = 0; m < noise.size(); ++m) {
        if (noise[m].rows() != expected_rows[m] || noise[m].cols() != noise.front().cols()) {
            throw ShapeError("noise: matrix " + std::to_string(m) + " has the wrong shape");
        }
    }
}

Matrix stack_rows(const MatrixRef& top, const MatrixRef& bottom) {
    Matrix out(top.rows() + bottom.rows(), top.cols());
    out << top, bottom;
    return out;
}

}  // namespace

Index JointPosteriorSpec::group_size(Index m) const { return offsets[at(m) + 1] - offsets[at(m)]; }

Matrix JointPosteriorSpec::block(Index i, Index j) const {
    return covariance.block(offsets[at(i)], offsets[at(j)], group_size(i), group_size(j));
}

void check_candidates(const AdditiveGpModel& model, std::span<const Matrix> z) {
    if (static_cast<Index>(z.size()) != model.num_groups()) {
        throw ShapeError("expected " + std::to_string(model.num_groups()) + " candidate matrices, got " +
                         std::to_string(z.size()));
    }
    for (Index m = 0; m < model.num_groups(); ++m) {
        if (z[at(m)].cols() != model.structure().group_dim(m)) {
            throw ShapeError("candidate matrix " + std::to_string(m) + " has " + std::to_string(z[at(m)].cols()) +
                             " columns, group dimension is " + std::to_string(model.structure().group_dim(m)));
        }
    }
}

Index noise_rows(SubfunctionSampler sampler, const Dataset& data, const MatrixRef& z_m) {
    return sampler == SubfunctionSampler::joint ? data.size() + z_m.rows() : z_m.rows();
}

// ---------------------------------------------------------------------------
// Naive joint posterior

JointPosteriorSpec naive_joint_posterior(const AdditiveGpModel& model, const Dataset& data,
                                         std::span<const Matrix> z) {
    check_candidates(model, z);
    const TrainingCache cache = make_training_cache(model, data);
    const Index num_groups = model.num_groups();

    JointPosteriorSpec spec;
    spec.offsets.push_back(0);
    for (Index m = 0; m < num_groups; ++m) {
        spec.offsets.push_back(spec.offsets.back() + z[at(m)].rows());
    }
    const Index total = spec.offsets.back();

    // T^T stacks K_m(Z_m, P_m X) and D is block diagonal with K_m(Z_m, Z_m).
    Matrix cross(data.size(), total);
    spec.covariance = Matrix::Zero(total, total);
    for (Index m = 0; m < num_groups; ++m) {
        const Index off = spec.offsets[at(m)];
        const Index rows = z[at(m)].rows();
        cross.middleCols(off, rows) = cross_cov(model.kernel(m), cache.projected[at(m)], z[at(m)]);
        spec.covariance.block(off, off, rows, rows) = cross_cov(model.kernel(m), z[at(m)], z[at(m)]);
    }
    spec.mean = cross.transpose() * cache.alpha;
    const Matrix v = half_solve(cache.factor, cross);
    spec.covariance -= v.transpose() * v;
    spec.covariance = symmetrize(spec.covariance);
    return spec;
}

GroupSampleSet sample_naive(const AdditiveGpModel& model, const Dataset& data, std::span<const Matrix> z,
                            Index count, RngStream& rng) {
    const JointPosteriorSpec spec = naive_joint_posterior(model, data, z);
    const PsdFactor factor = factor_psd(spec.covariance);
    const Matrix draws = sample_gaussian(spec.mean, factor, count, rng);

    GroupSampleSet out;
    out.covariance_factorizations = 1;
    for (Index m = 0; m < model.num_groups(); ++m) {
        out.groups.push_back({z[at(m)], draws.middleRows(spec.offsets[at(m)], spec.group_size(m))});
    }
    return out;
}

// ---------------------------------------------------------------------------
// Marginal sampler

GroupSampleSet sample_marginal_from_noise(const AdditiveGpModel& model, const Dataset& data,
                                          std::span<const Matrix> z, std::span<const Matrix> noise) {
    check_candidates(model, z);
    std::vector<Index> rows;
    for (const auto& zm : z) {
        rows.push_back(zm.rows());
    }
    check_noise(noise, rows);

    const TrainingCache cache = make_training_cache(model, data);
    GroupSampleSet out;
    for (Index m = 0; m < model.num_groups(); ++m) {
        const SubKernel& k = model.kernel(m);
        const Matrix k_train_z = cross_cov(k, cache.projected[at(m)], z[at(m)]);
        const Matrix v = half_solve(cache.factor, k_train_z);
        const Vector mean = k_train_z.transpose() * cache.alpha;
        const PsdFactor factor = factor_psd(symmetrize(cross_cov(k, z[at(m)], z[at(m)]) - v.transpose() * v));
        ++out.covariance_factorizations;

        Matrix values = factor.lower().triangularView<Eigen::Lower>() * noise[at(m)];
        values.colwise() += mean;
        out.groups.push_back({z[at(m)], std::move(values)});
    }
    return out;
}

GroupSampleSet sample_marginal(const AdditiveGpModel& model, const Dataset& data, std::span<const Matrix> z,
                               Index count, RngStream& rng) {
    check_candidates(model, z);
    std::vector<Matrix> noise;
    for (const auto& zm : z) {
        noise.push_back(standard_normal(zm.rows(), std::max<Index>(count, 0), rng));
    }
    return sample_marginal_from_noise(model, data, z, noise);
}

// ---------------------------------------------------------------------------
// Residual conditionals and the autoregressive joint sampler

PredictiveGaussian residual_conditional(const AdditiveGpModel& model, const Dataset& data, Index m,
                                        std::span<const Index> remaining, const VectorRef& residual,
                                        const MatrixRef& z_m) {
    if (std::find(remaining.begin(), remaining.end(), m) == remaining.end()) {
        throw std::logic_error("residual_conditional: group " + std::to_string(m) + " is not in the remaining set");
    }
    if (residual.size() != data.size()) {
        throw ShapeError("residual_conditional: residual length does not match the number of observations");
    }
    const Index n = data.size();
    Matrix gram = Matrix::Zero(n, n);
    for (Index j : remaining) {
        const Matrix pj = project(model.structure(), j, data.x());
        gram += cross_cov(model.kernel(j), pj, pj);
    }
    gram.diagonal().array() += model.noise_variance();
    const PsdFactor factor = factor_psd(gram);

    const SubKernel& k = model.kernel(m);
    const Matrix pm = project(model.structure(), m, data.x());
    const Matrix augmented = stack_rows(pm, z_m);
    const Matrix k_train_aug = cross_cov(k, pm, augmented);
    const Matrix weights = solve_with_factor(factor, k_train_aug);

    PredictiveGaussian out;
    out.mean = weights.transpose() * residual;
    out.covariance = symmetrize(cross_cov(k, augmented, augmented) - k_train_aug.transpose() * weights);
    return out;
}

GroupSampleSet sample_joint_from_noise(const AdditiveGpModel& model, const Dataset& data, std::span<const Matrix> z,
                                       std::span<const Matrix> noise) {
    check_candidates(model, z);
    const Index n = data.size();
    const Index num_groups = model.num_groups();
    std::vector<Index> rows;
    for (const auto& zm : z) {
        rows.push_back(n + zm.rows());
    }
    check_noise(noise, rows);
    const Index count = noise.empty() ? 0 : noise.front().cols();

    std::vector<Matrix> projected;
    std::vector<Matrix> grams;
    for (Index m = 0; m < num_groups; ++m) {
        projected.push_back(project(model.structure(), m, data.x()));
        grams.push_back(cross_cov(model.kernel(m), projected.back(), projected.back()));
    }

    // Covariance parts. Each group depends only on the Gram prefix sum over
    // groups 0..m, so this loop has no cross-group data dependence.
    std::vector<Matrix> weights(at(num_groups));
    std::vector<Matrix> cov_part(at(num_groups));
    Matrix prefix = Matrix::Zero(n, n);
    prefix.diagonal().array() += model.noise_variance();
    GroupSampleSet out;
    for (Index m = 0; m < num_groups; ++m) {
        prefix += grams[at(m)];
        const PsdFactor gram_factor = factor_psd(prefix);
        const SubKernel& k = model.kernel(m);
        const Matrix augmented = stack_rows(projected[at(m)], z[at(m)]);
        const Matrix k_train_aug = cross_cov(k, projected[at(m)], augmented);
        weights[at(m)] = solve_with_factor(gram_factor, k_train_aug);
        const PsdFactor factor =
            factor_psd(symmetrize(cross_cov(k, augmented, augmented) - k_train_aug.transpose() * weights[at(m)]));
        ++out.covariance_factorizations;
        cov_part[at(m)] = factor.lower().triangularView<Eigen::Lower>() * noise[at(m)];
    }

    // Mean parts, applied serially from the last group to the first.
    const Vector y_std = model.standardize(data.y());
    Matrix removed = Matrix::Zero(n, count);
    out.groups.resize(at(num_groups));
    for (Index m = num_groups - 1; m >= 0; --m) {
        Matrix residual = -removed;
        residual.colwise() += y_std;
        Matrix draw = cov_part[at(m)] + weights[at(m)].transpose() * residual;
        removed += draw.topRows(n);
        out.groups[at(m)] = {z[at(m)], draw.bottomRows(z[at(m)].rows())};
    }
    return out;
}

GroupSampleSet sample_joint(const AdditiveGpModel& model, const Dataset& data, std::span<const Matrix> z,
                            Index count, RngStream& rng) {
    check_candidates(model, z);
    std::vector<Matrix> noise(z.size());
    for (Index m = model.num_groups() - 1; m >= 0; --m) {
        noise[at(m)] = standard_normal(data.size() + z[at(m)].rows(), std::max<Index>(count, 0), rng);
    }
    return sample_joint_from_noise(model, data, z, noise);
}

}  // namespace addbo
