#include "addbo/model.hpp"

#include <cmath>
#include <limits>
#include <numbers>
#include <string>

#include "addbo/errors.hpp"

namespace addbo {

namespace {

constexpr double kUnitCubeSlack = 1e-12;

void check_columns(const AdditiveGpModel& model, const MatrixRef& x, const char* where) {
    if (x.cols() != model.dim()) {
        throw ShapeError(std::string(where) + ": input has " + std::to_string(x.cols()) +
                         " columns, model dimension is " + std::to_string(model.dim()));
    }
}

void check_data(const AdditiveGpModel& model, const Dataset& data, const char* where) {
    if (data.dim() != model.dim()) {
        throw ShapeError(std::string(where) + ": dataset dimension " + std::to_string(data.dim()) +
                         " does not match model dimension " + std::to_string(model.dim()));
    }
}

PredictiveGaussian destandardize(const AdditiveGpModel& model, Vector mean_std, const Matrix& cov_std) {
    PredictiveGaussian out;
    out.mean = (model.y_scale() * mean_std.array() + model.y_shift()).matrix();
    out.covariance = (model.y_scale() * model.y_scale()) * symmetrize(cov_std);
    return out;
}

}  // namespace

// ---------------------------------------------------------------------------
// Dataset

Dataset::Dataset(Matrix x, Vector y) : x_(std::move(x)), y_(std::move(y)) {
    if (x_.rows() != y_.size()) {
        throw ShapeError("Dataset: " + std::to_string(x_.rows()) + " design rows but " + std::to_string(y_.size()) +
                         " responses");
    }
    if (x_.size() > 0 && (x_.minCoeff() < -kUnitCubeSlack || x_.maxCoeff() > 1.0 + kUnitCubeSlack)) {
        throw PreconditionError("Dataset: design points must lie in the unit cube");
    }
}

Dataset Dataset::appended(const MatrixRef& x, const VectorRef& y) const {
    if (x.cols() != dim() || x.rows() != y.size()) {
        throw ShapeError("Dataset::appended: shape mismatch");
    }
    Matrix nx(size() + x.rows(), dim());
    nx << x_, x;
    Vector ny(size() + y.size());
    ny << y_, y;
    return Dataset(std::move(nx), std::move(ny));
}

// ---------------------------------------------------------------------------
// AdditiveGpModel

AdditiveGpModel::AdditiveGpModel(AdditiveStructure structure, std::vector<SubKernel> kernels, double noise_variance,
                                 double y_shift, double y_scale)
    : structure_(std::move(structure)),
      kernels_(std::move(kernels)),
      noise_variance_(noise_variance),
      y_shift_(y_shift),
      y_scale_(y_scale) {
    if (static_cast<Index>(kernels_.size()) != structure_.num_groups()) {
        throw ShapeError("AdditiveGpModel: " + std::to_string(kernels_.size()) + " kernels for " +
                         std::to_string(structure_.num_groups()) + " groups");
    }
    for (Index m = 0; m < structure_.num_groups(); ++m) {
        if (kernels_[static_cast<std::size_t>(m)].dim() != structure_.group_dim(m)) {
            throw ShapeError("AdditiveGpModel: kernel " + std::to_string(m) + " dimension does not match its group");
        }
    }
    if (!(noise_variance_ >= kNoiseFloor) || !std::isfinite(noise_variance_)) {
        throw PreconditionError("AdditiveGpModel: noise variance must be finite and at least 1e-6");
    }
    if (!(y_scale_ > 0.0) || !std::isfinite(y_scale_) || !std::isfinite(y_shift_)) {
        throw PreconditionError("AdditiveGpModel: standardization scale must be positive and finite");
    }
}

AdditiveGpModel AdditiveGpModel::with_defaults(AdditiveStructure structure, const Dataset& data) {
    if (data.dim() != structure.dim()) {
        throw ShapeError("AdditiveGpModel::with_defaults: dataset dimension does not match structure");
    }
    const Index num_groups = structure.num_groups();
    std::vector<SubKernel> kernels;
    kernels.reserve(static_cast<std::size_t>(num_groups));
    for (Index m = 0; m < num_groups; ++m) {
        const Index d = structure.group_dim(m);
        kernels.emplace_back(Vector::Constant(d, 0.5 * std::sqrt(static_cast<double>(d))),
                             1.0 / static_cast<double>(num_groups));
    }
    double shift = 0.0;
    double scale = 1.0;
    const Index n = data.size();
    if (n >= 1) {
        shift = data.y().mean();
    }
    if (n >= 2) {
        const double var = (data.y().array() - shift).square().sum() / static_cast<double>(n - 1);
        if (var > 0.0 && std::isfinite(var)) {
            scale = std::sqrt(var);
        }
    }
    return AdditiveGpModel(std::move(structure), std::move(kernels), 1e-2, shift, scale);
}

const SubKernel& AdditiveGpModel::kernel(Index m) const {
    if (m < 0 || m >= num_groups()) {
        throw ShapeError("kernel index " + std::to_string(m) + " out of range");
    }
    return kernels_[static_cast<std::size_t>(m)];
}

double AdditiveGpModel::prior_variance() const {
    double total = 0.0;
    for (const auto& k : kernels_) {
        total += k.signal_variance();
    }
    return total;
}

Vector AdditiveGpModel::standardize(const VectorRef& y) const {
    return ((y.array() - y_shift_) / y_scale_).matrix();
}

Index AdditiveGpModel::num_parameters() const {
    Index total = 1;
    for (const auto& k : kernels_) {
        total += k.num_params();
    }
    return total;
}

Vector AdditiveGpModel::parameters() const {
    Vector out(num_parameters());
    Index offset = 0;
    for (const auto& k : kernels_) {
        out.segment(offset, k.num_params()) = k.log_params();
        offset += k.num_params();
    }
    out(offset) = std::log(noise_variance_);
    return out;
}

AdditiveGpModel AdditiveGpModel::with_parameters(const VectorRef& params) const {
    if (params.size() != num_parameters()) {
        throw ShapeError("with_parameters: expected " + std::to_string(num_parameters()) + " parameters");
    }
    std::vector<SubKernel> kernels;
    kernels.reserve(kernels_.size());
    Index offset = 0;
    for (const auto& k : kernels_) {
        kernels.push_back(SubKernel::from_log_params(params.segment(offset, k.num_params())));
        offset += k.num_params();
    }
    const double noise = std::max(kNoiseFloor, std::exp(params(offset)));
    return AdditiveGpModel(structure_, std::move(kernels), noise, y_shift_, y_scale_);
}

// ---------------------------------------------------------------------------
// Posterior computations

TrainingCache make_training_cache(const AdditiveGpModel& model, const Dataset& data) {
    check_data(model, data, "make_training_cache");
    TrainingCache cache;
    const Index n = data.size();
    Matrix total = Matrix::Zero(n, n);
    for (Index m = 0; m < model.num_groups(); ++m) {
        Matrix px = project(model.structure(), m, data.x());
        Matrix gram = cross_cov(model.kernel(m), px, px);
        total += gram;
        cache.projected.push_back(std::move(px));
        cache.grams.push_back(std::move(gram));
    }
    total.diagonal().array() += model.noise_variance();
    cache.factor = factor_psd(total);
    cache.y_std = model.standardize(data.y());
    cache.alpha = solve_with_factor(cache.factor, cache.y_std);
    return cache;
}

Matrix summed_cov(const AdditiveGpModel& model, const MatrixRef& a, const MatrixRef& b) {
    check_columns(model, a, "summed_cov");
    check_columns(model, b, "summed_cov");
    Matrix out = Matrix::Zero(a.rows(), b.rows());
    for (Index m = 0; m < model.num_groups(); ++m) {
        out += cross_cov(model.kernel(m), project(model.structure(), m, a), project(model.structure(), m, b));
    }
    return out;
}

PsdFactor train_gram(const AdditiveGpModel& model, const Dataset& data) {
    return make_training_cache(model, data).factor;
}

PredictiveGaussian predict_exact(const AdditiveGpModel& model, const Dataset& data, const MatrixRef& x_new) {
    check_columns(model, x_new, "predict_exact");
    const TrainingCache cache = make_training_cache(model, data);
    const Matrix k_new_train = summed_cov(model, x_new, data.x());
    const Matrix v = half_solve(cache.factor, k_new_train.transpose());
    Matrix cov = summed_cov(model, x_new, x_new) - v.transpose() * v;
    return destandardize(model, k_new_train * cache.alpha, cov);
}

PredictiveGaussian predict_additive(const AdditiveGpModel& model, const Dataset& data, const MatrixRef& x_new) {
    check_columns(model, x_new, "predict_additive");
    const TrainingCache cache = make_training_cache(model, data);
    Vector mean = Vector::Zero(x_new.rows());
    Matrix cov = Matrix::Zero(x_new.rows(), x_new.rows());
    for (Index m = 0; m < model.num_groups(); ++m) {
        const Matrix z = project(model.structure(), m, x_new);
        const Matrix k_train_new = cross_cov(model.kernel(m), cache.projected[static_cast<std::size_t>(m)], z);
        const Matrix v = half_solve(cache.factor, k_train_new);
        mean += k_train_new.transpose() * cache.alpha;
        cov += cross_cov(model.kernel(m), z, z) - v.transpose() * v;
    }
    return destandardize(model, std::move(mean), cov);
}

PredictiveGaussian subfunction_marginal(const AdditiveGpModel& model, const Dataset& data, Index m,
                                        const MatrixRef& z_m) {
    const SubKernel& k = model.kernel(m);
    const TrainingCache cache = make_training_cache(model, data);
    const Matrix k_train_z = cross_cov(k, cache.projected[static_cast<std::size_t>(m)], z_m);
    const Matrix v = half_solve(cache.factor, k_train_z);
    PredictiveGaussian out;
    out.mean = k_train_z.transpose() * cache.alpha;
    out.covariance = symmetrize(cross_cov(k, z_m, z_m) - v.transpose() * v);
    return out;
}

MarginalMoments subfunction_marginal_moments(const AdditiveGpModel& model, const TrainingCache& cache, Index m,
                                             const MatrixRef& z_m) {
    const SubKernel& k = model.kernel(m);
    const Matrix k_train_z = cross_cov(k, cache.projected[static_cast<std::size_t>(m)], z_m);
    const Matrix v = half_solve(cache.factor, k_train_z);
    MarginalMoments out;
    out.mean = k_train_z.transpose() * cache.alpha;
    out.variance = (k.signal_variance() - v.colwise().squaredNorm().transpose().array()).max(0.0).matrix();
    return out;
}

// ---------------------------------------------------------------------------
// Marginal likelihood

namespace {

double lml_from_cache(const TrainingCache& cache) {
    const auto n = static_cast<double>(cache.y_std.size());
    return -0.5 * (cache.y_std.dot(cache.alpha) + cache.factor.log_det() + n * std::log(2.0 * std::numbers::pi));
}

Vector gradient_from_cache(const AdditiveGpModel& model, const TrainingCache& cache) {
    const Index n = cache.y_std.size();
    // W = alpha alpha^T - K^-1; dL/dtheta = 1/2 sum_ij W_ij dK_ij.
    Matrix w = cache.alpha * cache.alpha.transpose() - solve_with_factor(cache.factor, Matrix(Matrix::Identity(n, n)));
    Vector grad(model.num_parameters());
    Index offset = 0;
    for (Index m = 0; m < model.num_groups(); ++m) {
        const auto dk = cross_cov_param_grad(model.kernel(m), cache.projected[static_cast<std::size_t>(m)]);
        for (const auto& d : dk) {
            grad(offset++) = 0.5 * w.cwiseProduct(d).sum();
        }
    }
    grad(offset) = 0.5 * model.noise_variance() * w.trace();
    return grad;
}

void require_data(const Dataset& data, const char* where) {
    if (data.size() < 1) {
        throw PreconditionError(std::string(where) + ": at least one observation is required");
    }
}

}  // namespace

double log_marginal_likelihood(const AdditiveGpModel& model, const Dataset& data) {
    require_data(data, "log_marginal_likelihood");
    return lml_from_cache(make_training_cache(model, data));
}

Vector lml_gradient(const AdditiveGpModel& model, const Dataset& data) {
    require_data(data, "lml_gradient");
    return gradient_from_cache(model, make_training_cache(model, data));
}

FitResult fit(const AdditiveGpModel& model, const Dataset& data, const FitOptions& options) {
    if (data.size() < 2) {
        throw PreconditionError("fit: at least two observations are required");
    }
    double initial = -std::numeric_limits<double>::infinity();
    try {
        initial = log_marginal_likelihood(model, data);
    } catch (const SingularityError&) {
    }
    if (!std::isfinite(initial)) {
        throw InitializationError("fit: log marginal likelihood is not finite at the initial parameters");
    }

    const double log_floor = std::log(AdditiveGpModel::kNoiseFloor);
    const Index noise_index = model.num_parameters() - 1;
    Vector theta = model.parameters();
    Vector first = Vector::Zero(theta.size());
    Vector second = Vector::Zero(theta.size());
    AdditiveGpModel current = model;
    AdditiveGpModel best = model;
    double best_lml = initial;

    for (int step = 1; step <= options.steps; ++step) {
        Vector grad;
        try {
            const TrainingCache cache = make_training_cache(current, data);
            const double lml = lml_from_cache(cache);
            grad = gradient_from_cache(current, cache);
            if (!std::isfinite(lml) || !grad.allFinite()) {
                break;
            }
            if (lml > best_lml) {
                best_lml = lml;
                best = current;
            }
        } catch (const SingularityError&) {
            break;
        }
        first = options.beta1 * first + (1.0 - options.beta1) * grad;
        second = options.beta2 * second + (1.0 - options.beta2) * grad.cwiseAbs2();
        const double c1 = 1.0 - std::pow(options.beta1, step);
        const double c2 = 1.0 - std::pow(options.beta2, step);
        theta.array() += options.step_size * (first.array() / c1) / ((second.array() / c2).sqrt() + options.epsilon);
        theta(noise_index) = std::max(theta(noise_index), log_floor);
        current = current.with_parameters(theta);
    }
    // The final iterate has not been scored yet.
    try {
        const double lml = log_marginal_likelihood(current, data);
        if (std::isfinite(lml) && lml > best_lml) {
            best_lml = lml;
            best = current;
        }
    } catch (const SingularityError&) {
    }
    return FitResult{std::move(best), initial, best_lml};
}

// ---------------------------------------------------------------------------
// JSON

nlohmann::json model_to_json(const AdditiveGpModel& model) {
    nlohmann::json kernels = nlohmann::json::array();
    for (const auto& k : model.kernels()) {
        kernels.push_back({{"lengthscales", std::vector<double>(k.lengthscales().begin(), k.lengthscales().end())},
                           {"signal_variance", k.signal_variance()}});
    }
    return {{"dim", model.dim()},
            {"structure", structure_to_json(model.structure())},
            {"kernels", std::move(kernels)},
            {"noise_variance", model.noise_variance()},
            {"y_shift", model.y_shift()},
            {"y_scale", model.y_scale()}};
}

AdditiveGpModel model_from_json(const nlohmann::json& j) {
    const auto p = j.at("dim").get<Index>();
    AdditiveStructure structure = structure_from_json(j.at("structure"), p);
    std::vector<SubKernel> kernels;
    for (const auto& k : j.at("kernels")) {
        const auto ell = k.at("lengthscales").get<std::vector<double>>();
        kernels.emplace_back(Eigen::Map<const Vector>(ell.data(), static_cast<Index>(ell.size())),
                             k.at("signal_variance").get<double>());
    }
    return AdditiveGpModel(std::move(structure), std::move(kernels), j.at("noise_variance").get<double>(),
                           j.at("y_shift").get<double>(), j.at("y_scale").get<double>());
}

}  // namespace addbo
