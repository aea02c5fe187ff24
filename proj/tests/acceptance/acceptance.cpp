// Acceptance checks. Each criterion prints one PASS/FAIL line; the exit code
// is nonzero if any selected criterion fails.
#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdlib>
#include <functional>
#include <iostream>
#include <limits>
#include <sstream>
#include <string>
#include <thread>
#include <vector>

#include "addbo/acquisition.hpp"
#include "addbo/bench.hpp"
#include "addbo/sampling.hpp"
#include "test_support.hpp"

using namespace addbo;
using addbo::oracle::max_abs;

namespace {

using Clock = std::chrono::steady_clock;

struct Outcome {
    bool pass;
    std::string detail;
};

double seconds_since(Clock::time_point start) {
    return std::chrono::duration<double>(Clock::now() - start).count();
}

std::string fmt(double v) {
    std::ostringstream s;
    s.precision(3);
    s << v;
    return s.str();
}

struct Instance {
    AdditiveGpModel model;
    Dataset data;
    std::vector<Matrix> z;
};

/// P <= max_p, N <= max_n, M <= max_m, B_m <= max_b.
Instance bounded_instance(RngStream& rng, Index max_p, Index max_n, Index max_m, Index max_b) {
    while (true) {
        const Index p = 2 + static_cast<Index>(rng.below(static_cast<std::uint64_t>(max_p - 1)));
        const Index cap = 1 + static_cast<Index>(rng.below(3));
        AdditiveGpModel model = oracle::random_model(p, cap, rng, rng.normal(), 0.5 + rng.uniform());
        if (model.num_groups() > max_m) continue;
        const Index n = 1 + static_cast<Index>(rng.below(static_cast<std::uint64_t>(max_n)));
        Dataset data = oracle::random_data(n, p, rng);
        std::vector<Index> rows;
        for (Index m = 0; m < model.num_groups(); ++m)
            rows.push_back(1 + static_cast<Index>(rng.below(static_cast<std::uint64_t>(max_b))));
        auto z = oracle::random_candidates(model, rows, rng);
        return {std::move(model), std::move(data), std::move(z)};
    }
}

Matrix stack_values(const GroupSampleSet& s) {
    Index total = 0;
    for (const auto& g : s.groups) total += g.values.rows();
    Matrix out(total, s.count());
    Index row = 0;
    for (const auto& g : s.groups) {
        out.middleRows(row, g.values.rows()) = g.values;
        row += g.values.rows();
    }
    return out;
}

Outcome sampler_exactness() {
    const auto start = Clock::now();
    RngStream rng(1001);
    double worst_mean = 0.0, worst_cov = 0.0;
    for (int t = 0; t < 20; ++t) {
        const Instance inst = bounded_instance(rng, 8, 12, 4, 6);
        const JointPosteriorSpec spec = naive_joint_posterior(inst.model, inst.data, inst.z);
        const auto chain = oracle::joint_chain_moments(inst.model, inst.data, inst.z);
        worst_mean = std::max(worst_mean, max_abs(chain.mean - spec.mean));
        worst_cov = std::max(worst_cov, max_abs(chain.covariance - spec.covariance));
    }
    const double elapsed = seconds_since(start);
    return {worst_mean < 1e-8 && worst_cov < 1e-8 && elapsed < 10.0,
            "max mean error " + fmt(worst_mean) + ", max covariance error " + fmt(worst_cov) + ", " + fmt(elapsed) +
                " s"};
}

Outcome conditional_independence() {
    const auto start = Clock::now();
    RngStream rng(1002);
    double worst = 0.0;
    int checked = 0;
    while (checked < 20) {
        const Instance inst = bounded_instance(rng, 8, 12, 4, 6);
        const Index big_m = inst.model.num_groups();
        if (big_m < 2) continue;
        ++checked;
        const Index n = inst.data.size();
        const auto prior = oracle::augmented_prior(inst.model, inst.data, inst.z);
        const Vector y = inst.model.standardize(inst.data.y());
        // Condition on y - f_j(P_j X) for every j; every pair (i, j) must decouple.
        for (Index j = 0; j < big_m; ++j) {
            Matrix a = oracle::observation_map(prior, n);
            a.middleCols(prior.design_offset[static_cast<std::size_t>(j)], n) -= Matrix::Identity(n, n);
            const auto post = oracle::condition_linear(prior.covariance, a, y);
            const Index cj = prior.candidate_offset[static_cast<std::size_t>(j)];
            const Index bj = inst.z[static_cast<std::size_t>(j)].rows();
            for (Index i = 0; i < big_m; ++i) {
                if (i == j) continue;
                const Index ci = prior.candidate_offset[static_cast<std::size_t>(i)];
                const Index bi = inst.z[static_cast<std::size_t>(i)].rows();
                worst = std::max(worst, max_abs(post.covariance.block(ci, cj, bi, bj)));
            }
        }
        // Group i against all earlier groups, given y minus their design values.
        for (Index i = 1; i < big_m; ++i) {
            Matrix a = oracle::observation_map(prior, n);
            for (Index j = 0; j < i; ++j)
                a.middleCols(prior.design_offset[static_cast<std::size_t>(j)], n) -= Matrix::Identity(n, n);
            const auto post = oracle::condition_linear(prior.covariance, a, y);
            const Index ci = prior.candidate_offset[static_cast<std::size_t>(i)];
            const Index bi = inst.z[static_cast<std::size_t>(i)].rows();
            for (Index j = 0; j < i; ++j) {
                const Index cj = prior.candidate_offset[static_cast<std::size_t>(j)];
                const Index bj = inst.z[static_cast<std::size_t>(j)].rows();
                worst = std::max(worst, max_abs(post.covariance.block(ci, cj, bi, bj)));
            }
        }
    }
    const double elapsed = seconds_since(start);
    return {worst < 1e-8 && elapsed < 10.0, "max cross-block entry " + fmt(worst) + ", " + fmt(elapsed) + " s"};
}

Outcome bilateral_dropping() {
    RngStream rng(1003);
    double worst = 0.0;
    for (int t = 0; t < 10; ++t) {
        const Instance inst = bounded_instance(rng, 8, 12, 4, 6);
        const Index n = inst.data.size();
        const Matrix z = oracle::uniform_matrix(7, inst.model.dim(), rng);
        const Matrix kinv = (oracle::summed_kernel_oracle(inst.model, inst.data.x(), inst.data.x()) +
                             inst.model.noise_variance() * Matrix::Identity(n, n))
                                .partialPivLu()
                                .inverse();
        Matrix direct = Matrix::Zero(7, 7);
        for (Index m = 0; m < inst.model.num_groups(); ++m) {
            const Matrix pz = project(inst.model.structure(), m, z);
            const Matrix px = project(inst.model.structure(), m, inst.data.x());
            const Matrix kzx = oracle::group_kernel_oracle(inst.model.kernel(m), pz, px);
            direct += oracle::group_kernel_oracle(inst.model.kernel(m), pz, pz) - kzx * kinv * kzx.transpose();
        }
        const double scale2 = inst.model.y_scale() * inst.model.y_scale();
        const PredictiveGaussian additive = predict_additive(inst.model, inst.data, z);
        worst = std::max(worst, max_abs(additive.covariance / scale2 - direct));
    }
    return {worst < 1e-10, "max covariance error " + fmt(worst) + " (standardized units)"};
}

Outcome two_view_equivalence() {
    RngStream rng(1004);
    double worst = 0.0;
    for (int t = 0; t < 10; ++t) {
        const Instance inst = bounded_instance(rng, 8, 12, 4, 6);
        const Matrix z = oracle::uniform_matrix(7, inst.model.dim(), rng);
        const auto oracle = oracle::textbook_gp(
            oracle::summed_kernel_oracle(inst.model, inst.data.x(), inst.data.x()),
            oracle::summed_kernel_oracle(inst.model, z, inst.data.x()), oracle::summed_kernel_oracle(inst.model, z, z),
            inst.model.noise_variance(), inst.model.standardize(inst.data.y()));
        const PredictiveGaussian exact = predict_exact(inst.model, inst.data, z);
        const double shift = inst.model.y_shift(), scale = inst.model.y_scale();
        const Vector mean_std = (exact.mean.array() - shift) / scale;
        worst = std::max({worst, max_abs(mean_std - oracle.mean),
                          max_abs(exact.covariance / (scale * scale) - oracle.covariance)});
    }
    return {worst < 1e-10, "max deviation " + fmt(worst) + " (standardized units)"};
}

Outcome gradient_correctness() {
    const auto start = Clock::now();
    RngStream rng(1005);
    double worst = 0.0;
    for (int t = 0; t < 5; ++t) {
        AdditiveGpModel model = oracle::random_model(6, 3, rng);
        while (model.num_groups() != 3) model = oracle::random_model(6, 3, rng);
        const Dataset data = oracle::random_data(10, 6, rng);
        const Vector g = lml_gradient(model, data);
        const Vector theta = model.parameters();
        const double h = 1e-6;
        Vector fd(theta.size());
        for (Index i = 0; i < theta.size(); ++i) {
            Vector up = theta, down = theta;
            up(i) += h;
            down(i) -= h;
            fd(i) = (log_marginal_likelihood(model.with_parameters(up), data) -
                     log_marginal_likelihood(model.with_parameters(down), data)) /
                    (2.0 * h);
        }
        worst = std::max(worst, (g - fd).cwiseAbs().maxCoeff() / g.cwiseAbs().maxCoeff());
    }
    const double elapsed = seconds_since(start);
    return {worst < 1e-5 && elapsed < 5.0, "max relative error " + fmt(worst) + ", " + fmt(elapsed) + " s"};
}

Outcome monte_carlo_law() {
    const auto start = Clock::now();
    RngStream setup(1006);
    const AdditiveGpModel model(AdditiveStructure({{0}, {1, 2}, {3}}, 4),
                                {SubKernel(Vector::Constant(1, 0.4), 1.0), SubKernel(Vector::Constant(2, 0.6), 0.8),
                                 SubKernel(Vector::Constant(1, 0.3), 0.6)},
                                0.02);
    const Dataset data = oracle::random_data(6, 4, setup);
    // Candidates at the design points, where the posterior couples groups most.
    std::vector<Matrix> z;
    for (Index m = 0; m < 3; ++m) z.push_back(project(model.structure(), m, data.x().topRows(3)));
    const JointPosteriorSpec spec = naive_joint_posterior(model, data, z);

    const Index count = 200000;
    RngStream rng(1007);
    const Matrix draws = stack_values(sample_joint(model, data, z, count, rng));
    const Matrix centered = draws.colwise() - spec.mean;
    const Matrix sample = centered * centered.transpose() / static_cast<double>(count);
    double worst_z = 0.0;
    for (Index i = 0; i < sample.rows(); ++i)
        for (Index j = 0; j < sample.cols(); ++j) {
            const Matrix& c = spec.covariance;
            const double se = std::sqrt((c(i, i) * c(j, j) + c(i, j) * c(i, j)) / static_cast<double>(count));
            worst_z = std::max(worst_z, std::abs(sample(i, j) - c(i, j)) / se);
        }

    RngStream rng2(1008);
    const Matrix marg = stack_values(sample_marginal(model, data, z, count, rng2));
    const Matrix mc = marg.colwise() - marg.rowwise().mean();
    const Matrix mcov = mc * mc.transpose() / static_cast<double>(count);
    double worst_r = 0.0, true_r = 0.0;
    for (Index a = 0; a < 3; ++a)
        for (Index b = a + 1; b < 3; ++b)
            for (Index i = 0; i < spec.group_size(a); ++i)
                for (Index j = 0; j < spec.group_size(b); ++j) {
                    const Index r = spec.offsets[static_cast<std::size_t>(a)] + i;
                    const Index c = spec.offsets[static_cast<std::size_t>(b)] + j;
                    worst_r = std::max(worst_r, std::abs(mcov(r, c) / std::sqrt(mcov(r, r) * mcov(c, c))));
                    true_r = std::max(true_r, std::abs(spec.covariance(r, c) /
                                                       std::sqrt(spec.covariance(r, r) * spec.covariance(c, c))));
                }
    const double elapsed = seconds_since(start);
    return {worst_z < 5.0 && worst_r < 0.02 && elapsed < 60.0,
            "joint worst |z| " + fmt(worst_z) + " SE, marginal max |r| " + fmt(worst_r) + " (posterior max |r| " +
                fmt(true_r) + "), " + fmt(elapsed) + " s"};
}

/// Mean time per call for each entry of `calls`, as the minimum over
/// repeated windows. Calls are measured round-robin so slow periods on a
/// shared machine hit every entry alike.
std::vector<double> time_calls(const std::vector<std::function<void()>>& calls) {
    std::vector<double> best(calls.size(), std::numeric_limits<double>::infinity());
    for (const auto& call : calls) call();
    for (int rep = 0; rep < 15; ++rep) {
        for (std::size_t i = 0; i < calls.size(); ++i) {
            int count = 0;
            const auto start = Clock::now();
            do {
                calls[i]();
                ++count;
            } while (seconds_since(start) < 0.2);
            best[i] = std::min(best[i], seconds_since(start) / count);
        }
    }
    return best;
}

double loglog_slope(const std::vector<double>& x, const std::vector<double>& y) {
    const std::size_t n = x.size();
    double mx = 0.0, my = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
        mx += std::log(x[i]) / static_cast<double>(n);
        my += std::log(y[i]) / static_cast<double>(n);
    }
    double sxy = 0.0, sxx = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
        sxy += (std::log(x[i]) - mx) * (std::log(y[i]) - my);
        sxx += (std::log(x[i]) - mx) * (std::log(x[i]) - mx);
    }
    return sxy / sxx;
}

constexpr Index kGroupDim = 3;

Outcome scaling() {
    const auto start = Clock::now();
    const Index n = 50, b = 64, count = 8;
    auto setup = [&](Index big_m) {
        RngStream rng(2000 + static_cast<std::uint64_t>(big_m));
        std::vector<SubKernel> kernels;
        std::vector<Group> groups;
        for (Index m = 0; m < big_m; ++m) {
            kernels.emplace_back(Vector::Constant(kGroupDim, 0.5), 1.0 / static_cast<double>(big_m));
            Group g;
            for (Index j = 0; j < kGroupDim; ++j) g.push_back(kGroupDim * m + j);
            groups.push_back(std::move(g));
        }
        AdditiveGpModel model(AdditiveStructure(std::move(groups), kGroupDim * big_m), std::move(kernels), 0.01);
        Dataset data = oracle::random_data(n, kGroupDim * big_m, rng);
        auto z = oracle::random_candidates(model, std::vector<Index>(static_cast<std::size_t>(big_m), b), rng);
        return Instance{std::move(model), std::move(data), std::move(z)};
    };
    const std::vector<Index> joint_sizes{2, 4, 8, 16, 32}, naive_sizes{2, 4, 8, 16};
    std::vector<Instance> instances;
    for (Index big_m : joint_sizes) instances.push_back(setup(big_m));
    RngStream rng(7);
    std::vector<std::function<void()>> joint_calls, naive_calls;
    for (std::size_t i = 0; i < joint_sizes.size(); ++i) {
        const Instance& inst = instances[i];
        joint_calls.emplace_back([&] { (void)sample_joint(inst.model, inst.data, inst.z, count, rng); });
        if (i < naive_sizes.size())
            naive_calls.emplace_back([&] { (void)sample_naive(inst.model, inst.data, inst.z, count, rng); });
    }
    const std::vector<double> joint_t = time_calls(joint_calls);
    const std::vector<double> naive_t = time_calls(naive_calls);
    std::vector<double> joint_m(joint_sizes.begin(), joint_sizes.end()), naive_m(naive_sizes.begin(), naive_sizes.end());
    std::string detail = "joint:";
    for (std::size_t i = 0; i < joint_t.size(); ++i)
        detail += " M=" + std::to_string(joint_sizes[i]) + ":" + fmt(joint_t[i] * 1e3) + "ms";
    detail += "; naive:";
    for (std::size_t i = 0; i < naive_t.size(); ++i)
        detail += " M=" + std::to_string(naive_sizes[i]) + ":" + fmt(naive_t[i] * 1e3) + "ms";
    const double joint_slope = loglog_slope(joint_m, joint_t);
    const double naive_slope = loglog_slope(naive_m, naive_t);
    const double elapsed = seconds_since(start);
    return {joint_slope >= 0.8 && joint_slope <= 1.6 && naive_slope >= 2.3 && elapsed < 300.0,
            "joint slope " + fmt(joint_slope) + ", naive slope " + fmt(naive_slope) + ", " + fmt(elapsed) + " s (" +
                detail + ")"};
}

Outcome acquisition_correctness() {
    RngStream rng(1009);
    int mismatches = 0, trials = 0;
    while (trials < 20) {
        const Index p = 2 + static_cast<Index>(rng.below(7));
        AdditiveGpModel model = oracle::random_model(p, 2, rng);
        if (model.num_groups() > 4) continue;
        ++trials;
        const Dataset data = oracle::random_data(4 + static_cast<Index>(rng.below(8)), p, rng);
        const Index b = 4;
        const Matrix candidates = oracle::uniform_matrix(b, p, rng);
        const auto sampler = trials % 2 == 0 ? SubfunctionSampler::joint : SubfunctionSampler::marginal;
        std::vector<RngStream> streams{rng.split(static_cast<std::uint64_t>(trials))};
        const Matrix chosen = ts_select(model, data, sampler, candidates, streams);

        // Replay the column's draws, then enumerate every product-grid point.
        std::vector<Matrix> z, noise;
        const Index big_m = model.num_groups();
        for (Index m = 0; m < big_m; ++m) {
            z.push_back(project(model.structure(), m, candidates));
            noise.emplace_back(noise_rows(sampler, data, z.back()), 1);
        }
        RngStream s = streams[0];
        for (Index i = 0; i < big_m; ++i) {
            const Index m = sampler == SubfunctionSampler::joint ? big_m - 1 - i : i;
            for (Index r = 0; r < noise[static_cast<std::size_t>(m)].rows(); ++r)
                noise[static_cast<std::size_t>(m)](r, 0) = s.normal();
        }
        const GroupSampleSet samples = sampler == SubfunctionSampler::joint
                                           ? sample_joint_from_noise(model, data, z, noise)
                                           : sample_marginal_from_noise(model, data, z, noise);
        Index total = 1;
        for (Index m = 0; m < big_m; ++m) total *= b;
        double best = std::numeric_limits<double>::infinity();
        Index best_code = 0;
        for (Index code = 0; code < total; ++code) {
            double v = 0.0;
            Index rest = code;
            for (Index m = 0; m < big_m; ++m, rest /= b) v += samples.groups[static_cast<std::size_t>(m)].values(rest % b, 0);
            if (v < best) {
                best = v;
                best_code = code;
            }
        }
        Vector expected(p);
        Index rest = best_code;
        for (Index m = 0; m < big_m; ++m, rest /= b)
            for (Index c : model.structure().group(m)) expected(c) = candidates(rest % b, c);
        if (!(chosen.row(0).transpose() == expected)) ++mismatches;
    }
    return {mismatches == 0, std::to_string(mismatches) + " mismatches in 20 trials"};
}

Outcome desk_reproduction() {
    const auto start = Clock::now();
    ExperimentConfig config;
    config.function = FunctionKind::ackley;
    config.dim = 5;
    config.batch_size = 1;
    config.init_count = 20;
    config.total_acquisitions = 100;
    config.replicates = 10;
    config.base_seed = 2024;
    config.record_timing = false;
    config.threads = std::max(1u, std::thread::hardware_concurrency());
    const double optimum = known_optimum(config.function, config.dim);
    const Index last = config.init_count + config.total_acquisitions - 1;

    std::vector<double> medians, iqrs;
    double initial_median = 0.0;
    std::string detail;
    for (Method method : {Method::ts, Method::ats}) {
        config.method = method;
        const auto records = run_experiment(config);
        const auto final_gaps = gaps_at(records, to_string(method), last, optimum);
        const auto init_gaps = gaps_at(records, to_string(method), config.init_count - 1, optimum);
        initial_median = quantile(init_gaps, 0.5);
        medians.push_back(quantile(final_gaps, 0.5));
        iqrs.push_back(quantile(final_gaps, 0.75) - quantile(final_gaps, 0.25));
        detail += to_string(method) + " median " + fmt(medians.back()) + " IQR " + fmt(iqrs.back()) + "; ";
    }
    const double larger_iqr = medians[0] >= medians[1] ? iqrs[0] : iqrs[1];
    const bool close = std::abs(medians[0] - medians[1]) < larger_iqr;
    const bool improved = initial_median - medians[0] >= 0.5 && initial_median - medians[1] >= 0.5;
    const double elapsed = seconds_since(start);
    return {close && improved && elapsed < 1800.0,
            detail + "initial-design median " + fmt(initial_median) + ", " + fmt(elapsed) + " s"};
}

Outcome determinism() {
    ExperimentConfig config;
    config.function = FunctionKind::ackley;
    config.dim = 4;
    config.init_count = 10;
    config.total_acquisitions = 10;
    config.candidate_count = 100;
    config.refit_every = 5;
    config.max_group_dim = 2;
    config.replicates = 4;
    config.base_seed = 99;
    config.fit_steps = 100;
    config.record_timing = false;
    auto csv = [&](unsigned threads) {
        config.threads = threads;
        std::ostringstream out;
        write_csv(out, run_experiment(config), config.dim);
        return out.str();
    };
    const std::string serial = csv(1);
    const std::string again = csv(1);
    const std::string concurrent = csv(4);
    return {serial == again && serial == concurrent && !serial.empty(),
            "serial rerun " + std::string(serial == again ? "identical" : "differs") + ", 4 workers " +
                (serial == concurrent ? "identical" : "differs") + " (" + std::to_string(serial.size()) + " bytes)"};
}

struct Criterion {
    const char* name;
    Outcome (*run)();
};

const Criterion kCriteria[] = {
    {"sampler exactness", sampler_exactness},
    {"conditional independence", conditional_independence},
    {"bilateral-dropping identity", bilateral_dropping},
    {"two-view equivalence", two_view_equivalence},
    {"gradient correctness", gradient_correctness},
    {"Monte Carlo law", monte_carlo_law},
    {"scaling", scaling},
    {"acquisition correctness", acquisition_correctness},
    {"desk-scale reproduction", desk_reproduction},
    {"determinism", determinism},
};

}  // namespace

int main(int argc, char** argv) {
    int only = 0;
    for (int i = 1; i < argc; ++i) {
        const std::string arg = argv[i];
        if (arg == "--only" && i + 1 < argc) {
            only = std::atoi(argv[++i]);
        } else {
            std::cerr << "usage: acceptance [--only N]\n";
            return 2;
        }
    }
    const int total = static_cast<int>(std::size(kCriteria));
    if (only < 0 || only > total) {
        std::cerr << "criterion must be between 1 and " << total << "\n";
        return 2;
    }
    bool all_pass = true;
    for (int i = 1; i <= total; ++i) {
        if (only != 0 && i != only) continue;
        Outcome outcome{false, ""};
        try {
            outcome = kCriteria[i - 1].run();
        } catch (const std::exception& e) {
            outcome = {false, std::string("exception: ") + e.what()};
        }
        all_pass = all_pass && outcome.pass;
        std::cout << "criterion " << i << " (" << kCriteria[i - 1].name << "): " << (outcome.pass ? "PASS" : "FAIL")
                  << " | " << outcome.detail << std::endl;
    }
    return all_pass ? 0 : 1;
}
