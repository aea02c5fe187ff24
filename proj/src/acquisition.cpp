#include "addbo/acquisition.hpp"

#include <cmath>
#include <vector>

#include "addbo/errors.hpp"

namespace addbo {

std::string to_string(Method method) {
    switch (method) {
        case Method::ts: return "ts";
        case Method::ats: return "ats";
        case Method::alcb: return "alcb";
    }
    return "unknown";
}

Method parse_method(std::string_view name) {
    if (name == "ts") return Method::ts;
    if (name == "ats") return Method::ats;
    if (name == "alcb") return Method::alcb;
    throw ConfigError("unknown method '" + std::string(name) + "' (expected ts|ats|alcb)");
}

void AcquisitionRequest::validate() const {
    if (batch_size < 1) throw ConfigError("batch size must be at least 1");
    if (candidate_count < 1) throw ConfigError("candidate count must be at least 1");
    if (!(beta >= 0.0) || !std::isfinite(beta)) throw ConfigError("beta must be finite and non-negative");
}

Matrix candidate_grid(Index p, Index count, RngStream& rng) {
    if (count < 1 || p < 1) {
        throw PreconditionError("candidate_grid: count and dimension must be at least 1");
    }
    Matrix out(count, p);
    for (Index r = 0; r < count; ++r) {
        for (Index c = 0; c < p; ++c) {
            out(r, c) = rng.uniform();
        }
    }
    return out;
}

Index argmin_first(const VectorRef& values) {
    Index best = 0;
    for (Index i = 1; i < values.size(); ++i) {
        if (values(i) < values(best)) {
            best = i;
        }
    }
    return best;
}

Matrix assemble_minimizers(const AdditiveStructure& structure, const GroupSampleSet& samples) {
    const Index count = samples.count();
    Matrix out(count, structure.dim());
    for (Index m = 0; m < structure.num_groups(); ++m) {
        const auto& g = structure.group(m);
        const GroupSamples& gs = samples.groups[static_cast<std::size_t>(m)];
        for (Index col = 0; col < count; ++col) {
            const Index row = argmin_first(gs.values.col(col));
            for (std::size_t j = 0; j < g.size(); ++j) {
                out(col, g[j]) = gs.candidates(row, static_cast<Index>(j));
            }
        }
    }
    return out;
}

namespace {

std::vector<Matrix> project_all(const AdditiveStructure& s, const MatrixRef& candidates) {
    std::vector<Matrix> z;
    for (Index m = 0; m < s.num_groups(); ++m) {
        z.push_back(project(s, m, candidates));
    }
    return z;
}

}  // namespace

Matrix ts_select(const AdditiveGpModel& model, const Dataset& data, SubfunctionSampler sampler,
                 const MatrixRef& candidates, std::span<const RngStream> column_streams) {
    if (candidates.rows() < 1) {
        throw PreconditionError("ts_select: candidate set is empty");
    }
    if (sampler == SubfunctionSampler::naive) {
        throw PreconditionError("ts_select: sampler must be joint or marginal");
    }
    const auto z = project_all(model.structure(), candidates);
    const auto count = static_cast<Index>(column_streams.size());
    const Index num_groups = model.num_groups();

    std::vector<Matrix> noise;
    for (const auto& zm : z) {
        noise.emplace_back(noise_rows(sampler, data, zm), count);
    }
    // Per column, groups are visited in the order the sampler would consume them.
    for (Index col = 0; col < count; ++col) {
        RngStream stream = column_streams[static_cast<std::size_t>(col)];
        for (Index i = 0; i < num_groups; ++i) {
            const Index m = sampler == SubfunctionSampler::joint ? num_groups - 1 - i : i;
            Matrix& target = noise[static_cast<std::size_t>(m)];
            for (Index r = 0; r < target.rows(); ++r) {
                target(r, col) = stream.normal();
            }
        }
    }
    const GroupSampleSet samples = sampler == SubfunctionSampler::joint
                                       ? sample_joint_from_noise(model, data, z, noise)
                                       : sample_marginal_from_noise(model, data, z, noise);
    return assemble_minimizers(model.structure(), samples);
}

Matrix ts_select(const AdditiveGpModel& model, const Dataset& data, SubfunctionSampler sampler,
                 const MatrixRef& candidates, Index batch_size, const RngStream& rng) {
    if (batch_size < 1) {
        throw PreconditionError("ts_select: batch size must be at least 1");
    }
    std::vector<RngStream> streams;
    for (Index b = 0; b < batch_size; ++b) {
        streams.push_back(rng.split(static_cast<std::uint64_t>(b)));
    }
    return ts_select(model, data, sampler, candidates, streams);
}

Matrix alcb_select(const AdditiveGpModel& model, const Dataset& data, const MatrixRef& candidates, double beta,
                   Index batch_size) {
    if (candidates.rows() < 1) {
        throw PreconditionError("alcb_select: candidate set is empty");
    }
    if (!(beta >= 0.0)) {
        throw PreconditionError("alcb_select: beta must be non-negative");
    }
    if (batch_size < 1) {
        throw PreconditionError("alcb_select: batch size must be at least 1");
    }
    const auto z = project_all(model.structure(), candidates);
    Matrix chosen(batch_size, model.dim());
    Dataset working = data;
    for (Index b = 0; b < batch_size; ++b) {
        const TrainingCache cache = make_training_cache(model, working);
        for (Index m = 0; m < model.num_groups(); ++m) {
            const MarginalMoments moments = subfunction_marginal_moments(model, cache, m, z[static_cast<std::size_t>(m)]);
            const Vector score = moments.mean - beta * moments.variance.cwiseSqrt();
            const Index row = argmin_first(score);
            const auto& g = model.structure().group(m);
            for (std::size_t j = 0; j < g.size(); ++j) {
                chosen(b, g[j]) = z[static_cast<std::size_t>(m)](row, static_cast<Index>(j));
            }
        }
        if (b + 1 < batch_size) {
            const Matrix point = chosen.row(b);
            const PredictiveGaussian pred = predict_exact(model, working, point);
            working = working.appended(point, pred.mean);
        }
    }
    return chosen;
}

Matrix acquire(const AdditiveGpModel& model, const Dataset& data, const AcquisitionRequest& request,
               const RngStream& rng) {
    request.validate();
    RngStream grid_stream = rng.split(0);
    const Matrix candidates = candidate_grid(model.dim(), request.candidate_count, grid_stream);
    switch (request.method) {
        case Method::ts:
            return ts_select(model, data, SubfunctionSampler::joint, candidates, request.batch_size, rng.split(1));
        case Method::ats:
            return ts_select(model, data, SubfunctionSampler::marginal, candidates, request.batch_size, rng.split(1));
        case Method::alcb:
            return alcb_select(model, data, candidates, request.beta, request.batch_size);
    }
    throw ConfigError("unknown method");
}

}  // namespace addbo
