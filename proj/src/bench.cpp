#include "addbo/bench.hpp"

#include <algorithm>
#include <atomic>
#include <charconv>
#include <chrono>
#include <cmath>
#include <istream>
#include <limits>
#include <map>
#include <ostream>
#include <sstream>
#include <thread>

#include "addbo/errors.hpp"

namespace addbo {

// ---------------------------------------------------------------------------
// Configuration

void ExperimentConfig::validate() const {
    if (dim < 1) throw ConfigError("dim must be at least 1");
    if (batch_size < 1) throw ConfigError("batch size must be at least 1");
    if (init_count < 2) throw ConfigError("init count must be at least 2");
    if (total_acquisitions < 1) throw ConfigError("acquisitions must be at least 1");
    if (total_acquisitions % batch_size != 0) {
        throw ConfigError("acquisitions (" + std::to_string(total_acquisitions) + ") must be divisible by batch size (" +
                          std::to_string(batch_size) + ")");
    }
    if (candidate_count < 1) throw ConfigError("candidate count must be at least 1");
    if (refit_every < 1) throw ConfigError("refit interval must be at least 1");
    if (max_group_dim < 1) throw ConfigError("max group dim must be at least 1");
    if (replicates < 1) throw ConfigError("replicates must be at least 1");
    if (fit_steps < 0) throw ConfigError("fit steps must be non-negative");
    if (!(fit_step_size > 0.0)) throw ConfigError("fit step size must be positive");
    if (!(beta >= 0.0)) throw ConfigError("beta must be non-negative");
    if (threads < 1) throw ConfigError("threads must be at least 1");
}

ExperimentConfig config_from_json(const nlohmann::json& j) {
    ExperimentConfig c;
    try {
        if (j.contains("function")) c.function = parse_function_kind(j.at("function").get<std::string>());
        if (j.contains("dim")) c.dim = j.at("dim").get<Index>();
        if (j.contains("method")) c.method = parse_method(j.at("method").get<std::string>());
        if (j.contains("batch_size")) c.batch_size = j.at("batch_size").get<Index>();
        if (j.contains("init_count")) c.init_count = j.at("init_count").get<Index>();
        if (j.contains("total_acquisitions")) c.total_acquisitions = j.at("total_acquisitions").get<Index>();
        if (j.contains("candidate_count")) c.candidate_count = j.at("candidate_count").get<Index>();
        if (j.contains("refit_every")) c.refit_every = j.at("refit_every").get<Index>();
        if (j.contains("max_group_dim")) c.max_group_dim = j.at("max_group_dim").get<Index>();
        if (j.contains("replicates")) c.replicates = j.at("replicates").get<Index>();
        if (j.contains("base_seed")) c.base_seed = j.at("base_seed").get<std::uint64_t>();
        if (j.contains("beta")) c.beta = j.at("beta").get<double>();
        if (j.contains("fit_steps")) c.fit_steps = j.at("fit_steps").get<int>();
        if (j.contains("fit_step_size")) c.fit_step_size = j.at("fit_step_size").get<double>();
        if (j.contains("record_timing")) c.record_timing = j.at("record_timing").get<bool>();
        if (j.contains("threads")) c.threads = j.at("threads").get<unsigned>();
        if (j.contains("output")) c.output = j.at("output").get<std::string>();
    } catch (const nlohmann::json::exception& e) {
        throw ConfigError(std::string("config: ") + e.what());
    }
    return c;
}

nlohmann::json config_to_json(const ExperimentConfig& c) {
    return {{"function", to_string(c.function)},
            {"dim", c.dim},
            {"method", to_string(c.method)},
            {"batch_size", c.batch_size},
            {"init_count", c.init_count},
            {"total_acquisitions", c.total_acquisitions},
            {"candidate_count", c.candidate_count},
            {"refit_every", c.refit_every},
            {"max_group_dim", c.max_group_dim},
            {"replicates", c.replicates},
            {"base_seed", c.base_seed},
            {"beta", c.beta},
            {"fit_steps", c.fit_steps},
            {"fit_step_size", c.fit_step_size},
            {"record_timing", c.record_timing},
            {"threads", c.threads},
            {"output", c.output}};
}

// ---------------------------------------------------------------------------
// Runner

std::uint64_t replicate_seed(const ExperimentConfig& config, Index replicate) {
    return derive_seed(config.base_seed, static_cast<std::uint64_t>(replicate));
}

namespace {

// Substream ids under a replicate seed.
constexpr std::uint64_t kFunctionStream = 0;
constexpr std::uint64_t kInitStream = 1;
constexpr std::uint64_t kRoundStreamBase = 1000;

AdditiveGpModel refit(const ExperimentConfig& config, const Dataset& data, const RngStream& round) {
    RngStream structure_stream = round.split(0);
    AdditiveStructure structure = random_partition(config.dim, config.max_group_dim, structure_stream);
    AdditiveGpModel initial = AdditiveGpModel::with_defaults(std::move(structure), data);
    FitOptions options;
    options.steps = config.fit_steps;
    options.step_size = config.fit_step_size;
    try {
        return fit(initial, data, options).model;
    } catch (const InitializationError&) {
        return initial;
    }
}

}  // namespace

ReplicateResult run_replicate(const ExperimentConfig& config, Index replicate) {
    config.validate();
    const std::uint64_t seed = replicate_seed(config, replicate);
    const RngStream root(seed);
    const std::string method = to_string(config.method);

    RngStream function_stream = root.split(kFunctionStream);
    const SyntheticFunction objective = make_function(config.function, config.dim, function_stream);

    RngStream init_stream = root.split(kInitStream);
    const Matrix init_x = candidate_grid(config.dim, config.init_count, init_stream);
    Dataset data(init_x, objective.evaluate(init_x));

    ReplicateResult result;
    double bov = std::numeric_limits<double>::infinity();
    auto record = [&](const Vector& x, double value, double seconds) {
        bov = std::min(bov, value);
        result.records.push_back(RunRecord{replicate, static_cast<Index>(result.records.size()), method, seed, value,
                                           bov, seconds, x});
    };
    for (Index r = 0; r < data.size(); ++r) {
        record(data.x().row(r).transpose(), data.y()(r), 0.0);
    }

    AcquisitionRequest request;
    request.method = config.method;
    request.batch_size = config.batch_size;
    request.beta = config.beta;
    request.candidate_count = config.candidate_count;

    std::optional<AdditiveGpModel> model;
    Index acquired = 0;
    Index last_refit = 0;
    for (Index round = 0; acquired < config.total_acquisitions; ++round) {
        const auto start = std::chrono::steady_clock::now();
        const RngStream round_stream = root.split(kRoundStreamBase + static_cast<std::uint64_t>(round));
        if (!model || acquired - last_refit >= config.refit_every) {
            model = refit(config, data, round_stream);
            last_refit = acquired;
            result.models.push_back({{"replicate", replicate}, {"evaluations", data.size()}, {"model", model_to_json(*model)}});
        }
        const Matrix proposals = acquire(*model, data, request, round_stream.split(1));
        const Vector values = objective.evaluate(proposals);
        data = data.appended(proposals, values);
        const double seconds =
            config.record_timing
                ? std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count()
                : 0.0;
        for (Index b = 0; b < proposals.rows(); ++b) {
            record(proposals.row(b).transpose(), values(b), seconds);
        }
        acquired += proposals.rows();
    }
    return result;
}

std::vector<RunRecord> run_experiment(const ExperimentConfig& config, std::vector<nlohmann::json>* models) {
    config.validate();
    const auto reps = static_cast<std::size_t>(config.replicates);
    std::vector<ReplicateResult> results(reps);
    const unsigned workers = std::min<unsigned>(config.threads, static_cast<unsigned>(reps));
    if (workers <= 1) {
        for (std::size_t r = 0; r < reps; ++r) {
            results[r] = run_replicate(config, static_cast<Index>(r));
        }
    } else {
        std::atomic<std::size_t> next{0};
        std::vector<std::exception_ptr> errors(reps);
        std::vector<std::thread> pool;
        for (unsigned w = 0; w < workers; ++w) {
            pool.emplace_back([&] {
                for (std::size_t r = next++; r < reps; r = next++) {
                    try {
                        results[r] = run_replicate(config, static_cast<Index>(r));
                    } catch (...) {
                        errors[r] = std::current_exception();
                    }
                }
            });
        }
        for (auto& t : pool) {
            t.join();
        }
        for (const auto& e : errors) {
            if (e) std::rethrow_exception(e);
        }
    }
    std::vector<RunRecord> records;
    for (auto& r : results) {
        records.insert(records.end(), std::make_move_iterator(r.records.begin()),
                       std::make_move_iterator(r.records.end()));
        if (models) {
            models->insert(models->end(), r.models.begin(), r.models.end());
        }
    }
    return records;
}

// ---------------------------------------------------------------------------
// CSV

std::string format_double(double value) {
    char buf[64];
    const auto res = std::to_chars(buf, buf + sizeof(buf), value);
    return std::string(buf, res.ptr);
}

void write_csv(std::ostream& out, const std::vector<RunRecord>& records, Index p) {
    out << "replicate,eval_index,method,seed,value,bov,round_seconds";
    for (Index i = 1; i <= p; ++i) {
        out << ",x_" << i;
    }
    out << '\n';
    for (const auto& r : records) {
        if (r.x.size() != p) {
            throw ShapeError("write_csv: record has " + std::to_string(r.x.size()) + " coordinates, expected " +
                             std::to_string(p));
        }
        out << r.replicate << ',' << r.eval_index << ',' << r.method << ',' << r.seed << ',' << format_double(r.value)
            << ',' << format_double(r.bov) << ',' << format_double(r.round_seconds);
        for (Index i = 0; i < p; ++i) {
            out << ',' << format_double(r.x(i));
        }
        out << '\n';
    }
}

namespace {

std::vector<std::string> split_line(const std::string& line) {
    std::vector<std::string> fields;
    std::stringstream ss(line);
    std::string field;
    while (std::getline(ss, field, ',')) {
        fields.push_back(field);
    }
    if (!line.empty() && line.back() == ',') {
        fields.emplace_back();
    }
    return fields;
}

template <typename T>
T parse_field(const std::string& s, std::size_t line_no) {
    T value{};
    const auto res = std::from_chars(s.data(), s.data() + s.size(), value);
    if (res.ec != std::errc() || res.ptr != s.data() + s.size()) {
        throw ConfigError("csv line " + std::to_string(line_no) + ": cannot parse '" + s + "'");
    }
    return value;
}

}  // namespace

std::vector<RunRecord> read_csv(std::istream& in) {
    std::string line;
    if (!std::getline(in, line)) {
        throw ConfigError("csv: missing header");
    }
    const auto header = split_line(line);
    const std::vector<std::string> fixed = {"replicate", "eval_index", "method", "seed", "value", "bov", "round_seconds"};
    if (header.size() < fixed.size() || !std::equal(fixed.begin(), fixed.end(), header.begin())) {
        throw ConfigError("csv: unexpected header");
    }
    const auto p = static_cast<Index>(header.size() - fixed.size());
    std::vector<RunRecord> records;
    std::size_t line_no = 1;
    while (std::getline(in, line)) {
        ++line_no;
        if (line.empty()) continue;
        const auto f = split_line(line);
        if (f.size() != header.size()) {
            throw ConfigError("csv line " + std::to_string(line_no) + ": wrong field count");
        }
        RunRecord r;
        r.replicate = parse_field<Index>(f[0], line_no);
        r.eval_index = parse_field<Index>(f[1], line_no);
        r.method = f[2];
        r.seed = parse_field<std::uint64_t>(f[3], line_no);
        r.value = parse_field<double>(f[4], line_no);
        r.bov = parse_field<double>(f[5], line_no);
        r.round_seconds = parse_field<double>(f[6], line_no);
        r.x.resize(p);
        for (Index i = 0; i < p; ++i) {
            r.x(i) = parse_field<double>(f[fixed.size() + static_cast<std::size_t>(i)], line_no);
        }
        records.push_back(std::move(r));
    }
    return records;
}

// ---------------------------------------------------------------------------
// Summaries

double quantile(std::vector<double> values, double q) {
    if (values.empty()) {
        throw PreconditionError("quantile: no values");
    }
    std::sort(values.begin(), values.end());
    const double pos = q * static_cast<double>(values.size() - 1);
    const auto lo = static_cast<std::size_t>(std::floor(pos));
    const std::size_t hi = std::min(lo + 1, values.size() - 1);
    return values[lo] + (pos - static_cast<double>(lo)) * (values[hi] - values[lo]);
}

double log10_gap(double bov, double optimum) { return std::log10(std::max(bov - optimum, 1e-12)); }

std::vector<double> gaps_at(const std::vector<RunRecord>& records, const std::string& method, Index eval_index,
                            double optimum) {
    std::map<Index, double> by_replicate;
    for (const auto& r : records) {
        if (r.method == method && r.eval_index == eval_index) {
            by_replicate[r.replicate] = log10_gap(r.bov, optimum);
        }
    }
    std::vector<double> out;
    for (const auto& [rep, gap] : by_replicate) {
        out.push_back(gap);
    }
    return out;
}

std::vector<MethodSummary> summarize(const std::vector<RunRecord>& records, std::optional<double> optimum) {
    if (records.empty()) {
        throw PreconditionError("summarize: no records");
    }
    // method -> eval_index -> replicate -> bov
    std::map<std::string, std::map<Index, std::map<Index, double>>> table;
    for (const auto& r : records) {
        table[r.method][r.eval_index][r.replicate] = r.bov;
    }
    std::vector<MethodSummary> out;
    for (const auto& [method, by_index] : table) {
        MethodSummary s;
        s.method = method;
        std::map<Index, double> last_bov;
        for (const auto& [index, by_rep] : by_index) {
            std::vector<double> values;
            for (const auto& [rep, bov] : by_rep) {
                values.push_back(bov);
                last_bov[rep] = bov;
            }
            s.trajectory.push_back({index, static_cast<Index>(values.size()), quantile(values, 0.5),
                                    quantile(values, 0.25), quantile(values, 0.75)});
        }
        if (optimum) {
            GapSummary g;
            for (const auto& [rep, bov] : last_bov) {
                g.log10_gaps.push_back(log10_gap(bov, *optimum));
            }
            g.median = quantile(g.log10_gaps, 0.5);
            g.q25 = quantile(g.log10_gaps, 0.25);
            g.q75 = quantile(g.log10_gaps, 0.75);
            s.final_gap = std::move(g);
        }
        out.push_back(std::move(s));
    }
    return out;
}

void write_summary_csv(std::ostream& out, const std::vector<MethodSummary>& summaries) {
    out << "method,eval_index,replicates,median_bov,q25_bov,q75_bov\n";
    for (const auto& s : summaries) {
        for (const auto& t : s.trajectory) {
            out << s.method << ',' << t.eval_index << ',' << t.replicates << ',' << format_double(t.median) << ','
                << format_double(t.q25) << ',' << format_double(t.q75) << '\n';
        }
    }
}

// ---------------------------------------------------------------------------
// Surface export

std::vector<SurfaceRow> export_surface(const AdditiveGpModel& model, const Dataset& data, Index resolution,
                                       RngStream& rng) {
    const auto& s = model.structure();
    if (s.dim() != 2 || s.num_groups() != 2) {
        throw PreconditionError("export_surface: model must have P = 2 with two singleton groups");
    }
    if (resolution < 1) {
        throw PreconditionError("export_surface: resolution must be at least 1");
    }
    const Index n = resolution * resolution;
    Matrix grid(n, 2);
    for (Index i = 0; i < resolution; ++i) {
        for (Index j = 0; j < resolution; ++j) {
            const double step = resolution > 1 ? 1.0 / static_cast<double>(resolution - 1) : 0.0;
            grid(i * resolution + j, 0) = static_cast<double>(i) * step;
            grid(i * resolution + j, 1) = static_cast<double>(j) * step;
        }
    }
    const PredictiveGaussian exact = predict_exact(model, data, grid);
    const PredictiveGaussian additive = predict_additive(model, data, grid);
    const Matrix exact_draw = sample_gaussian(exact.mean, factor_psd(exact.covariance), 1, rng);
    const Matrix additive_draw = sample_gaussian(additive.mean, factor_psd(additive.covariance), 1, rng);
    const Vector exact_var = exact.variance();
    const Vector additive_var = additive.variance();

    std::vector<SurfaceRow> rows;
    rows.reserve(static_cast<std::size_t>(n));
    for (Index r = 0; r < n; ++r) {
        rows.push_back({grid(r, 0), grid(r, 1), exact.mean(r), exact_var(r), additive_var(r), exact_draw(r, 0),
                        additive_draw(r, 0)});
    }
    return rows;
}

void write_surface_csv(std::ostream& out, const std::vector<SurfaceRow>& rows) {
    out << "x1,x2,mean,exact_variance,additive_variance,exact_draw,additive_draw\n";
    for (const auto& r : rows) {
        out << format_double(r.x1) << ',' << format_double(r.x2) << ',' << format_double(r.mean) << ','
            << format_double(r.exact_variance) << ',' << format_double(r.additive_variance) << ','
            << format_double(r.exact_draw) << ',' << format_double(r.additive_draw) << '\n';
    }
}

}  // namespace addbo
