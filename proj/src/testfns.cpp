#include "addbo/testfns.hpp"

#include <cmath>
#include <numbers>

#include "addbo/errors.hpp"

namespace addbo {

std::string to_string(FunctionKind kind) {
    switch (kind) {
        case FunctionKind::ackley: return "ackley";
        case FunctionKind::levy: return "levy";
        case FunctionKind::rastrigin: return "rastrigin";
    }
    return "unknown";
}

FunctionKind parse_function_kind(std::string_view name) {
    if (name == "ackley") return FunctionKind::ackley;
    if (name == "levy") return FunctionKind::levy;
    if (name == "rastrigin") return FunctionKind::rastrigin;
    throw ConfigError("unknown function kind '" + std::string(name) + "' (expected ackley|levy|rastrigin)");
}

double component_eval(FunctionKind kind, double t) {
    using std::numbers::pi;
    switch (kind) {
        case FunctionKind::ackley: {
            constexpr double a = 20.0;
            constexpr double b = 0.2;
            constexpr double c = 0.1 * pi;
            return -a * std::exp(-b * std::abs(t)) - std::exp(std::cos(c * t)) + a + std::numbers::e;
        }
        case FunctionKind::levy: {
            const double w = 1.0 + (t - 1.0) / 4.0;
            const double s1 = std::sin(pi * w);
            const double s2 = std::sin(2.0 * pi * w);
            return s1 * s1 + (w - 1.0) * (w - 1.0) * (1.0 + s2 * s2);
        }
        case FunctionKind::rastrigin: return t * t - 2.0 * std::cos(2.0 * pi * t);
    }
    return 0.0;
}

double raw_half_width(FunctionKind kind) {
    switch (kind) {
        case FunctionKind::ackley: return 32.768;
        case FunctionKind::levy: return 10.0;
        case FunctionKind::rastrigin: return 1.5;
    }
    return 1.0;
}

double raw_minimizer(FunctionKind kind) { return kind == FunctionKind::levy ? 1.0 : 0.0; }

SyntheticFunction::SyntheticFunction(FunctionKind kind, Vector shifts) : kind_(kind), shifts_(std::move(shifts)) {
    if (shifts_.size() < 1) {
        throw PreconditionError("SyntheticFunction: dimension must be at least 1");
    }
    if (shifts_.minCoeff() < -0.5 || shifts_.maxCoeff() > 0.5) {
        throw PreconditionError("SyntheticFunction: shifts must lie in [-0.5, 0.5]");
    }
}

Vector SyntheticFunction::minimizer() const { return (shifts_.array() + 0.5).matrix(); }

double SyntheticFunction::operator()(const VectorRef& x) const {
    if (x.size() != dim()) {
        throw ShapeError("SyntheticFunction: point has " + std::to_string(x.size()) + " coordinates, expected " +
                         std::to_string(dim()));
    }
    const double width = 2.0 * raw_half_width(kind_);
    const double center = raw_minimizer(kind_);
    double total = 0.0;
    for (Index p = 0; p < dim(); ++p) {
        total += component_eval(kind_, center + width * (x(p) - shifts_(p) - 0.5));
    }
    return total;
}

Vector SyntheticFunction::evaluate(const MatrixRef& x) const {
    Vector out(x.rows());
    for (Index r = 0; r < x.rows(); ++r) {
        out(r) = (*this)(x.row(r).transpose());
    }
    return out;
}

SyntheticFunction make_function(FunctionKind kind, Index p, RngStream& rng) {
    if (p < 1) {
        throw PreconditionError("make_function: dimension must be at least 1");
    }
    Vector shifts(p);
    for (Index i = 0; i < p; ++i) {
        shifts(i) = rng.uniform() - 0.5;
    }
    return SyntheticFunction(kind, std::move(shifts));
}

double known_optimum(FunctionKind kind, Index p) {
    return kind == FunctionKind::rastrigin ? -2.0 * static_cast<double>(p) : 0.0;
}

}  // namespace addbo
