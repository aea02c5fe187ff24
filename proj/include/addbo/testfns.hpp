#ifndef ADDBO_TESTFNS_HPP
#define ADDBO_TESTFNS_HPP
#pragma once

#include <string>
#include <string_view>

#include "addbo/numerics.hpp"

namespace addbo {

enum class FunctionKind { ackley, levy, rastrigin };

[[nodiscard]] std::string to_string(FunctionKind kind);
/// Throws ConfigError for unknown names.
[[nodiscard]] FunctionKind parse_function_kind(std::string_view name);

/// One-dimensional component on its raw domain. Total: no clamping.
///   ackley:    -20 exp(-0.2 |t|) - exp(cos(0.1 pi t)) + 20 + e
///   levy:      sin(pi w)^2 + (w - 1)^2 (1 + sin(2 pi w)^2), w = 1 + (t - 1) / 4
///   rastrigin: t^2 - 2 cos(2 pi t)
[[nodiscard]] double component_eval(FunctionKind kind, double t);

/// Half-width of the raw domain: 32.768, 10 and 1.5.
[[nodiscard]] double raw_half_width(FunctionKind kind);
/// Raw location of the component minimum: 1 for levy, 0 otherwise.
[[nodiscard]] double raw_minimizer(FunctionKind kind);

/// f(x) = sum_p g(t_p) with t_p = t* + 2 h (x_p - u_p - 0.5), where h is the
/// raw half-width and t* the raw minimizer, so the minimum sits at
/// x = 0.5 + u.
class SyntheticFunction {
public:
    SyntheticFunction(FunctionKind kind, Vector shifts);

    [[nodiscard]] FunctionKind kind() const noexcept { return kind_; }
    [[nodiscard]] Index dim() const noexcept { return shifts_.size(); }
    [[nodiscard]] const Vector& shifts() const noexcept { return shifts_; }
    /// 0.5 + u, the global minimizer in the unit cube.
    [[nodiscard]] Vector minimizer() const;

    [[nodiscard]] double operator()(const VectorRef& x) const;
    /// One value per row of x.
    [[nodiscard]] Vector evaluate(const MatrixRef& x) const;

private:
    FunctionKind kind_;
    Vector shifts_;
};

/// Draws shifts u ~ U[-0.5, 0.5]^p.
[[nodiscard]] SyntheticFunction make_function(FunctionKind kind, Index p, RngStream& rng);

/// 0 for ackley and levy, -2p for rastrigin.
[[nodiscard]] double known_optimum(FunctionKind kind, Index p);

}  // namespace addbo

#endif  // ADDBO_TESTFNS_HPP
