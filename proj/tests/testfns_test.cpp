#include <gtest/gtest.h>

#include <cmath>

#include "addbo/errors.hpp"
#include "addbo/testfns.hpp"
#include "test_support.hpp"

using namespace addbo;

TEST(ComponentEval, HandValues) {
    EXPECT_NEAR(component_eval(FunctionKind::ackley, 0.0), 0.0, 1e-12);
    EXPECT_NEAR(component_eval(FunctionKind::levy, 1.0), 0.0, 1e-12);
    EXPECT_NEAR(component_eval(FunctionKind::rastrigin, 0.0), -2.0, 1e-15);
    // rastrigin at 1: 1 - 2 cos(2 pi) = -1
    EXPECT_NEAR(component_eval(FunctionKind::rastrigin, 1.0), -1.0, 1e-12);
    // levy at 5: w = 2, sin(2 pi)^2 + 1 * (1 + sin(4 pi)^2) = 1
    EXPECT_NEAR(component_eval(FunctionKind::levy, 5.0), 1.0, 1e-12);
}

TEST(FunctionKind, Names) {
    EXPECT_EQ(parse_function_kind("levy"), FunctionKind::levy);
    EXPECT_EQ(to_string(FunctionKind::rastrigin), "rastrigin");
    EXPECT_THROW((void)parse_function_kind("branin"), ConfigError);
}

TEST(KnownOptimum, Values) {
    EXPECT_EQ(known_optimum(FunctionKind::ackley, 10), 0.0);
    EXPECT_EQ(known_optimum(FunctionKind::rastrigin, 5), -10.0);
    EXPECT_EQ(known_optimum(FunctionKind::levy, 2), 0.0);
}

TEST(SyntheticFunction, OptimumAtShiftedCenter) {
    RngStream rng(1);
    for (FunctionKind kind : {FunctionKind::ackley, FunctionKind::levy, FunctionKind::rastrigin}) {
        const SyntheticFunction f = make_function(kind, 6, rng);
        EXPECT_GE(f.shifts().minCoeff(), -0.5);
        EXPECT_LE(f.shifts().maxCoeff(), 0.5);
        const Vector opt = f.minimizer();
        EXPECT_GE(opt.minCoeff(), 0.0);
        EXPECT_LE(opt.maxCoeff(), 1.0);
        EXPECT_NEAR(f(opt), known_optimum(kind, 6), 1e-9) << to_string(kind);
    }
}

TEST(SyntheticFunction, NeverBelowOptimum) {
    RngStream rng(2);
    for (FunctionKind kind : {FunctionKind::ackley, FunctionKind::levy, FunctionKind::rastrigin}) {
        const SyntheticFunction f = make_function(kind, 4, rng);
        const Vector values = f.evaluate(oracle::uniform_matrix(10000, 4, rng));
        EXPECT_GE(values.minCoeff(), known_optimum(kind, 4) - 1e-9) << to_string(kind);
    }
}

TEST(SyntheticFunction, AckleyScaling) {
    Vector u = Vector::Zero(1);
    const SyntheticFunction f(FunctionKind::ackley, u);
    Vector x(1);
    x << 0.75;
    EXPECT_NEAR(f(x), component_eval(FunctionKind::ackley, 65.536 * 0.25), 1e-12);
}

TEST(SyntheticFunction, CoordinatePermutationSymmetry) {
    RngStream rng(3);
    const SyntheticFunction f = make_function(FunctionKind::levy, 3, rng);
    Vector perm_u(3);
    perm_u << f.shifts()(2), f.shifts()(0), f.shifts()(1);
    const SyntheticFunction g(FunctionKind::levy, perm_u);
    const Vector x = oracle::uniform_matrix(3, 1, rng);
    Vector px(3);
    px << x(2), x(0), x(1);
    EXPECT_NEAR(f(x), g(px), 1e-12);
}

TEST(SyntheticFunction, SeedDeterminismAndValidation) {
    RngStream a(4), b(4);
    const SyntheticFunction f = make_function(FunctionKind::rastrigin, 5, a);
    const SyntheticFunction g = make_function(FunctionKind::rastrigin, 5, b);
    EXPECT_TRUE(f.shifts() == g.shifts());
    EXPECT_THROW(SyntheticFunction(FunctionKind::ackley, Vector::Constant(2, 0.7)), std::invalid_argument);
    EXPECT_THROW((void)f(Vector::Zero(4)), ShapeError);
}
