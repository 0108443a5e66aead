#include "annkin/stepper.hpp"

#include "annkin/errors.hpp"
#include "annkin/model.hpp"
#include "test_util.hpp"

#include <doctest.h>

#include <cmath>
#include <stdexcept>
#include <vector>

using namespace annkin;
using annkin::testutil::rel_err;

// References evaluated with an arbitrary-precision scalar tool and frozen.
namespace {
const ModelParams kBase{0.1, 0.4, 0.001, 5000.0};

constexpr double kFirstStepCoarse = 2028.897453828317988;   // dt = 0.01
constexpr double kFirstStepFine = 4511.589230918267654;     // dt = 1/3200
constexpr double kSecondStepA = 0.07783169091918211872;     // dt = 1/3200, order 2
constexpr double kSecondStepB = 4797.305906159890779;
constexpr double kSecondStepC = -20890366.53306503317;
constexpr double kSecondStepRoot = 4084.001855480730169;
constexpr double kEulerStyleRoot = 1951.941016011037844;    // 0.08 x^2 + 100 x - 500000 = 0
} // namespace

TEST_CASE("scheme_from_order") {
    CHECK(scheme_from_order(1) == SchemeKind::FirstOrder);
    CHECK(scheme_from_order(2) == SchemeKind::SecondOrder);
    CHECK_THROWS_AS(scheme_from_order(0), std::invalid_argument);
    CHECK_THROWS_AS(scheme_from_order(3), std::invalid_argument);
    CHECK(scheme_order(SchemeKind::FirstOrder) == 1);
    CHECK(scheme_order(SchemeKind::SecondOrder) == 2);
}

TEST_CASE("first implicit step matches the high-precision reference") {
    const QuadraticStep coarse = assemble_first_step(derive_coeffs(kBase, 0.01), kBase.a0);
    CHECK(coarse.k == 1);
    CHECK(rel_err(solve_positive_root(coarse), kFirstStepCoarse) <= 1e-12);

    const QuadraticStep fine =
        assemble_first_step(derive_coeffs(kBase, 1.0 / 3200.0), kBase.a0);
    CHECK(rel_err(solve_positive_root(fine), kFirstStepFine) <= 1e-12);
}

TEST_CASE("second step coefficients and root match the high-precision reference") {
    const DerivedCoeffs coeffs = derive_coeffs(kBase, 1.0 / 3200.0);
    const std::vector<double> history{kBase.a0, kFirstStepFine};
    const QuadraticStep step =
        assemble_general_step(coeffs, SchemeKind::SecondOrder, history, 2);
    CHECK(rel_err(step.A, kSecondStepA) <= 1e-12);
    CHECK(rel_err(step.B, kSecondStepB) <= 1e-12);
    CHECK(rel_err(step.C, kSecondStepC) <= 1e-12);
    CHECK(rel_err(solve_positive_root(step), kSecondStepRoot) <= 1e-12);
}

TEST_CASE("table-accelerated assembly is bit-identical to direct assembly") {
    const DerivedCoeffs coeffs = derive_coeffs(kBase, 0.005);
    std::vector<double> history{5000.0, 3000.0, 2200.0, 1800.0, 1550.0};
    LogRatioTable table(coeffs.delta);
    table.extend_to(5);
    for (const SchemeKind scheme : {SchemeKind::FirstOrder, SchemeKind::SecondOrder}) {
        const QuadraticStep direct = assemble_general_step(coeffs, scheme, history, 5);
        const QuadraticStep tabled = assemble_general_step(coeffs, scheme, history, 5, table);
        CHECK(direct.A == tabled.A);
        CHECK(direct.B == tabled.B);
        CHECK(direct.C == tabled.C);
    }
}

TEST_CASE("positive root selection") {
    CHECK(rel_err(solve_positive_root({0.08, 100.0, -500000.0, 7}), kEulerStyleRoot) <= 1e-14);

    SUBCASE("linear fallback when the quadratic term vanishes") {
        CHECK(solve_positive_root({0.0, 2.0, -10.0, 1}) == 5.0);
        CHECK_THROWS_AS(solve_positive_root({0.0, 2.0, 10.0, 1}), NumericError);
        CHECK(solve_positive_root({0.0, 0.0, 0.0, 1}) == 0.0);
        CHECK_THROWS_AS(solve_positive_root({0.0, 0.0, 1.0, 1}), NumericError);
    }
    SUBCASE("negative discriminant is a numeric failure") {
        CHECK_THROWS_AS(solve_positive_root({1.0, 0.0, 1.0, 1}), NumericError);
    }
    SUBCASE("both roots negative is a loss of positivity") {
        CHECK_THROWS_AS(solve_positive_root({1.0, 3.0, 2.0, 1}), NumericError);
    }
    SUBCASE("a zero root is a valid stationary state") {
        CHECK(solve_positive_root({1.0, 2.0, 0.0, 1}) == 0.0);
    }
    SUBCASE("small root survives catastrophic cancellation") {
        CHECK(rel_err(solve_positive_root({1.0, 1e8, -1.0, 1}), 1e-8) <= 1e-12);
    }
    SUBCASE("non-finite coefficients are rejected") {
        CHECK_THROWS_AS(solve_positive_root({std::nan(""), 1.0, 1.0, 1}),
                        std::invalid_argument);
    }
}

TEST_CASE("zero initial density stays zero through the first step") {
    const DerivedCoeffs coeffs = derive_coeffs(kBase, 0.01);
    CHECK(solve_positive_root(assemble_first_step(coeffs, 0.0)) == 0.0);
    CHECK_THROWS_AS(assemble_first_step(coeffs, -1.0), std::invalid_argument);
    CHECK_THROWS_AS(assemble_first_step(coeffs, std::nan("")), std::invalid_argument);
}

TEST_CASE("standard form equals the unrearranged equation") {
    const DerivedCoeffs coeffs = derive_coeffs(kBase, 0.005);
    const std::vector<double> history{5000.0, 3000.0, 2200.0, 1800.0};
    for (const SchemeKind scheme : {SchemeKind::FirstOrder, SchemeKind::SecondOrder}) {
        const QuadraticStep step = assemble_general_step(coeffs, scheme, history, 4);
        for (const double x : {100.0, 900.0, 1700.0}) {
            const double quad_form = step.A * x * x + step.B * x + step.C;
            const double resid = step_residual(coeffs, scheme, history, x);
            const double scale = std::max({std::abs(step.A * x * x), std::abs(step.B * x),
                                           std::abs(step.C)});
            CHECK(std::abs(quad_form - resid) <= 1e-13 * scale);
        }

        const double root = solve_positive_root(
            assemble_general_step(coeffs, scheme, history, 4));
        const double scale = std::abs(root) / coeffs.dt;
        CHECK(std::abs(step_residual(coeffs, scheme, history, root)) <= 1e-10 * scale);
    }
}

TEST_CASE("history shape is validated") {
    const DerivedCoeffs coeffs = derive_coeffs(kBase, 0.01);
    const std::vector<double> history{5000.0};
    CHECK_THROWS_AS(
        assemble_general_step(coeffs, SchemeKind::SecondOrder, history, 1),
        std::invalid_argument);
    CHECK_NOTHROW(assemble_general_step(coeffs, SchemeKind::FirstOrder, history, 1));
    const std::vector<double> wrong{5000.0, 4000.0, 3000.0};
    CHECK_THROWS_AS(assemble_general_step(coeffs, SchemeKind::SecondOrder, wrong, 2),
                    std::invalid_argument);
}

TEST_CASE("first-order and first-step assembly agree at k = 1") {
    const DerivedCoeffs coeffs = derive_coeffs(kBase, 0.01);
    const std::vector<double> history{kBase.a0};
    const QuadraticStep general =
        assemble_general_step(coeffs, SchemeKind::FirstOrder, history, 1);
    const QuadraticStep first = assemble_first_step(coeffs, kBase.a0);
    CHECK(general.A == first.A);
    CHECK(general.B == first.B);
    CHECK(general.C == first.C);
}
