#include "oracle.hpp"

#include "annkin/errors.hpp"
#include "annkin/quadrature.hpp"
#include "annkin/solver.hpp"
#include "test_util.hpp"

#include <doctest.h>

#include <cmath>
#include <cstdint>
#include <random>
#include <stdexcept>

using namespace annkin;
using annkin::oracle::oracle_segment_integral;
using annkin::oracle::oracle_solve;
using annkin::oracle::oracle_solve_coeffs;
using annkin::testutil::rel_err;

namespace {

const ModelParams kBase{0.1, 0.4, 0.001, 5000.0};

// Ramp segment (k=1, i=0, delta=0.008, a_i=0, a_ip1=1), i.e.
// (1.008)^2 ln(126) - 1.508, evaluated with an arbitrary-precision scalar
// tool and frozen.
constexpr double kRampSegment = 3.405971939504746539862;

} // namespace

TEST_CASE("adaptive segment integral reproduces closed forms") {
    const double constant = oracle_segment_integral(1, 0, 0.008, 1.0, 1.0, 1e-10);
    CHECK(rel_err(constant, std::log(126.0)) <= 1e-9);

    const double flat = oracle_segment_integral(5, 0, 1.0, 2.0, 2.0, 1e-10);
    CHECK(rel_err(flat, 4.0 * std::log(1.2)) <= 1e-9);

    const double ramp = oracle_segment_integral(1, 0, 0.008, 0.0, 1.0, 1e-12);
    CHECK(rel_err(ramp, kRampSegment) <= 1e-10);

    CHECK(oracle_segment_integral(3, 1, 0.5, 0.0, 0.0, 1e-8) == 0.0);
}

TEST_CASE("adaptive and product-integration segment values agree on random cases") {
    std::mt19937_64 rng(20240817);
    std::uniform_int_distribution<std::int64_t> pick_k(1, 64);
    std::uniform_real_distribution<double> log_delta(-4.0, 1.0);
    std::uniform_real_distribution<double> density(0.1, 100.0);

    for (int trial = 0; trial < 64; ++trial) {
        const std::int64_t k = pick_k(rng);
        std::uniform_int_distribution<std::int64_t> pick_i(0, k - 1);
        const std::int64_t i = pick_i(rng);
        const double delta = std::pow(10.0, log_delta(rng));
        const double a_i = density(rng);
        const double a_ip1 = density(rng);

        const double main = segment_integral(k, i, delta, a_i, a_ip1);
        const double ref = oracle_segment_integral(k, i, delta, a_i, a_ip1, 1e-12);
        CHECK(rel_err(main, ref) <= 1e-10);
    }
}

TEST_CASE("adaptive segment integral validates its arguments") {
    CHECK_THROWS_AS(oracle_segment_integral(1, 0, 0.008, 1.0, 1.0, 0.0),
                    std::invalid_argument);
    CHECK_THROWS_AS(oracle_segment_integral(1, 0, 0.008, 1.0, 1.0, 2e-6),
                    std::invalid_argument);
    CHECK_THROWS_AS(oracle_segment_integral(1, 0, 0.008, 1.0, 1.0, -1e-9),
                    std::invalid_argument);
    CHECK_THROWS_AS(oracle_segment_integral(1, 1, 0.008, 1.0, 1.0, 1e-9),
                    std::invalid_argument);
    CHECK_THROWS_AS(oracle_segment_integral(1, 0, 0.0, 1.0, 1.0, 1e-9),
                    std::invalid_argument);
}

TEST_CASE("reference solver: closed-form reductions") {
    const ModelParams inert{0.0, 1.0, 1.0, 50.0};
    const Trajectory constant = oracle_solve(inert, 0.05, 1.0);
    for (const double v : constant.values) CHECK(v == 50.0);

    // memory switched off, reaction kept: explicit two-stage stepping must
    // track a0/(1 + alpha a0 t) with second-order error
    const ModelParams meta{0.25, 1.0, 1.0, 100.0};
    const double alpha = 0.02;
    const double closed = 100.0 / (1.0 + alpha * 100.0 * 2.0);
    double errs[3];
    const double hs[3] = {0.02, 0.01, 0.005};
    for (int j = 0; j < 3; ++j) {
        const Trajectory traj = oracle_solve_coeffs(meta, alpha, 0.0, 1.0, hs[j], 2.0);
        errs[j] = std::abs(traj.values.back() - closed);
        CHECK(errs[j] > 0.0);
    }
    CHECK(errs[0] / errs[1] >= 3.5);
    CHECK(errs[0] / errs[1] <= 4.5);
    CHECK(errs[1] / errs[2] >= 3.5);
    CHECK(errs[1] / errs[2] <= 4.5);
    CHECK(errs[2] / closed <= 1e-3);
}

TEST_CASE("main solver approaches the reference as its step shrinks") {
    // The explicit reference scheme needs steps well inside the initial decay
    // time 1/(alpha*a0) = 2.5e-3; errors made there feed the memory integral
    // and never wash out.
    const Trajectory ref_coarse = oracle_solve(kBase, 5e-4, 10.0);
    const Trajectory ref = oracle_solve(kBase, 2.5e-4, 10.0);

    const std::vector<double> dts{0.01, 0.005, 0.0025};
    const std::vector<Trajectory> runs =
        solve_ladder(kBase, dts, 10.0, SchemeKind::SecondOrder);

    for (const double t : {1.0, 10.0}) {
        double prev_gap = 0.0;
        double min_gap = 0.0;
        for (std::size_t j = 0; j < runs.size(); ++j) {
            const double gap = std::abs(runs[j].value_at(t) - ref.value_at(t));
            if (j > 0) CHECK(gap < prev_gap);
            prev_gap = gap;
            min_gap = gap;
        }
        // the reference's own step dependence must be far below the gaps it
        // is used to judge
        const double self = std::abs(ref_coarse.value_at(t) - ref.value_at(t));
        CHECK(self < 0.1 * min_gap);
    }
}

TEST_CASE("reference solver validates and reports instability") {
    CHECK_THROWS_AS(oracle_solve(kBase, 0.01, 0.1), NumericError);
    CHECK_THROWS_AS(oracle_solve(kBase, 0.02, 0.05), std::invalid_argument);
    CHECK_THROWS_AS(oracle_solve(kBase, 0.0, 1.0), std::invalid_argument);

    const ModelParams unregularized{0.1, 0.4, 0.0, 5000.0};
    CHECK_THROWS_AS(oracle_solve(unregularized, 1e-3, 1.0), std::invalid_argument);

    const ModelParams meta{0.25, 1.0, 1.0, 100.0};
    CHECK_THROWS_AS(oracle_solve_coeffs(meta, -0.1, 0.0, 1.0, 0.01, 1.0),
                    std::invalid_argument);
}
