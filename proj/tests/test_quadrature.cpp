#include "annkin/quadrature.hpp"

#include "test_util.hpp"

#include <doctest.h>

#include <cmath>
#include <stdexcept>
#include <vector>

using namespace annkin;
using annkin::testutil::rel_err;

// High-precision references evaluated with an arbitrary-precision scalar tool
// and frozen here.
namespace {
constexpr double kLn126 = 4.836281906951477997;            // ln(126)
constexpr double kRampSegment = 3.405971939504746539862;   // k=1, i=0, delta=0.008, 0 -> 1
constexpr double kFlatSegment = 0.7292862271758185048;     // 4 ln(6/5)
constexpr double kMemorySum = 5.552677520780263926693;     // k=3, delta=0.5, [3,2,1.5], 1.2
} // namespace

TEST_CASE("constant interpolant integrates to a^2 times the log weight") {
    CHECK(rel_err(segment_integral(1, 0, 0.008, 1.0, 1.0), kLn126) <= 1e-15);
    CHECK(rel_err(segment_integral(5, 0, 1.0, 2.0, 2.0), kFlatSegment) <= 1e-14);
}

TEST_CASE("ramp segment matches the high-precision reference") {
    CHECK(rel_err(segment_integral(1, 0, 0.008, 0.0, 1.0), kRampSegment) <= 1e-14);
}

TEST_CASE("memory sum over a short history matches the high-precision reference") {
    const std::vector<double> history{3.0, 2.0, 1.5};
    CHECK(rel_err(memory_sum(3, 0.5, history, 1.2), kMemorySum) <= 1e-13);
}

TEST_CASE("memory sum rejects histories of the wrong length") {
    const std::vector<double> history{3.0, 2.0};
    CHECK_THROWS_AS(memory_sum(3, 0.5, history, 1.2), std::invalid_argument);
    CHECK_THROWS_AS(memory_sum(0, 0.5, {}, 1.2), std::invalid_argument);
}

TEST_CASE("segment arguments are validated") {
    CHECK_THROWS_AS(segment_integral(1, -1, 0.5, 1.0, 1.0), std::invalid_argument);
    CHECK_THROWS_AS(segment_integral(1, 1, 0.5, 1.0, 1.0), std::invalid_argument);
    CHECK_THROWS_AS(segment_integral(1, 0, 0.0, 1.0, 1.0), std::invalid_argument);
    CHECK_THROWS_AS(segment_integral(1, 0, -0.1, 1.0, 1.0), std::invalid_argument);
    CHECK_THROWS_AS(segment_integral(1, 0, 0.5, std::nan(""), 1.0), std::invalid_argument);
    CHECK_THROWS_AS(SegmentWeights::make(3, 3, 0.5), std::invalid_argument);
    CHECK_THROWS_AS(SegmentWeights::make(3, -1, 0.5), std::invalid_argument);
    CHECK_THROWS_AS(SegmentWeights::make(3, 0, 0.0), std::invalid_argument);
    CHECK_NOTHROW(SegmentWeights::make(3, 2, 0.5));
}

TEST_CASE("log weights of far segments keep full precision") {
    // direct evaluation of ln((j+delta)/(j-1+delta)) loses most digits to
    // cancellation once the ratio is 1 + tiny; long double evaluation keeps
    // enough of them to referee
    const double delta = 0.3;
    for (const std::int64_t j : {10LL, 1000LL, 1000000LL}) {
        const long double num = static_cast<long double>(j) + static_cast<long double>(delta);
        const long double den = num - 1.0L;
        const auto want = static_cast<double>(std::log(num / den));
        CHECK(rel_err(log_ratio(j, delta), want) <= 1e-12);
    }
    CHECK(log_ratio(1, 0.008) == doctest::Approx(kLn126).epsilon(1e-15));
}

TEST_CASE("log weights decrease with segment distance") {
    double prev = log_ratio(1, 0.25);
    for (std::int64_t j = 2; j <= 50; ++j) {
        const double cur = log_ratio(j, 0.25);
        CHECK(cur > 0.0);
        CHECK(cur < prev);
        prev = cur;
    }
}

TEST_CASE("compensated accumulation survives magnitude swings") {
    KahanSum acc;
    acc.add(1e16);
    acc.add(1.0);
    acc.add(-1e16);
    CHECK(acc.value() == 1.0);

    // plain summation drops the ones entirely in this ordering
    double naive = 1e16;
    KahanSum kahan;
    kahan.add(1e16);
    for (int i = 0; i < 1000; ++i) {
        naive += 1.0;
        kahan.add(1.0);
    }
    naive -= 1e16;
    kahan.add(-1e16);
    CHECK(kahan.value() == 1000.0);
    CHECK(naive != 1000.0);
}

TEST_CASE("log weight table reproduces direct evaluation bit for bit") {
    LogRatioTable table(0.008);
    table.extend_to(100);
    for (std::int64_t j = 1; j <= 100; ++j) CHECK(table.at(j) == log_ratio(j, 0.008));
    CHECK(table.delta() == 0.008);

    // growing in pieces gives the same entries
    LogRatioTable grown(0.008);
    grown.extend_to(7);
    grown.extend_to(3);
    grown.extend_to(100);
    for (std::int64_t j = 1; j <= 100; ++j) CHECK(grown.at(j) == table.at(j));
}
