#include <algorithm>
#include <cmath>
#include <cstdint>
#include <vector>

#include <catch2/catch_amalgamated.hpp>

#include "ubr/seed_tree.hpp"

using ubr::IRDivergentSpec;
using ubr::RandomStream;
using ubr::SeedTree;

TEST_CASE("splitmix64 matches the published reference sequence") {
    // Reference outputs for state 0 of the canonical splitmix64.
    RandomStream s(0);
    CHECK(s.next_u64() == 0xe220a8397b1dcdafULL);
    CHECK(s.next_u64() == 0x6e789e6aa1b965f4ULL);
    CHECK(s.next_u64() == 0x06c45d188009454fULL);
}

TEST_CASE("unit draws cover [0,1) uniformly") {
    RandomStream s(SeedTree(7).child("unit").stream());
    const std::size_t n = 100000;
    std::vector<double> u(n);
    double mean = 0.0;
    for (auto& x : u) {
        x = s.next_unit();
        REQUIRE(x >= 0.0);
        REQUIRE(x < 1.0);
        mean += x;
    }
    mean /= static_cast<double>(n);
    CHECK(std::fabs(mean - 0.5) < 0.01);

    // Kolmogorov-Smirnov against the uniform CDF, 1% critical value.
    std::sort(u.begin(), u.end());
    double d = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
        const double hi = (static_cast<double>(i) + 1.0) / static_cast<double>(n) - u[i];
        const double lo = u[i] - static_cast<double>(i) / static_cast<double>(n);
        d = std::max({d, hi, lo});
    }
    CHECK(d < 1.628 / std::sqrt(static_cast<double>(n)));
}

TEST_CASE("uniform maps into the requested interval") {
    auto s = SeedTree(3).child("u").stream();
    for (int i = 0; i < 1000; ++i) {
        const double x = s.uniform(-2.5, 4.0);
        REQUIRE(x >= -2.5);
        REQUIRE(x < 4.0);
    }
    CHECK(s.uniform(1.25, 1.25) == 1.25);
    CHECK_THROWS_AS(s.uniform(1.0, 0.0), ubr::ParameterError);
    CHECK_THROWS_AS(s.uniform(0.0, std::numeric_limits<double>::infinity()),
                    ubr::ParameterError);
}

TEST_CASE("seed tree reproduces and separates streams") {
    const SeedTree root(42);

    auto a1 = root.child("xi", 3).stream();
    auto a2 = root.child("xi", 3).stream();
    for (int i = 0; i < 16; ++i) REQUIRE(a1.next_u64() == a2.next_u64());

    // distinct tag or index must give a different stream
    CHECK(root.child("xi", 3).stream().next_u64() != root.child("xi", 4).stream().next_u64());
    CHECK(root.child("xi", 3).stream().next_u64() !=
          root.child("eta", 3).stream().next_u64());
    CHECK(SeedTree(42).child("xi", 0).stream().next_u64() !=
          SeedTree(43).child("xi", 0).stream().next_u64());

    // nesting is order sensitive
    CHECK(root.child("a", 0).child("b", 0).stream().next_u64() !=
          root.child("b", 0).child("a", 0).stream().next_u64());

    CHECK(root.child("rep", 2).child("xi", 7).path_string() == "rep[2]/xi[7]");
    CHECK(root.master_seed() == 42);
}

TEST_CASE("sibling streams are uncorrelated") {
    const SeedTree root(2024);
    auto sa = root.child("xi", 0).stream();
    auto sb = root.child("xi", 1).stream();
    const std::size_t n = 100000;
    double sum_a = 0, sum_b = 0, sum_ab = 0, sum_a2 = 0, sum_b2 = 0;
    for (std::size_t i = 0; i < n; ++i) {
        const double a = sa.next_unit();
        const double b = sb.next_unit();
        sum_a += a;
        sum_b += b;
        sum_ab += a * b;
        sum_a2 += a * a;
        sum_b2 += b * b;
    }
    const double nd = static_cast<double>(n);
    const double cov = sum_ab / nd - (sum_a / nd) * (sum_b / nd);
    const double var_a = sum_a2 / nd - (sum_a / nd) * (sum_a / nd);
    const double var_b = sum_b2 / nd - (sum_b / nd) * (sum_b / nd);
    CHECK(std::fabs(cov / std::sqrt(var_a * var_b)) < 0.01);
}

TEST_CASE("divergent detune inverse map hits its anchors") {
    const IRDivergentSpec spec{1e-5, 12400.0, true};
    CHECK(ubr::ir_magnitude_from_unit(0.0, spec) == 0.0);
    // log(1 + kappa_max/epsilon) for these values
    CHECK_THAT(ubr::ir_domain_bound(spec),
               Catch::Matchers::WithinAbs(20.938377, 1e-4));
    const double near_max = ubr::ir_magnitude_from_unit(1.0 - 1e-12, spec);
    CHECK(near_max <= spec.kappa_max * (1.0 + 1e-9));
    CHECK(near_max > spec.kappa_max * 0.999);

    // CDF round trip
    for (double u : {0.1, 0.37, 0.5, 0.93}) {
        const double kappa = ubr::ir_magnitude_from_unit(u, spec);
        CHECK_THAT(ubr::ir_cdf(kappa, spec), Catch::Matchers::WithinAbs(u, 1e-12));
    }

    IRDivergentSpec bad = spec;
    bad.epsilon = 0.0;
    CHECK_THROWS_AS(bad.validate(), ubr::ParameterError);
    bad = spec;
    bad.kappa_max = 1e-6; // below epsilon
    CHECK_THROWS_AS(bad.validate(), ubr::ParameterError);
}

TEST_CASE("divergent detune draws follow the 1/(kappa+epsilon) decade weights") {
    const IRDivergentSpec spec{1e-5, 12400.0, true};
    const std::size_t n = 100000;
    auto s = SeedTree(5).child("kappa").stream();

    std::vector<double> mags;
    mags.reserve(n);
    double sign_sum = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
        const double k = ubr::sample_ir_divergent(spec, s);
        sign_sum += (k >= 0.0) ? 1.0 : -1.0;
        mags.push_back(std::fabs(k));
        REQUIRE(std::fabs(k) <= spec.kappa_max * (1.0 + 1e-12));
    }
    CHECK(std::fabs(sign_sum) / static_cast<double>(n) < 0.02);

    const double bound = ubr::ir_domain_bound(spec);
    for (double lo = 1e-4; lo < 2e3; lo *= 10.0) {
        const double hi = lo * 10.0;
        const double expected =
            (std::log1p(std::min(hi, spec.kappa_max) / spec.epsilon) -
             std::log1p(lo / spec.epsilon)) /
            bound;
        const auto count = static_cast<double>(
            std::count_if(mags.begin(), mags.end(),
                          [&](double m) { return m >= lo && m < hi; }));
        const double frac = count / static_cast<double>(n);
        INFO("decade [" << lo << ", " << hi << "): got " << frac << " expected " << expected);
        CHECK(std::fabs(frac - expected) < 0.05 * expected + 3.0 / std::sqrt(double(n)));
    }
}

TEST_CASE("asymmetric spec draws only non-negative shifts") {
    const IRDivergentSpec spec{1e-3, 100.0, false};
    auto s = SeedTree(11).child("kappa").stream();
    for (int i = 0; i < 2000; ++i) REQUIRE(ubr::sample_ir_divergent(spec, s) >= 0.0);
}
