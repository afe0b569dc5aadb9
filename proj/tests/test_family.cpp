#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <set>
#include <vector>

#include "radbound/family.hpp"
#include "radbound/presets.hpp"
#include "radbound/rng.hpp"

using namespace radbound;

TEST_CASE("single point plan gives one weighted point") {
    family::SamplePlan plan{1, 1, 7};
    const auto sample = family::draw_sample(plan);
    CHECK(sample.n == 1);
    CHECK(sample.weight() == 1.0);
    CHECK(sample.coords[0] >= 0.0);
    CHECK(sample.coords[0] < 1.0);
}

TEST_CASE("same seed reproduces the sample") {
    family::SamplePlan plan{4, 2, 7};
    const auto a = family::draw_sample(plan);
    const auto b = family::draw_sample(plan);
    CHECK(a.coords == b.coords);
}

TEST_CASE("large sample mean matches the uniform law") {
    // Tolerance 3 sigma with sigma^2 = 1/12 per coordinate.
    family::SamplePlan plan{10000, 1, 3};
    const auto sample = family::draw_sample(plan);
    double mean = 0.0;
    for (double c : sample.coords) mean += c;
    mean /= 10000.0;
    CHECK(std::abs(mean - 0.5) <= 3.0 / std::sqrt(12.0 * 10000.0));
}

TEST_CASE("plan validation") {
    CHECK_THROWS_AS(family::draw_sample(family::SamplePlan{0, 1, 1}),
                    std::invalid_argument);
    CHECK_THROWS_AS(family::draw_sample(family::SamplePlan{1, 0, 1}),
                    std::invalid_argument);
}

namespace {

family::FunctionFamilySpec linear_spec(std::size_t dim, double radius,
                                       std::size_t count) {
    family::FunctionFamilySpec spec;
    spec.variant = family::LinearBall{dim, radius, count, std::max(radius, 1.0)};
    spec.declared_regime =
        cover::LogPoly{static_cast<double>(dim), 1.0, 6.0 * std::max(radius, 1.0)};
    return spec;
}

}  // namespace

TEST_CASE("linear ball with only the zero weight projects to one zero row") {
    auto spec = linear_spec(2, 0.0, 1);
    const auto sample = family::draw_sample({3, 2, 11});
    const auto pf = family::project(spec, sample);
    CHECK(pf.m == 1);
    for (double v : pf.row(0)) CHECK(v == 0.0);
}

TEST_CASE("finite random projection respects the cap") {
    family::FunctionFamilySpec spec;
    spec.variant = family::FiniteRandom{5, 1.0, 21, 16};
    spec.declared_regime = cover::LogPoly{std::log(5.0), 1.0, 2.0 * std::exp(1.0)};
    const auto sample = family::draw_sample({3, 1, 5});
    const auto pf = family::project(spec, sample);
    CHECK(pf.m == 5);
    CHECK(pf.n == 3);
    for (double v : pf.values) CHECK(std::abs(v) <= 1.0);
}

TEST_CASE("projection is deterministic") {
    auto spec = presets::make_preset("finite");
    const auto sample = family::draw_sample({6, 1, 13});
    const auto a = family::project(spec, sample);
    const auto b = family::project(spec, sample);
    CHECK(a.values == b.values);
}

namespace {

// Independent path enumeration for the Lipschitz oracle: breadth-first over
// value sequences, then projection + dedup by exact comparison on quantized
// values.
std::size_t lipschitz_projected_count(double L, double b, std::size_t res,
                                      const family::EmpiricalSample& sample) {
    const double s = L / static_cast<double>(res);
    std::vector<std::vector<double>> paths;
    for (double start = -b; start <= b + 1e-12; start += s)
        paths.push_back({std::min(start, b)});
    for (std::size_t level = 0; level < res; ++level) {
        std::vector<std::vector<double>> next;
        for (const auto& path : paths) {
            for (int d = -1; d <= 1; ++d) {
                const double v = path.back() + d * s;
                if (v < -b - 1e-12 || v > b + 1e-12) continue;
                auto extended = path;
                extended.push_back(std::min(b, std::max(-b, v)));
                next.push_back(std::move(extended));
            }
        }
        paths = std::move(next);
    }
    std::set<std::vector<long long>> distinct;
    for (const auto& path : paths) {
        std::vector<long long> key;
        for (std::size_t j = 0; j < sample.n; ++j) {
            const double x = sample.point(j)[0] * static_cast<double>(res);
            std::size_t seg = std::min<std::size_t>(static_cast<std::size_t>(x),
                                                    res - 1);
            const double frac = x - static_cast<double>(seg);
            const double value =
                path[seg] + frac * (path[seg + 1] - path[seg]);
            key.push_back(std::llround(value * 1e9));
        }
        distinct.insert(key);
    }
    return distinct.size();
}

}  // namespace

TEST_CASE("lipschitz projection row count matches brute-force path count") {
    family::FunctionFamilySpec spec;
    spec.variant = family::LipschitzBall{1.0, 1.0, 8};
    spec.declared_regime = cover::Poly{20.0, 1.0};
    const auto sample = family::draw_sample({3, 1, 99});
    const auto pf = family::project(spec, sample);
    CHECK(pf.m == lipschitz_projected_count(1.0, 1.0, 8, sample));
}

TEST_CASE("minus family of a single row is the zero row") {
    auto pf = family::make_projected({0.5, -0.25}, 1, 2, 1.0, "t");
    const auto minus = family::minus_family(pf);
    CHECK(minus.m == 1);
    CHECK(minus.row(0)[0] == 0.0);
    CHECK(minus.sup_bound == 2.0);
}

TEST_CASE("two distinct rows give three difference rows") {
    auto pf = family::make_projected({1.0, 0.0, 0.0, 1.0}, 2, 2, 1.0, "t");
    const auto minus = family::minus_family(pf);
    CHECK(minus.m == 3);
}

TEST_CASE("three-row example gives seven difference rows") {
    auto pf = family::make_projected({1, 0, 0, 1, 1, 1}, 3, 2, 1.0, "t");
    const auto minus = family::minus_family(pf);
    CHECK(minus.m == 7);
}

TEST_CASE("minus family contains the negation of each row") {
    auto g = make_engine(4242, 0);
    std::vector<double> table(5 * 4);
    for (double& v : table) v = uniform(g, -1.0, 1.0);
    auto pf = family::make_projected(std::move(table), 5, 4, 1.0, "t");
    const auto minus = family::minus_family(pf);
    CHECK(minus.m <= pf.m * pf.m);
    CHECK(minus.m >= 1);
    for (std::size_t i = 0; i < minus.m; ++i) {
        bool found = false;
        for (std::size_t j = 0; j < minus.m && !found; ++j) {
            bool neg = true;
            for (std::size_t k = 0; k < minus.n; ++k)
                if (std::abs(minus.row(i)[k] + minus.row(j)[k]) > 1e-12) {
                    neg = false;
                    break;
                }
            found = neg;
        }
        CHECK(found);
    }
}

TEST_CASE("duplicate rows are removed up to tolerance") {
    std::vector<double> table{0.5, 0.5, 0.5, 0.5 + 1e-13, 0.25, 0.5};
    auto pf = family::make_projected(std::move(table), 3, 2, 1.0, "t");
    CHECK(pf.m == 2);
}

TEST_CASE("minus family row cap subsamples with a flag") {
    auto g = make_engine(9, 0);
    const std::size_t m = 300;  // 90000 pairs > 50000 cap
    std::vector<double> table(m * 2);
    for (double& v : table) v = uniform(g, -1.0, 1.0);
    auto pf = family::make_projected(std::move(table), m, 2, 1.0, "big");
    const auto minus = family::minus_family(pf);
    CHECK(minus.subsampled);
    CHECK(minus.m <= family::kMinusRowCap);
    bool has_zero = false;
    for (std::size_t i = 0; i < minus.m && !has_zero; ++i) {
        bool zero = true;
        for (double v : minus.row(i)) zero = zero && v == 0.0;
        has_zero = zero;
    }
    CHECK(has_zero);
}

TEST_CASE("projection rejects mismatched domains") {
    auto spec = linear_spec(2, 1.0, 3);
    const auto sample = family::draw_sample({4, 1, 3});
    CHECK_THROWS_AS(family::project(spec, sample), std::invalid_argument);
}

TEST_CASE("empty family after dedup is rejected via degenerate spec") {
    CHECK_THROWS_AS(family::make_projected({}, 0, 0, 1.0, "t"),
                    std::invalid_argument);
}

TEST_CASE("regime consistency is enforced") {
    family::FunctionFamilySpec spec;
    spec.variant = family::LinearBall{2, 1.0, 3, 1.0};
    spec.declared_regime = cover::Poly{1.0, 1.0};  // wrong family
    CHECK_THROWS_AS(spec.validate(), std::invalid_argument);
}
