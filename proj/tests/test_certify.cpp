#include <doctest.h>

#include <cmath>
#include <stdexcept>
#include <vector>

#include "radbound/bounds.hpp"
#include "radbound/certify.hpp"
#include "radbound/presets.hpp"

using namespace radbound;

namespace {
constexpr bounds::ConstantMode kUnit{};
constexpr bounds::ConstantMode kTraced{bounds::ConstantKind::Traced, 1.0};
}  // namespace

TEST_CASE("subroot check on canonical shapes") {
    certify::SubRootProbe sqrt_probe;
    sqrt_probe.psi = [](double r) { return std::sqrt(r); };
    sqrt_probe.grid = bounds::log_grid(1e-8, 10.0, 25);
    CHECK(certify::subroot_check(sqrt_probe).all());

    certify::SubRootProbe square_probe;
    square_probe.psi = [](double r) { return r * r; };
    square_probe.grid = bounds::log_grid(1e-4, 10.0, 25);
    const auto rep = certify::subroot_check(square_probe);
    CHECK(rep.nonnegative);
    CHECK(rep.nondecreasing);
    CHECK(!rep.ratio_nonincreasing);

    certify::SubRootProbe short_probe;
    short_probe.psi = sqrt_probe.psi;
    short_probe.grid = {0.1, 0.2};
    CHECK_THROWS_AS(certify::subroot_check(short_probe), std::invalid_argument);

    // A regime branch-2 curve is sub-root.
    certify::SubRootProbe cor_probe;
    cor_probe.psi = [](double r) {
        return bounds::cor33_branch2(cover::LogPoly{1, 1, 1}, 1.0, r, 100,
                                     kUnit);
    };
    cor_probe.grid = bounds::log_grid(1e-8, 1.0, 25);
    CHECK(certify::subroot_check(cor_probe).all());
}

TEST_CASE("fixed point closed forms") {
    certify::SubRootProbe probe;
    probe.psi = [](double r) { return std::sqrt(0.04 * r); };
    probe.grid = bounds::log_grid(1e-10, 1.0, 25);
    auto fp = certify::fixed_point(probe, 1e-12);
    CHECK(fp.r_star == doctest::Approx(0.04).epsilon(1e-9));

    certify::SubRootProbe constant;
    constant.psi = [](double) { return 0.1; };
    constant.grid = bounds::log_grid(1e-10, 1.0, 25);
    fp = certify::fixed_point(constant, 1e-12);
    CHECK(fp.r_star == doctest::Approx(0.1).epsilon(1e-9));

    // Quadratic in sqrt(r): r* = (0.2 + sqrt(0.08))^2 / 4.
    certify::SubRootProbe affine;
    affine.psi = [](double r) { return 0.01 + std::sqrt(0.04 * r); };
    affine.grid = bounds::log_grid(1e-10, 1.0, 25);
    fp = certify::fixed_point(affine, 1e-12);
    const double closed = std::pow(0.2 + std::sqrt(0.08), 2) / 4.0;
    CHECK(std::abs(fp.r_star - closed) / closed <= 1e-10);
    CHECK(fp.residual <= 1e-12);

    certify::SubRootProbe bad;
    bad.psi = [](double r) { return r * r; };
    bad.grid = bounds::log_grid(1e-4, 10.0, 25);
    CHECK_THROWS_AS(certify::fixed_point(bad, 1e-12), std::invalid_argument);
}

TEST_CASE("fixed point monotone under pointwise-ordered probes") {
    for (int c = 0; c < 20; ++c) {
        const double a1 = 0.001 + 0.002 * c;
        const double b1 = 0.01 + 0.01 * c;
        certify::SubRootProbe p1, p2;
        p1.psi = [a1, b1](double r) { return a1 + std::sqrt(b1 * r); };
        p2.psi = [a1, b1](double r) {
            return (a1 + 0.01) + std::sqrt((b1 + 0.1) * r);
        };
        p1.grid = p2.grid = bounds::log_grid(1e-10, 4.0, 25);
        CHECK(certify::fixed_point(p1, 1e-12).r_star <=
              certify::fixed_point(p2, 1e-12).r_star + 1e-10);
    }
}

TEST_CASE("bartlett bound arithmetic") {
    certify::CertificateParams params;
    params.B = 1.0;
    params.K = 2.0;
    params.delta = std::exp(-3.0);  // t = 3
    params.range_width = 1.0;
    params.L = 1.0;
    params.b = 1.0;
    params.regime = cover::LogPoly{1.0, 1.0, 1.0};

    auto cert = certify::bartlett_bound(0.0, 0.01, params, 1000);
    CHECK(cert.empirical_term == 0.0);
    CHECK(cert.fixed_point_term == doctest::Approx(14.08).epsilon(1e-12));
    CHECK(cert.confidence_term == doctest::Approx(0.189).epsilon(1e-12));
    CHECK(cert.total == doctest::Approx(14.269).epsilon(1e-12));

    // Doubling n halves the confidence term only.
    auto cert2 = certify::bartlett_bound(0.0, 0.01, params, 2000);
    CHECK(cert2.fixed_point_term == cert.fixed_point_term);
    CHECK(cert2.confidence_term ==
          doctest::Approx(cert.confidence_term / 2.0).epsilon(1e-12));

    // All terms vanish in the no-confidence, zero-radius corner.
    certify::CertificateParams loose = params;
    loose.delta = 1.0;
    auto zero = certify::bartlett_bound(0.0, 0.0, loose, 1000);
    CHECK(zero.total == 0.0);

    certify::CertificateParams bad = params;
    bad.K = 1.0;
    CHECK_THROWS_AS(certify::bartlett_bound(0.0, 0.01, bad, 1000),
                    std::invalid_argument);
}

TEST_CASE("loss regime transform") {
    const auto lp = certify::loss_regime_transform(
        cover::EntropyRegime{cover::LogPoly{2.0, 1.5, 3.0}}, 1.0);
    CHECK(std::get<cover::LogPoly>(lp.variant).gamma == 3.0);

    const auto lp2 = certify::loss_regime_transform(
        cover::EntropyRegime{cover::LogPoly{2.0, 1.5, 3.0}}, 2.0);
    CHECK(std::get<cover::LogPoly>(lp2.variant).gamma == 6.0);

    // Hand algebra: (eps/3)^-p = 3^p eps^-p.
    const auto po = certify::loss_regime_transform(
        cover::EntropyRegime{cover::Poly{1.0, 2.0}}, 3.0);
    CHECK(std::get<cover::Poly>(po.variant).gamma ==
          doctest::Approx(9.0).epsilon(1e-12));

    CHECK_THROWS_AS(certify::loss_regime_transform(
                        cover::EntropyRegime{cover::Poly{1.0, 2.0}}, 0.0),
                    std::invalid_argument);

    // The transformed evaluator dominates the composed one below eps = 1 (the
    // range the certificates evaluate).
    const cover::PolyLog pl{1.0, 1.0};
    const double L = 2.5;
    const auto transformed = certify::loss_regime_transform(
        cover::EntropyRegime{pl}, L);
    for (double eps : {0.01, 0.1, 0.5, 1.0}) {
        const double composed =
            cover::regime_entropy(cover::EntropyRegime{pl}, eps / L);
        CHECK(cover::regime_entropy(transformed, eps) >= composed - 1e-12);
    }
}

TEST_CASE("logpoly certificate closed form matches independent arithmetic") {
    certify::CertificateParams params;
    params.B = 1.0;
    params.K = 2.0;
    params.delta = std::exp(-3.0);
    params.range_width = 1.0;
    params.L = 1.0;
    params.b = 1.0;
    params.regime = cover::LogPoly{1.0, 1.0, 1.0};
    const std::size_t n = 10000;

    const auto cert = certify::certificate_logpoly(params, n, kUnit);
    // psi(r) = u + sqrt(u r) with u = log(2 sqrt(n))/n; fixed point
    // r* = u ((1 + sqrt(5))/2)^2.
    const double u = std::log(2.0 * std::sqrt(10000.0)) / 10000.0;
    const double golden = 0.5 * (1.0 + std::sqrt(5.0));
    CHECK(cert.r_star == doctest::Approx(u * golden * golden).epsilon(1e-10));
    CHECK(cert.empirical_term == 0.0);
    CHECK(cert.total ==
          doctest::Approx(704.0 * 2.0 * cert.r_star +
                          3.0 * (11.0 + 52.0) / 10000.0)
              .epsilon(1e-12));

    // delta = 1 kills the confidence term.
    certify::CertificateParams loose = params;
    loose.delta = 1.0;
    CHECK(certify::certificate_logpoly(loose, n, kUnit).confidence_term == 0.0);
}

TEST_CASE("logpoly certificate rate regression") {
    // gamma = 1/2 makes log(2 gamma sqrt(n)) = log(n)/2 exactly, so the joint
    // fit on (log n, log log n) recovers slope -1 and the log power exactly.
    for (double p : {1.0, 2.0}) {
        certify::CertificateParams params;
        params.B = 1.0;
        params.K = 2.0;
        params.delta = 0.05;
        params.range_width = 1.0;
        params.L = 1.0;
        params.b = 1.0;
        params.regime = cover::LogPoly{1.0, p, 0.5};
        std::vector<double> xs, hs, ys;  // log n, log log n, log term
        for (int k = 8; k <= 20; ++k) {
            const std::size_t n = 1ULL << k;
            const auto cert = certify::certificate_logpoly(params, n, kUnit);
            xs.push_back(std::log(static_cast<double>(n)));
            hs.push_back(std::log(std::log(static_cast<double>(n))));
            ys.push_back(std::log(cert.fixed_point_term));
        }
        // Least squares y = a + beta x + q h via normal equations.
        const std::size_t m = xs.size();
        double sx = 0, sh = 0, sy = 0, sxx = 0, shh = 0, sxh = 0, sxy = 0,
               shy = 0;
        for (std::size_t i = 0; i < m; ++i) {
            sx += xs[i];
            sh += hs[i];
            sy += ys[i];
            sxx += xs[i] * xs[i];
            shh += hs[i] * hs[i];
            sxh += xs[i] * hs[i];
            sxy += xs[i] * ys[i];
            shy += hs[i] * ys[i];
        }
        const double mn = static_cast<double>(m);
        // Solve the 3x3 system [mn sx sh; sx sxx sxh; sh sxh shh] [a b q]^T.
        const double a11 = mn, a12 = sx, a13 = sh;
        const double a22 = sxx, a23 = sxh, a33 = shh;
        const double b1 = sy, b2 = sxy, b3 = shy;
        const double det = a11 * (a22 * a33 - a23 * a23) -
                           a12 * (a12 * a33 - a23 * a13) +
                           a13 * (a12 * a23 - a22 * a13);
        const double beta = (a11 * (b2 * a33 - a23 * b3) -
                             b1 * (a12 * a33 - a23 * a13) +
                             a13 * (a12 * b3 - b2 * a13)) /
                            det;
        const double q = (a11 * (a22 * b3 - b2 * a23) -
                          a12 * (a12 * b3 - b2 * a13) +
                          b1 * (a12 * a23 - a22 * a13)) /
                         det;
        CHECK(beta == doctest::Approx(-1.0).epsilon(0.05));
        CHECK(q == doctest::Approx(p).epsilon(0.10));
    }
}

TEST_CASE("polylog certificate matches independent arithmetic") {
    certify::CertificateParams params;
    params.B = 1.0;
    params.K = 2.0;
    params.delta = 0.05;
    params.range_width = 1.0;
    params.L = 1.0;
    params.b = 1.0;
    params.regime = cover::PolyLog{1.0, 1.0};
    const std::size_t n = 1000000;

    const auto result = certify::certificate_polylog(params, n, kUnit);
    const double ln = std::log(1e6);
    const double eps0 = std::cbrt(ln * ln) / std::cbrt(1e6);
    CHECK(result.eps0 == doctest::Approx(eps0).epsilon(1e-12));
    const double l1 = std::log(1.0 / eps0);
    const double l4 = std::log(4.0 / eps0);
    const double u = std::sqrt(eps0) * l1 / 1000.0 + l4 * l4 / (eps0 * 1e6);
    const double w = std::sqrt(l4 * l4 / (eps0 * 1e6));
    const double expected_r = std::pow(0.5 * (w + std::sqrt(w * w + 4 * u)), 2);
    CHECK(result.certificate.r_star ==
          doctest::Approx(expected_r).epsilon(1e-10));
    // Proof-side and printed-rate prefixes disagree: both are reported.
    CHECK(result.proof_rate ==
          doctest::Approx(std::pow(1e6, -2.0 / 3.0) * std::cbrt(ln) *
                          std::log(1e6 / std::cbrt(ln * ln)))
              .epsilon(1e-12));
    CHECK(result.printed_rate ==
          doctest::Approx(std::pow(1e6, -1.0 / 3.0) * std::cbrt(ln) *
                          std::log(1e6 / std::cbrt(ln * ln)))
              .epsilon(1e-12));

    certify::CertificateParams bad = params;
    bad.regime = cover::PolyLog{1.0, 2.0};
    CHECK_THROWS_AS(certify::certificate_polylog(bad, n, kUnit),
                    std::invalid_argument);
    CHECK_THROWS_AS(certify::certificate_polylog(params, 2, kUnit),
                    std::invalid_argument);
}

TEST_CASE("polylog confidence term is linear in log(1/delta)") {
    certify::CertificateParams params;
    params.B = 1.0;
    params.K = 2.0;
    params.delta = std::exp(-2.0);
    params.range_width = 1.0;
    params.L = 1.0;
    params.b = 1.0;
    params.regime = cover::PolyLog{1.0, 1.0};
    const auto once = certify::certificate_polylog(params, 1000, kUnit);
    params.delta = std::exp(-4.0);
    const auto twice = certify::certificate_polylog(params, 1000, kUnit);
    CHECK(twice.certificate.confidence_term ==
          doctest::Approx(2.0 * once.certificate.confidence_term)
              .epsilon(1e-12));
    CHECK(twice.certificate.fixed_point_term ==
          once.certificate.fixed_point_term);
}

TEST_CASE("traced certificates dominate unit certificates") {
    certify::CertificateParams params;
    params.B = 1.0;
    params.K = 2.0;
    params.delta = 0.05;
    params.range_width = 1.0;
    params.L = 1.0;
    params.b = 1.0;
    params.regime = cover::LogPoly{1.0, 1.0, 1.0};
    for (std::size_t n : {100ul, 10000ul}) {
        const auto unit = certify::certificate_logpoly(params, n, kUnit);
        const auto traced = certify::certificate_logpoly(params, n, kTraced);
        CHECK(traced.total >= unit.total);
        CHECK(traced.r_star >= unit.r_star);
    }
}

TEST_CASE("erm preset constants are consistent") {
    const auto preset = presets::make_erm_preset();
    CHECK(preset.y_cap() == doctest::Approx(1.25));
    CHECK(preset.loss_lipschitz() == doctest::Approx(4.5));
    CHECK(preset.loss_cap() == doctest::Approx(9.0));
    CHECK(preset.range_width() == doctest::Approx(18.0));
    CHECK(preset.variance_constant() == doctest::Approx(20.25));
    const auto params = preset.certificate_params(2.0, 0.05);
    CHECK(params.B == doctest::Approx(20.25));
    params.validate();
}

TEST_CASE("small erm run: zero-noise trivial family and a quick batch") {
    // Trivial family {target}: excess risk is identically 0.
    certify::ErmPreset trivial;
    trivial.spec.variant = family::FiniteRandom{1, 1.0, 3, 16};
    trivial.spec.declared_regime = cover::LogPoly{1.0, 1.0, 2.0 * std::exp(1.0)};
    trivial.target_index = 0;
    trivial.noise = 0.0;
    trivial.ghost_n = 2000;
    const auto params = trivial.certificate_params(2.0, 0.05);
    const auto report =
        certify::erm_experiment(trivial, 32, 10, params, 9, kUnit, 2);
    CHECK(report.coverage == 1.0);
    for (const auto& trial : report.trials)
        CHECK(trial.excess_risk <= 1e-12);

    // Quick batch on the shipped preset.
    auto preset = presets::make_erm_preset();
    preset.ghost_n = 5000;
    const auto batch_params = preset.certificate_params(2.0, 0.05);
    const auto batch =
        certify::erm_experiment(preset, 64, 20, batch_params, 11, kTraced, 4);
    CHECK(batch.coverage == 1.0);
    CHECK(batch.certificate.total > 0.0);
}

TEST_CASE("erm experiment is deterministic across thread counts") {
    certify::ErmPreset preset = presets::make_erm_preset();
    preset.ghost_n = 2000;
    const auto params = preset.certificate_params(2.0, 0.05);
    const auto a = certify::erm_experiment(preset, 32, 8, params, 5, kUnit, 1);
    const auto b = certify::erm_experiment(preset, 32, 8, params, 5, kUnit, 4);
    for (std::size_t t = 0; t < a.trials.size(); ++t) {
        CHECK(a.trials[t].excess_risk == b.trials[t].excess_risk);
        CHECK(a.trials[t].seed == b.trials[t].seed);
    }
}
