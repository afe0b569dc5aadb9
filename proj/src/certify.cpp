#include "radbound/certify.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <sstream>
#include <stdexcept>

#include "radbound/parallel.hpp"
#include "radbound/rademacher.hpp"
#include "radbound/rng.hpp"

namespace radbound::certify {

namespace {
const double kLog2 = std::log(2.0);
}

// ---------------------------------------------------------------------------
// Sub-root verification and fixed points
// ---------------------------------------------------------------------------

SubRootReport subroot_check(const SubRootProbe& probe) {
    if (probe.grid.size() < 3)
        throw std::invalid_argument("subroot_check: need at least 3 grid points");
    if (!probe.psi) throw std::invalid_argument("subroot_check: empty evaluator");
    SubRootReport report;
    report.nonnegative = true;
    report.nondecreasing = true;
    report.ratio_nonincreasing = true;
    double prev = 0.0, prev_ratio = 0.0;
    for (std::size_t i = 0; i < probe.grid.size(); ++i) {
        const double r = probe.grid[i];
        if (!(r > 0) || (i > 0 && !(r > probe.grid[i - 1])))
            throw std::invalid_argument(
                "subroot_check: grid must be positive and ascending");
        const double v = probe.psi(r);
        if (!std::isfinite(v))
            throw std::invalid_argument("subroot_check: evaluator not finite");
        const double tol = 1e-9 * std::max(1.0, std::abs(v));
        if (v < -tol) report.nonnegative = false;
        const double ratio = v / std::sqrt(r);
        if (i > 0) {
            if (v < prev - tol) report.nondecreasing = false;
            if (ratio > prev_ratio * (1.0 + 1e-9) + 1e-15)
                report.ratio_nonincreasing = false;
        }
        prev = v;
        prev_ratio = ratio;
    }
    return report;
}

FixedPointResult fixed_point(const SubRootProbe& probe, double tolerance) {
    if (!(tolerance > 0))
        throw std::invalid_argument("fixed_point: tolerance must be > 0");
    const auto report = subroot_check(probe);
    if (!report.all())
        throw std::invalid_argument(
            "fixed_point: probe is not sub-root; the fixed point may not be "
            "unique");
    const double r_max = probe.grid.back();
    double lo = tolerance;
    double hi = probe.psi(r_max) + r_max;
    FixedPointResult result;
    auto h = [&](double r) { return probe.psi(r) - r; };
    double h_lo = h(lo);
    if (h_lo < 0) {
        // psi vanishes below the tolerance scale; report the bracket edge.
        result.r_star = lo;
        result.residual = -h_lo;
        return result;
    }
    if (h(hi) > 0)
        throw std::runtime_error("fixed_point: upper bracket does not cross");
    for (int it = 0; it < 200; ++it) {
        const double mid = 0.5 * (lo + hi);
        const double hm = h(mid);
        ++result.iterations;
        result.r_star = mid;
        result.residual = std::abs(hm);
        if (result.residual <= tolerance) return result;
        if (hm > 0)
            lo = mid;
        else
            hi = mid;
    }
    return result;
}

// ---------------------------------------------------------------------------
// Certificates
// ---------------------------------------------------------------------------

void CertificateParams::validate() const {
    if (!(B > 0)) throw std::invalid_argument("certificate: B must be > 0");
    if (!(K > 1)) throw std::invalid_argument("certificate: K must be > 1");
    if (!(delta > 0) || !(delta <= 1))
        throw std::invalid_argument("certificate: delta must lie in (0, 1]");
    if (!(range_width >= 0))
        throw std::invalid_argument("certificate: range_width must be >= 0");
    if (!(L > 0)) throw std::invalid_argument("certificate: L must be > 0");
    if (!(b > 0)) throw std::invalid_argument("certificate: b must be > 0");
    regime.validate();
}

GeneralizationCertificate bartlett_bound(double empirical_mean, double r_star,
                                         const CertificateParams& params,
                                         std::size_t n) {
    params.validate();
    if (n < 1) throw std::invalid_argument("bartlett_bound: n >= 1");
    if (r_star < 0) throw std::invalid_argument("bartlett_bound: r_star >= 0");
    const double t = std::log(1.0 / params.delta);
    GeneralizationCertificate cert;
    cert.n = n;
    cert.r_star = r_star;
    cert.empirical_term = params.K / (params.K - 1.0) * empirical_mean;
    cert.fixed_point_term = 704.0 * params.K / params.B * r_star;
    cert.confidence_term = t *
                           (11.0 * params.range_width + 26.0 * params.B * params.K) /
                           static_cast<double>(n);
    cert.total = cert.empirical_term + cert.fixed_point_term + cert.confidence_term;
    return cert;
}

cover::EntropyRegime loss_regime_transform(const cover::EntropyRegime& regime,
                                           double L) {
    regime.validate();
    if (!(L > 0))
        throw std::invalid_argument("loss_regime_transform: L must be > 0");
    if (const auto* lp = std::get_if<cover::LogPoly>(&regime.variant)) {
        // d log^p(gamma/(eps/L)) = d log^p(gamma L / eps)
        return cover::LogPoly{lp->d, lp->p, lp->gamma * L};
    }
    if (const auto* po = std::get_if<cover::Poly>(&regime.variant)) {
        // gamma (eps/L)^-p = gamma L^p eps^-p
        return cover::Poly{po->gamma * std::pow(L, po->p), po->p};
    }
    const auto& pl = std::get<cover::PolyLog>(regime.variant);
    // gamma (eps/L)^-p log^2(2L/eps) <= gamma L^p (1 + log(L)/log 2)^2
    //   * eps^-p log^2(2/eps) on eps <= 1 when L > 1 (log(2/eps) >= log 2
    // there); L <= 1 only shrinks the log factor. The certificates evaluate
    // the result strictly below 1.
    const double boost = L >= 1.0
                             ? (1.0 + std::log(L) / kLog2) * (1.0 + std::log(L) / kLog2)
                             : 1.0;
    return cover::PolyLog{pl.gamma * std::pow(L, pl.p) * boost, pl.p};
}

namespace {

// Positive root of r = u + w sqrt(r): sqrt(r*) = (w + sqrt(w^2 + 4u))/2.
double affine_sqrt_fixed_point(double u, double w) {
    const double s = 0.5 * (w + std::sqrt(w * w + 4.0 * u));
    return s * s;
}

}  // namespace

GeneralizationCertificate certificate_logpoly(const CertificateParams& params,
                                              std::size_t n,
                                              const bounds::ConstantMode& cmode) {
    params.validate();
    const auto transformed = loss_regime_transform(params.regime, params.L);
    const auto* lp = std::get_if<cover::LogPoly>(&transformed.variant);
    if (!lp)
        throw std::invalid_argument(
            "certificate_logpoly: requires a logpoly hypothesis regime");
    const double gamma = lp->gamma;
    if (static_cast<double>(n) < std::max(2.0, 1.0 / (gamma * gamma)))
        throw std::invalid_argument(
            "certificate_logpoly: n below max(2, gamma^-2)");
    const double c = bounds::apply_constant(
        cmode, bounds::cor33_traced_constant(params.b, lp->p, lp->d));
    const double dn = static_cast<double>(n);
    const double lpow = std::pow(std::log(2.0 * gamma * std::sqrt(dn)), lp->p);
    const double term = lp->d * lpow / dn;
    const double u = params.B * c * term;        // psi(r) = u + w sqrt(r)
    const double w = params.B * c * std::sqrt(term);
    const double r_star = affine_sqrt_fixed_point(u, w);

    // Cross-check against bisection on the same psi.
    SubRootProbe probe;
    probe.psi = [u, w](double r) { return u + w * std::sqrt(r); };
    probe.grid = bounds::log_grid(1e-12, std::max(1.0, 4.0 * r_star), 33);
    const auto fp = fixed_point(probe, 1e-14 * std::max(1.0, r_star));
    if (std::abs(fp.r_star - r_star) > 1e-9 * std::max(1.0, r_star))
        throw std::runtime_error(
            "certificate_logpoly: closed form and bisection disagree");

    return bartlett_bound(0.0, r_star, params, n);
}

PolylogCertificate certificate_polylog(const CertificateParams& params,
                                       std::size_t n,
                                       const bounds::ConstantMode& cmode) {
    params.validate();
    if (n < 3) throw std::invalid_argument("certificate_polylog: n >= 3");
    const auto transformed = loss_regime_transform(params.regime, params.L);
    const auto* pl = std::get_if<cover::PolyLog>(&transformed.variant);
    if (!pl)
        throw std::invalid_argument(
            "certificate_polylog: requires a polylog hypothesis regime");
    const double p = pl->p;
    if (!(p > 0) || p >= 2.0)
        throw std::invalid_argument("certificate_polylog: requires 0 < p < 2");
    const double c = bounds::apply_constant(
        cmode, bounds::cor34_traced_constant(params.b, p, pl->gamma));

    const double dn = static_cast<double>(n);
    const double ln = std::log(dn);
    const double eps0 =
        std::pow(ln, 2.0 / (p + 2.0)) * std::pow(dn, -1.0 / (p + 2.0));
    const double l1 = std::log(1.0 / eps0);
    const double l4 = std::log(4.0 / eps0);
    const double epow = std::pow(eps0, -p);
    const double intercept =
        std::pow(eps0, 1.0 - p / 2.0) * l1 / std::sqrt(dn) +
        epow * l4 * l4 / dn;
    const double slope2 = epow * l4 * l4 / dn;  // coefficient under sqrt(r .)
    const double u = params.B * c * intercept;
    const double w = params.B * c * std::sqrt(slope2);
    const double r_star = affine_sqrt_fixed_point(u, w);

    PolylogCertificate out;
    out.certificate = bartlett_bound(0.0, r_star, params, n);
    out.eps0 = eps0;
    const double log_factor =
        std::pow(ln, (2.0 - p) / (p + 2.0)) *
        std::log(dn / std::pow(ln, 2.0 / (p + 2.0)));
    out.proof_rate = std::pow(dn, -2.0 / (p + 2.0)) * log_factor;
    out.printed_rate = std::pow(dn, -p / (p + 2.0)) * log_factor;
    return out;
}

// ---------------------------------------------------------------------------
// ERM harness
// ---------------------------------------------------------------------------

double ErmPreset::y_cap() const { return spec.sup_bound() + noise; }

double ErmPreset::loss_lipschitz() const {
    // |l(u,y) - l(v,y)| = |u - v| |u + v - 2y| for squared loss.
    return 2.0 * spec.sup_bound() + 2.0 * y_cap();
}

double ErmPreset::loss_cap() const {
    return 2.0 * spec.sup_bound() * loss_lipschitz();
}

double ErmPreset::range_width() const { return 2.0 * loss_cap(); }

double ErmPreset::variance_constant() const {
    const double L = loss_lipschitz();
    return L * L;
}

CertificateParams ErmPreset::certificate_params(double K, double delta) const {
    CertificateParams params;
    params.B = variance_constant();
    params.K = K;
    params.delta = delta;
    params.range_width = range_width();
    params.L = loss_lipschitz();
    params.b = loss_cap();
    params.regime = spec.declared_regime;
    return params;
}

namespace {

struct XY {
    std::vector<double> x;  // point-major coords
    std::vector<double> y;
    std::size_t n = 0;
    std::size_t dim = 1;
};

XY draw_xy(const family::FamilyEvaluator& ev, std::size_t target, double noise,
           std::size_t n, std::uint64_t seed) {
    XY data;
    data.n = n;
    data.dim = ev.domain_dim();
    family::SamplePlan plan{n, data.dim, seed};
    auto sample = family::draw_sample(plan);
    data.x = std::move(sample.coords);
    data.y.resize(n);
    auto g = make_engine(seed, 0x6e6f697365ULL);
    for (std::size_t j = 0; j < n; ++j) {
        std::span<const double> pt{data.x.data() + j * data.dim, data.dim};
        data.y[j] = ev.eval(target, pt) + uniform(g, -noise, noise);
    }
    return data;
}

double mean_squared_loss(const family::FamilyEvaluator& ev, std::size_t member,
                         const XY& data) {
    double acc = 0.0;
    for (std::size_t j = 0; j < data.n; ++j) {
        std::span<const double> pt{data.x.data() + j * data.dim, data.dim};
        const double d = ev.eval(member, pt) - data.y[j];
        acc += d * d;
    }
    return acc / static_cast<double>(data.n);
}

}  // namespace

ErmReport erm_experiment(const ErmPreset& preset, std::size_t n,
                         std::size_t trials, const CertificateParams& params,
                         std::uint64_t seed, const bounds::ConstantMode& cmode,
                         int threads) {
    preset.spec.validate();
    params.validate();
    if (trials < 1) throw std::invalid_argument("erm_experiment: trials >= 1");
    family::FamilyEvaluator ev(preset.spec);
    if (preset.target_index >= ev.member_count())
        throw std::invalid_argument("erm_experiment: target index out of range");

    // Validate the variance-expectation condition P f^2 <= B P f for the
    // shifted loss family on a ghost sample.
    {
        const XY ghost = draw_xy(ev, preset.target_index, preset.noise,
                                 preset.ghost_n, seed ^ 0x42636865636bULL);
        const double target_loss =
            mean_squared_loss(ev, preset.target_index, ghost);
        for (std::size_t i = 0; i < ev.member_count(); ++i) {
            double first = 0.0, second = 0.0;
            for (std::size_t j = 0; j < ghost.n; ++j) {
                std::span<const double> pt{ghost.x.data() + j * ghost.dim,
                                           ghost.dim};
                const double dh = ev.eval(i, pt) - ghost.y[j];
                const double dt = ev.eval(preset.target_index, pt) - ghost.y[j];
                const double f = dh * dh - dt * dt;
                first += f;
                second += f * f;
            }
            first /= static_cast<double>(ghost.n);
            second /= static_cast<double>(ghost.n);
            const double slack =
                3.0 * params.b * params.b / std::sqrt(static_cast<double>(ghost.n));
            if (second > params.B * first + slack) {
                std::ostringstream os;
                os << "erm_experiment: variance-expectation check failed for "
                      "member "
                   << i << ": Pf^2=" << second << " > B*Pf=" << params.B * first
                   << " (Pf=" << first << ", target risk " << target_loss << ")";
                throw std::runtime_error(os.str());
            }
        }
    }

    ErmReport report;
    report.certificate = certificate_logpoly(params, n, cmode);
    report.trials.resize(trials);
    parallel_for(trials, threads, [&](std::size_t t) {
        std::uint64_t s = seed + 0x94d049bb133111ebULL * (t + 1);
        const std::uint64_t trial_seed = splitmix64(s);
        const XY data =
            draw_xy(ev, preset.target_index, preset.noise, n, trial_seed);
        std::size_t best = 0;
        double best_loss = mean_squared_loss(ev, 0, data);
        for (std::size_t i = 1; i < ev.member_count(); ++i) {
            const double loss = mean_squared_loss(ev, i, data);
            if (loss < best_loss) {
                best_loss = loss;
                best = i;
            }
        }
        const XY ghost = draw_xy(ev, preset.target_index, preset.noise,
                                 preset.ghost_n, trial_seed ^ 0x67686f7374ULL);
        const double excess = mean_squared_loss(ev, best, ghost) -
                              mean_squared_loss(ev, preset.target_index, ghost);
        auto& trial = report.trials[t];
        trial.seed = trial_seed;
        trial.excess_risk = excess;
        trial.certificate = report.certificate.total;
        trial.holds = excess <= report.certificate.total;
    });
    std::size_t held = 0;
    for (const auto& trial : report.trials) held += trial.holds ? 1 : 0;
    report.coverage = static_cast<double>(held) / static_cast<double>(trials);
    return report;
}

}  // namespace radbound::certify
