#include <pybind11/functional.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include <cstdint>
#include <variant>
#include <vector>

#include "radbound/bounds.hpp"
#include "radbound/certify.hpp"
#include "radbound/cover.hpp"
#include "radbound/family.hpp"
#include "radbound/presets.hpp"
#include "radbound/rademacher.hpp"
#include "radbound/version.hpp"

namespace py = pybind11;
using namespace radbound;

namespace {

cover::EntropyRegime regime_from(const std::string& kind, double a, double b,
                                 double c) {
    if (kind == "logpoly") return cover::LogPoly{a, b, c};  // d, p, gamma
    if (kind == "polylog") return cover::PolyLog{a, b};     // gamma, p
    if (kind == "poly") return cover::Poly{a, b};           // gamma, p
    throw std::invalid_argument("regime kind must be logpoly, polylog or poly");
}

std::vector<std::vector<double>> rows_of(const family::ProjectedFamily& pf) {
    std::vector<std::vector<double>> rows(pf.m);
    for (std::size_t i = 0; i < pf.m; ++i)
        rows[i].assign(pf.row(i).begin(), pf.row(i).end());
    return rows;
}

bounds::ConstantMode cmode_from(const std::string& kind, double user_value) {
    if (kind == "unit") return {bounds::ConstantKind::Unit, 1.0};
    if (kind == "traced") return {bounds::ConstantKind::Traced, 1.0};
    if (kind == "user") return {bounds::ConstantKind::User, user_value};
    throw std::invalid_argument("constants must be unit, traced or user");
}

}  // namespace

PYBIND11_MODULE(_radbound, m) {
    m.doc() = "Local Rademacher complexity bounds laboratory";
    m.attr("__version__") = kVersion;

    // ---- families and samples ----
    py::class_<family::EmpiricalSample>(m, "EmpiricalSample")
        .def_readonly("n", &family::EmpiricalSample::n)
        .def_readonly("dim", &family::EmpiricalSample::dim)
        .def("point", [](const family::EmpiricalSample& s, std::size_t i) {
            auto pt = s.point(i);
            return std::vector<double>(pt.begin(), pt.end());
        })
        .def("weight", &family::EmpiricalSample::weight);

    m.def(
        "draw_sample",
        [](std::size_t n, std::size_t dim, std::uint64_t seed) {
            return family::draw_sample({n, dim, seed});
        },
        py::arg("n"), py::arg("dim") = 1, py::arg("seed") = 0,
        "n i.i.d. uniform points on [0,1]^dim, reproducible from the seed");

    py::class_<family::FunctionFamilySpec>(m, "FamilySpec")
        .def_property_readonly("id", &family::FunctionFamilySpec::id)
        .def_property_readonly("sup_bound",
                               &family::FunctionFamilySpec::sup_bound)
        .def_property_readonly("domain_dim",
                               &family::FunctionFamilySpec::domain_dim)
        .def_property_readonly("member_count",
                               [](const family::FunctionFamilySpec& spec) {
                                   return family::FamilyEvaluator(spec)
                                       .member_count();
                               });

    m.def("preset_family", &presets::make_preset, py::arg("name"),
          "shipped presets: finite, linear, lipschitz");

    m.def(
        "finite_family",
        [](std::size_t count, double b, std::uint64_t seed, std::size_t cells) {
            family::FunctionFamilySpec spec;
            spec.variant = family::FiniteRandom{count, b, seed, cells};
            spec.declared_regime = cover::LogPoly{
                std::log(static_cast<double>(count)), 1.0,
                2.0 * b * std::exp(1.0)};
            spec.validate();
            return spec;
        },
        py::arg("count"), py::arg("b") = 1.0, py::arg("seed") = 0,
        py::arg("cells") = 16);

    m.def(
        "linear_family",
        [](std::size_t dim, double radius, std::size_t count, double b) {
            family::FunctionFamilySpec spec;
            spec.variant = family::LinearBall{dim, radius, count, b};
            spec.declared_regime =
                cover::LogPoly{static_cast<double>(dim), 1.0, 6.0 * b};
            spec.validate();
            return spec;
        },
        py::arg("dim"), py::arg("radius") = 1.0, py::arg("count") = 16,
        py::arg("b") = 1.0);

    m.def(
        "lipschitz_family",
        [](double lipschitz, double b, std::size_t resolution, double gamma) {
            family::FunctionFamilySpec spec;
            spec.variant = family::LipschitzBall{lipschitz, b, resolution};
            spec.declared_regime = cover::Poly{gamma, 1.0};
            spec.validate();
            return spec;
        },
        py::arg("lipschitz") = 1.0, py::arg("b") = 1.0,
        py::arg("resolution") = 4, py::arg("gamma") = 20.0);

    py::class_<family::ProjectedFamily>(m, "ProjectedFamily")
        .def_readonly("m", &family::ProjectedFamily::m)
        .def_readonly("n", &family::ProjectedFamily::n)
        .def_readonly("sup_bound", &family::ProjectedFamily::sup_bound)
        .def_readonly("provenance", &family::ProjectedFamily::provenance)
        .def_readonly("subsampled", &family::ProjectedFamily::subsampled)
        .def("rows", &rows_of);

    m.def("project", &family::project, py::arg("spec"), py::arg("sample"));
    m.def("minus_family", &family::minus_family, py::arg("pf"));
    m.def(
        "projected_family",
        [](const std::vector<std::vector<double>>& rows, double sup_bound) {
            if (rows.empty()) throw std::invalid_argument("rows must be nonempty");
            const std::size_t n = rows.front().size();
            std::vector<double> table;
            table.reserve(rows.size() * n);
            for (const auto& row : rows) {
                if (row.size() != n)
                    throw std::invalid_argument("rows must share one length");
                table.insert(table.end(), row.begin(), row.end());
            }
            return family::make_projected(std::move(table), rows.size(), n,
                                          sup_bound, "python");
        },
        py::arg("rows"), py::arg("sup_bound"),
        "build a projected family from explicit value rows (deduplicated)");

    // ---- covers and entropy ----
    m.def(
        "empirical_distance",
        [](const std::vector<double>& f, const std::vector<double>& g, double q) {
            return cover::empirical_distance(f, g, q);
        },
        py::arg("f"), py::arg("g"), py::arg("q") = 2.0);

    m.def(
        "covering_number",
        [](const family::ProjectedFamily& pf, double eps, double q,
           const std::string& mode) {
            const auto count = cover::covering_number(
                pf, eps, q,
                mode == "exact" ? cover::CoverMode::Exact
                                : cover::CoverMode::Greedy);
            return py::make_tuple(count.value, cover::to_string(count.kind));
        },
        py::arg("pf"), py::arg("eps"), py::arg("q") = 2.0,
        py::arg("mode") = "greedy");

    m.def(
        "proper_cover",
        [](const family::ProjectedFamily& pf, double eps, double q,
           const std::string& mode) {
            return cover::proper_cover(pf, eps, q,
                                       mode == "exact" ? cover::CoverMode::Exact
                                                       : cover::CoverMode::Greedy)
                .member_indices;
        },
        py::arg("pf"), py::arg("eps"), py::arg("q") = 2.0,
        py::arg("mode") = "greedy");

    m.def(
        "packing_number",
        [](const family::ProjectedFamily& pf, double eps, double q) {
            return cover::packing_number(pf, eps, q).value;
        },
        py::arg("pf"), py::arg("eps"), py::arg("q") = 2.0);

    m.def(
        "regime_entropy",
        [](const std::string& kind, double a, double b, double c, double eps) {
            return cover::regime_entropy(regime_from(kind, a, b, c), eps);
        },
        py::arg("kind"), py::arg("a"), py::arg("b"), py::arg("c") = 1.0,
        py::arg("eps") = 1.0,
        "logpoly(d, p, gamma) | polylog(gamma, p) | poly(gamma, p)");

    // ---- complexity estimators ----
    m.def(
        "local_rc_empirical",
        [](const family::ProjectedFamily& pf, double r, const std::string& mode,
           std::uint64_t draws, std::uint64_t seed, int threads) {
            const auto est = rad::local_rc_empirical(
                pf, {r, rad::RadiusKind::Empirical},
                mode == "exact" ? rad::EstimateMode::Exact
                                : rad::EstimateMode::MonteCarlo,
                draws, seed, threads);
            py::dict out;
            out["mean"] = est.mean;
            out["stderr"] = est.stderr_;
            out["draws"] = est.draws;
            out["mode"] = mode;
            out["feasible_count"] = est.feasible_count;
            out["empty_feasible"] = est.empty_feasible;
            return out;
        },
        py::arg("pf"), py::arg("r"), py::arg("mode") = "exact",
        py::arg("draws") = 2000, py::arg("seed") = 0, py::arg("threads") = 1);

    m.def(
        "local_rc_population",
        [](const family::FunctionFamilySpec& spec, double r, std::size_t n,
           std::size_t outer_draws, std::size_t sign_draws, std::size_t ghost_n,
           std::uint64_t seed, int threads) {
            rad::PopulationOptions opt;
            opt.outer_draws = outer_draws;
            opt.sign_draws = sign_draws;
            opt.ghost_n = ghost_n;
            opt.threads = threads;
            const auto est = rad::local_rc_population(spec, r, n, opt, seed);
            py::dict out;
            out["mean"] = est.mean;
            out["stderr"] = est.stderr_;
            out["draws"] = est.draws;
            out["feasible_count"] = est.feasible_count;
            out["empty_feasible"] = est.empty_feasible;
            return out;
        },
        py::arg("spec"), py::arg("r"), py::arg("n"),
        py::arg("outer_draws") = 200, py::arg("sign_draws") = 2000,
        py::arg("ghost_n") = 0, py::arg("seed") = 0, py::arg("threads") = 1);

    // ---- bounds ----
    m.def("massart_bound", &bounds::massart_bound, py::arg("cardinality"),
          py::arg("r"), py::arg("n"));

    m.def(
        "cor33_bound",
        [](double d, double p, double gamma, double b, double r, std::size_t n,
           const std::string& constants, double user_value) {
            return bounds::cor33_bound(cover::LogPoly{d, p, gamma}, b, r, n,
                                       cmode_from(constants, user_value));
        },
        py::arg("d"), py::arg("p"), py::arg("gamma"), py::arg("b"), py::arg("r"),
        py::arg("n"), py::arg("constants") = "unit", py::arg("user_value") = 1.0);

    m.def(
        "cor34_bound",
        [](double gamma, double p, double b, double r, std::size_t n,
           const std::string& constants, double user_value) {
            return bounds::cor34_bound(cover::PolyLog{gamma, p}, b, r, n,
                                       cmode_from(constants, user_value));
        },
        py::arg("gamma"), py::arg("p"), py::arg("b"), py::arg("r"), py::arg("n"),
        py::arg("constants") = "unit", py::arg("user_value") = 1.0);

    m.def(
        "cor35_bound",
        [](double gamma, double p, double b, double r, std::size_t n,
           const std::string& constants, double user_value) {
            return bounds::cor35_bound(cover::Poly{gamma, p}, b, r, n,
                                       cmode_from(constants, user_value));
        },
        py::arg("gamma"), py::arg("p"), py::arg("b"), py::arg("r"), py::arg("n"),
        py::arg("constants") = "unit", py::arg("user_value") = 1.0);

    m.def(
        "theorem32_bound",
        [](const std::string& kind, double a, double b_param, double c,
           double r, double cap, std::size_t n,
           const std::vector<double>& eps_grid) {
            const auto regime = regime_from(kind, a, b_param, c);
            auto grid = eps_grid;
            if (grid.empty())
                grid = bounds::log_grid(
                    1e-4, std::min(2.0 * regime.validity_cap(), 8.0), 33);
            const auto result =
                bounds::theorem32_analytic(regime, r, cap, n, grid);
            return py::make_tuple(result.value, result.argmin_eps);
        },
        py::arg("kind"), py::arg("a"), py::arg("b"), py::arg("c") = 1.0,
        py::arg("r") = 0.0, py::arg("sup_bound") = 1.0, py::arg("n") = 100,
        py::arg("eps_grid") = std::vector<double>{});

    m.def(
        "mendelson_logpoly",
        [](double d, double p, double gamma, double b, double r, std::size_t n) {
            return bounds::mendelson_logpoly(d, p, gamma, b, r, n, {});
        },
        py::arg("d"), py::arg("p"), py::arg("gamma"), py::arg("b"), py::arg("r"),
        py::arg("n"));
    m.def(
        "mendelson_poly",
        [](double p, double b, double r, std::size_t n) {
            return bounds::mendelson_poly(p, b, r, n, {});
        },
        py::arg("p"), py::arg("b"), py::arg("r"), py::arg("n"));
    m.def(
        "mendelson_polylog",
        [](double p, double b, double r, std::size_t n) {
            return bounds::mendelson_polylog(p, b, r, n, {});
        },
        py::arg("p"), py::arg("b"), py::arg("r"), py::arg("n"));

    // ---- fixed points and certificates ----
    m.def(
        "fixed_point",
        [](const std::function<double(double)>& psi,
           const std::vector<double>& grid, double tolerance) {
            certify::SubRootProbe probe{psi, grid};
            const auto fp = certify::fixed_point(probe, tolerance);
            return py::make_tuple(fp.r_star, fp.residual, fp.iterations);
        },
        py::arg("psi"), py::arg("grid"), py::arg("tolerance") = 1e-12,
        "bisection fixed point of a sub-root evaluator; returns (r_star, "
        "residual, iterations)");

    m.def(
        "subroot_check",
        [](const std::function<double(double)>& psi,
           const std::vector<double>& grid) {
            certify::SubRootProbe probe{psi, grid};
            const auto rep = certify::subroot_check(probe);
            py::dict out;
            out["nonnegative"] = rep.nonnegative;
            out["nondecreasing"] = rep.nondecreasing;
            out["ratio_nonincreasing"] = rep.ratio_nonincreasing;
            return out;
        },
        py::arg("psi"), py::arg("grid"));

    py::class_<certify::GeneralizationCertificate>(m, "Certificate")
        .def_readonly("empirical_term",
                      &certify::GeneralizationCertificate::empirical_term)
        .def_readonly("fixed_point_term",
                      &certify::GeneralizationCertificate::fixed_point_term)
        .def_readonly("confidence_term",
                      &certify::GeneralizationCertificate::confidence_term)
        .def_readonly("total", &certify::GeneralizationCertificate::total)
        .def_readonly("r_star", &certify::GeneralizationCertificate::r_star)
        .def_readonly("n", &certify::GeneralizationCertificate::n);

    m.def(
        "bartlett_bound",
        [](double empirical_mean, double r_star, double B, double K,
           double delta, double range_width, std::size_t n) {
            certify::CertificateParams params;
            params.B = B;
            params.K = K;
            params.delta = delta;
            params.range_width = range_width;
            params.regime = cover::LogPoly{1.0, 1.0, 1.0};
            return certify::bartlett_bound(empirical_mean, r_star, params, n);
        },
        py::arg("empirical_mean"), py::arg("r_star"), py::arg("B"), py::arg("K"),
        py::arg("delta"), py::arg("range_width"), py::arg("n"));

    m.def(
        "certificate_logpoly",
        [](double d, double p, double gamma, double B, double K, double delta,
           double range_width, double L, double b, std::size_t n,
           const std::string& constants) {
            certify::CertificateParams params;
            params.B = B;
            params.K = K;
            params.delta = delta;
            params.range_width = range_width;
            params.L = L;
            params.b = b;
            params.regime = cover::LogPoly{d, p, gamma};
            return certify::certificate_logpoly(params, n,
                                                cmode_from(constants, 1.0));
        },
        py::arg("d"), py::arg("p"), py::arg("gamma"), py::arg("B") = 1.0,
        py::arg("K") = 2.0, py::arg("delta") = 0.05,
        py::arg("range_width") = 1.0, py::arg("L") = 1.0, py::arg("b") = 1.0,
        py::arg("n") = 1000, py::arg("constants") = "unit");

    m.def(
        "certificate_polylog",
        [](double gamma, double p, double B, double K, double delta,
           double range_width, double L, double b, std::size_t n,
           const std::string& constants) {
            certify::CertificateParams params;
            params.B = B;
            params.K = K;
            params.delta = delta;
            params.range_width = range_width;
            params.L = L;
            params.b = b;
            params.regime = cover::PolyLog{gamma, p};
            const auto result = certify::certificate_polylog(
                params, n, cmode_from(constants, 1.0));
            py::dict out;
            out["certificate"] = result.certificate;
            out["eps0"] = result.eps0;
            out["proof_rate"] = result.proof_rate;
            out["printed_rate"] = result.printed_rate;
            return out;
        },
        py::arg("gamma"), py::arg("p"), py::arg("B") = 1.0, py::arg("K") = 2.0,
        py::arg("delta") = 0.05, py::arg("range_width") = 1.0,
        py::arg("L") = 1.0, py::arg("b") = 1.0, py::arg("n") = 1000,
        py::arg("constants") = "unit");

    m.def(
        "erm_experiment",
        [](std::size_t n, std::size_t trials, double K, double delta,
           std::uint64_t seed, std::size_t ghost_n, int threads) {
            auto preset = presets::make_erm_preset();
            if (ghost_n) preset.ghost_n = ghost_n;
            const auto params = preset.certificate_params(K, delta);
            const auto report = certify::erm_experiment(
                preset, n, trials, params, seed,
                {bounds::ConstantKind::Traced, 1.0}, threads);
            py::dict out;
            out["coverage"] = report.coverage;
            out["certificate_total"] = report.certificate.total;
            std::vector<double> excess;
            excess.reserve(report.trials.size());
            for (const auto& trial : report.trials)
                excess.push_back(trial.excess_risk);
            out["excess_risks"] = excess;
            return out;
        },
        py::arg("n"), py::arg("trials") = 50, py::arg("K") = 2.0,
        py::arg("delta") = 0.05, py::arg("seed") = 0, py::arg("ghost_n") = 0,
        py::arg("threads") = 1);
}
