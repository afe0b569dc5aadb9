#include "radbound/family.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <sstream>
#include <stdexcept>

#include "radbound/rng.hpp"

namespace radbound::family {

void SamplePlan::validate() const {
    if (n < 1) throw std::invalid_argument("sample plan: n must be >= 1");
    if (dim < 1) throw std::invalid_argument("sample plan: dim must be >= 1");
}

EmpiricalSample draw_sample(const SamplePlan& plan) {
    plan.validate();
    EmpiricalSample s;
    s.n = plan.n;
    s.dim = plan.dim;
    s.coords.resize(plan.n * plan.dim);
    auto g = make_engine(plan.seed, 0x5a6d70u);
    for (double& c : s.coords) c = uniform01(g);
    return s;
}

// ---------------------------------------------------------------------------
// Spec
// ---------------------------------------------------------------------------

std::size_t FunctionFamilySpec::domain_dim() const {
    if (const auto* lb = std::get_if<LinearBall>(&variant)) return lb->dim;
    return 1;
}

double FunctionFamilySpec::sup_bound() const {
    struct Visitor {
        double operator()(const FiniteRandom& v) const { return v.b; }
        double operator()(const LinearBall& v) const { return v.b; }
        double operator()(const LipschitzBall& v) const { return v.b; }
    };
    return std::visit(Visitor{}, variant);
}

std::string FunctionFamilySpec::id() const {
    std::ostringstream os;
    if (const auto* f = std::get_if<FiniteRandom>(&variant)) {
        os << "finite_random(m=" << f->m << ",b=" << f->b << ",seed=" << f->seed
           << ",cells=" << f->cells << ")";
    } else if (const auto* l = std::get_if<LinearBall>(&variant)) {
        os << "linear_ball(dim=" << l->dim << ",radius=" << l->radius
           << ",count=" << l->count << ",b=" << l->b << ")";
    } else {
        const auto& z = std::get<LipschitzBall>(variant);
        os << "lipschitz_ball(L=" << z.lipschitz << ",b=" << z.b
           << ",resolution=" << z.resolution << ")";
    }
    return os.str();
}

void FunctionFamilySpec::validate() const {
    struct Visitor {
        void operator()(const FiniteRandom& v) const {
            if (v.m < 1 || !(v.b > 0) || v.cells < 1)
                throw std::invalid_argument("finite_random: need m>=1, b>0, cells>=1");
        }
        void operator()(const LinearBall& v) const {
            if (v.dim < 1 || v.radius < 0 || v.count < 1 || !(v.b > 0))
                throw std::invalid_argument(
                    "linear_ball: need dim>=1, radius>=0, count>=1, b>0");
        }
        void operator()(const LipschitzBall& v) const {
            if (!(v.lipschitz > 0) || !(v.b > 0) || v.resolution < 1)
                throw std::invalid_argument(
                    "lipschitz_ball: need L>0, b>0, resolution>=1");
        }
    };
    std::visit(Visitor{}, variant);
    declared_regime.validate();
    // Regime-shape consistency with the classical rates of each variant.
    if (std::holds_alternative<LinearBall>(variant)) {
        const auto* lp = std::get_if<cover::LogPoly>(&declared_regime.variant);
        if (!lp || lp->p != 1.0 ||
            lp->d != static_cast<double>(std::get<LinearBall>(variant).dim))
            throw std::invalid_argument(
                "linear_ball: declared regime must be logpoly with p=1 and "
                "d=dim");
    }
    if (std::holds_alternative<LipschitzBall>(variant)) {
        const auto* po = std::get_if<cover::Poly>(&declared_regime.variant);
        if (!po || po->p != 1.0)
            throw std::invalid_argument(
                "lipschitz_ball: declared regime must be poly with p=1");
    }
}

// ---------------------------------------------------------------------------
// Evaluator
// ---------------------------------------------------------------------------

namespace {

// Enumerates all clipped grid paths: start values are multiples of
// s = L/resolution in [-b, b]; each increment is -s, 0 or +s and must stay in
// [-b, b]. DFS order: starts ascending, steps (-s, 0, +s).
void extend_path(std::vector<double>& path, std::size_t level,
                 std::size_t segments, double s, double b,
                 std::vector<double>& out) {
    if (level == segments) {
        out.insert(out.end(), path.begin(), path.end());
        return;
    }
    const double tol = 1e-12;
    for (int d = -1; d <= 1; ++d) {
        const double next = path[level] + d * s;
        if (next < -b - tol || next > b + tol) continue;
        path[level + 1] = std::min(b, std::max(-b, next));
        extend_path(path, level + 1, segments, s, b, out);
    }
}

void enumerate_paths(const LipschitzBall& z, std::vector<double>& out) {
    const double s = z.lipschitz / static_cast<double>(z.resolution);
    const double tol = 1e-12;
    std::vector<double> path(z.resolution + 1, 0.0);
    for (double start = -z.b; start <= z.b + tol; start += s) {
        path[0] = std::min(z.b, start);
        extend_path(path, 0, z.resolution, s, z.b, out);
    }
}

}  // namespace

FamilyEvaluator::FamilyEvaluator(const FunctionFamilySpec& spec) {
    spec.validate();
    cap_ = spec.sup_bound();
    dim_ = spec.domain_dim();
    if (const auto* f = std::get_if<FiniteRandom>(&spec.variant)) {
        kind_ = Kind::Finite;
        count_ = f->m;
        stride_ = f->cells;
        data_.resize(count_ * stride_);
        for (std::size_t i = 0; i < count_; ++i) {
            auto g = make_engine(f->seed, i);
            for (std::size_t j = 0; j < stride_; ++j)
                data_[i * stride_ + j] = uniform(g, -f->b, f->b);
        }
    } else if (const auto* l = std::get_if<LinearBall>(&spec.variant)) {
        kind_ = Kind::Linear;
        count_ = l->count;
        stride_ = l->dim;
        data_.assign(count_ * stride_, 0.0);  // weight 0 first
        auto g = make_engine(0x6c696e65617242ULL, l->count);
        for (std::size_t i = 1; i < count_; ++i) {
            // Uniform on the ball: gaussian-free direction via normalized
            // uniform cube rejection, radius scaled by u^(1/dim).
            double norm2 = 0.0;
            std::vector<double> w(stride_);
            do {
                norm2 = 0.0;
                for (auto& wj : w) {
                    wj = uniform(g, -1.0, 1.0);
                    norm2 += wj * wj;
                }
            } while (norm2 > 1.0 || norm2 == 0.0);
            const double u = uniform01(g);
            const double scale =
                l->radius * std::pow(u, 1.0 / static_cast<double>(stride_)) /
                std::sqrt(norm2);
            for (std::size_t j = 0; j < stride_; ++j)
                data_[i * stride_ + j] = w[j] * scale;
        }
    } else {
        const auto& z = std::get<LipschitzBall>(spec.variant);
        kind_ = Kind::Lipschitz;
        lipschitz_ = z.lipschitz;
        stride_ = z.resolution + 1;
        enumerate_paths(z, data_);
        count_ = data_.size() / stride_;
    }
}

double FamilyEvaluator::eval(std::size_t member, std::span<const double> x) const {
    const double* d = data_.data() + member * stride_;
    switch (kind_) {
        case Kind::Finite: {
            std::size_t cell = static_cast<std::size_t>(
                x[0] * static_cast<double>(stride_));
            if (cell >= stride_) cell = stride_ - 1;
            return d[cell];
        }
        case Kind::Linear: {
            const double inv = 1.0 / std::sqrt(static_cast<double>(stride_));
            double acc = 0.0;
            for (std::size_t j = 0; j < stride_; ++j)
                acc += d[j] * (2.0 * x[j] - 1.0) * inv;
            return std::min(cap_, std::max(-cap_, acc));
        }
        case Kind::Lipschitz: {
            const std::size_t segments = stride_ - 1;
            double t = x[0] * static_cast<double>(segments);
            std::size_t j = static_cast<std::size_t>(t);
            if (j >= segments) j = segments - 1;
            const double frac = t - static_cast<double>(j);
            return d[j] + frac * (d[j + 1] - d[j]);
        }
    }
    return 0.0;
}

std::vector<double> FamilyEvaluator::eval_table(const EmpiricalSample& sample) const {
    if (sample.dim != dim_)
        throw std::invalid_argument("family and sample domain dims differ");
    std::vector<double> table(count_ * sample.n);
    for (std::size_t i = 0; i < count_; ++i)
        for (std::size_t j = 0; j < sample.n; ++j)
            table[i * sample.n + j] = eval(i, sample.point(j));
    return table;
}

// ---------------------------------------------------------------------------
// Projection and dedup
// ---------------------------------------------------------------------------

void ProjectedFamily::validate() const {
    if (m < 1) throw std::invalid_argument("projected family: m must be >= 1");
    if (n < 1) throw std::invalid_argument("projected family: n must be >= 1");
    if (values.size() != m * n)
        throw std::invalid_argument("projected family: table shape mismatch");
    if (!(sup_bound > 0))
        throw std::invalid_argument("projected family: sup_bound must be > 0");
    for (double v : values)
        if (!(std::abs(v) <= sup_bound))
            throw std::invalid_argument(
                "projected family: entry exceeds sup_bound");
}

namespace {

bool rows_equal(const double* a, const double* b, std::size_t n, double tol) {
    for (std::size_t j = 0; j < n; ++j)
        if (std::abs(a[j] - b[j]) > tol) return false;
    return true;
}

// First-occurrence dedup using a sorted index on the first coordinate: max-norm
// duplicates must agree on coordinate 0 within tolerance, so only a local
// window needs scanning.
std::vector<std::size_t> dedup_rows(const std::vector<double>& table,
                                    std::size_t m, std::size_t n, double tol) {
    std::vector<std::size_t> kept;
    std::multimap<double, std::size_t> by_first;  // first coord -> kept index
    for (std::size_t i = 0; i < m; ++i) {
        const double* row = table.data() + i * n;
        auto lo = by_first.lower_bound(row[0] - tol);
        auto hi = by_first.upper_bound(row[0] + tol);
        bool dup = false;
        for (auto it = lo; it != hi; ++it) {
            if (rows_equal(row, table.data() + it->second * n, n, tol)) {
                dup = true;
                break;
            }
        }
        if (!dup) {
            kept.push_back(i);
            by_first.emplace(row[0], i);
        }
    }
    return kept;
}

}  // namespace

ProjectedFamily make_projected(std::vector<double> table, std::size_t m,
                               std::size_t n, double sup_bound,
                               std::string provenance) {
    if (m < 1 || n < 1 || table.size() != m * n)
        throw std::invalid_argument("make_projected: bad table shape");
    auto kept = dedup_rows(table, m, n, kDedupTolerance);
    if (kept.empty())
        throw std::invalid_argument("make_projected: family empty after dedup");
    ProjectedFamily pf;
    pf.n = n;
    pf.m = kept.size();
    pf.sup_bound = sup_bound;
    pf.provenance = std::move(provenance);
    pf.values.reserve(pf.m * n);
    for (std::size_t i : kept)
        pf.values.insert(pf.values.end(), table.begin() + i * n,
                         table.begin() + (i + 1) * n);
    pf.validate();
    return pf;
}

ProjectedFamily project(const FunctionFamilySpec& spec,
                        const EmpiricalSample& sample) {
    FamilyEvaluator ev(spec);
    auto table = ev.eval_table(sample);
    std::ostringstream prov;
    prov << spec.id() << "@sample(n=" << sample.n << ",dim=" << sample.dim << ")";
    return make_projected(std::move(table), ev.member_count(), sample.n,
                          spec.sup_bound(), prov.str());
}

ProjectedFamily minus_family(const ProjectedFamily& pf) {
    pf.validate();
    const std::size_t m = pf.m, n = pf.n;
    const std::size_t pairs = m * m;
    std::vector<double> table;
    bool subsampled = false;

    auto emit = [&](std::size_t i, std::size_t j) {
        const double* fi = pf.values.data() + i * n;
        const double* fj = pf.values.data() + j * n;
        for (std::size_t k = 0; k < n; ++k) table.push_back(fi[k] - fj[k]);
    };

    if (pairs <= kMinusRowCap) {
        table.reserve(pairs * n);
        for (std::size_t i = 0; i < m; ++i)
            for (std::size_t j = 0; j < m; ++j) emit(i, j);
    } else {
        // Uniform subsample of pairs; the zero row (i == j) is kept explicitly
        // so the minus family always contains it.
        subsampled = true;
        table.reserve(kMinusRowCap * n);
        emit(0, 0);
        auto g = make_engine(0x6d696e7573ULL, pairs);
        for (std::size_t t = 1; t < kMinusRowCap; ++t) {
            const std::size_t pick =
                static_cast<std::size_t>(uniform_index(g, pairs));
            emit(pick / m, pick % m);
        }
    }

    const std::size_t rows = table.size() / n;
    auto out = make_projected(std::move(table), rows, n, 2.0 * pf.sup_bound,
                              "minus(" + pf.provenance + ")");
    out.subsampled = subsampled;
    return out;
}

}  // namespace radbound::family
