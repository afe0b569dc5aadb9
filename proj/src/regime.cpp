#include "radbound/regime.hpp"

#include <cmath>
#include <sstream>
#include <stdexcept>

namespace radbound::cover {

double EntropyRegime::validity_cap() const {
    struct Visitor {
        double operator()(const LogPoly& v) const { return v.gamma; }
        double operator()(const PolyLog&) const { return 2.0; }
        double operator()(const Poly&) const {
            return std::numeric_limits<double>::infinity();
        }
    };
    return std::visit(Visitor{}, variant);
}

std::string EntropyRegime::describe() const {
    std::ostringstream os;
    if (const auto* lp = std::get_if<LogPoly>(&variant)) {
        os << "logpoly(d=" << lp->d << ",p=" << lp->p << ",gamma=" << lp->gamma
           << ")";
    } else if (const auto* pl = std::get_if<PolyLog>(&variant)) {
        os << "polylog(gamma=" << pl->gamma << ",p=" << pl->p << ")";
    } else {
        const auto& po = std::get<Poly>(variant);
        os << "poly(gamma=" << po.gamma << ",p=" << po.p << ")";
    }
    return os.str();
}

void EntropyRegime::validate() const {
    struct Visitor {
        void operator()(const LogPoly& v) const {
            if (!(v.d > 0 && v.p > 0 && v.gamma > 0))
                throw std::invalid_argument(
                    "logpoly regime requires d, p, gamma > 0");
        }
        void operator()(const PolyLog& v) const {
            if (!(v.gamma > 0 && v.p > 0))
                throw std::invalid_argument(
                    "polylog regime requires gamma, p > 0");
        }
        void operator()(const Poly& v) const {
            if (!(v.gamma > 0 && v.p > 0))
                throw std::invalid_argument("poly regime requires gamma, p > 0");
        }
    };
    std::visit(Visitor{}, variant);
}

double regime_entropy(const EntropyRegime& regime, double eps) {
    regime.validate();
    if (!(eps > 0))
        throw std::domain_error("regime_entropy: eps must be positive");
    if (eps > regime.validity_cap() * (1 + 1e-12))
        throw std::domain_error("regime_entropy: eps beyond validity cap");
    struct Visitor {
        double eps;
        double operator()(const LogPoly& v) const {
            double lg = std::log(v.gamma / eps);
            if (lg < 0) lg = 0;  // eps == gamma up to rounding
            return v.d * std::pow(lg, v.p);
        }
        double operator()(const PolyLog& v) const {
            double lg = std::log(2.0 / eps);
            if (lg < 0) lg = 0;
            return v.gamma * std::pow(eps, -v.p) * lg * lg;
        }
        double operator()(const Poly& v) const {
            return v.gamma * std::pow(eps, -v.p);
        }
    };
    return std::visit(Visitor{eps}, regime.variant);
}

double EntropyEvaluator::operator()(double eps) const {
    if (!(eps > 0) || eps > cap * (1 + 1e-12))
        throw std::domain_error("entropy evaluator: eps outside (0, cap]");
    return fn(eps);
}

EntropyEvaluator regime_evaluator(const EntropyRegime& regime) {
    regime.validate();
    return {[regime](double eps) { return regime_entropy(regime, eps); },
            regime.validity_cap()};
}

EntropyEvaluator star_hull_regime(const EntropyRegime& regime) {
    regime.validate();
    // Domain shrinks: the inner evaluation sits at eps/2.
    const double cap = std::min(2.0 * regime.validity_cap(), 4.0);
    return {[regime](double eps) {
                return std::log(4.0 / eps) + regime_entropy(regime, eps / 2.0);
            },
            cap};
}

}  // namespace radbound::cover
