#include "mindiv/estimators.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <vector>

#include "mindiv/divergence.hpp"
#include "mindiv/errors.hpp"

namespace mindiv {

std::string to_string(EstimatorKind k) {
    switch (k) {
        case EstimatorKind::MLE: return "mle";
        case EstimatorKind::Subdivergence: return "subdivergence";
        case EstimatorKind::Superdivergence: return "superdivergence";
        case EstimatorKind::PowerPseudo: return "pseudo";
        case EstimatorKind::Renyi: return "renyi";
    }
    return {};
}

EstimatorKind estimator_kind_from_name(const std::string& name) {
    if (name == "mle") return EstimatorKind::MLE;
    if (name == "subdivergence" || name == "sub") return EstimatorKind::Subdivergence;
    if (name == "superdivergence" || name == "super") return EstimatorKind::Superdivergence;
    if (name == "pseudo" || name == "power-pseudo") return EstimatorKind::PowerPseudo;
    if (name == "renyi") return EstimatorKind::Renyi;
    throw InvalidInput("unknown estimator '" + name +
                       "' (mle, subdivergence, superdivergence, pseudo, renyi)");
}

EstimatorSpec EstimatorSpec::mle() { return {}; }

EstimatorSpec EstimatorSpec::subdivergence(double alpha, Parameter escort) {
    EstimatorSpec s;
    s.kind = EstimatorKind::Subdivergence;
    s.alpha = alpha;
    s.escort = std::move(escort);
    return s;
}

EstimatorSpec EstimatorSpec::superdivergence(double alpha) {
    EstimatorSpec s;
    s.kind = EstimatorKind::Superdivergence;
    s.alpha = alpha;
    return s;
}

EstimatorSpec EstimatorSpec::power_pseudo(double alpha) {
    EstimatorSpec s;
    s.kind = EstimatorKind::PowerPseudo;
    s.alpha = alpha;
    return s;
}

EstimatorSpec EstimatorSpec::renyi(double alpha) {
    EstimatorSpec s;
    s.kind = EstimatorKind::Renyi;
    s.alpha = alpha;
    return s;
}

void EstimatorSpec::validate(const Family& family) const {
    if (!std::isfinite(alpha) || alpha < 0.0) throw InvalidInput("alpha must be finite and >= 0");
    switch (kind) {
        case EstimatorKind::Subdivergence:
            if (alpha > 1.0) throw InvalidInput("subdivergence supports alpha in [0,1]");
            if (!escort) throw InvalidInput("subdivergence requires an escort parameter");
            family.check(*escort);
            break;
        case EstimatorKind::Superdivergence:
            if (alpha >= 1.0) throw InvalidInput("superdivergence supports alpha in [0,1)");
            break;
        default: break;
    }
    if (bounds) {
        if (bounds->lower.size() != family.param_dim() || bounds->upper.size() != family.param_dim())
            throw InvalidInput("bounds dimension does not match the family");
        if ((bounds->lower.array() > bounds->upper.array()).any()) throw InvalidInput("empty bounds box");
        const int si = family.scale_index();
        if (si >= 0 && !(bounds->lower[si] > 0.0)) throw InvalidInput("scale lower bound must be positive");
    }
    if (!(tol > 0.0) || !(param_tol > 0.0) || max_iter < 1 || inner_max_iter < 1)
        throw InvalidInput("solver settings must be positive");
}

namespace {

std::vector<double> log_dens(const Family& f, const Parameter& th, const Measure& q) {
    const auto& x = q.nodes();
    std::vector<double> out(x.size());
    for (std::size_t i = 0; i < x.size(); ++i) {
        out[i] = f.log_density(th, x[i]);
        if (!std::isfinite(out[i])) throw DomainError("zero density at a node");
    }
    return out;
}

double weighted_quantile(std::vector<std::pair<double, double>> xw, double p) {
    std::sort(xw.begin(), xw.end());
    double c = 0.0;
    for (const auto& [x, w] : xw) {
        c += w;
        if (c >= p - 1e-15) return x;
    }
    return xw.back().first;
}

double weighted_median_abs_dev(const Measure& q, double center) {
    std::vector<std::pair<double, double>> d;
    for (std::size_t i = 0; i < q.size(); ++i) d.emplace_back(std::abs(q.nodes()[i] - center), q.weights()[i]);
    return weighted_quantile(d, 0.5);
}

std::vector<std::pair<double, double>> pairs(const Measure& q) {
    std::vector<std::pair<double, double>> xw;
    for (std::size_t i = 0; i < q.size(); ++i) xw.emplace_back(q.nodes()[i], q.weights()[i]);
    return xw;
}

double mean_of(const Measure& q) {
    return integrate(q, [](double x) { return x; });
}

void check_support(const Family& f, const Measure& q) {
    for (double x : q.nodes())
        if (!f.in_support(x)) throw DomainError("observation outside the support of " + f.name());
}

Parameter robust_start(const Family& f, const Measure& q) {
    const auto xw = pairs(q);
    if (f.kind() == FamilyKind::NormalLocScale) {
        const double med = weighted_quantile(xw, 0.5);
        const double mad = 1.4826 * weighted_median_abs_dev(q, med);
        return param(med, mad > 0.0 ? mad : 1.0);
    }
    return Parameter();
}

}  // namespace

Bounds default_bounds(const Family& family, const Measure& q) {
    check_support(family, q);
    const auto xw = pairs(q);
    const auto [mn, mx] = std::minmax_element(q.nodes().begin(), q.nodes().end());
    const double mean = mean_of(q);
    const double sd = std::sqrt(integrate(q, [&](double x) { return (x - mean) * (x - mean); }));
    const double iqr = weighted_quantile(xw, 0.75) - weighted_quantile(xw, 0.25);
    double spread = iqr > 0.0 ? iqr : (sd > 0.0 ? sd : std::max(1.0, std::abs(mean)));

    Bounds b;
    b.lower.resize(family.param_dim());
    b.upper.resize(family.param_dim());
    if (family.kind() == FamilyKind::Pareto) {
        const double th = mle(family, q).theta_hat[0];
        b.lower << th / 100.0;
        b.upper << th * 100.0;
        return b;
    }
    const int li = family.loc_index(), si = family.scale_index();
    if (li >= 0) {
        b.lower[li] = *mn - 10.0 * spread;
        b.upper[li] = *mx + 10.0 * spread;
    }
    if (si >= 0) {
        double ref, robust;
        if (family.kind() == FamilyKind::NormalScale) {
            ref = std::sqrt(integrate(q, [](double x) { return x * x; }));
            robust = 1.4826 * weighted_median_abs_dev(q, 0.0);
        } else {
            ref = sd;
            robust = 1.4826 * weighted_median_abs_dev(q, weighted_quantile(xw, 0.5));
        }
        if (!(ref > 0.0)) ref = spread;
        const double small = robust > 0.0 ? std::min(ref, robust) : ref;
        b.lower[si] = 1e-3 * small;
        b.upper[si] = 10.0 * ref;
    }
    return b;
}

double sub_criterion(const Family& family, const Parameter& theta, const Parameter& tt,
                     const Measure& q, double alpha) {
    if (!(alpha > 0.0 && alpha <= 1.0)) throw DomainError("subdivergence criterion needs alpha in (0,1]");
    family.check(theta);
    family.check(tt);
    const auto& w = q.weights();
    const auto& x = q.nodes();
    if (alpha == 1.0) {
        const Measure pq = quadrature_of(family, theta, 512);
        const double kl = integrate(pq, [&](double y) {
            return family.log_density(tt, y) - family.log_density(theta, y);
        });
        double s = 0.0;
        for (std::size_t i = 0; i < x.size(); ++i)
            s += w[i] * std::exp(family.log_density(theta, x[i]) - family.log_density(tt, x[i]));
        return kl + s;
    }
    double s = 0.0;
    for (std::size_t i = 0; i < x.size(); ++i)
        s += w[i] * std::exp(alpha * (family.log_density(theta, x[i]) - family.log_density(tt, x[i])));
    return family.power_ratio_integral(theta, tt, alpha) / (1.0 - alpha) + s / alpha;
}

Vec sub_psi(const Family& family, const Parameter& theta, const Parameter& tt, const Measure& q,
            double alpha) {
    if (!(alpha > 0.0 && alpha <= 1.0)) throw DomainError("subdivergence psi needs alpha in (0,1]");
    Vec r = family.tilted_escort_score(theta, tt, alpha);
    const auto& w = q.weights();
    const auto& x = q.nodes();
    for (std::size_t i = 0; i < x.size(); ++i) {
        const double l = std::exp(alpha * (family.log_density(theta, x[i]) - family.log_density(tt, x[i])));
        r -= w[i] * l * family.score(tt, x[i]);
    }
    return r;
}

double subdivergence_value(const Family& family, const Parameter& theta, const Parameter& tt,
                           const Measure& q, double alpha) {
    if (!(alpha > 0.0 && alpha < 1.0)) throw DomainError("subdivergence value needs alpha in (0,1)");
    return 1.0 / (1.0 - alpha) + 1.0 / alpha - sub_criterion(family, theta, tt, q, alpha);
}

Vec super_psi(const Family& family, const Parameter& theta, const Parameter& tt, const Measure& q,
              double alpha) {
    if (!(alpha > 0.0 && alpha < 1.0)) throw DomainError("superdivergence psi needs alpha in (0,1)");
    Vec r = (alpha / (1.0 - alpha)) * family.tilted_model_score(theta, tt, alpha);
    const auto& w = q.weights();
    const auto& x = q.nodes();
    for (std::size_t i = 0; i < x.size(); ++i) {
        const double l = std::exp(alpha * (family.log_density(theta, x[i]) - family.log_density(tt, x[i])));
        r += w[i] * l * family.score(theta, x[i]);
    }
    return r;
}

namespace {

// Stable power pseudodistance criterion: standard value plus 1/alpha.
double pseudo_shifted(const Family& f, const Parameter& th, const Measure& q, double alpha) {
    const auto lp = log_dens(f, th, q);
    const auto& w = q.weights();
    double s = 0.0;
    for (std::size_t i = 0; i < lp.size(); ++i) s += w[i] * std::expm1(alpha * lp[i]);
    return f.power_mass_integral(th, alpha) / (1.0 + alpha) - s / alpha;
}

// ln m / (1+a) - ln(Q.p^a) / a
double renyi_neglog(const Family& f, const Parameter& th, const Measure& q, double alpha) {
    const auto lp = log_dens(f, th, q);
    const auto& w = q.weights();
    double mx = -std::numeric_limits<double>::infinity();
    for (double l : lp) mx = std::max(mx, alpha * l);
    double s = 0.0;
    for (std::size_t i = 0; i < lp.size(); ++i) s += w[i] * std::exp(alpha * lp[i] - mx);
    const double lse = mx + std::log(s);
    return std::log(f.power_mass_integral(th, alpha)) / (1.0 + alpha) - lse / alpha;
}

void require_positive_alpha(double alpha, const char* what) {
    if (!(alpha > 0.0) || !std::isfinite(alpha)) throw DomainError(std::string(what) + " needs alpha > 0");
}

}  // namespace

double pseudo_criterion(const Family& family, const Parameter& theta, const Measure& q, double alpha) {
    require_positive_alpha(alpha, "pseudo criterion");
    return pseudo_shifted(family, theta, q, alpha) - 1.0 / alpha;
}

Vec pseudo_psi(const Family& family, const Parameter& theta, const Measure& q, double alpha) {
    require_positive_alpha(alpha, "pseudo psi");
    Vec r = family.power_mass_integral(theta, alpha) * family.weighted_score_mean(theta, alpha);
    const auto lp = log_dens(family, theta, q);
    const auto& w = q.weights();
    for (std::size_t i = 0; i < lp.size(); ++i)
        r -= w[i] * std::exp(alpha * lp[i]) * family.score(theta, q.nodes()[i]);
    return r;
}

double renyi_criterion(const Family& family, const Parameter& theta, const Measure& q, double alpha) {
    require_positive_alpha(alpha, "renyi criterion");
    return std::exp(-alpha * renyi_neglog(family, theta, q, alpha));
}

Vec renyi_psi(const Family& family, const Parameter& theta, const Measure& q, double alpha) {
    require_positive_alpha(alpha, "renyi psi");
    const auto lp = log_dens(family, theta, q);
    const auto& w = q.weights();
    double mx = -std::numeric_limits<double>::infinity();
    for (double l : lp) mx = std::max(mx, alpha * l);
    Vec num = Vec::Zero(family.param_dim());
    double den = 0.0;
    for (std::size_t i = 0; i < lp.size(); ++i) {
        const double e = w[i] * std::exp(alpha * lp[i] - mx);
        num += e * family.score(theta, q.nodes()[i]);
        den += e;
    }
    return family.weighted_score_mean(theta, alpha) - num / den;
}

EstimateResult mle(const Family& family, const Measure& q) {
    check_support(family, q);
    EstimateResult r;
    r.converged = true;
    switch (family.kind()) {
        case FamilyKind::NormalLocScale: {
            const double m = mean_of(q);
            const double v = integrate(q, [&](double x) { return (x - m) * (x - m); });
            if (!(v > 0.0)) throw InvalidInput("degenerate sample: zero spread");
            r.theta_hat = param(m, std::sqrt(v));
            break;
        }
        case FamilyKind::NormalLocation: r.theta_hat = param(mean_of(q)); break;
        case FamilyKind::NormalScale: {
            const double v = integrate(q, [](double x) { return x * x; });
            if (!(v > 0.0)) throw InvalidInput("degenerate sample: all observations are zero");
            r.theta_hat = param(std::sqrt(v));
            break;
        }
        case FamilyKind::Pareto: {
            const double s = integrate(q, [](double x) { return std::log(x); });
            if (!(s > 0.0)) throw InvalidInput("degenerate sample: all observations equal 1");
            r.theta_hat = param(1.0 / s);
            break;
        }
    }
    const Parameter th = r.theta_hat;
    r.criterion_value = integrate(q, [&](double x) { return family.log_density(th, x); });
    Vec g = Vec::Zero(family.param_dim());
    for (std::size_t i = 0; i < q.size(); ++i) g += q.weights()[i] * family.score(th, q.nodes()[i]);
    r.psi_norm = g.norm();
    return r;
}

namespace {

struct Problem {
    std::function<double(const Vec&)> f;
    PsiFn psi;
};

SolverOptions options_of(const EstimatorSpec& spec, bool inner) {
    SolverOptions o;
    o.tol = spec.tol;
    o.param_tol = spec.param_tol;
    o.max_iter = inner ? spec.inner_max_iter : spec.max_iter;
    return o;
}

std::vector<Vec> start_points(const Family& family, const Measure& q, const Bounds& b) {
    std::vector<Vec> s;
    try {
        s.push_back(mle(family, q).theta_hat);
    } catch (const InvalidInput&) {
    }
    Parameter r = robust_start(family, q);
    if (r.size() == family.param_dim()) s.push_back(r);
    if (s.empty()) s.push_back(0.5 * (b.lower + b.upper));
    return s;
}

Solution minimize(const Family& family, const Bounds& b, const SolverOptions& opt, const Problem& p,
                  const std::vector<Vec>& starts, std::optional<Vec> warm = std::nullopt) {
    if (family.param_dim() == 1) {
        std::optional<double> w;
        if (warm) w = (*warm)[0];
        return solve_1d([&](double x) { return p.f(param(x)); }, b.lower[0], b.upper[0], opt,
                        [&](double x) { return p.psi(param(x))[0]; }, w);
    }
    if (warm) {
        double nrm = 0.0;
        int steps = 0;
        Vec x = newton_polish(p.psi, *warm, b.lower, b.upper, 40, &nrm, &steps);
        if (nrm <= opt.tol) {
            // accept only a local minimum: symmetric part of the Jacobian positive definite
            Eigen::Matrix2d J;
            for (int j = 0; j < 2; ++j) {
                const double h = 1e-5 * std::max(1.0, std::abs(x[j]));
                Vec xp = x, xm = x;
                xp[j] += h;
                xm[j] -= h;
                J.col(j) = (p.psi(xp) - p.psi(xm)) / (2.0 * h);
            }
            const Eigen::Matrix2d S = 0.5 * (J + J.transpose());
            if (S(0, 0) > 0.0 && S.determinant() > 0.0) {
                Solution s;
                s.x = x;
                s.fx = p.f(x);
                s.iterations = steps;
                s.converged = true;
                s.psi_norm = nrm;
                return s;
            }
        }
        std::vector<Vec> st = starts;
        st.insert(st.begin(), *warm);
        return solve_2d(p.f, b.lower, b.upper, opt, p.psi, st);
    }
    return solve_2d(p.f, b.lower, b.upper, opt, p.psi, starts);
}

EstimateResult to_result(const Solution& s) {
    EstimateResult r;
    r.theta_hat = s.x;
    r.criterion_value = s.fx;
    r.iterations = s.iterations;
    r.converged = s.converged;
    r.psi_norm = s.psi_norm;
    return r;
}

Bounds bounds_for(const Family& family, const EstimatorSpec& spec, const Measure& q) {
    spec.validate(family);
    check_support(family, q);
    return spec.bounds ? *spec.bounds : default_bounds(family, q);
}

}  // namespace

EstimateResult estimate_subdivergence(const Family& family, const EstimatorSpec& spec, const Measure& q) {
    if (spec.kind != EstimatorKind::Subdivergence) throw InvalidInput("spec is not a subdivergence spec");
    const Bounds b = bounds_for(family, spec, q);
    if (spec.alpha == 0.0) return mle(family, q);
    const Parameter theta = *spec.escort;
    const double a = spec.alpha;
    Problem p;
    if (a == 1.0) {
        const Measure pq = quadrature_of(family, theta, 512);
        p.f = [&, pq](const Vec& tt) {
            const double kl = integrate(pq, [&](double y) {
                return family.log_density(tt, y) - family.log_density(theta, y);
            });
            double s = 0.0;
            for (std::size_t i = 0; i < q.size(); ++i)
                s += q.weights()[i] *
                     std::exp(family.log_density(theta, q.nodes()[i]) - family.log_density(tt, q.nodes()[i]));
            return kl + s;
        };
    } else {
        p.f = [&](const Vec& tt) { return sub_criterion(family, theta, tt, q, a); };
    }
    p.psi = [&](const Vec& tt) { return sub_psi(family, theta, tt, q, a); };
    auto starts = start_points(family, q, b);
    starts.push_back(theta);
    return to_result(minimize(family, b, options_of(spec, false), p, starts));
}

EstimateResult estimate_superdivergence(const Family& family, const EstimatorSpec& spec, const Measure& q) {
    if (spec.kind != EstimatorKind::Superdivergence) throw InvalidInput("spec is not a superdivergence spec");
    const Bounds b = bounds_for(family, spec, q);
    if (spec.alpha == 0.0) return mle(family, q);
    const double a = spec.alpha;
    const auto starts = start_points(family, q, b);
    const SolverOptions inner_opt = options_of(spec, true);

    std::optional<Vec> warm;
    bool inner_ok = true;
    int inner_iters = 0;
    // inner argmin over tt for a given theta, warm-started from the last solution
    auto inner = [&](const Vec& theta) {
        Problem p;
        p.f = [&](const Vec& tt) { return sub_criterion(family, theta, tt, q, a); };
        p.psi = [&](const Vec& tt) { return sub_psi(family, theta, tt, q, a); };
        auto st = starts;
        st.push_back(theta);
        Solution s = minimize(family, b, inner_opt, p, st, warm ? warm : std::optional<Vec>(theta));
        inner_iters += s.iterations;
        if (!s.converged) inner_ok = false;
        warm = s.x;
        return s;
    };

    Problem outer;
    outer.f = [&](const Vec& theta) { return -inner(theta).fx; };
    outer.psi = [&](const Vec& theta) {
        const Solution s = inner(theta);
        return super_psi(family, theta, s.x, q, a);
    };
    Solution s = minimize(family, b, options_of(spec, false), outer, starts);
    inner_ok = true;
    const Solution fin = inner(s.x);
    EstimateResult r;
    r.theta_hat = s.x;
    r.criterion_value = fin.fx;
    r.inner_solution = fin.x;
    r.iterations = s.iterations + inner_iters;
    r.psi_norm = super_psi(family, s.x, fin.x, q, a).norm();
    r.converged = s.converged && inner_ok && r.psi_norm <= spec.tol;
    return r;
}

EstimateResult estimate_power_pseudo(const Family& family, const EstimatorSpec& spec, const Measure& q) {
    if (spec.kind != EstimatorKind::PowerPseudo) throw InvalidInput("spec is not a power pseudodistance spec");
    const Bounds b = bounds_for(family, spec, q);
    if (spec.alpha == 0.0) return mle(family, q);
    const double a = spec.alpha;
    Problem p;
    p.f = [&](const Vec& th) { return pseudo_shifted(family, th, q, a); };
    p.psi = [&](const Vec& th) { return pseudo_psi(family, th, q, a); };
    EstimateResult r = to_result(minimize(family, b, options_of(spec, false), p, start_points(family, q, b)));
    r.criterion_value -= 1.0 / a;
    return r;
}

EstimateResult estimate_renyi(const Family& family, const EstimatorSpec& spec, const Measure& q) {
    if (spec.kind != EstimatorKind::Renyi) throw InvalidInput("spec is not a Renyi spec");
    const Bounds b = bounds_for(family, spec, q);
    if (spec.alpha == 0.0) return mle(family, q);
    const double a = spec.alpha;
    Problem p;
    p.f = [&](const Vec& th) { return renyi_neglog(family, th, q, a); };
    p.psi = [&](const Vec& th) { return renyi_psi(family, th, q, a); };
    EstimateResult r = to_result(minimize(family, b, options_of(spec, false), p, start_points(family, q, b)));
    r.criterion_value = std::exp(-a * r.criterion_value);
    return r;
}

EstimateResult estimate(const Family& family, const EstimatorSpec& spec, const Measure& q) {
    switch (spec.kind) {
        case EstimatorKind::MLE:
            spec.validate(family);
            return mle(family, q);
        case EstimatorKind::Subdivergence: return estimate_subdivergence(family, spec, q);
        case EstimatorKind::Superdivergence: return estimate_superdivergence(family, spec, q);
        case EstimatorKind::PowerPseudo: return estimate_power_pseudo(family, spec, q);
        case EstimatorKind::Renyi: return estimate_renyi(family, spec, q);
    }
    throw InvalidInput("unknown estimator kind");
}

}  // namespace mindiv
