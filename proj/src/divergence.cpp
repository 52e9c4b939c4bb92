#include "mindiv/divergence.hpp"

#include <cmath>
#include <limits>
#include <vector>

#include "mindiv/errors.hpp"
#include "mindiv/family.hpp"
#include "mindiv/measure.hpp"

namespace mindiv {

namespace {

void check_alpha(double alpha) {
    if (!std::isfinite(alpha) || alpha < 0.0)
        throw DomainError("power index must be finite and nonnegative");
}

// the phi kernels are convex for every real index; phi_star(2, .) needs phi(-1, .)
void check_real(double alpha) {
    if (!std::isfinite(alpha)) throw DomainError("power index must be finite");
}

double checked_log(double t, const char* what) {
    if (!(t > 0.0) || !std::isfinite(t))
        throw DomainError(std::string(what) + " requires a finite positive argument");
    return std::log(t);
}

bool near(double a, double b) { return std::abs(a - b) < kBranchTol; }

double log_sum_exp(const std::vector<double>& v) {
    double m = -std::numeric_limits<double>::infinity();
    for (double x : v) m = std::max(m, x);
    if (!std::isfinite(m)) return m;
    double s = 0.0;
    for (double x : v) s += std::exp(x - m);
    return m + std::log(s);
}

}  // namespace

double phi(double alpha, double t) {
    check_real(alpha);
    const double L = checked_log(t, "phi");
    if (near(alpha, 0.0)) return -L + t - 1.0;
    if (near(alpha, 1.0)) return t * L - t + 1.0;
    if (std::abs(alpha - 1.0) < 0.5) {
        const double b = alpha - 1.0;
        return (t * std::expm1(b * L) / b - (t - 1.0)) / alpha;
    }
    return (std::expm1(alpha * L) / alpha - (t - 1.0)) / (alpha - 1.0);
}

double phi_star(double alpha, double t) {
    checked_log(t, "phi_star");
    return t * phi(alpha, 1.0 / t);
}

double phi_ring(double alpha, double t) {
    check_real(alpha);
    const double L = checked_log(t, "phi_ring");
    if (near(alpha, 1.0)) return t * L;
    const double b = alpha - 1.0;
    return t * std::expm1(b * L) / b;
}

double phi_sharp(double alpha, double t) {
    check_real(alpha);
    const double L = checked_log(t, "phi_sharp");
    if (near(alpha, 0.0)) return -L;
    return -std::expm1(alpha * L) / alpha;
}

double psi_kernel(double alpha, double s, double t) {
    check_alpha(alpha);
    const double ls = checked_log(s, "psi_kernel");
    const double lt = checked_log(t, "psi_kernel");
    if (near(alpha, 0.0)) return s - t - t * (ls - lt);
    const double a1 = 1.0 + alpha;
    // t (t^a - s^a) / a written around the ratio s/t to avoid cancellation
    const double cross = -t * std::exp(alpha * lt) * std::expm1(alpha * (ls - lt)) / alpha;
    return (std::exp(a1 * ls) - std::exp(a1 * lt)) / a1 + cross;
}

PsiParts psi_components(double alpha, double s, double t) {
    check_alpha(alpha);
    const double ls = checked_log(s, "psi_components");
    const double lt = checked_log(t, "psi_components");
    const double a1 = 1.0 + alpha;
    PsiParts r{};
    r.psi0 = std::exp(a1 * ls) / a1;
    if (near(alpha, 0.0)) {
        r.psi1 = t * lt - t;
        r.rho = -ls;
    } else {
        r.psi1 = t * (std::expm1(alpha * lt) / alpha - std::exp(alpha * lt) / a1);
        r.rho = -std::expm1(alpha * ls) / alpha;
    }
    return r;
}

double orthogonal_constant(double alpha) {
    check_alpha(alpha);
    if (alpha > 0.0 && alpha < 1.0) return 1.0 / (alpha * (1.0 - alpha));
    return std::numeric_limits<double>::infinity();
}

double power_divergence(const Family& family, const Parameter& theta, const Parameter& theta0,
                        double alpha, const Measure& quad) {
    check_alpha(alpha);
    family.check(theta);
    family.check(theta0);
    const auto& x = quad.nodes();
    const auto& w = quad.weights();
    double sum = 0.0;
    for (std::size_t i = 0; i < x.size(); ++i) {
        const double l = family.log_density(theta, x[i]);
        const double l0 = family.log_density(theta0, x[i]);
        if (!std::isfinite(l) || !std::isfinite(l0))
            throw DomainError("zero density at a quadrature node");
        sum += w[i] * phi(alpha, std::exp(l - l0));
    }
    return sum;
}

double renyi_pseudodistance(const Family& family, const Parameter& theta, const Measure& q_measure,
                            const std::function<double(double)>& q_density, double alpha) {
    check_alpha(alpha);
    family.check(theta);
    const auto& x = q_measure.nodes();
    const auto& w = q_measure.weights();
    std::vector<double> lq(x.size()), lp(x.size());
    for (std::size_t i = 0; i < x.size(); ++i) {
        const double q = q_density(x[i]);
        if (!(q > 0.0) || !std::isfinite(q)) throw DomainError("q density must be positive at every node");
        lq[i] = std::log(q);
        lp[i] = family.log_density(theta, x[i]);
        if (!std::isfinite(lp[i])) throw DomainError("model density vanishes at a node");
    }
    if (near(alpha, 0.0)) {
        double s = 0.0;
        for (std::size_t i = 0; i < x.size(); ++i) s += w[i] * (lq[i] - lp[i]);
        return s;
    }
    std::vector<double> aq(x.size()), ap(x.size());
    for (std::size_t i = 0; i < x.size(); ++i) {
        aq[i] = std::log(w[i]) + alpha * lq[i];
        ap[i] = std::log(w[i]) + alpha * lp[i];
    }
    const double mass = family.power_mass_integral(theta, alpha);
    if (!(mass > 0.0)) throw DomainError("nonpositive power mass");
    return std::log(mass) / (1.0 + alpha) + log_sum_exp(aq) / (alpha * (1.0 + alpha)) -
           log_sum_exp(ap) / alpha;
}

}  // namespace mindiv
