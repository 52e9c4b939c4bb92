#include "mindiv/influence.hpp"

#include <algorithm>
#include <boost/math/tools/minima.hpp>
#include <cmath>
#include <cstdio>
#include <limits>
#include <ostream>

#include "mindiv/errors.hpp"

namespace mindiv {

void write_csv(std::ostream& out, const InfluenceCurve& curve) {
    const int d = curve.values.empty() ? static_cast<int>(curve.eval_param.size())
                                       : static_cast<int>(curve.values.front().size());
    out << "x";
    for (int j = 0; j < d; ++j) out << ",if_component_" << (j + 1);
    out << "\n";
    char buf[64];
    for (std::size_t i = 0; i < curve.grid.size(); ++i) {
        std::snprintf(buf, sizeof buf, "%.17g", curve.grid[i]);
        out << buf;
        for (int j = 0; j < d; ++j) {
            std::snprintf(buf, sizeof buf, "%.17g", curve.values[i][j]);
            out << "," << buf;
        }
        out << "\n";
    }
}

namespace {

Vec solve_checked(const Mat& I, const Vec& rhs, const char* what) {
    Eigen::FullPivLU<Mat> lu(I);
    lu.setThreshold(1e-12);
    if (!I.allFinite() || !lu.isInvertible())
        throw SingularMatrixError(std::string(what) + ": matrix is singular", I);
    return lu.solve(rhs);
}

}  // namespace

Vec if_general(const PsiOf& psi, const PsiDerivOf& psi_deriv, const Measure& q, const Parameter& t_of_q,
               double x) {
    const int d = static_cast<int>(t_of_q.size());
    Mat I = Mat::Zero(d, d);
    for (std::size_t i = 0; i < q.size(); ++i) I += q.weights()[i] * psi_deriv(t_of_q, q.nodes()[i]);
    return -solve_checked(I, psi(t_of_q, x), "if_general");
}

Vec if_numeric(const Family& family, const EstimatorSpec& spec, const Measure& q, const Parameter& t0,
               double x, double eps) {
    if (!(eps > 0.0 && eps <= 0.05)) throw InvalidInput("eps must lie in (0, 0.05]");
    auto at = [&](double e) {
        EstimateResult r = estimate(family, spec, contaminate(q, x, e));
        if (!r.converged)
            throw EstimationError("estimation did not converge at contamination eps=" + std::to_string(e) +
                                  ", x=" + std::to_string(x));
        return Vec((r.theta_hat - t0) / e);
    };
    auto richardson = [&](double e) { return Vec(2.0 * at(0.5 * e) - at(e)); };

    Vec prev = richardson(eps);
    double e = eps;
    for (int k = 0; k < 6; ++k) {
        e *= 0.25;
        Vec cur = richardson(e);
        if ((cur - prev).norm() <= 1e-6 * (1.0 + cur.norm())) return cur;
        prev = cur;
    }
    return prev;
}

Vec if_numeric(const Family& family, const EstimatorSpec& spec, const Measure& q, double x, double eps) {
    if (!(eps > 0.0 && eps <= 0.05)) throw InvalidInput("eps must lie in (0, 0.05]");
    EstimateResult base = estimate(family, spec, q);
    if (!base.converged) throw EstimationError("estimation did not converge at the base measure");
    return if_numeric(family, spec, q, base.theta_hat, x, eps);
}

double if_mle_location(double mu0, double x) { return x - mu0; }

double if_mle_scale(double sigma0, double x) {
    const double z = x / sigma0;
    return sigma0 * (z * z - 1.0) / 2.0;
}

double if_sub_location(double alpha, double escort_mu, double mu0, double x) {
    const double d = mu0 - escort_mu;
    const double e0 = std::exp(alpha * (alpha - 1.0) * d * d / 2.0);
    const double num = (x - mu0) * std::exp(alpha * d * (mu0 + escort_mu - 2.0 * x) / 2.0) + alpha * d * e0;
    return num / ((1.0 + alpha * alpha * d * d) * e0);
}

double if_sub_scale(double alpha, double escort_sigma, double sigma0, double x) {
    const double s = escort_sigma, s0 = sigma0;
    const double A = alpha * s0 * s0 + (1.0 - alpha) * s * s;
    const double B = 2.0 * std::pow(s, 4) + alpha * alpha * std::pow(s0 * s0 - s * s, 2);
    const double z = x / s0;
    const double delta = std::pow(A, 2.5) * (z * z - 1.0) *
                         std::exp(alpha * x * x * (1.0 / (s0 * s0) - 1.0 / (s * s)) / 2.0) / (s * B / s0);
    return delta + alpha * s0 * (s0 * s0 - s * s) * A / B;
}

Vec if_sub(const Family& family, double alpha, const Parameter& escort, const Parameter& theta0, double x) {
    if (!(alpha >= 0.0 && alpha < 1.0)) throw DomainError("subdivergence IF needs alpha in [0,1)");
    family.check(escort);
    family.check(theta0);
    const Measure pq = quadrature_of(family, theta0, 512);
    const int d = family.param_dim();
    Mat I = Mat::Zero(d, d);
    Vec mean = Vec::Zero(d);
    auto lr = [&](double y) {
        return std::exp(alpha * (family.log_density(escort, y) - family.log_density(theta0, y)));
    };
    for (std::size_t i = 0; i < pq.size(); ++i) {
        const double y = pq.nodes()[i];
        const Vec s = family.score(theta0, y);
        const double l = lr(y);
        I += pq.weights()[i] * l * s * s.transpose();
        mean += pq.weights()[i] * l * s;
    }
    return solve_checked(I, Vec(lr(x) * family.score(theta0, x) - mean), "if_sub");
}

Vec if_pseudo(const Family& family, double alpha, const Parameter& theta, double x) {
    if (!(alpha >= 0.0)) throw DomainError("alpha must be nonnegative");
    family.check(theta);
    const Measure pq = quadrature_of(family, theta, 512);
    const int d = family.param_dim();
    Mat I = Mat::Zero(d, d);
    for (std::size_t i = 0; i < pq.size(); ++i) {
        const double y = pq.nodes()[i];
        const Vec s = family.score(theta, y);
        I += pq.weights()[i] * std::exp(alpha * family.log_density(theta, y)) * s * s.transpose();
    }
    const Vec mean = family.power_mass_integral(theta, alpha) * family.weighted_score_mean(theta, alpha);
    const Vec rhs = std::exp(alpha * family.log_density(theta, x)) * family.score(theta, x) - mean;
    return solve_checked(I, rhs, "if_pseudo");
}

double if_pseudo_location_ratio(double alpha, double mu, double x) {
    static const Measure q = quadrature_of(Family(FamilyKind::NormalLocation), param(0.0), 512);
    // -int y e^{-a y^2/2} q'(y) dy with q'(y) = -y q(y)
    const double den = integrate(q, [&](double y) { return y * y * std::exp(-alpha * y * y / 2.0); });
    const double y = x - mu;
    return y * std::exp(-alpha * y * y / 2.0) / den;
}

double if_pseudo_scale(double alpha, double sigma, double x) {
    const double z = x / sigma;
    return std::pow(1.0 + alpha, 2.5) * sigma / (alpha * alpha + 2.0) *
           ((z * z - 1.0) * std::exp(-alpha * z * z / 2.0) + alpha / std::pow(1.0 + alpha, 1.5));
}

Vec if_renyi(const Family& family, double alpha, const Parameter& theta, double x) {
    if (!(alpha >= 0.0)) throw DomainError("alpha must be nonnegative");
    family.check(theta);
    const Measure pq = quadrature_of(family, theta, 512);
    const int d = family.param_dim();
    const Vec c = family.weighted_score_mean(theta, alpha);
    Mat I = Mat::Zero(d, d);
    for (std::size_t i = 0; i < pq.size(); ++i) {
        const double y = pq.nodes()[i];
        const Vec s = family.score(theta, y) - c;
        I += pq.weights()[i] * std::exp(alpha * family.log_density(theta, y)) * s * s.transpose();
    }
    const Vec rhs = std::exp(alpha * family.log_density(theta, x)) * (family.score(theta, x) - c);
    return solve_checked(I, rhs, "if_renyi");
}

double if_renyi_scale(double alpha, double sigma, double x) {
    const double z = x / sigma;
    return std::pow(1.0 + alpha, 2.5) * sigma / 2.0 * (z * z - 1.0 / (1.0 + alpha)) *
           std::exp(-alpha * z * z / 2.0);
}

double pseudo_scale_sup_anchor(double alpha, double sigma) {
    return sigma * std::sqrt((2.0 + alpha) / alpha);
}

SensitivitySummary sensitivity(const std::function<double(double)>& curve, double scale,
                               const std::vector<double>& anchors) {
    if (!(scale > 0.0)) throw InvalidInput("sensitivity scale must be positive");
    const double inf = std::numeric_limits<double>::infinity();
    auto g = [&](double x) {
        const double v = curve(x);
        return std::isfinite(v) ? v : inf;
    };
    SensitivitySummary out;

    // tails: double the radius until both sides settle or blow up
    const double R0 = 8.0 * scale;
    double prev_p = g(R0), prev_m = g(-R0);
    bool settled = false;
    double R = R0;
    for (int k = 1; k <= 14; ++k) {
        R *= 2.0;
        const double vp = g(R), vm = g(-R);
        if (!std::isfinite(vp) || !std::isfinite(vm)) break;
        if (std::abs(vp - prev_p) <= 1e-9 * (1.0 + std::abs(vp)) &&
            std::abs(vm - prev_m) <= 1e-9 * (1.0 + std::abs(vm))) {
            settled = true;
            prev_p = vp;
            prev_m = vm;
            break;
        }
        prev_p = vp;
        prev_m = vm;
    }
    if (!settled) {
        out.sup_abs.infinite = true;
        out.limit_at_infinity.infinite = true;
        return out;
    }
    out.limit_at_infinity.value = std::abs(prev_p) >= std::abs(prev_m) ? prev_p : prev_m;

    // sup over [-R, R]: dense scan, then refine around the best grid point
    const int N = 4001;
    double best = 0.0, bx = 0.0;
    auto consider = [&](double x) {
        const double v = std::abs(g(x));
        if (v > best) {
            best = v;
            bx = x;
        }
    };
    for (int i = 0; i < N; ++i) consider(-R + 2.0 * R * i / (N - 1));
    for (double a : anchors) {
        consider(a);
        consider(-a);
    }
    const double h = 2.0 * R / (N - 1);
    std::uintmax_t it = 200;
    const auto r = boost::math::tools::brent_find_minima([&](double x) { return -std::abs(g(x)); },
                                                         bx - h, bx + h, 50, it);
    if (-r.second > best) best = -r.second;
    if (!std::isfinite(best)) {
        out.sup_abs.infinite = true;
        return out;
    }
    out.sup_abs.value = std::max(best, std::abs(out.limit_at_infinity.value));
    return out;
}

}  // namespace mindiv
