#include "mindiv/family.hpp"

#include <cmath>

#include "mindiv/errors.hpp"

namespace mindiv {

namespace {

constexpr double kLogSqrt2Pi = 0.91893853320467274178;

double gauss_log_density(double mu, double sigma, double x) {
    const double z = (x - mu) / sigma;
    return -0.5 * z * z - std::log(sigma) - kLogSqrt2Pi;
}

}  // namespace

Family Family::from_name(const std::string& name) {
    if (name == "normal") return Family(FamilyKind::NormalLocScale);
    if (name == "normal-loc") return Family(FamilyKind::NormalLocation);
    if (name == "normal-scale") return Family(FamilyKind::NormalScale);
    if (name == "pareto") return Family(FamilyKind::Pareto);
    throw InvalidInput("unknown family '" + name + "' (normal, normal-loc, normal-scale, pareto)");
}

std::string Family::name() const {
    switch (kind_) {
        case FamilyKind::NormalLocScale: return "normal";
        case FamilyKind::NormalLocation: return "normal-loc";
        case FamilyKind::NormalScale: return "normal-scale";
        case FamilyKind::Pareto: return "pareto";
    }
    return {};
}

double Family::support_lower() const noexcept {
    return kind_ == FamilyKind::Pareto ? 1.0 : -HUGE_VAL;
}

int Family::loc_index() const noexcept {
    switch (kind_) {
        case FamilyKind::NormalLocScale:
        case FamilyKind::NormalLocation: return 0;
        default: return -1;
    }
}

int Family::scale_index() const noexcept {
    switch (kind_) {
        case FamilyKind::NormalLocScale: return 1;
        case FamilyKind::NormalScale:
        case FamilyKind::Pareto: return 0;
        default: return -1;
    }
}

void Family::check(const Parameter& theta) const {
    if (theta.size() != param_dim())
        throw InvalidInput(name() + " expects " + std::to_string(param_dim()) + " parameter(s)");
    for (int i = 0; i < theta.size(); ++i)
        if (!std::isfinite(theta[i])) throw InvalidInput("parameter must be finite");
    const int si = scale_index();
    if (si >= 0 && !(theta[si] > 0.0)) throw InvalidInput("scale/shape parameter must be positive");
}

bool Family::in_support(double x) const noexcept {
    if (!std::isfinite(x)) return false;
    return kind_ != FamilyKind::Pareto || x >= 1.0;
}

std::pair<double, double> Family::mu_sigma(const Parameter& theta) const {
    switch (kind_) {
        case FamilyKind::NormalLocScale: return {theta[0], theta[1]};
        case FamilyKind::NormalLocation: return {theta[0], 1.0};
        case FamilyKind::NormalScale: return {0.0, theta[0]};
        case FamilyKind::Pareto: break;
    }
    throw InvalidInput("pareto has no location/scale form");
}

double Family::log_density(const Parameter& theta, double x) const {
    check(theta);
    if (!in_support(x)) throw DomainError("x outside the support of " + name());
    if (is_normal()) {
        const auto [mu, sigma] = mu_sigma(theta);
        return gauss_log_density(mu, sigma, x);
    }
    const double th = theta[0];
    return std::log(th) - (th + 1.0) * std::log(x);
}

double Family::density(const Parameter& theta, double x) const {
    return std::exp(log_density(theta, x));
}

Vec Family::score(const Parameter& theta, double x) const {
    check(theta);
    if (!in_support(x)) throw DomainError("x outside the support of " + name());
    Vec s(param_dim());
    switch (kind_) {
        case FamilyKind::NormalLocScale: {
            const double mu = theta[0], sigma = theta[1];
            const double z = (x - mu) / sigma;
            s << (x - mu) / (sigma * sigma), (z * z - 1.0) / sigma;
            break;
        }
        case FamilyKind::NormalLocation: s << x - theta[0]; break;
        case FamilyKind::NormalScale: {
            const double sigma = theta[0];
            const double z = x / sigma;
            s << (z * z - 1.0) / sigma;
            break;
        }
        case FamilyKind::Pareto: s << 1.0 / theta[0] - std::log(x); break;
    }
    return s;
}

Mat Family::score_deriv(const Parameter& theta, double x) const {
    check(theta);
    if (!in_support(x)) throw DomainError("x outside the support of " + name());
    Mat d(param_dim(), param_dim());
    switch (kind_) {
        case FamilyKind::NormalLocScale: {
            const double mu = theta[0], sigma = theta[1];
            const double z = (x - mu) / sigma;
            const double s2 = sigma * sigma;
            const double off = -2.0 * (x - mu) / (s2 * sigma);
            d << -1.0 / s2, off, off, (1.0 - 3.0 * z * z) / s2;
            break;
        }
        case FamilyKind::NormalLocation: d << -1.0; break;
        case FamilyKind::NormalScale: {
            const double sigma = theta[0];
            const double z = x / sigma;
            d << (1.0 - 3.0 * z * z) / (sigma * sigma);
            break;
        }
        case FamilyKind::Pareto: d << -1.0 / (theta[0] * theta[0]); break;
    }
    return d;
}

double Family::power_ratio_integral(const Parameter& theta, const Parameter& tt, double alpha) const {
    check(theta);
    check(tt);
    if (is_normal()) {
        const auto [mu, s] = mu_sigma(theta);
        const auto [mut, st] = mu_sigma(tt);
        const double V = alpha * st * st + (1.0 - alpha) * s * s;
        if (!(V > 0.0)) throw DomainError("power ratio integral diverges for this alpha");
        const double d = mu - mut;
        return std::pow(s, 1.0 - alpha) * std::pow(st, alpha) / std::sqrt(V) *
               std::exp(-alpha * (1.0 - alpha) * d * d / (2.0 * V));
    }
    const double th = theta[0], tht = tt[0];
    const double V = alpha * th + (1.0 - alpha) * tht;
    if (!(V > 0.0)) throw DomainError("power ratio integral diverges for this alpha");
    return std::pow(th, alpha) * std::pow(tht, 1.0 - alpha) / V;
}

Vec Family::tilted_escort_score(const Parameter& theta, const Parameter& tt, double alpha) const {
    const double pri = power_ratio_integral(theta, tt, alpha);
    Vec g(param_dim());
    if (is_normal()) {
        const auto [mu, s] = mu_sigma(theta);
        const auto [mut, st] = mu_sigma(tt);
        const double V = alpha * st * st + (1.0 - alpha) * s * s;
        const double d = mu - mut;
        const double gmu = alpha * d / V;
        const double gsig = alpha * alpha * d * d * st / (V * V) + alpha * (s * s - st * st) / (st * V);
        if (loc_index() >= 0) g[loc_index()] = gmu;
        if (scale_index() >= 0) g[scale_index()] = gsig;
    } else {
        const double V = alpha * theta[0] + (1.0 - alpha) * tt[0];
        g << 1.0 / tt[0] - 1.0 / V;
    }
    return pri * g;
}

Vec Family::tilted_model_score(const Parameter& theta, const Parameter& tt, double alpha) const {
    const double pri = power_ratio_integral(theta, tt, alpha);
    Vec g(param_dim());
    if (is_normal()) {
        const auto [mu, s] = mu_sigma(theta);
        const auto [mut, st] = mu_sigma(tt);
        const double V = alpha * st * st + (1.0 - alpha) * s * s;
        const double d = mu - mut;
        const double b = 1.0 - alpha;
        const double gmu = -b * d / V;
        const double gsig = b * b * d * d * s / (V * V) + b * (st * st - s * s) / (s * V);
        if (loc_index() >= 0) g[loc_index()] = gmu;
        if (scale_index() >= 0) g[scale_index()] = gsig;
    } else {
        const double V = alpha * theta[0] + (1.0 - alpha) * tt[0];
        g << 1.0 / theta[0] - 1.0 / V;
    }
    return pri * g;
}

double Family::power_mass_integral(const Parameter& theta, double alpha) const {
    check(theta);
    if (!(alpha >= 0.0)) throw DomainError("power index must be nonnegative");
    if (is_normal()) {
        const double s = mu_sigma(theta).second;
        return std::pow(1.0 + alpha, -0.5) * std::pow(2.0 * M_PI * s * s, -0.5 * alpha);
    }
    const double th = theta[0];
    return std::pow(th, 1.0 + alpha) / (th * (1.0 + alpha) + alpha);
}

double Family::renyi_normalizer(const Parameter& theta, double alpha) const {
    if (!(alpha >= 0.0)) throw DomainError("power index must be nonnegative");
    return std::pow(power_mass_integral(theta, alpha), alpha / (1.0 + alpha));
}

double normal_renyi_normalizer(double sigma, double alpha) {
    const double c = std::pow((1.0 + alpha) * std::pow(2.0 * M_PI, alpha), alpha / (2.0 * (1.0 + alpha)));
    return std::pow(sigma, -alpha * alpha / (1.0 + alpha)) / c;
}

Vec Family::weighted_score_mean(const Parameter& theta, double alpha) const {
    check(theta);
    Vec c = Vec::Zero(param_dim());
    if (is_normal()) {
        const double s = mu_sigma(theta).second;
        if (scale_index() >= 0) c[scale_index()] = -alpha / (s * (1.0 + alpha));
    } else {
        const double th = theta[0];
        c << 1.0 / th - 1.0 / (th * (1.0 + alpha) + alpha);
    }
    return c;
}

std::vector<double> Family::sample(const Parameter& theta, int n, std::mt19937_64& rng) const {
    check(theta);
    if (n < 1) throw InvalidInput("sample size must be positive");
    std::vector<double> out(static_cast<std::size_t>(n));
    if (is_normal()) {
        const auto [mu, s] = mu_sigma(theta);
        std::normal_distribution<double> nd(mu, s);
        for (double& v : out) v = nd(rng);
    } else {
        std::uniform_real_distribution<double> ud(0.0, 1.0);
        const double th = theta[0];
        for (double& v : out) v = std::pow(1.0 - ud(rng), -1.0 / th);
    }
    return out;
}

}  // namespace mindiv
