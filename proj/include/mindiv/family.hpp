#pragma once

#include <random>
#include <string>
#include <vector>

#include "mindiv/types.hpp"

namespace mindiv {

enum class FamilyKind { NormalLocScale, NormalLocation, NormalScale, Pareto };

/// Parametric model on the real line.
///
/// Parameter layouts: NormalLocScale (mu, sigma), NormalLocation (mu) with
/// sigma = 1, NormalScale (sigma) with mu = 0, Pareto (theta) with density
/// theta / x^(theta+1) on x >= 1.
class Family {
public:
    explicit Family(FamilyKind kind) : kind_(kind) {}

    /// Accepts "normal", "normal-loc", "normal-scale", "pareto".
    static Family from_name(const std::string& name);

    FamilyKind kind() const noexcept { return kind_; }
    std::string name() const;
    int param_dim() const noexcept { return kind_ == FamilyKind::NormalLocScale ? 2 : 1; }
    bool is_normal() const noexcept { return kind_ != FamilyKind::Pareto; }
    double support_lower() const noexcept;

    /// Throws InvalidInput if the dimension is wrong or a scale/shape is not positive.
    void check(const Parameter& theta) const;
    bool in_support(double x) const noexcept;

    double density(const Parameter& theta, double x) const;
    double log_density(const Parameter& theta, double x) const;
    Vec score(const Parameter& theta, double x) const;
    Mat score_deriv(const Parameter& theta, double x) const;

    /// P_tt . (p_theta / p_tt)^alpha in closed form.
    double power_ratio_integral(const Parameter& theta, const Parameter& tt, double alpha) const;
    /// P_tt . [(p_theta / p_tt)^alpha s_tt]
    Vec tilted_escort_score(const Parameter& theta, const Parameter& tt, double alpha) const;
    /// P_tt . [(p_theta / p_tt)^alpha s_theta]
    Vec tilted_model_score(const Parameter& theta, const Parameter& tt, double alpha) const;

    /// Integral of p_theta^(1+alpha).
    double power_mass_integral(const Parameter& theta, double alpha) const;
    /// C_theta(alpha) = power_mass_integral^(alpha/(1+alpha)).
    double renyi_normalizer(const Parameter& theta, double alpha) const;
    /// Integral of p^(1+alpha) s divided by the power mass.
    Vec weighted_score_mean(const Parameter& theta, double alpha) const;

    std::vector<double> sample(const Parameter& theta, int n, std::mt19937_64& rng) const;

    /// (mu, sigma) for the normal kinds, filling in the fixed component.
    std::pair<double, double> mu_sigma(const Parameter& theta) const;
    /// Index of the location / scale coordinate inside the parameter, or -1.
    int loc_index() const noexcept;
    int scale_index() const noexcept;

private:
    FamilyKind kind_;
};

/// The normal closed form of C_theta(alpha): sigma^(-alpha^2/(1+alpha)) / c(alpha).
double normal_renyi_normalizer(double sigma, double alpha);

}  // namespace mindiv
