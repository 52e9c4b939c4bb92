#pragma once

#include <optional>
#include <string>

#include "mindiv/family.hpp"
#include "mindiv/measure.hpp"
#include "mindiv/solvers.hpp"

namespace mindiv {

enum class EstimatorKind { MLE, Subdivergence, Superdivergence, PowerPseudo, Renyi };

std::string to_string(EstimatorKind k);
/// Accepts "mle", "subdivergence", "superdivergence", "pseudo", "renyi".
EstimatorKind estimator_kind_from_name(const std::string& name);

struct Bounds {
    Vec lower;
    Vec upper;
};

struct EstimatorSpec {
    EstimatorKind kind = EstimatorKind::MLE;
    double alpha = 0.0;
    std::optional<Parameter> escort;  // subdivergence only
    std::optional<Bounds> bounds;     // defaults from the data when empty
    double tol = 1e-8;
    double param_tol = 1e-6;
    int max_iter = 500;
    int inner_max_iter = 200;

    static EstimatorSpec mle();
    static EstimatorSpec subdivergence(double alpha, Parameter escort);
    static EstimatorSpec superdivergence(double alpha);
    static EstimatorSpec power_pseudo(double alpha);
    static EstimatorSpec renyi(double alpha);

    /// Throws InvalidInput when alpha or the escort do not fit the kind.
    void validate(const Family& family) const;
};

struct EstimateResult {
    Parameter theta_hat;
    double criterion_value = 0.0;
    int iterations = 0;
    bool converged = false;
    std::optional<Parameter> inner_solution;  // superdivergence: argmin over theta-tilde
    double psi_norm = 0.0;
};

/// Search box derived from the data: location spans the sample range padded by
/// 10 IQR; scale runs from 1e-3 of the smaller of SD and 1.4826 MAD up to 10 SD;
/// the Pareto shape runs from a hundredth to a hundred times its MLE.
Bounds default_bounds(const Family& family, const Measure& q);

/// M_{alpha,theta}(Q, tt). The estimator minimizes it over tt.
double sub_criterion(const Family& family, const Parameter& theta, const Parameter& tt,
                     const Measure& q, double alpha);
/// Gradient of sub_criterion in tt:
/// P_tt.[(p_theta/p_tt)^a s_tt] - Q.[(p_theta/p_tt)^a s_tt]
Vec sub_psi(const Family& family, const Parameter& theta, const Parameter& tt, const Measure& q,
            double alpha);
/// Lower bound of D_alpha(P_theta, Q) obtained from escort tt:
/// 1/(1-a) + 1/a - M_{alpha,theta}(Q, tt).
double subdivergence_value(const Family& family, const Parameter& theta, const Parameter& tt,
                           const Measure& q, double alpha);
/// Gradient in theta of M at fixed tt; vanishes at the superdivergence estimate.
Vec super_psi(const Family& family, const Parameter& theta, const Parameter& tt, const Measure& q,
              double alpha);

/// Power pseudodistance criterion m(theta)/(1+a) - Q.p^a / a, and its gradient.
double pseudo_criterion(const Family& family, const Parameter& theta, const Measure& q, double alpha);
Vec pseudo_psi(const Family& family, const Parameter& theta, const Measure& q, double alpha);
/// C_theta(a)^-1 Q.p^a, maximized by the Renyi estimator; and the gradient of
/// its negative logarithm.
double renyi_criterion(const Family& family, const Parameter& theta, const Measure& q, double alpha);
Vec renyi_psi(const Family& family, const Parameter& theta, const Measure& q, double alpha);

EstimateResult mle(const Family& family, const Measure& q);
EstimateResult estimate_subdivergence(const Family& family, const EstimatorSpec& spec, const Measure& q);
EstimateResult estimate_superdivergence(const Family& family, const EstimatorSpec& spec, const Measure& q);
EstimateResult estimate_power_pseudo(const Family& family, const EstimatorSpec& spec, const Measure& q);
EstimateResult estimate_renyi(const Family& family, const EstimatorSpec& spec, const Measure& q);

/// Dispatches on spec.kind.
EstimateResult estimate(const Family& family, const EstimatorSpec& spec, const Measure& q);

}  // namespace mindiv
