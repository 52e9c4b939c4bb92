#pragma once

#include <functional>
#include <iosfwd>
#include <vector>

#include "mindiv/estimators.hpp"

namespace mindiv {

struct InfluenceCurve {
    EstimatorSpec estimator;
    Parameter eval_param;
    std::vector<double> grid;
    std::vector<Vec> values;
};

/// Writes "x,if_component_1[,if_component_2]" then one row per grid point.
void write_csv(std::ostream& out, const InfluenceCurve& curve);

using PsiOf = std::function<Vec(const Parameter&, double)>;
using PsiDerivOf = std::function<Mat(const Parameter&, double)>;

/// -I(Q)^-1 psi(x, T(Q)), I(Q) = Q.psi_deriv(., T(Q)).
Vec if_general(const PsiOf& psi, const PsiDerivOf& psi_deriv, const Measure& q, const Parameter& t_of_q,
               double x);

/// Gateaux quotient (T(Q_{eps,x}) - T(Q)) / eps, Richardson-combined over eps
/// and eps/2. When the combination is not yet stable the pair is shrunk by 4
/// until two successive combinations agree.
Vec if_numeric(const Family& family, const EstimatorSpec& spec, const Measure& q, double x,
               double eps = 1e-3);
/// Same, reusing a precomputed T(Q).
Vec if_numeric(const Family& family, const EstimatorSpec& spec, const Measure& q, const Parameter& t_of_q,
               double x, double eps);

double if_mle_location(double mu0, double x);
double if_mle_scale(double sigma0, double x);

/// Subdivergence, normal location with escort mu at P_mu0.
double if_sub_location(double alpha, double escort_mu, double mu0, double x);
/// Subdivergence, normal scale with escort sigma at P_sigma0.
double if_sub_scale(double alpha, double escort_sigma, double sigma0, double x);
/// Subdivergence, any family, expectations by quadrature of P_theta0.
Vec if_sub(const Family& family, double alpha, const Parameter& escort, const Parameter& theta0, double x);

/// Power pseudodistance estimator, any family.
Vec if_pseudo(const Family& family, double alpha, const Parameter& theta, double x);
/// Normal location (unit variance): x e^{-a x^2/2} over -int x e^{-a x^2/2} q'(x) dx.
double if_pseudo_location_ratio(double alpha, double mu, double x);
/// Normal scale closed form.
double if_pseudo_scale(double alpha, double sigma, double x);

/// Renyi pseudodistance estimator, any family.
Vec if_renyi(const Family& family, double alpha, const Parameter& theta, double x);
/// Normal scale closed form.
double if_renyi_scale(double alpha, double sigma, double x);

struct Extended {
    bool infinite = false;
    double value = 0.0;
};

struct SensitivitySummary {
    Extended sup_abs;
    Extended limit_at_infinity;
};

/// Sup of |IF| over a grid on [-R, R], with R doubled from 8 scale until the
/// tails settle (finite limit) or keep growing (+infinity marker).
SensitivitySummary sensitivity(const std::function<double(double)>& curve, double scale,
                               const std::vector<double>& anchors = {});
/// Anchor of the pseudo-scale sensitivity maximizer: sigma sqrt((2+a)/a).
double pseudo_scale_sup_anchor(double alpha, double sigma);

}  // namespace mindiv
