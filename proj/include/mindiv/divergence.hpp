#pragma once

#include <functional>

#include "mindiv/types.hpp"

namespace mindiv {

class Family;
class Measure;

/// Within this distance of 0 or 1 the power kernels use their limit branches.
inline constexpr double kBranchTol = 1e-6;

/// phi_alpha(t) = (t^a - a t + a - 1) / (a (a - 1)), with log limits at a = 0, 1.
double phi(double alpha, double t);
/// t phi_alpha(1/t), equal to phi_{1-alpha}(t).
double phi_star(double alpha, double t);
double phi_ring(double alpha, double t);
double phi_sharp(double alpha, double t);

double psi_kernel(double alpha, double s, double t);

struct PsiParts {
    double psi0;
    double psi1;
    double rho;
};
/// psi_kernel(a, s, t) == psi0 + psi1 + rho * t
PsiParts psi_components(double alpha, double s, double t);

/// phi(0) + phi*(0) for the power family: 1/(a(1-a)) on (0,1), +inf otherwise.
double orthogonal_constant(double alpha);

/// D_alpha(P_theta, P_theta0), with quad a discretization of P_theta0.
double power_divergence(const Family& family, const Parameter& theta, const Parameter& theta0,
                        double alpha, const Measure& quad);

/// Renyi pseudodistance between P_theta and a measure Q with density q.
double renyi_pseudodistance(const Family& family, const Parameter& theta, const Measure& q_measure,
                            const std::function<double(double)>& q_density, double alpha);

}  // namespace mindiv
