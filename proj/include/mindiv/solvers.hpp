#pragma once

#include <functional>
#include <optional>
#include <vector>

#include "mindiv/types.hpp"

namespace mindiv {

struct SolverOptions {
    double tol = 1e-8;        // on the criterion and on the psi norm
    double param_tol = 1e-6;  // on the parameter
    int max_iter = 500;
};

struct Solution {
    Vec x;
    double fx = 0.0;
    int iterations = 0;
    bool converged = false;
    double psi_norm = -1.0;  // -1 when no psi was supplied
};

using Objective1 = std::function<double(double)>;
using Objective = std::function<double(const Vec&)>;
using PsiFn = std::function<Vec(const Vec&)>;

/// Bounded 1-D minimization: a coarse grid scan picks the bracket, Brent's
/// method refines it, and Newton steps on psi (if given) polish the root.
/// If start is given the grid scan is replaced by Newton on psi from start,
/// falling back to the full search when that fails.
Solution solve_1d(const Objective1& f, double lo, double hi, const SolverOptions& opt,
                  const std::function<double(double)>& psi = {},
                  std::optional<double> start = std::nullopt);

/// Bounded 2-D minimization: Nelder-Mead with clamping from each start,
/// one restart from the best vertex, then Newton polish on psi.
Solution solve_2d(const Objective& f, const Vec& lo, const Vec& hi, const SolverOptions& opt,
                  const PsiFn& psi = {}, const std::vector<Vec>& starts = {});

/// Newton iterations on psi(x) = 0 with a forward-difference Jacobian,
/// kept inside [lo, hi]. Returns the best point found (by psi norm).
Vec newton_polish(const PsiFn& psi, Vec x, const Vec& lo, const Vec& hi, int max_steps,
                  double* final_norm = nullptr, int* steps = nullptr);

}  // namespace mindiv
