#include "mindiv/solvers.hpp"

#include <algorithm>
#include <array>
#include <boost/math/tools/minima.hpp>
#include <cmath>
#include <limits>

#include "mindiv/errors.hpp"

namespace mindiv {

namespace {

constexpr int kGridPoints = 48;

double checked(double v) {
    if (std::isnan(v)) throw NumericError("objective returned NaN inside the bounds");
    return v;
}

Vec clamp(Vec x, const Vec& lo, const Vec& hi) {
    for (int i = 0; i < x.size(); ++i) x[i] = std::clamp(x[i], lo[i], hi[i]);
    return x;
}

double safe_norm(const Vec& v) {
    for (int i = 0; i < v.size(); ++i)
        if (!std::isfinite(v[i])) return std::numeric_limits<double>::infinity();
    return v.norm();
}

}  // namespace

Vec newton_polish(const PsiFn& psi, Vec x, const Vec& lo, const Vec& hi, int max_steps,
                  double* final_norm, int* steps) {
    const int d = static_cast<int>(x.size());
    Vec r = psi(x);
    double nr = safe_norm(r);
    int k = 0;
    for (; k < max_steps && nr > 0.0 && std::isfinite(nr); ++k) {
        Mat J = Mat::Zero(d, d);
        for (int j = 0; j < d; ++j) {
            const double h = 1e-6 * std::max(1.0, std::abs(x[j]));
            Vec xp = x, xm = x;
            xp[j] = std::min(x[j] + h, hi[j]);
            xm[j] = std::max(x[j] - h, lo[j]);
            if (xp[j] == xm[j]) break;
            J.col(j) = (psi(xp) - psi(xm)) / (xp[j] - xm[j]);
        }
        Eigen::FullPivLU<Mat> lu(J);
        if (!lu.isInvertible() || !J.allFinite()) break;
        const Vec dx = lu.solve(-r);
        if (!dx.allFinite()) break;
        double t = 1.0;
        bool accepted = false;
        for (int b = 0; b < 30; ++b, t *= 0.5) {
            Vec xn = clamp(x + t * dx, lo, hi);
            Vec rn = psi(xn);
            const double nn = safe_norm(rn);
            if (nn < nr) {
                const double moved = (xn - x).norm();
                x = xn;
                r = rn;
                nr = nn;
                accepted = true;
                if (moved <= 1e-15 * (1.0 + x.norm())) k = max_steps;
                break;
            }
        }
        if (!accepted) break;
    }
    if (final_norm) *final_norm = nr;
    if (steps) *steps = k;
    return x;
}

Solution solve_1d(const Objective1& f, double lo, double hi, const SolverOptions& opt,
                  const std::function<double(double)>& psi, std::optional<double> start) {
    if (!(lo <= hi)) throw InvalidInput("solve_1d: empty interval");
    const auto fc = [&](double x) { return checked(f(x)); };
    Vec vlo = param(lo), vhi = param(hi);
    PsiFn vpsi;
    if (psi) vpsi = [&](const Vec& v) { return param(psi(v[0])); };

    if (start && vpsi) {
        double nrm = 0.0;
        int steps = 0;
        Vec x = newton_polish(vpsi, param(std::clamp(*start, lo, hi)), vlo, vhi, 40, &nrm, &steps);
        if (nrm <= opt.tol) {
            Solution s;
            s.x = x;
            s.fx = fc(x[0]);
            s.iterations = steps;
            s.converged = true;
            s.psi_norm = nrm;
            return s;
        }
    }

    std::array<double, kGridPoints> grid{};
    const bool logspace = lo > 0.0 && hi / lo > 100.0;
    for (int i = 0; i < kGridPoints; ++i) {
        const double u = static_cast<double>(i) / (kGridPoints - 1);
        grid[i] = logspace ? lo * std::pow(hi / lo, u) : lo + u * (hi - lo);
    }
    grid.back() = hi;
    int best = 0;
    double fbest = std::numeric_limits<double>::infinity();
    for (int i = 0; i < kGridPoints; ++i) {
        const double v = fc(grid[i]);
        if (v < fbest) {
            fbest = v;
            best = i;
        }
    }
    const double a = grid[std::max(best - 1, 0)];
    const double b = grid[std::min(best + 1, kGridPoints - 1)];

    std::uintmax_t iters = static_cast<std::uintmax_t>(opt.max_iter);
    const auto br = boost::math::tools::brent_find_minima(fc, a, b, std::numeric_limits<double>::digits / 2 + 4, iters);
    Solution s;
    s.x = param(br.first);
    s.fx = br.second;
    if (!(s.fx <= fbest)) {
        s.x = param(grid[best]);
        s.fx = fbest;
    }
    s.iterations = kGridPoints + static_cast<int>(iters);
    s.converged = static_cast<int>(iters) < opt.max_iter;

    if (vpsi) {
        double nrm = 0.0;
        int steps = 0;
        Vec xp = newton_polish(vpsi, s.x, vlo, vhi, 40, &nrm, &steps);
        const double fp = fc(xp[0]);
        if (fp <= s.fx + 1e-10 * (1.0 + std::abs(s.fx))) {
            s.x = xp;
            s.fx = fp;
            s.psi_norm = nrm;
        } else {
            s.psi_norm = safe_norm(vpsi(s.x));
        }
        s.iterations += steps;
        s.converged = s.psi_norm <= opt.tol;
    }
    return s;
}

namespace {

struct NMResult {
    Vec x;
    double fx;
    int iterations;
    bool stopped;
};

NMResult nelder_mead(const Objective& f, const Vec& x0, const Vec& lo, const Vec& hi,
                     const SolverOptions& opt) {
    const int d = static_cast<int>(x0.size());
    std::vector<Vec> pts(d + 1, x0);
    std::vector<double> fv(d + 1);
    for (int j = 0; j < d; ++j) {
        double step = 0.1 * std::max(std::abs(x0[j]), 1e-2 * (hi[j] - lo[j]));
        if (step == 0.0) step = 1e-3;
        if (x0[j] + step > hi[j]) step = -step;
        pts[j + 1][j] = std::clamp(x0[j] + step, lo[j], hi[j]);
    }
    for (int i = 0; i <= d; ++i) fv[i] = checked(f(pts[i]));

    int it = 0;
    bool stopped = false;
    std::vector<int> order(d + 1);
    for (; it < opt.max_iter; ++it) {
        for (int i = 0; i <= d; ++i) order[i] = i;
        std::stable_sort(order.begin(), order.end(), [&](int a, int b) { return fv[a] < fv[b]; });
        const int ib = order.front(), iw = order.back(), isw = order[d - 1];
        double diam = 0.0;
        for (int i = 0; i <= d; ++i) diam = std::max(diam, (pts[i] - pts[ib]).lpNorm<Eigen::Infinity>());
        const double spread = fv[iw] - fv[ib];
        if (spread <= opt.tol * 1e-2 * (1.0 + std::abs(fv[ib])) &&
            diam <= opt.param_tol * 1e-3 * (1.0 + pts[ib].lpNorm<Eigen::Infinity>())) {
            stopped = true;
            break;
        }
        Vec c = Vec::Zero(d);
        for (int i = 0; i <= d; ++i)
            if (i != iw) c += pts[i];
        c /= d;
        const Vec xr = clamp(c + (c - pts[iw]), lo, hi);
        const double fr = checked(f(xr));
        if (fr < fv[ib]) {
            const Vec xe = clamp(c + 2.0 * (c - pts[iw]), lo, hi);
            const double fe = checked(f(xe));
            if (fe < fr) {
                pts[iw] = xe;
                fv[iw] = fe;
            } else {
                pts[iw] = xr;
                fv[iw] = fr;
            }
            continue;
        }
        if (fr < fv[isw]) {
            pts[iw] = xr;
            fv[iw] = fr;
            continue;
        }
        const bool outside = fr < fv[iw];
        const Vec xc = outside ? Vec(c + 0.5 * (xr - c)) : Vec(c + 0.5 * (pts[iw] - c));
        const double fcv = checked(f(xc));
        if (fcv < (outside ? fr : fv[iw])) {
            pts[iw] = xc;
            fv[iw] = fcv;
            continue;
        }
        for (int i = 0; i <= d; ++i) {
            if (i == ib) continue;
            pts[i] = pts[ib] + 0.5 * (pts[i] - pts[ib]);
            fv[i] = checked(f(pts[i]));
        }
    }
    int ib = 0;
    for (int i = 1; i <= d; ++i)
        if (fv[i] < fv[ib]) ib = i;
    return {pts[ib], fv[ib], it, stopped};
}

}  // namespace

Solution solve_2d(const Objective& f, const Vec& lo, const Vec& hi, const SolverOptions& opt,
                  const PsiFn& psi, const std::vector<Vec>& starts) {
    if (lo.size() != hi.size() || (lo.array() > hi.array()).any())
        throw InvalidInput("solve_2d: empty box");
    std::vector<Vec> s0 = starts;
    if (s0.empty()) s0.push_back(0.5 * (lo + hi));

    Solution best;
    best.fx = std::numeric_limits<double>::infinity();
    int total = 0;
    for (const Vec& st : s0) {
        NMResult r = nelder_mead(f, clamp(st, lo, hi), lo, hi, opt);
        total += r.iterations;
        NMResult r2 = nelder_mead(f, r.x, lo, hi, opt);
        total += r2.iterations;
        if (r2.fx <= r.fx) r = {r2.x, r2.fx, r.iterations + r2.iterations, r2.stopped};
        // ties keep the lexicographically smallest point
        const bool better = r.fx < best.fx ||
                            (r.fx == best.fx && std::lexicographical_compare(r.x.data(), r.x.data() + r.x.size(),
                                                                             best.x.data(), best.x.data() + best.x.size()));
        if (better) {
            best.x = r.x;
            best.fx = r.fx;
            best.converged = r.stopped;
        }
    }
    best.iterations = total;
    if (psi) {
        double nrm = 0.0;
        int steps = 0;
        Vec xp = newton_polish(psi, best.x, lo, hi, 40, &nrm, &steps);
        const double fp = checked(f(xp));
        if (fp <= best.fx + 1e-10 * (1.0 + std::abs(best.fx))) {
            best.x = xp;
            best.fx = fp;
            best.psi_norm = nrm;
        } else {
            best.psi_norm = safe_norm(psi(best.x));
        }
        best.iterations += steps;
        best.converged = best.psi_norm <= opt.tol;
    }
    return best;
}

}  // namespace mindiv
