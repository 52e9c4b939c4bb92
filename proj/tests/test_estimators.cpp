#include <doctest.h>

#include <boost/math/tools/roots.hpp>
#include <cmath>
#include <random>

#include "mindiv/divergence.hpp"
#include "mindiv/errors.hpp"
#include "mindiv/estimators.hpp"

using namespace mindiv;
using doctest::Approx;

namespace {

const std::vector<Family> kFamilies{Family(FamilyKind::NormalLocScale), Family(FamilyKind::NormalLocation),
                                    Family(FamilyKind::NormalScale), Family(FamilyKind::Pareto)};

Parameter truth(const Family& f) {
    switch (f.kind()) {
        case FamilyKind::NormalLocScale: return param(0.5, 1.5);
        case FamilyKind::NormalLocation: return param(0.7);
        case FamilyKind::NormalScale: return param(1.3);
        case FamilyKind::Pareto: return param(2.5);
    }
    return {};
}

Parameter off_escort(const Family& f) {
    switch (f.kind()) {
        case FamilyKind::NormalLocScale: return param(0.8, 1.2);
        case FamilyKind::NormalLocation: return param(0.2);
        case FamilyKind::NormalScale: return param(1.6);
        case FamilyKind::Pareto: return param(2.0);
    }
    return {};
}

std::vector<double> normal_sample(int n, double mu, double sigma, unsigned seed) {
    std::mt19937_64 rng(seed);
    std::normal_distribution<double> d(mu, sigma);
    std::vector<double> x(n);
    for (auto& v : x) v = d(rng);
    return x;
}

double max_abs_diff(const Vec& a, const Vec& b) { return (a - b).lpNorm<Eigen::Infinity>(); }

}  // namespace

TEST_CASE("mle examples") {
    const Family n(FamilyKind::NormalLocScale);
    const auto r = mle(n, empirical({-1.0, 1.0}));
    CHECK(r.theta_hat[0] == Approx(0.0));
    CHECK(r.theta_hat[1] == Approx(1.0));
    const Family p(FamilyKind::Pareto);
    CHECK(mle(p, empirical({std::exp(1.0), std::exp(1.0)})).theta_hat[0] == Approx(1.0));
    CHECK_THROWS_AS(mle(p, empirical({1.0, 1.0, 1.0})), InvalidInput);
    CHECK_THROWS_AS(mle(p, empirical({0.5, 2.0})), DomainError);
    CHECK_THROWS_AS(mle(n, empirical({2.0, 2.0})), InvalidInput);
    // NormalScale has mean zero, so the fit is the root mean square
    CHECK(mle(Family(FamilyKind::NormalScale), empirical({3.0, -1.0})).theta_hat[0] == Approx(std::sqrt(5.0)));
    for (const auto& f : kFamilies) {
        const Parameter t = truth(f);
        CHECK(max_abs_diff(mle(f, quadrature_of(f, t, 512)).theta_hat, t) < 1e-8);
    }
}

TEST_CASE("spec validation") {
    const Family f(FamilyKind::NormalLocScale);
    CHECK_THROWS_AS(EstimatorSpec::superdivergence(1.0).validate(f), InvalidInput);
    CHECK_THROWS_AS(EstimatorSpec::superdivergence(1.5).validate(f), InvalidInput);
    CHECK_THROWS_AS(EstimatorSpec::power_pseudo(-0.1).validate(f), InvalidInput);
    CHECK_THROWS_AS(EstimatorSpec::subdivergence(0.5, param(1.0)).validate(f), InvalidInput);
    CHECK_THROWS_AS(EstimatorSpec::subdivergence(0.5, param(0.0, -1.0)).validate(f), InvalidInput);
    EstimatorSpec s = EstimatorSpec::subdivergence(0.5, param(0.0, 1.0));
    s.escort.reset();
    CHECK_THROWS_AS(s.validate(f), InvalidInput);
    EstimatorSpec b = EstimatorSpec::power_pseudo(0.5);
    b.bounds = Bounds{param(-1.0, 0.0), param(1.0, 2.0)};
    CHECK_THROWS_AS(b.validate(f), InvalidInput);
    CHECK(estimator_kind_from_name("renyi") == EstimatorKind::Renyi);
    CHECK_THROWS_AS(estimator_kind_from_name("huber"), InvalidInput);
    for (auto k : {EstimatorKind::MLE, EstimatorKind::Subdivergence, EstimatorKind::Superdivergence,
                   EstimatorKind::PowerPseudo, EstimatorKind::Renyi})
        CHECK(estimator_kind_from_name(to_string(k)) == k);
}

TEST_CASE("alpha = 0 reduces every kind to the mle") {
    const auto x = normal_sample(40, 1.0, 2.0, 11);
    const Measure q = empirical(x);
    const Family f(FamilyKind::NormalLocScale);
    const auto m = mle(f, q);
    for (const auto& spec : {EstimatorSpec::subdivergence(0.0, param(3.0, 1.0)), EstimatorSpec::superdivergence(0.0),
                             EstimatorSpec::power_pseudo(0.0), EstimatorSpec::renyi(0.0)}) {
        const auto r = estimate(f, spec, q);
        CHECK(r.theta_hat == m.theta_hat);
        CHECK(r.criterion_value == m.criterion_value);
    }
}

TEST_CASE("Fisher consistency") {
    for (const auto& f : kFamilies) {
        const Parameter t = truth(f);
        const Measure q = quadrature_of(f, t, 512);
        for (double a : {0.25, 0.5, 0.75}) {
            CAPTURE(f.name());
            CAPTURE(a);
            const auto s = estimate(f, EstimatorSpec::subdivergence(a, off_escort(f)), q);
            CHECK(s.converged);
            CHECK(max_abs_diff(s.theta_hat, t) < 1e-6);
            const auto sp = estimate(f, EstimatorSpec::superdivergence(a), q);
            CHECK(sp.converged);
            CHECK(max_abs_diff(sp.theta_hat, t) < 1e-5);
            REQUIRE(sp.inner_solution);
            CHECK(max_abs_diff(*sp.inner_solution, t) < 1e-5);
        }
        for (double a : {0.25, 0.5, 1.0, 2.0}) {
            CAPTURE(f.name());
            CAPTURE(a);
            const auto p = estimate(f, EstimatorSpec::power_pseudo(a), q);
            CHECK(p.converged);
            CHECK(max_abs_diff(p.theta_hat, t) < 1e-6);
            const auto r = estimate(f, EstimatorSpec::renyi(a), q);
            CHECK(r.converged);
            CHECK(max_abs_diff(r.theta_hat, t) < 1e-6);
        }
    }
}

TEST_CASE("sub criterion: location and scale forms") {
    const auto x = normal_sample(25, 0.3, 1.4, 5);
    const Measure q = empirical(x);
    const Family loc(FamilyKind::NormalLocation);
    for (double a : {0.2, 0.5, 0.8})
        for (double mu : {-1.0, 0.0, 0.6})
            for (double mt : {-0.5, 0.1, 1.2}) {
                const auto eta = [&](double y) { return std::exp(a * (mt - mu) * (mt + mu - 2 * y) / 2); };
                double qe = 0.0, qd = 0.0;
                for (double y : x) {
                    qe += eta(y) / x.size();
                    qd += (mt - y) * eta(y) / x.size();
                }
                const double m = std::pow(eta(mu), a - 1.0) / (1.0 - a) + qe / a;
                CHECK(sub_criterion(loc, param(mu), param(mt), q, a) == Approx(m).epsilon(1e-10));
                const double psi = qd - a * (mt - mu) * std::pow(eta(mu), a - 1.0);
                CHECK(std::abs(sub_psi(loc, param(mu), param(mt), q, a)[0] - psi) < 1e-10 * std::max(1.0, std::abs(psi)));
            }

    const Family sc(FamilyKind::NormalScale);
    for (double a : {0.2, 0.5, 0.8})
        for (double sg : {0.7, 1.0, 2.0})
            for (double st : {0.5, 1.3, 2.5}) {
                const double s = st / sg;
                double acc = 0.0;
                for (double y : x) acc += std::pow(s, a) / a * std::exp(a * y * y * (1 / (s * s) - 1) / (2 * sg * sg));
                const double m = std::pow(s, a) / ((1 - a) * std::sqrt(a * s * s + 1 - a)) + acc / x.size();
                CHECK(sub_criterion(sc, param(sg), param(st), q, a) == Approx(m).epsilon(1e-10));
            }
}

TEST_CASE("sub criterion at the truth") {
    for (const auto& f : kFamilies) {
        const Parameter t = truth(f);
        const Measure q = quadrature_of(f, t, 512);
        for (double a : {0.25, 0.5, 0.75}) {
            CHECK(sub_criterion(f, t, t, q, a) == Approx(1.0 / (1 - a) + 1.0 / a).epsilon(1e-10));
            // Q = P_tt makes psi vanish for any theta
            CHECK(sub_psi(f, off_escort(f), t, q, a).norm() < 1e-8);
        }
    }
}

TEST_CASE("sub psi is the gradient of the criterion") {
    const auto x = normal_sample(30, -0.2, 1.1, 9);
    const Measure q = empirical(x);
    std::vector<double> px;
    for (double v : x) px.push_back(1.0 + std::abs(v));
    const Measure qp = empirical(px);
    for (const auto& f : kFamilies) {
        const Measure& m = f.kind() == FamilyKind::Pareto ? qp : q;
        const Parameter th = truth(f), tt = off_escort(f);
        for (double a : {0.3, 0.6, 1.0}) {
            const Vec g = sub_psi(f, th, tt, m, a);
            for (int j = 0; j < f.param_dim(); ++j) {
                const double h = 1e-5;
                Parameter tp = tt, tm = tt;
                tp[j] += h;
                tm[j] -= h;
                const double fd = (sub_criterion(f, th, tp, m, a) - sub_criterion(f, th, tm, m, a)) / (2 * h);
                CHECK(std::abs(g[j] - fd) <= 1e-6 * std::max(1.0, std::abs(fd)));
            }
        }
    }
}

TEST_CASE("subdivergence lower bound") {
    const Family f(FamilyKind::NormalLocScale);
    const Parameter t0 = param(0.0, 1.0), th = param(0.5, 1.3);
    const Measure q = quadrature_of(f, t0, 512);
    for (double a : {0.25, 0.5, 0.75}) {
        const double d = power_divergence(f, th, t0, a, q);
        for (double m : {-0.5, 0.0, 0.4})
            for (double s : {0.8, 1.0, 1.5}) {
                const double lb = subdivergence_value(f, th, param(m, s), q, a);
                CHECK(lb <= d + 1e-8);
                if (m == 0.0 && s == 1.0) {
                    CHECK(lb == Approx(d).epsilon(1e-8));
                } else {
                    CHECK(lb < d - 1e-6);
                }
            }
    }
}

TEST_CASE("pseudo at alpha = 1 is the L2 estimator") {
    const Family f(FamilyKind::NormalScale);
    const auto x = normal_sample(40, 0.0, 1.7, 21);
    const Measure q = empirical(x);
    // L2 criterion with the density integral done by quadrature
    const auto l2 = [&](double s) {
        const Measure w = quadrature_of(f, param(s), 512);
        const double sq = integrate(w, [&](double y) { return f.density(param(s), y); });
        double emp = 0.0;
        for (double y : x) emp += f.density(param(s), y) / x.size();
        return sq - 2.0 * emp;
    };
    const auto l2_grad = [&](double s) {
        const double h = 1e-5 * s;
        return (l2(s + h) - l2(s - h)) / (2 * h);
    };
    SolverOptions opt;
    opt.tol = 1e-9;
    const Solution ref = solve_1d(l2, 0.1, 10.0, opt, l2_grad);
    const auto r = estimate(f, EstimatorSpec::power_pseudo(1.0), q);
    CHECK(std::abs(r.theta_hat[0] - ref.x[0]) < 1e-6);
}

TEST_CASE("pseudo is continuous at alpha = 0") {
    const Family f(FamilyKind::NormalLocScale);
    const Measure q = empirical(normal_sample(50, 2.0, 0.8, 3));
    const auto r0 = estimate(f, EstimatorSpec::power_pseudo(0.0), q);
    const auto r1 = estimate(f, EstimatorSpec::power_pseudo(1e-3), q);
    CHECK(max_abs_diff(r0.theta_hat, r1.theta_hat) < 1e-3);
    const auto s1 = estimate(f, EstimatorSpec::renyi(1e-3), q);
    CHECK(max_abs_diff(r0.theta_hat, s1.theta_hat) < 1e-3);
}

TEST_CASE("renyi and pseudo") {
    // location only: the normalizer does not depend on mu so the two coincide
    const Family loc(FamilyKind::NormalLocation);
    auto x = normal_sample(30, 0.0, 1.0, 17);
    x.push_back(8.0);
    const Measure q = empirical(x);
    for (double a : {0.25, 0.5, 1.0}) {
        const auto p = estimate(loc, EstimatorSpec::power_pseudo(a), q);
        const auto r = estimate(loc, EstimatorSpec::renyi(a), q);
        CHECK(std::abs(p.theta_hat[0] - r.theta_hat[0]) < 1e-8);
    }
    // one observation with a X^2 = 2 separates them for scale
    const Family sc(FamilyKind::NormalScale);
    const Measure one = empirical({2.0});
    const auto p = estimate(sc, EstimatorSpec::power_pseudo(0.5), one);
    const auto r = estimate(sc, EstimatorSpec::renyi(0.5), one);
    CHECK(p.converged);
    CHECK(r.converged);
    CHECK(std::abs(p.theta_hat[0] - r.theta_hat[0]) > 1e-3);
    // Renyi stationarity for one point reduces to sigma^2 = (1 + a) X^2
    CHECK(r.theta_hat[0] == Approx(std::sqrt(1.5) * 2.0).epsilon(1e-8));
}

TEST_CASE("criterion values") {
    const Family f(FamilyKind::NormalLocScale);
    const Measure q = empirical(normal_sample(20, 0.0, 1.0, 8));
    const Parameter th = param(0.1, 0.9);
    const double a = 0.5;
    double qp = 0.0;
    for (std::size_t i = 0; i < q.size(); ++i) qp += q.weights()[i] * std::pow(f.density(th, q.nodes()[i]), a);
    const double m = f.power_mass_integral(th, a);
    CHECK(pseudo_criterion(f, th, q, a) == Approx(m / (1 + a) - qp / a).epsilon(1e-12));
    CHECK(renyi_criterion(f, th, q, a) == Approx(qp / f.renyi_normalizer(th, a)).epsilon(1e-12));
    const auto r = estimate(f, EstimatorSpec::power_pseudo(a), q);
    CHECK(r.criterion_value == Approx(pseudo_criterion(f, r.theta_hat, q, a)).epsilon(1e-12));
    const auto s = estimate(f, EstimatorSpec::renyi(a), q);
    CHECK(s.criterion_value == Approx(renyi_criterion(f, s.theta_hat, q, a)).epsilon(1e-12));
    CHECK(pseudo_psi(f, r.theta_hat, q, a).norm() < 1e-8);
    CHECK(renyi_psi(f, s.theta_hat, q, a).norm() < 1e-8);
}

TEST_CASE("equivariance under affine maps") {
    const Family f(FamilyKind::NormalLocScale);
    auto x = normal_sample(60, 0.5, 1.2, 31);
    x[3] = 9.0;
    const double A = -2.5, B = 3.0;
    std::vector<double> y;
    for (double v : x) y.push_back(A * v + B);
    for (const auto& spec : {EstimatorSpec::power_pseudo(0.5), EstimatorSpec::renyi(0.5), EstimatorSpec::renyi(1.0)}) {
        const auto r = estimate(f, spec, empirical(x));
        const auto s = estimate(f, spec, empirical(y));
        CHECK(std::abs(s.theta_hat[0] - (A * r.theta_hat[0] + B)) < 10 * spec.tol * std::abs(A));
        CHECK(std::abs(s.theta_hat[1] - std::abs(A) * r.theta_hat[1]) < 10 * spec.tol * std::abs(A));
    }
}

TEST_CASE("determinism") {
    const Family f(FamilyKind::NormalLocScale);
    const Measure q = empirical(normal_sample(40, 0.0, 1.0, 2));
    for (const auto& spec : {EstimatorSpec::power_pseudo(0.5), EstimatorSpec::renyi(0.5),
                             EstimatorSpec::subdivergence(0.5, param(0.2, 1.1)), EstimatorSpec::superdivergence(0.5)}) {
        const auto a = estimate(f, spec, q);
        const auto b = estimate(f, spec, q);
        CHECK(a.theta_hat == b.theta_hat);
        CHECK(a.criterion_value == b.criterion_value);
        CHECK(a.iterations == b.iterations);
        CHECK(a.converged == b.converged);
    }
}

TEST_CASE("superdivergence certificate on a sample") {
    const Measure q = empirical(normal_sample(40, 0.0, 1.3, 44));
    for (const auto& f : {Family(FamilyKind::NormalScale), Family(FamilyKind::NormalLocScale)}) {
        const auto r = estimate(f, EstimatorSpec::superdivergence(0.5), q);
        REQUIRE(r.inner_solution);
        CHECK(r.converged);
        CHECK(super_psi(f, r.theta_hat, *r.inner_solution, q, 0.5).norm() < 1e-8);
        // the inner solution is a root of the inner equation
        CHECK(sub_psi(f, r.theta_hat, *r.inner_solution, q, 0.5).norm() < 1e-8);
    }
}

TEST_CASE("subdivergence location loses consistency off unit variance") {
    const Family loc(FamilyKind::NormalLocation);
    const Family ls(FamilyKind::NormalLocScale);
    const double a = 0.5, mu = 1.0;
    for (double sigma : {1.0, 2.0}) {
        const Measure q = quadrature_of(ls, param(0.0, sigma), 512);
        const auto r = estimate(loc, EstimatorSpec::subdivergence(a, param(mu)), q);
        CHECK(r.converged);
        // closed Gaussian integrals turn the fixed-point equation into a scalar root
        const auto g = [&](double mt) {
            const double k = a * (mt - mu);
            const double lhs = std::exp(a * (mt * mt - mu * mu) / 2 + k * k * sigma * sigma / 2) * (mt + k * sigma * sigma);
            return lhs - a * (mt - mu) * std::exp(a * (a - 1) * (mt - mu) * (mt - mu) / 2);
        };
        boost::math::tools::eps_tolerance<double> tol(50);
        std::uintmax_t it = 200;
        const auto root = boost::math::tools::bisect(g, -3.0, 0.9, tol, it);
        const double ref = 0.5 * (root.first + root.second);
        CHECK(r.theta_hat[0] == Approx(ref).epsilon(1e-6));
        if (sigma == 1.0) {
            CHECK(std::abs(r.theta_hat[0]) < 1e-6);
        } else {
            CHECK(std::abs(r.theta_hat[0]) > 0.01);
        }
    }
}

TEST_CASE("default bounds") {
    const Family f(FamilyKind::NormalLocScale);
    const Measure q = empirical({0.0, 1.0, 2.0, 3.0, 4.0});
    const Bounds b = default_bounds(f, q);
    CHECK(b.lower[0] < 0.0);
    CHECK(b.upper[0] > 4.0);
    CHECK(b.lower[1] > 0.0);
    CHECK(b.upper[1] == Approx(10.0 * std::sqrt(2.0)));
    const Bounds p = default_bounds(Family(FamilyKind::Pareto), empirical({std::exp(1.0), std::exp(1.0)}));
    CHECK(p.lower[0] == Approx(0.01));
    CHECK(p.upper[0] == Approx(100.0));
}
