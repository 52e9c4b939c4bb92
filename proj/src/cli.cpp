#include "mindiv/cli.hpp"

#include <CLI11.hpp>
#include <chrono>
#include <cmath>
#include <json.hpp>
#include <ostream>
#include <sstream>

#include "mindiv/errors.hpp"
#include "mindiv/estimators.hpp"
#include "mindiv/influence.hpp"
#include "mindiv/simulation.hpp"

namespace mindiv {

namespace {

struct UsageError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

std::vector<double> parse_list(const std::string& text, const std::string& flag) {
    std::vector<double> out;
    std::stringstream ss(text);
    std::string item;
    while (std::getline(ss, item, ',')) {
        try {
            std::size_t used = 0;
            const double v = std::stod(item, &used);
            if (used != item.size() || !std::isfinite(v)) throw std::invalid_argument(item);
            out.push_back(v);
        } catch (const std::exception&) {
            throw UsageError(flag + ": cannot parse '" + item + "' as a number");
        }
    }
    if (out.empty()) throw UsageError(flag + ": empty list");
    return out;
}

Parameter to_param(const std::vector<double>& v) {
    Parameter p(static_cast<Eigen::Index>(v.size()));
    for (std::size_t i = 0; i < v.size(); ++i) p[static_cast<Eigen::Index>(i)] = v[i];
    return p;
}

std::vector<double> parse_grid(const std::string& text) {
    std::vector<std::string> parts;
    std::stringstream ss(text);
    std::string item;
    while (std::getline(ss, item, ':')) parts.push_back(item);
    if (parts.size() != 3) throw UsageError("--grid must be min:max:count");
    double lo, hi;
    long count;
    try {
        std::size_t u1 = 0, u2 = 0, u3 = 0;
        lo = std::stod(parts[0], &u1);
        hi = std::stod(parts[1], &u2);
        count = std::stol(parts[2], &u3);
        if (u1 != parts[0].size() || u2 != parts[1].size() || u3 != parts[2].size())
            throw std::invalid_argument(text);
    } catch (const std::exception&) {
        throw UsageError("--grid must be min:max:count, got '" + text + "'");
    }
    if (!(lo < hi) || count < 2 || !std::isfinite(lo) || !std::isfinite(hi))
        throw UsageError("--grid needs min < max and count >= 2");
    std::vector<double> g(static_cast<std::size_t>(count));
    for (long i = 0; i < count; ++i) g[i] = lo + (hi - lo) * static_cast<double>(i) / (count - 1);
    g.back() = hi;
    return g;
}

EstimatorSpec make_spec(const std::string& estimator, double alpha, const std::string& escort,
                        const Family& family) {
    EstimatorSpec spec;
    spec.kind = estimator_kind_from_name(estimator);
    spec.alpha = alpha;
    if (spec.kind == EstimatorKind::Subdivergence) {
        if (escort.empty()) throw UsageError("--escort is required for the subdivergence estimator");
        spec.escort = to_param(parse_list(escort, "--escort"));
    }
    spec.validate(family);
    return spec;
}

int cmd_estimate(const std::string& family_name, const std::string& estimator, double alpha,
                 const std::string& escort, const std::string& data, std::ostream& out) {
    const Family family = Family::from_name(family_name);
    const EstimatorSpec spec = make_spec(estimator, alpha, escort, family);
    const Measure q = empirical(read_sample(data));
    const EstimateResult r = estimate(family, spec, q);
    nlohmann::json j;
    j["theta_hat"] = std::vector<double>(r.theta_hat.data(), r.theta_hat.data() + r.theta_hat.size());
    j["criterion_value"] = r.criterion_value;
    j["iterations"] = r.iterations;
    j["converged"] = r.converged;
    if (r.inner_solution)
        j["inner_solution"] =
            std::vector<double>(r.inner_solution->data(), r.inner_solution->data() + r.inner_solution->size());
    out << j.dump() << "\n";
    return r.converged ? 0 : 2;
}

int cmd_influence(const std::string& family_name, const std::string& estimator, double alpha,
                  const std::string& theta_text, const std::string& escort, const std::string& grid_text,
                  bool numeric, double eps, std::ostream& out) {
    const Family family = Family::from_name(family_name);
    const EstimatorSpec spec = make_spec(estimator, alpha, escort, family);
    const Parameter theta = to_param(parse_list(theta_text, "--theta"));
    family.check(theta);
    InfluenceCurve curve;
    curve.estimator = spec;
    curve.eval_param = theta;
    curve.grid = parse_grid(grid_text);
    for (double x : curve.grid)
        if (!family.in_support(x)) throw UsageError("--grid leaves the support of " + family.name());

    if (numeric) {
        const Measure q = quadrature_of(family, theta, 512);
        const EstimateResult base = estimate(family, spec, q);
        if (!base.converged) throw EstimationError("estimation did not converge at the model quadrature");
        for (double x : curve.grid) curve.values.push_back(if_numeric(family, spec, q, base.theta_hat, x, eps));
    } else {
        const Measure q = quadrature_of(family, theta, 512);
        auto mle_if = [&](double x) {
            return if_general([&](const Parameter& t, double y) { return family.score(t, y); },
                              [&](const Parameter& t, double y) { return family.score_deriv(t, y); }, q, theta, x);
        };
        for (double x : curve.grid) {
            Vec v;
            const bool zero = spec.alpha == 0.0;
            switch (spec.kind) {
                case EstimatorKind::MLE:
                case EstimatorKind::Superdivergence: v = mle_if(x); break;
                case EstimatorKind::Subdivergence:
                    v = zero ? mle_if(x) : if_sub(family, spec.alpha, *spec.escort, theta, x);
                    break;
                case EstimatorKind::PowerPseudo: v = if_pseudo(family, spec.alpha, theta, x); break;
                case EstimatorKind::Renyi: v = if_renyi(family, spec.alpha, theta, x); break;
            }
            curve.values.push_back(v);
        }
    }
    write_csv(out, curve);
    return 0;
}

int cmd_simulate(double epsilon, const std::string& contaminant, int n, int reps, const std::string& seed_text,
                 const std::string& alphas_text, double sigma, const std::string& format, int threads,
                 std::ostream& out, std::ostream& err) {
    if (!(epsilon > 0.0 && epsilon < 0.5))
        throw UsageError("--epsilon must lie in (0, 0.5), the contamination range of the model");
    if (n < 1 || reps < 1) throw UsageError("--n and --reps must be positive");
    if (format != "csv" && format != "json") throw UsageError("--format must be csv or json");
    ContaminationModel model;
    model.base_sigma = sigma;
    model.epsilon = epsilon;
    model.contaminant = contaminant_from_name(contaminant);
    std::uint64_t seed;
    if (seed_text.empty()) {
        seed = static_cast<std::uint64_t>(std::chrono::system_clock::now().time_since_epoch().count());
        err << "seed: " << seed << "\n";
    } else {
        try {
            std::size_t used = 0;
            seed = std::stoull(seed_text, &used);
            if (used != seed_text.size()) throw std::invalid_argument(seed_text);
        } catch (const std::exception&) {
            throw UsageError("--seed must be a nonnegative 64-bit integer");
        }
    }
    std::vector<EstimatorSpec> specs{EstimatorSpec::mle()};
    for (double a : parse_list(alphas_text, "--alphas")) {
        if (a < 0.0) throw UsageError("--alphas must be nonnegative");
        specs.push_back(EstimatorSpec::power_pseudo(a));
        specs.push_back(EstimatorSpec::renyi(a));
    }
    StudyOptions opt;
    opt.threads = threads;
    const StudyResult r = run_study(model, n, reps, specs, seed, opt);
    out << (format == "json" ? report_json(r) : report_csv(r));
    return 0;
}

}  // namespace

int run_cli(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
    CLI::App app{"Minimum-divergence estimation toolkit"};
    app.require_subcommand(1);

    std::string family, estimator, escort, data, theta, grid = "-5:5:101", contaminant, seed, alphas = "0.25,0.5,1";
    std::string format = "csv";
    double alpha = 0.0, eps = 1e-3, epsilon = 0.0, sigma = 1.0;
    bool numeric = false;
    int n = 100, reps = 1000, threads = 0;

    auto* est = app.add_subcommand("estimate", "Fit an estimator to a sample file");
    est->add_option("--family", family, "normal | normal-loc | normal-scale | pareto")->required();
    est->add_option("--estimator", estimator, "mle | subdivergence | superdivergence | pseudo | renyi")->required();
    est->add_option("--alpha", alpha, "power index");
    est->add_option("--escort", escort, "escort parameter, comma separated");
    est->add_option("--data", data, "sample file, one value per line")->required();

    auto* inf = app.add_subcommand("influence", "Print an influence curve as CSV");
    inf->add_option("--family", family)->required();
    inf->add_option("--estimator", estimator)->required();
    inf->add_option("--alpha", alpha);
    inf->add_option("--theta", theta, "parameter of the model, comma separated")->required();
    inf->add_option("--escort", escort);
    inf->add_option("--grid", grid, "min:max:count");
    inf->add_flag("--numeric", numeric, "use the finite-difference Gateaux derivative");
    inf->add_option("--eps", eps, "largest contamination step for --numeric");

    auto* sim = app.add_subcommand("simulate", "Contaminated normal scale study");
    sim->add_option("--epsilon", epsilon, "contamination fraction in (0, 0.5)")->required();
    sim->add_option("--contaminant", contaminant, "normal3 | normal10 | logistic | cauchy")->required();
    sim->add_option("--n", n, "sample size");
    sim->add_option("--reps", reps, "replications");
    sim->add_option("--seed", seed, "64-bit seed");
    sim->add_option("--alphas", alphas, "comma separated power indices");
    sim->add_option("--sigma", sigma, "base scale");
    sim->add_option("--format", format, "csv | json");
    sim->add_option("--threads", threads, "worker threads, 0 for all cores");

    std::vector<std::string> argv_store{"mindiv"};
    argv_store.insert(argv_store.end(), args.begin(), args.end());
    std::vector<const char*> argv;
    for (const auto& s : argv_store) argv.push_back(s.c_str());

    try {
        app.parse(static_cast<int>(argv.size()), argv.data());
    } catch (const CLI::CallForHelp&) {
        out << app.help();
        return 0;
    } catch (const CLI::ParseError& e) {
        err << "usage error: " << e.what() << "\n";
        return 1;
    }

    try {
        if (est->parsed()) return cmd_estimate(family, estimator, alpha, escort, data, out);
        if (inf->parsed()) return cmd_influence(family, estimator, alpha, theta, escort, grid, numeric, eps, out);
        if (sim->parsed())
            return cmd_simulate(epsilon, contaminant, n, reps, seed, alphas, sigma, format, threads, out, err);
    } catch (const UsageError& e) {
        err << "usage error: " << e.what() << "\n";
        return 1;
    } catch (const ParseError& e) {
        err << "error: " << e.what() << "\n";
        return 1;
    } catch (const std::exception& e) {
        err << "error: " << e.what() << "\n";
        return 1;
    }
    return 1;
}

}  // namespace mindiv
