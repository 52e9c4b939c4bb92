#include "mindiv/simulation.hpp"

#include <atomic>
#include <cmath>
#include <cstdio>
#include <limits>
#include <json.hpp>
#include <sstream>
#include <thread>

#include "mindiv/errors.hpp"

namespace mindiv {

Contaminant contaminant_from_name(const std::string& name) {
    if (name == "normal3") return Contaminant::Normal3;
    if (name == "normal10") return Contaminant::Normal10;
    if (name == "logistic") return Contaminant::Logistic;
    if (name == "cauchy") return Contaminant::Cauchy;
    throw InvalidInput("unknown contaminant '" + name + "' (normal3, normal10, logistic, cauchy)");
}

std::string to_string(Contaminant c) {
    switch (c) {
        case Contaminant::Normal3: return "normal3";
        case Contaminant::Normal10: return "normal10";
        case Contaminant::Logistic: return "logistic";
        case Contaminant::Cauchy: return "cauchy";
    }
    return {};
}

void ContaminationModel::validate() const {
    if (!(base_sigma > 0.0) || !std::isfinite(base_sigma)) throw InvalidInput("base sigma must be positive");
    if (!(epsilon > 0.0 && epsilon < 0.5)) throw InvalidInput("epsilon must lie in (0, 0.5)");
}

namespace {

double open_uniform(std::mt19937_64& rng) {
    std::uniform_real_distribution<double> u(0.0, 1.0);
    double v;
    do v = u(rng);
    while (v == 0.0);
    return v;
}

}  // namespace

std::vector<double> sample_contaminated(const ContaminationModel& model, int n, std::mt19937_64& rng,
                                        std::vector<bool>* from_contaminant) {
    model.validate();
    if (n < 1) throw InvalidInput("sample size must be positive");
    const double s = model.base_sigma;
    std::uniform_real_distribution<double> coin(0.0, 1.0);
    std::normal_distribution<double> gauss(0.0, 1.0);
    std::vector<double> out(static_cast<std::size_t>(n));
    if (from_contaminant) from_contaminant->assign(out.size(), false);
    for (std::size_t i = 0; i < out.size(); ++i) {
        double& x = out[i];
        if (coin(rng) >= model.epsilon) {
            x = s * gauss(rng);
            continue;
        }
        if (from_contaminant) (*from_contaminant)[i] = true;
        switch (model.contaminant) {
            case Contaminant::Normal3: x = 3.0 * s * gauss(rng); break;
            case Contaminant::Normal10: x = 10.0 * s * gauss(rng); break;
            case Contaminant::Logistic: {
                const double u = open_uniform(rng);
                x = s * std::log(u / (1.0 - u));
                break;
            }
            case Contaminant::Cauchy: x = s * std::tan(M_PI * (open_uniform(rng) - 0.5)); break;
        }
    }
    return out;
}

std::mt19937_64 replication_rng(std::uint64_t seed, std::uint64_t rep) {
    std::seed_seq seq{static_cast<std::uint32_t>(seed), static_cast<std::uint32_t>(seed >> 32),
                      static_cast<std::uint32_t>(rep), static_cast<std::uint32_t>(rep >> 32)};
    return std::mt19937_64(seq);
}

namespace {

struct Outcome {
    bool ok = false;
    double estimate = 0.0;
};

// Fixed-shape pairwise sum, so the result depends only on the input order.
template <class F>
double pairwise(std::size_t lo, std::size_t hi, const F& term) {
    if (hi - lo <= 8) {
        double s = 0.0;
        for (std::size_t i = lo; i < hi; ++i) s += term(i);
        return s;
    }
    const std::size_t mid = lo + (hi - lo) / 2;
    return pairwise(lo, mid, term) + pairwise(mid, hi, term);
}

void finish(StudyRow& row) {
    if (row.successes > 0) {
        row.mse = row.sum_sq_error / row.successes;
        row.mean_estimate = row.sum_estimate / row.successes;
    } else {
        row.mse = std::numeric_limits<double>::quiet_NaN();
        row.mean_estimate = std::numeric_limits<double>::quiet_NaN();
    }
}

}  // namespace

StudyResult run_study(const ContaminationModel& model, int n, int reps, const std::vector<EstimatorSpec>& specs,
                      std::uint64_t seed, const StudyOptions& options) {
    model.validate();
    if (reps < 1) throw InvalidInput("reps must be at least 1");
    if (n < 1) throw InvalidInput("sample size must be positive");
    const Family fam(FamilyKind::NormalScale);
    for (const auto& s : specs) s.validate(fam);

    const std::size_t R = static_cast<std::size_t>(reps), S = specs.size();
    std::vector<Outcome> out(R * S);
    std::atomic<std::size_t> next{0};
    auto worker = [&] {
        for (std::size_t r = next++; r < R; r = next++) {
            auto rng = replication_rng(seed, options.first_rep + r);
            const Measure q = empirical(sample_contaminated(model, n, rng));
            for (std::size_t k = 0; k < S; ++k) {
                Outcome o;
                try {
                    const EstimateResult e = estimate(fam, specs[k], q);
                    o.ok = e.converged && std::isfinite(e.theta_hat[0]);
                    o.estimate = e.theta_hat[0];
                } catch (const std::exception&) {
                    o.ok = false;
                }
                out[r * S + k] = o;
            }
        }
    };
    unsigned nt = options.threads > 0 ? static_cast<unsigned>(options.threads) : std::thread::hardware_concurrency();
    nt = std::max(1u, std::min<unsigned>(nt, static_cast<unsigned>(R)));
    std::vector<std::thread> pool;
    for (unsigned t = 1; t < nt; ++t) pool.emplace_back(worker);
    worker();
    for (auto& t : pool) t.join();

    StudyResult res;
    res.replications = reps;
    res.seed = seed;
    for (std::size_t k = 0; k < S; ++k) {
        StudyRow row;
        row.estimator = to_string(specs[k].kind);
        row.alpha = specs[k].alpha;
        const double s0 = model.base_sigma;
        row.sum_sq_error = pairwise(0, R, [&](std::size_t r) {
            const Outcome& o = out[r * S + k];
            return o.ok ? (o.estimate - s0) * (o.estimate - s0) : 0.0;
        });
        row.sum_estimate = pairwise(0, R, [&](std::size_t r) {
            const Outcome& o = out[r * S + k];
            return o.ok ? o.estimate : 0.0;
        });
        for (std::size_t r = 0; r < R; ++r) row.successes += out[r * S + k].ok ? 1 : 0;
        row.failures = reps - row.successes;
        finish(row);
        res.rows.push_back(row);
    }
    return res;
}

StudyResult pool(const std::vector<StudyResult>& parts) {
    if (parts.empty()) throw InvalidInput("nothing to pool");
    StudyResult res;
    res.seed = parts.front().seed;
    res.rows = parts.front().rows;
    for (auto& row : res.rows) {
        row.sum_sq_error = row.sum_estimate = 0.0;
        row.successes = row.failures = 0;
    }
    for (const auto& p : parts) {
        if (p.rows.size() != res.rows.size()) throw InvalidInput("pooled studies differ in estimator lists");
        res.replications += p.replications;
        for (std::size_t k = 0; k < p.rows.size(); ++k) {
            res.rows[k].sum_sq_error += p.rows[k].sum_sq_error;
            res.rows[k].sum_estimate += p.rows[k].sum_estimate;
            res.rows[k].successes += p.rows[k].successes;
            res.rows[k].failures += p.rows[k].failures;
        }
    }
    for (auto& row : res.rows) finish(row);
    return res;
}

namespace {

std::string g17(double v) {
    char buf[64];
    std::snprintf(buf, sizeof buf, "%.17g", v);
    return buf;
}

}  // namespace

std::string report_csv(const StudyResult& r) {
    std::ostringstream os;
    os << "estimator,alpha,mse,mean_estimate,failures\n";
    for (const auto& row : r.rows)
        os << row.estimator << ',' << g17(row.alpha) << ',' << g17(row.mse) << ',' << g17(row.mean_estimate)
           << ',' << row.failures << '\n';
    return os.str();
}

std::string report_json(const StudyResult& r) {
    nlohmann::json j;
    j["replications"] = r.replications;
    j["seed"] = r.seed;
    j["rows"] = nlohmann::json::array();
    auto num = [](double v) { return std::isfinite(v) ? nlohmann::json(v) : nlohmann::json(nullptr); };
    for (const auto& row : r.rows)
        j["rows"].push_back({{"estimator", row.estimator},
                             {"alpha", row.alpha},
                             {"mse", num(row.mse)},
                             {"mean_estimate", num(row.mean_estimate)},
                             {"failures", row.failures}});
    return j.dump(2) + "\n";
}

StudyResult parse_report_json(const std::string& text) {
    const auto j = nlohmann::json::parse(text);
    StudyResult r;
    r.replications = j.at("replications").get<int>();
    r.seed = j.at("seed").get<std::uint64_t>();
    auto num = [](const nlohmann::json& v) {
        return v.is_null() ? std::numeric_limits<double>::quiet_NaN() : v.get<double>();
    };
    for (const auto& e : j.at("rows")) {
        StudyRow row;
        row.estimator = e.at("estimator").get<std::string>();
        row.alpha = e.at("alpha").get<double>();
        row.mse = num(e.at("mse"));
        row.mean_estimate = num(e.at("mean_estimate"));
        row.failures = e.at("failures").get<int>();
        row.successes = r.replications - row.failures;
        row.sum_sq_error = row.successes > 0 ? row.mse * row.successes : 0.0;
        row.sum_estimate = row.successes > 0 ? row.mean_estimate * row.successes : 0.0;
        r.rows.push_back(row);
    }
    return r;
}

}  // namespace mindiv
