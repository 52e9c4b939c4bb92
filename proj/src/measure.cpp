#include "mindiv/measure.hpp"

#include <boost/math/quadrature/gauss.hpp>
#include <charconv>
#include <cmath>
#include <fstream>
#include <istream>
#include <numeric>

#include "mindiv/errors.hpp"
#include "mindiv/family.hpp"

namespace mindiv {

Measure::Measure(std::vector<double> nodes, std::vector<double> weights)
    : nodes_(std::move(nodes)), weights_(std::move(weights)) {
    if (nodes_.empty()) throw InvalidInput("measure needs at least one node");
    if (nodes_.size() != weights_.size()) throw InvalidInput("nodes and weights differ in length");
    double total = 0.0;
    for (std::size_t i = 0; i < nodes_.size(); ++i) {
        if (!std::isfinite(nodes_[i])) throw InvalidInput("measure nodes must be finite");
        if (!(weights_[i] > 0.0) || !std::isfinite(weights_[i]))
            throw InvalidInput("measure weights must be positive");
        total += weights_[i];
    }
    if (std::abs(total - 1.0) > 1e-12) throw InvalidInput("measure weights must sum to one");
}

Measure empirical(const std::vector<double>& sample) {
    if (sample.empty()) throw InvalidInput("empty sample");
    for (double v : sample)
        if (!std::isfinite(v)) throw InvalidInput("sample contains a non-finite value");
    const double w = 1.0 / static_cast<double>(sample.size());
    return Measure(sample, std::vector<double>(sample.size(), w));
}

namespace {

// Gauss-Legendre panels on [a, b] with weights density(x) * dx, then normalized.
template <class Density, class Map>
Measure panel_rule(double a, double b, int panels, Density density, Map map) {
    using GL = boost::math::quadrature::gauss<double, 16>;
    const auto& abs = GL::abscissa();
    const auto& wts = GL::weights();
    std::vector<double> nodes, weights;
    nodes.reserve(16 * panels);
    weights.reserve(16 * panels);
    const double h = (b - a) / panels;
    for (int k = 0; k < panels; ++k) {
        const double mid = a + (k + 0.5) * h;
        const double half = 0.5 * h;
        // boost stores the nonnegative half of a symmetric rule
        for (std::size_t j = abs.size(); j-- > 0;) {
            if (abs[j] == 0.0) continue;
            const double u = mid - half * abs[j];
            nodes.push_back(map(u));
            weights.push_back(half * wts[j] * density(u));
        }
        if (abs[0] == 0.0) {
            nodes.push_back(map(mid));
            weights.push_back(half * wts[0] * density(mid));
        }
        for (std::size_t j = 0; j < abs.size(); ++j) {
            if (abs[j] == 0.0) continue;
            const double u = mid + half * abs[j];
            nodes.push_back(map(u));
            weights.push_back(half * wts[j] * density(u));
        }
    }
    // drop nodes whose weight underflowed so the measure stays strictly positive
    std::vector<double> n2, w2;
    for (std::size_t i = 0; i < nodes.size(); ++i)
        if (weights[i] > 0.0) {
            n2.push_back(nodes[i]);
            w2.push_back(weights[i]);
        }
    const double total = std::accumulate(w2.begin(), w2.end(), 0.0);
    for (double& w : w2) w /= total;
    return Measure(std::move(n2), std::move(w2));
}

}  // namespace

Measure quadrature_of(const Family& family, const Parameter& theta, int node_count) {
    if (node_count < 32) throw InvalidInput("quadrature needs at least 32 nodes");
    family.check(theta);
    const int panels = (node_count + 15) / 16;
    if (family.is_normal()) {
        const auto [mu, sigma] = family.mu_sigma(theta);
        const double c = 1.0 / (sigma * std::sqrt(2.0 * M_PI));
        return panel_rule(
            mu - 10.0 * sigma, mu + 10.0 * sigma, panels,
            [&](double x) {
                const double z = (x - mu) / sigma;
                return c * std::exp(-0.5 * z * z);
            },
            [](double x) { return x; });
    }
    const double th = theta[0];
    return panel_rule(
        0.0, 30.0 / th, panels, [&](double u) { return th * std::exp(-th * u); },
        [](double u) { return std::exp(u); });
}

Measure contaminate(const Measure& base, double x, double epsilon) {
    if (!(epsilon >= 0.0 && epsilon <= 1.0)) throw InvalidInput("epsilon must lie in [0, 1]");
    if (!std::isfinite(x)) throw InvalidInput("contamination point must be finite");
    if (epsilon == 0.0) return base;
    if (epsilon == 1.0) return Measure({x}, {1.0});
    std::vector<double> nodes = base.nodes();
    std::vector<double> weights = base.weights();
    for (double& w : weights) w *= (1.0 - epsilon);
    nodes.push_back(x);
    weights.push_back(epsilon);
    // rescaling can leave the total a few ulps away from one
    const double total = std::accumulate(weights.begin(), weights.end(), 0.0);
    if (std::abs(total - 1.0) > 1e-13)
        for (double& w : weights) w /= total;
    return Measure(std::move(nodes), std::move(weights));
}

double integrate(const Measure& q, const std::function<double(double)>& f) {
    const auto& x = q.nodes();
    const auto& w = q.weights();
    double sum = 0.0;
    for (std::size_t i = 0; i < x.size(); ++i) {
        const double v = f(x[i]);
        if (!std::isfinite(v)) throw IntegrationError("integrand is not finite at a node", x[i]);
        sum += w[i] * v;
    }
    return sum;
}

std::vector<double> read_sample(std::istream& in) {
    std::vector<double> out;
    std::string line;
    std::size_t lineno = 0;
    while (std::getline(in, line)) {
        ++lineno;
        if (!line.empty() && line.back() == '\r') line.pop_back();
        const auto first = line.find_first_not_of(" \t");
        if (first == std::string::npos) continue;
        if (line[first] == '#') continue;
        const auto last = line.find_last_not_of(" \t");
        const char* b = line.data() + first;
        const char* e = line.data() + last + 1;
        if (*b == '+') ++b;
        double v = 0.0;
        const auto res = std::from_chars(b, e, v);
        if (res.ec != std::errc() || res.ptr != e || !std::isfinite(v))
            throw ParseError("cannot parse a number on line " + std::to_string(lineno), lineno);
        out.push_back(v);
    }
    return out;
}

std::vector<double> read_sample(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw InvalidInput("cannot open sample file: " + path);
    return read_sample(in);
}

}  // namespace mindiv
