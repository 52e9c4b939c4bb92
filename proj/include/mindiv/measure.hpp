#pragma once

#include <functional>
#include <iosfwd>
#include <string>
#include <vector>

#include "mindiv/types.hpp"

namespace mindiv {

class Family;

/// Finitely supported probability measure: positive weights summing to one.
class Measure {
public:
    Measure(std::vector<double> nodes, std::vector<double> weights);

    const std::vector<double>& nodes() const noexcept { return nodes_; }
    const std::vector<double>& weights() const noexcept { return weights_; }
    std::size_t size() const noexcept { return nodes_.size(); }

private:
    std::vector<double> nodes_;
    std::vector<double> weights_;
};

Measure empirical(const std::vector<double>& sample);

/// Discretizes P_theta. Normal kinds use 16-point Gauss-Legendre panels over
/// mu +- 10 sigma; Pareto integrates in u = ln x over [0, 30/theta].
/// node_count is rounded up to a multiple of 16.
Measure quadrature_of(const Family& family, const Parameter& theta, int node_count = 512);

/// (1 - eps) * base + eps * delta_x
Measure contaminate(const Measure& base, double x, double epsilon);

/// Sum of w_i f(x_i). Throws IntegrationError on a non-finite term.
double integrate(const Measure& q, const std::function<double(double)>& f);

std::vector<double> read_sample(std::istream& in);
std::vector<double> read_sample(const std::string& path);

}  // namespace mindiv
