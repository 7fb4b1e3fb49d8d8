#include "sparselab/bounds.hpp"

#include <cmath>
#include <limits>
#include <sstream>
#include <stdexcept>

#include "sparselab/io.hpp"

namespace sparselab {

RnspConstants rnsp_from_ric(double delta) {
    if (!(delta > 0.0 && delta < 1.0))
        throw std::invalid_argument("rnsp_from_ric: delta must lie in (0, 1)");
    const double denom = std::sqrt(1.0 - delta * delta) - 0.25 * delta;
    if (!(denom > 0.0))
        throw std::invalid_argument("rnsp_from_ric: sqrt(1 - delta^2) - delta/4 must be positive");
    RnspConstants c;
    c.delta = delta;
    c.rho = delta / denom;
    c.beta = std::sqrt(1.0 + delta) / denom;
    return c;
}

double theta(double mu, double lambda, int k) {
    if (lambda <= 0.0) throw std::invalid_argument("theta: lambda must be > 0");
    if (k < 1) throw std::invalid_argument("theta: k must be >= 1");
    if (mu < 0.0) throw std::invalid_argument("theta: mu must be >= 0");
    return 2.0 * mu / (lambda * std::sqrt(static_cast<double>(k)));
}

double residual_upper(double beta, double theta, int k) {
    return (beta + theta) * std::sqrt(static_cast<double>(k));
}

double residual_lower(long long s_lambda, double delta) {
    if (s_lambda < 0) throw std::invalid_argument("residual_lower: s_lambda must be >= 0");
    if (delta < 0.0) throw std::invalid_argument("residual_lower: delta must be >= 0");
    return std::sqrt(static_cast<double>(s_lambda) / (1.0 + delta));
}

SparsityBound sparsity_bound(double delta, double beta, double theta, int k) {
    SparsityBound b;
    const double bt = beta + theta;
    b.t = static_cast<long long>(std::floor((1.0 + delta) * bt * bt * k)) + 1;
    b.chi = std::sqrt(1.0 + delta) * bt;
    return b;
}

L2Bounds l2_bounds(double delta, double delta_prime, double beta_prime, int k,
                   long long s_lambda, double lambda, double mu) {
    if (delta < 0.0 || delta_prime < 0.0 || delta_prime >= 1.0)
        throw std::invalid_argument("l2_bounds: need delta >= 0 and 0 <= delta_prime < 1");
    L2Bounds b;
    const double sk = std::sqrt(static_cast<double>(k));
    const double ss = std::sqrt(static_cast<double>(s_lambda));
    b.lower = (ss * lambda / std::sqrt(1.0 + delta) - mu) / std::sqrt(1.0 + delta);
    b.upper = (beta_prime * sk * lambda + 3.0 * mu) / std::sqrt(1.0 - delta_prime);
    return b;
}

L1Bounds l1_bounds(double delta, double beta, double theta, int k,
                   double lambda, double mu) {
    if (delta < 0.0 || delta >= 1.0)
        throw std::invalid_argument("l1_bounds: delta must lie in [0, 1)");
    if (lambda <= 0.0) throw std::invalid_argument("l1_bounds: lambda must be > 0");
    (void)theta; // enters only through mu = theta * lambda * sqrt(k) / 2
    L1Bounds b;
    const double ratio = std::sqrt((1.0 + delta) / (1.0 - delta));
    const double sk = std::sqrt(static_cast<double>(k));
    const double inner = (beta + 0.5) * sk * lambda + 2.0 * mu;
    b.general = ratio * inner * inner / lambda;
    b.improved = ratio * ((beta + 0.25) * (beta + 0.25) * k * lambda +
                          (4.0 * beta + 1.0) * sk * mu);
    return b;
}

RnspRouteBound l1_bound_rnsp_route(double rho, double beta, double theta, int k,
                                   double lambda, double residual_norm, double mu) {
    if (!(rho >= 0.0 && rho < 1.0))
        throw std::invalid_argument("l1_bound_rnsp_route: rho must lie in [0, 1)");
    if (lambda <= 0.0) throw std::invalid_argument("l1_bound_rnsp_route: lambda must be > 0");
    (void)mu;
    RnspRouteBound b;
    const double sk = std::sqrt(static_cast<double>(k));
    const double bt = beta + theta;
    b.from_residual = (residual_norm * (2.0 * bt * sk - (1.0 + rho) * residual_norm / lambda) +
                       beta * theta * k * lambda) / (1.0 - rho);
    const double b2t = beta + 2.0 * theta;
    b.maximized = b2t * b2t * k * lambda / (1.0 - rho * rho);
    return b;
}

double entropy(const Eigen::VectorXd& x) {
    const double n2 = x.squaredNorm();
    if (n2 == 0.0) return 0.0;
    const double n1 = x.lpNorm<1>();
    return n1 * n1 / n2;
}

RearrangeCheck check_rearrange(const SensingMatrix& A, double tau,
                               const Eigen::VectorXd& v, const Eigen::VectorXd& u) {
    if (tau <= 0.0) throw std::invalid_argument("check_rearrange: tau must be > 0");
    RearrangeCheck c;
    c.lhs = v.lpNorm<1>() - u.lpNorm<1>();
    c.rhs = tau * (A.entries * (u - v)).norm();
    c.holds = c.lhs <= c.rhs + 1e-10;
    return c;
}

BoundReport evaluate_bound_report(double delta, int k, double lambda, double mu,
                                  std::optional<long long> s_lambda,
                                  std::optional<double> entropy_value) {
    const RnspConstants c = rnsp_from_ric(delta);
    BoundReport r;
    r.delta = delta;
    r.k = k;
    r.lambda = lambda;
    r.mu = mu;
    r.rho = c.rho;
    r.beta = c.beta;
    r.theta = theta(mu, lambda, k);
    r.in_regime = r.theta <= 1.0;
    r.residual_upper = residual_upper(c.beta, r.theta, k);
    const SparsityBound sb = sparsity_bound(delta, c.beta, r.theta, k);
    r.sparsity_limit = sb.t;
    r.chi = sb.chi;
    const double nan = std::numeric_limits<double>::quiet_NaN();
    if (s_lambda) {
        r.residual_lower = residual_lower(*s_lambda, delta);
        const L2Bounds l2 = l2_bounds(delta, delta, c.beta, k, *s_lambda, lambda, mu);
        r.l2_lower = l2.lower;
        r.l2_upper = l2.upper;
    } else {
        r.residual_lower = nan;
        r.l2_lower = nan;
        r.l2_upper = l2_bounds(delta, delta, c.beta, k, 0, lambda, mu).upper;
    }
    const L1Bounds l1 = l1_bounds(delta, c.beta, r.theta, k, lambda, mu);
    r.l1_upper = l1.general;
    r.l1_upper_improved = l1.improved;
    r.entropy = entropy_value ? *entropy_value : nan;
    return r;
}

std::string bound_report_csv_header() {
    return "delta,k,lambda,mu,theta,in_regime,rho,beta,residual_upper,"
           "residual_lower,sparsity_limit,chi,l2_lower,l2_upper,l1_upper,"
           "l1_upper_improved,entropy";
}

std::string bound_report_csv_row(const BoundReport& r) {
    std::ostringstream os;
    os << fmt12(r.delta) << ',' << r.k << ',' << fmt12(r.lambda) << ','
       << fmt12(r.mu) << ',' << fmt12(r.theta) << ',' << (r.in_regime ? 1 : 0) << ','
       << fmt12(r.rho) << ',' << fmt12(r.beta) << ',' << fmt12(r.residual_upper) << ','
       << fmt12(r.residual_lower) << ',' << r.sparsity_limit << ',' << fmt12(r.chi) << ','
       << fmt12(r.l2_lower) << ',' << fmt12(r.l2_upper) << ',' << fmt12(r.l1_upper) << ','
       << fmt12(r.l1_upper_improved) << ',' << fmt12(r.entropy);
    return os.str();
}

} // namespace sparselab
