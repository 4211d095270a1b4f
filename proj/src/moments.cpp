#include "branchwave/moments.hpp"

#include "branchwave/branching.hpp"
#include "branchwave/types.hpp"

#include <cmath>
#include <stdexcept>

namespace branchwave {

namespace {

constexpr int series_cap = 400;
constexpr double series_tail = 1e-15;

double pow_over_factorial(double base_log, int power, int fact)
{
    // exp(power * base_log - log(fact!))
    return std::exp(power * base_log - std::lgamma(fact + 1.0));
}

std::vector<double> recursive_sequence(int p, int n_max, int q)
{
    // x_n = conv_{n-1} / (m(m+1)) for a and conv_{n-1} / (m(m+1)(m+2)) for b, m = q n
    if (p < 2)
        throw precondition_error("sequence requires p >= 2");
    if (n_max < 0)
        throw precondition_error("n_max must be nonnegative");
    std::vector<double> x(n_max + 1, 0.0);
    std::vector<double> conv(n_max + 1, 0.0);
    x[0] = 1.0;
    conv[0] = 1.0;
    const bool cubic = (q == 2 * p + 1);
    for (int n = 1; n <= n_max; ++n) {
        const double m = static_cast<double>(q) * n;
        const double denom = cubic ? m * (m + 1.0) * (m + 2.0) : m * (m + 1.0);
        x[n] = conv[n - 1] / denom;
        // conv[n] needs x[1..n] and conv[0..n-1]
        double s = 0.0;
        for (int i = 1; i <= n; ++i)
            s += ((p + 1.0) * i / n - 1.0) * x[i] * conv[n - i];
        conv[n] = s;
    }
    return x;
}

} // namespace

std::vector<double> depril_convolution_power(const std::vector<double> &seq, int p, int n_max)
{
    if (seq.empty() || seq[0] == 0.0)
        throw std::domain_error("depril_convolution_power: seq[0] must be nonzero");
    if (p < 1)
        throw precondition_error("depril_convolution_power: p must be >= 1");
    std::vector<double> out(n_max + 1, 0.0);
    out[0] = std::pow(seq[0], p);
    auto s = [&](int i) { return i < static_cast<int>(seq.size()) ? seq[i] : 0.0; };
    for (int m = 1; m <= n_max; ++m) {
        double acc = 0.0;
        for (int i = 1; i <= m; ++i)
            acc += ((p + 1.0) * i / m - 1.0) * s(i) * out[m - i];
        out[m] = acc / seq[0];
    }
    return out;
}

double I_n_chain(int n, double t)
{
    if (n < 0 || t < 0.0)
        throw precondition_error("I_n_chain: need n >= 0 and t >= 0");
    if (t == 0.0)
        return 0.0;
    return pow_over_factorial(std::log(t), 2 * n + 1, 2 * n + 1);
}

double J_n_chain(int n, double t, double lambda)
{
    if (n < 0 || t < 0.0 || !(lambda > 0.0))
        throw precondition_error("J_n_chain: need n >= 0, t >= 0, lambda > 0");
    if (t == 0.0)
        return 0.0;
    const double lg = (n + 1) * std::log(2.0) + lambda * t + (3 * n + 2) * std::log(t) - n * std::log(lambda) -
                      std::lgamma(3.0 * n + 3.0);
    return std::exp(lg);
}

std::vector<double> a_sequence(int p, int n_max)
{
    return recursive_sequence(p, n_max, p + 1);
}

std::vector<double> b_sequence(int p, int n_max)
{
    return recursive_sequence(p, n_max, 2 * p + 1);
}

double I_np(int n, int p, double t)
{
    if (t < 0.0)
        throw precondition_error("I_np: negative time");
    const double a = a_sequence(p, n)[n];
    if (t == 0.0)
        return 0.0;
    return a * std::pow(t, (p + 1.0) * n + 1.0);
}

double J_np_bound(int n, int p, double t, double lambda)
{
    if (t < 0.0 || !(lambda > 0.0))
        throw precondition_error("J_np_bound: need t >= 0, lambda > 0");
    const double b = b_sequence(p, n)[n];
    if (t == 0.0)
        return 0.0;
    return std::pow(2.0 / lambda, n) * b * std::pow(t, (2.0 * p + 1.0) * n + 2.0) *
           std::exp(lambda * t * ((p - 1.0) * n + 1.0));
}

double chain_series_solution(double t, double f_const, double c_const, double lambda)
{
    if (!(lambda > 0.0))
        throw precondition_error("chain_series_solution: lambda must be positive");
    if (t < 0.0)
        throw precondition_error("chain_series_solution: negative time");
    double sum = 0.0;
    double cn = 1.0;
    for (int n = 0; n < series_cap; ++n) {
        const double term = f_const * cn * I_n_chain(n, t);
        sum += term;
        if (std::abs(term) < series_tail && n > 0)
            return sum;
        cn *= c_const;
    }
    throw numerical_diagnostic("chain series did not reach its tail tolerance", std::abs(sum));
}

double tree_series_solution(int p, double t, double f_const, double c_const)
{
    if (t < 0.0)
        throw precondition_error("tree_series_solution: negative time");
    const auto a = a_sequence(p, series_cap);
    double sum = 0.0;
    for (int n = 0; n < series_cap; ++n) {
        const double term = a[n] * std::pow(c_const, n) * std::pow(f_const, (p - 1.0) * n + 1.0) *
                            std::pow(t, (p + 1.0) * n + 1.0);
        sum += term;
        if (std::abs(term) < series_tail && n > 0)
            return sum;
    }
    throw numerical_diagnostic("tree series did not reach its tail tolerance", std::abs(sum));
}

MomentTable moment_table(int p, double lambda, double t, int n_max)
{
    if (p < 1)
        throw precondition_error("moment table requires p >= 1");
    if (n_max < 0)
        throw precondition_error("n_max must be nonnegative");
    MomentTable m;
    m.p = p;
    m.lambda = lambda;
    m.t = t;
    if (p >= 2) {
        m.a = a_sequence(p, n_max);
        m.b = b_sequence(p, n_max);
    }
    for (int n = 0; n <= n_max; ++n) {
        if (p == 1) {
            m.I.push_back(I_n_chain(n, t));
            m.J.push_back(J_n_chain(n, t, lambda));
            m.pmf.push_back(poisson_pmf(n, lambda * t));
        } else {
            m.I.push_back(m.a[n] * (t == 0.0 ? 0.0 : std::pow(t, (p + 1.0) * n + 1.0)));
            m.J.push_back(J_np_bound(n, p, t, lambda));
            m.pmf.push_back(branch_count_pmf(n, p, lambda, t));
        }
    }
    if (p == 1) {
        m.mean = lambda * t;
        m.second_moment = lambda * t + lambda * t * lambda * t;
    } else {
        const auto mo = branch_count_moments(p, lambda, t);
        m.mean = mo.first;
        m.second_moment = mo.second;
    }
    return m;
}

std::vector<BoundAudit> audit_sequence_bounds(int p, int n_max)
{
    const auto a = a_sequence(p, n_max);
    const auto b = b_sequence(p, n_max);
    const auto ca = depril_convolution_power(a, p, n_max);
    const auto cb = depril_convolution_power(b, p, n_max);
    std::vector<BoundAudit> out;
    for (int n = 1; n <= n_max; ++n) {
        BoundAudit r{};
        r.p = p;
        r.n = n;
        r.a = a[n];
        r.a_bound = 1.0 / ((p + 1.0) * n * std::pow(p + 2.0, n));
        r.b = b[n];
        r.b_bound = 1.0 / ((p + 1.0) * n) * std::pow(2.0 * (2 * p + 1) * (2 * p + 3), -n);
        r.conv_a = ca[n];
        r.conv_a_bound = std::pow(p + 2.0, -n);
        r.conv_b = cb[n];
        r.conv_b_bound = std::pow(2.0 * (2 * p + 1) * (2 * p + 3), -n);
        // the n = 1 bounds hold with equality, so allow rounding slack
        const double s = 1.0 + 1e-12;
        r.pass = r.a <= r.a_bound * s && r.b <= r.b_bound * s && r.conv_a <= r.conv_a_bound * s &&
                 r.conv_b <= r.conv_b_bound * s;
        out.push_back(r);
    }
    return out;
}

} // namespace branchwave
