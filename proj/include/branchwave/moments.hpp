#ifndef BRANCHWAVE_MOMENTS_HPP
#define BRANCHWAVE_MOMENTS_HPP

#include <vector>

namespace branchwave {

// p-fold convolution power of seq up to index n_max (De Pril recurrence).
std::vector<double> depril_convolution_power(const std::vector<double> &seq, int p, int n_max);

// Chain (p = 1) weight moments: I_n = E[W 1{N=n}], J_n = E[W^2 1{N=n}].
double I_n_chain(int n, double t);
double J_n_chain(int n, double t, double lambda);

std::vector<double> a_sequence(int p, int n_max);
std::vector<double> b_sequence(int p, int n_max);

// I_{n,p}(t) = a_{n,p} t^{(p+1)n+1}.
double I_np(int n, int p, double t);
// One-sided bound on J_{n,p}(t).
double J_np_bound(int n, int p, double t, double lambda);

// Exact solution at constant data f, c for p = 1: sum_n f c^n I_n(t).
// lambda does not enter the value; it is accepted for symmetry with the estimator.
double chain_series_solution(double t, double f_const, double c_const, double lambda);

// Exact solution at constant data for p >= 2: sum_n a_{n,p} c^n f^{(p-1)n+1} t^{(p+1)n+1}.
double tree_series_solution(int p, double t, double f_const, double c_const);

struct MomentTable {
    int p = 1;
    double lambda = 1.0;
    double t = 0.0;
    std::vector<double> I;
    std::vector<double> J;
    std::vector<double> a;
    std::vector<double> b;
    std::vector<double> pmf;
    double mean = 0.0;
    double second_moment = 0.0;
};

MomentTable moment_table(int p, double lambda, double t, int n_max);

struct BoundAudit {
    int p;
    int n;
    double a;
    double a_bound;
    double b;
    double b_bound;
    double conv_a;
    double conv_a_bound;
    double conv_b;
    double conv_b_bound;
    bool pass;
};

// Sequence and convolution bounds for n = 1..n_max.
std::vector<BoundAudit> audit_sequence_bounds(int p, int n_max);

} // namespace branchwave

#endif
