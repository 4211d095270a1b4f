#ifndef BRANCHWAVE_DISTILL_HPP
#define BRANCHWAVE_DISTILL_HPP

#include "branchwave/estimators.hpp"
#include "branchwave/relu.hpp"

#include "json.hpp"

#include <functional>
#include <limits>
#include <string>
#include <vector>

namespace branchwave {

struct DataNets {
    NeuralNet phi_f; // x -> f(x), input dimension d
    NeuralNet phi_c; // (s, x) -> c(s, x); the source F for the linear problem
    double eps_data = 0.0;
    double f_sup = 0.0;
    double c_sup = 0.0;
};

// Net with in_dim inputs whose realization is identically zero.
NeuralNet zero_net(int in_dim);
bool is_zero_net(const NeuralNet &net);

// Piecewise-linear interpolant of f on [lo, hi] with spacing h <= eps / lipschitz, flat outside.
// Throws precondition_error when the Lipschitz bound is missing (negative or not finite).
NeuralNet build_interpolant_net_1d(const std::function<double(double)> &f, double lo, double hi, double eps,
                                   double lipschitz);

// Net of d inputs reading only input `index` of `net` (a 1-input net); the other inputs get zero weights.
NeuralNet embed_input(const NeuralNet &net, int in_dim, int index);

struct SeparableFactor {
    std::function<double(double)> fn;
    double lipschitz = 1.0;
};

// x -> prod_i factors[i](x_i) on [-half_width, half_width]^d; factors bounded by 1.
NeuralNet build_separable_net(const std::vector<SeparableFactor> &factors, int d, double half_width, double eps);

// Sup of |f - phi_f| on |x|_inf <= 2T and of |c - phi_c| additionally over s in [0, T], on a grid.
double data_net_error(const DataNets &nets, const SpaceFn &f, const SpaceTimeFn &c, int d, double T, int grid_n);

struct LightconeError {
    double sup = 0.0;
    double l2 = 0.0; // uniform-measure root mean square over the same grid
    int points = 0;
};

// Uniform grid of B(0, t): grid_n points per axis of [-t, t]^d filtered to |x| <= t.
std::vector<Point> lightcone_grid(double t, int d, int grid_n);
LightconeError verify_lightcone(const NeuralNet &net, const SpaceFn &oracle, double t, int d, int grid_n);

struct DistillOptions {
    double eps_target = 0.1;
    std::uint64_t seed = 1;
    int grid_n = 101;
    int workers = 1;
    std::int64_t particle_cap = 100'000;
};

struct DistillReport {
    NeuralNet net;
    int p = 0;
    int d = 1;
    double t = 0.0;
    double lambda = 1.0;
    double eps_target = 0.0;
    double delta = 0.0; // data accuracy budget
    double gamma = 0.0; // assembly accuracy budget
    std::int64_t M = 0;
    std::uint64_t seed = 0;

    double measured_sup_error = std::numeric_limits<double>::quiet_NaN();
    double measured_l2_error = std::numeric_limits<double>::quiet_NaN();
    int grid_points = 0;
    double param_bound = 0.0;
    std::int64_t measured_P = 0;
    double hidden_bound = 0.0;
    int measured_H = 0;
    int measured_W = 0;

    // distance between the net and the frozen estimator run on the data nets
    double assembly_deviation = std::numeric_limits<double>::quiet_NaN();
    double assembly_budget = 0.0;

    double product_bound = 0.0; // B-bar fed to the product networks
    bool large_R = false;
    std::int64_t branch_sum = 0;
    double branch_sum_bound = 0.0;
    bool alive_identity = true;
    std::int64_t zero_samples = 0; // samples whose product carries an identically zero factor

    std::int64_t data_P_f = 0, data_P_c = 0;
    int data_H_f = 0, data_H_c = 0;
    double data_alpha = 1.0; // P(phi) <= B delta^{-alpha}
    double data_B = 0.0;
    double depth_constant = 0.0;

    bool error_pass() const { return measured_sup_error <= eps_target; }
    bool param_pass() const { return static_cast<double>(measured_P) <= param_bound; }
    bool hidden_pass() const { return static_cast<double>(measured_H) <= hidden_bound; }
    bool branch_pass() const { return static_cast<double>(branch_sum) <= branch_sum_bound && alive_identity; }
    bool assembly_pass() const { return !(assembly_deviation > assembly_budget + 1e-9); }
    bool all_pass() const
    {
        return error_pass() && param_pass() && hidden_pass() && branch_pass() && assembly_pass();
    }
};

// The oracle may be empty; error fields then stay NaN.
DistillReport distill_linear(const WaveProblem &problem, double t, const DataNets &data, const DistillOptions &opt,
                             const SpaceFn &oracle = {});
DistillReport distill_perturbative(const WaveProblem &problem, double t, const DataNets &data,
                                   const DistillOptions &opt, const SpaceFn &oracle = {});
DistillReport distill_nonlinear(const WaveProblem &problem, double t, const DataNets &data,
                                const DistillOptions &opt, const SpaceFn &oracle = {});
DistillReport distill(const WaveProblem &problem, double t, const DataNets &data, const DistillOptions &opt,
                      const SpaceFn &oracle = {});

// Frozen estimator evaluated with the data nets in place of f and c.
double frozen_estimate(const WaveProblem &problem, double t, const DataNets &data, const DistillOptions &opt,
                       const Point &x);

nlohmann::json report_to_json(const DistillReport &r);

} // namespace branchwave

#endif
