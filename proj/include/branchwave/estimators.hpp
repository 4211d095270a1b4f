#ifndef BRANCHWAVE_ESTIMATORS_HPP
#define BRANCHWAVE_ESTIMATORS_HPP

#include "branchwave/branching.hpp"

#include <cstdint>
#include <functional>
#include <limits>
#include <utility>

namespace branchwave {

struct WaveProblem {
    int d = 1;
    double T = 1.0;
    double lambda = 1.0;
    SpaceFn f;       // initial velocity
    SpaceTimeFn c;   // coefficient of the power nonlinearity
    SpaceTimeFn F_lin; // source for the linear problem
    int p = 0;
    double f_sup = std::numeric_limits<double>::infinity();
    double c_sup = std::numeric_limits<double>::infinity();
};

struct EstimatorReport {
    double estimate = 0.0;
    double std_error = 0.0;
    std::int64_t M = 0;
    std::uint64_t seed = 0;
    std::int64_t rejected_samples = 0;
    double max_abs_weight = 0.0;
    double lambda = 1.0;
};

// Replace u = U + f1 so that the problem has zero initial position.
std::pair<SpaceFn, SpaceTimeFn> reduce_problem(const SpaceFn &f1, const SpaceFn &f2, const SpaceTimeFn &F, int d);

struct WellposedCheck {
    bool applicable = false; // false for p in {0, 1}
    bool pass = true;
    double threshold = std::numeric_limits<double>::infinity();
    double margin = 0.0; // max(f_sup, c_sup) / threshold
};

double wellposed_threshold(int p, double lambda, double T);
WellposedCheck check_wellposed(const WaveProblem &problem);

// Outcome of one Monte Carlo sample.
struct SampleOutcome {
    double value = 0.0;
    bool rejected = false;
};

using SampleTask = std::function<SampleOutcome(std::uint64_t index, CounterRng &rng)>;

// Sample i draws from the stream (seed, i); the result does not depend on workers.
EstimatorReport mc_driver(const SampleTask &task, std::int64_t M, std::uint64_t seed, int workers);

// Signed weight of a realized tree: product over alive particles of
// (dT / rho_bar(dT)) f(X) and over dead particles of (dT / rho(dT)) c(t - T, X).
// Magnitudes are accumulated in log space.
double tree_weight(const BranchingTree &tree, const WaveProblem &problem, double t);

EstimatorReport estimate_linear(const WaveProblem &problem, double t, const Point &x, std::int64_t M,
                                std::uint64_t seed, int workers = 1);
EstimatorReport estimate_perturbative(const WaveProblem &problem, double t, const Point &x, std::int64_t M,
                                      std::uint64_t seed, int workers = 1);
EstimatorReport estimate_nonlinear(const WaveProblem &problem, double t, const Point &x, std::int64_t M,
                                   std::uint64_t seed, int workers = 1);
// Dispatches on problem.p.
EstimatorReport estimate(const WaveProblem &problem, double t, const Point &x, std::int64_t M, std::uint64_t seed,
                         int workers = 1);

// Tree for sample index i of an estimator run, rooted at x.
BranchingTree sample_tree(const WaveProblem &problem, double t, const Point &x, std::uint64_t seed,
                          std::uint64_t index, std::int64_t particle_cap = 1'000'000);

} // namespace branchwave

#endif
