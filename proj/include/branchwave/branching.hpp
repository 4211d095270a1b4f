#ifndef BRANCHWAVE_BRANCHING_HPP
#define BRANCHWAVE_BRANCHING_HPP

#include "branchwave/kernels.hpp"

#include <cstdint>
#include <iosfwd>
#include <utility>
#include <vector>

namespace branchwave {

struct Particle {
    std::int64_t id = 0;
    std::int64_t parent = -1;
    double birth_time = 0.0;
    double death_time = 0.0;
    double delta = 0.0;
    Point position{};
    bool alive = false;
};

struct BranchingTree {
    std::vector<Particle> particles;
    std::vector<std::int64_t> alive_set;
    std::vector<std::int64_t> dead_set;
    std::int64_t branch_count = 0;
    bool truncated = false;
};

struct BranchingConfig {
    int p = 1;
    double t = 0.0;
    Point x{};
    LifetimeLaw law{1.0};
    int d = 1;
    std::int64_t particle_cap = 1'000'000;
};

BranchingTree simulate_chain(const BranchingConfig &cfg, CounterRng &rng);
BranchingTree simulate_tree(const BranchingConfig &cfg, CounterRng &rng);
// Dispatches on cfg.p.
BranchingTree simulate_branching(const BranchingConfig &cfg, CounterRng &rng);

// Checks the particle and tree invariants; returns an empty string when they hold.
std::string tree_invariant_violation(const BranchingTree &tree, const BranchingConfig &cfg);

double poisson_pmf(int n, double mean);

std::vector<double> q_coefficients(int p, int n_max);
double branch_count_pmf(int n, int p, double lambda, double t);
// (E[N], E[N^2]) for p >= 2.
std::pair<double, double> branch_count_moments(int p, double lambda, double t);

// One particle per line: id parent birth death x0 [x1 [x2]].
void dump_tree(const BranchingTree &tree, int d, std::ostream &out);

} // namespace branchwave

#endif
