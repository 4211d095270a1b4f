#include "branchwave/branching.hpp"

#include <charconv>
#include <cmath>
#include <ostream>
#include <stdexcept>

namespace branchwave {

namespace {

struct Pending {
    std::int64_t parent;
    double birth;
    Point origin;
};

BranchingTree simulate(const BranchingConfig &cfg, CounterRng &rng)
{
    check_dimension(cfg.d);
    if (cfg.p < 1)
        throw precondition_error("offspring count p must be >= 1");
    if (cfg.t < 0.0)
        throw precondition_error("horizon t must be nonnegative");
    if (cfg.particle_cap < 1)
        throw precondition_error("particle_cap must be >= 1");

    BranchingTree tree;
    std::vector<Pending> stack;
    stack.push_back({-1, 0.0, cfg.x});
    while (!stack.empty()) {
        if (static_cast<std::int64_t>(tree.particles.size()) >= cfg.particle_cap) {
            tree.truncated = true;
            break;
        }
        const Pending pend = stack.back();
        stack.pop_back();

        Particle q;
        q.id = static_cast<std::int64_t>(tree.particles.size());
        q.parent = pend.parent;
        q.birth_time = pend.birth;
        const double tau = sample_tau(cfg.law, rng);
        q.alive = pend.birth + tau >= cfg.t;
        q.death_time = q.alive ? cfg.t : pend.birth + tau;
        q.delta = q.death_time - q.birth_time;
        q.position = sample_position(pend.origin, q.delta, cfg.d, rng);
        tree.particles.push_back(q);

        if (q.alive) {
            tree.alive_set.push_back(q.id);
        } else {
            tree.dead_set.push_back(q.id);
            // children are identical until expanded; the next pop is the leftmost
            for (int j = 0; j < cfg.p; ++j)
                stack.push_back({q.id, q.death_time, q.position});
        }
    }
    tree.branch_count = static_cast<std::int64_t>(tree.dead_set.size());
    return tree;
}

} // namespace

BranchingTree simulate_chain(const BranchingConfig &cfg, CounterRng &rng)
{
    if (cfg.p != 1)
        throw precondition_error("simulate_chain requires p = 1");
    return simulate(cfg, rng);
}

BranchingTree simulate_tree(const BranchingConfig &cfg, CounterRng &rng)
{
    if (cfg.p < 2)
        throw precondition_error("simulate_tree requires p >= 2");
    return simulate(cfg, rng);
}

BranchingTree simulate_branching(const BranchingConfig &cfg, CounterRng &rng)
{
    return cfg.p == 1 ? simulate_chain(cfg, rng) : simulate_tree(cfg, rng);
}

std::string tree_invariant_violation(const BranchingTree &tree, const BranchingConfig &cfg)
{
    const auto &ps = tree.particles;
    if (ps.empty())
        return "empty tree";
    std::vector<int> children(ps.size(), 0);
    std::vector<double> path(ps.size(), 0.0);
    for (const auto &q : ps) {
        if (q.delta < 0.0)
            return "negative delta at particle " + std::to_string(q.id);
        if (q.death_time > cfg.t)
            return "death after horizon at particle " + std::to_string(q.id);
        if (q.alive != (q.death_time == cfg.t))
            return "alive flag disagrees with death time at particle " + std::to_string(q.id);
        if (q.death_time - q.birth_time != q.delta)
            return "delta is not death - birth at particle " + std::to_string(q.id);
        double dx = 0.0;
        for (int k = 0; k < cfg.d; ++k)
            dx += (q.position[k] - cfg.x[k]) * (q.position[k] - cfg.x[k]);
        if (std::sqrt(dx) > q.death_time * (1.0 + 1e-12) + 1e-15)
            return "particle outside its light cone: " + std::to_string(q.id);
        if (q.parent >= 0) {
            const auto &par = ps[q.parent];
            if (q.parent >= q.id || par.alive)
                return "bad parent link at particle " + std::to_string(q.id);
            if (q.birth_time != par.death_time)
                return "birth time differs from parent death at particle " + std::to_string(q.id);
            ++children[q.parent];
            path[q.id] = path[q.parent] + q.delta;
        } else {
            if (q.id != 0 || q.birth_time != 0.0)
                return "root must be particle 0 born at time 0";
            path[q.id] = q.delta;
        }
        if (std::abs(path[q.id] - q.death_time) > 1e-12 * (1.0 + cfg.t))
            return "ancestor deltas do not telescope at particle " + std::to_string(q.id);
    }
    if (tree.truncated)
        return {};
    for (const auto &q : ps) {
        const int want = q.alive ? 0 : cfg.p;
        if (children[q.id] != want)
            return "particle " + std::to_string(q.id) + " has wrong child count";
    }
    const auto n = tree.branch_count;
    if (static_cast<std::int64_t>(tree.dead_set.size()) != n)
        return "branch count differs from dead set size";
    if (static_cast<std::int64_t>(tree.alive_set.size()) != (cfg.p - 1) * n + 1)
        return "alive count differs from (p-1)N+1";
    return {};
}

double poisson_pmf(int n, double mean)
{
    if (n < 0)
        return 0.0;
    if (mean == 0.0)
        return n == 0 ? 1.0 : 0.0;
    return std::exp(n * std::log(mean) - mean - std::lgamma(n + 1.0));
}

std::vector<double> q_coefficients(int p, int n_max)
{
    if (p < 2)
        throw precondition_error("q_coefficients requires p >= 2");
    if (n_max < 0)
        throw precondition_error("n_max must be nonnegative");
    std::vector<double> q(n_max + 1, 0.0);
    std::vector<double> conv(n_max + 1, 0.0);
    q[0] = 1.0;
    conv[0] = 1.0;
    for (int n = 1; n <= n_max; ++n) {
        q[n] = conv[n - 1] / (static_cast<double>(n) * (p - 1));
        double s = 0.0;
        for (int i = 1; i <= n; ++i)
            s += ((p + 1.0) * i / n - 1.0) * q[i] * conv[n - i];
        conv[n] = s;
    }
    return q;
}

double branch_count_pmf(int n, int p, double lambda, double t)
{
    if (p < 2)
        throw precondition_error("branch_count_pmf requires p >= 2");
    if (t < 0.0 || !(lambda > 0.0))
        throw precondition_error("branch_count_pmf: need t >= 0 and lambda > 0");
    if (n < 0)
        return 0.0;
    const double base = -std::expm1(-lambda * t * (p - 1));
    if (n == 0)
        return std::exp(-lambda * t);
    if (base == 0.0)
        return 0.0;
    double log_q;
    if (n <= 64) {
        log_q = std::log(q_coefficients(p, n)[n]);
    } else {
        const double a = 1.0 / (p - 1);
        log_q = std::lgamma(n + a) - std::lgamma(a) - std::lgamma(n + 1.0);
    }
    return std::exp(log_q - lambda * t + n * std::log(base));
}

std::pair<double, double> branch_count_moments(int p, double lambda, double t)
{
    if (p < 2)
        throw precondition_error("branch_count_moments requires p >= 2");
    const double m = std::expm1(lambda * t * (p - 1)) / (p - 1);
    return {m, m + p * m * m};
}

void dump_tree(const BranchingTree &tree, int d, std::ostream &out)
{
    auto num = [&](double v) {
        char buf[32];
        auto r = std::to_chars(buf, buf + sizeof buf, v);
        out.write(buf, r.ptr - buf);
    };
    for (const auto &q : tree.particles) {
        out << q.id << ' ' << q.parent << ' ';
        num(q.birth_time);
        out << ' ';
        num(q.death_time);
        for (int k = 0; k < d; ++k) {
            out << ' ';
            num(q.position[k]);
        }
        out << '\n';
    }
}

} // namespace branchwave
