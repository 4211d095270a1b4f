#include "branchwave/estimators.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <exception>
#include <mutex>
#include <sstream>
#include <thread>
#include <vector>

namespace branchwave {

namespace {

constexpr std::int64_t chunk_size = 1024;

struct Moments {
    std::int64_t n = 0;
    double mean = 0.0;
    double m2 = 0.0;
    std::int64_t rejected = 0;
    double max_abs = 0.0;

    void push(double v)
    {
        ++n;
        const double d = v - mean;
        mean += d / static_cast<double>(n);
        m2 += d * (v - mean);
        max_abs = std::max(max_abs, std::abs(v));
    }
};

Moments merge(const Moments &a, const Moments &b)
{
    Moments r;
    r.n = a.n + b.n;
    r.rejected = a.rejected + b.rejected;
    r.max_abs = std::max(a.max_abs, b.max_abs);
    if (r.n == 0)
        return r;
    const double na = static_cast<double>(a.n), nb = static_cast<double>(b.n), n = static_cast<double>(r.n);
    const double d = b.mean - a.mean;
    r.mean = a.mean + d * nb / n;
    r.m2 = a.m2 + b.m2 + d * d * na * nb / n;
    return r;
}

Moments merge_range(const std::vector<Moments> &parts, std::size_t lo, std::size_t hi)
{
    if (hi - lo == 1)
        return parts[lo];
    const std::size_t mid = lo + (hi - lo) / 2;
    return merge(merge_range(parts, lo, mid), merge_range(parts, mid, hi));
}

void check_bound(double value, double sup, const char *name)
{
    if (std::isfinite(sup) && std::abs(value) > sup)
        throw precondition_error(std::string("declared sup-norm of ") + name + " violated at a sampled point");
}

void check_time(const WaveProblem &problem, double t)
{
    check_dimension(problem.d);
    if (!(t >= 0.0) || t > problem.T)
        throw precondition_error("evaluation time must lie in [0, T]");
}

} // namespace

std::pair<SpaceFn, SpaceTimeFn> reduce_problem(const SpaceFn &f1, const SpaceFn &f2, const SpaceTimeFn &F, int d)
{
    check_dimension(d);
    if (!f1)
        return {f2, F};
    constexpr double h = 1e-4;
    SpaceTimeFn Ft = [f1, F, d](double s, const Point &x) {
        double lap = 0.0;
        const double mid = f1(x);
        for (int k = 0; k < d; ++k) {
            Point a = x, b = x;
            a[k] += h;
            b[k] -= h;
            lap += (f1(a) - 2.0 * mid + f1(b)) / (h * h);
        }
        return (F ? F(s, x) : 0.0) + lap;
    };
    return {f2, Ft};
}

double wellposed_threshold(int p, double lambda, double T)
{
    if (p < 2)
        return std::numeric_limits<double>::infinity();
    if (!(T > 0.0))
        return std::numeric_limits<double>::infinity();
    const double inner = lambda * (2.0 * p + 1.0) * (2.0 * p + 3.0) / (T * std::expm1(lambda * T * (p - 1)));
    return std::pow(inner, 1.0 / (2.0 * p)) / (2.0 * T);
}

WellposedCheck check_wellposed(const WaveProblem &problem)
{
    WellposedCheck r;
    if (problem.p < 2)
        return r;
    r.applicable = true;
    r.threshold = wellposed_threshold(problem.p, problem.lambda, problem.T);
    const double m = std::max(problem.f_sup, problem.c_sup);
    r.margin = m / r.threshold;
    r.pass = m < r.threshold;
    return r;
}

EstimatorReport mc_driver(const SampleTask &task, std::int64_t M, std::uint64_t seed, int workers)
{
    if (M <= 0)
        throw std::invalid_argument("mc_driver: sample count M must be positive");
    if (workers < 1)
        throw precondition_error("mc_driver: workers must be >= 1");

    const std::int64_t n_chunks = (M + chunk_size - 1) / chunk_size;
    std::vector<Moments> parts(static_cast<std::size_t>(n_chunks));
    std::atomic<std::int64_t> next{0};
    std::exception_ptr failure;
    std::mutex failure_lock;

    auto run = [&]() {
        try {
            for (;;) {
                const std::int64_t c = next.fetch_add(1);
                if (c >= n_chunks)
                    return;
                Moments m;
                const std::int64_t end = std::min(M, (c + 1) * chunk_size);
                for (std::int64_t i = c * chunk_size; i < end; ++i) {
                    CounterRng rng(seed, static_cast<std::uint64_t>(i));
                    const SampleOutcome o = task(static_cast<std::uint64_t>(i), rng);
                    if (o.rejected)
                        ++m.rejected;
                    else
                        m.push(o.value);
                }
                parts[static_cast<std::size_t>(c)] = m;
            }
        } catch (...) {
            std::lock_guard<std::mutex> g(failure_lock);
            if (!failure)
                failure = std::current_exception();
            next.store(n_chunks);
        }
    };

    const int n_threads = static_cast<int>(std::min<std::int64_t>(workers, n_chunks));
    if (n_threads == 1) {
        run();
    } else {
        std::vector<std::thread> pool;
        for (int w = 0; w < n_threads; ++w)
            pool.emplace_back(run);
        for (auto &th : pool)
            th.join();
    }
    if (failure)
        std::rethrow_exception(failure);

    const Moments all = merge_range(parts, 0, parts.size());
    EstimatorReport r;
    r.M = M;
    r.seed = seed;
    r.rejected_samples = all.rejected;
    r.max_abs_weight = all.max_abs;
    r.estimate = all.mean;
    if (all.n > 1)
        r.std_error = std::sqrt(all.m2 / static_cast<double>(all.n - 1) / static_cast<double>(all.n));
    return r;
}

double tree_weight(const BranchingTree &tree, const WaveProblem &problem, double t)
{
    const LifetimeLaw law(problem.lambda);
    double log_mag = 0.0;
    bool negative = false;
    auto factor = [&](double v) {
        if (v == 0.0)
            return false;
        if (v < 0.0)
            negative = !negative;
        log_mag += std::log(std::abs(v));
        return true;
    };
    for (const auto &q : tree.particles) {
        double data;
        double time_log;
        if (q.alive) {
            data = problem.f(q.position);
            check_bound(data, problem.f_sup, "f");
            // dT / rho_bar(dT) = dT e^{lambda dT}
            if (q.delta == 0.0)
                return 0.0;
            time_log = std::log(q.delta) + law.lambda * q.delta;
        } else {
            data = problem.c(t - q.death_time, q.position);
            check_bound(data, problem.c_sup, "c");
            // dT / rho(dT) = dT e^{lambda dT} / lambda
            if (q.delta == 0.0)
                return 0.0;
            time_log = std::log(q.delta) + law.lambda * q.delta - std::log(law.lambda);
        }
        if (!factor(data))
            return 0.0;
        log_mag += time_log;
    }
    const double mag = std::exp(log_mag);
    return negative ? -mag : mag;
}

BranchingTree sample_tree(const WaveProblem &problem, double t, const Point &x, std::uint64_t seed,
                          std::uint64_t index, std::int64_t particle_cap)
{
    BranchingConfig cfg;
    cfg.p = problem.p;
    cfg.t = t;
    cfg.x = x;
    cfg.law = LifetimeLaw(problem.lambda);
    cfg.d = problem.d;
    cfg.particle_cap = particle_cap;
    CounterRng rng(seed, index);
    return simulate_branching(cfg, rng);
}

EstimatorReport estimate_linear(const WaveProblem &problem, double t, const Point &x, std::int64_t M,
                                std::uint64_t seed, int workers)
{
    check_time(problem, t);
    if (!problem.f || !problem.F_lin)
        throw precondition_error("linear estimator needs f and F_lin");
    const LifetimeLaw law(problem.lambda);
    SampleTask task = [&](std::uint64_t, CounterRng &rng) {
        const double tau = sample_tau(law, rng);
        const Point y = sample_position(x, std::min(tau, t), problem.d, rng);
        SampleOutcome o;
        if (tau >= t) {
            const double v = problem.f(y);
            check_bound(v, problem.f_sup, "f");
            o.value = t / rho_bar(t, law) * v;
        } else {
            o.value = tau / rho(tau, law) * problem.F_lin(t - tau, y);
        }
        return o;
    };
    auto r = mc_driver(task, M, seed, workers);
    r.lambda = problem.lambda;
    return r;
}

namespace {

EstimatorReport estimate_branching(const WaveProblem &problem, double t, const Point &x, std::int64_t M,
                                   std::uint64_t seed, int workers)
{
    if (!problem.f || !problem.c)
        throw precondition_error("branching estimator needs f and c");
    BranchingConfig cfg;
    cfg.p = problem.p;
    cfg.t = t;
    cfg.x = x;
    cfg.law = LifetimeLaw(problem.lambda);
    cfg.d = problem.d;
    SampleTask task = [&](std::uint64_t, CounterRng &rng) {
        const BranchingTree tree = simulate_branching(cfg, rng);
        SampleOutcome o;
        if (tree.truncated)
            o.rejected = true;
        else
            o.value = tree_weight(tree, problem, t);
        return o;
    };
    auto r = mc_driver(task, M, seed, workers);
    r.lambda = problem.lambda;
    return r;
}

} // namespace

EstimatorReport estimate_perturbative(const WaveProblem &problem, double t, const Point &x, std::int64_t M,
                                      std::uint64_t seed, int workers)
{
    check_time(problem, t);
    if (problem.p != 1)
        throw precondition_error("perturbative estimator requires p = 1");
    return estimate_branching(problem, t, x, M, seed, workers);
}

EstimatorReport estimate_nonlinear(const WaveProblem &problem, double t, const Point &x, std::int64_t M,
                                   std::uint64_t seed, int workers)
{
    check_time(problem, t);
    if (problem.p < 2)
        throw precondition_error("nonlinear estimator requires p >= 2");
    const auto wp = check_wellposed(problem);
    if (!wp.pass) {
        std::ostringstream msg;
        msg << "ill-posed configuration: max(f_sup, c_sup) = " << std::max(problem.f_sup, problem.c_sup)
            << " is not below the smallness threshold " << wp.threshold << " for p = " << problem.p
            << ", lambda = " << problem.lambda << ", T = " << problem.T;
        throw precondition_error(msg.str());
    }
    return estimate_branching(problem, t, x, M, seed, workers);
}

EstimatorReport estimate(const WaveProblem &problem, double t, const Point &x, std::int64_t M, std::uint64_t seed,
                         int workers)
{
    switch (problem.p) {
    case 0:
        return estimate_linear(problem, t, x, M, seed, workers);
    case 1:
        return estimate_perturbative(problem, t, x, M, seed, workers);
    default:
        if (problem.p < 0)
            throw precondition_error("power p must be >= 0");
        return estimate_nonlinear(problem, t, x, M, seed, workers);
    }
}

} // namespace branchwave
