#include "branchwave/distill.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <exception>
#include <limits>
#include <mutex>
#include <thread>

namespace branchwave {

NeuralNet zero_net(int in_dim)
{
    NeuralNet net;
    net.layers.push_back({SparseMat(1, in_dim), Eigen::VectorXd::Zero(1)});
    net.layers.push_back({SparseMat(1, 1), Eigen::VectorXd::Zero(1)});
    return net;
}

bool is_zero_net(const NeuralNet &net)
{
    const Layer &l = net.layers.back();
    for (int r = 0; r < l.w.outerSize(); ++r)
        for (SparseMat::InnerIterator it(l.w, r); it; ++it)
            if (it.value() != 0.0)
                return false;
    return (l.b.array() == 0.0).all();
}

NeuralNet build_interpolant_net_1d(const std::function<double(double)> &f, double lo, double hi, double eps,
                                   double lipschitz)
{
    if (!(lipschitz >= 0.0) || !std::isfinite(lipschitz))
        throw precondition_error("interpolant net needs a finite nonnegative Lipschitz bound");
    if (!(eps > 0.0))
        throw precondition_error("interpolant net needs eps > 0");
    if (!(hi > lo))
        throw precondition_error("interpolant net needs lo < hi");
    // even cell count keeps the midpoint on the grid
    long n = 2;
    if (lipschitz > 0.0)
        n = std::max(2L, static_cast<long>(std::ceil((hi - lo) * lipschitz / eps)));
    n += n % 2;
    const double h = (hi - lo) / static_cast<double>(n);
    std::vector<double> knots(n + 1), vals(n + 1);
    for (long i = 0; i <= n; ++i) {
        knots[i] = (i == n) ? hi : lo + h * static_cast<double>(i);
        vals[i] = f(knots[i]);
    }
    std::vector<double> cell(n);
    for (long i = 0; i < n; ++i)
        cell[i] = (vals[i + 1] - vals[i]) / (knots[i + 1] - knots[i]);
    // keep only knots where the slope changes beyond rounding, then take slopes between kept knots
    double vmax = 0.0;
    for (double v : vals)
        vmax = std::max(vmax, std::abs(v));
    const double rounding = 64.0 * std::numeric_limits<double>::epsilon() * vmax / h;
    std::vector<long> kept{0};
    for (long i = 1; i < n; ++i)
        if (std::abs(cell[i] - cell[i - 1]) > rounding)
            kept.push_back(i);
    kept.push_back(n);
    // merged runs must still reproduce every knot value; otherwise keep all knots
    double drift = 0.0;
    for (std::size_t k = 0; k + 1 < kept.size(); ++k) {
        const long a = kept[k], b = kept[k + 1];
        const double slope = (vals[b] - vals[a]) / (knots[b] - knots[a]);
        for (long i = a + 1; i < b; ++i)
            drift = std::max(drift, std::abs(vals[a] + slope * (knots[i] - knots[a]) - vals[i]));
    }
    if (drift > 1e-6 * eps) {
        kept.resize(n + 1);
        for (long i = 0; i <= n; ++i)
            kept[i] = i;
    }
    // f0 + sum_k (s_k - s_{k-1}) relu(x - x_k), with zero slope outside [lo, hi]
    std::vector<double> slopes{0.0};
    for (std::size_t k = 0; k + 1 < kept.size(); ++k)
        slopes.push_back((vals[kept[k + 1]] - vals[kept[k]]) / (knots[kept[k + 1]] - knots[kept[k]]));
    slopes.push_back(0.0);
    std::vector<double> at, coef;
    for (std::size_t k = 0; k < kept.size(); ++k) {
        const double jump = slopes[k + 1] - slopes[k];
        if (jump != 0.0) {
            at.push_back(knots[kept[k]]);
            coef.push_back(jump);
        }
    }
    if (at.empty())
        return affine_wrap(zero_net(1), 1.0, Eigen::VectorXd::Zero(1), vals[0]);
    const int k = static_cast<int>(at.size());
    std::vector<Eigen::Triplet<double>> w1, w2;
    Eigen::VectorXd b1(k);
    for (int i = 0; i < k; ++i) {
        w1.emplace_back(i, 0, 1.0);
        b1(i) = -at[i];
        w2.emplace_back(0, i, coef[i]);
    }
    NeuralNet net;
    SparseMat A(k, 1), B(1, k);
    A.setFromTriplets(w1.begin(), w1.end());
    B.setFromTriplets(w2.begin(), w2.end());
    A.prune([](Eigen::Index, Eigen::Index, const double &v) { return v != 0.0; });
    net.layers.push_back({A, b1});
    Eigen::VectorXd b2(1);
    b2 << vals[0];
    net.layers.push_back({B, b2});
    return net;
}

NeuralNet embed_input(const NeuralNet &net, int in_dim, int index)
{
    if (net.input_dim() != 1 || index < 0 || index >= in_dim)
        throw std::invalid_argument("embed_input: need a 1-input net and 0 <= index < in_dim");
    NeuralNet r = net;
    const SparseMat &w = net.layers.front().w;
    std::vector<Eigen::Triplet<double>> t;
    for (int row = 0; row < w.outerSize(); ++row)
        for (SparseMat::InnerIterator it(w, row); it; ++it)
            t.emplace_back(row, index, it.value());
    SparseMat m(w.rows(), in_dim);
    m.setFromTriplets(t.begin(), t.end());
    r.layers.front().w = m;
    return r;
}

NeuralNet build_separable_net(const std::vector<SeparableFactor> &factors, int d, double half_width, double eps)
{
    check_dimension(d);
    if (static_cast<int>(factors.size()) != d)
        throw precondition_error("separable net needs one factor per dimension");
    if (!(eps > 0.0) || eps >= 1.0)
        throw precondition_error("separable net needs eps in (0, 1)");
    const double lo = -half_width, hi = half_width;
    double delta = eps;
    if (d > 1)
        delta = eps / (2.0 * product_error_constant(std::vector<double>(d, 1.0), eps));
    std::vector<NeuralNet> parts;
    for (int i = 0; i < d; ++i) {
        const auto &fac = factors[i];
        NeuralNet one = build_interpolant_net_1d(fac.fn, lo, hi, delta, fac.lipschitz);
        // knots carry the interpolant's extreme values
        for (int s = 0; s <= 4000; ++s) {
            const double x = lo + (hi - lo) * s / 4000.0;
            if (std::abs(fac.fn(x)) > 1.0)
                throw precondition_error("separable factor exceeds 1 in absolute value at x = " + std::to_string(x));
        }
        parts.push_back(embed_input(one, d, i));
    }
    if (d == 1)
        return parts.front();
    return product_of_nets(parts, 1.0, 0.5 * eps);
}

std::vector<Point> lightcone_grid(double t, int d, int grid_n)
{
    check_dimension(d);
    if (grid_n < 1)
        throw precondition_error("grid needs at least one point per axis");
    if (t == 0.0 || grid_n == 1)
        return {Point{0.0, 0.0, 0.0}};
    std::vector<double> axis(grid_n);
    for (int i = 0; i < grid_n; ++i)
        axis[i] = -t + 2.0 * t * i / (grid_n - 1);
    std::vector<Point> pts;
    const int n2 = d >= 2 ? grid_n : 1, n3 = d >= 3 ? grid_n : 1;
    for (int k = 0; k < n3; ++k)
        for (int j = 0; j < n2; ++j)
            for (int i = 0; i < grid_n; ++i) {
                Point x{axis[i], d >= 2 ? axis[j] : 0.0, d >= 3 ? axis[k] : 0.0};
                if (norm(x) <= t * (1.0 + 1e-12))
                    pts.push_back(x);
            }
    return pts;
}

namespace {

Eigen::VectorXd to_vec(const Point &x, int d)
{
    Eigen::VectorXd v(d);
    for (int k = 0; k < d; ++k)
        v(k) = x[k];
    return v;
}

Eigen::VectorXd to_vec_time(double s, const Point &x, int d)
{
    Eigen::VectorXd v(d + 1);
    v(0) = s;
    for (int k = 0; k < d; ++k)
        v(k + 1) = x[k];
    return v;
}

} // namespace

LightconeError verify_lightcone(const NeuralNet &net, const SpaceFn &oracle, double t, int d, int grid_n)
{
    const auto pts = lightcone_grid(t, d, grid_n);
    LightconeError e;
    double sq = 0.0;
    for (const auto &x : pts) {
        const double diff = std::abs(oracle(x) - realize_scalar(net, to_vec(x, d)));
        e.sup = std::max(e.sup, diff);
        sq += diff * diff;
    }
    e.points = static_cast<int>(pts.size());
    e.l2 = std::sqrt(sq / static_cast<double>(pts.size()));
    return e;
}

double data_net_error(const DataNets &nets, const SpaceFn &f, const SpaceTimeFn &c, int d, double T, int grid_n)
{
    check_dimension(d);
    const auto pts = lightcone_grid(2.0 * T * std::sqrt(static_cast<double>(d)), d, grid_n);
    double worst = 0.0;
    for (const auto &x : pts) {
        bool inside = true;
        for (int k = 0; k < d; ++k)
            inside = inside && std::abs(x[k]) <= 2.0 * T;
        if (!inside)
            continue;
        if (f)
            worst = std::max(worst, std::abs(f(x) - realize_scalar(nets.phi_f, to_vec(x, d))));
        if (c)
            for (int s = 0; s <= 4; ++s) {
                const double time = T * s / 4.0;
                worst = std::max(worst, std::abs(c(time, x) - realize_scalar(nets.phi_c, to_vec_time(time, x, d))));
            }
    }
    return worst;
}

namespace {

struct FrozenFactor {
    bool is_f = true;
    double time_arg = 0.0; // argument of c
    Point shift{0.0, 0.0, 0.0};
};

struct FrozenSample {
    double weight = 0.0;
    std::vector<FrozenFactor> factors;
    std::int64_t branches = 0;
    bool alive_ok = true;
};

std::vector<FrozenSample> freeze_linear(const WaveProblem &problem, double t, std::int64_t M, std::uint64_t seed)
{
    const LifetimeLaw law(problem.lambda);
    std::vector<FrozenSample> out(static_cast<std::size_t>(M));
    for (std::int64_t i = 0; i < M; ++i) {
        // same draw order as estimate_linear
        CounterRng rng(seed, static_cast<std::uint64_t>(i));
        const double tau = sample_tau(law, rng);
        const Point z = sample_unit_jump(problem.d, rng);
        FrozenSample &s = out[static_cast<std::size_t>(i)];
        FrozenFactor f;
        if (tau >= t) {
            s.weight = t / rho_bar(t, law);
            f.is_f = true;
            f.shift = axpy(Point{0.0, 0.0, 0.0}, t, z);
        } else {
            s.weight = tau / rho(tau, law);
            f.is_f = false;
            f.time_arg = t - tau;
            f.shift = axpy(Point{0.0, 0.0, 0.0}, tau, z);
        }
        s.factors.push_back(f);
    }
    return out;
}

std::vector<FrozenSample> freeze_branching(const WaveProblem &problem, double t, std::int64_t M, std::uint64_t seed,
                                           std::int64_t cap)
{
    const LifetimeLaw law(problem.lambda);
    std::vector<FrozenSample> out(static_cast<std::size_t>(M));
    for (std::int64_t i = 0; i < M; ++i) {
        const BranchingTree tree = sample_tree(problem, t, Point{0.0, 0.0, 0.0}, seed, static_cast<std::uint64_t>(i), cap);
        if (tree.truncated)
            throw numerical_diagnostic("frozen sample " + std::to_string(i) + " hit the particle cap", 0.0);
        FrozenSample &s = out[static_cast<std::size_t>(i)];
        s.branches = tree.branch_count;
        s.alive_ok = static_cast<std::int64_t>(tree.alive_set.size()) == (problem.p - 1) * tree.branch_count + 1;
        double log_w = 0.0;
        bool zero = false;
        for (const auto &q : tree.particles) {
            if (q.delta == 0.0) {
                zero = true;
                continue;
            }
            FrozenFactor f;
            f.shift = q.position;
            if (q.alive) {
                f.is_f = true;
                log_w += std::log(q.delta) + law.lambda * q.delta;
            } else {
                f.is_f = false;
                f.time_arg = t - q.death_time;
                log_w += std::log(q.delta) + law.lambda * q.delta - std::log(law.lambda);
            }
            s.factors.push_back(f);
        }
        s.weight = zero ? 0.0 : std::exp(log_w);
    }
    return out;
}

std::vector<FrozenSample> freeze(const WaveProblem &problem, double t, std::int64_t M, const DistillOptions &opt)
{
    if (problem.p == 0)
        return freeze_linear(problem, t, M, opt.seed);
    return freeze_branching(problem, t, M, opt.seed, opt.particle_cap);
}

std::int64_t sample_count(double delta)
{
    // smallest integer larger than delta^{-2}; snap values that are integers up to rounding
    const double v = 1.0 / (delta * delta);
    const double r = std::round(v);
    if (std::abs(v - r) <= 1e-9 * v)
        return static_cast<std::int64_t>(r) + 1;
    return static_cast<std::int64_t>(std::floor(v)) + 1;
}

double factor_value(const FrozenFactor &f, const DataNets &data, const Point &x, int d)
{
    const Point y = axpy(x, 1.0, f.shift);
    if (f.is_f)
        return realize_scalar(data.phi_f, to_vec(y, d));
    return realize_scalar(data.phi_c, to_vec_time(f.time_arg, y, d));
}

struct SampleNet {
    bool zero = true;
    NeuralNet net;
    double P_bound = 0.0;
    double H_bound = 0.0;
    double budget = 0.0; // |W_i| times the product accuracy
};

struct Assembly {
    const WaveProblem &problem;
    double t;
    const DataNets &data;
    const DistillOptions &opt;
    double gamma;
    double B_bar;
    std::vector<Eigen::VectorXd> audit_points;
    bool large_R = false;
    std::mutex lock;
};

// P bound after affine_wrap with a shift: first-layer and output biases may become nonzero.
double wrap_bound(double P, const NeuralNet &net)
{
    return P + static_cast<double>(net.layers.front().b.size() + net.layers.back().b.size());
}

SampleNet build_sample(Assembly &as, const FrozenSample &s)
{
    SampleNet out;
    if (s.weight == 0.0)
        return out;
    const int d = as.problem.d;
    const double P_f = static_cast<double>(metrics(as.data.phi_f).P);
    const double P_c = static_cast<double>(metrics(as.data.phi_c).P);
    std::vector<NeuralNet> parts;
    std::vector<double> bounds;
    for (const auto &f : s.factors) {
        const Eigen::VectorXd shift = to_vec(f.shift, d);
        if (f.is_f) {
            if (is_zero_net(as.data.phi_f))
                return out;
            parts.push_back(affine_wrap(as.data.phi_f, 1.0, shift, 0.0));
            bounds.push_back(wrap_bound(P_f, as.data.phi_f));
        } else {
            if (is_zero_net(as.data.phi_c))
                return out;
            const NeuralNet fixed = fix_time(as.data.phi_c, f.time_arg);
            parts.push_back(affine_wrap(fixed, 1.0, shift, 0.0));
            bounds.push_back(wrap_bound(2.0 * P_c + 4.0 * (2 * d + 1), fixed));
        }
    }
    out.zero = false;
    int H_common = 0;
    for (const auto &n : parts)
        H_common = std::max(H_common, n.hidden());
    for (std::size_t i = 0; i < parts.size(); ++i)
        if (parts[i].hidden() < H_common) {
            bounds[i] = 2.0 * bounds[i] + 4.0 * (H_common - parts[i].hidden());
            parts[i] = extend(parts[i], H_common);
        }
    const int k = static_cast<int>(parts.size());
    NeuralNet prod;
    if (as.problem.p == 0) {
        prod = parts.front();
        out.P_bound = bounds.front();
        out.H_bound = H_common;
    } else {
        const double eps_i = as.gamma / std::max(std::abs(s.weight), 1.0);
        prod = product_of_nets(parts, as.B_bar, eps_i, as.audit_points);
        double sum_b = 0.0;
        for (double b : bounds)
            sum_b += b;
        if (k == 1) {
            out.P_bound = 2.0 * 4.0 + 2.0 * sum_b;
            out.H_bound = H_common + 2;
        } else {
            const ProductPlan plan = product_plan(k, H_common, as.B_bar, eps_i);
            out.P_bound = 2.0 * plan.kfold.param_bound + 2.0 * sum_b;
            double h = (k - 2) + H_common + 1;
            for (std::size_t i = 0; i < plan.kfold.stage_R.size(); ++i)
                h += yarotsky_depth_constant() * (std::log(std::ceil(plan.kfold.stage_R[i])) +
                                                  std::log(std::ceil(1.0 / plan.kfold.stage_eps[i])));
            out.H_bound = h;
            out.budget = std::abs(s.weight) * eps_i;
            std::lock_guard<std::mutex> g(as.lock);
            as.large_R = as.large_R || plan.kfold.large_R;
        }
    }
    out.net = affine_wrap(prod, s.weight, Eigen::VectorXd::Zero(d), 0.0);
    out.P_bound += 1.0;
    return out;
}

DistillReport run_distill(const WaveProblem &problem, double t, const DataNets &data, const DistillOptions &opt,
                          const SpaceFn &oracle)
{
    check_dimension(problem.d);
    if (!(opt.eps_target > 0.0) || opt.eps_target > 1.0)
        throw precondition_error("eps_target must lie in (0, 1]");
    if (!(t >= 0.0) || t > problem.T)
        throw precondition_error("distillation time must lie in [0, T]");
    if (opt.workers < 1)
        throw precondition_error("workers must be >= 1");
    const int d = problem.d;
    if (data.phi_f.input_dim() != d || data.phi_c.input_dim() != d + 1)
        throw precondition_error("data nets must take d (f) and d + 1 (c) inputs");

    DistillReport r;
    r.p = problem.p;
    r.d = d;
    r.t = t;
    r.lambda = problem.lambda;
    r.eps_target = opt.eps_target;
    r.delta = 0.5 * opt.eps_target;
    r.gamma = 0.5 * opt.eps_target;
    r.M = sample_count(r.delta);
    r.seed = opt.seed;
    r.depth_constant = yarotsky_depth_constant();
    const NetMetrics mf = metrics(data.phi_f), mc = metrics(data.phi_c);
    r.data_P_f = mf.P;
    r.data_P_c = mc.P;
    r.data_H_f = mf.H;
    r.data_H_c = mc.H;
    r.data_B = static_cast<double>(std::max(mf.P, mc.P)) * r.delta;

    const auto samples = freeze(problem, t, r.M, opt);
    for (const auto &s : samples) {
        r.branch_sum += s.branches;
        r.alive_identity = r.alive_identity && s.alive_ok;
    }
    const double Md = static_cast<double>(r.M);
    if (problem.p == 1)
        r.branch_sum_bound = Md * (1.0 + problem.lambda * problem.T);
    else if (problem.p >= 2)
        r.branch_sum_bound = Md * (1.0 + std::expm1(problem.lambda * t * (problem.p - 1)) / (problem.p - 1));
    else
        r.branch_sum_bound = 0.0;

    Assembly as{problem, t, data, opt, r.gamma, std::max(data.f_sup, data.c_sup) + r.delta, {}, false, {}};
    r.product_bound = as.B_bar;
    for (const auto &x : lightcone_grid(t, d, std::min(opt.grid_n, d == 1 ? 101 : 11)))
        as.audit_points.push_back(to_vec(x, d));
    std::vector<SampleNet> built(samples.size());
    {
        std::atomic<std::size_t> next{0};
        std::exception_ptr failure;
        std::mutex fl;
        auto run = [&]() {
            try {
                for (;;) {
                    const std::size_t i = next.fetch_add(1);
                    if (i >= samples.size())
                        return;
                    built[i] = build_sample(as, samples[i]);
                }
            } catch (...) {
                std::lock_guard<std::mutex> g(fl);
                if (!failure)
                    failure = std::current_exception();
                next.store(samples.size());
            }
        };
        const int n_threads = std::max(1, std::min<int>(opt.workers, static_cast<int>(samples.size())));
        std::vector<std::thread> pool;
        for (int w = 1; w < n_threads; ++w)
            pool.emplace_back(run);
        run();
        for (auto &th : pool)
            th.join();
        if (failure)
            std::rethrow_exception(failure);
    }
    r.large_R = as.large_R;

    int H_max = 0;
    for (const auto &b : built)
        if (!b.zero)
            H_max = std::max(H_max, b.net.hidden());
    std::vector<NeuralNet> nets;
    std::vector<double> coeffs;
    double P_bound = 0.0, H_bound = 0.0, budget = 0.0;
    for (auto &b : built) {
        if (b.zero) {
            ++r.zero_samples;
            continue;
        }
        double pb = b.P_bound;
        if (b.net.hidden() < H_max) {
            pb = 2.0 * pb + 4.0 * (H_max - b.net.hidden());
            b.net = extend(b.net, H_max);
        }
        P_bound += pb;
        H_bound = std::max(H_bound, b.H_bound);
        budget += b.budget;
        nets.push_back(std::move(b.net));
        coeffs.push_back(1.0 / Md);
    }
    r.net = nets.empty() ? zero_net(d) : sum_same_length(nets, coeffs);
    r.param_bound = P_bound;
    r.hidden_bound = nets.empty() ? 1.0 : H_bound;
    r.assembly_budget = budget / Md;

    const NetMetrics m = metrics(r.net);
    r.measured_P = m.P;
    r.measured_H = m.H;
    r.measured_W = m.W;

    const auto grid = lightcone_grid(t, d, opt.grid_n);
    r.grid_points = static_cast<int>(grid.size());
    double dev = 0.0;
    for (const auto &x : grid) {
        const double net_v = realize_scalar(r.net, to_vec(x, d));
        double frozen = 0.0;
        for (const auto &s : samples) {
            if (s.weight == 0.0)
                continue;
            double v = s.weight;
            for (const auto &f : s.factors) {
                v *= factor_value(f, data, x, d);
                if (v == 0.0)
                    break;
            }
            frozen += v;
        }
        dev = std::max(dev, std::abs(net_v - frozen / Md));
    }
    r.assembly_deviation = dev;

    if (oracle) {
        const auto e = verify_lightcone(r.net, oracle, t, d, opt.grid_n);
        r.measured_sup_error = e.sup;
        r.measured_l2_error = e.l2;
    }
    return r;
}

} // namespace

double frozen_estimate(const WaveProblem &problem, double t, const DataNets &data, const DistillOptions &opt,
                       const Point &x)
{
    const std::int64_t M = sample_count(0.5 * opt.eps_target);
    const auto samples = freeze(problem, t, M, opt);
    double acc = 0.0;
    for (const auto &s : samples) {
        double v = s.weight;
        for (const auto &f : s.factors)
            v *= factor_value(f, data, x, problem.d);
        acc += v;
    }
    return acc / static_cast<double>(M);
}

DistillReport distill_linear(const WaveProblem &problem, double t, const DataNets &data, const DistillOptions &opt,
                             const SpaceFn &oracle)
{
    if (problem.p != 0)
        throw precondition_error("distill_linear requires p = 0");
    return run_distill(problem, t, data, opt, oracle);
}

DistillReport distill_perturbative(const WaveProblem &problem, double t, const DataNets &data,
                                   const DistillOptions &opt, const SpaceFn &oracle)
{
    if (problem.p != 1)
        throw precondition_error("distill_perturbative requires p = 1");
    return run_distill(problem, t, data, opt, oracle);
}

DistillReport distill_nonlinear(const WaveProblem &problem, double t, const DataNets &data,
                                const DistillOptions &opt, const SpaceFn &oracle)
{
    if (problem.p < 2)
        throw precondition_error("distill_nonlinear requires p >= 2");
    const auto wp = check_wellposed(problem);
    if (!wp.pass)
        throw precondition_error("ill-posed configuration: max(f_sup, c_sup) = " +
                                 std::to_string(std::max(problem.f_sup, problem.c_sup)) +
                                 " is not below the smallness threshold " + std::to_string(wp.threshold));
    return run_distill(problem, t, data, opt, oracle);
}

DistillReport distill(const WaveProblem &problem, double t, const DataNets &data, const DistillOptions &opt,
                      const SpaceFn &oracle)
{
    if (problem.p == 0)
        return distill_linear(problem, t, data, opt, oracle);
    if (problem.p == 1)
        return distill_perturbative(problem, t, data, opt, oracle);
    return distill_nonlinear(problem, t, data, opt, oracle);
}

nlohmann::json report_to_json(const DistillReport &r)
{
    auto num = [](double v) { return std::isfinite(v) ? nlohmann::json(v) : nlohmann::json(nullptr); };
    nlohmann::json j;
    j["p"] = r.p;
    j["d"] = r.d;
    j["t"] = r.t;
    j["lambda"] = r.lambda;
    j["eps_target"] = r.eps_target;
    j["delta"] = r.delta;
    j["gamma"] = r.gamma;
    j["M"] = r.M;
    j["seed"] = r.seed;
    j["measured_sup_error"] = num(r.measured_sup_error);
    j["measured_l2_error"] = num(r.measured_l2_error);
    j["grid_points"] = r.grid_points;
    j["param_bound"] = r.param_bound;
    j["measured_P"] = r.measured_P;
    j["hidden_bound"] = r.hidden_bound;
    j["measured_H"] = r.measured_H;
    j["measured_W"] = r.measured_W;
    j["assembly_deviation"] = num(r.assembly_deviation);
    j["assembly_budget"] = r.assembly_budget;
    j["product_bound"] = r.product_bound;
    j["large_R_regime"] = r.large_R;
    j["branch_sum"] = r.branch_sum;
    j["branch_sum_bound"] = r.branch_sum_bound;
    j["alive_identity"] = r.alive_identity;
    j["zero_samples"] = r.zero_samples;
    j["data"] = {{"P_f", r.data_P_f}, {"P_c", r.data_P_c}, {"H_f", r.data_H_f}, {"H_c", r.data_H_c},
                 {"alpha", r.data_alpha}, {"B", r.data_B}};
    j["depth_constant"] = r.depth_constant;
    j["audits"] = {{"error", r.error_pass()},     {"params", r.param_pass()},     {"hidden", r.hidden_pass()},
                   {"branches", r.branch_pass()}, {"assembly", r.assembly_pass()}, {"all", r.all_pass()}};
    return j;
}

} // namespace branchwave
