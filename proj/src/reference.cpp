#include "branchwave/reference.hpp"

#include <boost/math/quadrature/gauss.hpp>
#include <boost/math/special_functions/legendre.hpp>

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace branchwave {

namespace {

struct SimpsonState {
    const std::function<double(double)> &g;
    double error = 0.0;
    bool ok = true;
};

double simpson_rec(SimpsonState &st, double a, double b, double fa, double fm, double fb, double whole, double tol,
                   int depth)
{
    const double m = 0.5 * (a + b);
    const double lm = 0.5 * (a + m), rm = 0.5 * (m + b);
    const double flm = st.g(lm), frm = st.g(rm);
    const double left = (m - a) / 6.0 * (fa + 4.0 * flm + fm);
    const double right = (b - m) / 6.0 * (fm + 4.0 * frm + fb);
    const double delta = left + right - whole;
    if (std::abs(delta) <= 15.0 * tol || depth <= 0) {
        if (std::abs(delta) > 15.0 * tol)
            st.ok = false;
        st.error += std::abs(delta) / 15.0;
        return left + right + delta / 15.0;
    }
    return simpson_rec(st, a, m, fa, flm, fm, left, 0.5 * tol, depth - 1) +
           simpson_rec(st, m, b, fm, frm, fb, right, 0.5 * tol, depth - 1);
}

// Periodic trapezoid on [0, 2 pi), doubled until successive values agree.
QuadResult circle_average(const std::function<double(double)> &g, double tol)
{
    int n = 8;
    auto rule = [&](int k) {
        double s = 0.0;
        for (int i = 0; i < k; ++i)
            s += g(2.0 * M_PI * i / k);
        return s / k;
    };
    double prev = rule(n);
    for (n = 16; n <= (1 << 14); n *= 2) {
        const double cur = rule(n);
        if (std::abs(cur - prev) <= tol)
            return {cur, std::abs(cur - prev), true};
        prev = cur;
    }
    return {prev, tol, false};
}

void require(const QuadResult &r, const char *what)
{
    if (!r.converged)
        throw numerical_diagnostic(std::string(what) + ": quadrature tolerance not reached", r.error_estimate);
}

} // namespace

QuadResult adaptive_simpson(const std::function<double(double)> &g, double a, double b, double tol, int max_depth)
{
    if (!(tol > 0.0))
        throw precondition_error("adaptive_simpson: tolerance must be positive");
    if (a == b)
        return {};
    SimpsonState st{g};
    // a few initial panels so symmetric integrands cannot fool the first estimate
    constexpr int panels = 4;
    double total = 0.0;
    const double h = (b - a) / panels;
    double fa = g(a);
    for (int i = 0; i < panels; ++i) {
        const double lo = a + i * h, hi = (i + 1 == panels) ? b : a + (i + 1) * h;
        const double mid = 0.5 * (lo + hi);
        const double fm = g(mid), fb = g(hi);
        const double whole = (hi - lo) / 6.0 * (fa + 4.0 * fm + fb);
        total += simpson_rec(st, lo, hi, fa, fm, fb, whole, tol / panels, max_depth);
        fa = fb;
    }
    return {total, st.error, st.ok};
}

std::vector<SphereNode> sphere_rule(int n)
{
    const int nz = std::max(2, static_cast<int>(std::sqrt(0.5 * n)));
    const int nphi = 2 * nz;
    const auto zeros = boost::math::legendre_p_zeros<double>(nz);
    std::vector<double> z, wz;
    for (double x : zeros) {
        const double dp = boost::math::legendre_p_prime(nz, x);
        const double w = 2.0 / ((1.0 - x * x) * dp * dp);
        z.push_back(x);
        wz.push_back(w);
        if (x != 0.0) {
            z.push_back(-x);
            wz.push_back(w);
        }
    }
    std::vector<SphereNode> rule;
    rule.reserve(z.size() * nphi);
    for (std::size_t i = 0; i < z.size(); ++i) {
        const double r = std::sqrt(std::max(0.0, 1.0 - z[i] * z[i]));
        for (int k = 0; k < nphi; ++k) {
            const double a = 2.0 * M_PI * k / nphi;
            rule.push_back({0.5 * wz[i] / nphi, {r * std::cos(a), r * std::sin(a), z[i]}});
        }
    }
    return rule;
}

QuadResult jump_expectation(int d, const std::function<double(const Point &)> &g, const QuadratureConfig &cfg,
                            double tol)
{
    check_dimension(d);
    switch (d) {
    case 1: {
        auto r = adaptive_simpson([&](double z) { return g(Point{z, 0.0, 0.0}); }, -1.0, 1.0, 2.0 * tol,
                                  cfg.max_subdivisions);
        r.value *= 0.5;
        r.error_estimate *= 0.5;
        return r;
    }
    case 2: {
        // |z| = sin(theta) removes the (1 - |z|^2)^{-1/2} singularity of the density
        bool inner_ok = true;
        double inner_err = 0.0;
        auto radial = [&](double theta) {
            const double r = std::sin(theta);
            auto ring = circle_average([&](double phi) { return g(Point{r * std::cos(phi), r * std::sin(phi), 0.0}); },
                                       0.5 * tol);
            inner_ok = inner_ok && ring.converged;
            inner_err = std::max(inner_err, ring.error_estimate);
            return r * ring.value;
        };
        auto r = adaptive_simpson(radial, 0.0, 0.5 * M_PI, 0.5 * tol, cfg.max_subdivisions);
        r.converged = r.converged && inner_ok;
        r.error_estimate += inner_err;
        return r;
    }
    default: {
        auto apply = [&](int n) {
            double s = 0.0;
            for (const auto &q : sphere_rule(n))
                s += q.w * g(q.z);
            return s;
        };
        const double fine = apply(cfg.sphere_points);
        const double err = std::abs(fine - apply(cfg.sphere_points / 4));
        return {fine, err, err <= tol};
    }
    }
}

double dalembert(const SpaceFn &f2, const SpaceTimeFn &F, double t, double x, const QuadratureConfig &cfg)
{
    if (t < 0.0)
        throw precondition_error("dalembert: negative time");
    if (t == 0.0)
        return 0.0;
    const double tol = cfg.abs_tol;
    double value = 0.0;
    if (f2) {
        auto r = adaptive_simpson([&](double y) { return f2(Point{y, 0.0, 0.0}); }, x - t, x + t, tol,
                                  cfg.max_subdivisions);
        require(r, "dalembert");
        value += 0.5 * r.value;
    }
    if (F) {
        const double inner_tol = tol / std::max(1.0, t);
        bool ok = true;
        double worst = 0.0;
        auto slice = [&](double s) {
            const double h = t - s;
            if (h <= 0.0)
                return 0.0;
            auto r = adaptive_simpson([&](double y) { return F(s, Point{y, 0.0, 0.0}); }, x - h, x + h, inner_tol,
                                      cfg.max_subdivisions);
            ok = ok && r.converged;
            worst = std::max(worst, r.error_estimate);
            return r.value;
        };
        auto r = adaptive_simpson(slice, 0.0, t, tol, cfg.max_subdivisions);
        r.converged = r.converged && ok;
        r.error_estimate += worst * t;
        require(r, "dalembert");
        value += 0.5 * r.value;
    }
    return value;
}

double duhamel_quadrature(int d, const SpaceFn &f2, const SpaceTimeFn &F, double t, const Point &x,
                          const QuadratureConfig &cfg)
{
    check_dimension(d);
    if (t < 0.0)
        throw precondition_error("duhamel_quadrature: negative time");
    if (t == 0.0)
        return 0.0;
    const double tol = cfg.abs_tol;
    double value = 0.0;
    if (f2) {
        auto r = jump_expectation(d, [&](const Point &z) { return f2(axpy(x, t, z)); }, cfg, tol / std::max(1.0, t));
        require(r, "duhamel_quadrature");
        value += t * r.value;
    }
    if (F) {
        const double inner_tol = tol / std::max(1.0, t * t);
        bool ok = true;
        double worst = 0.0;
        auto slice = [&](double s) {
            const double h = t - s;
            if (h <= 0.0)
                return 0.0;
            auto r = jump_expectation(d, [&](const Point &z) { return F(s, axpy(x, h, z)); }, cfg, inner_tol);
            ok = ok && r.converged;
            worst = std::max(worst, r.error_estimate);
            return h * r.value;
        };
        auto r = adaptive_simpson(slice, 0.0, t, tol, cfg.max_subdivisions);
        r.converged = r.converged && ok;
        r.error_estimate += worst * t * t;
        require(r, "duhamel_quadrature");
        value += r.value;
    }
    return value;
}

namespace {

struct WeightedNode {
    double w;
    Point z;
};

std::vector<WeightedNode> jump_rule(int d, int angular)
{
    using gl = boost::math::quadrature::gauss<double, 20>;
    std::vector<double> u, wu;
    for (std::size_t i = 0; i < gl::abscissa().size(); ++i) {
        const double a = gl::abscissa()[i], w = gl::weights()[i];
        u.push_back(a);
        wu.push_back(w);
        if (a != 0.0) {
            u.push_back(-a);
            wu.push_back(w);
        }
    }
    std::vector<WeightedNode> rule;
    if (d == 1) {
        for (std::size_t i = 0; i < u.size(); ++i)
            rule.push_back({0.5 * wu[i], {u[i], 0.0, 0.0}});
    } else if (d == 2) {
        for (std::size_t i = 0; i < u.size(); ++i) {
            const double theta = 0.25 * M_PI * (1.0 + u[i]);
            const double wt = 0.25 * M_PI * wu[i] * std::sin(theta);
            const double r = std::sin(theta);
            for (int k = 0; k < angular; ++k) {
                const double phi = 2.0 * M_PI * k / angular;
                rule.push_back({wt / angular, {r * std::cos(phi), r * std::sin(phi), 0.0}});
            }
        }
    } else {
        for (const auto &q : sphere_rule(2 * angular * angular))
            rule.push_back({q.w, q.z});
    }
    return rule;
}

std::size_t node_count(int d, int nx)
{
    std::size_t n = 1;
    for (int k = 0; k < d; ++k)
        n *= static_cast<std::size_t>(nx);
    return n;
}

} // namespace

double PicardSolution::half_width(int level) const
{
    const double s = T * level / (grid.nt - 1);
    return grid.radius + T - s;
}

double PicardSolution::at_level(int level, const Point &x) const
{
    const auto &u = levels[static_cast<std::size_t>(level)];
    const double L = half_width(level);
    const int n = grid.nx;
    int base[3] = {0, 0, 0};
    double frac[3] = {0.0, 0.0, 0.0};
    for (int k = 0; k < d; ++k) {
        double pos = (x[k] + L) / (2.0 * L) * (n - 1);
        pos = std::clamp(pos, 0.0, static_cast<double>(n - 1));
        int i0 = std::min(static_cast<int>(std::floor(pos)), n - 2);
        base[k] = i0;
        frac[k] = pos - i0;
    }
    double v = 0.0;
    const int corners = 1 << d;
    for (int c = 0; c < corners; ++c) {
        double w = 1.0;
        std::size_t idx = 0, stride = 1;
        for (int k = 0; k < d; ++k) {
            const int bit = (c >> k) & 1;
            w *= bit ? frac[k] : 1.0 - frac[k];
            idx += static_cast<std::size_t>(base[k] + bit) * stride;
            stride *= static_cast<std::size_t>(n);
        }
        if (w != 0.0)
            v += w * u[idx];
    }
    return v;
}

double PicardSolution::operator()(double t, const Point &x) const
{
    if (t < 0.0 || t > T * (1.0 + 1e-12))
        throw precondition_error("Picard solution queried outside [0, T]");
    if (T == 0.0)
        return 0.0;
    const double pos = std::min(t / T * (grid.nt - 1), static_cast<double>(grid.nt - 1));
    const int l0 = std::min(static_cast<int>(std::floor(pos)), grid.nt - 2);
    const double w = pos - l0;
    if (w == 0.0)
        return at_level(l0, x);
    if (w == 1.0)
        return at_level(l0 + 1, x);
    return (1.0 - w) * at_level(l0, x) + w * at_level(l0 + 1, x);
}

PicardSolution picard_nonlinear(int p, const SpaceTimeFn &c, const SpaceFn &f2, double T_small,
                                const PicardGrid &grid, int iterations, int d, double tol)
{
    check_dimension(d);
    if (p < 1)
        throw precondition_error("picard_nonlinear: p must be >= 1");
    if (!(T_small >= 0.0))
        throw precondition_error("picard_nonlinear: T must be nonnegative");
    if (grid.nt < 2 || grid.nx < 2 || iterations < 1)
        throw precondition_error("picard_nonlinear: grid needs nt, nx >= 2 and iterations >= 1");

    PicardSolution sol;
    sol.d = d;
    sol.T = T_small;
    sol.grid = grid;
    const auto rule = jump_rule(d, grid.z_nodes);
    const std::size_t nodes = node_count(d, grid.nx);
    const double dt = T_small / (grid.nt - 1);

    auto node_point = [&](int level, std::size_t idx) {
        const double L = sol.half_width(level);
        Point x{0.0, 0.0, 0.0};
        for (int k = 0; k < d; ++k) {
            const std::size_t j = idx % static_cast<std::size_t>(grid.nx);
            idx /= static_cast<std::size_t>(grid.nx);
            x[k] = -L + 2.0 * L * static_cast<double>(j) / (grid.nx - 1);
        }
        return x;
    };

    std::vector<std::vector<double>> lin(grid.nt, std::vector<double>(nodes, 0.0));
    for (int l = 0; l < grid.nt; ++l) {
        const double s = dt * l;
        for (std::size_t i = 0; i < nodes; ++i) {
            const Point x = node_point(l, i);
            double e = 0.0;
            for (const auto &q : rule)
                e += q.w * f2(axpy(x, s, q.z));
            lin[l][i] = s * e;
        }
    }

    sol.levels = lin;
    double prev_diff = 0.0;
    for (int it = 0; it < iterations; ++it) {
        auto next = lin;
        for (int li = 1; li < grid.nt; ++li) {
            const double si = dt * li;
            for (std::size_t i = 0; i < nodes; ++i) {
                const Point x = node_point(li, i);
                double acc = 0.0;
                for (int l = 0; l < li; ++l) {
                    const double sl = dt * l;
                    const double h = si - sl;
                    double e = 0.0;
                    for (const auto &q : rule) {
                        const Point y = axpy(x, h, q.z);
                        const double cv = c(sl, y);
                        if (cv == 0.0)
                            continue;
                        e += q.w * cv * std::pow(sol.at_level(l, y), p);
                    }
                    // trapezoid in time; the endpoint l = li carries a zero factor
                    acc += (l == 0 ? 0.5 : 1.0) * dt * h * e;
                }
                next[li][i] += acc;
            }
        }
        double diff = 0.0;
        for (int l = 0; l < grid.nt; ++l)
            for (std::size_t i = 0; i < nodes; ++i)
                diff = std::max(diff, std::abs(next[l][i] - sol.levels[l][i]));
        sol.levels = std::move(next);
        sol.differences.push_back(diff);
        if (it > 0 && prev_diff > 0.0)
            sol.contraction.push_back(diff / prev_diff);
        if (diff <= tol) {
            sol.converged = true;
            break;
        }
        if (it > 0 && prev_diff > 0.0 && diff >= prev_diff)
            throw numerical_diagnostic("Picard iteration does not contract", diff);
        prev_diff = diff;
    }
    return sol;
}

} // namespace branchwave
