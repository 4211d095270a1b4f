#include "branchwave/kernels.hpp"

#include <stdexcept>

namespace branchwave {

double rho(double t, const LifetimeLaw &law)
{
    if (t < 0.0)
        throw std::domain_error("rho: negative time");
    return law.lambda * std::exp(-law.lambda * t);
}

double rho_bar(double t, const LifetimeLaw &law)
{
    if (t < 0.0)
        throw std::domain_error("rho_bar: negative time");
    return std::exp(-law.lambda * t);
}

double sample_tau(const LifetimeLaw &law, CounterRng &rng)
{
    return -std::log(rng.uniform_pos()) / law.lambda;
}

Point sample_unit_jump(int d, CounterRng &rng)
{
    check_dimension(d);
    switch (d) {
    case 1:
        return {2.0 * rng.uniform() - 1.0, 0.0, 0.0};
    case 2: {
        // inverse of the radial CDF 1 - sqrt(1 - r^2)
        const double u = rng.uniform();
        const double r = std::sqrt(u * (2.0 - u));
        const double a = 2.0 * M_PI * rng.uniform();
        return {r * std::cos(a), r * std::sin(a), 0.0};
    }
    default: {
        Point g;
        double n = 0.0;
        do {
            g = {rng.normal(), rng.normal(), rng.normal()};
            n = norm(g);
        } while (n == 0.0);
        return {g[0] / n, g[1] / n, g[2] / n};
    }
    }
}

double green_mass(double t)
{
    return t;
}

Point sample_position(const Point &x, double t, int d, CounterRng &rng)
{
    if (t < 0.0)
        throw std::domain_error("sample_position: negative time");
    Point z = sample_unit_jump(d, rng);
    Point y = axpy(x, t, z);
    // rounding in x + t z can push the displacement past t; shrink z by ulps until it fits
    for (;;) {
        const Point diff{y[0] - x[0], y[1] - x[1], y[2] - x[2]};
        if (norm(diff) <= t)
            return y;
        for (double &c : z)
            c = std::nextafter(c, 0.0) * (1.0 - 1e-15);
        y = axpy(x, t, z);
    }
}

double unit_jump_radial_cdf(int d, double r)
{
    check_dimension(d);
    if (r <= 0.0)
        return 0.0;
    if (r >= 1.0)
        return 1.0;
    switch (d) {
    case 1:
        return r;
    case 2:
        return 1.0 - std::sqrt(1.0 - r * r);
    default:
        return 0.0;
    }
}

} // namespace branchwave
