#ifndef BRANCHWAVE_KERNELS_HPP
#define BRANCHWAVE_KERNELS_HPP

#include "branchwave/rng.hpp"
#include "branchwave/types.hpp"

namespace branchwave {

// Exponential lifetime law with rate lambda.
struct LifetimeLaw {
    double lambda = 1.0;

    explicit LifetimeLaw(double rate = 1.0) : lambda(rate)
    {
        if (!(rate > 0.0) || !std::isfinite(rate))
            throw precondition_error("lifetime rate must be positive and finite");
    }
};

double rho(double t, const LifetimeLaw &law);
double rho_bar(double t, const LifetimeLaw &law);
double sample_tau(const LifetimeLaw &law, CounterRng &rng);

// d=1: uniform on [-1,1]; d=2: density (2 pi)^-1 (1-|z|^2)^-1/2 on the disk;
// d=3: uniform on the unit sphere.
Point sample_unit_jump(int d, CounterRng &rng);

// Total mass of the velocity kernel at time t.
double green_mass(double t);

// x + t Z.
Point sample_position(const Point &x, double t, int d, CounterRng &rng);

// Radial CDF P(|Z| <= r) of the unit jump.
double unit_jump_radial_cdf(int d, double r);

} // namespace branchwave

#endif
