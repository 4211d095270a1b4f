#ifndef BRANCHWAVE_REFERENCE_HPP
#define BRANCHWAVE_REFERENCE_HPP

#include "branchwave/types.hpp"

#include <functional>
#include <vector>

namespace branchwave {

struct QuadratureConfig {
    double abs_tol = 1e-10;
    int max_subdivisions = 48; // recursion depth of adaptive Simpson
    int sphere_points = 2048;  // d = 3 node count; the error estimate compares against a quarter-size rule
};

struct QuadResult {
    double value = 0.0;
    double error_estimate = 0.0;
    bool converged = true;
};

QuadResult adaptive_simpson(const std::function<double(double)> &g, double a, double b, double tol, int max_depth);

// E[g(Z)] for the unit jump law of dimension d.
QuadResult jump_expectation(int d, const std::function<double(const Point &)> &g, const QuadratureConfig &cfg,
                            double tol);

struct SphereNode {
    double w = 0.0;
    Point z{};
};

// Probability rule on the unit sphere with about n nodes: Gauss-Legendre in the height
// times a periodic trapezoid in the azimuth. Antipodal nodes carry equal weights.
std::vector<SphereNode> sphere_rule(int n);

// d = 1: half the integral of f2 over [x-t, x+t] plus the source cone integral.
// F may be empty (zero source). Throws numerical_diagnostic when abs_tol is not reached.
double dalembert(const SpaceFn &f2, const SpaceTimeFn &F, double t, double x,
                 const QuadratureConfig &cfg = QuadratureConfig{});

double duhamel_quadrature(int d, const SpaceFn &f2, const SpaceTimeFn &F, double t, const Point &x,
                          const QuadratureConfig &cfg = QuadratureConfig{});

struct PicardGrid {
    int nt = 41;          // time levels on [0, T]
    int nx = 81;          // nodes per spatial axis
    double radius = 1.0;  // final-time region of interest |x|_inf <= radius
    int z_nodes = 20;     // jump-law rule resolution
};

class PicardSolution {
public:
    int d = 1;
    double T = 0.0;
    PicardGrid grid;
    std::vector<std::vector<double>> levels; // one spatial tensor grid per time level
    std::vector<double> differences;         // sup |U^{k+1} - U^k|
    std::vector<double> contraction;         // successive ratios of differences
    bool converged = false;

    double half_width(int level) const;
    double at_level(int level, const Point &x) const;
    double operator()(double t, const Point &x) const;
};

// Fixed point of U = U_lin + Duhamel(c U^p) on a space-time tensor grid.
PicardSolution picard_nonlinear(int p, const SpaceTimeFn &c, const SpaceFn &f2, double T_small,
                                const PicardGrid &grid, int iterations, int d, double tol = 1e-13);

} // namespace branchwave

#endif
