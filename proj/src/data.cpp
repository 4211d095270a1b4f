#include "branchwave/data.hpp"

#include <cmath>

namespace branchwave {

void check_named(const NamedData &g)
{
    if (g.name != "cos" && g.name != "gauss" && g.name != "const" && g.name != "zero")
        throw precondition_error("unknown data function '" + g.name + "' (expected cos, gauss, const or zero)");
    if (!std::isfinite(g.scale))
        throw precondition_error("data scale must be finite");
}

SpaceFn named_function(const NamedData &g, int d)
{
    check_named(g);
    check_dimension(d);
    const double s = g.scale;
    if (g.name == "cos")
        return [s, d](const Point &x) {
            double v = s;
            for (int k = 0; k < d; ++k)
                v *= std::cos(x[k]);
            return v;
        };
    if (g.name == "gauss")
        return [s, d](const Point &x) {
            double r2 = 0.0;
            for (int k = 0; k < d; ++k)
                r2 += x[k] * x[k];
            return s * std::exp(-r2);
        };
    if (g.name == "const")
        return [s](const Point &) { return s; };
    return [](const Point &) { return 0.0; };
}

SpaceTimeFn named_space_time(const NamedData &g, int d)
{
    SpaceFn f = named_function(g, d);
    return [f](double, const Point &x) { return f(x); };
}

double named_sup(const NamedData &g)
{
    check_named(g);
    return g.name == "zero" ? 0.0 : std::abs(g.scale);
}

NeuralNet named_data_net(const NamedData &g, int d, double half_width, double eps)
{
    check_named(g);
    check_dimension(d);
    if (g.name == "zero" || g.scale == 0.0)
        return zero_net(d);
    const double s = std::abs(g.scale);
    const double sign = g.scale < 0.0 ? -1.0 : 1.0;
    NeuralNet unit;
    const double unit_eps = std::min(eps / s, 0.5);
    if (g.name == "const") {
        unit = affine_wrap(zero_net(d), 1.0, Eigen::VectorXd::Zero(d), 1.0);
    } else {
        std::vector<SeparableFactor> factors;
        for (int k = 0; k < d; ++k) {
            if (g.name == "cos")
                factors.push_back({[](double x) { return std::cos(x); }, 1.0});
            else
                factors.push_back({[](double x) { return std::exp(-x * x); }, std::sqrt(2.0 / std::exp(1.0))});
        }
        unit = build_separable_net(factors, d, half_width, unit_eps);
    }
    return affine_wrap(unit, sign * s, Eigen::VectorXd::Zero(d), 0.0);
}

NeuralNet ignore_first_input(const NeuralNet &net)
{
    NeuralNet r = net;
    const SparseMat &w = net.layers.front().w;
    std::vector<Eigen::Triplet<double>> t;
    for (int row = 0; row < w.outerSize(); ++row)
        for (SparseMat::InnerIterator it(w, row); it; ++it)
            t.emplace_back(row, static_cast<int>(it.col()) + 1, it.value());
    SparseMat m(w.rows(), w.cols() + 1);
    m.setFromTriplets(t.begin(), t.end());
    r.layers.front().w = m;
    return r;
}

DataNets make_data_nets(const NamedData &f, const NamedData &c, int d, double T, double eps_data)
{
    DataNets nets;
    nets.phi_f = named_data_net(f, d, 2.0 * T, eps_data);
    nets.phi_c = ignore_first_input(named_data_net(c, d, 2.0 * T, eps_data));
    nets.eps_data = eps_data;
    nets.f_sup = named_sup(f);
    nets.c_sup = named_sup(c);
    return nets;
}

} // namespace branchwave
