#include "branchwave/data.hpp"
#include "branchwave/distill.hpp"
#include "branchwave/reference.hpp"
#include "branchwave/serialize.hpp"

#include "doctest.h"

#include <cmath>

using namespace branchwave;
using Eigen::VectorXd;

namespace {

double eval1(const NeuralNet &net, double x)
{
    return realize_scalar(net, VectorXd::Constant(1, x));
}

WaveProblem problem_from(const NamedData &f, const NamedData &c, int p, int d, double T)
{
    WaveProblem pr;
    pr.d = d;
    pr.T = T;
    pr.lambda = 1.0;
    pr.p = p;
    pr.f = named_function(f, d);
    pr.c = named_space_time(c, d);
    pr.F_lin = pr.c;
    pr.f_sup = named_sup(f);
    pr.c_sup = named_sup(c);
    return pr;
}

} // namespace

TEST_CASE("one-dimensional interpolants")
{
    const auto lin = build_interpolant_net_1d([](double x) { return 3.0 * x - 1.0; }, -2.0, 2.0, 1e-3, 3.0);
    // only the end knots carry slope changes
    CHECK(lin.layers.front().w.rows() == 2);
    for (int i = 0; i <= 100; ++i) {
        const double x = -2.0 + 0.04 * i;
        CHECK(std::abs(eval1(lin, x) - (3.0 * x - 1.0)) <= 1e-12);
    }

    const auto c = build_interpolant_net_1d([](double x) { return std::cos(x); }, -2.0, 2.0, 1e-2, 1.0);
    double worst = 0.0;
    for (int i = 0; i < 10000; ++i) {
        const double x = -2.0 + 4.0 * i / 9999.0;
        worst = std::max(worst, std::abs(eval1(c, x) - std::cos(x)));
    }
    CHECK(worst <= 1e-2);
    // flat outside the interval
    CHECK(eval1(c, 5.0) == doctest::Approx(std::cos(2.0)).epsilon(1e-12));

    const auto a = build_interpolant_net_1d([](double x) { return std::abs(x); }, -1.0, 1.0, 0.5, 1.0);
    for (int i = 0; i <= 200; ++i) {
        const double x = -1.0 + 0.01 * i;
        CHECK(std::abs(eval1(a, x) - std::abs(x)) <= 1e-15);
    }
    CHECK_THROWS_AS(build_interpolant_net_1d([](double x) { return x; }, 0.0, 1.0, 0.1, -1.0), precondition_error);
    CHECK_THROWS_AS(build_interpolant_net_1d([](double x) { return x; }, 0.0, 1.0, 0.1, INFINITY), precondition_error);
}

TEST_CASE("separable nets")
{
    const SeparableFactor unit{[](double) { return 1.0; }, 0.0};
    for (int d = 1; d <= 3; ++d) {
        const auto net = build_separable_net(std::vector<SeparableFactor>(d, unit), d, 1.0, 0.05);
        for (int i = 0; i < 200; ++i) {
            VectorXd x = VectorXd::Random(d);
            CHECK(std::abs(realize_scalar(net, x) - 1.0) <= 0.05);
        }
    }
    const SeparableFactor cosf{[](double x) { return std::cos(x); }, 1.0};
    const auto cc = build_separable_net({cosf, cosf}, 2, 1.0, 5e-2);
    double worst = 0.0;
    for (int i = 0; i <= 100; ++i)
        for (int j = 0; j <= 100; ++j) {
            const double x = -1.0 + 0.02 * i, y = -1.0 + 0.02 * j;
            worst = std::max(worst, std::abs(realize_scalar(cc, VectorXd{{x, y}}) - std::cos(x) * std::cos(y)));
        }
    CHECK(worst <= 5e-2);
    const SeparableFactor big{[](double x) { return 1.5 * std::cos(x); }, 1.5};
    CHECK_THROWS_AS(build_separable_net({big, cosf}, 2, 1.0, 5e-2), precondition_error);
}

TEST_CASE("named data nets")
{
    for (int d = 1; d <= 3; ++d)
        for (const char *name : {"cos", "gauss", "const", "zero"}) {
            const NamedData f{name, 0.7}, c{name, -0.3};
            const double T = 0.5, eps = 0.05;
            const auto nets = make_data_nets(f, c, d, T, eps);
            CHECK(nets.phi_f.input_dim() == d);
            CHECK(nets.phi_c.input_dim() == d + 1);
            const double err =
                data_net_error(nets, named_function(f, d), named_space_time(c, d), d, T, d == 1 ? 201 : 15);
            CHECK_MESSAGE(err <= eps, name << " d " << d << " err " << err);
        }
    CHECK(is_zero_net(named_data_net({"zero", 1.0}, 2, 1.0, 0.1)));
    CHECK(!is_zero_net(named_data_net({"const", 1.0}, 2, 1.0, 0.1)));
    CHECK_THROWS_AS(check_named({"sinc", 1.0}), precondition_error);
}

TEST_CASE("light-cone verification")
{
    const auto net = build_interpolant_net_1d([](double x) { return std::sin(x); }, -1.0, 1.0, 1e-3, 1.0);
    SpaceFn oracle = [](const Point &x) { return std::sin(x[0]); };
    const auto e = verify_lightcone(net, oracle, 1.0, 1, 201);
    CHECK(e.sup <= 1e-3);
    CHECK(e.l2 <= e.sup);
    CHECK(e.points == 201);

    const auto z = verify_lightcone(net, oracle, 0.0, 1, 51);
    CHECK(z.points == 1);
    CHECK(z.sup == std::abs(std::sin(0.0) - eval1(net, 0.0)));

    // Lipschitz oracle against a net that is off by a smooth amount
    SpaceFn bumpy = [](const Point &x) { return std::sin(x[0]) + 0.3 * std::cos(2.0 * x[0]); };
    const double coarse = verify_lightcone(net, bumpy, 1.0, 1, 51).sup;
    const double fine = verify_lightcone(net, bumpy, 1.0, 1, 201).sup;
    CHECK(std::abs(fine - coarse) <= 0.1 * fine);

    const auto g2 = lightcone_grid(1.0, 2, 11);
    for (const auto &x : g2)
        CHECK(norm(x) <= 1.0 + 1e-12);
    CHECK(g2.size() > 50);
}

TEST_CASE("linear distillation with constant data")
{
    const double kappa = 0.8, t = 0.6;
    const auto pr = problem_from({"const", kappa}, {"zero", 0.0}, 0, 1, 1.0);
    const auto data = make_data_nets({"const", kappa}, {"zero", 0.0}, 1, 1.0, 0.05);
    DistillOptions opt;
    opt.eps_target = 0.1;
    opt.seed = 11;
    const auto r = distill_linear(pr, t, data, opt, [&](const Point &) { return kappa * t; });
    CHECK(r.M == 401);
    std::int64_t survivors = 0;
    const LifetimeLaw law(1.0);
    for (std::int64_t i = 0; i < r.M; ++i) {
        CounterRng rng(11, static_cast<std::uint64_t>(i));
        if (sample_tau(law, rng) >= t)
            ++survivors;
    }
    const double want = kappa * t * std::exp(t) * static_cast<double>(survivors) / static_cast<double>(r.M);
    for (double x : {-0.6, -0.1, 0.0, 0.35, 0.6})
        CHECK(std::abs(eval1(r.net, x) - want) <= 1e-12);
    CHECK(r.zero_samples == r.M - survivors);
    CHECK(r.param_pass());
    CHECK(r.hidden_pass());
    CHECK(r.assembly_pass());
    CHECK(r.measured_sup_error == doctest::Approx(std::abs(want - kappa * t)).epsilon(1e-9));
}

TEST_CASE("zero coefficient reduces to the linear distillation")
{
    const double t = 0.5;
    const auto lin_pr = problem_from({"cos", 1.0}, {"zero", 0.0}, 0, 1, 1.0);
    const auto per_pr = problem_from({"cos", 1.0}, {"zero", 0.0}, 1, 1, 1.0);
    const auto data = make_data_nets({"cos", 1.0}, {"zero", 0.0}, 1, 1.0, 0.05);
    DistillOptions opt;
    opt.eps_target = 0.2;
    opt.seed = 3;
    const auto a = distill_linear(lin_pr, t, data, opt);
    const auto b = distill_perturbative(per_pr, t, data, opt);
    double worst = 0.0;
    for (const auto &x : lightcone_grid(t, 1, 101))
        worst = std::max(worst, std::abs(eval1(a.net, x[0]) - eval1(b.net, x[0])));
    CHECK(worst <= 1e-9);
    CHECK(b.param_pass());
    CHECK(b.hidden_pass());
    CHECK(b.assembly_pass());
}

TEST_CASE("distillation is reproducible and matches the frozen estimator")
{
    const auto pr = problem_from({"cos", 0.5}, {"cos", 0.2}, 1, 1, 0.5);
    const auto data = make_data_nets({"cos", 0.5}, {"cos", 0.2}, 1, 0.5, 0.05);
    DistillOptions opt;
    opt.eps_target = 0.2;
    opt.seed = 5;
    opt.grid_n = 41;
    const auto a = distill(pr, 0.5, data, opt);
    opt.workers = 4;
    const auto b = distill(pr, 0.5, data, opt);
    CHECK(bit_equal(a.net, b.net));
    CHECK(a.measured_P == b.measured_P);
    CHECK(report_to_json(a).dump() == report_to_json(b).dump());
    CHECK(a.assembly_pass());
    for (double x : {-0.3, 0.0, 0.4}) {
        const double fz = frozen_estimate(pr, 0.5, data, opt, Point{x, 0, 0});
        CHECK(std::abs(eval1(a.net, x) - fz) <= a.assembly_budget + 1e-9);
    }
    opt.seed = 6;
    const auto c = distill(pr, 0.5, data, opt);
    CHECK(!bit_equal(a.net, c.net));

    DistillOptions bad = opt;
    bad.eps_target = 0.0;
    CHECK_THROWS_AS(distill(pr, 0.5, data, bad), precondition_error);
    CHECK_THROWS_AS(distill(pr, 0.7, data, opt), precondition_error);
}

TEST_CASE("two-dimensional linear distillation")
{
    const double t = 0.4;
    const auto pr = problem_from({"cos", 1.0}, {"zero", 0.0}, 0, 2, 0.5);
    const auto data = make_data_nets({"cos", 1.0}, {"zero", 0.0}, 2, 0.5, 0.05);
    DistillOptions opt;
    opt.eps_target = 0.2;
    opt.grid_n = 11;
    opt.workers = 2;
    SpaceFn f = pr.f;
    const auto r = distill_linear(pr, t, data, opt, [&](const Point &x) { return duhamel_quadrature(2, f, {}, t, x); });
    CHECK(r.all_pass());
    CHECK(r.measured_sup_error <= 0.2);
}

TEST_CASE("ill-posed nonlinear distillation is refused")
{
    const auto pr = problem_from({"cos", 5.0}, {"cos", 5.0}, 2, 1, 0.5);
    const auto data = make_data_nets({"cos", 5.0}, {"cos", 5.0}, 1, 0.5, 0.05);
    CHECK_THROWS_AS(distill_nonlinear(pr, 0.5, data, DistillOptions{}), precondition_error);
}
