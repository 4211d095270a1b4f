#include "branchwave/relu.hpp"
#include "branchwave/types.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace branchwave {

namespace {

using Trip = Eigen::Triplet<double>;

void put(std::vector<Trip> &out, const SparseMat &m, int row_off, int col_off, double scale = 1.0)
{
    for (int r = 0; r < m.outerSize(); ++r)
        for (SparseMat::InnerIterator it(m, r); it; ++it)
            if (it.value() * scale != 0.0)
                out.emplace_back(row_off + r, col_off + static_cast<int>(it.col()), it.value() * scale);
}

SparseMat build(int rows, int cols, const std::vector<Trip> &trips)
{
    SparseMat m(rows, cols);
    m.setFromTriplets(trips.begin(), trips.end());
    m.prune([](Eigen::Index, Eigen::Index, const double &v) { return v != 0.0; });
    m.makeCompressed();
    return m;
}

SparseMat scaled(const SparseMat &m, double s)
{
    std::vector<Trip> t;
    put(t, m, 0, 0, s);
    return build(static_cast<int>(m.rows()), static_cast<int>(m.cols()), t);
}

// [m; -m]
SparseMat doubled_rows(const SparseMat &m)
{
    std::vector<Trip> t;
    put(t, m, 0, 0);
    put(t, m, static_cast<int>(m.rows()), 0, -1.0);
    return build(2 * static_cast<int>(m.rows()), static_cast<int>(m.cols()), t);
}

// [m, -m]
SparseMat doubled_cols(const SparseMat &m)
{
    std::vector<Trip> t;
    put(t, m, 0, 0);
    put(t, m, 0, static_cast<int>(m.cols()), -1.0);
    return build(static_cast<int>(m.rows()), 2 * static_cast<int>(m.cols()), t);
}

SparseMat dense_to_sparse(const Eigen::MatrixXd &m)
{
    std::vector<Trip> t;
    for (int i = 0; i < m.rows(); ++i)
        for (int j = 0; j < m.cols(); ++j)
            if (m(i, j) != 0.0)
                t.emplace_back(i, j, m(i, j));
    return build(static_cast<int>(m.rows()), static_cast<int>(m.cols()), t);
}

Eigen::VectorXd relu(const Eigen::VectorXd &v)
{
    return v.cwiseMax(0.0);
}

} // namespace

std::vector<int> NeuralNet::dims() const
{
    std::vector<int> D;
    D.push_back(input_dim());
    for (const auto &l : layers)
        D.push_back(static_cast<int>(l.w.rows()));
    return D;
}

void validate(const NeuralNet &net)
{
    if (net.layers.empty())
        throw std::domain_error("network has no layers");
    for (std::size_t i = 0; i < net.layers.size(); ++i) {
        const auto &l = net.layers[i];
        if (l.b.size() != l.w.rows())
            throw std::domain_error("bias length differs from weight rows in layer " + std::to_string(i + 1));
        if (i > 0 && l.w.cols() != net.layers[i - 1].w.rows())
            throw std::domain_error("layer shapes do not chain at layer " + std::to_string(i + 1));
    }
}

NeuralNet make_net(const std::vector<std::pair<Eigen::MatrixXd, Eigen::VectorXd>> &layers)
{
    NeuralNet net;
    for (const auto &[w, b] : layers)
        net.layers.push_back({dense_to_sparse(w), b});
    validate(net);
    return net;
}

Eigen::VectorXd realize(const NeuralNet &net, const Eigen::VectorXd &x)
{
    if (x.size() != net.input_dim())
        throw std::domain_error("input dimension mismatch");
    Eigen::VectorXd h = x;
    const std::size_t n = net.layers.size();
    for (std::size_t i = 0; i < n; ++i) {
        Eigen::VectorXd z = net.layers[i].w * h + net.layers[i].b;
        h = (i + 1 < n) ? relu(z) : z;
    }
    return h;
}

double realize_scalar(const NeuralNet &net, const Eigen::VectorXd &x)
{
    if (net.output_dim() != 1)
        throw std::domain_error("realize_scalar needs a scalar-output network");
    return realize(net, x)(0);
}

NetMetrics metrics(const NeuralNet &net)
{
    validate(net);
    NetMetrics m;
    m.H = net.hidden();
    m.D = net.dims();
    m.W = *std::max_element(m.D.begin(), m.D.end());
    for (const auto &l : net.layers) {
        for (int r = 0; r < l.w.outerSize(); ++r)
            for (SparseMat::InnerIterator it(l.w, r); it; ++it)
                if (it.value() != 0.0)
                    ++m.P;
        for (int i = 0; i < l.b.size(); ++i)
            if (l.b(i) != 0.0)
                ++m.P;
    }
    return m;
}

NeuralNet identity_net(int H)
{
    return identity_net_d(H, 1);
}

NeuralNet identity_net_d(int H, int d)
{
    if (H < 0 || d < 1)
        throw std::invalid_argument("identity_net: need H >= 0 and d >= 1");
    NeuralNet net;
    if (H == 0) {
        std::vector<Trip> t;
        for (int k = 0; k < d; ++k)
            t.emplace_back(k, k, 1.0);
        net.layers.push_back({build(d, d, t), Eigen::VectorXd::Zero(d)});
        return net;
    }
    // x = relu(x) - relu(-x); component k uses hidden units 2k, 2k+1
    std::vector<Trip> first, mid, last;
    for (int k = 0; k < d; ++k) {
        first.emplace_back(2 * k, k, 1.0);
        first.emplace_back(2 * k + 1, k, -1.0);
        mid.emplace_back(2 * k, 2 * k, 1.0);
        mid.emplace_back(2 * k + 1, 2 * k + 1, 1.0);
        last.emplace_back(k, 2 * k, 1.0);
        last.emplace_back(k, 2 * k + 1, -1.0);
    }
    net.layers.push_back({build(2 * d, d, first), Eigen::VectorXd::Zero(2 * d)});
    for (int i = 1; i < H; ++i)
        net.layers.push_back({build(2 * d, 2 * d, mid), Eigen::VectorXd::Zero(2 * d)});
    net.layers.push_back({build(d, 2 * d, last), Eigen::VectorXd::Zero(d)});
    return net;
}

NeuralNet compose(const NeuralNet &outer, const NeuralNet &inner)
{
    validate(outer);
    validate(inner);
    if (inner.output_dim() != outer.input_dim())
        throw std::domain_error("compose: inner output dimension differs from outer input dimension");
    NeuralNet net;
    for (std::size_t i = 0; i + 1 < inner.layers.size(); ++i)
        net.layers.push_back(inner.layers[i]);
    const Layer &a = inner.layers.back();
    Eigen::VectorXd ab(2 * a.b.size());
    ab << a.b, -a.b;
    net.layers.push_back({doubled_rows(a.w), ab});
    const Layer &b = outer.layers.front();
    net.layers.push_back({doubled_cols(b.w), b.b});
    for (std::size_t i = 1; i < outer.layers.size(); ++i)
        net.layers.push_back(outer.layers[i]);
    return net;
}

NeuralNet sum_same_length(const std::vector<NeuralNet> &nets, const std::vector<double> &coeffs)
{
    if (nets.empty() || nets.size() != coeffs.size())
        throw std::domain_error("sum_same_length: need matching non-empty nets and coefficients");
    const int H = nets.front().hidden();
    const int in = nets.front().input_dim();
    const int out = nets.front().output_dim();
    for (const auto &n : nets) {
        validate(n);
        if (n.hidden() != H)
            throw std::domain_error("sum_same_length: nets differ in hidden-layer count");
        if (n.input_dim() != in || n.output_dim() != out)
            throw std::domain_error("sum_same_length: nets differ in input or output dimension");
    }
    NeuralNet net;
    const std::size_t L = static_cast<std::size_t>(H) + 1;
    if (L == 1) {
        std::vector<Trip> t;
        Eigen::VectorXd b = Eigen::VectorXd::Zero(out);
        for (std::size_t j = 0; j < nets.size(); ++j) {
            put(t, nets[j].layers[0].w, 0, 0, coeffs[j]);
            b += coeffs[j] * nets[j].layers[0].b;
        }
        net.layers.push_back({build(out, in, t), b});
        return net;
    }
    std::vector<int> row_off(nets.size(), 0), col_off(nets.size(), 0);
    for (std::size_t i = 0; i < L; ++i) {
        std::vector<Trip> t;
        int rows = 0;
        for (std::size_t j = 0; j < nets.size(); ++j)
            rows += (i + 1 < L) ? static_cast<int>(nets[j].layers[i].w.rows()) : 0;
        if (i + 1 == L)
            rows = out;
        Eigen::VectorXd b = Eigen::VectorXd::Zero(rows);
        int r = 0, c = 0;
        for (std::size_t j = 0; j < nets.size(); ++j) {
            const Layer &l = nets[j].layers[i];
            if (i + 1 < L) {
                put(t, l.w, r, i == 0 ? 0 : c);
                b.segment(r, l.b.size()) = l.b;
                r += static_cast<int>(l.w.rows());
            } else {
                put(t, l.w, 0, c, coeffs[j]);
                b += coeffs[j] * l.b;
            }
            c += static_cast<int>(l.w.cols());
        }
        const int cols = (i == 0) ? in : c;
        net.layers.push_back({build(rows, cols, t), b});
    }
    return net;
}

NeuralNet affine_wrap(const NeuralNet &net, double scale, const Eigen::VectorXd &shift_in, double shift_out)
{
    validate(net);
    if (shift_in.size() != net.input_dim())
        throw std::domain_error("affine_wrap: shift length differs from input dimension");
    NeuralNet r = net;
    Layer &first = r.layers.front();
    first.b = first.b + first.w * shift_in;
    Layer &last = r.layers.back();
    if (scale != 1.0)
        last.w = scaled(last.w, scale);
    last.b = scale * (last.b.array() + shift_out).matrix();
    return r;
}

NeuralNet extend(const NeuralNet &net, int H_target)
{
    validate(net);
    if (net.output_dim() != 1)
        throw std::invalid_argument("extend: scalar-output networks only");
    if (H_target <= net.hidden())
        throw std::invalid_argument("extend: target depth must exceed the current depth");
    return compose(identity_net(H_target - net.hidden() - 1), net);
}

NeuralNet sum_diff_length(const NeuralNet &a, const NeuralNet &b, double ca, double cb)
{
    if (a.hidden() == b.hidden())
        return sum_same_length({a, b}, {ca, cb});
    if (a.hidden() < b.hidden())
        return sum_same_length({extend(a, b.hidden()), b}, {ca, cb});
    return sum_same_length({a, extend(b, a.hidden())}, {ca, cb});
}

NeuralNet parallelize(const std::vector<NeuralNet> &nets, bool shared_input)
{
    if (nets.empty())
        throw std::invalid_argument("parallelize: no networks");
    const int H = nets.front().hidden();
    for (const auto &n : nets) {
        validate(n);
        if (n.hidden() != H)
            throw std::invalid_argument("parallelize: nets differ in hidden-layer count");
        if (shared_input && n.input_dim() != nets.front().input_dim())
            throw std::invalid_argument("parallelize: shared input needs equal input dimensions");
    }
    NeuralNet net;
    for (std::size_t i = 0; i <= static_cast<std::size_t>(H); ++i) {
        std::vector<Trip> t;
        int r = 0, c = 0;
        std::vector<double> bias;
        for (const auto &n : nets) {
            const Layer &l = n.layers[i];
            put(t, l.w, r, (shared_input && i == 0) ? 0 : c);
            for (int k = 0; k < l.b.size(); ++k)
                bias.push_back(l.b(k));
            r += static_cast<int>(l.w.rows());
            c += static_cast<int>(l.w.cols());
        }
        const int cols = (shared_input && i == 0) ? nets.front().input_dim() : c;
        net.layers.push_back({build(r, cols, t), Eigen::Map<Eigen::VectorXd>(bias.data(), r)});
    }
    return net;
}

NeuralNet prepend_time(double t, int d)
{
    if (d < 1)
        throw std::invalid_argument("prepend_time: d must be >= 1");
    if (!(t >= 0.0))
        throw std::invalid_argument("prepend_time: t must be nonnegative");
    std::vector<Trip> w1, w2;
    for (int k = 0; k < d; ++k) {
        w1.emplace_back(1 + k, k, 1.0);
        w1.emplace_back(1 + d + k, k, -1.0);
        w2.emplace_back(1 + k, 1 + k, 1.0);
        w2.emplace_back(1 + k, 1 + d + k, -1.0);
    }
    w2.emplace_back(0, 0, 1.0);
    Eigen::VectorXd b1 = Eigen::VectorXd::Zero(2 * d + 1);
    b1(0) = t;
    NeuralNet net;
    net.layers.push_back({build(2 * d + 1, d, w1), b1});
    net.layers.push_back({build(d + 1, 2 * d + 1, w2), Eigen::VectorXd::Zero(d + 1)});
    return net;
}

NeuralNet fix_time(const NeuralNet &net, double t)
{
    if (net.input_dim() < 2)
        throw std::domain_error("fix_time: network needs a time input plus at least one space input");
    return compose(net, prepend_time(t, net.input_dim() - 1));
}

double yarotsky_depth_constant()
{
    return 3.0 * (1.0 / std::log(2.0) + 1.5 / std::log(3.0));
}

YarotskyShape yarotsky_shape(double R, double eps)
{
    if (!(R > 0.0) || !std::isfinite(R))
        throw std::invalid_argument("yarotsky_product: R must be positive and finite");
    if (!(eps > 0.0) || eps >= 0.5)
        throw std::invalid_argument("yarotsky_product: eps must lie in (0, 1/2)");
    YarotskyShape s;
    // error <= 2 R^2 4^{-m}
    const double need = std::log(2.0 * R * R / eps) / std::log(4.0);
    s.levels = std::max(1, static_cast<int>(std::ceil(need - 1e-12)));
    while (2.0 * R * R * std::pow(4.0, -s.levels) > eps)
        ++s.levels;
    s.H = 3 * s.levels;
    s.error_bound = 2.0 * R * R * std::pow(4.0, -s.levels);
    return s;
}

NeuralNet yarotsky_product(double R, double eps)
{
    // u = (x + R)/(2R), v = (y + R)/(2R), w = (u + v)/2 lie in [0, 1] and
    // xy = 4R^2 (2w^2 - u^2/2 - v^2/2 - w) + R^2. Each square s^2 is s - sum_j g_j(s)/4^j
    // with g_j the j-fold sawtooth; the linear parts cancel to w. The accumulator keeps
    // 1 + (running sawtooth sum), which stays in [1/3, 4/3].
    const YarotskyShape shape = yarotsky_shape(R, eps);
    const int m = shape.levels;
    NeuralNet net;

    auto layer = [&](int rows, int cols, std::vector<Trip> t, Eigen::VectorXd b) {
        net.layers.push_back({build(rows, cols, t), std::move(b)});
    };

    // layer 1: [hat a(w), hat b(w), acc, U, V]
    {
        const double s = 1.0 / (4.0 * R);
        std::vector<Trip> t{{0, 0, s}, {0, 1, s}, {1, 0, s}, {1, 1, s},
                            {3, 0, 1.0 / (2.0 * R)}, {4, 1, 1.0 / (2.0 * R)}};
        Eigen::VectorXd b(5);
        b << 0.5, 0.0, 1.0, 0.5, 0.5;
        layer(5, 2, t, b);
    }
    // coefficient of g_j in the accumulator for the three phases
    const double phase_coef[3] = {-2.0, 0.5, 0.5};
    for (int phase = 0; phase < 3; ++phase) {
        // previous layer holds hats of the current phase value at columns 0, 1 and acc at 2,
        // then the still-needed carries
        for (int j = 1; j <= m; ++j) {
            const int carries_in = 2 - phase;
            const int cols = 3 + carries_in;
            const double g_coef = phase_coef[phase] / std::pow(4.0, j);
            const bool last_level = (j == m);
            if (last_level && phase == 2) {
                // output: 4R^2 (acc - 1 + g_coef g_m) + R^2
                const double s = 4.0 * R * R;
                std::vector<Trip> t{{0, 0, 2.0 * g_coef * s}, {0, 1, -4.0 * g_coef * s}, {0, 2, s}};
                Eigen::VectorXd b(1);
                b << R * R - s;
                layer(1, cols, t, b);
                break;
            }
            std::vector<Trip> t;
            const int carries_out = last_level ? carries_in - 1 : carries_in;
            const int rows = 3 + carries_out;
            Eigen::VectorXd b = Eigen::VectorXd::Zero(rows);
            if (!last_level) {
                // hats of g_j = 2 a - 4 b
                t.insert(t.end(), {{0, 0, 2.0}, {0, 1, -4.0}, {1, 0, 2.0}, {1, 1, -4.0}});
                b(1) = -0.5;
            } else {
                // hats of the next phase value read from the first carry
                t.insert(t.end(), {{0, 3, 1.0}, {1, 3, 1.0}});
                b(1) = -0.5;
            }
            t.insert(t.end(), {{2, 0, 2.0 * g_coef}, {2, 1, -4.0 * g_coef}, {2, 2, 1.0}});
            const int skip = last_level ? 1 : 0;
            for (int c = 0; c < carries_out; ++c)
                t.emplace_back(3 + c, 3 + c + skip, 1.0);
            layer(rows, cols, t, b);
        }
    }
    return net;
}

KfoldPlan kfold_plan(int k, double R, double eps)
{
    if (k < 2)
        throw std::invalid_argument("kfold_product: k must be >= 2");
    if (!(R > 0.0) || !std::isfinite(R))
        throw std::invalid_argument("kfold_product: R must be positive and finite");
    if (!(eps > 0.0) || eps >= 0.5)
        throw std::invalid_argument("kfold_product: eps must lie in (0, 1/2)");
    KfoldPlan p;
    p.k = k;
    p.R = R;
    p.eps = eps;
    p.large_R = R >= 1.0;
    // stage i multiplies the running product of i inputs with input i + 1
    int H = 0;
    for (int i = 1; i < k; ++i) {
        const double Ri = p.large_R ? i * std::pow(R, i) : std::max(R, i * std::pow(R, i));
        const double ei = p.large_R ? eps : eps * std::pow(R, i + 1);
        p.stage_R.push_back(Ri);
        p.stage_eps.push_back(ei);
        H += yarotsky_shape(Ri, ei).H;
    }
    p.H = H + (k - 2);
    p.W = 2 * k + 1;
    p.param_bound = static_cast<double>(p.H + 1) * p.W * (p.W + 1);
    const double log_R = p.large_R ? std::log(std::ceil(R)) : std::log(std::ceil(1.0 / R));
    const double denom = std::pow(static_cast<double>(k), 4) * (std::log(std::ceil(1.0 / eps)) + 1.0 + log_R);
    p.param_constant = p.param_bound / denom;
    return p;
}

NeuralNet kfold_product(int k, double R, double eps)
{
    const KfoldPlan plan = kfold_plan(k, R, eps);
    NeuralNet psi = yarotsky_product(plan.stage_R[0], plan.stage_eps[0]);
    for (int i = 2; i < k; ++i) {
        const NeuralNet carry = identity_net(psi.hidden());
        const NeuralNet stage = yarotsky_product(plan.stage_R[i - 1], plan.stage_eps[i - 1]);
        psi = compose(stage, parallelize({psi, carry}, false));
    }
    return psi;
}

ProductPlan product_plan(int k, int H_nets, double R, double eps)
{
    ProductPlan p;
    if (k < 2) {
        p.H = H_nets + 2;
        return p;
    }
    p.eps_inner = std::min(eps / ((k - 1) * std::pow(R, k)), 0.49);
    p.kfold = kfold_plan(k, R, p.eps_inner);
    p.H = p.kfold.H + H_nets + 1;
    const double denom = k * (k * std::log(std::ceil(R)) + std::log(std::ceil(1.0 / eps)) + std::log(k));
    p.hidden_constant = (p.H - H_nets) / std::max(denom, std::log(2.0));
    return p;
}

NeuralNet product_of_nets(const std::vector<NeuralNet> &nets, double R, double eps,
                          const std::vector<Eigen::VectorXd> &audit_points)
{
    if (nets.empty())
        throw std::invalid_argument("product_of_nets: no networks");
    if (!(eps > 0.0))
        throw std::invalid_argument("product_of_nets: eps must be positive");
    const int H = nets.front().hidden();
    for (const auto &n : nets) {
        validate(n);
        if (n.hidden() != H)
            throw std::invalid_argument("product_of_nets: extend nets to a common depth first");
        if (n.output_dim() != 1)
            throw std::invalid_argument("product_of_nets: scalar-output networks only");
    }
    for (const auto &x : audit_points)
        for (std::size_t i = 0; i < nets.size(); ++i) {
            const double v = realize_scalar(nets[i], x);
            if (std::abs(v) > R)
                throw audit_failure("product_of_nets: factor " + std::to_string(i) + " exceeds the bound R = " +
                                    std::to_string(R) + " (value " + std::to_string(v) + ")");
        }
    const int k = static_cast<int>(nets.size());
    if (k == 1)
        return compose(identity_net(1), nets.front());
    const ProductPlan plan = product_plan(k, H, R, eps);
    return compose(kfold_product(k, R, plan.eps_inner), parallelize(nets, true));
}

double product_error_constant(const std::vector<double> &sup_norms, double eps)
{
    const int k = static_cast<int>(sup_norms.size());
    if (k == 0)
        throw std::invalid_argument("product_error_constant: empty norm list");
    for (double s : sup_norms)
        if (!(s >= 0.0))
            throw std::invalid_argument("product_error_constant: sup-norms must be nonnegative");
    // elementary symmetric polynomials e_r of the norms
    std::vector<double> e(k + 1, 0.0);
    e[0] = 1.0;
    for (double s : sup_norms)
        for (int r = k; r >= 1; --r)
            e[r] += s * e[r - 1];
    double c = 0.0;
    for (int j = 0; j <= k - 1; ++j)
        c += std::pow(eps, j) * e[k - 1 - j];
    return c;
}

double special_case_bound(int ell, int k, double f_sup, double g_sup, double eps)
{
    if (ell < 1 || ell > k)
        throw std::invalid_argument("special_case_bound: need 1 <= ell <= k");
    const double fe = f_sup + eps;
    double tail = ell * std::pow(g_sup, k - ell);
    if (k > ell)
        tail += (k - ell) * fe * std::pow(g_sup + eps, k - ell - 1);
    return std::pow(fe, ell - 1) * tail;
}

} // namespace branchwave
