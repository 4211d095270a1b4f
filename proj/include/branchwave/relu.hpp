#ifndef BRANCHWAVE_RELU_HPP
#define BRANCHWAVE_RELU_HPP

#include <Eigen/Dense>
#include <Eigen/Sparse>

#include <cstdint>
#include <vector>

namespace branchwave {

using SparseMat = Eigen::SparseMatrix<double, Eigen::RowMajor>;

struct Layer {
    SparseMat w;
    Eigen::VectorXd b;
};

// Layers A_1 .. A_{H+1}; ReLU between consecutive affine maps, none after the last.
// H = 0 (a single affine map) is allowed as an intermediate of the calculus.
struct NeuralNet {
    std::vector<Layer> layers;

    int hidden() const { return static_cast<int>(layers.size()) - 1; }
    int input_dim() const { return static_cast<int>(layers.front().w.cols()); }
    int output_dim() const { return static_cast<int>(layers.back().w.rows()); }
    std::vector<int> dims() const;
};

struct NetMetrics {
    std::int64_t P = 0; // nonzero weights and biases
    int H = 0;
    int W = 0; // max over all entries of D
    std::vector<int> D;
};

// Throws std::domain_error when shapes do not chain.
void validate(const NeuralNet &net);

NeuralNet make_net(const std::vector<std::pair<Eigen::MatrixXd, Eigen::VectorXd>> &layers);

Eigen::VectorXd realize(const NeuralNet &net, const Eigen::VectorXd &x);
double realize_scalar(const NeuralNet &net, const Eigen::VectorXd &x);
NetMetrics metrics(const NeuralNet &net);

NeuralNet identity_net(int H);
NeuralNet identity_net_d(int H, int d);

// realize(compose(outer, inner)) = realize(outer) o realize(inner).
NeuralNet compose(const NeuralNet &outer, const NeuralNet &inner);

// Shared input; realize = sum_i coeffs[i] realize(nets[i]).
NeuralNet sum_same_length(const std::vector<NeuralNet> &nets, const std::vector<double> &coeffs);

// realize = scale * (realize(net)(x + shift_in) + shift_out).
NeuralNet affine_wrap(const NeuralNet &net, double scale, const Eigen::VectorXd &shift_in, double shift_out);

// Scalar-output nets only; throws std::invalid_argument unless H_target > H.
NeuralNet extend(const NeuralNet &net, int H_target);

NeuralNet sum_diff_length(const NeuralNet &a, const NeuralNet &b, double ca, double cb);

// Block-diagonal stacking; with shared_input every block reads the same x.
// Throws std::invalid_argument on unequal H.
NeuralNet parallelize(const std::vector<NeuralNet> &nets, bool shared_input);

// x -> (t, x_1, .., x_d), t >= 0.
NeuralNet prepend_time(double t, int d);
NeuralNet fix_time(const NeuralNet &net, double t);

// ---- products ----

struct YarotskyShape {
    int levels = 0; // sawtooth compositions per squaring
    int H = 0;
    int W = 5;
    double error_bound = 0.0;
};

// Depth constant C with H <= C (log ceil R + log ceil 1/eps) for this construction.
double yarotsky_depth_constant();
YarotskyShape yarotsky_shape(double R, double eps);
NeuralNet yarotsky_product(double R, double eps);

struct KfoldPlan {
    int k = 0;
    double R = 0.0;
    double eps = 0.0;
    bool large_R = false; // R >= 1 branch of the construction
    std::vector<double> stage_R;
    std::vector<double> stage_eps;
    int H = 0;
    int W = 0;
    double param_bound = 0.0; // (H + 1) W (W + 1)
    double param_constant = 0.0; // param_bound / (k^4 (log ceil 1/eps + 1 + log ceil R^{+-1}))
};

KfoldPlan kfold_plan(int k, double R, double eps);
NeuralNet kfold_product(int k, double R, double eps);

struct ProductPlan {
    KfoldPlan kfold;
    double eps_inner = 0.0;
    int H = 0;
    double hidden_constant = 0.0; // (H - H_nets) / (k (k log ceil R + log ceil 1/eps + log k))
};

ProductPlan product_plan(int k, int H_nets, double R, double eps);

// Approximates prod_i realize(nets[i]) to eps where every |realize(nets[i])| <= R.
// Throws audit_failure if a net exceeds R at any of the audit points.
NeuralNet product_of_nets(const std::vector<NeuralNet> &nets, double R, double eps,
                          const std::vector<Eigen::VectorXd> &audit_points = {});

double product_error_constant(const std::vector<double> &sup_norms, double eps);
double special_case_bound(int ell, int k, double f_sup, double g_sup, double eps);

} // namespace branchwave

#endif
