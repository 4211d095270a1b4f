#include "branchwave/data.hpp"
#include "branchwave/distill.hpp"
#include "branchwave/estimators.hpp"
#include "branchwave/moments.hpp"
#include "branchwave/reference.hpp"
#include "branchwave/serialize.hpp"

#include "CLI11.hpp"

#include <boost/property_tree/ini_parser.hpp>
#include <boost/property_tree/ptree.hpp>

#include <charconv>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <sstream>

namespace fs = std::filesystem;
using namespace branchwave;

namespace {

// Config lookups record the value actually used, defaults included.
class Config {
public:
    explicit Config(boost::property_tree::ptree tree) : tree_(std::move(tree)) {}

    template <class T> T get(const std::string &key, const T &fallback)
    {
        T v = tree_.get<T>(key, fallback);
        resolved_.put(key, v);
        return v;
    }

    template <class T> T require(const std::string &key)
    {
        auto v = tree_.get_optional<T>(key);
        if (!v)
            throw precondition_error("missing config key '" + key + "'");
        resolved_.put(key, *v);
        return *v;
    }

    bool has(const std::string &key) const { return static_cast<bool>(tree_.get_optional<std::string>(key)); }
    void note(const std::string &key, const std::string &value) { resolved_.put(key, value); }
    void set(const std::string &key, const std::string &value) { tree_.put(key, value); }
    const boost::property_tree::ptree &resolved() const { return resolved_; }

private:
    boost::property_tree::ptree tree_;
    boost::property_tree::ptree resolved_;
};

std::string num(double v)
{
    char buf[32];
    auto r = std::to_chars(buf, buf + sizeof buf, v);
    return std::string(buf, r.ptr);
}

std::vector<double> parse_list(const std::string &s, char sep)
{
    std::vector<double> out;
    std::stringstream ss(s);
    std::string item;
    while (std::getline(ss, item, sep)) {
        const auto a = item.find_first_not_of(" \t");
        if (a == std::string::npos)
            continue;
        const auto b = item.find_last_not_of(" \t");
        const std::string tok = item.substr(a, b - a + 1);
        double v = 0.0;
        auto r = std::from_chars(tok.data(), tok.data() + tok.size(), v);
        if (r.ec != std::errc() || r.ptr != tok.data() + tok.size())
            throw precondition_error("cannot parse number '" + tok + "'");
        out.push_back(v);
    }
    return out;
}

// "x = 0.1, 0.2 ; 0.3, 0.4" lists points separated by ';' with ',' between coordinates.
std::vector<Point> parse_points(const std::string &s, int d)
{
    std::vector<Point> pts;
    std::stringstream ss(s);
    std::string item;
    while (std::getline(ss, item, ';')) {
        const auto c = parse_list(item, ',');
        if (c.empty())
            continue;
        if (static_cast<int>(c.size()) != d)
            throw precondition_error("point '" + item + "' does not have d = " + std::to_string(d) + " coordinates");
        Point x{0.0, 0.0, 0.0};
        for (int k = 0; k < d; ++k)
            x[k] = c[k];
        pts.push_back(x);
    }
    if (pts.empty())
        throw precondition_error("no evaluation points given");
    return pts;
}

struct Setup {
    WaveProblem problem;
    NamedData f, c;
    std::uint64_t seed = 1;
    int workers = 1;
    fs::path out;
};

Setup read_problem(Config &cfg)
{
    Setup s;
    auto &pr = s.problem;
    pr.d = cfg.get<int>("problem.d", 1);
    if (pr.d < 1 || pr.d > 3)
        throw precondition_error("dimension d = " + std::to_string(pr.d) + " is not in {1, 2, 3}");
    pr.T = cfg.get<double>("problem.T", 1.0);
    if (!(pr.T >= 0.0))
        throw precondition_error("horizon T must be nonnegative");
    pr.lambda = cfg.get<double>("problem.lambda", 1.0);
    LifetimeLaw check(pr.lambda);
    pr.p = cfg.get<int>("problem.p", 0);
    if (pr.p < 0)
        throw precondition_error("power p must be >= 0");
    s.f = {cfg.get<std::string>("problem.f", "cos"), cfg.get<double>("problem.f_scale", 1.0)};
    s.c = {cfg.get<std::string>("problem.c", "zero"), cfg.get<double>("problem.c_scale", 1.0)};
    check_named(s.f);
    check_named(s.c);
    pr.f = named_function(s.f, pr.d);
    pr.c = named_space_time(s.c, pr.d);
    pr.F_lin = pr.c;
    pr.f_sup = cfg.get<double>("problem.f_sup", named_sup(s.f));
    pr.c_sup = cfg.get<double>("problem.c_sup", named_sup(s.c));
    return s;
}

SpaceFn make_oracle(const Setup &s, double t, Config &cfg)
{
    const auto &pr = s.problem;
    const std::string kind = cfg.get<std::string>("oracle.kind", pr.p == 0 ? "quadrature" : "picard");
    if (kind == "none")
        return {};
    if (kind == "quadrature") {
        if (pr.p != 0)
            throw precondition_error("quadrature oracle covers the linear problem only");
        QuadratureConfig q;
        q.abs_tol = cfg.get<double>("oracle.abs_tol", 1e-10);
        const int d = pr.d;
        return [pr, q, t, d](const Point &x) {
            if (d == 1)
                return dalembert(pr.f, pr.F_lin, t, x[0], q);
            return duhamel_quadrature(d, pr.f, pr.F_lin, t, x, q);
        };
    }
    if (kind == "picard") {
        PicardGrid g;
        g.nt = cfg.get<int>("oracle.nt", g.nt);
        g.nx = cfg.get<int>("oracle.nx", g.nx);
        g.z_nodes = cfg.get<int>("oracle.z_nodes", g.z_nodes);
        g.radius = t;
        const int iters = cfg.get<int>("oracle.iterations", 60);
        if (pr.p == 0)
            throw precondition_error("picard oracle needs p >= 1");
        auto sol = std::make_shared<PicardSolution>(picard_nonlinear(pr.p, pr.c, pr.f, t, g, iters, pr.d));
        if (!sol->converged)
            throw numerical_diagnostic("Picard iteration did not reach its tolerance", sol->differences.back());
        return [sol, t](const Point &x) { return (*sol)(t, x); };
    }
    throw precondition_error("unknown oracle kind '" + kind + "'");
}

void write_resolved(const Config &cfg, const fs::path &out, const std::string &command)
{
    boost::property_tree::write_ini((out / (command + ".resolved.ini")).string(), cfg.resolved());
}

int cmd_solve(Config &cfg, Setup &s)
{
    const auto ts = parse_list(cfg.require<std::string>("solve.t"), ',');
    const auto xs = parse_points(cfg.get<std::string>("solve.x", s.problem.d == 1 ? "0" : "0,0"), s.problem.d);
    const auto M = cfg.get<std::int64_t>("solve.M", 100000);
    std::ofstream csv(s.out / "solve.csv");
    csv << "t";
    for (int k = 0; k < s.problem.d; ++k)
        csv << ",x" << k + 1;
    csv << ",estimate,std_error,M,seed,rejected\n";
    for (double t : ts)
        for (const auto &x : xs) {
            const auto r = estimate(s.problem, t, x, M, s.seed, s.workers);
            csv << num(t);
            for (int k = 0; k < s.problem.d; ++k)
                csv << ',' << num(x[k]);
            csv << ',' << num(r.estimate) << ',' << num(r.std_error) << ',' << r.M << ',' << r.seed << ','
                << r.rejected_samples << '\n';
        }
    return 0;
}

int cmd_moments(Config &cfg, Setup &s)
{
    const int n_max = cfg.get<int>("moments.n_max", 20);
    const double t = cfg.get<double>("moments.t", s.problem.T);
    const int p = std::max(1, s.problem.p);
    const auto table = moment_table(p, s.problem.lambda, t, n_max);
    std::vector<BoundAudit> audits;
    if (p >= 2 && n_max >= 1)
        audits = audit_sequence_bounds(p, n_max);
    bool all = true;
    std::ofstream csv(s.out / "moments.csv");
    csv << "n,I,J,a,b,pmf,a_bound,b_bound,conv_a,conv_a_bound,conv_b,conv_b_bound,audit\n";
    for (int n = 0; n <= n_max; ++n) {
        csv << n << ',' << num(table.I[n]) << ',' << num(table.J[n]) << ',';
        csv << (p >= 2 ? num(table.a[n]) : "") << ',' << (p >= 2 ? num(table.b[n]) : "") << ',' << num(table.pmf[n]);
        if (n >= 1 && !audits.empty()) {
            const auto &a = audits[n - 1];
            csv << ',' << num(a.a_bound) << ',' << num(a.b_bound) << ',' << num(a.conv_a) << ','
                << num(a.conv_a_bound) << ',' << num(a.conv_b) << ',' << num(a.conv_b_bound) << ','
                << (a.pass ? "pass" : "fail");
            all = all && a.pass;
        } else {
            csv << ",,,,,,,pass";
        }
        csv << '\n';
    }
    std::ofstream summary(s.out / "moments_summary.txt");
    summary << "mean " << num(table.mean) << "\nsecond_moment " << num(table.second_moment) << "\naudits "
            << (all ? "pass" : "fail") << '\n';
    std::cout << "moment bound audits: " << (all ? "pass" : "fail") << '\n';
    return all ? 0 : 3;
}

int cmd_lawcheck(Config &cfg, Setup &s)
{
    const double t = cfg.get<double>("lawcheck.t", s.problem.T);
    const auto M = cfg.get<std::int64_t>("lawcheck.M", 100000);
    if (M <= 0)
        throw precondition_error("lawcheck needs M > 0");
    const int p = std::max(1, s.problem.p);
    BranchingConfig bc;
    bc.p = p;
    bc.t = t;
    bc.law = LifetimeLaw(s.problem.lambda);
    bc.d = s.problem.d;
    std::vector<std::int64_t> counts;
    for (std::int64_t i = 0; i < M; ++i) {
        CounterRng rng(s.seed, static_cast<std::uint64_t>(i));
        const auto tree = simulate_branching(bc, rng);
        if (tree.truncated)
            throw numerical_diagnostic("tree hit the particle cap", 0.0);
        const auto n = static_cast<std::size_t>(tree.branch_count);
        if (counts.size() <= n)
            counts.resize(n + 1, 0);
        ++counts[n];
    }
    const int n_top = static_cast<int>(counts.size()) + 10;
    std::ofstream csv(s.out / "lawcheck.csv");
    csv << "n,empirical,analytic\n";
    double tv = 0.0, mass = 0.0;
    for (int n = 0; n < n_top; ++n) {
        const double emp = n < static_cast<int>(counts.size()) ? static_cast<double>(counts[n]) / M : 0.0;
        const double ana = p == 1 ? poisson_pmf(n, s.problem.lambda * t) : branch_count_pmf(n, p, s.problem.lambda, t);
        tv += std::abs(emp - ana);
        mass += ana;
        csv << n << ',' << num(emp) << ',' << num(ana) << '\n';
    }
    tv = 0.5 * (tv + std::max(0.0, 1.0 - mass));
    std::ofstream summary(s.out / "lawcheck_summary.txt");
    summary << "tv " << num(tv) << "\nM " << M << "\n";
    std::cout << "total variation distance: " << num(tv) << '\n';
    return 0;
}

int cmd_distill(Config &cfg, Setup &s)
{
    DistillOptions opt;
    opt.eps_target = cfg.get<double>("distill.eps_target", 0.1);
    if (!(opt.eps_target > 0.0))
        throw precondition_error("eps_target must be positive");
    opt.seed = s.seed;
    opt.workers = s.workers;
    opt.grid_n = cfg.get<int>("distill.grid_n", 101);
    const double t = cfg.get<double>("distill.t", s.problem.T);
    const double delta = 0.5 * opt.eps_target;
    const auto data = make_data_nets(s.f, s.c, s.problem.d, s.problem.T, delta);
    if (s.problem.p >= 2) {
        const auto wp = check_wellposed(s.problem);
        if (!wp.pass)
            throw precondition_error("ill-posed configuration: max(f_sup, c_sup) is not below the threshold " +
                                     num(wp.threshold));
    }
    const SpaceFn oracle = make_oracle(s, t, cfg);
    const auto r = distill(s.problem, t, data, opt, oracle);
    std::ofstream(s.out / "distill_report.json") << report_to_json(r).dump(2) << '\n';
    save_net(r.net, (s.out / "network.json").string());
    std::cout << "sup error " << num(r.measured_sup_error) << " (target " << num(r.eps_target) << "), P "
              << r.measured_P << " <= " << num(r.param_bound) << ", H " << r.measured_H << " <= "
              << num(r.hidden_bound) << '\n';
    const bool ok = r.param_pass() && r.hidden_pass() && r.branch_pass() && r.assembly_pass() &&
                    (!oracle || r.error_pass());
    return ok ? 0 : 3;
}

int cmd_verify(Config &cfg, Setup &s)
{
    const auto path = cfg.require<std::string>("verify.net");
    const double t = cfg.get<double>("verify.t", s.problem.T);
    const double eps = cfg.get<double>("verify.eps_target", 0.1);
    const int grid_n = cfg.get<int>("verify.grid_n", 101);
    const NeuralNet net = load_net(path);
    if (net.input_dim() != s.problem.d || net.output_dim() != 1)
        throw precondition_error("network shape does not match the configured dimension");
    const SpaceFn oracle = make_oracle(s, t, cfg);
    if (!oracle)
        throw precondition_error("verify needs an oracle");
    const auto e = verify_lightcone(net, oracle, t, s.problem.d, grid_n);
    std::ofstream(s.out / "verify.txt") << "sup " << num(e.sup) << "\nl2 " << num(e.l2) << "\npoints " << e.points
                                        << '\n';
    std::cout << "light-cone sup error " << num(e.sup) << " over " << e.points << " points\n";
    return e.sup <= eps ? 0 : 3;
}

int cmd_export(Config &cfg, Setup &s)
{
    const double eps = cfg.get<double>("export.eps_data", 0.05);
    const auto data = make_data_nets(s.f, s.c, s.problem.d, s.problem.T, eps);
    save_net(data.phi_f, (s.out / "phi_f.json").string());
    save_net(data.phi_c, (s.out / "phi_c.json").string());
    const double t = cfg.get<double>("export.t", s.problem.T);
    const auto index = cfg.get<std::uint64_t>("export.sample", 0);
    if (s.problem.p >= 1) {
        const auto tree = sample_tree(s.problem, t, Point{0.0, 0.0, 0.0}, s.seed, index);
        std::ofstream out(s.out / "tree.txt");
        dump_tree(tree, s.problem.d, out);
    }
    return 0;
}

} // namespace

int main(int argc, char **argv)
{
    CLI::App app{"Branching Monte Carlo solver and ReLU distiller for wave equations"};
    app.require_subcommand(1, 1);
    std::string config_path;
    std::uint64_t seed = 1;
    int workers = 1;
    std::string out_dir = "out";
    std::vector<std::string> overrides;
    const std::vector<std::string> names{"solve", "moments", "lawcheck", "distill", "verify", "export"};
    for (const auto &n : names) {
        auto *sub = app.add_subcommand(n);
        sub->add_option("--config", config_path, "key=value config file with sections")->required();
        sub->add_option("--seed", seed, "master seed");
        sub->add_option("--workers", workers, "worker threads");
        sub->add_option("--out", out_dir, "output directory");
        sub->add_option("--set", overrides, "override section.key=value");
    }
    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError &e) {
        const int rc = app.exit(e);
        return rc == 0 ? 0 : 2;
    }
    const std::string command = app.get_subcommands().front()->get_name();

    try {
        boost::property_tree::ptree tree;
        try {
            boost::property_tree::read_ini(config_path, tree);
        } catch (const boost::property_tree::ini_parser_error &e) {
            throw precondition_error(std::string("malformed config: ") + e.what());
        }
        Config cfg(tree);
        for (const auto &o : overrides) {
            const auto eq = o.find('=');
            if (eq == std::string::npos)
                throw precondition_error("override '" + o + "' is not section.key=value");
            cfg.set(o.substr(0, eq), o.substr(eq + 1));
        }
        if (app.get_subcommands().front()->count("--seed") == 0)
            seed = cfg.get<std::uint64_t>("run.seed", seed);
        if (app.get_subcommands().front()->count("--workers") == 0)
            workers = cfg.get<int>("run.workers", workers);
        if (workers < 1)
            throw precondition_error("workers must be >= 1");
        cfg.note("run.seed", std::to_string(seed));
        cfg.note("run.workers", std::to_string(workers));

        Setup s = read_problem(cfg);
        s.seed = seed;
        s.workers = workers;
        s.out = out_dir;
        fs::create_directories(s.out);

        int rc = 0;
        if (command == "solve")
            rc = cmd_solve(cfg, s);
        else if (command == "moments")
            rc = cmd_moments(cfg, s);
        else if (command == "lawcheck")
            rc = cmd_lawcheck(cfg, s);
        else if (command == "distill")
            rc = cmd_distill(cfg, s);
        else if (command == "verify")
            rc = cmd_verify(cfg, s);
        else
            rc = cmd_export(cfg, s);
        write_resolved(cfg, s.out, command);
        return rc;
    } catch (const numerical_diagnostic &e) {
        std::cerr << "numerical diagnostic: " << e.what() << " (achieved " << e.achieved << ")\n";
        return 4;
    } catch (const audit_failure &e) {
        std::cerr << "audit failure: " << e.what() << '\n';
        return 3;
    } catch (const boost::property_tree::ptree_error &e) {
        std::cerr << "config error: " << e.what() << '\n';
        return 2;
    } catch (const std::logic_error &e) {
        std::cerr << "precondition failed: " << e.what() << '\n';
        return 2;
    } catch (const std::exception &e) {
        std::cerr << "error: " << e.what() << '\n';
        return 2;
    }
}
