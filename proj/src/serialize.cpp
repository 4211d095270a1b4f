#include "branchwave/serialize.hpp"
#include "branchwave/types.hpp"

#include <cstring>
#include <fstream>
#include <stdexcept>

namespace branchwave {

nlohmann::json net_to_json(const NeuralNet &net, std::size_t dense_limit)
{
    validate(net);
    nlohmann::json j;
    j["dims"] = net.dims();
    j["layers"] = nlohmann::json::array();
    for (const auto &l : net.layers) {
        nlohmann::json lj;
        const std::size_t rows = static_cast<std::size_t>(l.w.rows()), cols = static_cast<std::size_t>(l.w.cols());
        if (rows * cols <= dense_limit) {
            std::vector<double> w(rows * cols, 0.0);
            for (int r = 0; r < l.w.outerSize(); ++r)
                for (SparseMat::InnerIterator it(l.w, r); it; ++it)
                    w[static_cast<std::size_t>(r) * cols + static_cast<std::size_t>(it.col())] = it.value();
            lj["w"] = w;
        } else {
            nlohmann::json coo = nlohmann::json::array();
            for (int r = 0; r < l.w.outerSize(); ++r)
                for (SparseMat::InnerIterator it(l.w, r); it; ++it)
                    coo.push_back({r, it.col(), it.value()});
            lj["w_coo"] = coo;
        }
        lj["b"] = std::vector<double>(l.b.data(), l.b.data() + l.b.size());
        j["layers"].push_back(lj);
    }
    return j;
}

NeuralNet net_from_json(const nlohmann::json &j)
{
    const auto dims = j.at("dims").get<std::vector<int>>();
    const auto &layers = j.at("layers");
    if (dims.size() != layers.size() + 1)
        throw std::domain_error("network JSON: dims length does not match layer count");
    NeuralNet net;
    for (std::size_t i = 0; i < layers.size(); ++i) {
        const int rows = dims[i + 1], cols = dims[i];
        const auto &lj = layers[i];
        std::vector<Eigen::Triplet<double>> t;
        if (lj.contains("w")) {
            const auto w = lj.at("w").get<std::vector<double>>();
            if (w.size() != static_cast<std::size_t>(rows) * static_cast<std::size_t>(cols))
                throw std::domain_error("network JSON: weight size mismatch in layer " + std::to_string(i + 1));
            for (int r = 0; r < rows; ++r)
                for (int c = 0; c < cols; ++c) {
                    const double v = w[static_cast<std::size_t>(r) * cols + c];
                    if (v != 0.0)
                        t.emplace_back(r, c, v);
                }
        } else {
            for (const auto &e : lj.at("w_coo")) {
                const int r = e.at(0).get<int>(), c = e.at(1).get<int>();
                if (r < 0 || r >= rows || c < 0 || c >= cols)
                    throw std::domain_error("network JSON: entry out of range in layer " + std::to_string(i + 1));
                t.emplace_back(r, c, e.at(2).get<double>());
            }
        }
        SparseMat w(rows, cols);
        w.setFromTriplets(t.begin(), t.end());
        w.makeCompressed();
        const auto b = lj.at("b").get<std::vector<double>>();
        if (b.size() != static_cast<std::size_t>(rows))
            throw std::domain_error("network JSON: bias size mismatch in layer " + std::to_string(i + 1));
        net.layers.push_back({w, Eigen::Map<const Eigen::VectorXd>(b.data(), rows)});
    }
    validate(net);
    return net;
}

void save_net(const NeuralNet &net, const std::string &path)
{
    std::ofstream out(path);
    if (!out)
        throw precondition_error("cannot open " + path + " for writing");
    out << net_to_json(net).dump() << '\n';
}

NeuralNet load_net(const std::string &path)
{
    std::ifstream in(path);
    if (!in)
        throw precondition_error("cannot open " + path);
    return net_from_json(nlohmann::json::parse(in));
}

bool bit_equal(const NeuralNet &a, const NeuralNet &b)
{
    if (a.layers.size() != b.layers.size())
        return false;
    auto same = [](double x, double y) { return std::memcmp(&x, &y, sizeof x) == 0; };
    for (std::size_t i = 0; i < a.layers.size(); ++i) {
        const Layer &la = a.layers[i], &lb = b.layers[i];
        if (la.w.rows() != lb.w.rows() || la.w.cols() != lb.w.cols() || la.w.nonZeros() != lb.w.nonZeros() ||
            la.b.size() != lb.b.size())
            return false;
        for (int r = 0; r < la.w.outerSize(); ++r) {
            SparseMat::InnerIterator ia(la.w, r), ib(lb.w, r);
            for (; ia && ib; ++ia, ++ib)
                if (ia.col() != ib.col() || !same(ia.value(), ib.value()))
                    return false;
            if (ia || ib)
                return false;
        }
        for (int k = 0; k < la.b.size(); ++k)
            if (!same(la.b(k), lb.b(k)))
                return false;
    }
    return true;
}

} // namespace branchwave
