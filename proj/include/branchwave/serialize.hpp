#ifndef BRANCHWAVE_SERIALIZE_HPP
#define BRANCHWAVE_SERIALIZE_HPP

#include "branchwave/relu.hpp"

#include "json.hpp"

#include <string>

namespace branchwave {

// {"dims": [...], "layers": [{"w": row-major, "b": [...]}, ...]}. Layers with more than
// dense_limit entries store "w_coo": [[row, col, value], ...] instead of "w".
// Doubles are written in shortest round-trip form, so reading back is bit-exact.
nlohmann::json net_to_json(const NeuralNet &net, std::size_t dense_limit = 1'000'000);
NeuralNet net_from_json(const nlohmann::json &j);

void save_net(const NeuralNet &net, const std::string &path);
NeuralNet load_net(const std::string &path);

bool bit_equal(const NeuralNet &a, const NeuralNet &b);

} // namespace branchwave

#endif
