#ifndef BRANCHWAVE_DATA_HPP
#define BRANCHWAVE_DATA_HPP

#include "branchwave/distill.hpp"

#include <string>

namespace branchwave {

// Built-in data: scale * g(x) with g one of
//   cos   : prod_i cos(x_i)
//   gauss : exp(-|x|^2)
//   const : 1
//   zero  : 0
// Coefficients built this way do not depend on time.
struct NamedData {
    std::string name = "zero";
    double scale = 1.0;
};

void check_named(const NamedData &g);
SpaceFn named_function(const NamedData &g, int d);
SpaceTimeFn named_space_time(const NamedData &g, int d);
double named_sup(const NamedData &g);

// Net with |g - net| <= eps on [-half_width, half_width]^d.
NeuralNet named_data_net(const NamedData &g, int d, double half_width, double eps);

// Prepends an input the net ignores: (s, x) -> net(x).
NeuralNet ignore_first_input(const NeuralNet &net);

// phi_f and phi_c on |x|_inf <= 2T with accuracy eps_data.
DataNets make_data_nets(const NamedData &f, const NamedData &c, int d, double T, double eps_data);

} // namespace branchwave

#endif
