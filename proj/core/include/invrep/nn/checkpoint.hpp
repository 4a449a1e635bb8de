#ifndef INVREP_NN_CHECKPOINT_HPP
#define INVREP_NN_CHECKPOINT_HPP

#include "invrep/nn/network.hpp"

#include <filesystem>
#include <string>

namespace invrep {

// Checkpoint container (JSON, doubles written with round-trip precision):
//
//   {
//     "format": "invrep-network", "version": 1,
//     "layer_count": L, "representation_index": k, "input_width": n,
//     "layers": [ { "in": a, "out": b, "activation": "relu",
//                   "weights": [a*b values, row-major], "bias": [b values] }, ... ]
//   }

std::string network_to_json(const Network& net);
Network network_from_json(const std::string& text);

void save_network(const Network& net, const std::filesystem::path& path);
Network load_network(const std::filesystem::path& path);

}  // namespace invrep

#endif  // INVREP_NN_CHECKPOINT_HPP
