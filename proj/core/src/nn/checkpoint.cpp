#include "invrep/nn/checkpoint.hpp"

#include "invrep/error.hpp"

#include <nlohmann/json.hpp>

#include <fstream>
#include <sstream>

namespace invrep {

using nlohmann::json;

std::string network_to_json(const Network& net) {
  json j;
  j["format"] = "invrep-network";
  j["version"] = 1;
  j["layer_count"] = net.num_layers();
  j["representation_index"] = net.representation_index();
  j["input_width"] = net.input_width();
  json layers = json::array();
  for (const auto& l : net.layers()) {
    json jl;
    jl["in"] = l.in_width();
    jl["out"] = l.out_width();
    jl["activation"] = std::string(activation_name(l.activation));
    jl["weights"] = std::vector<double>(l.weights.data(), l.weights.data() + l.weights.size());
    jl["bias"] = std::vector<double>(l.bias.data(), l.bias.data() + l.bias.size());
    layers.push_back(std::move(jl));
  }
  j["layers"] = std::move(layers);
  return j.dump();
}

Network network_from_json(const std::string& text) {
  json j;
  try {
    j = json::parse(text);
  } catch (const json::parse_error& e) {
    throw ParseError(std::string("checkpoint: ") + e.what(), e.byte);
  }
  try {
    if (j.at("format").get<std::string>() != "invrep-network") {
      throw ConfigError("checkpoint: unexpected format tag");
    }
    if (j.at("version").get<int>() != 1) throw ConfigError("checkpoint: unsupported version");
    const auto count = j.at("layer_count").get<std::size_t>();
    const auto& jl = j.at("layers");
    if (jl.size() != count) throw ConfigError("checkpoint: layer_count disagrees with layers");
    std::vector<DenseLayer> layers;
    for (std::size_t i = 0; i < count; ++i) {
      const auto& e = jl[i];
      const auto in = e.at("in").get<Eigen::Index>();
      const auto out = e.at("out").get<Eigen::Index>();
      const auto w = e.at("weights").get<std::vector<double>>();
      const auto b = e.at("bias").get<std::vector<double>>();
      if (static_cast<Eigen::Index>(w.size()) != in * out ||
          static_cast<Eigen::Index>(b.size()) != out) {
        throw ConfigError("checkpoint: layer " + std::to_string(i) + " has wrong value counts");
      }
      DenseLayer layer;
      layer.weights = Eigen::Map<const Tensor2>(w.data(), in, out);
      layer.bias = Eigen::Map<const RowVector>(b.data(), out);
      layer.activation = parse_activation(e.at("activation").get<std::string>());
      layers.push_back(std::move(layer));
    }
    return Network(std::move(layers), j.at("representation_index").get<std::size_t>());
  } catch (const json::exception& e) {
    throw ConfigError(std::string("checkpoint: ") + e.what());
  }
}

void save_network(const Network& net, const std::filesystem::path& path) {
  std::ofstream out(path);
  if (!out) throw InputError("cannot write checkpoint " + path.string());
  out << network_to_json(net) << '\n';
  if (!out) throw InputError("failed writing checkpoint " + path.string());
}

Network load_network(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw InputError("cannot open checkpoint " + path.string());
  std::stringstream ss;
  ss << in.rdbuf();
  return network_from_json(ss.str());
}

}  // namespace invrep
