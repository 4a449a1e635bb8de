#include "invrep/runner/config.hpp"

#include "invrep/error.hpp"

#include <nlohmann/json.hpp>

#include <algorithm>
#include <cstdlib>
#include <fstream>
#include <initializer_list>
#include <sstream>

namespace invrep {

using nlohmann::json;

std::string_view recipe_name(Recipe r) {
  switch (r) {
    case Recipe::mnist_inverted: return "mnist_inverted";
    case Recipe::mnist_rotated: return "mnist_rotated";
    case Recipe::adult: return "adult";
    case Recipe::synthetic: return "synthetic";
  }
  return "unknown";
}

Recipe parse_recipe(std::string_view name) {
  for (Recipe r : {Recipe::mnist_inverted, Recipe::mnist_rotated, Recipe::adult,
                   Recipe::synthetic}) {
    if (recipe_name(r) == name) return r;
  }
  throw ConfigError("unknown recipe '" + std::string(name) + "'");
}

namespace {

Split parse_split(std::string_view name) {
  if (name == "train") return Split::train;
  if (name == "validation") return Split::validation;
  if (name == "test") return Split::test;
  throw ConfigError("unknown split '" + std::string(name) + "'");
}

void check_keys(const json& obj, const char* section, std::initializer_list<const char*> allowed) {
  if (!obj.is_object()) throw ConfigError(std::string("config: '") + section + "' must be an object");
  for (const auto& [key, _] : obj.items()) {
    const bool ok = std::any_of(allowed.begin(), allowed.end(),
                                [&](const char* a) { return key == a; });
    if (!ok) throw ConfigError(std::string("config: unknown key '") + key + "' in " + section);
  }
}

template <typename T>
void read(const json& obj, const char* key, T& out) {
  if (auto it = obj.find(key); it != obj.end()) out = it->template get<T>();
}

}  // namespace

std::size_t ExperimentConfig::resolved_representation_index() const {
  if (representation_index) return *representation_index;
  return hidden_widths.empty() ? 0 : hidden_widths.size() - 1;
}

ArchitectureSpec ExperimentConfig::architecture(std::size_t input_width,
                                                std::size_t classes) const {
  ArchitectureSpec spec;
  spec.input_width = input_width;
  for (std::size_t w : hidden_widths) spec.layers.push_back({w, hidden_activation});
  spec.layers.push_back({classes, Activation::softmax});
  spec.representation_index = resolved_representation_index();
  return spec;
}

void ExperimentConfig::validate() const {
  if (hidden_widths.empty()) throw ConfigError("config: at least one hidden layer is required");
  for (std::size_t i = 0; i < hidden_widths.size(); ++i) {
    if (hidden_widths[i] < 1) {
      throw ConfigError("config: hidden layer " + std::to_string(i) + " has width 0");
    }
  }
  if (hidden_activation == Activation::softmax) {
    throw ConfigError("config: softmax is only allowed on the output layer");
  }
  if (resolved_representation_index() >= hidden_widths.size()) {
    throw ConfigError("config: representation_index must point at a hidden layer");
  }
  optimizer.validate();
  affinity.validate();
  batch.validate();
  if (epochs < 1) throw ConfigError("config: epochs must be >= 1");
  if (seeds.empty()) throw ConfigError("config: seed list is empty");
  if (probe.epochs < 1 || probe.batch_size < 2) {
    throw ConfigError("config: probe needs epochs >= 1 and batch_size >= 2");
  }
  if (!(data.leak >= 0.0 && data.leak <= 1.0)) throw ConfigError("config: leak must lie in [0, 1]");
}

ExperimentConfig parse_config(const std::string& json_text) {
  json j;
  try {
    j = json::parse(json_text);
  } catch (const json::parse_error& e) {
    throw ParseError(std::string("config: ") + e.what(), e.byte);
  }
  ExperimentConfig cfg;
  try {
    check_keys(j, "config",
               {"name", "recipe", "data", "architecture", "optimizer", "affinity", "batch",
                "epochs", "seeds", "probe", "evaluation_split", "out_dir"});
    read(j, "name", cfg.name);
    if (j.contains("recipe")) cfg.recipe = parse_recipe(j["recipe"].get<std::string>());

    if (j.contains("data")) {
      const json& d = j["data"];
      check_keys(d, "data",
                 {"root", "seed", "train_subsample", "test_subsample", "exclude_z",
                  "drop_missing", "validation_fraction", "synthetic_n", "synthetic_width",
                  "leak", "source_samples", "target_samples", "rotation_degrees",
                  "augment_degrees", "balance_domains"});
      if (d.contains("root")) cfg.data.root = d["root"].get<std::string>();
      read(d, "seed", cfg.data.seed);
      read(d, "train_subsample", cfg.data.train_subsample);
      read(d, "test_subsample", cfg.data.test_subsample);
      read(d, "exclude_z", cfg.data.exclude_z);
      read(d, "drop_missing", cfg.data.drop_missing);
      read(d, "validation_fraction", cfg.data.validation_fraction);
      read(d, "synthetic_n", cfg.data.synthetic_n);
      read(d, "synthetic_width", cfg.data.synthetic_width);
      read(d, "leak", cfg.data.leak);
      read(d, "source_samples", cfg.data.source_samples);
      read(d, "target_samples", cfg.data.target_samples);
      read(d, "rotation_degrees", cfg.data.rotation_degrees);
      read(d, "augment_degrees", cfg.data.augment_degrees);
      read(d, "balance_domains", cfg.data.balance_domains);
    }

    if (j.contains("architecture")) {
      const json& a = j["architecture"];
      check_keys(a, "architecture", {"hidden_widths", "activation", "representation_index"});
      read(a, "hidden_widths", cfg.hidden_widths);
      if (a.contains("activation")) {
        cfg.hidden_activation = parse_activation(a["activation"].get<std::string>());
      }
      if (a.contains("representation_index")) {
        cfg.representation_index = a["representation_index"].get<std::size_t>();
      }
    }

    if (j.contains("optimizer")) {
      const json& o = j["optimizer"];
      check_keys(o, "optimizer", {"kind", "learning_rate", "beta1", "beta2", "epsilon"});
      if (o.contains("kind")) cfg.optimizer.kind = parse_optimizer(o["kind"].get<std::string>());
      read(o, "learning_rate", cfg.optimizer.learning_rate);
      read(o, "beta1", cfg.optimizer.beta1);
      read(o, "beta2", cfg.optimizer.beta2);
      read(o, "epsilon", cfg.optimizer.epsilon);
    }

    if (j.contains("affinity")) {
      const json& a = j["affinity"];
      check_keys(a, "affinity",
                 {"lambda", "distance", "class_conditional", "direction", "neighbor_gradient",
                  "normalization"});
      read(a, "lambda", cfg.affinity.lambda);
      if (a.contains("distance") && a["distance"].get<std::string>() != "l1") {
        throw ConfigError("config: only the l1 distance is supported");
      }
      read(a, "class_conditional", cfg.affinity.class_conditional);
      if (a.contains("direction")) {
        cfg.affinity.direction = parse_direction(a["direction"].get<std::string>());
      }
      if (a.contains("neighbor_gradient")) {
        cfg.affinity.neighbor_gradient =
            parse_neighbor_gradient(a["neighbor_gradient"].get<std::string>());
      }
      if (a.contains("normalization")) {
        cfg.affinity.normalization = parse_normalization(a["normalization"].get<std::string>());
      }
    }

    if (j.contains("batch")) {
      const json& b = j["batch"];
      check_keys(b, "batch", {"size", "policy"});
      read(b, "size", cfg.batch.batch_size);
      if (b.contains("policy")) cfg.batch.policy = parse_batch_policy(b["policy"].get<std::string>());
    }

    read(j, "epochs", cfg.epochs);
    read(j, "seeds", cfg.seeds);

    if (j.contains("probe")) {
      const json& p = j["probe"];
      check_keys(p, "probe", {"enabled", "epochs", "batch_size", "learning_rate"});
      read(p, "enabled", cfg.run_probe);
      read(p, "epochs", cfg.probe.epochs);
      read(p, "batch_size", cfg.probe.batch_size);
      read(p, "learning_rate", cfg.probe.optimizer.learning_rate);
    }

    if (j.contains("evaluation_split")) {
      cfg.evaluation_split = parse_split(j["evaluation_split"].get<std::string>());
    }
    if (j.contains("out_dir")) cfg.out_dir = j["out_dir"].get<std::string>();
  } catch (const json::exception& e) {
    throw ConfigError(std::string("config: ") + e.what());
  }
  cfg.validate();
  return cfg;
}

ExperimentConfig load_config(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw InputError("cannot open config " + path.string());
  std::stringstream ss;
  ss << in.rdbuf();
  return parse_config(ss.str());
}

std::string config_to_json(const ExperimentConfig& cfg) {
  json j;
  j["name"] = cfg.name;
  j["recipe"] = std::string(recipe_name(cfg.recipe));
  j["data"] = {{"root", cfg.data.root.string()},
               {"seed", cfg.data.seed},
               {"train_subsample", cfg.data.train_subsample},
               {"test_subsample", cfg.data.test_subsample},
               {"exclude_z", cfg.data.exclude_z},
               {"drop_missing", cfg.data.drop_missing},
               {"validation_fraction", cfg.data.validation_fraction},
               {"synthetic_n", cfg.data.synthetic_n},
               {"synthetic_width", cfg.data.synthetic_width},
               {"leak", cfg.data.leak},
               {"source_samples", cfg.data.source_samples},
               {"target_samples", cfg.data.target_samples},
               {"rotation_degrees", cfg.data.rotation_degrees},
               {"augment_degrees", cfg.data.augment_degrees},
               {"balance_domains", cfg.data.balance_domains}};
  j["architecture"] = {{"hidden_widths", cfg.hidden_widths},
                       {"activation", std::string(activation_name(cfg.hidden_activation))},
                       {"representation_index", cfg.resolved_representation_index()}};
  j["optimizer"] = {{"kind", std::string(optimizer_name(cfg.optimizer.kind))},
                    {"learning_rate", cfg.optimizer.learning_rate},
                    {"beta1", cfg.optimizer.beta1},
                    {"beta2", cfg.optimizer.beta2},
                    {"epsilon", cfg.optimizer.epsilon}};
  j["affinity"] = {{"lambda", cfg.affinity.lambda},
                   {"distance", "l1"},
                   {"class_conditional", cfg.affinity.class_conditional},
                   {"direction", std::string(direction_name(cfg.affinity.direction))},
                   {"neighbor_gradient",
                    std::string(neighbor_gradient_name(cfg.affinity.neighbor_gradient))},
                   {"normalization", std::string(normalization_name(cfg.affinity.normalization))}};
  j["batch"] = {{"size", cfg.batch.batch_size},
                {"policy", std::string(batch_policy_name(cfg.batch.policy))}};
  j["epochs"] = cfg.epochs;
  j["seeds"] = cfg.seeds;
  j["probe"] = {{"enabled", cfg.run_probe},
                {"epochs", cfg.probe.epochs},
                {"batch_size", cfg.probe.batch_size},
                {"learning_rate", cfg.probe.optimizer.learning_rate}};
  j["evaluation_split"] = std::string(split_name(cfg.evaluation_split));
  j["out_dir"] = cfg.out_dir.string();
  return j.dump(2);
}

std::filesystem::path resolve_data_root(const ExperimentConfig& cfg) {
  if (const char* env = std::getenv(kDataRootEnv); env != nullptr && *env != '\0') {
    return env;
  }
  return cfg.data.root;
}

}  // namespace invrep
