// Copyright 2026 The refinpaint Authors. All Rights Reserved.
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//    http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.
// =============================================================================

#include "refinpaint/train/run_config.hpp"

#include <boost/property_tree/ini_parser.hpp>
#include <boost/property_tree/ptree.hpp>
#include <set>
#include <sstream>

#include "refinpaint/errors.hpp"

namespace refinpaint::train {

namespace pt = boost::property_tree;

RunConfig RunConfig::for_preset(const std::string& preset) {
  RunConfig c;
  c.model = model::ModelConfig::from_preset(preset);
  if (preset == "full") {
    c.batch_size = 32;
    c.epochs = 400;
    c.image_size = 256;
    c.checkpoint_every = 1000;
  }
  return c;
}

namespace {

template <typename V>
void read_number(const pt::ptree& section, const std::string& section_name, const std::string& key, V& out,
                 std::vector<std::string>& errors) {
  const auto text = section.get<std::string>(key);
  std::istringstream in(text);
  V value{};
  if (!(in >> value) || !(in >> std::ws).eof()) {
    errors.push_back(section_name + "." + key + ": cannot parse '" + text + "'");
    return;
  }
  out = value;
}

}  // namespace

RunConfig RunConfig::load(const std::filesystem::path& path, const std::optional<std::string>& preset_override) {
  pt::ptree tree;
  try {
    pt::read_ini(path.string(), tree);
  } catch (const pt::ini_parser_error& e) {
    throw ConfigError(std::string("cannot read config: ") + e.what());
  }
  std::vector<std::string> errors;
  const std::string preset = preset_override.value_or(tree.get<std::string>("model.preset", "toy"));
  RunConfig c;
  try {
    c = for_preset(preset);
  } catch (const ContractViolation& e) {
    throw ConfigError(e.what());
  }
  const auto base = path.parent_path();
  auto resolve = [&](const std::string& p) {
    std::filesystem::path q(p);
    return q.is_absolute() || q.empty() ? q : base / q;
  };

  std::ostringstream model_lines;
  model_lines << "preset = " << preset << "\n";
  static const std::set<std::string> known_sections = {"run", "model", "train", "data"};
  for (const auto& [name, section] : tree) {
    if (!known_sections.count(name)) {
      errors.push_back("unknown section [" + name + "]");
      continue;
    }
    for (const auto& [key, node] : section) {
      const auto value = node.get_value<std::string>();
      if (name == "run") {
        if (key == "seed") read_number(section, name, key, c.seed, errors);
        else if (key == "out_dir") c.out_dir = resolve(value);
        else errors.push_back("run." + key + ": unknown key");
      } else if (name == "model") {
        if (key != "preset") model_lines << key << " = " << value << "\n";
      } else if (name == "train") {
        if (key == "steps") read_number(section, name, key, c.steps, errors);
        else if (key == "epochs") {
          std::size_t e = 0;
          read_number(section, name, key, e, errors);
          c.epochs = e;
        } else if (key == "batch_size") read_number(section, name, key, c.batch_size, errors);
        else if (key == "learning_rate") read_number(section, name, key, c.adam.learning_rate, errors);
        else if (key == "beta1") read_number(section, name, key, c.adam.beta1, errors);
        else if (key == "beta2") read_number(section, name, key, c.adam.beta2, errors);
        else if (key == "epsilon") read_number(section, name, key, c.adam.epsilon, errors);
        else if (key == "checkpoint_every") read_number(section, name, key, c.checkpoint_every, errors);
        else if (key == "image_size") read_number(section, name, key, c.image_size, errors);
        else if (key == "loss_l1") read_number(section, name, key, c.loss_weights.l1, errors);
        else if (key == "loss_perceptual") read_number(section, name, key, c.loss_weights.perceptual, errors);
        else if (key == "loss_style") read_number(section, name, key, c.loss_weights.style, errors);
        else errors.push_back("train." + key + ": unknown key");
      } else if (name == "data") {
        if (key == "manifest") c.manifest = resolve(value);
        else if (key == "mask_dir") c.mask_dir = resolve(value);
        else if (key == "extractor") c.extractor = resolve(value);
        else errors.push_back("data." + key + ": unknown key");
      }
    }
  }
  try {
    c.model = model::ModelConfig::parse(model_lines.str());
  } catch (const std::exception& e) {
    errors.push_back(std::string("model: ") + e.what());
  }
  if (!errors.empty()) {
    std::string msg = "invalid config " + path.string() + ":";
    for (const auto& e : errors) msg += "\n  " + e;
    throw ConfigError(msg);
  }
  return c;
}

std::vector<std::string> RunConfig::problems(bool check_paths) const {
  std::vector<std::string> out;
  for (const auto& p : model.problems()) out.push_back("model." + p);
  if (batch_size == 0) out.push_back("train.batch_size: must be >= 1");
  if (!epochs && steps == 0) out.push_back("train.steps: must be >= 1");
  if (epochs && *epochs == 0) out.push_back("train.epochs: must be >= 1");
  if (!(adam.learning_rate > 0)) out.push_back("train.learning_rate: must be > 0");
  if (!(adam.beta1 >= 0 && adam.beta1 < 1)) out.push_back("train.beta1: must lie in [0, 1)");
  if (!(adam.beta2 >= 0 && adam.beta2 < 1)) out.push_back("train.beta2: must lie in [0, 1)");
  if (!(adam.epsilon > 0)) out.push_back("train.epsilon: must be > 0");
  if (loss_weights.l1 < 0 || loss_weights.perceptual < 0 || loss_weights.style < 0) {
    out.push_back("train.loss_*: weights must be nonnegative");
  }
  if (image_size == 0 || image_size % model.size_multiple() != 0) {
    out.push_back("train.image_size: must be a positive multiple of " + std::to_string(model.size_multiple()));
  }
  if (check_paths) {
    if (manifest.empty()) out.push_back("data.manifest: required");
    else if (!std::filesystem::is_regular_file(manifest)) out.push_back("data.manifest: no such file " + manifest.string());
    if (!mask_dir.empty() && !std::filesystem::is_directory(mask_dir)) {
      out.push_back("data.mask_dir: no such directory " + mask_dir.string());
    }
    if (!extractor.empty() && !std::filesystem::is_regular_file(extractor)) {
      out.push_back("data.extractor: no such file " + extractor.string());
    }
  }
  return out;
}

void RunConfig::validate(bool check_paths) const {
  const auto p = problems(check_paths);
  if (p.empty()) return;
  std::string msg = "invalid run configuration:";
  for (const auto& s : p) msg += "\n  " + s;
  throw ConfigError(msg);
}

std::size_t RunConfig::resolved_steps(std::size_t dataset_size) const {
  if (!epochs) return steps;
  const auto per_epoch = (std::max<std::size_t>(dataset_size, 1) + batch_size - 1) / batch_size;
  return *epochs * per_epoch;
}

}  // namespace refinpaint::train
