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

#include "refinpaint/model/config.hpp"

#include <boost/property_tree/ini_parser.hpp>
#include <boost/property_tree/ptree.hpp>
#include <fstream>
#include <sstream>

#include "refinpaint/errors.hpp"

namespace refinpaint::model {

namespace pt = boost::property_tree;

const char* variant_name(Variant v) {
  switch (v) {
    case Variant::kBasic: return "basic";
    case Variant::kAlignWithoutHarmonization: return "align-no-harmonize";
    case Variant::kAlign: return "align";
    case Variant::kFull: return "full";
  }
  return "?";
}

Variant parse_variant(const std::string& name) {
  for (auto v : {Variant::kBasic, Variant::kAlignWithoutHarmonization, Variant::kAlign, Variant::kFull}) {
    if (name == variant_name(v)) return v;
  }
  throw ContractViolation("unknown model variant '" + name +
                          "' (expected basic, align-no-harmonize, align or full)");
}

ModelConfig ModelConfig::toy() { return ModelConfig{}; }

ModelConfig ModelConfig::full() {
  ModelConfig c;
  c.preset = "full";
  c.embed_dims = {64, 128, 320, 512};
  c.num_heads = {1, 2, 5, 8};
  c.reduction_ratios = {8, 4, 2, 1};
  c.depths = {3, 4, 6, 3};
  c.tail_channels = {256, 128, 64, 64, 32};
  return c;
}

ModelConfig ModelConfig::from_preset(const std::string& name) {
  if (name == "toy") return toy();
  if (name == "full") return full();
  throw ContractViolation("unknown preset '" + name + "' (expected toy or full)");
}

std::size_t ModelConfig::size_multiple() const {
  // First embedding divides by 4, every later stage by 2, and the reference
  // branch halves once more.
  std::size_t m = 4;
  for (std::size_t i = 1; i < num_scales(); ++i) m *= 2;
  return m;
}

std::vector<std::string> ModelConfig::problems() const {
  std::vector<std::string> out;
  const auto n = num_scales();
  if (n == 0) out.push_back("embed_dims: at least one stage is required");
  auto check_len = [&](const char* name, std::size_t len) {
    if (len != n) {
      out.push_back(refinpaint::detail::concat_message(name, ": expected ", n, " entries, got ", len));
    }
  };
  check_len("num_heads", num_heads.size());
  check_len("reduction_ratios", reduction_ratios.size());
  check_len("depths", depths.size());
  for (std::size_t i = 0; i < n && i < num_heads.size(); ++i) {
    if (embed_dims[i] == 0) out.push_back("embed_dims: entries must be positive");
    if (num_heads[i] == 0 || embed_dims[i] % num_heads[i] != 0) {
      out.push_back(refinpaint::detail::concat_message("num_heads: stage ", i, " dim ", embed_dims[i],
                                                       " is not divisible by ", num_heads[i]));
    }
  }
  for (std::size_t i = 0; i < reduction_ratios.size(); ++i) {
    if (reduction_ratios[i] == 0) out.push_back("reduction_ratios: entries must be >= 1");
  }
  if (ref_scales > n) {
    out.push_back(refinpaint::detail::concat_message("ref_scales: ", ref_scales, " exceeds ", n,
                                                     " stages"));
  }
  if (mlp_ratio == 0) out.push_back("mlp_ratio: must be >= 1");
  if (deform_kernel == 0 || deform_kernel % 2 == 0) out.push_back("deform_kernel: must be odd");
  if (harmonize_reduction == 0) out.push_back("harmonize_reduction: must be >= 1");
  if (tail_channels.size() != 5) {
    out.push_back(refinpaint::detail::concat_message("tail_channels: expected 5 entries, got ",
                                                     tail_channels.size()));
  }
  for (auto c : tail_channels) {
    if (c == 0) out.push_back("tail_channels: entries must be positive");
  }
  if (n != 0 && n != 4) {
    out.push_back(refinpaint::detail::concat_message(
        "embed_dims: the decoder expects 4 stages (1/4 .. 1/32), got ", n));
  }
  return out;
}

void ModelConfig::validate() const {
  const auto p = problems();
  if (p.empty()) return;
  std::string msg = "invalid model config:";
  for (const auto& s : p) msg += "\n  " + s;
  throw ContractViolation(msg);
}

namespace {

std::string join(const std::vector<std::size_t>& v) {
  std::string s;
  for (std::size_t i = 0; i < v.size(); ++i) {
    if (i) s += ",";
    s += std::to_string(v[i]);
  }
  return s;
}

std::vector<std::size_t> split_sizes(const std::string& key, const std::string& text) {
  std::vector<std::size_t> out;
  std::stringstream ss(text);
  std::string item;
  while (std::getline(ss, item, ',')) {
    try {
      std::size_t used = 0;
      const auto v = std::stoull(item, &used);
      if (item.find_first_not_of(" \t", used) != std::string::npos) throw std::invalid_argument(item);
      out.push_back(v);
    } catch (const std::exception&) {
      throw FormatError("model config: '" + key + "' has a non-integer entry '" + item + "'");
    }
  }
  return out;
}

}  // namespace

std::string ModelConfig::serialize() const {
  std::ostringstream os;
  os << "preset = " << preset << "\n"
     << "variant = " << variant_name(variant) << "\n"
     << "embed_dims = " << join(embed_dims) << "\n"
     << "num_heads = " << join(num_heads) << "\n"
     << "reduction_ratios = " << join(reduction_ratios) << "\n"
     << "depths = " << join(depths) << "\n"
     << "ref_scales = " << ref_scales << "\n"
     << "mlp_ratio = " << mlp_ratio << "\n"
     << "deform_kernel = " << deform_kernel << "\n"
     << "harmonize_reduction = " << harmonize_reduction << "\n"
     << "tail_channels = " << join(tail_channels) << "\n";
  return os.str();
}

ModelConfig ModelConfig::parse(const std::string& text) {
  pt::ptree tree;
  std::istringstream in(text);
  try {
    pt::read_ini(in, tree);
  } catch (const pt::ini_parser_error& e) {
    throw FormatError(std::string("model config: ") + e.what());
  }
  // Start from the named preset so partial files inherit its values.
  ModelConfig c = from_preset(tree.get<std::string>("preset", "toy"));
  for (const auto& [key, node] : tree) {
    const auto value = node.get_value<std::string>();
    if (key == "preset") continue;
    if (key == "variant") c.variant = parse_variant(value);
    else if (key == "embed_dims") c.embed_dims = split_sizes(key, value);
    else if (key == "num_heads") c.num_heads = split_sizes(key, value);
    else if (key == "reduction_ratios") c.reduction_ratios = split_sizes(key, value);
    else if (key == "depths") c.depths = split_sizes(key, value);
    else if (key == "tail_channels") c.tail_channels = split_sizes(key, value);
    else if (key == "ref_scales") c.ref_scales = split_sizes(key, value).at(0);
    else if (key == "mlp_ratio") c.mlp_ratio = split_sizes(key, value).at(0);
    else if (key == "deform_kernel") c.deform_kernel = split_sizes(key, value).at(0);
    else if (key == "harmonize_reduction") c.harmonize_reduction = split_sizes(key, value).at(0);
    else throw FormatError("model config: unknown key '" + key + "'");
  }
  return c;
}

void ModelConfig::save(const std::filesystem::path& path) const {
  std::ofstream f(path);
  if (!f) throw FormatError("cannot write model config: " + path.string());
  f << serialize();
}

ModelConfig ModelConfig::load(const std::filesystem::path& path) {
  std::ifstream f(path);
  if (!f) throw FormatError("cannot read model config: " + path.string());
  std::stringstream ss;
  ss << f.rdbuf();
  return parse(ss.str());
}

}  // namespace refinpaint::model
