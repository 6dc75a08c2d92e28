#include "campaign_config.hpp"

#include <yaml-cpp/yaml.h>

#include <fstream>
#include <sstream>

#include "grfb/error.hpp"

namespace grfb::cli {

namespace {

template <typename T>
T get(const YAML::Node& n, const char* key, T fallback) {
  if (!n[key]) return fallback;
  try {
    return n[key].as<T>();
  } catch (const YAML::Exception&) {
    throw ConfigError(std::string("bad value for '") + key + "'");
  }
}

FeedbackScheme custom_scheme(const YAML::Node& n, const GrDims& dims) {
  const auto id = get<std::string>(n, "id", "");
  if (id.empty()) throw ConfigError("custom scheme needs an id");
  PsiQuantizer psi = UniformGrid::psi(1);
  if (n["psi_levels"])
    psi = PsiCodebook(get<std::vector<double>>(n, "psi_levels", {}));
  else if (n["psi_bits"])
    psi = UniformGrid::psi(get<int>(n, "psi_bits", 1));
  else
    throw ConfigError("scheme '" + id + "' needs psi_bits or psi_levels");

  std::optional<BitAllocationPolicy> policy;
  if (n["phi_rule"]) {
    BitAllocationPolicy::Rule rule;
    for (const auto& e : n["phi_rule"]) {
      const auto key = get<std::vector<std::size_t>>(e, "psi", {});
      const auto widths = get<std::vector<int>>(e, "phi", {});
      if (!rule.emplace(key, widths).second) throw ConfigError("scheme '" + id + "' repeats a phi_rule tuple");
    }
    policy = BitAllocationPolicy::dynamic(dims, psi, std::move(rule));
  } else if (n["phi_bits"]) {
    policy = BitAllocationPolicy::fixed(dims, psi, get<int>(n, "phi_bits", 3));
  } else {
    throw ConfigError("scheme '" + id + "' needs phi_bits or phi_rule");
  }

  FeedbackScheme s{id, dims, policy, {}};
  if (n["psi_huffman"]) {
    // One probability list (or null for a fixed-width field) per psi parameter.
    for (const auto& e : n["psi_huffman"]) {
      if (e.IsNull()) {
        s.psi_codes.emplace_back();
        continue;
      }
      try {
        s.psi_codes.emplace_back(build_huffman(e.as<std::vector<double>>()));
      } catch (const ValidationError& err) {
        throw ConfigError("scheme '" + id + "': " + err.what());
      }
    }
  }
  validate_scheme(s);
  return s;
}

}  // namespace

CampaignConfig parse_campaign(const std::string& yaml_text) {
  YAML::Node root;
  try {
    root = YAML::Load(yaml_text);
  } catch (const YAML::Exception& e) {
    throw ConfigError(std::string("config is not valid YAML: ") + e.what());
  }
  if (!root.IsMap()) throw ConfigError("config must be a key-value map");

  CampaignConfig c;
  c.name = get<std::string>(root, "name", c.name);
  c.out_dir = get<std::string>(root, "out", c.out_dir);
  LinkConfig& l = c.link;
  l.n_t = get<int>(root, "n_t", l.n_t);
  l.n_r = get<int>(root, "n_r", l.n_r);
  l.k = get<int>(root, "streams", l.k);
  if (root["modulations"]) {
    l.modulations.clear();
    for (const auto& m : get<std::vector<std::string>>(root, "modulations", {}))
      l.modulations.push_back(parse_modulation(m));
  }
  l.snr_db = get<std::vector<double>>(root, "snr_db", l.snr_db);
  l.trials = get<std::size_t>(root, "trials", l.trials);
  l.symbols_per_trial = get<std::size_t>(root, "symbols_per_trial", l.symbols_per_trial);
  l.receiver = parse_receiver(get<std::string>(root, "receiver", to_string(l.receiver)));
  l.seed = get<std::uint64_t>(root, "seed", l.seed);
  l.threads = get<unsigned>(root, "threads", l.threads);

  const GrDims dims = l.dims();
  dims.validate();
  if (!root["schemes"] || !root["schemes"].IsSequence() || root["schemes"].size() == 0)
    throw ConfigError("config needs a non-empty 'schemes' list");
  for (const auto& s : root["schemes"]) {
    if (s.IsScalar())
      l.schemes.push_back(schemes::by_name(s.as<std::string>(), dims));
    else
      l.schemes.push_back(custom_scheme(s, dims));
  }
  l.validate();
  return c;
}

CampaignConfig load_campaign(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot read config file '" + path + "'");
  std::ostringstream text;
  text << in.rdbuf();
  return parse_campaign(text.str());
}

}  // namespace grfb::cli
