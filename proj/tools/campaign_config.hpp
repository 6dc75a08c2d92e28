#pragma once

#include <string>

#include "grfb/link_sim.hpp"

namespace grfb::cli {

struct CampaignConfig {
  std::string name = "campaign";
  std::string out_dir = ".";
  LinkConfig link;
};

/// Parses a YAML campaign file. Scheme entries are either names ("A".."E",
/// "fixed:<psi bits>:<phi bits>") or maps with id, psi_bits or psi_levels,
/// and phi_bits or phi_rule. Throws ConfigError on any problem.
CampaignConfig load_campaign(const std::string& path);
CampaignConfig parse_campaign(const std::string& yaml_text);

}  // namespace grfb::cli
