#pragma once

#include <string>
#include <vector>

#include "pcmas/policy_system.hpp"

namespace pcmas::eval {

struct ParamReportRow {
  std::string label;
  training::SystemKind kind;
  std::int64_t params = 0;
  double ratio_to_ours = 0;
};

struct ParamReport {
  std::vector<ParamReportRow> rows;  // Ours, MLP, AugMLP, MLP-Large, AugMLP-Large
  std::int64_t mean_net_params = 0;  // identical across systems, listed apart
};

/// Learnable-parameter table across the five systems (actor + critic of both
/// agent types; mean action networks reported separately since every system
/// shares them).
ParamReport param_report(const data::GridSpec& grid, int total_agents,
                         const training::ArchitectureTable& arch);

/// Share of a generator's parameters living in its final generating layer.
double final_layer_fraction(const nn::HypernetSpec& spec);

void write_param_report(std::ostream& out, const ParamReport& report);

}  // namespace pcmas::eval
