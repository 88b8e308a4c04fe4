#include "pcmas/baselines.hpp"

#include <ostream>

namespace pcmas::eval {

ParamReport param_report(const data::GridSpec& grid, int total_agents,
                         const training::ArchitectureTable& arch) {
  using training::SystemKind;
  ParamReport report;
  const SystemKind kinds[] = {SystemKind::kHypernet, SystemKind::kTarget,
                              SystemKind::kAugTarget, SystemKind::kTargetLarge,
                              SystemKind::kAugTargetLarge};
  std::int64_t ours = 0;
  for (const SystemKind kind : kinds) {
    const auto system = training::make_policy_system(kind, grid, total_agents, arch, 200, 0);
    ParamReportRow row;
    row.label = training::report_label(kind);
    row.kind = kind;
    row.params = system->learnable_params();
    if (kind == SystemKind::kHypernet) ours = row.params;
    row.ratio_to_ours = ours > 0 ? static_cast<double>(row.params) / ours : 0.0;
    report.rows.push_back(row);
  }
  report.mean_net_params = 2 * nn::param_count(training::mean_net_spec(grid, true, arch));
  return report;
}

double final_layer_fraction(const nn::HypernetSpec& spec) {
  const nn::MlpSpec generator = spec.generator_spec();
  const std::int64_t total = nn::param_count(generator);
  const std::int64_t before_final = nn::layer_offset(generator, generator.depth() - 1);
  return total > 0 ? static_cast<double>(total - before_final) / total : 0.0;
}

void write_param_report(std::ostream& out, const ParamReport& report) {
  out << "algorithm,learnable_parameters,ratio_to_ours\n";
  for (const ParamReportRow& row : report.rows) {
    out << row.label << ',' << row.params << ',' << row.ratio_to_ours << "\n";
  }
  out << "# mean action networks (shared by every system): " << report.mean_net_params
      << " parameters\n";
}

}  // namespace pcmas::eval
