#include "sdlab/reports.hpp"

#include "sdlab/errors.hpp"

namespace sdlab {

nlohmann::json make_provenance(std::span<const std::string> command_line, std::uint64_t seed) {
  return {{"command_line", std::vector<std::string>(command_line.begin(), command_line.end())}, {"seed", seed}};
}

nlohmann::json calibration_report_json(std::span<const CalibrationResult> results, double eta) {
  nlohmann::json graphs = nlohmann::json::array();
  for (const auto& r : results) {
    graphs.push_back({{"graph_id", r.graph_id},
                      {"esc", r.esc},
                      {"spa_before", r.spa_before},
                      {"spa_after", r.spa_after},
                      {"clip_count", r.clip_count}});
  }
  return {{"eta", eta}, {"graphs", std::move(graphs)}};
}

nlohmann::json selection_report_json(const EtaSelectionReport& report) {
  return {{"grid", report.grid}, {"val_acc", report.val_acc}, {"chosen_eta", report.chosen_eta}};
}

nlohmann::json theory_report_json(const SignalConfig& config, const BudgetCheck& check, std::size_t trials,
                                  bool pass) {
  return {{"config", to_json(config)},
          {"q", check.q},
          {"c_q", check.c_q},
          {"K_min", check.k_min},
          {"trials", trials},
          {"frequency", check.frequency ? nlohmann::json(*check.frequency) : nlohmann::json()},
          {"pass", pass}};
}

nlohmann::json explanations_json(std::span<const std::size_t> graph_ids, std::span<const EdgeMask> masks) {
  if (graph_ids.size() != masks.size()) throw AlignmentError("one mask per graph id required");
  nlohmann::json graphs = nlohmann::json::array();
  for (std::size_t k = 0; k < masks.size(); ++k) {
    graphs.push_back({{"graph_id", graph_ids[k]}, {"mask", masks[k].values()}});
  }
  return {{"graphs", std::move(graphs)}};
}

std::vector<std::pair<std::size_t, EdgeMask>> explanations_from_json(const nlohmann::json& doc) {
  std::vector<std::pair<std::size_t, EdgeMask>> out;
  try {
    for (const auto& g : doc.at("graphs")) {
      out.emplace_back(g.at("graph_id").get<std::size_t>(), EdgeMask(g.at("mask").get<std::vector<double>>()));
    }
  } catch (const nlohmann::json::exception& ex) {
    throw ParseError(std::string("explanations: ") + ex.what());
  }
  return out;
}

}  // namespace sdlab
