#pragma once

#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include <json.hpp>

#include "sdlab/calibration.hpp"
#include "sdlab/theory.hpp"

namespace sdlab {

nlohmann::json make_provenance(std::span<const std::string> command_line, std::uint64_t seed);

/// {"graphs":[{graph_id, esc, spa_before, spa_after, clip_count}, ...]}
nlohmann::json calibration_report_json(std::span<const CalibrationResult> results, double eta);

/// {"grid":[...], "val_acc":[...], "chosen_eta": x}
nlohmann::json selection_report_json(const EtaSelectionReport& report);

/// {config, q, c_q, K_min, trials, frequency, pass}
nlohmann::json theory_report_json(const SignalConfig& config, const BudgetCheck& check, std::size_t trials,
                                  bool pass);

/// Per-graph first-pass masks: {"graphs":[{"graph_id":i, "mask":[...]}]}
nlohmann::json explanations_json(std::span<const std::size_t> graph_ids, std::span<const EdgeMask> masks);
std::vector<std::pair<std::size_t, EdgeMask>> explanations_from_json(const nlohmann::json& doc);

}  // namespace sdlab
