#pragma once

#include <filesystem>
#include <optional>

#include <json.hpp>

#include "sdlab/model.hpp"

namespace sdlab {

nlohmann::json arch_to_json(const ArchDescriptor& arch);
ArchDescriptor arch_from_json(const nlohmann::json& j);

/// {"version":1, "arch":{...}, "tensors":{name:{"shape":[...],"data":[...]}}}
nlohmann::json model_to_json(const SiGnnModel& model);
/// When `expected` is given, tensors are loaded into that architecture and a
/// mismatch raises ShapeError naming the tensor.
SiGnnModel model_from_json(const nlohmann::json& doc, const std::optional<ArchDescriptor>& expected = std::nullopt);

void save_model(const SiGnnModel& model, const std::filesystem::path& path,
                const nlohmann::json& provenance = nullptr);
SiGnnModel load_model(const std::filesystem::path& path,
                      const std::optional<ArchDescriptor>& expected = std::nullopt);

/// Reads a JSON document, mapping failures to IoError / ParseError.
nlohmann::json read_json_file(const std::filesystem::path& path);
void write_json_file(const std::filesystem::path& path, const nlohmann::json& doc);

}  // namespace sdlab
