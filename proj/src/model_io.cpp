#include "sdlab/model_io.hpp"

#include <fstream>
#include <string>

#include "sdlab/errors.hpp"

namespace sdlab {

namespace {
constexpr int kModelVersion = 1;
}  // namespace

nlohmann::json arch_to_json(const ArchDescriptor& a) {
  return {{"feature_dim", a.feature_dim},
          {"encoder_dims", a.encoder_dims},
          {"explainer_dims", a.explainer_dims},
          {"classifier_dims", a.classifier_dims},
          {"objective", to_string(a.objective)},
          {"beta", a.beta},
          {"r", a.r},
          {"tau", a.tau}};
}

ArchDescriptor arch_from_json(const nlohmann::json& j) {
  ArchDescriptor a;
  try {
    a.feature_dim = j.at("feature_dim").get<std::size_t>();
    a.encoder_dims = j.at("encoder_dims").get<std::vector<std::size_t>>();
    a.explainer_dims = j.at("explainer_dims").get<std::vector<std::size_t>>();
    a.classifier_dims = j.at("classifier_dims").get<std::vector<std::size_t>>();
    a.objective = objective_from_string(j.at("objective").get<std::string>());
    a.beta = j.at("beta").get<double>();
    a.r = j.at("r").get<double>();
    a.tau = j.at("tau").get<double>();
  } catch (const nlohmann::json::exception& ex) {
    throw ParseError(std::string("arch: ") + ex.what());
  }
  a.validate();
  return a;
}

nlohmann::json model_to_json(const SiGnnModel& model) {
  SiGnnModel copy = model;
  nlohmann::json tensors = nlohmann::json::object();
  for (const auto& nv : named_parameters(copy)) {
    tensors[nv.name] = {{"shape", nv.shape},
                        {"data", std::vector<double>(nv.data.begin(), nv.data.end())}};
  }
  return {{"version", kModelVersion}, {"arch", arch_to_json(model.arch)}, {"tensors", std::move(tensors)}};
}

SiGnnModel model_from_json(const nlohmann::json& doc, const std::optional<ArchDescriptor>& expected) {
  int version = 0;
  try {
    version = doc.at("version").get<int>();
  } catch (const nlohmann::json::exception& ex) {
    throw ParseError(std::string("model header: ") + ex.what());
  }
  if (version != kModelVersion) {
    throw ParseError("model version " + std::to_string(version) + " unsupported (expected " +
                     std::to_string(kModelVersion) + ")");
  }
  const ArchDescriptor file_arch = arch_from_json(doc.at("arch"));
  const ArchDescriptor arch = expected.value_or(file_arch);
  SiGnnModel model = init_model(arch, 0);
  const auto& tensors = doc.at("tensors");
  for (auto& nv : named_parameters(model)) {
    if (!tensors.contains(nv.name)) throw ShapeError("tensor " + nv.name + " missing from model file");
    const auto& t = tensors.at(nv.name);
    std::vector<double> data;
    std::vector<std::size_t> shape;
    try {
      data = t.at("data").get<std::vector<double>>();
      shape = t.at("shape").get<std::vector<std::size_t>>();
    } catch (const nlohmann::json::exception& ex) {
      throw ParseError("tensor " + nv.name + ": " + ex.what());
    }
    std::size_t declared = 1;
    for (auto s : shape) declared *= s;
    if (declared != data.size()) {
      throw ParseError("tensor " + nv.name + ": shape declares " + std::to_string(declared) +
                       " values, data holds " + std::to_string(data.size()));
    }
    if (shape != nv.shape) {
      auto fmt = [](const std::vector<std::size_t>& v) {
        std::string s = "[";
        for (std::size_t i = 0; i < v.size(); ++i) s += (i ? "," : "") + std::to_string(v[i]);
        return s + "]";
      };
      throw ShapeError("tensor " + nv.name + " has shape " + fmt(shape) + ", architecture expects " +
                       fmt(nv.shape));
    }
    std::copy(data.begin(), data.end(), nv.data.begin());
  }
  return model;
}

nlohmann::json read_json_file(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot open " + path.string());
  try {
    return nlohmann::json::parse(in);
  } catch (const nlohmann::json::parse_error& ex) {
    throw ParseError(path.string() + ": " + ex.what());
  }
}

void write_json_file(const std::filesystem::path& path, const nlohmann::json& doc) {
  std::ofstream out(path);
  if (!out) throw IoError("cannot open " + path.string() + " for writing");
  out << doc.dump(1) << '\n';
  if (!out) throw IoError("write failed: " + path.string());
}

void save_model(const SiGnnModel& model, const std::filesystem::path& path, const nlohmann::json& provenance) {
  auto doc = model_to_json(model);
  if (!provenance.is_null()) doc["provenance"] = provenance;
  write_json_file(path, doc);
}

SiGnnModel load_model(const std::filesystem::path& path, const std::optional<ArchDescriptor>& expected) {
  const auto doc = read_json_file(path);
  try {
    return model_from_json(doc, expected);
  } catch (const nlohmann::json::exception& ex) {
    throw ParseError(path.string() + ": " + ex.what());
  }
}

}  // namespace sdlab
