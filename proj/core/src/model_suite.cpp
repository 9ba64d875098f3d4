#include "advpara/model_suite.hpp"

#include <algorithm>
#include <cstdlib>

#include "advpara/errors.hpp"
#include "advpara/serialization.hpp"
#include "advpara/synthetic.hpp"
#include "advpara/training.hpp"

namespace advpara {

SuiteSpec SuiteSpec::from_json(const nlohmann::json& j) {
  if (!j.is_object()) throw ConfigError("models", "expected an object of roles");
  SuiteSpec spec;
  for (const auto& role : model_roles()) spec.roles[role] = RoleSpec{};
  for (const auto& [role, v] : j.items()) {
    if (std::find(model_roles().begin(), model_roles().end(), role) == model_roles().end()) {
      throw ConfigError("models." + role, "unknown model role");
    }
    RoleSpec r;
    if (v.is_string()) {
      r.backend = v.get<std::string>();
    } else if (v.is_object()) {
      r.backend = v.value("backend", std::string("synthetic"));
      r.checkpoint = v.value("checkpoint", std::string());
    } else {
      throw ConfigError("models." + role, "expected a backend name or an object");
    }
    spec.roles[role] = r;
  }
  return spec;
}

SuiteSpec SuiteSpec::load(const std::filesystem::path& path) { return from_json(read_json(path)); }

nlohmann::json SuiteSpec::to_json() const {
  nlohmann::json j = nlohmann::json::object();
  for (const auto& [role, r] : roles) j[role] = {{"backend", r.backend}, {"checkpoint", r.checkpoint}};
  return j;
}

std::filesystem::path default_model_dir() {
  const char* env = std::getenv("ADVPARA_MODEL_DIR");
  return env && *env ? std::filesystem::path(env) : std::filesystem::path("models");
}

ModelSuite load_model_suite(const SuiteSpec& spec, const std::filesystem::path& model_dir) {
  for (const auto& [role, r] : spec.roles) {
    if (r.backend != "synthetic") {
      throw ConfigError("models." + role, "backend \"" + r.backend + "\" is not available in this build");
    }
  }
  ModelSuite suite = synthetic::suite();
  if (auto it = spec.roles.find("paraphraser"); it != spec.roles.end() && !it->second.checkpoint.empty()) {
    std::filesystem::path p = it->second.checkpoint;
    if (p.is_relative()) p = model_dir / p;
    auto policy = suite.paraphraser->clone();
    const auto params = load_parameters(p);
    if (params.size() != policy->parameters().size()) {
      throw ConfigError("models.paraphraser", "checkpoint " + p.string() + " does not match the model");
    }
    std::copy(params.begin(), params.end(), policy->parameters().begin());
    suite.paraphraser = std::move(policy);
  }
  return suite;
}

}  // namespace advpara
