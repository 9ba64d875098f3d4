#include "advpara/config.hpp"

#include <cmath>
#include <set>

#include "advpara/errors.hpp"

namespace advpara {

using nlohmann::json;

std::string_view to_string(DecodingVariant v) {
  switch (v) {
    case DecodingVariant::nucleus: return "nucleus";
    case DecodingVariant::beam: return "beam";
    case DecodingVariant::diverse_beam: return "diverse_beam";
  }
  return "unknown";
}

DecodingVariant parse_decoding_variant(std::string_view name) {
  if (name == "nucleus") return DecodingVariant::nucleus;
  if (name == "beam") return DecodingVariant::beam;
  if (name == "diverse_beam") return DecodingVariant::diverse_beam;
  throw ConfigError("decoding.variant", "unknown variant '" + std::string(name) + "'");
}

const std::vector<std::string>& DecodingConfig::preset_names() {
  static const std::vector<std::string> names = {"sampling", "beam", "dbs-low", "dbs-high"};
  return names;
}

DecodingConfig DecodingConfig::preset(std::string_view name, std::size_t n) {
  DecodingConfig c;
  if (name == "sampling") {
    c.variant = DecodingVariant::nucleus;
    c.top_p = 0.95;
    c.temperature = 1.0;
    c.num_beams = 1;
  } else if (name == "beam") {
    c.variant = DecodingVariant::beam;
    c.num_beams = n;
  } else if (name == "dbs-low" || name == "dbs-high") {
    c.variant = DecodingVariant::diverse_beam;
    c.num_beams = n;
    c.num_groups = name == "dbs-low" ? 6 : n;
    c.diversity_penalty = 1.0;
    if (c.num_groups > n || n % c.num_groups != 0) {
      throw ConfigError("decoding", "preset '" + std::string(name) + "' needs the candidate count (" +
                                        std::to_string(n) + ") to be a multiple of its group count");
    }
  } else {
    throw ConfigError("decoding", "unknown preset '" + std::string(name) + "'");
  }
  return c;
}

DecodingConfig DecodingConfig::training(double top_p, double temperature) {
  DecodingConfig c;
  c.variant = DecodingVariant::nucleus;
  c.top_p = top_p;
  c.temperature = temperature;
  c.num_beams = 1;
  return c;
}

void DecodingConfig::validate() const {
  if (!(top_p > 0.0 && top_p <= 1.0)) throw ConfigError("decoding.top_p", "must lie in (0, 1]");
  if (!(temperature > 0.0) || !std::isfinite(temperature)) {
    throw ConfigError("decoding.temperature", "must be a positive finite number");
  }
  if (num_beams < 1) throw ConfigError("decoding.num_beams", "must be >= 1");
  if (num_groups < 1) throw ConfigError("decoding.num_groups", "must be >= 1");
  if (num_groups > num_beams) throw ConfigError("decoding.num_groups", "must not exceed num_beams");
  if (num_beams % num_groups != 0) throw ConfigError("decoding.num_groups", "must divide num_beams");
  if (!(diversity_penalty >= 0.0)) throw ConfigError("decoding.diversity_penalty", "must be >= 0");
  if (max_length < 1) throw ConfigError("decoding.max_length", "must be >= 1");
  if (min_length >= max_length) throw ConfigError("decoding.min_length", "must be below max_length");
}

DecodingConfig RunConfig::training_decoding() const {
  auto c = DecodingConfig::training(train_top_p, train_temperature);
  c.min_length = min_paraphrase_length;
  c.max_length = max_paraphrase_length;
  return c;
}

json to_json(const DecodingConfig& c) {
  return json{{"variant", std::string(to_string(c.variant))},
              {"top_p", c.top_p},
              {"temperature", c.temperature},
              {"num_beams", c.num_beams},
              {"num_groups", c.num_groups},
              {"diversity_penalty", c.diversity_penalty},
              {"min_length", c.min_length},
              {"max_length", c.max_length}};
}

namespace {

template <typename T>
T get_as(const json& j, const std::string& field) {
  try {
    return j.get<T>();
  } catch (const json::exception& e) {
    throw ConfigError(field, std::string("wrong type: ") + e.what());
  }
}

std::size_t get_count(const json& j, const std::string& field) {
  if (!j.is_number_integer()) throw ConfigError(field, "must be an integer");
  const auto v = j.get<long long>();
  if (v < 0) throw ConfigError(field, "must be >= 0");
  return static_cast<std::size_t>(v);
}

void check_keys(const json& j, const std::set<std::string>& allowed, const std::string& prefix) {
  if (!j.is_object()) throw ConfigError(prefix.empty() ? "config" : prefix, "must be a JSON object");
  for (const auto& [k, _] : j.items()) {
    if (!allowed.count(k)) throw ConfigError(prefix.empty() ? k : prefix + "." + k, "unknown key");
  }
}

}  // namespace

DecodingConfig decoding_from_json(const json& j) {
  if (j.is_string()) return DecodingConfig::preset(j.get<std::string>());
  check_keys(j, {"preset", "variant", "top_p", "temperature", "num_beams", "num_groups",
                 "diversity_penalty", "min_length", "max_length"},
             "decoding");
  DecodingConfig c;
  if (j.contains("preset")) {
    const std::size_t n = j.contains("num_beams") ? get_count(j["num_beams"], "decoding.num_beams") : 48;
    c = DecodingConfig::preset(get_as<std::string>(j["preset"], "decoding.preset"), n);
  }
  if (j.contains("variant")) c.variant = parse_decoding_variant(get_as<std::string>(j["variant"], "decoding.variant"));
  if (j.contains("top_p")) c.top_p = get_as<double>(j["top_p"], "decoding.top_p");
  if (j.contains("temperature")) c.temperature = get_as<double>(j["temperature"], "decoding.temperature");
  if (j.contains("num_beams")) c.num_beams = get_count(j["num_beams"], "decoding.num_beams");
  if (j.contains("num_groups")) c.num_groups = get_count(j["num_groups"], "decoding.num_groups");
  if (j.contains("diversity_penalty")) c.diversity_penalty = get_as<double>(j["diversity_penalty"], "decoding.diversity_penalty");
  if (j.contains("min_length")) c.min_length = get_count(j["min_length"], "decoding.min_length");
  if (j.contains("max_length")) c.max_length = get_count(j["max_length"], "decoding.max_length");
  c.validate();
  return c;
}

json to_json(const RunConfig& c) {
  return json{
      {"lr", c.lr},
      {"weight_decay", c.weight_decay},
      {"adam_beta1", c.adam_beta1},
      {"adam_beta2", c.adam_beta2},
      {"adam_eps", c.adam_eps},
      {"batch_size", c.batch_size},
      {"grad_accum_steps", c.grad_accum_steps},
      {"max_paraphrase_length", c.max_paraphrase_length},
      {"min_paraphrase_length", c.min_paraphrase_length},
      {"max_original_length", c.max_original_length},
      {"n_eval_candidates", c.n_eval_candidates},
      {"train_top_p", c.train_top_p},
      {"train_temperature", c.train_temperature},
      {"decoding", to_json(c.decoding)},
      {"alpha", c.alpha},
      {"eta", c.eta},
      {"beta", c.beta},
      {"char_diff_threshold", c.char_diff_threshold},
      {"cosine_threshold", c.cosine_threshold},
      {"contradiction_threshold", c.contradiction_threshold},
      {"acceptability_threshold", c.acceptability_threshold},
      {"contrast_phrases_file", c.contrast_phrases_file},
      {"max_epochs", c.max_epochs},
      {"validate_every", c.validate_every},
      {"baseline_subsample", c.baseline_subsample},
      {"seed", c.seed},
      {"bootstrap_resamples", c.bootstrap_resamples},
      {"clustering",
       {{"min_cluster_size", c.clustering.min_cluster_size},
        {"min_samples", c.clustering.min_samples},
        {"allow_single_cluster", c.clustering.allow_single_cluster},
        {"reduce_above_dims", c.clustering.reduce_above_dims},
        {"reduce_above_points", c.clustering.reduce_above_points},
        {"reduced_dims", c.clustering.reduced_dims}}},
      {"filter",
       {{"passthrough_max", c.filter.passthrough_max},
        {"target_total", c.filter.target_total},
        {"max_total", c.filter.max_total}}},
      {"exclude_misclassified_splits", c.exclude_misclassified_splits},
  };
}

RunConfig validate_config(const RunConfig& c) {
  auto positive = [](double v) { return v > 0.0 && std::isfinite(v); };
  auto unit = [](double v) { return v >= 0.0 && v <= 1.0; };

  if (!positive(c.lr)) throw ConfigError("lr", "must be positive");
  if (!(c.weight_decay >= 0.0)) throw ConfigError("weight_decay", "must be >= 0");
  if (!(c.adam_beta1 >= 0.0 && c.adam_beta1 < 1.0)) throw ConfigError("adam_beta1", "must lie in [0, 1)");
  if (!(c.adam_beta2 >= 0.0 && c.adam_beta2 < 1.0)) throw ConfigError("adam_beta2", "must lie in [0, 1)");
  if (!positive(c.adam_eps)) throw ConfigError("adam_eps", "must be positive");
  if (c.batch_size < 1) throw ConfigError("batch_size", "must be >= 1");
  if (c.grad_accum_steps < 1) throw ConfigError("grad_accum_steps", "must be >= 1");
  if (c.max_paraphrase_length < 2) throw ConfigError("max_paraphrase_length", "must be >= 2");
  if (c.min_paraphrase_length >= c.max_paraphrase_length) {
    throw ConfigError("min_paraphrase_length", "must be below max_paraphrase_length");
  }
  if (c.max_original_length < 1) throw ConfigError("max_original_length", "must be >= 1");
  if (c.n_eval_candidates < 1) throw ConfigError("n_eval_candidates", "must be >= 1");
  if (!(c.train_top_p > 0.0 && c.train_top_p <= 1.0)) throw ConfigError("train_top_p", "must lie in (0, 1]");
  if (!positive(c.train_temperature)) throw ConfigError("train_temperature", "must be positive");
  if (!positive(c.alpha)) throw ConfigError("alpha", "must be > 0");
  if (!positive(c.eta)) throw ConfigError("eta", "must be > 0");
  if (!(c.beta >= 0.0 && std::isfinite(c.beta))) throw ConfigError("beta", "must be >= 0");
  if (c.char_diff_threshold < 0) throw ConfigError("char_diff_threshold", "must be >= 0");
  if (!(c.cosine_threshold >= -1.0 && c.cosine_threshold <= 1.0)) {
    throw ConfigError("cosine_threshold", "must lie in [-1, 1]");
  }
  if (!unit(c.contradiction_threshold)) throw ConfigError("contradiction_threshold", "must lie in [0, 1]");
  if (!unit(c.acceptability_threshold)) throw ConfigError("acceptability_threshold", "must lie in [0, 1]");
  if (c.max_epochs < 1) throw ConfigError("max_epochs", "must be >= 1");
  if (c.validate_every < 1) throw ConfigError("validate_every", "must be >= 1");
  if (!(c.baseline_subsample > 0.0 && c.baseline_subsample <= 1.0)) {
    throw ConfigError("baseline_subsample", "must lie in (0, 1]");
  }
  if (c.bootstrap_resamples < 1) throw ConfigError("bootstrap_resamples", "must be >= 1");
  if (c.clustering.min_cluster_size < 2) throw ConfigError("clustering.min_cluster_size", "must be >= 2");
  if (c.clustering.min_samples < 1) throw ConfigError("clustering.min_samples", "must be >= 1");
  if (c.clustering.reduced_dims < 1) throw ConfigError("clustering.reduced_dims", "must be >= 1");
  if (c.filter.target_total < 1) throw ConfigError("filter.target_total", "must be >= 1");
  if (c.filter.max_total < c.filter.target_total) throw ConfigError("filter.max_total", "must be >= target_total");
  for (const auto& s : c.exclude_misclassified_splits) {
    if (s != "train" && s != "validation" && s != "test") {
      throw ConfigError("exclude_misclassified_splits", "unknown split '" + s + "'");
    }
  }
  c.decoding.validate();
  if (c.decoding.variant != DecodingVariant::nucleus && c.decoding.num_beams != c.n_eval_candidates) {
    throw ConfigError("decoding.num_beams", "beam decoding must use n_eval_candidates beams");
  }
  if (c.decoding.min_length != c.min_paraphrase_length || c.decoding.max_length != c.max_paraphrase_length) {
    throw ConfigError("decoding.max_length", "decoding lengths must match the paraphrase length bounds");
  }
  c.training_decoding().validate();
  return c;
}

RunConfig validate_config(const json& o) {
  const json j = o.is_null() ? json::object() : o;
  check_keys(j,
             {"lr", "weight_decay", "adam_beta1", "adam_beta2", "adam_eps", "batch_size", "grad_accum_steps",
              "max_paraphrase_length", "min_paraphrase_length", "max_original_length", "n_eval_candidates",
              "train_top_p", "train_temperature", "decoding", "alpha", "eta", "beta", "char_diff_threshold",
              "cosine_threshold", "contradiction_threshold", "acceptability_threshold", "contrast_phrases_file",
              "max_epochs", "validate_every", "baseline_subsample", "seed", "bootstrap_resamples", "clustering",
              "filter", "exclude_misclassified_splits"},
             "");
  RunConfig c;
  auto num = [&](const char* key, double& dst) {
    if (j.contains(key)) dst = get_as<double>(j[key], key);
  };
  auto count = [&](const char* key, std::size_t& dst) {
    if (j.contains(key)) dst = get_count(j[key], key);
  };
  num("lr", c.lr);
  num("weight_decay", c.weight_decay);
  num("adam_beta1", c.adam_beta1);
  num("adam_beta2", c.adam_beta2);
  num("adam_eps", c.adam_eps);
  if (j.contains("batch_size")) {
    // batch_size = 0 must reach the bound check, not the type check
    c.batch_size = get_count(j["batch_size"], "batch_size");
  }
  count("grad_accum_steps", c.grad_accum_steps);
  count("max_paraphrase_length", c.max_paraphrase_length);
  count("min_paraphrase_length", c.min_paraphrase_length);
  count("max_original_length", c.max_original_length);
  count("n_eval_candidates", c.n_eval_candidates);
  num("train_top_p", c.train_top_p);
  num("train_temperature", c.train_temperature);
  num("alpha", c.alpha);
  num("eta", c.eta);
  num("beta", c.beta);
  if (j.contains("char_diff_threshold")) c.char_diff_threshold = get_as<long>(j["char_diff_threshold"], "char_diff_threshold");
  num("cosine_threshold", c.cosine_threshold);
  num("contradiction_threshold", c.contradiction_threshold);
  num("acceptability_threshold", c.acceptability_threshold);
  if (j.contains("contrast_phrases_file")) {
    c.contrast_phrases_file = get_as<std::string>(j["contrast_phrases_file"], "contrast_phrases_file");
  }
  count("max_epochs", c.max_epochs);
  count("validate_every", c.validate_every);
  num("baseline_subsample", c.baseline_subsample);
  if (j.contains("seed")) c.seed = get_as<std::uint64_t>(j["seed"], "seed");
  count("bootstrap_resamples", c.bootstrap_resamples);

  if (j.contains("clustering")) {
    const auto& cj = j["clustering"];
    check_keys(cj, {"min_cluster_size", "min_samples", "allow_single_cluster", "reduce_above_dims",
                    "reduce_above_points", "reduced_dims"},
               "clustering");
    if (cj.contains("min_cluster_size")) c.clustering.min_cluster_size = get_count(cj["min_cluster_size"], "clustering.min_cluster_size");
    if (cj.contains("min_samples")) c.clustering.min_samples = get_count(cj["min_samples"], "clustering.min_samples");
    if (cj.contains("allow_single_cluster")) c.clustering.allow_single_cluster = get_as<bool>(cj["allow_single_cluster"], "clustering.allow_single_cluster");
    if (cj.contains("reduce_above_dims")) c.clustering.reduce_above_dims = get_count(cj["reduce_above_dims"], "clustering.reduce_above_dims");
    if (cj.contains("reduce_above_points")) c.clustering.reduce_above_points = get_count(cj["reduce_above_points"], "clustering.reduce_above_points");
    if (cj.contains("reduced_dims")) c.clustering.reduced_dims = get_count(cj["reduced_dims"], "clustering.reduced_dims");
  }
  if (j.contains("filter")) {
    const auto& fj = j["filter"];
    check_keys(fj, {"passthrough_max", "target_total", "max_total"}, "filter");
    if (fj.contains("passthrough_max")) c.filter.passthrough_max = get_count(fj["passthrough_max"], "filter.passthrough_max");
    if (fj.contains("target_total")) c.filter.target_total = get_count(fj["target_total"], "filter.target_total");
    if (fj.contains("max_total")) c.filter.max_total = get_count(fj["max_total"], "filter.max_total");
  }
  if (j.contains("exclude_misclassified_splits")) {
    c.exclude_misclassified_splits =
        get_as<std::vector<std::string>>(j["exclude_misclassified_splits"], "exclude_misclassified_splits");
  }

  // Beam width follows the candidate count; lengths follow the paraphrase bounds.
  if (j.contains("decoding")) {
    const auto& dj = j["decoding"];
    if (dj.is_string()) {
      c.decoding = DecodingConfig::preset(dj.get<std::string>(), c.n_eval_candidates);
    } else {
      json patched = dj;
      if (patched.is_object() && patched.contains("preset") && !patched.contains("num_beams")) {
        patched["num_beams"] = c.n_eval_candidates;
      }
      c.decoding = decoding_from_json(patched);
    }
  } else {
    c.decoding = DecodingConfig::preset("beam", c.n_eval_candidates);
  }
  c.decoding.min_length = c.min_paraphrase_length;
  c.decoding.max_length = c.max_paraphrase_length;

  return validate_config(c);
}

}  // namespace advpara
