#include "commands.hpp"

#include <CLI11.hpp>

#include <cstdio>
#include <fstream>
#include <ostream>
#include <set>
#include <sstream>

#include "advpara/data.hpp"
#include "advpara/errors.hpp"
#include "advpara/evaluation.hpp"
#include "advpara/model_suite.hpp"
#include "advpara/run_directory.hpp"
#include "advpara/serialization.hpp"
#include "advpara/synthetic.hpp"
#include "advpara/text.hpp"
#include "advpara/tokenmod.hpp"
#include "advpara/training.hpp"

namespace advpara::cli {

namespace {

std::vector<std::string> split_csv(const std::string& s) {
  std::vector<std::string> out;
  std::stringstream ss(s);
  std::string item;
  while (std::getline(ss, item, ',')) {
    const auto t = text::trim(item);
    if (!t.empty()) out.emplace_back(t);
  }
  return out;
}

std::string percent(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.1f", v);
  return buf;
}

SuiteSpec suite_spec(const std::string& models) {
  if (std::filesystem::is_regular_file(models)) return SuiteSpec::load(models);
  nlohmann::json j = nlohmann::json::object();
  for (const auto& role : model_roles()) j[role] = models;
  return SuiteSpec::from_json(j);
}

ModelSuite build_suite(const SuiteSpec& spec, const RunConfig& cfg) {
  ModelSuite suite = load_model_suite(spec);
  if (!cfg.contrast_phrases_file.empty()) suite.contrast = ContrastPhraseList::load(cfg.contrast_phrases_file);
  return suite;
}

struct OpenedRun {
  RunDirectory dir;
  Dataset data;
  ModelSuite suite;
  std::unique_ptr<TrainablePolicy> policy;
};

OpenedRun open_run(const std::filesystem::path& path, const std::string& checkpoint) {
  auto dir = RunDirectory::open(path);
  auto data = read_dataset(dir.info().at("data").get<std::string>());
  auto suite = build_suite(SuiteSpec::from_json(dir.info().at("models")), dir.config());
  auto policy = suite.paraphraser->clone();
  if (checkpoint != "initial") {
    if (checkpoint != "best" && checkpoint != "final") {
      throw Error("unknown checkpoint \"" + checkpoint + "\" (expected best, final, or initial)");
    }
    const auto file = dir.checkpoint(checkpoint) / "policy.json";
    if (!std::filesystem::exists(file)) throw Error("run has no " + checkpoint + " checkpoint: " + file.string());
    const auto params = load_parameters(file);
    if (params.size() != policy->parameters().size()) throw Error(file.string() + " does not match the model");
    std::copy(params.begin(), params.end(), policy->parameters().begin());
  }
  return {std::move(dir), std::move(data), std::move(suite), std::move(policy)};
}

DecodingConfig effective_decoding(const std::string& preset, const RunConfig& cfg) {
  auto dec = DecodingConfig::preset(preset, cfg.n_eval_candidates);
  dec.min_length = cfg.min_paraphrase_length;
  dec.max_length = cfg.max_paraphrase_length;
  dec.validate();
  return dec;
}

EvalReport run_eval(const OpenedRun& r, const std::string& split, const DecodingConfig& dec, std::size_t threads) {
  EvalModels em{r.policy.get(), r.suite.victim.get(), r.suite.scorers(), r.suite.perplexity.get()};
  return evaluate_split(r.data.split(split), em, r.dir.config(), dec, r.dir.config().seed, threads);
}

}  // namespace

void cmd_prepare(const PrepareOptions& o, std::ostream& out) {
  const auto classes = split_csv(o.classes);
  if (classes.empty()) throw Error("--classes is empty");
  const auto raw = load_jsonl(o.input, classes);
  const auto suite = build_suite(suite_spec(o.victim), RunConfig{});
  if (suite.victim->num_classes() != classes.size()) {
    throw Error("victim predicts " + std::to_string(suite.victim->num_classes()) + " classes but " +
                std::to_string(classes.size()) + " were given");
  }

  PreprocessStats stats;
  const auto scored = preprocess(raw, *suite.victim, *suite.vocab, o.max_tokens, false, &stats);
  auto splits = split_random(scored, o.val_frac, o.test_frac, o.seed);

  const auto excluded = split_csv(o.exclude_misclassified);
  const std::set<std::string> exclude(excluded.begin(), excluded.end());
  nlohmann::json removed = nlohmann::json::object();
  for (auto [name, part] : {std::pair<std::string, std::vector<LabeledExample>*>{"train", &splits.train},
                            {"validation", &splits.validation},
                            {"test", &splits.test}}) {
    if (!exclude.count(name)) continue;
    const auto before = part->size();
    std::erase_if(*part, [](const LabeledExample& ex) { return argmax(ex.victim_probs) != ex.label; });
    removed[name] = before - part->size();
  }

  Dataset ds;
  ds.name = o.input.stem().string();
  ds.class_names = classes;
  ds.splits = std::move(splits);
  ds.provenance = {{"source", std::filesystem::absolute(o.input).lexically_normal().string()},
                   {"max_tokens", o.max_tokens},
                   {"seed", o.seed},
                   {"val_frac", o.val_frac},
                   {"test_frac", o.test_frac},
                   {"exclude_misclassified", excluded},
                   {"raw", stats.raw},
                   {"too_long", stats.too_long},
                   {"misclassified", stats.misclassified},
                   {"misclassified_removed", removed}};
  write_dataset(o.out, ds);
  out << "prepared " << ds.name << ": train " << ds.splits.train.size() << ", validation "
      << ds.splits.validation.size() << ", test " << ds.splits.test.size() << " (from " << stats.raw << " raw)\n";
}

void cmd_train(const TrainOptions& o, std::ostream& out) {
  const auto data = read_dataset(o.data);
  RunConfig cfg = validate_config(read_json(o.config));
  if (o.seed) cfg.seed = *o.seed;
  const auto spec = suite_spec(o.models);
  const auto suite = build_suite(spec, cfg);

  nlohmann::json info = {{"data", std::filesystem::absolute(o.data).lexically_normal().string()},
                         {"dataset", data.name},
                         {"models", spec.to_json()},
                         {"seed", cfg.seed}};
  auto rd = RunDirectory::create(o.out, cfg, info);

  TrainState state(suite.paraphraser->clone(), rd.config());
  TrainingModels models{suite.victim.get(), suite.scorers(), suite.perplexity.get()};
  train(
      state, data.splits.train, data.splits.validation, models, rd.config(),
      [&](const EpochRecord& rec, const TrainState& st) {
        rd.append_metrics(rec);
        save_checkpoint(rd.checkpoint("final"), st);
        if (rec.validated && st.best_epoch == rec.epoch) {
          std::filesystem::create_directories(rd.checkpoint("best"));
          save_parameters(rd.checkpoint("best") / "policy.json", st.best_parameters);
          write_json(rd.checkpoint("best") / "info.json", {{"epoch", st.best_epoch}, {"val_asr", st.best_asr}});
        }
        std::ostringstream line;
        line << "epoch " << rec.epoch << " mean_reward " << rec.train.mean_reward;
        if (rec.validated) line << " val_asr " << percent(rec.validation.val_asr);
        if (rec.decision.stop) line << " stop " << rec.decision.reason;
        rd.log(line.str());
        out << line.str() << "\n";
      },
      o.threads);
  out << "best validation ASR " << percent(state.best_asr) << "% at epoch " << state.best_epoch << "\n";
}

void cmd_eval(const EvalOptions& o, std::ostream& out) {
  const auto r = open_run(o.run, o.checkpoint);
  const auto dec = effective_decoding(o.decoding, r.dir.config());
  const auto rep = run_eval(r, o.split, dec, o.threads);

  auto summary = rep.summary_json();
  summary["split"] = o.split;
  summary["preset"] = o.decoding;
  summary["decoding"] = to_json(dec);
  const std::string stem = "eval_" + o.split + "_" + o.decoding;
  r.dir.write_report(stem + ".json", summary, o.checkpoint);
  std::vector<nlohmann::json> rows;
  for (const auto& res : rep.results) rows.push_back(to_json(res));
  write_jsonl(r.dir.reports_dir() / (stem + ".jsonl"), rows);

  out << "split " << o.split << " decoding " << o.decoding << " checkpoint " << o.checkpoint << "\n"
      << "  attack success rate " << percent(rep.attack_success_rate) << "%\n"
      << "  avg successes       " << percent(rep.avg_successes) << "\n"
      << "  avg queries         " << percent(rep.avg_queries) << "\n"
      << "  diversity           " << percent(rep.diversity_score) << "\n"
      << "  median perplexity   " << percent(rep.median_perplexity) << "\n"
      << "  unique bigrams      " << rep.unique_bigrams << "\n";
}

void cmd_compare(const CompareOptions& o, std::ostream& out) {
  if (o.attack != "tokenmod") throw Error("unknown attack \"" + o.attack + "\" (only tokenmod is available)");
  const auto source = SubstitutionSource::load(o.synonyms, o.max_candidates);
  const auto stopwords = o.stopwords.empty() ? StopwordList{} : StopwordList::load(o.stopwords);
  const auto r = open_run(o.run, o.checkpoint);
  const auto& cfg = r.dir.config();
  const auto& split = r.data.split(o.split);

  const auto gen = run_eval(r, o.split, effective_decoding(o.decoding, cfg), o.threads);
  std::vector<bool> gen_success, tm_success;
  for (const auto& res : gen.results) gen_success.push_back(res.success);

  double tm_queries = 0.0;
  std::vector<nlohmann::json> traces;
  for (const auto& ex : split) {
    const auto trace = greedy_attack(ex, *r.suite.victim, source, stopwords, r.suite.scorers(),
                                     ConstraintThresholds::from(cfg));
    tm_success.push_back(trace.success);
    tm_queries += static_cast<double>(trace.queries);
    traces.push_back({{"original_id", ex.id},
                      {"success", trace.success},
                      {"queries", trace.queries},
                      {"final_text", trace.final_text},
                      {"modified_positions", trace.steps.size()}});
  }
  const double n = split.empty() ? 1.0 : static_cast<double>(split.size());
  const double tm_rate =
      100.0 * static_cast<double>(std::count(tm_success.begin(), tm_success.end(), true)) / n;
  Rng rng = Rng::derive(cfg.seed, 0xb007);
  const double p = split.empty() ? 1.0 : bootstrap_test(gen_success, tm_success, cfg.bootstrap_resamples, rng);

  std::ofstream csv(r.dir.reports_dir() / ("compare_" + o.split + ".csv"));
  csv << "method,success_pct,avg_queries,avg_successes,p_value\n";
  csv << "generative," << percent(gen.attack_success_rate) << "," << percent(gen.avg_queries) << ","
      << percent(gen.avg_successes) << "," << p << "\n";
  csv << "tokenmod," << percent(tm_rate) << "," << percent(tm_queries / n) << ",,\n";
  if (!csv) throw Error("cannot write comparison table");
  write_jsonl(r.dir.reports_dir() / ("tokenmod_" + o.split + ".jsonl"), traces);

  char line[160];
  out << "method      success %   queries\n";
  std::snprintf(line, sizeof line, "generative  %9s   %s (%s)\n", percent(gen.attack_success_rate).c_str(),
                percent(gen.avg_queries).c_str(), percent(gen.avg_successes).c_str());
  out << line;
  std::snprintf(line, sizeof line, "tokenmod    %9s   %s\n", percent(tm_rate).c_str(), percent(tm_queries / n).c_str());
  out << line;
  out << "bootstrap p (generative > tokenmod): " << p << "\n";
}

void cmd_filter(const FilterOptions& o, std::ostream& out) {
  const auto r = open_run(o.run, o.checkpoint);
  const auto& cfg = r.dir.config();
  const auto& split = r.data.split(o.split);
  const auto rep = run_eval(r, o.split, effective_decoding(o.decoding, cfg), o.threads);

  std::vector<nlohmann::json> rows;
  for (std::size_t i = 0; i < split.size(); ++i) {
    const auto& res = rep.results[i];
    if (!res.success) continue;
    Rng rng = Rng::derive(cfg.seed, i);
    for (const auto& c : filter_candidates(res.successful_candidates, *r.suite.embedder, cfg.clustering, cfg.filter,
                                           rng)) {
      auto row = to_json(c);
      row["original_id"] = res.original_id;
      row["original_text"] = split[i].text;
      rows.push_back(std::move(row));
    }
  }
  const auto file = r.dir.reports_dir() / ("filtered_" + o.split + ".jsonl");
  write_jsonl(file, rows);
  out << "wrote " << rows.size() << " filtered candidates to " << file.string() << "\n";
}

void cmd_synth(const SynthOptions& o, std::ostream& out) {
  std::vector<nlohmann::json> rows;
  for (const auto& ex : synthetic::corpus(o.count, o.seed)) {
    rows.push_back({{"id", ex.id}, {"text", ex.text}, {"label", synthetic::class_names()[ex.label]}});
  }
  write_jsonl(o.out, rows);
  out << "wrote " << rows.size() << " examples to " << o.out.string() << "\n";
}

int run(int argc, const char* const* argv, std::ostream& out, std::ostream& err) {
  CLI::App app{"Adversarial paraphrase generation: training, evaluation, and comparison"};
  app.require_subcommand(1);

  PrepareOptions prep;
  auto* p = app.add_subcommand("prepare", "Filter and split a labelled JSONL corpus");
  p->add_option("--input", prep.input, "JSONL with text and label fields")->required();
  p->add_option("--classes", prep.classes, "Comma-separated class names, in victim order")->required();
  p->add_option("--victim", prep.victim, "Models file or backend name")->capture_default_str();
  p->add_option("--max-tokens", prep.max_tokens, "Longest original kept")->capture_default_str();
  p->add_option("--out", prep.out, "Output dataset directory")->required();
  p->add_option("--seed", prep.seed)->capture_default_str();
  p->add_option("--val-frac", prep.val_frac)->capture_default_str();
  p->add_option("--test-frac", prep.test_frac)->capture_default_str();
  p->add_option("--exclude-misclassified", prep.exclude_misclassified, "Splits that drop misclassified originals")
      ->capture_default_str();

  TrainOptions tr;
  auto* t = app.add_subcommand("train", "Fine-tune the paraphraser against the victim");
  t->add_option("--data", tr.data, "Prepared dataset directory")->required();
  t->add_option("--config", tr.config, "Run config JSON")->required();
  t->add_option("--out", tr.out, "New run directory")->required();
  t->add_option("--seed", tr.seed);
  t->add_option("--models", tr.models, "Models file or backend name")->capture_default_str();
  t->add_option("--threads", tr.threads)->capture_default_str();

  EvalOptions ev;
  auto* e = app.add_subcommand("eval", "Attack a split with one decoding preset");
  e->add_option("--run", ev.run)->required();
  e->add_option("--split", ev.split)->capture_default_str();
  e->add_option("--decoding", ev.decoding, "sampling, beam, dbs-low, or dbs-high")->capture_default_str();
  e->add_option("--checkpoint", ev.checkpoint, "best, final, or initial")->capture_default_str();
  e->add_option("--threads", ev.threads)->capture_default_str();

  CompareOptions cmp;
  auto* c = app.add_subcommand("compare", "Compare against the word-substitution attack");
  c->add_option("--run", cmp.run)->required();
  c->add_option("--attack", cmp.attack)->capture_default_str();
  c->add_option("--synonyms", cmp.synonyms, "word<TAB>cand1,cand2 table")->required();
  c->add_option("--stopwords", cmp.stopwords, "One stopword per line");
  c->add_option("--split", cmp.split)->capture_default_str();
  c->add_option("--decoding", cmp.decoding)->capture_default_str();
  c->add_option("--checkpoint", cmp.checkpoint)->capture_default_str();
  c->add_option("--max-candidates", cmp.max_candidates)->capture_default_str();
  c->add_option("--threads", cmp.threads)->capture_default_str();

  FilterOptions fl;
  auto* f = app.add_subcommand("filter", "Cluster-filter the successful candidates of a split");
  f->add_option("--run", fl.run)->required();
  f->add_option("--split", fl.split)->capture_default_str();
  f->add_option("--decoding", fl.decoding)->capture_default_str();
  f->add_option("--checkpoint", fl.checkpoint)->capture_default_str();
  f->add_option("--threads", fl.threads)->capture_default_str();

  SynthOptions sy;
  auto* s = app.add_subcommand("synth", "Write the synthetic sentiment corpus as JSONL");
  s->add_option("--out", sy.out)->required();
  s->add_option("--count", sy.count)->capture_default_str();
  s->add_option("--seed", sy.seed)->capture_default_str();

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& ex) {
    return app.exit(ex, out, err);
  } catch (const CLI::ParseError& ex) {
    app.exit(ex, out, err);
    return 2;
  }

  try {
    if (p->parsed()) cmd_prepare(prep, out);
    if (t->parsed()) cmd_train(tr, out);
    if (e->parsed()) cmd_eval(ev, out);
    if (c->parsed()) cmd_compare(cmp, out);
    if (f->parsed()) cmd_filter(fl, out);
    if (s->parsed()) cmd_synth(sy, out);
  } catch (const std::exception& ex) {
    err << "error: " << ex.what() << "\n";
    return 1;
  }
  return 0;
}

}  // namespace advpara::cli
