// wdrift: corpus drift monitoring, re-annotation sampling and evaluation.

#include <algorithm>
#include <fstream>
#include <iostream>
#include <map>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

#include "wdrift/commands.hpp"

namespace {

struct Args {
  wdrift::RunConfig cfg;
  std::vector<std::string> positional;
  std::string format = "jsonl";
  std::string baseline_start = "2020-09";
  std::string baseline_end = "2021-01";
  std::string oov = "skip";
  std::string average = "token";
  std::string tokens_field, label_field, prob_field, stopwords, pool, gold, weirdness, spec, keywords;
  bool epoch = false;
};

void add_corpus_options(CLI::App* sub, Args& a) {
  sub->add_option("inputs", a.positional, "Comment files");
  sub->add_option("--input", a.cfg.inputs, "Comment file (repeatable)");
  sub->add_option("--format", a.format, "Input format")->check(CLI::IsMember({"jsonl", "csv"}));
  sub->add_flag("--epoch", a.epoch, "Timestamps are epoch seconds instead of RFC 3339");
  sub->add_option("--id-field", a.cfg.fields.id, "Id field/column")->capture_default_str();
  sub->add_option("--ts-field", a.cfg.fields.timestamp, "Timestamp field/column")->capture_default_str();
  sub->add_option("--text-field", a.cfg.fields.text, "Text field/column")->capture_default_str();
  sub->add_option("--tokens-field", a.tokens_field, "Pre-tokenized (lemmatized) token field");
  sub->add_option("--label-field", a.label_field, "Gold label field");
  sub->add_option("--prob-field", a.prob_field, "Predicted P(AntiVax) field");
}

void add_model_options(CLI::App* sub, Args& a) {
  sub->add_option("--baseline-start", a.baseline_start, "First baseline month, YYYY-MM")->capture_default_str();
  sub->add_option("--baseline-end", a.baseline_end, "Last baseline month, YYYY-MM")->capture_default_str();
  sub->add_option("--monthly-sample", a.cfg.monthly_sample, "Comments sampled per month")->capture_default_str();
  sub->add_option("--epsilon", a.cfg.epsilon, "Additive smoothing; 0 = exact ratio")->capture_default_str();
  sub->add_option("--min-count", a.cfg.min_count, "Minimum baseline count for the drift vocabulary")
      ->capture_default_str();
  sub->add_option("--stopwords", a.stopwords, "Stopword file, one word per line");
  sub->add_option("--seed", a.cfg.seed, "Random seed")->capture_default_str();
  sub->add_option("--threads", a.cfg.threads, "Counting threads")->capture_default_str();
}

/// Re-parses with values from a JSON config file for every option the
/// command line left unset. Keys are long flag names without the leading
/// dashes; underscores and hyphens are interchangeable.
std::vector<std::string> config_args(const CLI::App& sub, const nlohmann::json& config) {
  std::vector<std::string> extra;
  for (const auto& [key, value] : config.items()) {
    std::string name = key;
    std::replace(name.begin(), name.end(), '_', '-');  // baseline_start == baseline-start
    const std::string flag = name == "inputs" ? "--input" : "--" + name;
    const CLI::Option* opt = sub.get_option_no_throw(flag);
    if (!opt) throw wdrift::InputError("config: unknown key '" + key + "' for '" + sub.get_name() + "'");
    if (opt->count() > 0) continue;
    if (name == "inputs" && sub.get_option_no_throw("inputs")->count() > 0) continue;
    auto scalar = [](const nlohmann::json& v) { return v.is_string() ? v.get<std::string>() : v.dump(); };
    if (value.is_boolean()) {
      if (value.get<bool>()) extra.push_back(flag);
    } else if (value.is_array()) {
      for (const auto& v : value) {
        extra.push_back(flag);
        extra.push_back(scalar(v));
      }
    } else if (!value.is_null()) {
      extra.push_back(flag);
      extra.push_back(scalar(value));
    }
  }
  return extra;
}

}  // namespace

int main(int argc, char** argv) {
  using wdrift::InputError;
  Args a;
  std::string config_file;

  CLI::App app{"Weirdness-based drift monitoring for timestamped comment corpora"};
  app.require_subcommand(1);
  app.option_defaults()->always_capture_default();
  app.add_option("--config", config_file, "JSON config; command-line flags take precedence");

  auto* stats = app.add_subcommand("stats", "Frequency tables, monthly drift indicator and SVG chart");
  add_corpus_options(stats, a);
  add_model_options(stats, a);
  stats->add_option("--word", a.cfg.words, "Write a per-month weirdness trajectory for this word (repeatable)");

  auto* weird = app.add_subcommand("weirdness", "Word-level and comment-level weirdness");
  add_corpus_options(weird, a);
  add_model_options(weird, a);
  weird->add_option("--oov", a.oov, "Out-of-vocabulary tokens: skip or count as 1")
      ->check(CLI::IsMember({"skip", "one"}));
  weird->add_option("--average", a.average, "Average over token occurrences or unique types")
      ->check(CLI::IsMember({"token", "type"}));

  auto* sample = app.add_subcommand("sample", "Draw random and/or weirdness-weighted samples from a pool");
  sample->add_option("--pool", a.pool, "Pool CSV: id,weight");
  sample->add_option("--strategy", a.cfg.strategy, "random, weirdness or both")
      ->check(CLI::IsMember({"random", "weirdness", "both"}));
  sample->add_option("-n,--n", a.cfg.sample_size, "Sample size");
  sample->add_option("--seed", a.cfg.seed, "Random seed");
  sample->add_option("--weight-exponent", a.cfg.weight_exponent, "Use weight^x in the weighted draw");

  auto* eval = app.add_subcommand("evaluate", "Classifier reports over weirdness slices");
  eval->add_option("--gold", a.gold, "Gold CSV: id,annotator1,annotator2,supervisor");
  eval->add_option("--pred", a.cfg.predictions, "Prediction CSV id,prob as NAME=PATH or PATH (repeatable)");
  eval->add_option("predictions", a.positional, "Prediction files");
  eval->add_option("--weirdness", a.weirdness, "Comment weirdness CSV: id,weirdness");
  eval->add_option("--threshold-low", a.cfg.thresholds.low, "Low weirdness slice bound");
  eval->add_option("--threshold-high", a.cfg.thresholds.high, "High weirdness slice bound");

  auto* sim = app.add_subcommand("simulate", "Generate a synthetic drifting corpus from a JSON spec");
  sim->add_option("--spec", a.spec, "Drift spec JSON");

  auto* filter = app.add_subcommand("filter", "Keyword pre-filter");
  add_corpus_options(filter, a);
  filter->add_option("--keywords", a.keywords, "Keyword file (default: built-in Hungarian list)");
  filter->add_flag("--exact", a.cfg.exact_match, "Exact token match instead of prefix match");

  for (auto* sub : app.get_subcommands({})) sub->add_option("--out", a.cfg.out_dir, "Output directory");

  std::vector<std::string> args;
  for (int i = argc - 1; i >= 1; --i) args.emplace_back(argv[i]);  // CLI11 wants reverse order
  try {
    app.parse(std::vector<std::string>(args));
    if (!config_file.empty()) {
      nlohmann::json config = nlohmann::json::parse(wdrift::read_file(config_file), nullptr, false);
      if (config.is_discarded() || !config.is_object()) throw InputError("config: not a JSON object");
      const auto extra = config_args(*app.get_subcommands().front(), config);
      if (!extra.empty()) {
        std::vector<std::string> merged(extra.rbegin(), extra.rend());
        merged.insert(merged.end(), args.begin(), args.end());
        app.clear();
        app.parse(std::move(merged));
      }
    }
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForAllHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return wdrift::kExitInput;
  } catch (const InputError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return wdrift::kExitInput;
  }

  CLI::App* sub = app.get_subcommands().front();
  const std::string name = sub->get_name();
  auto& cfg = a.cfg;
  try {
    if (name == "evaluate") cfg.predictions.insert(cfg.predictions.end(), a.positional.begin(), a.positional.end());
    else cfg.inputs.insert(cfg.inputs.end(), a.positional.begin(), a.positional.end());
    cfg.format = a.format == "csv" ? wdrift::InputFormat::Csv : wdrift::InputFormat::Jsonl;
    if (a.epoch) cfg.fields.timestamp_format = wdrift::TimestampFormat::EpochSeconds;
    if (!a.tokens_field.empty()) cfg.fields.tokens = a.tokens_field;
    if (!a.label_field.empty()) cfg.fields.label = a.label_field;
    if (!a.prob_field.empty()) cfg.fields.prob = a.prob_field;
    cfg.baseline_start = wdrift::MonthKey::parse(a.baseline_start);
    cfg.baseline_end = wdrift::MonthKey::parse(a.baseline_end);
    cfg.oov = a.oov == "one" ? wdrift::OovPolicy::TreatAsOne : wdrift::OovPolicy::Skip;
    cfg.averaging = a.average == "type" ? wdrift::Averaging::UniqueTypes : wdrift::Averaging::TokenOccurrences;
    if (!a.stopwords.empty()) cfg.stopwords = a.stopwords;
    if (!a.pool.empty()) cfg.pool = a.pool;
    if (!a.gold.empty()) cfg.gold = a.gold;
    if (!a.weirdness.empty()) cfg.weirdness_file = a.weirdness;
    if (!a.spec.empty()) cfg.spec = a.spec;
    if (!a.keywords.empty()) cfg.keywords = a.keywords;
  } catch (const InputError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return wdrift::kExitInput;
  }
  return wdrift::run_command(name, cfg, std::cout, std::cerr);
}
