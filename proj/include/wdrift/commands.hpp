#pragma once

#include <openssl/evp.h>

#include <algorithm>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <map>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include <json.hpp>

#include "wdrift/core.hpp"
#include "wdrift/driftgen.hpp"
#include "wdrift/evaluate.hpp"
#include "wdrift/ingest.hpp"
#include "wdrift/sampler.hpp"
#include "wdrift/svg.hpp"
#include "wdrift/weirdness.hpp"

namespace wdrift {

namespace fs = std::filesystem;

/// Exit codes shared by every subcommand.
enum ExitCode : int { kExitOk = 0, kExitInternal = 1, kExitInput = 2 };

struct RunConfig {
  // corpus input
  std::vector<std::string> inputs;
  InputFormat format = InputFormat::Jsonl;
  FieldMapping fields;
  // weirdness model
  MonthKey baseline_start{2020, 9};
  MonthKey baseline_end{2021, 1};
  std::size_t monthly_sample = 40000;
  double epsilon = 0.5;
  std::uint64_t min_count = 5;
  Thresholds thresholds;
  std::optional<std::string> stopwords;
  OovPolicy oov = OovPolicy::Skip;
  Averaging averaging = Averaging::TokenOccurrences;
  std::vector<std::string> words;  // trajectories for `stats`
  // sample
  std::optional<std::string> pool;
  std::string strategy = "random";  // random | weirdness | both
  std::size_t sample_size = 1500;
  double weight_exponent = 1.0;
  // evaluate
  std::optional<std::string> gold;
  std::vector<std::string> predictions;  // "name=path" or "path"
  std::optional<std::string> weirdness_file;
  // simulate
  std::optional<std::string> spec;
  // filter
  std::optional<std::string> keywords;
  bool exact_match = false;
  // run
  std::uint64_t seed = 1;
  unsigned threads = 1;
  std::string out_dir = "out";

  void validate() const {
    if (baseline_end < baseline_start) throw InputError("--baseline-end is before --baseline-start");
    if (monthly_sample < 1) throw InputError("--monthly-sample must be >= 1");
    if (!(epsilon >= 0.0) || !std::isfinite(epsilon)) throw InputError("--epsilon must be finite and >= 0");
    if (!(thresholds.low <= thresholds.high)) throw InputError("--threshold-low must not exceed --threshold-high");
    if (strategy != "random" && strategy != "weirdness" && strategy != "both")
      throw InputError("--strategy must be random, weirdness or both");
    if (threads < 1) throw InputError("--threads must be >= 1");
  }

  nlohmann::ordered_json to_json() const {
    nlohmann::ordered_json j;
    j["inputs"] = inputs;
    j["format"] = format == InputFormat::Jsonl ? "jsonl" : "csv";
    j["fields"] = {{"id", fields.id},
                   {"timestamp", fields.timestamp},
                   {"text", fields.text},
                   {"tokens", fields.tokens ? nlohmann::ordered_json(*fields.tokens) : nullptr},
                   {"label", fields.label ? nlohmann::ordered_json(*fields.label) : nullptr},
                   {"prob", fields.prob ? nlohmann::ordered_json(*fields.prob) : nullptr},
                   {"epoch", fields.timestamp_format == TimestampFormat::EpochSeconds}};
    j["baseline_start"] = baseline_start.str();
    j["baseline_end"] = baseline_end.str();
    j["monthly_sample"] = monthly_sample;
    j["epsilon"] = epsilon;
    j["min_count"] = min_count;
    j["threshold_low"] = thresholds.low;
    j["threshold_high"] = thresholds.high;
    j["stopwords"] = stopwords ? nlohmann::ordered_json(*stopwords) : nullptr;
    j["oov"] = oov == OovPolicy::Skip ? "skip" : "one";
    j["average"] = averaging == Averaging::TokenOccurrences ? "token" : "type";
    j["words"] = words;
    j["pool"] = pool ? nlohmann::ordered_json(*pool) : nullptr;
    j["strategy"] = strategy;
    j["n"] = sample_size;
    j["weight_exponent"] = weight_exponent;
    j["gold"] = gold ? nlohmann::ordered_json(*gold) : nullptr;
    j["predictions"] = predictions;
    j["weirdness"] = weirdness_file ? nlohmann::ordered_json(*weirdness_file) : nullptr;
    j["spec"] = spec ? nlohmann::ordered_json(*spec) : nullptr;
    j["keywords"] = keywords ? nlohmann::ordered_json(*keywords) : nullptr;
    j["exact"] = exact_match;
    j["seed"] = seed;
    j["out"] = out_dir;
    return j;
  }
};

// ---------------------------------------------------------------------------
// Run directory and manifest

inline std::string sha256_hex(std::string_view data) {
  unsigned char md[EVP_MAX_MD_SIZE];
  unsigned int len = 0;
  if (EVP_Digest(data.data(), data.size(), md, &len, EVP_sha256(), nullptr) != 1)
    throw std::runtime_error("SHA-256 failed");
  static constexpr char hex[] = "0123456789abcdef";
  std::string out;
  for (unsigned i = 0; i < len; ++i) {
    out.push_back(hex[md[i] >> 4]);
    out.push_back(hex[md[i] & 0xF]);
  }
  return out;
}

inline std::string read_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw InputError("cannot open '" + path + "'");
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

/// Output directory named after the command and a digest of the config and
/// input contents, so identical runs land in (and overwrite) the same place.
class RunDirectory {
 public:
  RunDirectory(std::string command, const RunConfig& cfg, const std::vector<std::string>& input_paths)
      : command_(std::move(command)) {
    config_ = cfg.to_json();
    auto identity = config_;
    identity.erase("out");  // where the run is written is not part of what it computes
    config_hash_ = sha256_hex(identity.dump());
    std::string digest_src = command_ + "\n" + config_hash_;
    for (const auto& p : input_paths) {
      const auto h = sha256_hex(read_file(p));
      inputs_.push_back({{"path", p}, {"sha256", h}});
      digest_src += "\n" + h;
    }
    path_ = fs::path(cfg.out_dir) / (command_ + "-" + sha256_hex(digest_src).substr(0, 12));
    fs::create_directories(path_);
  }

  const fs::path& path() const { return path_; }

  void write(const std::string& name, const std::string& content) {
    const auto p = path_ / name;
    if (p.has_parent_path()) fs::create_directories(p.parent_path());
    std::ofstream out(p, std::ios::binary | std::ios::trunc);
    if (!out) throw std::runtime_error("cannot write '" + p.string() + "'");
    out << content;
    outputs_[name] = sha256_hex(content);
  }

  void finish(nlohmann::ordered_json extra = nlohmann::ordered_json::object()) {
    nlohmann::ordered_json m;
    m["command"] = command_;
    m["config"] = config_;
    m["config_sha256"] = config_hash_;
    m["inputs"] = inputs_;
    nlohmann::ordered_json outs = nlohmann::ordered_json::array();
    for (const auto& [name, h] : outputs_) outs.push_back({{"file", name}, {"sha256", h}});
    m["outputs"] = outs;
    m["summary"] = std::move(extra);
    std::ofstream(path_ / "manifest.json", std::ios::binary | std::ios::trunc) << m.dump(2) << "\n";
  }

 private:
  std::string command_;
  fs::path path_;
  nlohmann::ordered_json config_;
  std::string config_hash_;
  nlohmann::ordered_json inputs_ = nlohmann::ordered_json::array();
  std::map<std::string, std::string> outputs_;
};

// ---------------------------------------------------------------------------
// Shared loading

inline std::vector<CommentRecord> load_corpus(const RunConfig& cfg, std::ostream& log) {
  if (cfg.inputs.empty()) throw InputError("no input files given");
  std::vector<CommentRecord> all;
  std::unordered_set<std::string> ids;
  std::size_t dup = 0;
  for (const auto& path : cfg.inputs) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw InputError("cannot open '" + path + "'");
    ParseResult r = parse_comments(in, cfg.format, cfg.fields);
    if (r.skipped) {
      log << path << ": skipped " << r.skipped << " row(s)\n";
      for (std::size_t i = 0; i < r.errors.size() && i < 5; ++i)
        log << "  line " << r.errors[i].line << ": " << r.errors[i].message << "\n";
    }
    for (auto& c : r.records) {
      if (!ids.insert(c.id).second) {
        ++dup;
        continue;
      }
      all.push_back(std::move(c));
    }
  }
  if (dup) log << "skipped " << dup << " duplicate id(s) across input files\n";
  return all;
}

inline std::optional<Stopwords> load_stopwords(const RunConfig& cfg) {
  if (!cfg.stopwords) return std::nullopt;
  std::ifstream in(*cfg.stopwords);
  if (!in) throw InputError("cannot open '" + *cfg.stopwords + "'");
  const auto list = KeywordList::load(in);
  return Stopwords(list.words().begin(), list.words().end());
}

struct PreparedCorpus {
  MonthBuckets full;                          // every parsed comment, by month
  std::vector<CommentRecord> baseline;        // sampled baseline months
  std::map<MonthKey, std::vector<CommentRecord>> months;  // sampled scored months
};

/// Buckets by month, draws the per-month sample, and splits baseline from
/// scored months.
inline PreparedCorpus prepare_corpus(const RunConfig& cfg, std::ostream& log) {
  PreparedCorpus pc;
  pc.full = bucket_by_month(load_corpus(cfg, log));
  auto sampled = monthly_sample(pc.full, cfg.monthly_sample, cfg.seed);
  for (auto& [m, comments] : sampled) {
    if (m >= cfg.baseline_start && m <= cfg.baseline_end)
      pc.baseline.insert(pc.baseline.end(), std::make_move_iterator(comments.begin()),
                         std::make_move_iterator(comments.end()));
    else
      pc.months.emplace(m, std::move(comments));
  }
  if (pc.baseline.empty())
    throw InputError("empty baseline: no comments between " + cfg.baseline_start.str() + " and " +
                     cfg.baseline_end.str());
  if (pc.months.empty()) throw InputError("no months outside the baseline period to score");
  return pc;
}

inline WeirdnessModel build_model(const RunConfig& cfg, const PreparedCorpus& pc, const Stopwords* stop) {
  WeirdnessOptions opt;
  opt.epsilon = cfg.epsilon;
  opt.min_baseline_count = cfg.min_count;
  opt.stopwords = stop;
  opt.threads = cfg.threads;
  return compute_model(pc.baseline, pc.months, opt);
}

inline std::vector<std::string> corpus_input_paths(const RunConfig& cfg) {
  std::vector<std::string> p = cfg.inputs;
  if (cfg.stopwords) p.push_back(*cfg.stopwords);
  return p;
}

// ---------------------------------------------------------------------------
// Subcommands. Each throws InputError for bad input; run_command maps
// exceptions to exit codes.

/// Frequency tables, drift indicator CSV + chart, optional word trajectories.
inline fs::path cmd_stats(const RunConfig& cfg, std::ostream& log) {
  cfg.validate();
  RunDirectory run("stats", cfg, corpus_input_paths(cfg));
  const auto stop = load_stopwords(cfg);
  const auto pc = prepare_corpus(cfg, log);
  const auto model = build_model(cfg, pc, stop ? &*stop : nullptr);

  auto table_csv = [](const FrequencyTable& t) {
    std::ostringstream s;
    write_frequency_table(s, t);
    return s.str();
  };
  run.write("freq/baseline.csv", table_csv(model.baseline));
  for (const auto& [m, t] : model.monthly) run.write("freq/" + m.str() + ".csv", table_csv(t));

  std::ostringstream drift;
  write_drift_summary(drift, model);
  run.write("drift.csv", drift.str());

  std::vector<std::string> labels;
  svg::Series series{"drift indicator", {}};
  for (const auto& [m, d] : model.drift_indicator) {
    labels.push_back(m.str());
    series.values.push_back(d);
  }
  run.write("drift.svg", svg::line_chart("Monthly standard deviation of word weirdness", labels, {series},
                                         "std-dev of weirdness"));

  if (!cfg.words.empty()) {
    std::ostringstream traj;
    traj << "month,word,weirdness\n";
    std::vector<svg::Series> word_series;
    for (const auto& raw : cfg.words) {
      const std::string w = to_lower(raw);
      svg::Series s{w, {}};
      for (const auto& [m, t] : model.monthly) {
        double v = std::numeric_limits<double>::quiet_NaN();
        try {
          v = word_weirdness(model.baseline, t, w, cfg.epsilon);
        } catch (const InputError&) {
          // unknown word in exact mode: left blank
        }
        s.values.push_back(v);
        traj << m.str() << ',' << csv_escape(w) << ',' << (std::isnan(v) ? "" : format_double(v)) << '\n';
      }
      word_series.push_back(std::move(s));
    }
    run.write("word_trajectory.csv", traj.str());
    run.write("word_trajectory.svg", svg::line_chart("Word weirdness by month", labels, word_series, "weirdness"));
  }

  nlohmann::ordered_json summary;
  summary["baseline_comments"] = pc.baseline.size();
  summary["months"] = model.monthly.size();
  summary["vocabulary"] = model.vocabulary.size();
  run.finish(summary);
  return run.path();
}

/// Word-level and comment-level weirdness.
inline fs::path cmd_weirdness(const RunConfig& cfg, std::ostream& log) {
  cfg.validate();
  RunDirectory run("weirdness", cfg, corpus_input_paths(cfg));
  const auto stop = load_stopwords(cfg);
  const auto pc = prepare_corpus(cfg, log);
  const auto model = build_model(cfg, pc, stop ? &*stop : nullptr);

  std::ostringstream words, summary_csv, comments;
  write_word_weirdness(words, model);
  write_drift_summary(summary_csv, model);
  comments << "id,month,weirdness\n";
  std::size_t undefined = 0, scored = 0;
  const CommentWeirdnessOptions copt{cfg.oov, cfg.averaging};
  for (const auto& [m, records] : pc.full) {
    if (!model.has_month(m)) continue;
    for (const auto& r : records) {
      const auto w = comment_weirdness(model, m, r.tokens, copt);
      ++scored;
      if (!w) ++undefined;
      comments << csv_escape(r.id) << ',' << m.str() << ',' << (w ? format_double(*w) : "") << '\n';
    }
  }
  if (undefined) log << undefined << " comment(s) have undefined weirdness (no in-vocabulary tokens)\n";
  run.write("word_weirdness.csv", words.str());
  run.write("summary.csv", summary_csv.str());
  run.write("comment_weirdness.csv", comments.str());
  run.finish({{"comments_scored", scored}, {"undefined", undefined}, {"vocabulary", model.vocabulary.size()}});
  return run.path();
}

/// Random and/or weirdness-weighted re-annotation samples.
inline fs::path cmd_sample(const RunConfig& cfg, std::ostream& log) {
  cfg.validate();
  if (!cfg.pool) throw InputError("--pool is required");
  RunDirectory run("sample", cfg, {*cfg.pool});
  std::ifstream in(*cfg.pool, std::ios::binary);
  if (!in) throw InputError("cannot open '" + *cfg.pool + "'");
  const SamplePool pool = read_pool_csv(in);

  auto lines = [](const std::vector<std::string>& ids) {
    std::string s;
    for (const auto& id : ids) s += id + "\n";
    return s;
  };
  nlohmann::ordered_json summary;
  summary["pool"] = pool.items.size();
  std::vector<std::string> random_ids, weird_ids;
  const bool want_random = cfg.strategy != "weirdness";
  const bool want_weird = cfg.strategy != "random";
  if (want_weird && !pool.has_weights()) throw InputError("weirdness strategy needs weights in the pool file");
  if (want_random) {
    random_ids = random_sample(pool, cfg.sample_size, cfg.seed);
    run.write("sample_random.txt", lines(random_ids));
    summary["random"] = random_ids.size();
  }
  if (want_weird) {
    auto ws = weighted_sample(pool, cfg.sample_size, cfg.seed, cfg.weight_exponent);
    weird_ids = std::move(ws.ids);
    run.write("sample_weirdness.txt", lines(weird_ids));
    summary["weirdness"] = weird_ids.size();
    summary["excluded_undefined"] = ws.excluded.size();
    if (!ws.excluded.empty()) {
      log << ws.excluded.size() << " pool item(s) without a weight were excluded from the weighted draw\n";
      run.write("excluded.txt", lines(ws.excluded));
    }
  }
  if (want_random && want_weird) {
    const auto ov = overlap_report(random_ids, weird_ids);
    run.write("overlap.json", ov.to_json().dump(2) + "\n");
    summary["overlap"] = ov.count;
  }
  run.finish(summary);
  return run.path();
}

namespace detail {

inline std::pair<std::string, std::string> split_model_arg(const std::string& arg) {
  const auto eq = arg.find('=');
  if (eq != std::string::npos && eq > 0) return {arg.substr(0, eq), arg.substr(eq + 1)};
  return {fs::path(arg).stem().string(), arg};
}

}  // namespace detail

/// Per-model reports over weirdness slices plus the confidence table.
inline fs::path cmd_evaluate(const RunConfig& cfg, std::ostream& log) {
  cfg.validate();
  if (!cfg.gold) throw InputError("--gold is required");
  if (cfg.predictions.empty()) throw InputError("at least one prediction file is required");
  std::map<std::string, std::string> model_paths;
  for (const auto& arg : cfg.predictions) {
    auto [name, path] = detail::split_model_arg(arg);
    if (!model_paths.emplace(name, path).second) throw InputError("duplicate model name '" + name + "'");
  }
  std::vector<std::string> input_paths{*cfg.gold};
  for (const auto& [n, p] : model_paths) input_paths.push_back(p);
  if (cfg.weirdness_file) input_paths.push_back(*cfg.weirdness_file);
  RunDirectory run("evaluate", cfg, input_paths);

  std::ifstream gin(*cfg.gold, std::ios::binary);
  if (!gin) throw InputError("cannot open '" + *cfg.gold + "'");
  const auto gold = read_gold(gin);
  if (gold.empty()) throw InputError("gold file has no rows");
  Predictions gold_ids;
  for (const auto& g : gold) gold_ids.emplace(g.id, 0.0);

  std::map<std::string, Predictions> models;
  for (const auto& [name, path] : model_paths) {
    std::ifstream pin(path, std::ios::binary);
    if (!pin) throw InputError("cannot open '" + path + "'");
    auto preds = read_predictions(pin);
    const auto missing = id_mismatch(gold_ids, preds);
    if (!missing.empty())
      throw InputError("model '" + name + "': ids do not match the gold file: " + join_first(missing));
    models.emplace(name, std::move(preds));
  }

  WeirdnessById weirdness;
  if (cfg.weirdness_file) {
    std::ifstream win(*cfg.weirdness_file, std::ios::binary);
    if (!win) throw InputError("cannot open '" + *cfg.weirdness_file + "'");
    weirdness = read_weirdness_csv(win);
  }

  // Agreement
  std::vector<Label> a1, a2;
  std::size_t disagreements = 0;
  for (const auto& g : gold) {
    a1.push_back(g.annotation.annotator1);
    a2.push_back(g.annotation.annotator2);
    if (g.annotation.annotator1 != g.annotation.annotator2) ++disagreements;
  }
  nlohmann::ordered_json agreement{{"n", gold.size()},
                                   {"kappa", cohens_kappa(a1, a2)},
                                   {"disagreements", disagreements}};
  run.write("agreement.json", agreement.dump(2) + "\n");

  const auto& t = cfg.thresholds;
  const std::string lo = format_fixed(t.low, 1), hi = format_fixed(t.high, 1);
  struct SliceDef {
    std::string name;
    std::optional<Band> band;
  };
  std::vector<SliceDef> slices{{"all", std::nullopt}};
  if (cfg.weirdness_file) {
    slices.push_back({"weird<" + lo, Band::Low});
    slices.push_back({lo + "<=weird<=" + hi, Band::Middle});
    slices.push_back({"weird>" + hi, Band::High});
  }

  std::ostringstream csv, text;
  write_eval_csv_header(csv);
  for (const auto& [name, preds] : models) {
    std::vector<EvalReport> reports;
    for (const auto& s : slices) {
      std::vector<Label> g;
      std::vector<double> p;
      for (const auto& rec : gold) {
        if (s.band) {
          auto it = weirdness.find(rec.id);
          if (band_of(it == weirdness.end() ? std::nullopt : it->second, t) != s.band) continue;
        }
        g.push_back(rec.annotation.final_label);
        p.push_back(preds.at(rec.id));
      }
      EvalReport r;
      r.slice = s.name;
      if (!g.empty()) r = evaluate_predictions(g, p, s.name);
      for (const auto& w : r.warnings) log << name << " [" << s.name << "]: " << w << "\n";
      write_eval_csv_rows(csv, name, r);
      reports.push_back(std::move(r));
    }
    text << render_eval_section(name, reports) << "\n";
  }
  run.write("evaluation.csv", csv.str());
  run.write("evaluation.txt", text.str());

  const auto ct = confidence_table(models, weirdness, t);
  std::ostringstream ccsv;
  write_confidence_csv(ccsv, ct);
  run.write("confidence.csv", ccsv.str());
  run.write("confidence.txt", render_confidence_table(ct));
  if (cfg.weirdness_file && ct.undefined)
    log << ct.undefined << " record(s) have no weirdness value and fall in no slice\n";
  run.finish({{"records", gold.size()}, {"models", models.size()}, {"no_weirdness", ct.undefined}});
  return run.path();
}

/// Synthetic corpus plus its analytic expectations.
inline fs::path cmd_simulate(const RunConfig& cfg, std::ostream& log) {
  if (!cfg.spec) throw InputError("--spec is required");
  RunDirectory run("simulate", cfg, {*cfg.spec});
  nlohmann::json j = nlohmann::json::parse(read_file(*cfg.spec), nullptr, false);
  if (j.is_discarded()) throw InputError("drift spec: malformed JSON");
  const DriftSpec spec = DriftSpec::from_json(j);
  const auto corpus = generate_corpus(spec);

  std::ostringstream jsonl, expected, drift;
  write_comments_jsonl(jsonl, corpus.all_comments());
  expected << "month,word,expected_weirdness\n";
  drift << "month,expected_drift_indicator\n";
  for (const auto& [m, vals] : corpus.expected_weirdness) {
    for (std::size_t i = 0; i < vals.size(); ++i)
      expected << m.str() << ',' << csv_escape(spec.vocabulary[i]) << ',' << format_double(vals[i]) << '\n';
    drift << m.str() << ',' << format_double(expected_drift_indicator(spec, m)) << '\n';
  }
  run.write("corpus.jsonl", jsonl.str());
  run.write("expected_weirdness.csv", expected.str());
  run.write("expected_drift.csv", drift.str());
  run.write("spec.json", spec.to_json().dump(2) + "\n");
  log << "generated " << corpus.baseline.size() << " baseline and "
      << corpus.all_comments().size() - corpus.baseline.size() << " monthly comments\n";
  run.finish({{"baseline_comments", corpus.baseline.size()}, {"months", corpus.monthly.size()}});
  return run.path();
}

/// Keyword pre-filter.
inline fs::path cmd_filter(const RunConfig& cfg, std::ostream& log) {
  std::vector<std::string> inputs = cfg.inputs;
  if (cfg.keywords) inputs.push_back(*cfg.keywords);
  RunDirectory run("filter", cfg, inputs);
  KeywordList keywords = KeywordList::hungarian_antivax();
  if (cfg.keywords) {
    std::ifstream in(*cfg.keywords);
    if (!in) throw InputError("cannot open '" + *cfg.keywords + "'");
    keywords = KeywordList::load(in);
  }
  auto result = keyword_filter(load_corpus(cfg, log), keywords, cfg.exact_match ? MatchMode::Exact : MatchMode::Prefix);
  std::ostringstream out;
  write_comments_jsonl(out, result.retained);
  run.write("retained.jsonl", out.str());
  run.write("filter_stats.json", result.stats.to_json().dump(2) + "\n");
  log << "retained " << result.stats.retained << ", removed " << result.stats.removed << "\n";
  run.finish(result.stats.to_json());
  return run.path();
}

/// Runs a subcommand, printing the run directory to `out` and errors to
/// `err`. Returns 0 on success, 2 for input/config errors, 1 otherwise.
inline int run_command(const std::string& name, const RunConfig& cfg, std::ostream& out, std::ostream& err) {
  try {
    fs::path dir;
    if (name == "stats") dir = cmd_stats(cfg, err);
    else if (name == "weirdness") dir = cmd_weirdness(cfg, err);
    else if (name == "sample") dir = cmd_sample(cfg, err);
    else if (name == "evaluate") dir = cmd_evaluate(cfg, err);
    else if (name == "simulate") dir = cmd_simulate(cfg, err);
    else if (name == "filter") dir = cmd_filter(cfg, err);
    else throw InputError("unknown command '" + name + "'");
    out << dir.string() << "\n";
    return kExitOk;
  } catch (const InputError& e) {
    err << "error: " << e.what() << "\n";
    return kExitInput;
  } catch (const std::exception& e) {
    err << "internal error: " << e.what() << "\n";
    return kExitInternal;
  }
}

}  // namespace wdrift
