#pragma once

#include <algorithm>
#include <array>
#include <cmath>
#include <cstdint>
#include <istream>
#include <limits>
#include <map>
#include <optional>
#include <ostream>
#include <span>
#include <sstream>
#include <string>
#include <vector>

#include "wdrift/core.hpp"
#include "wdrift/csv.hpp"

namespace wdrift {

// ---------------------------------------------------------------------------
// Annotation agreement

/// Agreement keeps the shared label; disagreement defers to the supervisor.
inline Label adjudicate(Label a1, Label a2, std::optional<Label> supervisor) {
  if (a1 == a2) return a1;
  if (!supervisor) throw InputError("unadjudicated disagreement");
  return *supervisor;
}

inline AnnotationRecord make_annotation(Label a1, Label a2, std::optional<Label> supervisor) {
  return {a1, a2, supervisor, adjudicate(a1, a2, supervisor)};
}

/// Cohen's kappa over any ordered label type. Returns 1 when chance
/// agreement is 1 (both raters constant and equal).
template <class L>
double cohens_kappa(std::span<const L> a, std::span<const L> b) {
  if (a.size() != b.size()) throw InputError("kappa: label sequences differ in length");
  if (a.empty()) throw InputError("kappa: empty label sequences");
  std::map<L, double> ma, mb;
  double agree = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) {
    ma[a[i]] += 1.0;
    mb[b[i]] += 1.0;
    if (a[i] == b[i]) agree += 1.0;
  }
  const double n = static_cast<double>(a.size());
  const double po = agree / n;
  double pe = 0.0;
  for (const auto& [label, ca] : ma) {
    auto it = mb.find(label);
    if (it != mb.end()) pe += (ca / n) * (it->second / n);
  }
  if (pe == 1.0) return po == 1.0 ? 1.0 : 0.0;
  return (po - pe) / (1.0 - pe);
}

template <class L>
double cohens_kappa(const std::vector<L>& a, const std::vector<L>& b) {
  return cohens_kappa(std::span<const L>(a), std::span<const L>(b));
}

// ---------------------------------------------------------------------------
// Classifier metrics

/// |0.5 - p|: distance of P(AntiVax) from maximal uncertainty, in [0, 0.5].
inline double confidence(double prob) {
  if (!(prob >= 0.0 && prob <= 1.0)) throw InputError("probability out of [0,1]");
  return std::abs(0.5 - prob);
}

/// Hard label from P(AntiVax); 0.5 goes to AntiVax.
inline Label predicted_label(double prob, double cutoff = 0.5) {
  return prob >= cutoff ? Label::AntiVax : Label::Other;
}

inline constexpr std::array<Label, 2> kLabels{Label::AntiVax, Label::Other};

inline constexpr std::size_t label_index(Label l) { return l == Label::AntiVax ? 0 : 1; }

struct ClassMetrics {
  double precision = 0.0;
  double recall = 0.0;
  double f1 = 0.0;
  std::uint64_t support = 0;  // gold count
};

struct EvalReport {
  std::string slice = "all";
  std::array<std::array<std::uint64_t, 2>, 2> confusion{};  // [gold][predicted]
  std::uint64_t n = 0;
  double accuracy = 0.0;
  std::map<Label, ClassMetrics> per_class;
  ClassMetrics macro;
  ClassMetrics weighted;
  std::optional<double> mean_confidence;
  std::vector<std::string> warnings;
};

inline double harmonic_f1(double p, double r) { return p + r == 0.0 ? 0.0 : 2.0 * p * r / (p + r); }

/// Per-class precision/recall/F1, accuracy, and macro and support-weighted
/// averages. A zero denominator gives 0 and records a warning.
inline EvalReport confusion_metrics(std::span<const Label> gold, std::span<const Label> predicted) {
  if (gold.size() != predicted.size()) throw InputError("gold and predicted labels differ in length");
  if (gold.empty()) throw InputError("no labels to evaluate");
  EvalReport r;
  r.n = gold.size();
  for (std::size_t i = 0; i < gold.size(); ++i) ++r.confusion[label_index(gold[i])][label_index(predicted[i])];

  std::uint64_t correct = 0;
  for (std::size_t c = 0; c < 2; ++c) correct += r.confusion[c][c];
  r.accuracy = static_cast<double>(correct) / static_cast<double>(r.n);

  for (Label l : kLabels) {
    const auto c = label_index(l), o = 1 - c;
    const auto tp = r.confusion[c][c], fp = r.confusion[o][c], fn = r.confusion[c][o];
    ClassMetrics m;
    m.support = tp + fn;
    if (tp + fp == 0) r.warnings.push_back("precision undefined for " + std::string(to_string(l)) + ", set to 0");
    else m.precision = static_cast<double>(tp) / static_cast<double>(tp + fp);
    if (tp + fn == 0) r.warnings.push_back("recall undefined for " + std::string(to_string(l)) + ", set to 0");
    else m.recall = static_cast<double>(tp) / static_cast<double>(tp + fn);
    m.f1 = harmonic_f1(m.precision, m.recall);
    r.per_class[l] = m;
  }
  for (const auto& [l, m] : r.per_class) {
    const double w = static_cast<double>(m.support) / static_cast<double>(r.n);
    r.macro.precision += m.precision / 2.0;
    r.macro.recall += m.recall / 2.0;
    r.macro.f1 += m.f1 / 2.0;
    r.weighted.precision += w * m.precision;
    r.weighted.recall += w * m.recall;
    r.weighted.f1 += w * m.f1;
  }
  r.macro.support = r.weighted.support = r.n;
  return r;
}

inline EvalReport confusion_metrics(const std::vector<Label>& gold, const std::vector<Label>& predicted) {
  return confusion_metrics(std::span<const Label>(gold), std::span<const Label>(predicted));
}

/// Metrics from P(AntiVax) scores, including mean confidence.
inline EvalReport evaluate_predictions(std::span<const Label> gold, std::span<const double> probs,
                                       std::string slice = "all") {
  if (gold.size() != probs.size()) throw InputError("gold labels and predictions differ in length");
  std::vector<Label> pred;
  pred.reserve(probs.size());
  double conf = 0.0;
  for (double p : probs) {
    conf += confidence(p);
    pred.push_back(predicted_label(p));
  }
  EvalReport r = confusion_metrics(gold, pred);
  r.mean_confidence = conf / static_cast<double>(probs.size());
  r.slice = std::move(slice);
  return r;
}

// ---------------------------------------------------------------------------
// Weirdness slices

struct Thresholds {
  double low = 0.9;
  double high = 1.2;
};

enum class Band { Low, Middle, High };

/// Low: w < low. High: w > high. Middle: low <= w <= high.
inline std::optional<Band> band_of(std::optional<double> w, const Thresholds& t) {
  if (!w || std::isnan(*w)) return std::nullopt;
  if (*w < t.low) return Band::Low;
  if (*w > t.high) return Band::High;
  return Band::Middle;
}

enum class SliceOp { Less, Greater };

template <class T>
struct Slice {
  std::vector<T> records;
  std::size_t undefined = 0;  // records without a weirdness value
};

/// Records whose weirdness is strictly below / above `threshold`.
/// `weirdness_of(record)` returns std::optional<double>.
template <class T, class Proj>
Slice<T> slice_by_weirdness(std::span<const T> records, Proj&& weirdness_of, SliceOp op, double threshold) {
  Slice<T> out;
  for (const auto& r : records) {
    const std::optional<double> w = weirdness_of(r);
    if (!w || std::isnan(*w)) {
      ++out.undefined;
      continue;
    }
    if (op == SliceOp::Less ? *w < threshold : *w > threshold) out.records.push_back(r);
  }
  return out;
}

// ---------------------------------------------------------------------------
// Confidence table

using Predictions = std::map<std::string, double>;   // id -> P(AntiVax)
using WeirdnessById = std::map<std::string, std::optional<double>>;

struct ConfidenceRow {
  double low = std::numeric_limits<double>::quiet_NaN();
  double all = std::numeric_limits<double>::quiet_NaN();
  double high = std::numeric_limits<double>::quiet_NaN();
  double middle = std::numeric_limits<double>::quiet_NaN();
  std::size_t n_low = 0, n_all = 0, n_high = 0, n_middle = 0;
};

struct ConfidenceTable {
  Thresholds thresholds;
  std::map<std::string, ConfidenceRow> rows;  // model label order
  std::size_t undefined = 0;                  // records with no weirdness
};

inline std::vector<std::string> id_mismatch(const Predictions& reference, const Predictions& other) {
  std::vector<std::string> out;
  for (const auto& [id, p] : reference)
    if (!other.count(id)) out.push_back(id);
  for (const auto& [id, p] : other)
    if (!reference.count(id)) out.push_back(id);
  return out;
}

inline std::string join_first(const std::vector<std::string>& ids, std::size_t limit = 10) {
  std::string s;
  for (std::size_t i = 0; i < ids.size() && i < limit; ++i) s += (i ? ", " : "") + ids[i];
  if (ids.size() > limit) s += ", ... (" + std::to_string(ids.size()) + " total)";
  return s;
}

/// Mean confidence per model over weird<low, all records, weird>high and the
/// middle band. All models must cover the same ids.
inline ConfidenceTable confidence_table(const std::map<std::string, Predictions>& models,
                                        const WeirdnessById& weirdness, const Thresholds& t = {}) {
  ConfidenceTable table;
  table.thresholds = t;
  if (models.empty()) return table;
  const auto& reference = models.begin()->second;
  for (const auto& [name, preds] : models) {
    auto missing = id_mismatch(reference, preds);
    if (!missing.empty())
      throw InputError("model '" + name + "' does not cover the same ids as '" + models.begin()->first +
                       "': " + join_first(missing));
  }
  for (const auto& [id, p] : reference) {
    auto it = weirdness.find(id);
    if (!band_of(it == weirdness.end() ? std::nullopt : it->second, t)) ++table.undefined;
  }
  for (const auto& [name, preds] : models) {
    double s_low = 0, s_all = 0, s_high = 0, s_mid = 0;
    ConfidenceRow row;
    for (const auto& [id, p] : preds) {
      const double c = confidence(p);
      s_all += c;
      ++row.n_all;
      auto it = weirdness.find(id);
      const auto band = band_of(it == weirdness.end() ? std::nullopt : it->second, t);
      if (!band) continue;
      switch (*band) {
        case Band::Low: s_low += c; ++row.n_low; break;
        case Band::Middle: s_mid += c; ++row.n_middle; break;
        case Band::High: s_high += c; ++row.n_high; break;
      }
    }
    auto mean = [](double s, std::size_t n) { return n ? s / static_cast<double>(n) : std::numeric_limits<double>::quiet_NaN(); };
    row.low = mean(s_low, row.n_low);
    row.all = mean(s_all, row.n_all);
    row.high = mean(s_high, row.n_high);
    row.middle = mean(s_mid, row.n_middle);
    table.rows.emplace(name, row);
  }
  return table;
}

// ---------------------------------------------------------------------------
// File formats

/// CSV id,prob
inline Predictions read_predictions(std::istream& in) {
  Predictions out;
  CsvReader reader(in);
  std::vector<std::string> row;
  if (!reader.next(row)) return out;
  const CsvHeader header(row);
  const auto id_col = header.require("id", "prediction file");
  const auto p_col = header.require("prob", "prediction file");
  while (reader.next(row)) {
    if (row.size() == 1 && trim(row[0]).empty()) continue;
    const auto at = " at line " + std::to_string(reader.line());
    if (row.size() <= std::max(id_col, p_col)) throw InputError("prediction file: short row" + at);
    auto p = parse_double(row[p_col]);
    if (!p || !(*p >= 0.0 && *p <= 1.0)) throw InputError("prediction file: probability out of [0,1]" + at);
    if (!out.emplace(std::string(trim(row[id_col])), *p).second)
      throw InputError("prediction file: duplicate id" + at);
  }
  return out;
}

struct GoldRecord {
  std::string id;
  AnnotationRecord annotation;
};

/// CSV id,annotator1,annotator2,supervisor (supervisor may be blank when the
/// annotators agree). A single "label" column is accepted instead, in which
/// case both annotators are set to it.
inline std::vector<GoldRecord> read_gold(std::istream& in) {
  std::vector<GoldRecord> out;
  CsvReader reader(in);
  std::vector<std::string> row;
  if (!reader.next(row)) return out;
  const CsvHeader header(row);
  const auto id_col = header.require("id", "gold file");
  const auto label_col = header.find("label");
  std::size_t a1_col = 0, a2_col = 0;
  std::optional<std::size_t> sup_col;
  if (!label_col || header.find("annotator1")) {
    a1_col = header.require("annotator1", "gold file");
    a2_col = header.require("annotator2", "gold file");
    sup_col = header.find("supervisor");
  }
  std::map<std::string, bool> seen;
  while (reader.next(row)) {
    if (row.size() == 1 && trim(row[0]).empty()) continue;
    const auto at = " at line " + std::to_string(reader.line());
    auto cell = [&](std::size_t c) -> std::string_view {
      if (c >= row.size()) throw InputError("gold file: short row" + at);
      return trim(row[c]);
    };
    auto label = [&](std::size_t c) {
      auto l = parse_label(cell(c));
      if (!l) throw InputError("gold file: unknown label '" + std::string(cell(c)) + "'" + at);
      return *l;
    };
    GoldRecord g;
    g.id = std::string(cell(id_col));
    if (seen[g.id]) throw InputError("gold file: duplicate id '" + g.id + "'" + at);
    seen[g.id] = true;
    try {
      if (label_col && !header.find("annotator1")) {
        const Label l = label(*label_col);
        g.annotation = make_annotation(l, l, std::nullopt);
      } else {
        std::optional<Label> sup;
        if (sup_col && *sup_col < row.size() && !cell(*sup_col).empty()) sup = label(*sup_col);
        g.annotation = make_annotation(label(a1_col), label(a2_col), sup);
      }
    } catch (const InputError& e) {
      throw InputError(std::string(e.what()) + " for id '" + g.id + "'" + at);
    }
    out.push_back(std::move(g));
  }
  return out;
}

/// CSV with an "id" column and a "weirdness" (or "weight") column; blank,
/// NA or undefined cells are read as undefined.
inline WeirdnessById read_weirdness_csv(std::istream& in) {
  WeirdnessById out;
  CsvReader reader(in);
  std::vector<std::string> row;
  if (!reader.next(row)) return out;
  const CsvHeader header(row);
  const auto id_col = header.require("id", "weirdness file");
  auto w_col = header.find("weirdness");
  if (!w_col) w_col = header.find("weight");
  if (!w_col) throw InputError("weirdness file: missing column 'weirdness'");
  while (reader.next(row)) {
    if (row.size() == 1 && trim(row[0]).empty()) continue;
    if (row.size() <= std::max(id_col, *w_col)) throw InputError("weirdness file: short row at line " + std::to_string(reader.line()));
    out[std::string(trim(row[id_col]))] = parse_double(row[*w_col]);
  }
  return out;
}

// ---------------------------------------------------------------------------
// Rendering

namespace detail {

inline std::string pad_right(std::string s, std::size_t w) {
  if (s.size() < w) s.append(w - s.size(), ' ');
  return s;
}

inline std::string pad_left(std::string s, std::size_t w) {
  if (s.size() < w) s.insert(0, w - s.size(), ' ');
  return s;
}

/// Column-aligned text; first `left` columns are left-aligned, the rest
/// right-aligned. Two spaces between columns.
inline std::string align_table(const std::vector<std::vector<std::string>>& rows, std::size_t left) {
  std::vector<std::size_t> width;
  for (const auto& r : rows)
    for (std::size_t i = 0; i < r.size(); ++i) {
      if (width.size() <= i) width.push_back(0);
      width[i] = std::max(width[i], r[i].size());
    }
  std::string out;
  for (const auto& r : rows) {
    std::string line;
    for (std::size_t i = 0; i < r.size(); ++i) {
      if (i) line += "  ";
      line += i < left ? pad_right(r[i], width[i]) : pad_left(r[i], width[i]);
    }
    while (!line.empty() && line.back() == ' ') line.pop_back();
    out += line + "\n";
  }
  return out;
}

}  // namespace detail

/// One model's section: a row per slice and class, with accuracy shown on
/// the AntiVax row only, then macro and weighted averages.
inline std::string render_eval_section(const std::string& model, const std::vector<EvalReport>& slices) {
  std::vector<std::vector<std::string>> rows{{"Slice", "Class", "N", "Acc.", "F1", "Prec", "Rec", "Conf"}};
  for (const auto& r : slices) {
    if (r.n == 0) {
      rows.push_back({r.slice, "(empty)", "0", "", "", "", "", ""});
      continue;
    }
    const std::string conf = r.mean_confidence ? format_fixed(*r.mean_confidence) : "";
    bool first = true;
    for (Label l : kLabels) {
      const auto& m = r.per_class.at(l);
      rows.push_back({first ? r.slice : "", std::string(to_string(l)), std::to_string(m.support),
                      first ? format_fixed(r.accuracy) : "", format_fixed(m.f1), format_fixed(m.precision),
                      format_fixed(m.recall), first ? conf : ""});
      first = false;
    }
    rows.push_back({"", "macro avg", std::to_string(r.n), "", format_fixed(r.macro.f1), format_fixed(r.macro.precision),
                    format_fixed(r.macro.recall), ""});
    rows.push_back({"", "weighted avg", std::to_string(r.n), "", format_fixed(r.weighted.f1),
                    format_fixed(r.weighted.precision), format_fixed(r.weighted.recall), ""});
  }
  return "Model: " + model + "\n" + detail::align_table(rows, 2);
}

/// Machine-readable rows: model,slice,class,n,accuracy,f1,precision,recall,mean_confidence
inline void write_eval_csv_header(std::ostream& out) {
  out << "model,slice,class,n,accuracy,f1,precision,recall,mean_confidence\n";
}

inline void write_eval_csv_rows(std::ostream& out, const std::string& model, const EvalReport& r) {
  const std::string conf = r.mean_confidence ? format_double(*r.mean_confidence) : "";
  auto row = [&](std::string_view cls, const ClassMetrics& m) {
    out << csv_escape(model) << ',' << csv_escape(r.slice) << ',' << cls << ',' << m.support << ','
        << format_double(r.accuracy) << ',' << format_double(m.f1) << ',' << format_double(m.precision) << ','
        << format_double(m.recall) << ',' << conf << '\n';
  };
  if (r.n == 0) return;
  for (Label l : kLabels) row(to_string(l), r.per_class.at(l));
  row("macro", r.macro);
  row("weighted", r.weighted);
}

/// Layout: Model | Weird<low | All test data | Weird>high | middle band.
inline std::string render_confidence_table(const ConfidenceTable& t) {
  const auto lo = format_fixed(t.thresholds.low, 1), hi = format_fixed(t.thresholds.high, 1);
  std::vector<std::vector<std::string>> rows{
      {"Model", "Weird<" + lo, "All test data", "Weird>" + hi, lo + "<=Weird<=" + hi}};
  for (const auto& [name, r] : t.rows)
    rows.push_back({name, format_fixed(r.low), format_fixed(r.all), format_fixed(r.high), format_fixed(r.middle)});
  return detail::align_table(rows, 1);
}

inline void write_confidence_csv(std::ostream& out, const ConfidenceTable& t) {
  out << "model,low,all,high,middle,n_low,n_all,n_high,n_middle\n";
  for (const auto& [name, r] : t.rows)
    out << csv_escape(name) << ',' << format_double(r.low) << ',' << format_double(r.all) << ','
        << format_double(r.high) << ',' << format_double(r.middle) << ',' << r.n_low << ',' << r.n_all << ','
        << r.n_high << ',' << r.n_middle << '\n';
}

}  // namespace wdrift
