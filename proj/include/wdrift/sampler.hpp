#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <istream>
#include <optional>
#include <set>
#include <string>
#include <unordered_set>
#include <vector>

#include <json.hpp>

#include "wdrift/core.hpp"
#include "wdrift/csv.hpp"
#include "wdrift/random.hpp"

namespace wdrift {

struct PoolItem {
  std::string id;
  std::optional<double> weight;  // nullopt = undefined (e.g. all-OOV comment)
};

struct SamplePool {
  std::vector<PoolItem> items;

  void validate() const {
    std::unordered_set<std::string_view> seen;
    for (const auto& it : items) {
      if (it.id.empty()) throw InputError("pool: empty id");
      if (!seen.insert(it.id).second) throw InputError("pool: duplicate id '" + it.id + "'");
    }
  }

  bool has_weights() const {
    return std::any_of(items.begin(), items.end(), [](const PoolItem& i) { return i.weight.has_value(); });
  }
};

/// Reads "id,weight" (a "weirdness" column is accepted in place of
/// "weight"). Empty, NA, nan and undefined weights are read as undefined.
inline SamplePool read_pool_csv(std::istream& in) {
  SamplePool pool;
  CsvReader reader(in);
  std::vector<std::string> row;
  if (!reader.next(row)) return pool;
  const CsvHeader header(row);
  const auto id_col = header.require("id", "pool file");
  auto w_col = header.find("weight");
  if (!w_col) w_col = header.find("weirdness");
  while (reader.next(row)) {
    if (row.size() == 1 && trim(row[0]).empty()) continue;
    if (row.size() <= id_col) throw InputError("pool file: short row at line " + std::to_string(reader.line()));
    PoolItem item{std::string(trim(row[id_col])), std::nullopt};
    if (w_col && *w_col < row.size()) {
      const auto raw = trim(row[*w_col]);
      std::string low(raw);
      std::transform(low.begin(), low.end(), low.begin(), [](unsigned char c) { return std::tolower(c); });
      if (!(low.empty() || low == "na" || low == "nan" || low == "undefined")) {
        item.weight = parse_double(raw);
        if (!item.weight) throw InputError("pool file: bad weight '" + std::string(raw) + "' at line " + std::to_string(reader.line()));
      }
    }
    pool.items.push_back(std::move(item));
  }
  pool.validate();
  return pool;
}

/// Uniform sample without replacement; ids in draw order.
inline std::vector<std::string> random_sample(const SamplePool& pool, std::size_t n, std::uint64_t seed) {
  pool.validate();
  Rng rng = make_rng(seed);
  std::vector<std::string> out;
  for (auto i : sample_indices(pool.items.size(), n, rng)) out.push_back(pool.items[i].id);
  return out;
}

struct WeightedSample {
  std::vector<std::string> ids;       // in descending key order
  std::vector<std::string> excluded;  // items with undefined weight
};

/// Weighted sample without replacement by exponential keys: each eligible
/// item draws u ~ U(0,1) in pool order and gets key u^(1/w); the n largest
/// keys win. Keys are compared as log(u)/w. Ties go to the smaller id.
/// `exponent` transforms weights as w^exponent before drawing.
inline WeightedSample weighted_sample(const SamplePool& pool, std::size_t n, std::uint64_t seed,
                                      double exponent = 1.0) {
  pool.validate();
  WeightedSample out;
  struct Keyed {
    double key;
    const std::string* id;
  };
  std::vector<Keyed> keyed;
  Rng rng = make_rng(seed);
  for (const auto& item : pool.items) {
    if (!item.weight) {
      out.excluded.push_back(item.id);
      continue;
    }
    const double w = exponent == 1.0 ? *item.weight : std::pow(*item.weight, exponent);
    if (!std::isfinite(w) || !(w > 0.0))
      throw InputError("pool: weight for '" + item.id + "' must be finite and > 0");
    keyed.push_back({std::log(uniform_open01(rng)) / w, &item.id});
  }
  if (keyed.empty() && !pool.items.empty()) throw InputError("no eligible items");
  const std::size_t k = std::min(n, keyed.size());
  auto better = [](const Keyed& a, const Keyed& b) { return a.key != b.key ? a.key > b.key : *a.id < *b.id; };
  std::partial_sort(keyed.begin(), keyed.begin() + static_cast<std::ptrdiff_t>(k), keyed.end(), better);
  for (std::size_t i = 0; i < k; ++i) out.ids.push_back(*keyed[i].id);
  return out;
}

struct OverlapReport {
  std::size_t count = 0;
  std::vector<std::string> ids;  // sorted

  nlohmann::ordered_json to_json() const { return {{"count", count}, {"ids", ids}}; }
};

inline OverlapReport overlap_report(const std::vector<std::string>& a, const std::vector<std::string>& b) {
  const std::set<std::string> sa(a.begin(), a.end()), sb(b.begin(), b.end());
  OverlapReport r;
  std::set_intersection(sa.begin(), sa.end(), sb.begin(), sb.end(), std::back_inserter(r.ids));
  r.count = r.ids.size();
  return r;
}

}  // namespace wdrift
