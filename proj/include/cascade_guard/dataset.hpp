#pragma once

// Dataset model: records carrying a proxy score, the proxy's label and the
// (simulated) oracle label, plus the quality metrics and dataset generators
// the cascade algorithms are evaluated on.
//
// Set membership is strict throughout: a threshold rho selects the records
// with score > rho. The only exception is the positive-density window, which
// is anchored at score >= rho.

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <cstdint>
#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <limits>
#include <optional>
#include <span>
#include <sstream>
#include <string>
#include <string_view>
#include <vector>

#include "cascade_guard/errors.hpp"
#include "cascade_guard/rng.hpp"

namespace cascade_guard {

struct Record {
  std::uint64_t id = 0;
  double proxy_score = 0.0;
  std::uint32_t proxy_label = 0;
  std::uint32_t oracle_label = 0;

  friend bool operator==(const Record&, const Record&) = default;
};

enum class QueryKind { AT, PT, RT };

/// Quality target of a query. PT/RT carry an oracle budget; AT must not.
struct QuerySpec {
  QueryKind kind = QueryKind::PT;
  double target = 0.9;
  double delta = 0.1;
  std::optional<std::size_t> budget;

  void validate() const {
    if (!(target > 0.0 && target <= 1.0)) throw ParameterError("target must lie in (0, 1]");
    if (!(delta > 0.0 && delta < 1.0)) throw ParameterError("delta must lie in (0, 1)");
    if (kind == QueryKind::AT && budget) throw ParameterError("AT queries take no oracle budget");
    if (kind != QueryKind::AT && !budget) throw ParameterError("PT/RT queries require an oracle budget");
  }
};

/// Immutable collection of records with a cached descending score order.
///
/// score_order() lists record indices by proxy score descending, ties broken
/// by ascending id. Prefix counts over that order make every threshold metric
/// an O(log n) lookup.
class Dataset {
 public:
  Dataset() = default;

  explicit Dataset(std::vector<Record> records) : records_(std::move(records)) {
    for (std::size_t i = 0; i < records_.size(); ++i) {
      const double s = records_[i].proxy_score;
      if (!(s >= 0.0 && s <= 1.0)) {
        throw ParameterError("record " + std::to_string(i) + ": proxy_score outside [0, 1]");
      }
    }
    build_index();
  }

  std::size_t size() const noexcept { return records_.size(); }
  bool empty() const noexcept { return records_.empty(); }
  const Record& operator[](std::size_t i) const { return records_[i]; }
  std::span<const Record> records() const noexcept { return records_; }
  std::span<const std::size_t> score_order() const noexcept { return order_; }

  /// Score of the record at descending rank `pos` (0-based).
  double score_at_rank(std::size_t pos) const { return sorted_desc_[pos]; }

  bool is_binary() const noexcept { return binary_; }
  std::size_t positives() const noexcept { return pos_prefix_.empty() ? 0 : pos_prefix_.back(); }

  /// Number of records with score > rho.
  std::size_t count_above(double rho) const {
    auto it = std::partition_point(sorted_desc_.begin(), sorted_desc_.end(),
                                   [rho](double s) { return s > rho; });
    return static_cast<std::size_t>(it - sorted_desc_.begin());
  }

  /// Number of records with score >= rho.
  std::size_t count_at_least(double rho) const {
    auto it = std::partition_point(sorted_desc_.begin(), sorted_desc_.end(),
                                   [rho](double s) { return s >= rho; });
    return static_cast<std::size_t>(it - sorted_desc_.begin());
  }

  /// Positives among the first `top` records of score_order().
  std::size_t positives_in_top(std::size_t top) const { return pos_prefix_[top]; }
  /// Records among the first `top` whose proxy label matches the oracle.
  std::size_t agreements_in_top(std::size_t top) const { return agree_prefix_[top]; }

  /// Distinct class ids seen in proxy labels, ascending.
  std::vector<std::uint32_t> proxy_classes() const {
    std::vector<std::uint32_t> out;
    for (const auto& r : records_) out.push_back(r.proxy_label);
    std::sort(out.begin(), out.end());
    out.erase(std::unique(out.begin(), out.end()), out.end());
    return out;
  }

  friend bool operator==(const Dataset& a, const Dataset& b) { return a.records_ == b.records_; }

 private:
  void build_index() {
    const std::size_t n = records_.size();
    order_.resize(n);
    for (std::size_t i = 0; i < n; ++i) order_[i] = i;
    std::sort(order_.begin(), order_.end(), [this](std::size_t a, std::size_t b) {
      const auto& ra = records_[a];
      const auto& rb = records_[b];
      if (ra.proxy_score != rb.proxy_score) return ra.proxy_score > rb.proxy_score;
      return ra.id < rb.id;
    });
    sorted_desc_.resize(n);
    pos_prefix_.assign(n + 1, 0);
    agree_prefix_.assign(n + 1, 0);
    binary_ = true;
    for (std::size_t p = 0; p < n; ++p) {
      const auto& r = records_[order_[p]];
      sorted_desc_[p] = r.proxy_score;
      pos_prefix_[p + 1] = pos_prefix_[p] + (r.oracle_label == 1 ? 1 : 0);
      agree_prefix_[p + 1] = agree_prefix_[p] + (r.proxy_label == r.oracle_label ? 1 : 0);
      if (r.oracle_label > 1 || r.proxy_label > 1) binary_ = false;
    }
  }

  std::vector<Record> records_;
  std::vector<std::size_t> order_;
  std::vector<double> sorted_desc_;
  std::vector<std::size_t> pos_prefix_;
  std::vector<std::size_t> agree_prefix_;
  bool binary_ = true;
};

enum class Metric { Precision, Recall, Accuracy };

/// Precision, recall or proxy accuracy of the records with score > rho.
/// Empty denominators yield nullopt.
inline std::optional<double> metric_at(const Dataset& ds, Metric metric, double rho) {
  if (ds.empty()) throw ParameterError("metric_at: empty dataset");
  if (metric != Metric::Accuracy && !ds.is_binary()) {
    throw InvalidTaskError("precision/recall require binary labels");
  }
  const std::size_t above = ds.count_above(rho);
  switch (metric) {
    case Metric::Precision:
      if (above == 0) return std::nullopt;
      return static_cast<double>(ds.positives_in_top(above)) / static_cast<double>(above);
    case Metric::Recall:
      if (ds.positives() == 0) return std::nullopt;
      return static_cast<double>(ds.positives_in_top(above)) / static_cast<double>(ds.positives());
    case Metric::Accuracy:
      if (above == 0) return std::nullopt;
      return static_cast<double>(ds.agreements_in_top(above)) / static_cast<double>(above);
  }
  return std::nullopt;
}

/// Percentile candidate set C_M, descending and de-duplicated. Candidate j
/// (1-based) is the score of the floor(j*n/M)-th highest record.
inline std::vector<double> candidate_thresholds(const Dataset& ds, std::size_t M) {
  const std::size_t n = ds.size();
  if (M < 1 || M > n) throw ParameterError("candidate_thresholds: M must lie in [1, n]");
  std::vector<double> out;
  out.reserve(M);
  for (std::size_t j = 1; j <= M; ++j) {
    const std::size_t rank = (j * n) / M;  // 1-based rank, >= 1 since M <= n
    const double s = ds.score_at_rank(rank - 1);
    if (out.empty() || s < out.back()) out.push_back(s);
  }
  return out;
}

/// Half-open range [first, last) of descending ranks forming the density
/// window D_r^rho: the r lowest-scored records among those with score >= rho.
struct RankRange {
  std::size_t first = 0;
  std::size_t last = 0;
  std::size_t size() const noexcept { return last - first; }
  bool empty() const noexcept { return first == last; }
};

inline RankRange density_window(const Dataset& ds, double rho, std::size_t r) {
  if (r < 1) throw ParameterError("density window size r must be >= 1");
  const std::size_t c = ds.count_at_least(rho);
  return RankRange{c > r ? c - r : 0, c};
}

/// Fraction of positives in D_r^rho; nullopt when the window is empty.
inline std::optional<double> positive_density(const Dataset& ds, double rho, std::size_t r) {
  if (!ds.is_binary()) throw InvalidTaskError("positive density requires binary labels");
  const RankRange w = density_window(ds, rho, r);
  if (w.empty()) return std::nullopt;
  const std::size_t pos = ds.positives_in_top(w.last) - ds.positives_in_top(w.first);
  return static_cast<double>(pos) / static_cast<double>(w.size());
}

/// rho^beta: the smallest record score s such that every distinct score
/// s' >= s has density d_r(s') >= beta. nullopt when even the top score fails
/// (dense_beta(D) is empty). Densities are constant between consecutive
/// distinct scores, so checking the scores themselves is exhaustive.
inline std::optional<double> dense_cutoff(const Dataset& ds, double beta, std::size_t r) {
  std::optional<double> cutoff;
  std::size_t p = 0;
  while (p < ds.size()) {
    const double s = ds.score_at_rank(p);
    const auto d = positive_density(ds, s, r);
    if (!d || *d < beta) break;
    cutoff = s;
    while (p < ds.size() && ds.score_at_rank(p) == s) ++p;
  }
  return cutoff;
}

/// Recall of threshold rho measured on dense_beta(D) = {score >= rho^beta}.
/// nullopt when the dense subset has no positives.
inline std::optional<double> dense_recall(const Dataset& ds, double beta, std::size_t r, double rho) {
  const auto cutoff = dense_cutoff(ds, beta, r);
  if (!cutoff) return std::nullopt;
  const std::size_t dense = ds.count_at_least(*cutoff);
  const std::size_t total_pos = ds.positives_in_top(dense);
  if (total_pos == 0) return std::nullopt;
  const std::size_t above = std::min(ds.count_above(rho), dense);
  return static_cast<double>(ds.positives_in_top(above)) / static_cast<double>(total_pos);
}

// ---------------------------------------------------------------------------
// Generators

/// Uniform scores; labels assigned down the score order, each record positive
/// with probability 0.95 until floor(pos_frac*n) positives exist. A short pass
/// is repaired by flipping the highest-scored negatives.
inline Dataset gen_synthetic(std::size_t n, double pos_frac, std::uint64_t seed) {
  if (n < 1) throw ParameterError("gen_synthetic: n must be >= 1");
  if (!(pos_frac >= 0.0 && pos_frac <= 1.0)) throw ParameterError("gen_synthetic: pos_frac outside [0, 1]");
  Engine eng = make_engine(seed);
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  std::vector<Record> recs(n);
  for (std::size_t i = 0; i < n; ++i) {
    recs[i].id = i;
    recs[i].proxy_score = unit(eng);
  }
  std::vector<std::size_t> order(n);
  for (std::size_t i = 0; i < n; ++i) order[i] = i;
  std::sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
    if (recs[a].proxy_score != recs[b].proxy_score) return recs[a].proxy_score > recs[b].proxy_score;
    return a < b;
  });
  const auto wanted = static_cast<std::size_t>(std::floor(pos_frac * static_cast<double>(n)));
  std::bernoulli_distribution coin(0.95);
  std::size_t have = 0;
  for (std::size_t p = 0; p < n && have < wanted; ++p) {
    if (coin(eng)) {
      recs[order[p]].oracle_label = 1;
      ++have;
    }
  }
  for (std::size_t p = 0; p < n && have < wanted; ++p) {
    auto& r = recs[order[p]];
    if (r.oracle_label == 0) {
      r.oracle_label = 1;
      ++have;
    }
  }
  for (auto& r : recs) r.proxy_label = r.oracle_label;
  return Dataset(std::move(recs));
}

/// Marks the records at ascending-score ranks [start_rank, start_rank+width)
/// positive in the oracle labels.
inline Dataset gen_adversarial(const Dataset& ds, std::size_t start_rank, std::size_t width) {
  const std::size_t n = ds.size();
  if (start_rank > n || width > n - start_rank) throw ParameterError("gen_adversarial: rank range exceeds n");
  std::vector<Record> recs(ds.records().begin(), ds.records().end());
  const auto order = ds.score_order();
  for (std::size_t k = start_rank; k < start_rank + width; ++k) {
    recs[order[n - 1 - k]].oracle_label = 1;
  }
  return Dataset(std::move(recs));
}

/// Adds N(0, sigma^2) to every score and clamps to [0, 1].
inline Dataset inject_noise(const Dataset& ds, double sigma, std::uint64_t seed) {
  if (!(sigma >= 0.0)) throw ParameterError("inject_noise: sigma must be >= 0");
  std::vector<Record> recs(ds.records().begin(), ds.records().end());
  if (sigma == 0.0) return Dataset(std::move(recs));
  Engine eng = make_engine(seed);
  std::normal_distribution<double> noise(0.0, sigma);
  for (auto& r : recs) r.proxy_score = std::clamp(r.proxy_score + noise(eng), 0.0, 1.0);
  return Dataset(std::move(recs));
}

/// Classification dataset whose proxy is calibrated: oracle labels uniform
/// over `classes`, and the proxy label is correct with probability equal to
/// its score (scores uniform on [1/classes, 1]). Wrong answers pick another
/// class uniformly.
inline Dataset gen_calibrated(std::size_t n, std::uint32_t classes, std::uint64_t seed) {
  if (n < 1) throw ParameterError("gen_calibrated: n must be >= 1");
  if (classes < 2) throw ParameterError("gen_calibrated: need at least two classes");
  Engine eng = make_engine(seed);
  std::uniform_real_distribution<double> score(1.0 / classes, 1.0);
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  std::uniform_int_distribution<std::uint32_t> label(0, classes - 1);
  std::uniform_int_distribution<std::uint32_t> other(1, classes - 1);
  std::vector<Record> recs(n);
  for (std::size_t i = 0; i < n; ++i) {
    auto& r = recs[i];
    r.id = i;
    r.proxy_score = score(eng);
    r.oracle_label = label(eng);
    const bool correct = unit(eng) < r.proxy_score;
    const std::uint32_t shift = other(eng);
    r.proxy_label = correct ? r.oracle_label : (r.oracle_label + shift) % classes;
  }
  return Dataset(std::move(recs));
}

// ---------------------------------------------------------------------------
// CSV persistence: header `id,proxy_score,proxy_label,oracle_label`.

inline constexpr std::string_view kCsvHeader = "id,proxy_score,proxy_label,oracle_label";

inline void write_dataset(std::ostream& out, const Dataset& ds) {
  out << kCsvHeader << '\n';
  char buf[64];
  for (const auto& r : ds.records()) {
    std::snprintf(buf, sizeof buf, "%.17g", r.proxy_score);
    out << r.id << ',' << buf << ',' << r.proxy_label << ',' << r.oracle_label << '\n';
  }
}

inline void save_dataset(const Dataset& ds, const std::string& path) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw ParseError("cannot open " + path + " for writing");
  write_dataset(out, ds);
  if (!out) throw ParseError("write failed: " + path);
}

namespace detail {

template <typename T>
T parse_unsigned(std::string_view field, std::size_t row, const char* name) {
  if (field.empty()) throw ParseError("row " + std::to_string(row) + ": empty " + name);
  std::uint64_t v = 0;
  for (char ch : field) {
    if (ch < '0' || ch > '9') throw ParseError("row " + std::to_string(row) + ": bad " + name);
    const auto digit = static_cast<std::uint64_t>(ch - '0');
    if (v > (std::numeric_limits<T>::max() - digit) / 10) {
      throw ParseError("row " + std::to_string(row) + ": " + name + " overflow");
    }
    v = v * 10 + digit;
  }
  return static_cast<T>(v);
}

inline std::vector<std::string_view> split_commas(std::string_view line) {
  std::vector<std::string_view> out;
  std::size_t start = 0;
  while (true) {
    const auto comma = line.find(',', start);
    out.push_back(line.substr(start, comma - start));
    if (comma == std::string_view::npos) break;
    start = comma + 1;
  }
  return out;
}

}  // namespace detail

/// Parses the CSV format. Rows are numbered from 1 (the header is row 0).
inline Dataset read_dataset(std::istream& in) {
  std::string line;
  if (!std::getline(in, line)) throw ParseError("missing header");
  if (!line.empty() && line.back() == '\r') line.pop_back();
  if (line != kCsvHeader) throw ParseError("bad header, expected '" + std::string(kCsvHeader) + "'");
  std::vector<Record> recs;
  std::size_t row = 0;
  while (std::getline(in, line)) {
    ++row;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty()) continue;
    const auto f = detail::split_commas(line);
    if (f.size() != 4) throw ParseError("row " + std::to_string(row) + ": expected 4 columns");
    Record r;
    r.id = detail::parse_unsigned<std::uint64_t>(f[0], row, "id");
    const std::string score(f[1]);
    char* end = nullptr;
    r.proxy_score = std::strtod(score.c_str(), &end);
    if (score.empty() || end != score.c_str() + score.size()) {
      throw ParseError("row " + std::to_string(row) + ": bad proxy_score");
    }
    if (!(r.proxy_score >= 0.0 && r.proxy_score <= 1.0)) {
      throw ParseError("row " + std::to_string(row) + ": proxy_score outside [0, 1]");
    }
    r.proxy_label = detail::parse_unsigned<std::uint32_t>(f[2], row, "proxy_label");
    r.oracle_label = detail::parse_unsigned<std::uint32_t>(f[3], row, "oracle_label");
    recs.push_back(r);
  }
  return Dataset(std::move(recs));
}

inline Dataset load_dataset(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw ParseError("cannot open " + path);
  return read_dataset(in);
}

}  // namespace cascade_guard
