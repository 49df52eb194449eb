#pragma once

#include <algorithm>
#include <cmath>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "uavloc/geo.hpp"
#include "uavloc/retrieval.hpp"

namespace uavloc {

struct SdmConfig {
  std::vector<std::size_t> k_values = {1, 3, 5, 10};
  double s = 5e3;  // amplification factor for degree distances
};

// Class-match indicator: 1 iff the labels are equal.
inline int indicator(const std::string& l_q, const std::string& l_i) {
  if (l_q.empty() || l_i.empty()) {
    throw ConfigError("indicator: empty class label");
  }
  return l_q == l_i ? 1 : 0;
}

// 1 iff any of the top-k entries matches the truth class.
inline int recall_at_k(const RankedList& ranked, const std::string& truth_class,
                       std::size_t k) {
  if (k < 1) throw ConfigError("recall_at_k: k must be >= 1");
  if (ranked.entries.empty()) throw ConfigError("recall_at_k: empty ranking");
  const std::size_t top = std::min(k, ranked.entries.size());
  for (std::size_t i = 0; i < top; ++i) {
    if (indicator(truth_class, ranked.entries[i].class_id) == 1) return 1;
  }
  return 0;
}

inline std::size_t top1pct_k(std::size_t gallery_size) {
  if (gallery_size < 1) throw ConfigError("top1pct_k: empty gallery");
  return (gallery_size + 99) / 100;  // ceil(gallery_size / 100)
}

inline int recall_top1pct(const RankedList& ranked,
                          const std::string& truth_class,
                          std::size_t gallery_size) {
  return recall_at_k(ranked, truth_class, top1pct_k(gallery_size));
}

// Average precision over the ranked list: mean, over the relevant entries,
// of precision at their ranks.
inline double average_precision(const RankedList& ranked,
                                const std::string& truth_class) {
  std::size_t relevant_seen = 0;
  double sum = 0.0;
  for (std::size_t i = 0; i < ranked.entries.size(); ++i) {
    if (indicator(truth_class, ranked.entries[i].class_id) == 1) {
      ++relevant_seen;
      sum += static_cast<double>(relevant_seen) / (i + 1);
    }
  }
  if (relevant_seen == 0) {
    throw ConfigError("average_precision: no relevant item for class '" +
                      truth_class + "'");
  }
  return sum / relevant_seen;
}

// Spatial distance metric over the top K candidates: linearly decaying
// weights (K-i+1) on exponentially decayed degree distances, normalized by
// the weight sum K(K+1)/2. Result in (0, 1], 1 iff all distances are zero.
inline double sdm_k(const RankedList& ranked, const GeoPoint& truth_geo,
                    std::size_t k, double s) {
  if (!(s > 0.0)) throw ConfigError("sdm_k: s must be > 0");
  if (ranked.entries.size() < k || k < 1) {
    throw ConfigError("sdm_k: ranking has fewer than k entries");
  }
  double numerator = 0.0;
  for (std::size_t i = 1; i <= k; ++i) {
    const double d = degree_distance(truth_geo, ranked.entries[i - 1].geo);
    numerator += static_cast<double>(k - i + 1) * std::exp(-s * d);
  }
  const double denominator = static_cast<double>(k) * (k + 1) / 2.0;
  return numerator / denominator;
}

struct QueryEval {
  std::string query_id;
  std::vector<double> sdm;  // one per configured k, in [0,1]
  std::optional<std::size_t> hit_rank;  // first rank with matching class
  double average_precision = 0.0;
};

struct EvalReport {
  SdmConfig config;
  std::size_t gallery_size = 0;
  std::vector<QueryEval> queries;
  std::vector<double> mean_sdm;      // per configured k
  std::vector<double> recall_at;     // per configured k
  double recall_top1pct = 0.0;
  double mean_ap = 0.0;
};

struct QueryTruth {
  std::string class_id;
  GeoPoint geo;
};

// Evaluates a batch of ranked lists. Truths are looked up by query_id.
// Aggregation is per-image by default; per_class averages class means.
inline EvalReport evaluate(const std::vector<RankedList>& lists,
                           const std::map<std::string, QueryTruth>& truths,
                           std::size_t gallery_size, const SdmConfig& cfg,
                           bool per_class = false) {
  EvalReport report;
  report.config = cfg;
  report.gallery_size = gallery_size;
  const std::size_t nk = cfg.k_values.size();
  for (const RankedList& rl : lists) {
    auto it = truths.find(rl.query_id);
    if (it == truths.end()) {
      throw ConfigError("evaluate: no truth for query '" + rl.query_id + "'");
    }
    const QueryTruth& truth = it->second;
    QueryEval qe;
    qe.query_id = rl.query_id;
    for (std::size_t k : cfg.k_values) {
      qe.sdm.push_back(sdm_k(rl, truth.geo, k, cfg.s));
    }
    for (std::size_t i = 0; i < rl.entries.size(); ++i) {
      if (rl.entries[i].class_id == truth.class_id) {
        qe.hit_rank = i + 1;
        break;
      }
    }
    qe.average_precision = average_precision(rl, truth.class_id);
    report.queries.push_back(std::move(qe));
  }
  // Deterministic aggregation order.
  std::sort(report.queries.begin(), report.queries.end(),
            [](const QueryEval& a, const QueryEval& b) {
              return a.query_id < b.query_id;
            });

  const std::size_t k_top1pct = top1pct_k(gallery_size);
  struct Acc {
    std::vector<double> sdm;
    std::vector<double> recall;
    double top1pct = 0.0;
    double ap = 0.0;
    double n = 0.0;
  };
  auto add_query = [&](Acc& acc, const QueryEval& qe,
                       const std::map<std::string, QueryTruth>& t) {
    if (acc.sdm.empty()) {
      acc.sdm.assign(nk, 0.0);
      acc.recall.assign(nk, 0.0);
    }
    for (std::size_t i = 0; i < nk; ++i) {
      acc.sdm[i] += qe.sdm[i];
      acc.recall[i] +=
          (qe.hit_rank && *qe.hit_rank <= cfg.k_values[i]) ? 1.0 : 0.0;
    }
    acc.top1pct += (qe.hit_rank && *qe.hit_rank <= k_top1pct) ? 1.0 : 0.0;
    acc.ap += qe.average_precision;
    acc.n += 1.0;
    (void)t;
  };

  Acc total;
  if (!per_class) {
    for (const QueryEval& qe : report.queries) add_query(total, qe, truths);
  } else {
    std::map<std::string, Acc> by_class;
    for (const QueryEval& qe : report.queries) {
      add_query(by_class[truths.at(qe.query_id).class_id], qe, truths);
    }
    total.sdm.assign(nk, 0.0);
    total.recall.assign(nk, 0.0);
    for (const auto& [cls, acc] : by_class) {
      for (std::size_t i = 0; i < nk; ++i) {
        total.sdm[i] += acc.sdm[i] / acc.n;
        total.recall[i] += acc.recall[i] / acc.n;
      }
      total.top1pct += acc.top1pct / acc.n;
      total.ap += acc.ap / acc.n;
    }
    total.n = static_cast<double>(by_class.size());
  }
  if (total.n > 0.0) {
    for (std::size_t i = 0; i < nk; ++i) {
      report.mean_sdm.push_back(total.sdm[i] / total.n);
      report.recall_at.push_back(total.recall[i] / total.n);
    }
    report.recall_top1pct = total.top1pct / total.n;
    report.mean_ap = total.ap / total.n;
  } else {
    report.mean_sdm.assign(nk, 0.0);
    report.recall_at.assign(nk, 0.0);
  }
  return report;
}

inline void save_eval_report(const EvalReport& r, const std::string& path,
                             const std::vector<std::string>& header_lines = {}) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw FormatError("cannot write eval report: " + path);
  out << "#uavloc-eval v1\n";
  for (const auto& h : header_lines) out << "# " << h << "\n";
  out << "# s=" << format_real(r.config.s) << " k_values=";
  for (std::size_t i = 0; i < r.config.k_values.size(); ++i) {
    out << (i ? "," : "") << r.config.k_values[i];
  }
  out << " gallery_size=" << r.gallery_size << "\n";
  for (const QueryEval& q : r.queries) {
    out << q.query_id << '\t'
        << (q.hit_rank ? std::to_string(*q.hit_rank) : "-") << '\t'
        << format_real(q.average_precision);
    for (double v : q.sdm) out << '\t' << format_real(v);
    out << '\n';
  }
  out << "#aggregate";
  for (std::size_t i = 0; i < r.config.k_values.size(); ++i) {
    out << " R@" << r.config.k_values[i] << "=" << format_real(r.recall_at[i]);
  }
  out << " R@Top1%=" << format_real(r.recall_top1pct)
      << " mAP=" << format_real(r.mean_ap);
  for (std::size_t i = 0; i < r.config.k_values.size(); ++i) {
    out << " SDM" << r.config.k_values[i] << "=" << format_real(r.mean_sdm[i]);
  }
  out << "\n";
}

}  // namespace uavloc
