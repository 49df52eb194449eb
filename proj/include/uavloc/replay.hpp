#pragma once

#include <algorithm>
#include <fstream>
#include <map>
#include <numeric>
#include <optional>
#include <string>
#include <vector>

#include "uavloc/dataset.hpp"
#include "uavloc/metrics.hpp"
#include "uavloc/retrieval.hpp"

namespace uavloc {

enum class StrategyKind { global, neighbor };
enum class OnEmptyDomain { fallback_global, fail };

struct Strategy {
  StrategyKind kind = StrategyKind::global;
  double radius_m = 0.0;  // > 0 when kind == neighbor; +inf = unbounded
  std::optional<GeoPoint> bootstrap_anchor;  // empty = bootstrap via global
  OnEmptyDomain on_empty = OnEmptyDomain::fallback_global;

  std::string describe() const {
    if (kind == StrategyKind::global) return "global";
    std::string s = "neighbor radius_m=" + format_real(radius_m);
    s += bootstrap_anchor ? " bootstrap=anchor" : " bootstrap=global";
    s += on_empty == OnEmptyDomain::fallback_global ? " on_empty=fallback"
                                                    : " on_empty=fail";
    return s;
  }
};

// One ordered query of a flight trace.
struct TraceStep {
  std::size_t step = 0;
  std::string sample_id;
  std::string class_id;
  GeoPoint truth;
};

struct StepResult {
  std::size_t step = 0;
  std::string query_id;
  GeoPoint predicted;  // top-1 entry geo
  GeoPoint truth;
  double error_m = 0.0;
  RankedList top_k;
  std::size_t domain_size = 0;
  bool fallback_used = false;
};

struct ReplayReport {
  std::string strategy;
  SdmConfig sdm_config;
  std::vector<StepResult> steps;
  double mean_error_m = 0.0;
  double median_error_m = 0.0;
  double max_error_m = 0.0;
  std::vector<double> mean_sdm;   // per configured k
  std::vector<double> recall_at;  // per configured k
};

// Sequential trajectory localization. Neighbor strategy anchors step t on
// the predicted position of step t-1; the anchor is never the truth (the
// UAV has no GNSS by premise).
inline ReplayReport replay(const std::vector<TraceStep>& trace,
                           const EmbeddingStore& queries, const GeoIndex& index,
                           const Strategy& strategy, std::size_t k,
                           const SdmConfig& sdm_cfg = {}) {
  if (trace.empty()) throw ConfigError("replay: empty trace");
  if (strategy.kind == StrategyKind::neighbor && !(strategy.radius_m > 0.0)) {
    throw ConfigError("replay: neighbor strategy needs radius_m > 0");
  }
  ReplayReport report;
  report.strategy = strategy.describe();
  report.sdm_config = sdm_cfg;

  std::optional<GeoPoint> anchor = strategy.bootstrap_anchor;
  for (std::size_t t = 0; t < trace.size(); ++t) {
    const TraceStep& ts = trace[t];
    const Embedding* q = queries.find(ts.sample_id);
    if (!q) {
      throw ConfigError("replay: missing embedding for query '" +
                        ts.sample_id + "'");
    }
    StepResult sr;
    sr.step = ts.step;
    sr.query_id = ts.sample_id;
    sr.truth = ts.truth;

    const bool use_neighbor =
        strategy.kind == StrategyKind::neighbor && anchor.has_value();
    if (use_neighbor) {
      GeoIndex domain = filter_neighbor(index, *anchor, strategy.radius_m);
      if (domain.entries.empty()) {
        if (strategy.on_empty == OnEmptyDomain::fail) {
          throw ConfigError("replay: empty neighborhood at step " +
                            std::to_string(ts.step) + " (center " +
                            format_real(anchor->lat) + "," +
                            format_real(anchor->lon) + ", radius " +
                            format_real(strategy.radius_m) + " m)");
        }
        sr.fallback_used = true;
        sr.top_k = rank_global(index, *q, k);
        sr.domain_size = index.entries.size();
      } else {
        sr.top_k = rank_global(domain, *q, k);
        sr.top_k.strategy = "neighbor center=" + format_real(anchor->lat) +
                            "," + format_real(anchor->lon) +
                            " radius_m=" + format_real(strategy.radius_m);
        sr.domain_size = domain.entries.size();
      }
    } else {
      sr.top_k = rank_global(index, *q, k);
      sr.domain_size = index.entries.size();
    }
    sr.predicted = sr.top_k.entries.front().geo;
    sr.error_m = meters_distance(sr.predicted, sr.truth);
    anchor = sr.predicted;
    report.steps.push_back(std::move(sr));
  }

  // Aggregates.
  std::vector<double> errors;
  errors.reserve(report.steps.size());
  for (const StepResult& sr : report.steps) errors.push_back(sr.error_m);
  report.mean_error_m =
      std::accumulate(errors.begin(), errors.end(), 0.0) / errors.size();
  report.max_error_m = *std::max_element(errors.begin(), errors.end());
  std::vector<double> sorted = errors;
  std::sort(sorted.begin(), sorted.end());
  const std::size_t n = sorted.size();
  report.median_error_m =
      n % 2 ? sorted[n / 2] : (sorted[n / 2 - 1] + sorted[n / 2]) / 2.0;

  std::map<std::string, std::string> truth_class;
  for (std::size_t i = 0; i < sdm_cfg.k_values.size(); ++i) {
    const std::size_t kv = sdm_cfg.k_values[i];
    double sdm_sum = 0.0;
    double recall_sum = 0.0;
    for (std::size_t t = 0; t < report.steps.size(); ++t) {
      const StepResult& sr = report.steps[t];
      // k clamped to the step's domain when a small neighborhood returned
      // fewer than k candidates.
      const std::size_t kk = std::min(kv, sr.top_k.entries.size());
      sdm_sum += sdm_k(sr.top_k, sr.truth, kk, sdm_cfg.s);
      recall_sum += recall_at_k(sr.top_k, trace[t].class_id, kv);
    }
    report.mean_sdm.push_back(sdm_sum / report.steps.size());
    report.recall_at.push_back(recall_sum / report.steps.size());
  }
  return report;
}

// --- Trace file --------------------------------------------------------
// Manifest-shaped records with a leading explicit step-order column.

inline constexpr const char* kTraceMagic = "#uavloc-trace v1";

inline void save_trace(const std::vector<TraceStep>& trace,
                       const std::string& path) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw FormatError("cannot write trace: " + path);
  out << kTraceMagic << "\n";
  for (const TraceStep& t : trace) {
    out << t.step << '\t' << t.sample_id << '\t' << t.class_id << '\t'
        << format_real(t.truth.lat) << '\t' << format_real(t.truth.lon)
        << '\n';
  }
}

inline std::vector<TraceStep> load_trace(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw FormatError("cannot open trace: " + path);
  std::string line;
  if (!std::getline(in, line) || line != kTraceMagic) {
    throw FormatError("bad trace magic in " + path);
  }
  std::vector<TraceStep> trace;
  int lineno = 1;
  while (std::getline(in, line)) {
    ++lineno;
    if (line.empty() || line[0] == '#') continue;
    const std::string ctx = path + ":" + std::to_string(lineno);
    auto f = split_tabs(line);
    if (f.size() != 5) throw FormatError(ctx + ": expected 5 fields");
    TraceStep t;
    t.step = static_cast<std::size_t>(parse_int(f[0], ctx));
    t.sample_id = std::string(f[1]);
    t.class_id = std::string(f[2]);
    t.truth.lat = parse_real(f[3], ctx);
    t.truth.lon = parse_real(f[4], ctx);
    if (!t.truth.valid()) throw FormatError(ctx + ": invalid truth geo");
    trace.push_back(std::move(t));
  }
  std::sort(trace.begin(), trace.end(),
            [](const TraceStep& a, const TraceStep& b) {
              return a.step < b.step;
            });
  return trace;
}

inline void save_replay_report(const ReplayReport& r, const std::string& path,
                               const std::vector<std::string>& header_lines = {}) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw FormatError("cannot write replay report: " + path);
  out << "#uavloc-replay v1\n";
  for (const auto& h : header_lines) out << "# " << h << "\n";
  out << "# strategy: " << r.strategy << "\n";
  for (const StepResult& s : r.steps) {
    out << s.step << '\t' << s.query_id << '\t' << format_real(s.predicted.lat)
        << '\t' << format_real(s.predicted.lon) << '\t'
        << format_real(s.truth.lat) << '\t' << format_real(s.truth.lon) << '\t'
        << format_real17(s.error_m) << '\t' << s.domain_size << '\t'
        << (s.fallback_used ? 1 : 0) << '\t'
        << s.top_k.entries.front().sample_id << '\n';
  }
  out << "#aggregate mean_error_m=" << format_real17(r.mean_error_m)
      << " median_error_m=" << format_real17(r.median_error_m)
      << " max_error_m=" << format_real17(r.max_error_m);
  for (std::size_t i = 0; i < r.sdm_config.k_values.size(); ++i) {
    out << " SDM" << r.sdm_config.k_values[i] << "="
        << format_real17(r.mean_sdm[i]);
  }
  for (std::size_t i = 0; i < r.sdm_config.k_values.size(); ++i) {
    out << " R@" << r.sdm_config.k_values[i] << "="
        << format_real(r.recall_at[i]);
  }
  out << "\n";
}

}  // namespace uavloc
