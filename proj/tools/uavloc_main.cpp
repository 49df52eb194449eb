// uavloc: retrieval-based UAV self-localization pipeline.
// Subcommands: cut, embed, search, eval, augment, replay.

#include <filesystem>
#include <iostream>
#include <random>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "uavloc/uavloc.hpp"

namespace fs = std::filesystem;
using namespace uavloc;

namespace {

GeoPoint parse_latlon(const std::string& s) {
  auto comma = s.find(',');
  if (comma == std::string::npos) {
    throw ConfigError("expected 'lat,lon', got '" + s + "'");
  }
  GeoPoint p;
  p.lat = parse_real(std::string_view(s).substr(0, comma), "lat,lon");
  p.lon = parse_real(std::string_view(s).substr(comma + 1), "lat,lon");
  if (!p.valid()) throw ConfigError("lat,lon out of range: '" + s + "'");
  return p;
}

std::vector<std::string> config_header(const std::string& config) {
  return {std::string("uavloc ") + kVersion, "config: " + config};
}

// Loads a GeoIndex from a store plus either a tile manifest or a sample
// manifest; the manifest kind is detected from its magic line.
GeoIndex load_index(const std::string& store_path,
                    const std::string& manifest_path) {
  EmbeddingStore store = read_store(store_path);
  std::ifstream probe(manifest_path, std::ios::binary);
  if (!probe) throw FormatError("cannot open manifest: " + manifest_path);
  std::string first;
  std::getline(probe, first);
  probe.close();
  if (first == kTileManifestMagic) {
    return build_index(store, load_tile_manifest(manifest_path));
  }
  return build_index(store, load_manifest(manifest_path));
}

int run_cut(const std::string& mosaic_path, double origin_lat,
            double origin_lon, double px_lat, double px_lon,
            std::vector<int> windows, double stride_fraction,
            const std::string& out_dir) {
  Mosaic m;
  m.raster = read_raster(mosaic_path);
  m.transform = {origin_lon, origin_lat, px_lon, px_lat};
  if (!m.transform.valid()) {
    throw ConfigError("invalid geotransform: px-lon must be > 0, px-lat < 0");
  }
  CutResult cut = cut_tiles(m, windows, stride_fraction);
  for (const std::string& w : cut.warnings) std::cerr << "warning: " << w << "\n";
  fs::create_directories(out_dir);
  persist_tiles(m, cut.tiles, out_dir);
  std::ostringstream cfg;
  cfg << "cut mosaic=" << fs::path(mosaic_path).filename().string()
      << " origin=" << format_real(origin_lat) << "," << format_real(origin_lon)
      << " px=" << format_real(px_lat) << "," << format_real(px_lon)
      << " windows=";
  for (std::size_t i = 0; i < windows.size(); ++i) {
    cfg << (i ? "," : "") << windows[i];
  }
  cfg << " stride_fraction=" << format_real(stride_fraction);
  save_tile_manifest(cut.tiles, (fs::path(out_dir) / "tiles.manifest").string(),
                     config_header(cfg.str()));
  std::cout << "wrote " << cut.tiles.size() << " tiles to " << out_dir << "\n";
  return 0;
}

int run_embed(const std::string& manifest_path, int grid,
              const std::string& external_store, const std::string& out_path) {
  if (!external_store.empty()) {
    // Pass-through for embeddings produced by an external model: validate
    // and rewrite in the canonical store layout.
    EmbeddingStore store = read_store(external_store);
    write_store(store, out_path);
    std::cout << "wrote " << store.entries.size() << " embeddings (d="
              << store.dimension << ") to " << out_path << "\n";
    return 0;
  }
  std::ifstream probe(manifest_path, std::ios::binary);
  if (!probe) throw FormatError("cannot open manifest: " + manifest_path);
  std::string first;
  std::getline(probe, first);
  probe.close();

  const fs::path base = fs::path(manifest_path).parent_path();
  std::vector<std::pair<std::string, std::string>> images;  // id, path
  if (first == kTileManifestMagic) {
    for (const TileRecord& t : load_tile_manifest(manifest_path)) {
      images.emplace_back(t.tile_id, (base / t.raster_path).string());
    }
  } else {
    for (const SampleRecord& r : load_manifest(manifest_path).records) {
      images.emplace_back(r.sample_id, (base / r.image_path).string());
    }
  }
  EmbeddingStore store;
  for (const auto& [id, path] : images) {
    Embedding e = toy_descriptor(read_raster(path), grid, id);
    if (store.entries.empty()) {
      store.dimension = static_cast<std::uint32_t>(e.vector.size());
    }
    store.entries.push_back(std::move(e));
  }
  write_store(store, out_path);
  std::cout << "wrote " << store.entries.size() << " embeddings (d="
            << store.dimension << ") to " << out_path << "\n";
  return 0;
}

int run_search(const std::string& gallery_store,
               const std::string& gallery_manifest,
               const std::string& query_store, std::size_t k,
               const std::string& center_str, double radius_m,
               const std::string& out_path) {
  GeoIndex index = load_index(gallery_store, gallery_manifest);
  EmbeddingStore queries = read_store(query_store);
  const bool neighbor = !center_str.empty();
  GeoPoint center;
  if (neighbor) center = parse_latlon(center_str);

  std::vector<RankedList> lists;
  for (const Embedding& q : queries.entries) {
    lists.push_back(neighbor ? rank_neighbor(index, q, center, radius_m, k)
                             : rank_global(index, q, k));
  }
  std::ostringstream cfg;
  cfg << "search k=" << k;
  if (neighbor) {
    cfg << " center=" << format_real(center.lat) << ","
        << format_real(center.lon) << " radius_m=" << format_real(radius_m);
  }
  save_ranked(lists, out_path, config_header(cfg.str()));
  std::cout << "ranked " << lists.size() << " queries into " << out_path << "\n";
  return 0;
}

int run_eval(const std::string& ranked_path, const std::string& query_manifest,
             const std::string& gallery_manifest,
             std::vector<std::size_t> k_values, double s, bool per_class,
             const std::string& out_path) {
  std::vector<RankedList> lists = load_ranked(ranked_path);
  SplitManifest qm = load_manifest(query_manifest);
  std::size_t gallery_size = 0;
  {
    std::ifstream probe(gallery_manifest, std::ios::binary);
    if (!probe) throw FormatError("cannot open manifest: " + gallery_manifest);
    std::string first;
    std::getline(probe, first);
    probe.close();
    gallery_size = first == kTileManifestMagic
                       ? load_tile_manifest(gallery_manifest).size()
                       : load_manifest(gallery_manifest).records.size();
  }
  std::map<std::string, QueryTruth> truths;
  for (const SampleRecord& r : qm.records) {
    truths[r.sample_id] = {r.class_id, class_geo(qm, r.class_id)};
  }
  SdmConfig cfg{std::move(k_values), s};
  EvalReport report = evaluate(lists, truths, gallery_size, cfg, per_class);
  std::ostringstream hdr;
  hdr << "eval ranked=" << fs::path(ranked_path).filename().string()
      << " per_class=" << (per_class ? 1 : 0);
  save_eval_report(report, out_path, config_header(hdr.str()));
  std::cout << "evaluated " << report.queries.size() << " queries";
  for (std::size_t i = 0; i < cfg.k_values.size(); ++i) {
    std::cout << " SDM" << cfg.k_values[i] << "="
              << format_real(report.mean_sdm[i]);
  }
  std::cout << " mAP=" << format_real(report.mean_ap) << "\n";
  return 0;
}

int run_augment(const std::string& image_path, double theta_deg, bool has_theta,
                std::uint64_t seed, bool has_seed, int out_size,
                const std::string& sampling_name, const std::string& out_path) {
  double theta;
  if (has_theta) {
    theta = theta_deg * M_PI / 180.0;
  } else {
    if (!has_seed) {
      seed = std::random_device{}();
      std::cout << "seed: " << seed << "\n";
    }
    std::mt19937_64 rng(seed);
    theta = std::uniform_real_distribution<double>(0.0, 2.0 * M_PI)(rng);
  }
  RotationCrop cfg;
  cfg.theta = theta;
  cfg.out_size = out_size;
  if (sampling_name == "nearest") cfg.sampling = Sampling::nearest;
  else if (sampling_name == "bilinear") cfg.sampling = Sampling::bilinear;
  else throw ConfigError("sampling must be nearest or bilinear");
  write_raster(rotated_crop(read_raster(image_path), cfg), out_path);
  std::cout << "wrote " << out_path << " (theta=" << format_real(theta)
            << " rad)\n";
  return 0;
}

int run_replay(const std::string& trace_path, const std::string& gallery_store,
               const std::string& gallery_manifest,
               const std::string& query_store, const std::string& strategy_name,
               double radius_m, const std::string& anchor_str,
               const std::string& on_empty_name, std::size_t k,
               std::vector<std::size_t> k_values, double s,
               const std::string& out_path, const std::string& trajectory_path) {
  Strategy strategy;
  if (strategy_name == "global") {
    if (radius_m > 0.0) {
      throw CLI::ValidationError(
          "--radius-m conflicts with --strategy global");
    }
    strategy.kind = StrategyKind::global;
  } else if (strategy_name == "neighbor") {
    if (!(radius_m > 0.0)) {
      throw CLI::ValidationError("--strategy neighbor requires --radius-m");
    }
    strategy.kind = StrategyKind::neighbor;
    strategy.radius_m = radius_m;
    if (!anchor_str.empty()) strategy.bootstrap_anchor = parse_latlon(anchor_str);
  } else {
    throw CLI::ValidationError("strategy must be global or neighbor");
  }
  if (on_empty_name == "fallback") {
    strategy.on_empty = OnEmptyDomain::fallback_global;
  } else if (on_empty_name == "fail") {
    strategy.on_empty = OnEmptyDomain::fail;
  } else {
    throw CLI::ValidationError("on-empty must be fallback or fail");
  }

  std::vector<TraceStep> trace = load_trace(trace_path);
  GeoIndex index = load_index(gallery_store, gallery_manifest);
  EmbeddingStore queries = read_store(query_store);
  SdmConfig sdm_cfg{std::move(k_values), s};
  ReplayReport report = replay(trace, queries, index, strategy, k, sdm_cfg);

  std::ostringstream cfg;
  cfg << "replay strategy=" << report.strategy << " k=" << k
      << " s=" << format_real(s);
  save_replay_report(report, out_path, config_header(cfg.str()));
  if (!trajectory_path.empty()) save_trajectory(report, trajectory_path);
  std::cout << "replayed " << report.steps.size()
            << " steps mean_error_m=" << format_real(report.mean_error_m)
            << " max_error_m=" << format_real(report.max_error_m) << "\n";
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"uavloc: retrieval-based UAV self-localization pipeline"};
  app.require_subcommand(1);

  // cut
  auto* cut = app.add_subcommand("cut", "cut a mosaic into geo-tagged tiles");
  std::string cut_mosaic, cut_out;
  double cut_olat = 0, cut_olon = 0, cut_plat = 0, cut_plon = 0;
  std::vector<int> cut_windows = {512, 640, 768};
  double cut_stride = 0.25;
  cut->add_option("--mosaic", cut_mosaic, "mosaic raster (PGM/PPM)")->required();
  cut->add_option("--origin-lat", cut_olat, "latitude of pixel (0,0)")->required();
  cut->add_option("--origin-lon", cut_olon, "longitude of pixel (0,0)")->required();
  cut->add_option("--px-lat", cut_plat, "degrees/pixel in y (negative)")->required();
  cut->add_option("--px-lon", cut_plon, "degrees/pixel in x (positive)")->required();
  cut->add_option("--windows", cut_windows, "window sizes in pixels");
  cut->add_option("--stride-fraction", cut_stride, "stride as fraction of window");
  cut->add_option("--out", cut_out, "output directory")->required();

  // embed
  auto* embed = app.add_subcommand("embed", "compute toy descriptors or ingest a store");
  std::string embed_manifest, embed_external, embed_out;
  int embed_grid = 4;
  embed->add_option("--manifest", embed_manifest, "tile or sample manifest");
  embed->add_option("--grid", embed_grid, "descriptor grid (d = grid^2 * channels)");
  embed->add_option("--external-store", embed_external, "pre-computed store to ingest");
  embed->add_option("--out", embed_out, "output store path")->required();

  // search
  auto* search = app.add_subcommand("search", "rank queries against a gallery");
  std::string se_gstore, se_gmanifest, se_qstore, se_center, se_out;
  std::size_t se_k = 10;
  double se_radius = 0.0;
  search->add_option("--gallery-store", se_gstore)->required();
  search->add_option("--gallery-manifest", se_gmanifest)->required();
  search->add_option("--query-store", se_qstore)->required();
  search->add_option("--k", se_k, "entries per ranked list");
  auto* se_center_opt = search->add_option("--center", se_center, "lat,lon neighbor center");
  auto* se_radius_opt = search->add_option("--radius-m", se_radius, "neighbor radius in meters");
  se_center_opt->needs(se_radius_opt);
  se_radius_opt->needs(se_center_opt);
  search->add_option("--out", se_out, "ranked output file")->required();

  // eval
  auto* eval = app.add_subcommand("eval", "score a ranked file");
  std::string ev_ranked, ev_qmanifest, ev_gmanifest, ev_out;
  std::vector<std::size_t> ev_kvalues = {1, 3, 5, 10};
  double ev_s = 5e3;
  bool ev_per_class = false;
  eval->add_option("--ranked", ev_ranked)->required();
  eval->add_option("--query-manifest", ev_qmanifest)->required();
  eval->add_option("--gallery-manifest", ev_gmanifest)->required();
  eval->add_option("--k-values", ev_kvalues, "SDM/recall K values");
  eval->add_option("--s", ev_s, "SDM amplification factor");
  eval->add_flag("--per-class", ev_per_class, "aggregate per class instead of per image");
  eval->add_option("--out", ev_out, "report path")->required();

  // augment
  auto* augment = app.add_subcommand("augment", "rotation crop augmentation");
  std::string au_image, au_sampling = "bilinear", au_out;
  double au_theta = 0.0;
  std::uint64_t au_seed = 0;
  int au_out_size = 0;
  augment->add_option("--image", au_image)->required();
  auto* au_theta_opt = augment->add_option("--theta", au_theta, "rotation angle in degrees");
  auto* au_seed_opt = augment->add_option("--seed", au_seed, "seed for a random angle");
  au_theta_opt->excludes(au_seed_opt);
  augment->add_option("--out-size", au_out_size, "output size (0 = preserve scale)");
  augment->add_option("--sampling", au_sampling, "nearest or bilinear");
  augment->add_option("--out", au_out)->required();

  // replay
  auto* rep = app.add_subcommand("replay", "replay a flight trace");
  std::string re_trace, re_gstore, re_gmanifest, re_qstore, re_out;
  std::string re_strategy = "global", re_anchor, re_on_empty = "fallback";
  std::string re_trajectory;
  double re_radius = 0.0, re_s = 5e3;
  std::size_t re_k = 10;
  std::vector<std::size_t> re_kvalues = {1, 3, 5, 10};
  rep->add_option("--trace", re_trace)->required();
  rep->add_option("--gallery-store", re_gstore)->required();
  rep->add_option("--gallery-manifest", re_gmanifest)->required();
  rep->add_option("--query-store", re_qstore)->required();
  rep->add_option("--strategy", re_strategy, "global or neighbor");
  rep->add_option("--radius-m", re_radius, "neighbor radius in meters");
  rep->add_option("--bootstrap-anchor", re_anchor, "lat,lon first-step anchor");
  rep->add_option("--on-empty", re_on_empty, "fallback or fail");
  rep->add_option("--k", re_k, "entries per ranked list");
  rep->add_option("--k-values", re_kvalues, "SDM/recall K values");
  rep->add_option("--s", re_s, "SDM amplification factor");
  rep->add_option("--out", re_out, "report path")->required();
  rep->add_option("--trajectory", re_trajectory, "optional GeoJSON path");

  try {
    app.parse(argc, argv);
    if (*cut) {
      return run_cut(cut_mosaic, cut_olat, cut_olon, cut_plat, cut_plon,
                     cut_windows, cut_stride, cut_out);
    }
    if (*embed) {
      if (embed_manifest.empty() == embed_external.empty()) {
        throw CLI::ValidationError(
            "embed needs exactly one of --manifest or --external-store");
      }
      return run_embed(embed_manifest, embed_grid, embed_external, embed_out);
    }
    if (*search) {
      return run_search(se_gstore, se_gmanifest, se_qstore, se_k, se_center,
                        se_radius, se_out);
    }
    if (*eval) {
      return run_eval(ev_ranked, ev_qmanifest, ev_gmanifest, ev_kvalues, ev_s,
                      ev_per_class, ev_out);
    }
    if (*augment) {
      return run_augment(au_image, au_theta, au_theta_opt->count() > 0, au_seed,
                         au_seed_opt->count() > 0, au_out_size, au_sampling,
                         au_out);
    }
    if (*rep) {
      return run_replay(re_trace, re_gstore, re_gmanifest, re_qstore,
                        re_strategy, re_radius, re_anchor, re_on_empty, re_k,
                        re_kvalues, re_s, re_out, re_trajectory);
    }
  } catch (const CLI::ParseError& e) {
    return app.exit(e) == 0 ? 0 : 1;
  } catch (const FormatError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  } catch (const Error& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 3;
  }
  return 1;
}
