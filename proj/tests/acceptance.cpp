// Acceptance suite: runs each acceptance criterion and prints one
// pass/fail line per criterion.
//
// usage: acceptance <path-to-uavloc-cli> <golden-dir> [--generate]
//   --generate regenerates the golden files for the end-to-end run.

#include <cmath>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <functional>
#include <iostream>
#include <random>
#include <sstream>
#include <string>
#include <vector>

#include "uavloc/uavloc.hpp"

namespace fs = std::filesystem;
using namespace uavloc;

namespace {

struct Check {
  bool ok = true;
  std::string detail;

  void expect(bool cond, const std::string& what) {
    if (!cond && ok) {
      ok = false;
      detail = what;
    }
  }
};

std::mt19937_64 make_rng(std::uint64_t seed) { return std::mt19937_64(seed); }

std::vector<float> random_vector(std::mt19937_64& g, std::size_t d) {
  std::uniform_real_distribution<float> u(-1.0f, 1.0f);
  std::vector<float> v(d);
  for (auto& x : v) x = u(g);
  return v;
}

GeoPoint random_point_near(std::mt19937_64& g, const GeoPoint& c, double box) {
  std::uniform_real_distribution<double> d(-box, box);
  return {c.lat + d(g), c.lon + d(g)};
}

std::string read_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) return "<unreadable:" + path + ">";
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

// --- criterion 1: SDM formula exactness ---------------------------------

Check sdm_formula_exactness() {
  Check c;
  const GeoPoint truth{30.0, 120.0};
  RankedList r;
  r.query_id = "q";
  r.entries.push_back({"g0", 0.1, truth, "x"});
  r.entries.push_back({"g1", 0.2, GeoPoint{30.0, 120.0 + 1e-4}, "x"});
  r.entries.push_back({"g2", 0.3, GeoPoint{30.0, 120.0 + 2e-4}, "x"});

  // Independent direct evaluation of the weighted-exponential formula.
  const double s = 5e3;
  const double ds[3] = {0.0, 1e-4, 2e-4};
  double num = 0.0, den = 0.0;
  for (int i = 1; i <= 3; ++i) {
    num += (3 - i + 1) * std::exp(-s * ds[i - 1]);
    den += (3 - i + 1);
  }
  const double oracle = num / den;
  c.expect(std::abs(oracle - 0.763490) < 1e-6, "oracle != 0.763490");
  c.expect(std::abs(sdm_k(r, truth, 3, s) - oracle) < 1e-6,
           "sdm_k deviates from direct-evaluation oracle");
  c.expect(std::abs(sdm_k(r, truth, 3, s) - 0.763490) < 1e-6,
           "sdm_k != 0.763490 within 1e-6");

  RankedList zero;
  zero.query_id = "q";
  for (int i = 0; i < 4; ++i) {
    zero.entries.push_back({"g" + std::to_string(i), 0.1, truth, "x"});
  }
  c.expect(std::abs(sdm_k(zero, truth, 4, s) - 1.0) < 1e-12,
           "SDM != 1 on all-zero distances");
  return c;
}

// --- criterion 2: metric oracle equivalence ------------------------------

Check metric_oracle_equivalence() {
  Check c;
  auto g = make_rng(1001);
  std::uniform_int_distribution<int> gallery_size(1, 20);
  std::uniform_int_distribution<int> n_classes(1, 5);

  std::vector<double> engine_aps, oracle_aps;
  for (int trial = 0; trial < 200; ++trial) {
    const int n = gallery_size(g);
    const int nc = n_classes(g);
    std::uniform_int_distribution<int> lbl(0, nc - 1);
    RankedList r;
    r.query_id = "q" + std::to_string(trial);
    std::vector<std::string> classes;
    for (int i = 0; i < n; ++i) {
      classes.push_back("c" + std::to_string(lbl(g)));
      r.entries.push_back({"g" + std::to_string(i), 0.05 * (i + 1),
                           GeoPoint{30.0, 120.0}, classes.back()});
    }
    const std::string truth = classes[static_cast<std::size_t>(lbl(g)) % n];

    // recall_at_k vs exhaustive membership scan, every k.
    for (int k = 1; k <= n; ++k) {
      int oracle = 0;
      for (int i = 0; i < k; ++i) {
        if (classes[i] == truth) oracle = 1;
      }
      c.expect(recall_at_k(r, truth, static_cast<std::size_t>(k)) == oracle,
               "recall_at_k mismatch");
    }

    // AP vs the direct definition.
    int rel = 0;
    double sum = 0.0;
    for (int i = 0; i < n; ++i) {
      if (classes[i] == truth) {
        ++rel;
        int hits = 0;
        for (int j = 0; j <= i; ++j) {
          if (classes[j] == truth) ++hits;
        }
        sum += static_cast<double>(hits) / (i + 1);
      }
    }
    const double ap = average_precision(r, truth);
    c.expect(ap == sum / rel, "AP mismatch vs definitional oracle");
    engine_aps.push_back(ap);
    oracle_aps.push_back(sum / rel);
  }

  // mAP: mean over queries, identical summation order.
  double ma = 0.0, mb = 0.0;
  for (std::size_t i = 0; i < engine_aps.size(); ++i) {
    ma += engine_aps[i];
    mb += oracle_aps[i];
  }
  c.expect(ma / engine_aps.size() == mb / oracle_aps.size(), "mAP mismatch");
  return c;
}

// --- criterion 3: R@1 vs SDM divergence on a near-miss -------------------

Check near_miss_divergence() {
  Check c;
  const GeoPoint truth{30.0, 120.0};
  RankedList r;
  r.query_id = "q";
  r.entries.push_back({"g0", 0.1, GeoPoint{30.0, 120.0 + 1e-5}, "wrong"});
  c.expect(recall_at_k(r, "right", 1) == 0, "R@1 should be 0");
  const double sdm1 = sdm_k(r, truth, 1, 5e3);
  c.expect(sdm1 >= 0.95, "SDM1 < 0.95");
  c.expect(std::abs(sdm1 - std::exp(-0.05)) < 1e-6, "SDM1 != e^-0.05");
  return c;
}

// --- criterion 4: tile-cut counts -----------------------------------------

Check tile_cut_counts() {
  Check c;
  auto g = make_rng(1002);

  Mosaic m;
  m.raster = Raster::make(1920, 1920, 1, 0);
  m.transform = {120.0, 30.0, 1e-5, -1e-5};
  CutResult r = cut_tiles(m, {640}, 0.25);
  c.expect(r.tiles.size() == 81, "expected 81 tiles");
  for (const TileRecord& t : r.tiles) {
    GeoPoint expected = pixel_to_geo(
        m.transform, t.offset_x + t.window_px / 2.0, t.offset_y + t.window_px / 2.0);
    c.expect(std::abs(t.center.lat - expected.lat) < 1e-9 &&
                 std::abs(t.center.lon - expected.lon) < 1e-9,
             "tile center deviates from affine identity");
  }

  std::uniform_int_distribution<int> dim(32, 800);
  std::uniform_int_distribution<int> win(8, 256);
  std::uniform_real_distribution<double> frac(0.05, 1.0);
  int done = 0;
  while (done < 50) {
    const int w = dim(g), h = dim(g), window = win(g);
    const double f = frac(g);
    const int stride = static_cast<int>(std::lround(window * f));
    if (stride < 1 || window > w || window > h) continue;
    ++done;
    Mosaic mm;
    mm.raster = Raster::make(w, h, 1, 0);
    mm.transform = {120.0, 30.0, 1e-6, -1e-6};
    CutResult rr = cut_tiles(mm, {window}, f);
    // Enumeration oracle over all (ox, oy) pairs.
    std::size_t expected = 0;
    for (int oy = 0; oy + window <= h; ++oy) {
      for (int ox = 0; ox + window <= w; ++ox) {
        if (ox % stride == 0 && oy % stride == 0) ++expected;
      }
    }
    c.expect(rr.tiles.size() == expected, "tile count != enumeration oracle");
  }
  return c;
}

// --- criterion 5: neighbor-search contracts -------------------------------

Check neighbor_search_contracts() {
  Check c;
  auto g = make_rng(1003);
  const GeoPoint base{30.0, 120.0};
  for (int trial = 0; trial < 100; ++trial) {
    GeoIndex index;
    index.dimension = 4;
    std::uniform_int_distribution<int> size(2, 40);
    const int n = size(g);
    for (int i = 0; i < n; ++i) {
      IndexEntry e;
      e.sample_id = "g" + std::to_string(i);
      e.embedding = {e.sample_id, random_vector(g, 4), false};
      e.geo = random_point_near(g, base, 0.01);
      e.class_id = "c" + std::to_string(i);
      index.entries.push_back(std::move(e));
    }
    Embedding q{"q", random_vector(g, 4), false};
    const GeoPoint center = random_point_near(g, base, 0.005);
    std::uniform_real_distribution<double> rad(50.0, 3000.0);
    const double radius = rad(g);

    // (a) every neighbor-ranked entry lies within the radius.
    try {
      RankedList r = rank_neighbor(index, q, center, radius, n);
      for (const RankedEntry& e : r.entries) {
        c.expect(meters_distance(e.geo, center) < radius,
                 "entry outside radius");
      }
    } catch (const EmptyDomainError&) {
      // valid outcome for a small radius
    }

    // (b) unbounded radius reduces to the global ranking, entry-exact.
    RankedList global = rank_global(index, q, n);
    RankedList unbounded = rank_neighbor(
        index, q, center, std::numeric_limits<double>::infinity(), n);
    c.expect(global.entries.size() == unbounded.entries.size(),
             "unbounded size mismatch");
    for (std::size_t i = 0; i < global.entries.size(); ++i) {
      c.expect(global.entries[i].sample_id == unbounded.entries[i].sample_id &&
                   global.entries[i].distance == unbounded.entries[i].distance,
               "unbounded reduction not entry-exact");
    }

    // (c) strict boundary: an entry at exactly M meters is excluded.
    const IndexEntry& probe = index.entries[0];
    const double exact = meters_distance(probe.geo, center);
    if (exact > 0.0) {
      GeoIndex filtered = filter_neighbor(index, center, exact);
      for (const IndexEntry& e : filtered.entries) {
        c.expect(e.sample_id != probe.sample_id,
                 "boundary entry not excluded at d == M");
      }
    }
  }
  return c;
}

// --- criterion 6: duplicate-tile mechanism reproduction -------------------

Check mechanism_reproduction() {
  Check c;
  const double radius = 100.0;
  auto build_world = [&]() {
    GeoIndex index;
    const std::size_t n = 10;
    index.dimension = n;
    for (std::size_t i = 0; i < n; ++i) {
      IndexEntry e;
      e.sample_id = "tile" + std::to_string(i);
      std::vector<float> v(n, 0.0f);
      v[i] = 1.0f;
      e.embedding = {e.sample_id, std::move(v), true};
      e.geo = {30.0 + i * 1.8e-4, 120.0};
      e.class_id = e.sample_id;
      index.entries.push_back(std::move(e));
    }
    IndexEntry dup = index.entries[3];
    dup.sample_id = "a_duplicate";
    dup.embedding.sample_id = dup.sample_id;
    dup.class_id = dup.sample_id;
    dup.geo = {30.05, 120.0};
    index.entries.push_back(dup);
    return index;
  };
  GeoIndex index = build_world();

  EmbeddingStore queries;
  queries.dimension = index.dimension;
  std::vector<TraceStep> trace;
  for (std::size_t t = 0; t < 6; ++t) {
    Embedding q;
    q.sample_id = "q" + std::to_string(t);
    q.vector = index.entries[t].embedding.vector;
    queries.entries.push_back(q);
    trace.push_back({t, q.sample_id, index.entries[t].class_id,
                     index.entries[t].geo});
  }

  Strategy global;
  ReplayReport rg = replay(trace, queries, index, global, 3);
  bool global_errs = false;
  for (const StepResult& s : rg.steps) {
    if (s.error_m > radius) global_errs = true;
  }
  c.expect(global_errs, "global replay never exceeds radius");

  Strategy neighbor;
  neighbor.kind = StrategyKind::neighbor;
  neighbor.radius_m = radius;
  ReplayReport rn = replay(trace, queries, index, neighbor, 3);
  for (const StepResult& s : rn.steps) {
    if (!s.fallback_used) {
      c.expect(s.error_m <= radius, "neighbor non-fallback error > radius");
    }
  }

  // Deterministic instance, byte-exact across runs.
  const fs::path dir = fs::temp_directory_path() / "uavloc_accept_mech";
  fs::create_directories(dir);
  save_replay_report(rn, (dir / "a.txt").string());
  ReplayReport rn2 = replay(trace, queries, index, neighbor, 3);
  save_replay_report(rn2, (dir / "b.txt").string());
  c.expect(read_file((dir / "a.txt").string()) ==
               read_file((dir / "b.txt").string()),
           "neighbor replay report not byte-exact across runs");
  fs::remove_all(dir);
  return c;
}

// --- criterion 7: augmentation geometry -----------------------------------

Check augmentation_geometry() {
  Check c;
  auto g = make_rng(1004);
  std::uniform_real_distribution<double> angle(0.0, 2.0 * M_PI);
  std::uniform_int_distribution<int> dim(8, 300);
  std::uniform_int_distribution<int> px(0, 255);

  for (int trial = 0; trial < 100; ++trial) {
    const int w = dim(g), h = dim(g);
    const double r = std::min(w, h) / 2.0;
    auto corners = inscribed_square_corners(w, h, angle(g));
    for (const PointXY& p : corners) {
      c.expect(std::abs(std::hypot(p.x - w / 2.0, p.y - h / 2.0) - r) < 1e-9,
               "corner radius invariant violated");
    }
  }

  for (int trial = 0; trial < 20; ++trial) {
    const int w = dim(g), h = dim(g);
    Raster img = Raster::make(w, h, 1);
    for (auto& v : img.pixels) v = static_cast<std::uint8_t>(px(g));
    const double theta = angle(g);
    RotationCrop a;
    a.theta = theta;
    a.out_size = 32;
    a.sampling = Sampling::nearest;
    RotationCrop b = a;
    b.theta = theta + M_PI / 2.0;
    Raster ra = rotated_crop(img, a);
    Raster rb = rotated_crop(img, b);
    for (int v = 0; v < 32; ++v) {
      for (int u = 0; u < 32; ++u) {
        c.expect(rb.at(u, v, 0) == ra.at(31 - v, u, 0),
                 "quarter-turn pixel permutation violated");
      }
    }
  }
  return c;
}

// --- criterion 8: format round-trips ---------------------------------------

Check format_roundtrips() {
  Check c;
  auto g = make_rng(1005);
  const fs::path dir = fs::temp_directory_path() / "uavloc_accept_fmt";
  fs::create_directories(dir);
  std::uniform_int_distribution<int> count(0, 20);
  std::uniform_int_distribution<int> dimension(1, 64);
  std::uniform_int_distribution<int> view(0, 1);

  for (int trial = 0; trial < 100; ++trial) {
    // Embedding store.
    EmbeddingStore s;
    s.dimension = static_cast<std::uint32_t>(dimension(g));
    const int n = count(g);
    for (int i = 0; i < n; ++i) {
      s.entries.push_back({"id_" + std::to_string(trial) + "_" + std::to_string(i),
                           random_vector(g, s.dimension), false});
    }
    const auto p1 = (dir / "s1.emb").string();
    const auto p2 = (dir / "s2.emb").string();
    write_store(s, p1);
    write_store(read_store(p1), p2);
    c.expect(read_file(p1) == read_file(p2), "store round trip not byte-exact");

    // Sample manifest.
    SplitManifest m;
    m.split = trial % 2 ? Split::query : Split::gallery;
    const int nr = count(g);
    for (int i = 0; i < nr; ++i) {
      SampleRecord r;
      r.sample_id = "s" + std::to_string(i);
      r.class_id = "c" + std::to_string(i);  // one class per sample
      r.view = view(g) ? View::drone : View::satellite;
      r.geo = random_point_near(g, {30.0, 120.0}, 0.05);
      if (i % 3 == 0) r.altitude_m = 80.0 + i;
      r.image_path = "img/" + r.sample_id + ".pgm";
      m.records.push_back(std::move(r));
    }
    const auto m1 = (dir / "m1.manifest").string();
    const auto m2 = (dir / "m2.manifest").string();
    save_manifest(m, m1);
    save_manifest(load_manifest(m1), m2);
    c.expect(read_file(m1) == read_file(m2),
             "manifest round trip not byte-exact");
  }
  fs::remove_all(dir);
  return c;
}

// --- criterion 9: end-to-end golden run -------------------------------------

std::uint8_t mosaic_pixel(int x, int y) {
  // splitmix64 of the pixel position; platform-independent.
  std::uint64_t z = static_cast<std::uint64_t>(y) * 4096u + x + 0x9e3779b97f4a7c15ull;
  z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ull;
  z = (z ^ (z >> 27)) * 0x94d049bb133111ebull;
  z = z ^ (z >> 31);
  return static_cast<std::uint8_t>(z & 0xff);
}

int run_cmd(const fs::path& cwd, const std::string& cli,
            const std::string& args) {
  const std::string cmd =
      "cd " + cwd.string() + " && " + cli + " " + args + " > /dev/null 2>&1";
  return std::system(cmd.c_str());
}

Check end_to_end_golden(const std::string& cli, const fs::path& golden_dir,
                        bool generate) {
  Check c;
  const fs::path dir = fs::temp_directory_path() / "uavloc_accept_e2e";
  fs::remove_all(dir);
  fs::create_directories(dir);

  // Synthetic world: 960x960 mosaic, one 320 px scale, 1/4 stride.
  Raster mosaic = Raster::make(960, 960, 1);
  for (int y = 0; y < 960; ++y) {
    for (int x = 0; x < 960; ++x) mosaic.at(x, y, 0) = mosaic_pixel(x, y);
  }
  write_raster(mosaic, (dir / "mosaic.pgm").string());
  GeoTransform transform{120.0, 30.0, 1e-5, -1e-5};

  // Flight path along the diagonal, one query per visited tile.
  std::vector<int> offsets = {0, 80, 160, 240, 320};
  SplitManifest queries;
  queries.split = Split::query;
  std::vector<TraceStep> trace;
  fs::create_directories(dir / "queries");
  for (std::size_t t = 0; t < offsets.size(); ++t) {
    const int o = offsets[t];
    Raster img = crop(mosaic, o, o, 320);
    const std::string id = "q" + std::to_string(t);
    write_raster(img, (dir / "queries" / (id + ".pgm")).string());
    const GeoPoint center = pixel_to_geo(transform, o + 160.0, o + 160.0);
    SampleRecord r;
    r.sample_id = id;
    r.class_id = tile_id_for(320, o, o);
    r.view = View::drone;
    r.geo = center;
    r.altitude_m = 90.0;
    r.image_path = "queries/" + id + ".pgm";
    queries.records.push_back(r);
    trace.push_back({t, id, r.class_id, center});
  }
  save_manifest(queries, (dir / "queries.manifest").string());
  save_trace(trace, (dir / "flight.trace").string());

  bool ok = true;
  ok &= run_cmd(dir, cli,
                "cut --mosaic mosaic.pgm --origin-lat 30 --origin-lon 120 "
                "--px-lat -1e-5 --px-lon 1e-5 --windows 320 "
                "--stride-fraction 0.25 --out world") == 0;
  ok &= run_cmd(dir, cli,
                "embed --manifest world/tiles.manifest --grid 4 "
                "--out gallery.emb") == 0;
  ok &= run_cmd(dir, cli,
                "embed --manifest queries.manifest --grid 4 "
                "--out queries.emb") == 0;
  ok &= run_cmd(dir, cli,
                "search --gallery-store gallery.emb "
                "--gallery-manifest world/tiles.manifest "
                "--query-store queries.emb --k 81 --out ranked.txt") == 0;
  ok &= run_cmd(dir, cli,
                "eval --ranked ranked.txt --query-manifest queries.manifest "
                "--gallery-manifest world/tiles.manifest --k-values 1 3 "
                "--s 5000 --out eval.txt") == 0;
  ok &= run_cmd(dir, cli,
                "replay --trace flight.trace --gallery-store gallery.emb "
                "--gallery-manifest world/tiles.manifest "
                "--query-store queries.emb --strategy global --k 5 "
                "--k-values 1 3 --s 5000 --out replay_global.txt "
                "--trajectory traj_global.geojson") == 0;
  ok &= run_cmd(dir, cli,
                "replay --trace flight.trace --gallery-store gallery.emb "
                "--gallery-manifest world/tiles.manifest "
                "--query-store queries.emb --strategy neighbor "
                "--radius-m 200 --on-empty fallback --k 5 --k-values 1 3 "
                "--s 5000 --out replay_neighbor.txt "
                "--trajectory traj_neighbor.geojson") == 0;
  c.expect(ok, "a pipeline stage exited nonzero");
  if (!ok) return c;

  const std::vector<std::string> artifacts = {
      "world/tiles.manifest", "eval.txt",
      "replay_global.txt",    "replay_neighbor.txt",
      "traj_global.geojson",  "traj_neighbor.geojson"};
  if (generate) {
    fs::create_directories(golden_dir);
    for (const std::string& a : artifacts) {
      fs::copy_file(dir / a, golden_dir / fs::path(a).filename(),
                    fs::copy_options::overwrite_existing);
    }
    std::cout << "golden files regenerated in " << golden_dir << "\n";
  } else {
    for (const std::string& a : artifacts) {
      const std::string got = read_file((dir / a).string());
      const std::string want =
          read_file((golden_dir / fs::path(a).filename()).string());
      c.expect(!got.empty() && got == want,
               a + " differs from checked-in golden file");
    }
  }

  // CLI surface checks: --help exits zero, conflicting flags are rejected.
  c.expect(run_cmd(dir, cli, "--help") == 0, "--help exited nonzero");
  const int conflict = run_cmd(
      dir, cli,
      "replay --trace flight.trace --gallery-store gallery.emb "
      "--gallery-manifest world/tiles.manifest --query-store queries.emb "
      "--strategy global --radius-m 50 --out x.txt");
  c.expect(conflict != 0, "conflicting global+radius flags were accepted");

  fs::remove_all(dir);
  return c;
}

}  // namespace

int main(int argc, char** argv) {
  if (argc < 3) {
    std::cerr << "usage: acceptance <uavloc-cli> <golden-dir> [--generate]\n";
    return 2;
  }
  const std::string cli = argv[1];
  const fs::path golden_dir = argv[2];
  const bool generate = argc > 3 && std::string(argv[3]) == "--generate";

  struct Criterion {
    std::string name;
    std::function<Check()> run;
  };
  const std::vector<Criterion> criteria = {
      {"sdm-formula-exactness", sdm_formula_exactness},
      {"metric-oracle-equivalence", metric_oracle_equivalence},
      {"near-miss-divergence", near_miss_divergence},
      {"tile-cut-counts", tile_cut_counts},
      {"neighbor-search-contracts", neighbor_search_contracts},
      {"mechanism-reproduction", mechanism_reproduction},
      {"augmentation-geometry", augmentation_geometry},
      {"format-roundtrips", format_roundtrips},
      {"end-to-end-golden",
       [&]() { return end_to_end_golden(cli, golden_dir, generate); }},
  };

  int failures = 0;
  for (const auto& criterion : criteria) {
    Check c;
    try {
      c = criterion.run();
    } catch (const std::exception& e) {
      c.ok = false;
      c.detail = std::string("exception: ") + e.what();
    }
    std::cout << (c.ok ? "[PASS] " : "[FAIL] ") << criterion.name;
    if (!c.ok) std::cout << " — " << c.detail;
    std::cout << "\n";
    if (!c.ok) ++failures;
  }
  return failures == 0 ? 0 : 1;
}
