#include "cli.hpp"

#include <algorithm>
#include <atomic>
#include <chrono>
#include <cstdlib>
#include <exception>
#include <filesystem>
#include <functional>
#include <map>
#include <optional>
#include <thread>

#include <CLI11.hpp>
#include <json.hpp>

#include "mapseg/components.hpp"
#include "mapseg/config.hpp"
#include "mapseg/io.hpp"
#include "mapseg/metrics.hpp"
#include "mapseg/pipelines.hpp"
#include "mapseg/report.hpp"
#include "mapseg/synth.hpp"

namespace mapseg::cli {

namespace {

namespace fs = std::filesystem;
using nlohmann::json;

// Usage problems detected after parsing (bad combinations of inputs).
struct UsageError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

struct Manifest {
  std::string command;
  std::vector<std::string> argv;
  std::vector<std::string> inputs;
  std::string config = "";
  std::string config_text;
  std::string output_dir;
  std::optional<std::uint64_t> seed;
  std::vector<std::string> outputs;
  std::map<std::string, std::vector<std::string>> diagnostics;
};

void write_manifest(const Manifest& m, double seconds) {
  json j = {{"command", m.command},
            {"argv", m.argv},
            {"inputs", m.inputs},
            {"config", m.config},
            {"config_text", m.config_text},
            {"output_dir", m.output_dir},
            {"versions", {{"mapseg", kVersion}, {"codec", io::codec_version()}}},
            {"seed", m.seed ? json(*m.seed) : json(nullptr)},
            {"wall_time_s", seconds},
            {"outputs", m.outputs},
            {"diagnostics", m.diagnostics}};
  io::write_text(fs::path(m.output_dir) / "manifest.json", j.dump(2) + "\n");
}

unsigned thread_cap() {
  const unsigned hw = std::max(1u, std::thread::hardware_concurrency());
  const char* env = std::getenv("MAPSEG_THREADS");
  const long cap = env ? std::strtol(env, nullptr, 10) : 0;
  return cap > 0 ? std::min<unsigned>(hw, static_cast<unsigned>(cap)) : hw;
}

// Runs job(i) for i in [0, n) on up to thread_cap() workers. The first
// failure in index order is rethrown after every worker has finished.
void parallel_for(std::size_t n, const std::function<void(std::size_t)>& job) {
  std::vector<std::exception_ptr> errors(n);
  std::atomic<std::size_t> next{0};
  auto worker = [&] {
    for (std::size_t i = next++; i < n; i = next++) {
      try {
        job(i);
      } catch (...) {
        errors[i] = std::current_exception();
      }
    }
  };
  const unsigned workers = static_cast<unsigned>(std::min<std::size_t>(thread_cap(), n));
  std::vector<std::thread> pool;
  for (unsigned t = 1; t < workers; ++t) pool.emplace_back(worker);
  worker();
  for (auto& t : pool) t.join();
  for (auto& e : errors) {
    if (e) std::rethrow_exception(e);
  }
}

bool has_ext(const fs::path& p, std::initializer_list<const char*> exts) {
  std::string e = p.extension().string();
  std::transform(e.begin(), e.end(), e.begin(), [](unsigned char c) { return std::tolower(c); });
  return std::any_of(exts.begin(), exts.end(), [&](const char* x) { return e == x; });
}

const std::initializer_list<const char*> kImageExt = {".png", ".pgm", ".ppm", ".pnm"};

// A file, or the sorted matching files of a directory.
std::vector<fs::path> list_inputs(const fs::path& p, std::initializer_list<const char*> exts) {
  if (!fs::exists(p)) throw IoError("no such file or directory: " + p.string());
  if (!fs::is_directory(p)) return {p};
  std::vector<fs::path> out;
  for (const auto& e : fs::directory_iterator(p)) {
    if (e.is_regular_file() && has_ext(e.path(), exts)) out.push_back(e.path());
  }
  std::sort(out.begin(), out.end());
  if (out.empty()) throw IoError("no input files in " + p.string());
  return out;
}

// Partner of `item` in `other`: `other` itself when it is a file, else the
// file with the same stem.
fs::path partner(const fs::path& item, const fs::path& other,
                 std::initializer_list<const char*> exts) {
  if (!fs::is_directory(other)) return other;
  for (const auto& e : fs::directory_iterator(other)) {
    if (e.is_regular_file() && e.path().stem() == item.stem() && has_ext(e.path(), exts)) {
      return e.path();
    }
  }
  throw IoError("no counterpart for " + item.filename().string() + " in " + other.string());
}

void check_pairing(const fs::path& a, const fs::path& b) {
  if (fs::is_directory(a) != fs::is_directory(b)) {
    throw UsageError("--pred and --gt must both be files or both be directories");
  }
}

std::string size_text(int w, int h) { return std::to_string(w) + "x" + std::to_string(h); }

template <class A, class B>
void require_match(const A& a, const B& b, const fs::path& pa, const fs::path& pb) {
  if (a.width() != b.width() || a.height() != b.height()) {
    throw DimensionMismatch("size mismatch: " + pa.string() + " is " +
                            size_text(a.width(), a.height()) + ", " + pb.string() + " is " +
                            size_text(b.width(), b.height()));
  }
}

// RGB images hold packed instance ids; gray images are binary masks whose
// connected components are the instances.
LabelImage load_instances(const fs::path& p, morph::Connectivity conn) {
  io::AnyImage img = io::load_image(p);
  if (std::holds_alternative<RgbImage>(img)) return io::load_labels(p);
  return components::label_components(io::load_mask(p), conn);
}

void save_curve(const metrics::Curve& curve, const fs::path& dir, const std::string& stem,
                const report::PlotStyle& style, Manifest& m) {
  io::write_text(dir / (stem + ".csv"), report::curve_csv(curve));
  io::write_text(dir / (stem + ".svg"), report::curve_svg(curve, style));
  m.outputs.push_back(stem + ".csv");
  m.outputs.push_back(stem + ".svg");
}

struct RunOptions {
  std::string task;
  std::string input;
  std::string mask;
  std::string config = "full";
  std::string out;
};

void cmd_run(const RunOptions& o, Manifest& m) {
  const bool wants_mask = o.task == "t1-cmm2" || o.task == "t3-uwb";
  if (!o.mask.empty() && !wants_mask) throw UsageError("--mask only applies to t1-cmm2 and t3-uwb");
  const pipelines::PipelineConfig cfg = config::load_pipeline(o.config);
  m.config = o.config;
  m.config_text = config::to_text(cfg);
  const std::vector<fs::path> inputs = list_inputs(o.input, kImageExt);
  if (!o.mask.empty() && fs::is_directory(o.input) != fs::is_directory(o.mask)) {
    throw UsageError("input and --mask must both be files or both be directories");
  }
  fs::create_directories(o.out);

  std::vector<std::string> outputs(inputs.size());
  std::vector<pipelines::Diagnostics> diags(inputs.size());
  parallel_for(inputs.size(), [&](std::size_t i) {
    const fs::path& in = inputs[i];
    const RgbImage img = io::load_rgb(in);
    pipelines::Diagnostics& d = diags[i];
    BinaryMask content;
    if (wants_mask) {
      if (o.mask.empty()) {
        // Without a given content mask the CMM content extraction supplies one.
        content = pipelines::task2_content_cmm(img, cfg, &d);
      } else {
        const fs::path mp = partner(in, o.mask, kImageExt);
        content = io::load_mask(mp);
        require_match(img, content, in, mp);
      }
    }
    const std::string stem = in.stem().string();
    if (o.task == "t1-cmm2") {
      io::save_mask(pipelines::task1_blocks_cmm2(img, content, cfg, &d), fs::path(o.out) / (stem + ".png"));
      outputs[i] = stem + ".png";
    } else if (o.task == "t2-cmm") {
      io::save_mask(pipelines::task2_content_cmm(img, cfg, &d), fs::path(o.out) / (stem + ".png"));
      outputs[i] = stem + ".png";
    } else if (o.task == "t2-bin-uwb") {
      io::save_mask(pipelines::task2_binarize_uwb(img, cfg), fs::path(o.out) / (stem + ".png"));
      outputs[i] = stem + ".png";
    } else {
      const PointList pts = o.task == "t3-uwb" ? pipelines::task3_graticule_uwb(img, content, cfg, &d)
                                               : pipelines::task3_graticule_cmm(img, cfg, &d);
      io::save_points(pts, fs::path(o.out) / (stem + ".csv"));
      outputs[i] = stem + ".csv";
    }
  });
  for (std::size_t i = 0; i < inputs.size(); ++i) {
    m.inputs.push_back(inputs[i].string());
    m.outputs.push_back(outputs[i]);
    if (!diags[i].empty()) m.diagnostics[inputs[i].filename().string()] = diags[i];
  }
}

struct EvalOptions {
  std::string task;
  std::string pred;
  std::string gt;
  std::string out;
  bool per_image = false;
  int connectivity = 8;
  std::string hd_variant = "max";
  std::string matching = "mutual";
  double beta = 0.5;
  double max_threshold = 50.0;
};

void cmd_eval(const EvalOptions& o, Manifest& m, std::ostream& out) {
  check_pairing(o.pred, o.gt);
  const bool points = o.task == "t3";
  const auto exts = points ? std::initializer_list<const char*>{".csv"} : kImageExt;
  const std::vector<fs::path> preds = list_inputs(o.pred, exts);
  std::vector<fs::path> gts;
  for (const auto& p : preds) gts.push_back(partner(p, o.gt, exts));
  fs::create_directories(o.out);
  for (std::size_t i = 0; i < preds.size(); ++i) {
    m.inputs.push_back(preds[i].string());
    m.inputs.push_back(gts[i].string());
  }
  const fs::path dir(o.out);

  if (o.task == "t1") {
    const auto conn = o.connectivity == 4 ? morph::Connectivity::Four : morph::Connectivity::Eight;
    std::vector<report::T1Item> items(preds.size());
    parallel_for(preds.size(), [&](std::size_t i) {
      const LabelImage p = load_instances(preds[i], conn);
      const LabelImage g = load_instances(gts[i], conn);
      require_match(p, g, preds[i], gts[i]);
      items[i] = {preds[i].stem().string(), metrics::coco_pq(p, g)};
    });
    const std::string text = report::t1_json(items, o.per_image);
    io::write_text(dir / "t1.json", text);
    m.outputs.push_back("t1.json");
    std::vector<metrics::PQReport> reports;
    for (const auto& it : items) reports.push_back(it.pq);
    save_curve(metrics::pool_pq(reports).fscore_curve, dir, "t1_fscore_iou",
               {"F-score vs IoU threshold", "IoU threshold", "F-score"}, m);
    out << text;
  } else if (o.task == "t2") {
    const auto variant = o.hd_variant == "pooled" ? metrics::HausdorffVariant::Pooled
                                                  : metrics::HausdorffVariant::MaxOfDirected;
    std::vector<report::T2Item> items(preds.size());
    parallel_for(preds.size(), [&](std::size_t i) {
      const BinaryMask p = io::load_mask(preds[i]);
      const BinaryMask g = io::load_mask(gts[i]);
      require_match(p, g, preds[i], gts[i]);
      items[i] = {preds[i].stem().string(), metrics::hausdorff95(p, g, variant)};
    });
    const std::string text = report::t2_json(items, o.per_image, variant);
    io::write_text(dir / "t2.json", text);
    m.outputs.push_back("t2.json");
    out << text;
  } else {
    metrics::DetectionParams params;
    params.beta = o.beta;
    params.max_threshold = o.max_threshold;
    params.matching = o.matching == "gt-nearest" ? metrics::PointMatching::GtNearest
                                                 : metrics::PointMatching::MutualNearest;
    std::vector<report::T3Item> items(preds.size());
    parallel_for(preds.size(), [&](std::size_t i) {
      const PointList p = io::load_points(preds[i]);
      const PointList g = io::load_points(gts[i]);
      items[i] = {preds[i].stem().string(), metrics::detection_score(p, g, params),
                  static_cast<long long>(p.size()), static_cast<long long>(g.size())};
    });
    const std::string text = report::t3_json(items, o.per_image, params);
    io::write_text(dir / "t3.json", text);
    m.outputs.push_back("t3.json");
    std::vector<metrics::Curve> curves;
    for (const auto& it : items) curves.push_back(it.curve.fbeta);
    save_curve(report::mean_curve(curves), dir, "t3_fbeta_distance",
               {"F-beta vs distance threshold", "distance threshold (px)", "F-beta"}, m);
    out << text;
  }
}

struct SynthOptions {
  std::string spec = "default";
  std::string out;
  std::optional<std::uint64_t> seed;
  double level = 0.0;
};

void cmd_synth(const SynthOptions& o, Manifest& m) {
  synth::SheetSpec spec = config::load_sheet(o.spec);
  if (o.seed) spec.seed = *o.seed;
  m.config = o.spec;
  m.config_text = config::to_text(spec);
  m.seed = spec.seed;
  const synth::Sheet sheet = synth::generate(spec);
  const RgbImage image = o.level > 0.0 ? synth::corrupt(sheet.image, o.level, spec.seed) : sheet.image;
  const fs::path dir(o.out);
  fs::create_directories(dir);
  io::save_png(image, dir / "image.png");
  io::save_mask(sheet.truth.content, dir / "content.png");
  io::save_labels(sheet.truth.blocks, dir / "blocks.png");
  io::save_points(sheet.truth.intersections, dir / "intersections.csv");
  io::write_text(dir / "spec.toml", m.config_text);
  m.outputs = {"image.png", "content.png", "blocks.png", "intersections.csv", "spec.toml"};
}

void cmd_plot(const std::string& csv, const std::string& svg, const std::string& title) {
  const metrics::Curve curve = report::parse_curve_csv(io::read_text(csv));
  const fs::path out(svg);
  if (out.has_parent_path()) fs::create_directories(out.parent_path());
  io::write_text(out, report::curve_svg(curve, {title, "threshold", "value"}));
}

// Re-executes the recorded command into a new output directory, feeding
// the recorded effective configuration back in.
std::vector<std::string> replay_args(const std::string& manifest_path, const std::string& out) {
  const json j = json::parse(io::read_text(manifest_path), nullptr, false);
  if (j.is_discarded() || !j.contains("argv") || !j["argv"].is_array()) {
    throw FormatError("not a run manifest: " + manifest_path);
  }
  std::vector<std::string> args = j["argv"].get<std::vector<std::string>>();
  const std::string command = j.value("command", "");
  fs::create_directories(out);
  std::string cfg_file;
  if ((command == "run" || command == "synth") && !j.value("config_text", "").empty()) {
    cfg_file = (fs::path(out) / (command == "run" ? "config.toml" : "replay_spec.toml")).string();
    io::write_text(cfg_file, j["config_text"].get<std::string>());
  }
  std::vector<std::string> next;
  for (std::size_t i = 0; i < args.size(); ++i) {
    const std::string& a = args[i];
    const bool has_value = i + 1 < args.size();
    if ((a == "-o" || a == "--out") && has_value) {
      ++i;
      continue;
    }
    if (a == "--config" || a == "--spec" || a == "--seed") {
      if (has_value) ++i;
      continue;
    }
    if (a.rfind("-o=", 0) == 0 || a.rfind("--out=", 0) == 0 || a.rfind("--config=", 0) == 0 ||
        a.rfind("--spec=", 0) == 0 || a.rfind("--seed=", 0) == 0) {
      continue;
    }
    next.push_back(a);
  }
  if (!cfg_file.empty()) {
    next.push_back(command == "run" ? "--config" : "--spec");
    next.push_back(cfg_file);
  }
  next.push_back("-o");
  next.push_back(out);
  return next;
}

}  // namespace

int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  CLI::App app{"Historical map segmentation: pipelines, metrics and synthetic sheets", "mapseg"};
  app.set_version_flag("--version", std::string("mapseg ") + kVersion);
  app.require_subcommand(1);

  RunOptions ro;
  auto* run_cmd = app.add_subcommand("run", "Run a pipeline on an image or a directory of images");
  run_cmd->add_option("task", ro.task, "Pipeline")
      ->required()
      ->check(CLI::IsMember({"t1-cmm2", "t2-cmm", "t2-bin-uwb", "t3-uwb", "t3-cmm"}));
  run_cmd->add_option("input", ro.input, "Image file or directory")->required();
  run_cmd->add_option("--mask", ro.mask, "Content mask (file or directory) for t1-cmm2 / t3-uwb");
  run_cmd->add_option("--config", ro.config, "Config file, or preset 'full' / 'desk'");
  run_cmd->add_option("-o,--out", ro.out, "Output directory")->required();

  EvalOptions eo;
  auto* eval_cmd = app.add_subcommand("eval", "Score predictions against ground truth");
  eval_cmd->add_option("task", eo.task, "Task")->required()->check(CLI::IsMember({"t1", "t2", "t3"}));
  eval_cmd->add_option("--pred", eo.pred, "Prediction file or directory")->required();
  eval_cmd->add_option("--gt", eo.gt, "Ground-truth file or directory")->required();
  eval_cmd->add_option("-o,--out", eo.out, "Output directory")->required();
  eval_cmd->add_flag("--per-image", eo.per_image, "Include per-image scores");
  eval_cmd->add_option("--connectivity", eo.connectivity, "t1: instance connectivity of binary masks")
      ->check(CLI::IsMember({4, 8}));
  eval_cmd->add_option("--hd-variant", eo.hd_variant, "t2: max (of directed P95) or pooled")
      ->check(CLI::IsMember({"max", "pooled"}));
  eval_cmd->add_option("--matching", eo.matching, "t3: mutual or gt-nearest")
      ->check(CLI::IsMember({"mutual", "gt-nearest"}));
  eval_cmd->add_option("--beta", eo.beta, "t3: F-beta weight")->check(CLI::PositiveNumber);
  eval_cmd->add_option("--max-threshold", eo.max_threshold, "t3: largest distance threshold (px)")
      ->check(CLI::PositiveNumber);

  SynthOptions so;
  auto* synth_cmd = app.add_subcommand("synth", "Generate a synthetic sheet with ground truth");
  synth_cmd->add_option("--spec", so.spec, "Sheet spec file, or 'default'");
  synth_cmd->add_option("--seed", so.seed, "Override the spec seed");
  synth_cmd->add_option("--level", so.level, "Corruption level in [0, 1]")->check(CLI::Range(0.0, 1.0));
  synth_cmd->add_option("-o,--out", so.out, "Output directory")->required();

  std::string plot_in, plot_out, plot_title;
  auto* plot_cmd = app.add_subcommand("plot", "Render a threshold,value CSV curve as SVG");
  plot_cmd->add_option("curve", plot_in, "Curve CSV")->required();
  plot_cmd->add_option("-o,--out", plot_out, "SVG file")->required();
  plot_cmd->add_option("--title", plot_title, "Plot title");

  std::string replay_manifest, replay_out;
  auto* replay_cmd = app.add_subcommand("replay", "Re-run the command recorded in a manifest");
  replay_cmd->add_option("manifest", replay_manifest, "manifest.json")->required();
  replay_cmd->add_option("-o,--out", replay_out, "Output directory")->required();

  try {
    std::vector<std::string> rev(args.rbegin(), args.rend());
    app.parse(rev);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e, out, err);
    return code == 0 ? 0 : 1;
  }

  const auto t0 = std::chrono::steady_clock::now();
  try {
    if (*replay_cmd) return run(replay_args(replay_manifest, replay_out), out, err);
    if (*plot_cmd) {
      cmd_plot(plot_in, plot_out, plot_title);
      return 0;
    }
    Manifest m;
    m.argv = args;
    if (*run_cmd) {
      m.command = "run";
      m.output_dir = ro.out;
      cmd_run(ro, m);
    } else if (*eval_cmd) {
      m.command = "eval";
      m.output_dir = eo.out;
      cmd_eval(eo, m, out);
    } else {
      m.command = "synth";
      m.output_dir = so.out;
      cmd_synth(so, m);
    }
    const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    write_manifest(m, secs);
    return 0;
  } catch (const UsageError& e) {
    err << "mapseg: " << e.what() << "\n";
    return 1;
  } catch (const std::exception& e) {
    err << "mapseg: " << e.what() << "\n";
    return 2;
  }
}

}  // namespace mapseg::cli
