#include "thermoscan/cli.hpp"

#include <CLI11.hpp>

#include <cstdlib>
#include <filesystem>
#include <ostream>

#include "thermoscan/analysis.hpp"
#include "thermoscan/parallel.hpp"
#include "thermoscan/pipeline.hpp"
#include "thermoscan/png_io.hpp"
#include "thermoscan/render.hpp"
#include "thermoscan/service.hpp"
#include "thermoscan/synthetic.hpp"

namespace thermoscan::cli {
namespace fs = std::filesystem;
using nlohmann::json;

namespace {

json read_json_file(const std::string& path, Errc on_bad) {
  const auto bytes = png::read_file(path);
  json j = json::parse(bytes.begin(), bytes.end(), nullptr, false);
  if (j.is_discarded()) throw Error(on_bad, path + " is not valid JSON");
  return j;
}

void write_text(const fs::path& path, const std::string& text) {
  png::write_file(path, std::span(reinterpret_cast<const std::uint8_t*>(text.data()), text.size()));
}

void ensure_dir(const fs::path& dir) {
  std::error_code ec;
  fs::create_directories(dir, ec);
  if (!fs::is_directory(dir)) throw Error(Errc::Io, "cannot create output directory " + dir.string());
}

Thermogram load_input(const std::string& path) { return load_thermogram(png::read_file(path)); }

PipelineConfig load_pipeline_config(const std::string& path) {
  if (path.empty()) return {};
  return pipeline_config_from_json(read_json_file(path, Errc::InvalidConfig));
}

json histograms_json(const DefectReport& rep) {
  json modules = json::array();
  for (const auto& m : rep.modules) {
    json edges = json::array();
    for (double e : m.stats.histogram.edges) edges.push_back(round6(e));
    modules.push_back({{"label", m.label},
                       {"n", m.stats.n},
                       {"edges", edges},
                       {"counts", m.stats.histogram.counts},
                       {"mean_c", round6(m.stats.mean_c)},
                       {"std_c", round6(m.stats.std_c)},
                       {"threshold_c", round6(m.stats.threshold_c)}});
  }
  return {{"thermogram_id", rep.thermogram_id}, {"modules", modules}};
}

int cmd_synth(const std::string& spec_path, const fs::path& out) {
  const SyntheticSpec spec = synthetic_spec_from_json(read_json_file(spec_path, Errc::SpecInvalid));
  const SyntheticThermogram syn = generate_synthetic(spec);
  ensure_dir(out);
  png::write_file(out / "thermogram.tgrm", save_thermogram(syn.thermogram));
  png::write_file(out / "truth_labels.png", render::label_png(syn.truth_labels));
  png::write_file(out / "truth_defects.png", png::encode_mask(syn.truth_defects));
  write_text(out / "spec.json", dump_document(to_json(spec)));
  return kExitOk;
}

int cmd_segment(const std::string& input, const std::string& config, const fs::path& out) {
  const Thermogram t = load_input(input);
  const SegmentationResult seg = segment(t, load_pipeline_config(config));
  ensure_dir(out);
  png::write_file(out / "labels.png", render::label_png(seg.labels));
  png::write_file(out / "boundaries.png", render::overlay_png(t, &seg, nullptr));
  write_text(out / "regions.json", dump_document(regions_to_json(seg, t.id())));
  return kExitOk;
}

int cmd_analyze(const std::string& input, const std::string& config, const AnalysisConfig& acfg,
                const fs::path& out) {
  const Thermogram t = load_input(input);
  const SegmentationResult seg = segment(t, load_pipeline_config(config));
  const DefectReport rep = analyze(t, seg, acfg);
  ensure_dir(out);
  write_text(out / "report.json", dump_document(to_json(rep)));
  png::write_file(out / "defects.png", render::overlay_png(t, &seg, &rep));
  write_text(out / "histograms.json", dump_document(histograms_json(rep)));
  return kExitOk;
}

int cmd_serve(const std::string& bind, const std::string& store_dir, std::ostream& out) {
  const auto colon = bind.rfind(':');
  if (colon == std::string::npos) throw Error(Errc::InvalidParameter, "--bind expects HOST:PORT");
  const std::string host = bind.substr(0, colon);
  int port = 0;
  try {
    port = std::stoi(bind.substr(colon + 1));
  } catch (const std::exception&) {
    throw Error(Errc::InvalidParameter, "--bind port must be a number");
  }
  if (port < 0 || port > 65535) throw Error(Errc::InvalidParameter, "--bind port out of range");
  service::SessionStore store(store_dir);
  service::Server server(store);
  const int bound = server.bind(host, port);
  if (bound < 0) throw Error(Errc::Io, "cannot bind " + bind);
  out << "thermoscan: serving " << store.root().string() << " on " << host << ":" << bound
      << std::endl;
  return server.run() ? kExitOk : kExitError;
}

}  // namespace

int run(int argc, const char* const* argv, std::ostream& out, std::ostream& err) {
  CLI::App app{"Thermographic PV module segmentation and hot-spot analysis", "thermoscan"};
  app.require_subcommand(1);
  unsigned threads = 0;
  app.add_option("--threads", threads, "Worker threads (0 = all cores)");

  std::string spec_path, input, config, out_dir;
  auto* synth = app.add_subcommand("synth", "Generate a synthetic thermogram with ground truth");
  synth->add_option("spec", spec_path, "Synthetic spec JSON")->required();
  synth->add_option("--out", out_dir, "Output directory")->required();

  auto* seg = app.add_subcommand("segment", "Segment modules");
  seg->add_option("input", input, "TGRM file")->required();
  seg->add_option("--config", config, "Pipeline config JSON");
  seg->add_option("--out", out_dir, "Output directory")->required();

  AnalysisConfig acfg;
  double fixed_delta = 0.0;
  auto* ana = app.add_subcommand("analyze", "Segment modules and detect hot spots");
  ana->add_option("input", input, "TGRM file")->required();
  ana->add_option("--config", config, "Pipeline config JSON");
  ana->add_option("--bins", acfg.histogram_bins, "Histogram bins per module");
  ana->add_option("--min-blob-size", acfg.min_blob_size, "Smallest defect blob that flags a module");
  auto* fixed = ana->add_option("--fixed-delta", fixed_delta, "Also compare against mean + this many C");
  ana->add_option("--out", out_dir, "Output directory")->required();

  const char* env_store = std::getenv("THERMOSCAN_STORE");
  std::string bind = "127.0.0.1:8080";
  std::string store_dir = env_store != nullptr ? env_store : "thermoscan-store";
  auto* serve = app.add_subcommand("serve", "Run the HTTP API");
  serve->add_option("--bind", bind, "HOST:PORT")->capture_default_str();
  serve->add_option("--store", store_dir, "Store directory (default $THERMOSCAN_STORE)")
      ->capture_default_str();

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp&) {
    out << app.help();
    return kExitOk;
  } catch (const CLI::ParseError& e) {
    if (e.get_exit_code() == 0) {
      out << app.help();
      return kExitOk;
    }
    err << "thermoscan: " << e.what() << "\n";
    return kExitError;
  }

  try {
    set_thread_count(threads);
    if (*synth) return cmd_synth(spec_path, out_dir);
    if (*seg) return cmd_segment(input, config, out_dir);
    if (*ana) {
      if (*fixed) acfg.fixed_delta_c = fixed_delta;
      validate(acfg);
      return cmd_analyze(input, config, acfg, out_dir);
    }
    return cmd_serve(bind, store_dir, out);
  } catch (const Error& e) {
    err << "thermoscan: " << e.what() << "\n";
    return e.code() == Errc::NoModulesFound ? kExitNoModules : kExitError;
  } catch (const std::exception& e) {
    err << "thermoscan: " << e.what() << "\n";
    return kExitError;
  }
}

}  // namespace thermoscan::cli
