#include "thermoscan/service.hpp"

#include <httplib.h>

#include <algorithm>
#include <fstream>
#include <iostream>

#include "thermoscan/png_io.hpp"
#include "thermoscan/render.hpp"

namespace thermoscan::service {
namespace fs = std::filesystem;
using nlohmann::json;

namespace {

bool safe_id(const std::string& id) {
  if (id.empty() || id.size() > 128 || id.front() == '.') return false;
  return std::all_of(id.begin(), id.end(), [](unsigned char c) {
    return std::isalnum(c) || c == '-' || c == '_' || c == '.';
  });
}

void write_atomic(const fs::path& path, std::span<const std::uint8_t> bytes) {
  fs::path tmp = path;
  tmp += ".tmp";
  png::write_file(tmp, bytes);
  fs::rename(tmp, path);
}

void write_atomic(const fs::path& path, const std::string& text) {
  write_atomic(path, std::span(reinterpret_cast<const std::uint8_t*>(text.data()), text.size()));
}

json read_json(const fs::path& path) {
  const auto bytes = png::read_file(path);
  json j = json::parse(bytes.begin(), bytes.end(), nullptr, false);
  if (j.is_discarded()) throw Error(Errc::BadDocument, path.string() + " is not valid JSON");
  return j;
}

json parse_body(const std::string& body) {
  json j = json::parse(body, nullptr, false);
  if (j.is_discarded()) throw Error(Errc::BadDocument, "request body is not valid JSON");
  return j;
}

}  // namespace

int http_status(Errc code) noexcept {
  switch (code) {
    case Errc::InvalidConfig: return 422;
    case Errc::NotSegmented:
    case Errc::IdConflict: return 409;
    case Errc::LabelNotFound: return 404;
    case Errc::Io:
    case Errc::NoMarkers:
    case Errc::EmptyHistogram:
    case Errc::EmptyModule: return 500;
    default: return 400;
  }
}

SessionStore::SessionStore(fs::path root) : root_(std::move(root)) {
  std::error_code ec;
  fs::create_directories(root_, ec);
  if (ec || !fs::is_directory(root_)) {
    throw Error(Errc::Io, "cannot create store directory " + root_.string());
  }
  load_existing();
}

void SessionStore::load_existing() {
  std::vector<fs::path> dirs;
  for (const auto& e : fs::directory_iterator(root_)) {
    if (e.is_directory()) dirs.push_back(e.path());
  }
  std::sort(dirs.begin(), dirs.end());
  for (const auto& dir : dirs) {
    const fs::path file = dir / "thermogram.tgrm";
    if (!fs::exists(file)) continue;
    try {
      auto s = std::make_shared<Session>();
      s->tgrm = png::read_file(file);
      s->thermogram = load_thermogram(s->tgrm);
      if (s->thermogram.id() != dir.filename().string()) {
        std::cerr << "thermoscan: skipping " << dir << ": id mismatch\n";
        continue;
      }
      if (fs::exists(dir / "config.json")) {
        const auto cfg = pipeline_config_from_json(read_json(dir / "config.json"));
        s->segmentation = segment_modules(s->thermogram, cfg, true);
        if (fs::exists(dir / "report.json") && fs::exists(dir / "analysis.json")) {
          s->analysis_config = analysis_config_from_json(read_json(dir / "analysis.json"));
          s->report = defect_report_from_json(read_json(dir / "report.json"));
        }
      }
      sessions_.emplace(s->thermogram.id(), std::move(s));
    } catch (const std::exception& e) {
      std::cerr << "thermoscan: skipping " << dir << ": " << e.what() << "\n";
    }
  }
}

std::string SessionStore::add(std::span<const std::uint8_t> tgrm) {
  auto s = std::make_shared<Session>();
  s->thermogram = load_thermogram(tgrm);
  s->tgrm.assign(tgrm.begin(), tgrm.end());
  const std::string id = s->thermogram.id();
  if (!safe_id(id)) throw Error(Errc::BadDocument, "thermogram id '" + id + "' is not a safe name");

  std::unique_lock lock(map_mutex_);
  if (auto it = sessions_.find(id); it != sessions_.end()) {
    if (it->second->tgrm == s->tgrm) return id;
    throw Error(Errc::IdConflict, "a different thermogram is already stored as " + id);
  }
  fs::create_directories(dir_of(id));
  write_atomic(dir_of(id) / "thermogram.tgrm", s->tgrm);
  sessions_.emplace(id, std::move(s));
  return id;
}

std::shared_ptr<SessionStore::Session> SessionStore::find(const std::string& id) const {
  std::shared_lock lock(map_mutex_);
  const auto it = sessions_.find(id);
  return it == sessions_.end() ? nullptr : it->second;
}

std::vector<std::string> SessionStore::ids() const {
  std::shared_lock lock(map_mutex_);
  std::vector<std::string> out;
  for (const auto& [id, _] : sessions_) out.push_back(id);
  return out;
}

const SegmentationResult& SessionStore::segment(Session& s, const PipelineConfig& cfg) {
  validate(cfg);
  if (s.segmentation && s.segmentation->config == cfg) return *s.segmentation;
  SegmentationResult seg = segment_modules(s.thermogram, cfg, true);
  const fs::path dir = dir_of(s.thermogram.id());
  std::error_code ec;
  fs::remove(dir / "report.json", ec);
  fs::remove(dir / "analysis.json", ec);
  s.report.reset();
  s.analysis_config.reset();
  write_atomic(dir / "config.json", dump_document(to_json(cfg)));
  s.segmentation = std::move(seg);
  return *s.segmentation;
}

const DefectReport& SessionStore::analyze(Session& s, const AnalysisConfig& cfg) {
  validate(cfg);
  if (!s.segmentation) {
    throw Error(Errc::NotSegmented, "segment thermogram " + s.thermogram.id() + " first");
  }
  if (s.report && s.analysis_config == cfg) return *s.report;
  DefectReport rep = thermoscan::analyze(s.thermogram, *s.segmentation, cfg);
  const fs::path dir = dir_of(s.thermogram.id());
  write_atomic(dir / "analysis.json", dump_document(to_json(cfg)));
  write_atomic(dir / "report.json", dump_document(to_json(rep)));
  s.analysis_config = cfg;
  s.report = std::move(rep);
  return *s.report;
}

struct Server::Impl {
  SessionStore& store;
  httplib::Server http;

  explicit Impl(SessionStore& st) : store(st) { routes(); }

  static void send_json(httplib::Response& res, const json& j, int status = 200) {
    res.status = status;
    res.set_content(dump_document(j), "application/json");
  }

  static void send_error(httplib::Response& res, int status, std::string_view kind,
                         const std::string& detail) {
    send_json(res, {{"error", kind}, {"detail", detail}}, status);
  }

  static void send_png(httplib::Response& res, const png::Bytes& bytes) {
    res.status = 200;
    res.set_content(std::string(bytes.begin(), bytes.end()), "image/png");
  }

  // Runs fn(session) under the session lock; 404 for unknown ids.
  template <class Fn>
  void with_session(const httplib::Request& req, httplib::Response& res, Fn&& fn) {
    const std::string id = req.matches[1];
    const auto s = store.find(id);
    if (!s) {
      send_error(res, 404, "NotFound", "unknown thermogram " + id);
      return;
    }
    std::lock_guard lock(s->mutex);
    fn(*s);
  }

  static int int_param(const httplib::Request& req, const char* name) {
    if (!req.has_param(name)) {
      throw Error(Errc::InvalidParameter, std::string("missing query parameter ") + name);
    }
    const std::string v = req.get_param_value(name);
    try {
      std::size_t used = 0;
      const long x = std::stol(v, &used);
      if (used != v.size() || x < INT32_MIN || x > INT32_MAX) throw std::invalid_argument(v);
      return static_cast<int>(x);
    } catch (const std::exception&) {
      throw Error(Errc::InvalidParameter, std::string(name) + " must be an integer");
    }
  }

  static json segment_summary(const SegmentationResult& seg, const std::string& id) {
    json modules = json::array();
    for (const auto& m : seg.modules) {
      modules.push_back({{"label", m.label},
                         {"pixel_count", m.pixel_count},
                         {"bbox", {m.bbox.row0, m.bbox.col0, m.bbox.row1, m.bbox.col1}},
                         {"touches_border", m.touches_border}});
    }
    json stages = json::object();
    for (const auto& name : render::stage_names()) {
      stages[name] = "/thermograms/" + id + "/stages/" + name + ".png";
    }
    return {{"thermogram_id", id},
            {"status", seg.modules.empty() ? "NoModulesFound" : "ok"},
            {"module_count", seg.modules.size()},
            {"otsu_threshold", seg.otsu_threshold},
            {"config", to_json(seg.config)},
            {"modules", modules},
            {"stages", stages}};
  }

  void routes() {
    http.set_default_headers({{"Access-Control-Allow-Origin", "*"}});
    http.set_payload_max_length(512u << 20);
    http.set_exception_handler([](const httplib::Request&, httplib::Response& res,
                                  std::exception_ptr ep) {
      try {
        std::rethrow_exception(ep);
      } catch (const Error& e) {
        send_error(res, http_status(e.code()), e.kind(), e.what());
      } catch (const std::exception& e) {
        send_error(res, 500, "Internal", e.what());
      }
    });
    http.Options(R"(/.*)", [](const httplib::Request&, httplib::Response& res) {
      res.status = 204;
      res.set_header("Access-Control-Allow-Methods", "GET, POST, OPTIONS");
      res.set_header("Access-Control-Allow-Headers", "Content-Type");
    });

    http.Get("/thermograms", [this](const httplib::Request&, httplib::Response& res) {
      send_json(res, {{"ids", store.ids()}});
    });

    http.Post("/thermograms", [this](const httplib::Request& req, httplib::Response& res) {
      const auto* p = reinterpret_cast<const std::uint8_t*>(req.body.data());
      const std::string id = store.add(std::span(p, req.body.size()));
      send_json(res, {{"id", id}}, 201);
    });

    http.Get(R"(/thermograms/([^/]+)/visual\.png)",
             [this](const httplib::Request& req, httplib::Response& res) {
               with_session(req, res, [&](SessionStore::Session& s) {
                 send_png(res, render::overlay_png(s.thermogram, nullptr, nullptr));
               });
             });

    http.Get(R"(/thermograms/([^/]+)/temperature)",
             [this](const httplib::Request& req, httplib::Response& res) {
               with_session(req, res, [&](SessionStore::Session& s) {
                 const int row = int_param(req, "row");
                 const int col = int_param(req, "col");
                 const float t = query_temperature(s.thermogram, row, col);
                 send_json(res, {{"row", row}, {"col", col}, {"celsius", static_cast<double>(t)}});
               });
             });

    http.Post(R"(/thermograms/([^/]+)/segment)",
              [this](const httplib::Request& req, httplib::Response& res) {
                with_session(req, res, [&](SessionStore::Session& s) {
                  PipelineConfig cfg;
                  if (!req.body.empty()) cfg = pipeline_config_from_json(parse_body(req.body));
                  const auto& seg = store.segment(s, cfg);
                  send_json(res, segment_summary(seg, s.thermogram.id()));
                });
              });

    http.Get(R"(/thermograms/([^/]+)/stages/([^/]+)\.png)",
             [this](const httplib::Request& req, httplib::Response& res) {
               with_session(req, res, [&](SessionStore::Session& s) {
                 if (!s.segmentation) throw Error(Errc::NotSegmented, "no segmentation yet");
                 const auto bytes = render::stage_png(*s.segmentation->stages, req.matches[2].str());
                 if (!bytes) {
                   send_error(res, 404, "NotFound", "unknown stage " + req.matches[2].str());
                   return;
                 }
                 send_png(res, *bytes);
               });
             });

    http.Get(R"(/thermograms/([^/]+)/modules)",
             [this](const httplib::Request& req, httplib::Response& res) {
               with_session(req, res, [&](SessionStore::Session& s) {
                 if (!s.segmentation) throw Error(Errc::NotSegmented, "no segmentation yet");
                 send_json(res, regions_to_json(*s.segmentation, s.thermogram.id()));
               });
             });

    http.Get(R"(/thermograms/([^/]+)/overlay\.png)",
             [this](const httplib::Request& req, httplib::Response& res) {
               with_session(req, res, [&](SessionStore::Session& s) {
                 const SegmentationResult* seg = s.segmentation ? &*s.segmentation : nullptr;
                 const DefectReport* rep = s.report ? &*s.report : nullptr;
                 send_png(res, render::overlay_png(s.thermogram, seg, rep));
               });
             });

    http.Post(R"(/thermograms/([^/]+)/analyze)",
              [this](const httplib::Request& req, httplib::Response& res) {
                with_session(req, res, [&](SessionStore::Session& s) {
                  AnalysisConfig cfg;
                  if (!req.body.empty()) cfg = analysis_config_from_json(parse_body(req.body));
                  if (req.has_param("bins")) {
                    try {
                      cfg.histogram_bins = int_param(req, "bins");
                    } catch (const Error& e) {
                      throw Error(Errc::InvalidConfig, e.what());
                    }
                  }
                  send_json(res, to_json(store.analyze(s, cfg)));
                });
              });

    http.Get(R"(/thermograms/([^/]+)/modules/(-?\d+)/histogram)",
             [this](const httplib::Request& req, httplib::Response& res) {
               with_session(req, res, [&](SessionStore::Session& s) {
                 if (!s.segmentation) throw Error(Errc::NotSegmented, "no segmentation yet");
                 const int label = std::stoi(req.matches[2].str());
                 ThermalStats st;
                 if (s.report) {
                   const auto it = std::find_if(s.report->modules.begin(), s.report->modules.end(),
                                                [&](const ModuleReport& m) { return m.label == label; });
                   if (it == s.report->modules.end()) {
                     throw Error(Errc::LabelNotFound, "module " + std::to_string(label));
                   }
                   st = it->stats;
                 } else {
                   const auto mods = extract_module_temperatures(s.thermogram, *s.segmentation);
                   const auto it = std::find_if(mods.begin(), mods.end(), [&](const ModuleTemperatures& m) {
                     return m.label == label;
                   });
                   if (it == mods.end()) {
                     throw Error(Errc::LabelNotFound, "module " + std::to_string(label));
                   }
                   st = module_stats(*it, AnalysisConfig{}.histogram_bins);
                 }
                 json edges = json::array();
                 for (double e : st.histogram.edges) edges.push_back(round6(e));
                 send_json(res, {{"label", label},
                                 {"n", st.n},
                                 {"edges", edges},
                                 {"counts", st.histogram.counts},
                                 {"mean_c", round6(st.mean_c)},
                                 {"std_c", round6(st.std_c)},
                                 {"threshold_c", round6(st.threshold_c)}});
               });
             });
  }
};

Server::Server(SessionStore& store) : impl_(std::make_unique<Impl>(store)) {}
Server::~Server() = default;

int Server::bind(const std::string& host, int port) {
  if (port == 0) return impl_->http.bind_to_any_port(host);
  return impl_->http.bind_to_port(host, port) ? port : -1;
}

bool Server::run() { return impl_->http.listen_after_bind(); }
void Server::stop() { impl_->http.stop(); }
void Server::wait_until_ready() const { impl_->http.wait_until_ready(); }

}  // namespace thermoscan::service
