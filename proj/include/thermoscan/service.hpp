#pragma once

#include <filesystem>
#include <map>
#include <memory>
#include <mutex>
#include <optional>
#include <shared_mutex>
#include <span>
#include <string>
#include <vector>

#include "thermoscan/analysis.hpp"
#include "thermoscan/pipeline.hpp"
#include "thermoscan/thermogram.hpp"

namespace thermoscan::service {

// Uploaded thermograms and their artifacts, one directory per id:
//   <root>/<id>/thermogram.tgrm   uploaded bytes
//   <root>/<id>/config.json       pipeline config of the last segmentation
//   <root>/<id>/analysis.json     analysis config of the last report
//   <root>/<id>/report.json       last report
// Segmentations are recomputed from thermogram + config on load.
class SessionStore {
 public:
  struct Session {
    Thermogram thermogram;
    std::vector<std::uint8_t> tgrm;
    std::optional<SegmentationResult> segmentation;  // stages kept
    std::optional<AnalysisConfig> analysis_config;
    std::optional<DefectReport> report;
    // Serializes uploaded -> segmented -> analyzed transitions.
    std::mutex mutex;
  };

  explicit SessionStore(std::filesystem::path root);

  // Parses and persists a TGRM upload and returns its id. Re-uploading
  // identical bytes is a no-op; different bytes under an existing id throw
  // IdConflict. Throws the TGRM load errors and BadDocument for ids that are
  // not safe directory names.
  std::string add(std::span<const std::uint8_t> tgrm);

  std::shared_ptr<Session> find(const std::string& id) const;
  std::vector<std::string> ids() const;
  const std::filesystem::path& root() const noexcept { return root_; }

  // Callers hold session.mutex. Re-segmenting with the stored config is a
  // no-op; a different config drops the report.
  const SegmentationResult& segment(Session& s, const PipelineConfig& cfg);
  // Throws NotSegmented.
  const DefectReport& analyze(Session& s, const AnalysisConfig& cfg);

 private:
  std::filesystem::path dir_of(const std::string& id) const { return root_ / id; }
  void load_existing();

  std::filesystem::path root_;
  mutable std::shared_mutex map_mutex_;
  std::map<std::string, std::shared_ptr<Session>> sessions_;
};

// HTTP status for an error kind.
int http_status(Errc code) noexcept;

// JSON API over a SessionStore; see README for the routes.
class Server {
 public:
  explicit Server(SessionStore& store);
  ~Server();
  Server(const Server&) = delete;
  Server& operator=(const Server&) = delete;

  // Binds without serving. port 0 picks a free port. Returns the bound port,
  // or -1 on failure.
  int bind(const std::string& host, int port);
  // Serves on the bound socket until stop(). Returns false on failure.
  bool run();
  void stop();
  void wait_until_ready() const;

 private:
  struct Impl;
  std::unique_ptr<Impl> impl_;
};

}  // namespace thermoscan::service
