#pragma once

#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <string>
#include <utility>
#include <vector>

#include "rbn/config.hpp"
#include "rbn/error.hpp"

namespace rbn {

/// The output directory holds a journal from a different configuration.
class ResumeMismatchError : public Error {
 public:
  using Error::Error;
};

struct ManifestFile {
  std::string name;
  std::string checksum;  // FNV-1a 64 of the file contents, hex
  std::uint64_t bytes = 0;
};

struct ResultManifest {
  std::string kind;
  std::string config_hash;
  std::string tool_version;
  KeyValues config;
  std::vector<ManifestFile> files;
  double wall_time_s = 0.0;
  std::uint64_t cells = 0;
  std::uint64_t resumed_cells = 0;  // cells taken from an earlier partial run

  std::string to_json() const;
  static ResultManifest from_json(const std::string& text);
  static ResultManifest load(const std::filesystem::path& directory);
};

std::string file_checksum(const std::filesystem::path& path);

/// Seeds for the ensemble and evolution cells of an experiment.
std::uint64_t ensemble_seed(std::uint64_t master, std::uint32_t nodes, std::uint32_t inputs);
std::uint64_t evolution_cell_seed(std::uint64_t master, std::uint32_t nodes, double connectivity,
                                  std::uint32_t inputs, std::uint64_t sample_size);

/// Runs (or resumes) the experiment into `config.output`. Cells are written
/// in a fixed order and journaled in progress.log, so an interrupted run
/// continues where it stopped and produces byte-identical files. Progress
/// lines go to `log` when given.
ResultManifest run_experiment(const ExperimentConfig& config, std::ostream* log = nullptr);

}  // namespace rbn
