#pragma once

#include <cstdint>
#include <iosfwd>
#include <map>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "rbn/error.hpp"
#include "rbn/network.hpp"
#include "rbn/simulate.hpp"
#include "rbn/tasks.hpp"

namespace rbn {

enum class ExperimentKind { EntropyScan, MaxEntropyScaling, EvolveSweep, MeasureCurves, CumulativeLandscape };

std::string to_string(ExperimentKind kind);
ExperimentKind parse_experiment_kind(const std::string& text);

/// Invalid configuration; `field()` names the offending key.
class ConfigError : public Error {
 public:
  ConfigError(std::string field, const std::string& message)
      : Error("config field '" + field + "': " + message), field_(std::move(field)) {}
  const std::string& field() const noexcept { return field_; }

 private:
  std::string field_;
};

using KeyValues = std::map<std::string, std::string>;

/// Reads `key = value` lines; '#' starts a comment.
KeyValues read_key_values(std::istream& in);

/// Parses "a,b,c" lists and "lo:hi:step" ranges (inclusive).
std::vector<double> parse_real_list(const std::string& text);
std::vector<std::uint32_t> parse_count_list(const std::string& text);

/// Declarative description of one batch experiment.
struct ExperimentConfig {
  ExperimentKind kind = ExperimentKind::EntropyScan;
  std::string preset;                        // informational: "paper", "desk" or empty

  std::vector<std::uint32_t> nodes;          // N grid
  std::vector<double> connectivity;          // K grid
  std::vector<std::uint32_t> inputs;         // I grid
  std::vector<double> fractions;             // s grid; empty selects the default grid
  std::uint32_t s_points = 32;               // thinning limit of the default grid

  // Ensemble studies.
  std::uint64_t samples = 10000;
  std::uint32_t outputs = 1;
  double refine_step = 0.1;

  // Evolution studies.
  std::uint32_t runs = 10;                   // r
  TaskKind task = TaskKind::EvenOdd;
  MappingScorer scorer = MappingScorer::Permutation;
  std::uint32_t population = 50;
  std::uint32_t generations = 500;
  double crossover = 0.6;
  double mutation = 0.3;
  bool elitism = true;

  WiringMode wiring = WiringMode::ExactL;
  bool feedforward = false;
  InitialState initial = InitialState::Zero;
  std::uint32_t trials = 1;

  std::optional<std::uint64_t> seed;         // mandatory; never taken from the clock
  std::string output;                        // output directory
  unsigned workers = 1;

  /// Builds a config from key/value pairs.
  /// Throws ConfigError for unknown keys or malformed values.
  static ExperimentConfig from_key_values(const KeyValues& values);

  /// Throws ConfigError naming the first invalid field.
  void validate() const;

  /// Canonical key/value text of every field that affects results (excludes
  /// output and workers).
  KeyValues canonical() const;
  std::string canonical_text() const;
  std::uint64_t hash() const;
};

/// Sample sizes m for an input space of 2^I under the config's s grid.
std::vector<std::uint64_t> sample_sizes(const ExperimentConfig& config, std::uint32_t inputs);

/// Task for an I-bit experiment; mapping permutations are seeded from the
/// master seed and I.
TaskSpec make_task(const ExperimentConfig& config, std::uint32_t inputs);

/// FNV-1a 64-bit hash.
std::uint64_t fnv1a(std::string_view data, std::uint64_t state = 0xcbf29ce484222325ULL);
std::string hex64(std::uint64_t value);

}  // namespace rbn
