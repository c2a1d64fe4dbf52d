#pragma once

#include <cstdint>
#include <iosfwd>
#include <span>
#include <string>
#include <vector>

#include "rbn/genome.hpp"
#include "rbn/network.hpp"
#include "rbn/simulate.hpp"
#include "rbn/tasks.hpp"

namespace rbn {

struct EvolutionConfig {
  std::uint32_t population = 50;          // S
  std::uint32_t max_generations = 500;    // G_max
  double crossover_rate = 0.6;            // probability per offspring pair
  double mutation_rate = 0.3;             // expected point mutations per genome
  bool elitism = true;                    // carry the best individual over unchanged
  TaskSpec task = TaskSpec::even_odd(3);
  std::uint64_t sample_size = 8;          // m
  NetworkSpec network;
  EvaluationOptions evaluation;
  std::uint64_t seed = 0;

  /// Throws InvalidSpecError naming the offending field.
  void validate() const;
};

struct GenerationStats {
  double best = 0.0;
  double mean = 0.0;
  double stddev = 0.0;  // population standard deviation (divides by S)
  friend bool operator==(const GenerationStats&, const GenerationStats&) = default;
};

enum class Termination { PerfectFitness, MaxGenerations };

std::string to_string(Termination t);

struct RunRecord {
  double f_final = 0.0;
  double g_final = 0.0;
  std::uint32_t generations_used = 0;  // reproduction steps performed
  Termination terminated_by = Termination::MaxGenerations;
  std::uint64_t sample_size = 0;       // m
  std::uint64_t input_space = 0;       // m'
  std::uint32_t outputs = 0;           // O
  std::vector<GenerationStats> generations;

  friend bool operator==(const RunRecord&, const RunRecord&) = default;
};

/// Tournament of two distinct uniformly drawn individuals; the fitter wins,
/// the lower index on exact ties.
std::size_t tournament_select(std::span<const double> fitnesses, Rng& rng);

/// Population statistics of one generation.
GenerationStats generation_stats(std::span<const double> fitnesses);

/// Runs the genetic algorithm:
///   draw the training sample once, create S random networks, then repeat
///   evaluate -> (stop if best f = 1 or G_max reached) -> reproduce.
/// Reproduction keeps the best individual when elitism is on and fills the
/// rest with offspring pairs: two tournament winners, crossed with
/// probability crossover_rate, each mutated, feedforward order enforced.
RunRecord evolve(const EvolutionConfig& config);

/// One JSON object per line: f_final, g_final, generations, terminated_by,
/// m, m_prime, outputs and the per-generation statistics.
std::string run_record_json(const RunRecord& record);
RunRecord run_record_from_json(const std::string& line);

/// CSV with header gen,best_f,mean_f,std_f.
void write_generation_csv(std::ostream& out, const RunRecord& record);

}  // namespace rbn
