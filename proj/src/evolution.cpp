#include "rbn/evolution.hpp"

#include <algorithm>
#include <cmath>
#include <tuple>
#include <ostream>

#include "json.hpp"
#include "rbn/error.hpp"
#include "rbn/format.hpp"

namespace rbn {

std::string to_string(Termination t) {
  return t == Termination::PerfectFitness ? "PerfectFitness" : "Gmax";
}

void EvolutionConfig::validate() const {
  if (population < 2) throw InvalidSpecError("population must be at least 2");
  if (!(crossover_rate >= 0.0 && crossover_rate <= 1.0)) throw InvalidSpecError("crossover rate must lie in [0, 1]");
  if (!(mutation_rate >= 0.0) || !std::isfinite(mutation_rate)) throw InvalidSpecError("mutation rate must be >= 0");
  network.validate();
  if (network.inputs != task.inputs() || network.outputs != task.outputs()) {
    throw InvalidSpecError("network I/O does not match the task");
  }
  if (sample_size == 0 || sample_size > task.input_space()) throw InvalidSpecError("sample size outside [1, 2^I]");
}

std::size_t tournament_select(std::span<const double> fitnesses, Rng& rng) {
  const std::size_t n = fitnesses.size();
  if (n < 2) throw InvalidSpecError("tournament needs at least two individuals");
  const std::size_t i = rng.uniform(n);
  std::size_t j = rng.uniform(n - 1);
  if (j >= i) ++j;
  const std::size_t lo = std::min(i, j);
  const std::size_t hi = std::max(i, j);
  return fitnesses[hi] > fitnesses[lo] ? hi : lo;
}

GenerationStats generation_stats(std::span<const double> fitnesses) {
  GenerationStats stats;
  if (fitnesses.empty()) return stats;
  stats.best = fitnesses[0];
  double sum = 0.0;
  for (double f : fitnesses) {
    stats.best = std::max(stats.best, f);
    sum += f;
  }
  stats.mean = sum / static_cast<double>(fitnesses.size());
  double squares = 0.0;
  for (double f : fitnesses) squares += (f - stats.mean) * (f - stats.mean);
  stats.stddev = std::sqrt(squares / static_cast<double>(fitnesses.size()));
  return stats;
}

namespace {

constexpr std::uint64_t kFinalEvaluationKey = 0xF1A1ULL;

EvaluationOptions options_for(const EvolutionConfig& config, std::uint64_t generation, std::uint64_t individual) {
  EvaluationOptions options = config.evaluation;
  if (options.initial == InitialState::Random) {
    options.seed = derive_seed(derive_seed(config.seed, generation), individual);
  }
  return options;
}

}  // namespace

RunRecord evolve(const EvolutionConfig& config) {
  config.validate();
  const NetworkSpec& spec = config.network;
  const TaskSpec& task = config.task;
  Rng rng(config.seed);

  const PatternSet sample = draw_sample(task, config.sample_size, rng);
  const std::vector<std::uint64_t> lanes = sample.inputs();
  const double tolerance = 1.0 / (2.0 * static_cast<double>(sample.size()) * task.outputs());

  std::vector<Genome> population;
  population.reserve(config.population);
  for (std::uint32_t i = 0; i < config.population; ++i) population.push_back(encode(build_random_network(spec, rng)));

  RunRecord record;
  record.sample_size = sample.size();
  record.input_space = task.input_space();
  record.outputs = task.outputs();

  std::vector<double> fitness_values(config.population, 0.0);
  std::size_t best = 0;
  for (std::uint32_t generation = 0;; ++generation) {
    for (std::size_t i = 0; i < population.size(); ++i) {
      const Simulator simulator(decode(population[i], spec));
      fitness_values[i] = score_outputs(task, sample, simulator.run(lanes, options_for(config, generation, i)));
    }
    const auto stats = generation_stats(fitness_values);
    record.generations.push_back(stats);
    best = static_cast<std::size_t>(std::max_element(fitness_values.begin(), fitness_values.end()) -
                                    fitness_values.begin());

    if (stats.best >= 1.0 - tolerance) {
      record.terminated_by = Termination::PerfectFitness;
      record.generations_used = generation;
      break;
    }
    if (generation >= config.max_generations) {
      record.terminated_by = Termination::MaxGenerations;
      record.generations_used = generation;
      break;
    }

    std::vector<Genome> offspring;
    offspring.reserve(config.population);
    if (config.elitism) offspring.push_back(population[best]);
    while (offspring.size() < config.population) {
      Genome first = population[tournament_select(fitness_values, rng)];
      Genome second = population[tournament_select(fitness_values, rng)];
      if (rng.bernoulli(config.crossover_rate)) std::tie(first, second) = crossover(first, second, spec, rng);
      first = mutate(std::move(first), spec, config.mutation_rate, rng);
      second = mutate(std::move(second), spec, config.mutation_rate, rng);
      offspring.push_back(std::move(first));
      if (offspring.size() < config.population) offspring.push_back(std::move(second));
    }
    population = std::move(offspring);
  }

  record.f_final = record.generations.back().best;
  EvaluationOptions final_options = config.evaluation;
  if (final_options.initial == InitialState::Random) final_options.seed = derive_seed(config.seed, kFinalEvaluationKey);
  record.g_final = generalization(decode(population[best], spec), task, final_options);
  return record;
}

std::string run_record_json(const RunRecord& record) {
  nlohmann::ordered_json j;
  j["f_final"] = record.f_final;
  j["g_final"] = record.g_final;
  j["generations_used"] = record.generations_used;
  j["terminated_by"] = to_string(record.terminated_by);
  j["m"] = record.sample_size;
  j["m_prime"] = record.input_space;
  j["outputs"] = record.outputs;
  auto best = nlohmann::ordered_json::array();
  auto mean = nlohmann::ordered_json::array();
  auto stddev = nlohmann::ordered_json::array();
  for (const auto& g : record.generations) {
    best.push_back(g.best);
    mean.push_back(g.mean);
    stddev.push_back(g.stddev);
  }
  j["best_f"] = std::move(best);
  j["mean_f"] = std::move(mean);
  j["std_f"] = std::move(stddev);
  return j.dump();
}

RunRecord run_record_from_json(const std::string& line) {
  try {
    const auto j = nlohmann::json::parse(line);
    RunRecord record;
    record.f_final = j.at("f_final").get<double>();
    record.g_final = j.at("g_final").get<double>();
    record.generations_used = j.at("generations_used").get<std::uint32_t>();
    const auto term = j.at("terminated_by").get<std::string>();
    if (term == "PerfectFitness") {
      record.terminated_by = Termination::PerfectFitness;
    } else if (term == "Gmax") {
      record.terminated_by = Termination::MaxGenerations;
    } else {
      throw ParseError("unknown termination '" + term + "'");
    }
    record.sample_size = j.at("m").get<std::uint64_t>();
    record.input_space = j.at("m_prime").get<std::uint64_t>();
    record.outputs = j.at("outputs").get<std::uint32_t>();
    const auto& best = j.at("best_f");
    const auto& mean = j.at("mean_f");
    const auto& stddev = j.at("std_f");
    if (best.size() != mean.size() || best.size() != stddev.size()) throw ParseError("per-generation arrays differ in length");
    for (std::size_t g = 0; g < best.size(); ++g) {
      record.generations.push_back(
          GenerationStats{best[g].get<double>(), mean[g].get<double>(), stddev[g].get<double>()});
    }
    return record;
  } catch (const nlohmann::json::exception& e) {
    throw ParseError(std::string("run record: ") + e.what());
  }
}

void write_generation_csv(std::ostream& out, const RunRecord& record) {
  out << "gen,best_f,mean_f,std_f\n";
  for (std::size_t g = 0; g < record.generations.size(); ++g) {
    const auto& s = record.generations[g];
    out << g << ',' << format_double(s.best) << ',' << format_double(s.mean) << ',' << format_double(s.stddev) << '\n';
  }
}

}  // namespace rbn
