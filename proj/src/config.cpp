#include "rbn/config.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <istream>
#include <sstream>

#include "rbn/format.hpp"
#include "rbn/metrics.hpp"

namespace rbn {

std::string to_string(ExperimentKind kind) {
  switch (kind) {
    case ExperimentKind::EntropyScan:
      return "entropy-scan";
    case ExperimentKind::MaxEntropyScaling:
      return "max-entropy-scaling";
    case ExperimentKind::EvolveSweep:
      return "evolve-sweep";
    case ExperimentKind::MeasureCurves:
      return "measure-curves";
    case ExperimentKind::CumulativeLandscape:
      return "cumulative-landscape";
  }
  return "unknown";
}

ExperimentKind parse_experiment_kind(const std::string& text) {
  for (auto k : {ExperimentKind::EntropyScan, ExperimentKind::MaxEntropyScaling, ExperimentKind::EvolveSweep,
                 ExperimentKind::MeasureCurves, ExperimentKind::CumulativeLandscape}) {
    if (to_string(k) == text) return k;
  }
  throw ConfigError("kind", "unknown experiment kind '" + text + "'");
}

namespace {

std::string trim(const std::string& s) {
  const auto b = s.find_first_not_of(" \t\r");
  if (b == std::string::npos) return "";
  const auto e = s.find_last_not_of(" \t\r");
  return s.substr(b, e - b + 1);
}

double parse_real(const std::string& field, const std::string& text) {
  try {
    std::size_t used = 0;
    const double v = std::stod(text, &used);
    if (used != text.size()) throw std::invalid_argument(text);
    return v;
  } catch (const std::exception&) {
    throw ConfigError(field, "expected a number, got '" + text + "'");
  }
}

std::uint64_t parse_unsigned(const std::string& field, const std::string& text) {
  if (text.empty() || text.find_first_not_of("0123456789") != std::string::npos) {
    throw ConfigError(field, "expected a non-negative integer, got '" + text + "'");
  }
  try {
    return std::stoull(text);
  } catch (const std::exception&) {
    throw ConfigError(field, "integer out of range: '" + text + "'");
  }
}

bool parse_bool(const std::string& field, const std::string& text) {
  if (text == "true" || text == "1" || text == "yes" || text == "on") return true;
  if (text == "false" || text == "0" || text == "no" || text == "off") return false;
  throw ConfigError(field, "expected a boolean, got '" + text + "'");
}

std::string join(const std::vector<double>& values) {
  std::string out;
  for (std::size_t i = 0; i < values.size(); ++i) out += (i ? "," : "") + format_double(values[i]);
  return out;
}

std::string join(const std::vector<std::uint32_t>& values) {
  std::string out;
  for (std::size_t i = 0; i < values.size(); ++i) out += (i ? "," : "") + std::to_string(values[i]);
  return out;
}

std::vector<double> parse_reals_for(const std::string& field, const std::string& text) {
  try {
    return parse_real_list(text);
  } catch (const ParseError& e) {
    throw ConfigError(field, e.what());
  }
}

std::vector<std::uint32_t> parse_counts_for(const std::string& field, const std::string& text) {
  try {
    return parse_count_list(text);
  } catch (const ParseError& e) {
    throw ConfigError(field, e.what());
  }
}

}  // namespace

KeyValues read_key_values(std::istream& in) {
  KeyValues values;
  std::string line;
  int number = 0;
  while (std::getline(in, line)) {
    ++number;
    if (const auto hash = line.find('#'); hash != std::string::npos) line.erase(hash);
    line = trim(line);
    if (line.empty()) continue;
    const auto eq = line.find('=');
    if (eq == std::string::npos) throw ParseError("line " + std::to_string(number) + ": expected 'key = value'");
    values[trim(line.substr(0, eq))] = trim(line.substr(eq + 1));
  }
  return values;
}

std::vector<double> parse_real_list(const std::string& text) {
  std::vector<double> values;
  std::stringstream items(text);
  for (std::string item; std::getline(items, item, ',');) {
    item = trim(item);
    if (item.empty()) continue;
    if (std::count(item.begin(), item.end(), ':') == 2) {
      const auto a = item.find(':');
      const auto b = item.find(':', a + 1);
      double lo = 0.0, hi = 0.0, step = 0.0;
      try {
        lo = std::stod(item.substr(0, a));
        hi = std::stod(item.substr(a + 1, b - a - 1));
        step = std::stod(item.substr(b + 1));
      } catch (const std::logic_error&) {
        throw ParseError("bad range '" + item + "'");
      }
      if (!(step > 0.0) || hi < lo) throw ParseError("range '" + item + "' needs step > 0 and hi >= lo");
      const auto count = static_cast<std::int64_t>(std::floor((hi - lo) / step + 1e-9));
      for (std::int64_t i = 0; i <= count; ++i) {
        values.push_back(std::round((lo + static_cast<double>(i) * step) * 1e6) / 1e6);
      }
    } else {
      try {
        std::size_t used = 0;
        values.push_back(std::stod(item, &used));
        if (used != item.size()) throw ParseError("bad number '" + item + "'");
      } catch (const std::logic_error&) {
        throw ParseError("bad number '" + item + "'");
      }
    }
  }
  return values;
}

std::vector<std::uint32_t> parse_count_list(const std::string& text) {
  std::vector<std::uint32_t> counts;
  for (double v : parse_real_list(text)) {
    if (v < 0.0 || v != std::floor(v) || v > 4294967295.0) throw ParseError("expected whole numbers in '" + text + "'");
    counts.push_back(static_cast<std::uint32_t>(v));
  }
  return counts;
}

ExperimentConfig ExperimentConfig::from_key_values(const KeyValues& values) {
  ExperimentConfig c;
  for (const auto& [key, value] : values) {
    if (key == "kind") {
      c.kind = parse_experiment_kind(value);
    } else if (key == "preset") {
      c.preset = value;
    } else if (key == "N") {
      c.nodes = parse_counts_for(key, value);
    } else if (key == "K") {
      c.connectivity = parse_reals_for(key, value);
    } else if (key == "I") {
      c.inputs = parse_counts_for(key, value);
    } else if (key == "s") {
      c.fractions = value == "auto" ? std::vector<double>{} : parse_reals_for(key, value);
    } else if (key == "s_points") {
      c.s_points = static_cast<std::uint32_t>(parse_unsigned(key, value));
    } else if (key == "samples") {
      c.samples = parse_unsigned(key, value);
    } else if (key == "outputs") {
      c.outputs = static_cast<std::uint32_t>(parse_unsigned(key, value));
    } else if (key == "refine_step") {
      c.refine_step = parse_real(key, value);
    } else if (key == "runs") {
      c.runs = static_cast<std::uint32_t>(parse_unsigned(key, value));
    } else if (key == "task") {
      try {
        c.task = parse_task_kind(value);
      } catch (const ParseError& e) {
        throw ConfigError(key, e.what());
      }
    } else if (key == "mapping_scorer") {
      if (value == "permutation") {
        c.scorer = MappingScorer::Permutation;
      } else if (value == "popcount") {
        c.scorer = MappingScorer::Popcount;
      } else {
        throw ConfigError(key, "expected 'permutation' or 'popcount'");
      }
    } else if (key == "population") {
      c.population = static_cast<std::uint32_t>(parse_unsigned(key, value));
    } else if (key == "generations") {
      c.generations = static_cast<std::uint32_t>(parse_unsigned(key, value));
    } else if (key == "crossover") {
      c.crossover = parse_real(key, value);
    } else if (key == "mutation") {
      c.mutation = parse_real(key, value);
    } else if (key == "elitism") {
      c.elitism = parse_bool(key, value);
    } else if (key == "wiring") {
      try {
        c.wiring = parse_wiring_mode(value);
      } catch (const ParseError& e) {
        throw ConfigError(key, e.what());
      }
    } else if (key == "feedforward") {
      c.feedforward = parse_bool(key, value);
    } else if (key == "initial_state") {
      if (value == "zero") {
        c.initial = InitialState::Zero;
      } else if (value == "random") {
        c.initial = InitialState::Random;
      } else {
        throw ConfigError(key, "expected 'zero' or 'random'");
      }
    } else if (key == "trials") {
      c.trials = static_cast<std::uint32_t>(parse_unsigned(key, value));
    } else if (key == "seed") {
      c.seed = parse_unsigned(key, value);
    } else if (key == "output") {
      c.output = value;
    } else if (key == "workers") {
      c.workers = static_cast<unsigned>(parse_unsigned(key, value));
    } else {
      throw ConfigError(key, "unknown key");
    }
  }
  return c;
}

void ExperimentConfig::validate() const {
  if (!seed) throw ConfigError("seed", "a master seed is required");
  if (nodes.empty()) throw ConfigError("N", "grid is empty");
  if (inputs.empty()) throw ConfigError("I", "grid is empty");
  if (connectivity.empty() && kind != ExperimentKind::MaxEntropyScaling) throw ConfigError("K", "grid is empty");
  for (auto n : nodes) {
    if (n == 0) throw ConfigError("N", "must be at least 1");
  }
  for (double k : connectivity) {
    if (!(k >= 0.0) || !std::isfinite(k)) throw ConfigError("K", "must be finite and >= 0");
  }
  for (auto i : inputs) {
    if (i == 0 || i > 20) throw ConfigError("I", "must lie in [1, 20]");
  }
  if (workers == 0) throw ConfigError("workers", "must be at least 1");

  const bool ensemble = kind == ExperimentKind::EntropyScan || kind == ExperimentKind::MaxEntropyScaling;
  if (ensemble) {
    if (samples == 0) throw ConfigError("samples", "must be at least 1");
    if (outputs == 0) throw ConfigError("outputs", "must be at least 1");
    for (auto n : nodes) {
      if (outputs > n) throw ConfigError("outputs", "exceeds N");
    }
    if (kind == ExperimentKind::MaxEntropyScaling) {
      if (connectivity.empty()) throw ConfigError("K", "grid is empty");
      if (refine_step < 0.0) throw ConfigError("refine_step", "must be >= 0");
      if (nodes.size() < 4) throw ConfigError("N", "power-law fit needs at least 4 sizes");
      if (inputs.size() != 1) throw ConfigError("I", "a scaling fit takes exactly one I");
    }
    return;
  }

  if (runs == 0) throw ConfigError("runs", "must be at least 1");
  if (population < 2) throw ConfigError("population", "must be at least 2");
  if (!(crossover >= 0.0 && crossover <= 1.0)) throw ConfigError("crossover", "must lie in [0, 1]");
  if (!(mutation >= 0.0) || !std::isfinite(mutation)) throw ConfigError("mutation", "must be >= 0");
  if (initial == InitialState::Random && trials == 0) throw ConfigError("trials", "must be at least 1");
  for (double s : fractions) {
    if (!(s > 0.0 && s <= 1.0)) throw ConfigError("s", "fractions must lie in (0, 1]");
  }
  if (fractions.empty() && s_points == 0) throw ConfigError("s_points", "must be at least 1");
  for (auto i : inputs) {
    if (task == TaskKind::BitwiseAnd && i % 2 != 0) throw ConfigError("I", "bitwise AND needs an even I");
    const std::uint32_t task_outputs = task == TaskKind::EvenOdd ? 1 : (task == TaskKind::BitwiseAnd ? i / 2 : i);
    for (auto n : nodes) {
      if (task_outputs > n) throw ConfigError("N", "smaller than the task's output count");
    }
  }
}

KeyValues ExperimentConfig::canonical() const {
  KeyValues kv;
  kv["kind"] = to_string(kind);
  kv["N"] = join(nodes);
  kv["K"] = join(connectivity);
  kv["I"] = join(inputs);
  kv["wiring"] = to_string(wiring);
  kv["seed"] = seed ? std::to_string(*seed) : "";
  if (kind == ExperimentKind::EntropyScan || kind == ExperimentKind::MaxEntropyScaling) {
    kv["samples"] = std::to_string(samples);
    kv["outputs"] = std::to_string(outputs);
    if (kind == ExperimentKind::MaxEntropyScaling) kv["refine_step"] = format_double(refine_step);
    return kv;
  }
  kv["s"] = fractions.empty() ? "auto" : join(fractions);
  kv["s_points"] = std::to_string(s_points);
  kv["runs"] = std::to_string(runs);
  kv["task"] = to_string(task);
  kv["mapping_scorer"] = scorer == MappingScorer::Permutation ? "permutation" : "popcount";
  kv["population"] = std::to_string(population);
  kv["generations"] = std::to_string(generations);
  kv["crossover"] = format_double(crossover);
  kv["mutation"] = format_double(mutation);
  kv["elitism"] = elitism ? "true" : "false";
  kv["feedforward"] = feedforward ? "true" : "false";
  kv["initial_state"] = initial == InitialState::Zero ? "zero" : "random";
  kv["trials"] = std::to_string(trials);
  return kv;
}

std::string ExperimentConfig::canonical_text() const {
  std::string text;
  for (const auto& [k, v] : canonical()) text += k + " = " + v + "\n";
  return text;
}

std::uint64_t ExperimentConfig::hash() const { return fnv1a(canonical_text() + "version=" RBNLAB_VERSION); }

std::vector<std::uint64_t> sample_sizes(const ExperimentConfig& config, std::uint32_t inputs) {
  const std::uint64_t space = std::uint64_t{1} << inputs;
  if (config.fractions.empty()) return default_sample_sizes(space, config.s_points);
  std::vector<std::uint64_t> sizes;
  for (double s : config.fractions) {
    const auto m = std::clamp<std::uint64_t>(static_cast<std::uint64_t>(std::llround(s * static_cast<double>(space))), 1, space);
    sizes.push_back(m);
  }
  std::sort(sizes.begin(), sizes.end());
  sizes.erase(std::unique(sizes.begin(), sizes.end()), sizes.end());
  return sizes;
}

TaskSpec make_task(const ExperimentConfig& config, std::uint32_t inputs) {
  switch (config.task) {
    case TaskKind::EvenOdd:
      return TaskSpec::even_odd(inputs);
    case TaskKind::BitwiseAnd:
      return TaskSpec::bitwise_and(inputs);
    case TaskKind::Mapping: {
      Rng rng(derive_seed(config.seed.value_or(0), 0x9E37000000000000ULL + inputs));
      return TaskSpec::random_mapping(inputs, rng, config.scorer);
    }
  }
  throw ConfigError("task", "unsupported task");
}

std::uint64_t fnv1a(std::string_view data, std::uint64_t state) {
  for (unsigned char c : data) {
    state ^= c;
    state *= 0x100000001b3ULL;
  }
  return state;
}

std::string hex64(std::uint64_t value) {
  char buffer[17];
  std::snprintf(buffer, sizeof buffer, "%016llx", static_cast<unsigned long long>(value));
  return buffer;
}

}  // namespace rbn
