#include "rbn/tasks.hpp"

#include <algorithm>
#include <istream>
#include <numeric>
#include <ostream>
#include <set>

#include "rbn/error.hpp"

namespace rbn {

std::string to_string(TaskKind kind) {
  switch (kind) {
    case TaskKind::EvenOdd:
      return "even-odd";
    case TaskKind::BitwiseAnd:
      return "bitwise-and";
    case TaskKind::Mapping:
      return "mapping";
  }
  return "unknown";
}

TaskKind parse_task_kind(const std::string& text) {
  if (text == "even-odd" || text == "EvenOdd" || text == "parity") return TaskKind::EvenOdd;
  if (text == "bitwise-and" || text == "BitwiseAnd" || text == "and") return TaskKind::BitwiseAnd;
  if (text == "mapping" || text == "Mapping") return TaskKind::Mapping;
  throw ParseError("unknown task '" + text + "'");
}

bool target_even_odd(BitString input) { return (input.popcount() & 1U) != 0; }

BitString target_bitwise_and(BitString a, BitString b) {
  if (a.width != b.width) throw Error("bitwise AND operands differ in width");
  return BitString{a.value & b.value, a.width};
}

BitString target_mapping(BitString input, std::span<const std::uint32_t> perm) {
  if (perm.size() != input.width) throw Error("permutation width does not match input");
  BitString out{0, input.width};
  for (std::uint32_t j = 0; j < input.width; ++j) out.set(j, input[perm[j]]);
  return out;
}

std::uint32_t hamming_distance(BitString x, BitString y) {
  if (x.width != y.width) throw Error("hamming distance of strings with different widths");
  return static_cast<std::uint32_t>(std::popcount(x.value ^ y.value));
}

TaskSpec TaskSpec::even_odd(std::uint32_t inputs) {
  if (inputs == 0 || inputs > 63) throw InvalidSpecError("even-odd task needs 1 <= I <= 63");
  return TaskSpec(TaskKind::EvenOdd, inputs, 1);
}

TaskSpec TaskSpec::bitwise_and(std::uint32_t inputs) {
  if (inputs == 0 || inputs % 2 != 0 || inputs > 62) throw InvalidSpecError("bitwise AND task needs an even I");
  return TaskSpec(TaskKind::BitwiseAnd, inputs, inputs / 2);
}

TaskSpec TaskSpec::mapping(std::vector<std::uint32_t> perm, MappingScorer scorer) {
  const auto width = static_cast<std::uint32_t>(perm.size());
  if (width == 0 || width > 63) throw InvalidSpecError("mapping task needs 1 <= I <= 63");
  std::vector<std::uint32_t> sorted = perm;
  std::sort(sorted.begin(), sorted.end());
  for (std::uint32_t i = 0; i < width; ++i) {
    if (sorted[i] != i) throw InvalidSpecError("mapping target is not a permutation");
  }
  TaskSpec task(TaskKind::Mapping, width, width);
  task.perm_ = std::move(perm);
  task.scorer_ = scorer;
  return task;
}

TaskSpec TaskSpec::random_mapping(std::uint32_t inputs, Rng& rng, MappingScorer scorer) {
  std::vector<std::uint32_t> perm(inputs);
  std::iota(perm.begin(), perm.end(), 0U);
  for (std::uint32_t i = inputs; i > 1; --i) std::swap(perm[i - 1], perm[rng.uniform(i)]);
  return mapping(std::move(perm), scorer);
}

BitString TaskSpec::target(BitString input) const {
  if (input.width != inputs_) throw Error("input width does not match task");
  switch (kind_) {
    case TaskKind::EvenOdd:
      return BitString{target_even_odd(input) ? 1U : 0U, 1};
    case TaskKind::BitwiseAnd: {
      const std::uint32_t half = inputs_ / 2;
      const std::uint64_t mask = (std::uint64_t{1} << half) - 1;
      return target_bitwise_and(BitString{input.value >> half, half}, BitString{input.value & mask, half});
    }
    case TaskKind::Mapping:
      return target_mapping(input, perm_);
  }
  return {};
}

namespace {

std::uint32_t pattern_distance(const TaskSpec& task, BitString input, BitString target, BitString output) {
  if (task.kind() == TaskKind::Mapping && task.scorer() == MappingScorer::Popcount) {
    const auto a = output.popcount();
    const auto b = input.popcount();
    return a > b ? a - b : b - a;
  }
  return hamming_distance(target, output);
}

}  // namespace

double TaskSpec::normalized_error(BitString input, BitString output) const {
  return static_cast<double>(pattern_distance(*this, input, target(input), output)) / outputs_;
}

PatternSet::PatternSet(std::vector<Pattern> patterns) : patterns_(std::move(patterns)) {
  std::set<std::uint64_t> seen;
  for (const auto& p : patterns_) {
    if (!seen.insert(p.input.value).second) throw InvalidSpecError("pattern set contains a duplicate input");
  }
}

std::vector<std::uint64_t> PatternSet::inputs() const {
  std::vector<std::uint64_t> values;
  values.reserve(patterns_.size());
  for (const auto& p : patterns_) values.push_back(p.input.value);
  return values;
}

PatternSet full_input_space(const TaskSpec& task) {
  if (task.inputs() > 24) throw InputSpaceTooLargeError("input space of 2^" + std::to_string(task.inputs()));
  std::vector<Pattern> patterns;
  patterns.reserve(task.input_space());
  for (std::uint64_t j = 0; j < task.input_space(); ++j) patterns.push_back(Pattern{{j, task.inputs()}, task.target(j)});
  return PatternSet(std::move(patterns));
}

PatternSet draw_sample(const TaskSpec& task, std::uint64_t sample_size, Rng& rng) {
  const std::uint64_t space = task.input_space();
  if (sample_size == 0 || sample_size > space) {
    throw InvalidSpecError("sample size " + std::to_string(sample_size) + " outside [1, " + std::to_string(space) + "]");
  }
  std::vector<std::uint64_t> chosen;
  if (space <= (std::uint64_t{1} << 22)) {
    std::vector<std::uint64_t> pool(space);
    std::iota(pool.begin(), pool.end(), std::uint64_t{0});
    for (std::uint64_t i = 0; i < sample_size; ++i) std::swap(pool[i], pool[i + rng.uniform(space - i)]);
    chosen.assign(pool.begin(), pool.begin() + static_cast<std::ptrdiff_t>(sample_size));
  } else {
    std::set<std::uint64_t> picked;
    while (picked.size() < sample_size) picked.insert(rng.uniform(space));
    chosen.assign(picked.begin(), picked.end());
  }
  std::sort(chosen.begin(), chosen.end());
  std::vector<Pattern> patterns;
  patterns.reserve(chosen.size());
  for (auto j : chosen) patterns.push_back(Pattern{{j, task.inputs()}, task.target(j)});
  return PatternSet(std::move(patterns));
}

double score_outputs(const TaskSpec& task, const PatternSet& sample, const OutputMatrix& outputs) {
  if (sample.empty()) throw InvalidSpecError("fitness of an empty sample");
  if (outputs.outputs() != task.outputs() || outputs.lanes() != sample.size()) {
    throw InvalidSpecError("network outputs do not match the task");
  }
  std::uint64_t total = 0;
  const auto patterns = sample.patterns();
  for (std::uint32_t j = 0; j < patterns.size(); ++j) {
    total += pattern_distance(task, patterns[j].input, patterns[j].target, outputs.row(j));
  }
  return 1.0 - static_cast<double>(total) / (static_cast<double>(sample.size()) * task.outputs());
}

namespace {

void check_dimensions(const BooleanNetwork& net, const TaskSpec& task) {
  if (net.input_count() != task.inputs() || net.output_count() != task.outputs()) {
    throw InvalidSpecError("network I/O (" + std::to_string(net.input_count()) + "," +
                           std::to_string(net.output_count()) + ") does not match task (" +
                           std::to_string(task.inputs()) + "," + std::to_string(task.outputs()) + ")");
  }
}

}  // namespace

double fitness(const BooleanNetwork& net, const TaskSpec& task, const PatternSet& sample,
               const EvaluationOptions& options) {
  check_dimensions(net, task);
  if (sample.empty()) throw InvalidSpecError("fitness of an empty sample");
  const auto inputs = sample.inputs();
  return score_outputs(task, sample, Simulator(net).run(inputs, options));
}

double generalization(const BooleanNetwork& net, const TaskSpec& task, const EvaluationOptions& options,
                      std::uint64_t cap) {
  check_dimensions(net, task);
  if (task.input_space() * task.outputs() > cap) {
    throw InputSpaceTooLargeError("generalization over 2^" + std::to_string(task.inputs()) + " inputs exceeds cap");
  }
  return fitness(net, task, full_input_space(task), options);
}

void write_patterns_csv(std::ostream& out, const PatternSet& set) {
  out << "input_bits,target_bits\n";
  for (const auto& p : set.patterns()) out << p.input.str() << ',' << p.target.str() << '\n';
}

PatternSet read_patterns_csv(std::istream& in) {
  std::string line;
  if (!std::getline(in, line) || line.rfind("input_bits,target_bits", 0) != 0) {
    throw ParseError("pattern CSV must start with header input_bits,target_bits");
  }
  std::vector<Pattern> patterns;
  while (std::getline(in, line)) {
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty()) continue;
    const auto comma = line.find(',');
    if (comma == std::string::npos) throw ParseError("malformed pattern row '" + line + "'");
    patterns.push_back(Pattern{BitString::parse(line.substr(0, comma)), BitString::parse(line.substr(comma + 1))});
  }
  return PatternSet(std::move(patterns));
}

}  // namespace rbn
