#include "rbn/harness.hpp"

#include <chrono>
#include <fstream>
#include <functional>
#include <sstream>

#include "json.hpp"
#include "rbn/entropy.hpp"
#include "rbn/evolution.hpp"
#include "rbn/format.hpp"
#include "rbn/metrics.hpp"
#include "rbn/parallel.hpp"
#include "rbn/power_law.hpp"

namespace rbn {

namespace fs = std::filesystem;
using ordered_json = nlohmann::ordered_json;

std::string file_checksum(const fs::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error("cannot read " + path.string());
  std::uint64_t state = 0xcbf29ce484222325ULL;
  char buffer[1 << 16];
  while (in) {
    in.read(buffer, sizeof buffer);
    state = fnv1a(std::string_view(buffer, static_cast<std::size_t>(in.gcount())), state);
  }
  return hex64(state);
}

std::string ResultManifest::to_json() const {
  ordered_json j;
  j["kind"] = kind;
  j["config_hash"] = config_hash;
  j["tool_version"] = tool_version;
  j["config"] = ordered_json::object();
  for (const auto& [k, v] : config) j["config"][k] = v;
  j["files"] = ordered_json::array();
  for (const auto& f : files) j["files"].push_back({{"name", f.name}, {"checksum", f.checksum}, {"bytes", f.bytes}});
  j["cells"] = cells;
  j["resumed_cells"] = resumed_cells;
  j["wall_time_s"] = wall_time_s;
  return j.dump(2) + "\n";
}

ResultManifest ResultManifest::from_json(const std::string& text) {
  try {
    const auto j = nlohmann::json::parse(text);
    ResultManifest m;
    m.kind = j.at("kind").get<std::string>();
    m.config_hash = j.at("config_hash").get<std::string>();
    m.tool_version = j.at("tool_version").get<std::string>();
    for (const auto& [k, v] : j.at("config").items()) m.config[k] = v.get<std::string>();
    for (const auto& f : j.at("files")) {
      m.files.push_back(ManifestFile{f.at("name").get<std::string>(), f.at("checksum").get<std::string>(),
                                     f.at("bytes").get<std::uint64_t>()});
    }
    m.cells = j.at("cells").get<std::uint64_t>();
    m.resumed_cells = j.at("resumed_cells").get<std::uint64_t>();
    m.wall_time_s = j.at("wall_time_s").get<double>();
    return m;
  } catch (const nlohmann::json::exception& e) {
    throw ParseError(std::string("manifest: ") + e.what());
  }
}

ResultManifest ResultManifest::load(const fs::path& directory) {
  std::ifstream in(directory / "manifest.json");
  if (!in) throw Error("no manifest.json in " + directory.string());
  std::stringstream text;
  text << in.rdbuf();
  return from_json(text.str());
}

std::uint64_t ensemble_seed(std::uint64_t master, std::uint32_t nodes, std::uint32_t inputs) {
  return derive_seed(derive_seed(master, 0xE0000000ULL + nodes), inputs);
}

std::uint64_t evolution_cell_seed(std::uint64_t master, std::uint32_t nodes, double connectivity,
                                  std::uint32_t inputs, std::uint64_t sample_size) {
  std::uint64_t seed = derive_seed(master, 0xD0000000ULL + nodes);
  seed = derive_seed(seed, static_cast<std::uint64_t>(std::llround(connectivity * 1000.0)));
  seed = derive_seed(seed, inputs);
  return derive_seed(seed, sample_size);
}

namespace {

struct OutputSpec {
  std::string name;
  std::string header;
};

// One unit of journaled work: returns the text appended to each output file.
struct Cell {
  std::string label;
  std::function<std::vector<std::string>()> compute;
};

// Append-only output files plus the progress journal that makes them resumable.
class CellWriter {
 public:
  CellWriter(fs::path directory, std::vector<OutputSpec> outputs, const std::string& hash)
      : directory_(std::move(directory)), outputs_(std::move(outputs)) {
    const fs::path journal = directory_ / "progress.log";
    if (fs::exists(journal)) resume(journal, hash);
    if (completed_ == 0) {
      for (const auto& o : outputs_) std::ofstream(directory_ / o.name, std::ios::trunc) << o.header;
      std::ofstream(journal, std::ios::trunc) << "config " << hash << '\n';
    }
  }

  std::uint64_t completed() const noexcept { return completed_; }

  void append(std::uint64_t index, const std::vector<std::string>& chunks) {
    std::ostringstream line;
    line << "cell " << index;
    for (std::size_t i = 0; i < outputs_.size(); ++i) {
      const fs::path path = directory_ / outputs_[i].name;
      {
        std::ofstream out(path, std::ios::app | std::ios::binary);
        out << chunks[i];
        out.flush();
        if (!out) throw Error("cannot write " + path.string());
      }
      line << ' ' << fs::file_size(path);
    }
    std::ofstream(directory_ / "progress.log", std::ios::app) << line.str() << '\n';
    completed_ = index + 1;
  }

 private:
  void resume(const fs::path& journal, const std::string& hash) {
    std::ifstream in(journal);
    std::string word, recorded;
    in >> word >> recorded;
    if (word != "config") throw ResumeMismatchError("progress.log in " + directory_.string() + " is malformed");
    if (recorded != hash) {
      throw ResumeMismatchError("output directory " + directory_.string() + " holds results of config " + recorded +
                                ", not " + hash);
    }
    std::vector<std::uintmax_t> sizes;
    std::string line;
    std::getline(in, line);
    // A line only counts once its newline made it to disk.
    while (std::getline(in, line) && !in.eof()) {
      std::istringstream fields(line);
      std::uint64_t index = 0;
      std::vector<std::uintmax_t> row(outputs_.size());
      if (!(fields >> word >> index) || word != "cell") break;
      bool complete = true;
      for (auto& size : row) complete = complete && static_cast<bool>(fields >> size);
      if (!complete || index != completed_) break;
      sizes = std::move(row);
      completed_ = index + 1;
    }
    if (completed_ == 0) return;
    for (std::size_t i = 0; i < outputs_.size(); ++i) {
      const fs::path path = directory_ / outputs_[i].name;
      if (!fs::exists(path) || fs::file_size(path) < sizes[i]) {
        completed_ = 0;  // journal points past the data: start over
        return;
      }
      fs::resize_file(path, sizes[i]);
    }
    // Rewrite the journal without any torn trailing line.
    std::ifstream again(journal);
    std::vector<std::string> kept;
    for (std::string l; std::getline(again, l) && kept.size() < completed_ + 1;) kept.push_back(l);
    std::ofstream out(journal, std::ios::trunc);
    for (const auto& l : kept) out << l << '\n';
  }

  fs::path directory_;
  std::vector<OutputSpec> outputs_;
  std::uint64_t completed_ = 0;
};

std::string num(double v) { return format_double(v); }

// ---- ensemble kinds -------------------------------------------------------

NetworkSpec ensemble_spec(const ExperimentConfig& c, std::uint32_t n, double k, std::uint32_t inputs) {
  NetworkSpec spec;
  spec.nodes = n;
  spec.connectivity = k;
  spec.inputs = inputs;
  spec.outputs = c.outputs;
  spec.wiring = c.wiring;
  spec.feedforward = c.feedforward;
  return spec;
}

std::vector<Cell> entropy_scan_cells(const ExperimentConfig& c) {
  std::vector<Cell> cells;
  for (auto n : c.nodes) {
    for (auto i : c.inputs) {
      for (double k : c.connectivity) {
        cells.push_back(Cell{"N=" + std::to_string(n) + " I=" + std::to_string(i) + " K=" + num(k), [&c, n, i, k] {
          const auto spec = ensemble_spec(c, n, k, i);
          const auto seed = connectivity_seed(ensemble_seed(*c.seed, n, i), k);
          const double h = entropy(sample_ensemble(spec, c.samples, seed, c.workers));
          return std::vector<std::string>{std::to_string(n) + ',' + num(k) + ',' + std::to_string(i) + ',' +
                                          std::to_string(c.samples) + ',' + num(h) + '\n'};
        }});
      }
    }
  }
  return cells;
}

std::vector<Cell> scaling_cells(const ExperimentConfig& c) {
  std::vector<Cell> cells;
  const auto i = c.inputs.front();
  for (auto n : c.nodes) {
    cells.push_back(Cell{"N=" + std::to_string(n) + " I=" + std::to_string(i), [&c, n, i] {
      const auto spec = ensemble_spec(c, n, 0.0, i);
      const auto peak = max_entropy_connectivity(spec, c.connectivity, c.samples, ensemble_seed(*c.seed, n, i),
                                                 c.refine_step, c.workers);
      std::string scan;
      for (const auto& p : peak.scanned) {
        scan += std::to_string(n) + ',' + num(p.connectivity) + ',' + std::to_string(i) + ',' +
                std::to_string(c.samples) + ',' + num(p.entropy) + '\n';
      }
      return std::vector<std::string>{std::to_string(n) + ',' + std::to_string(i) + ',' + std::to_string(c.samples) +
                                           ',' + num(peak.connectivity) + ',' + num(peak.entropy) + '\n',
                                       scan};
    }});
  }
  return cells;
}

void write_scaling_fit(const fs::path& dir) {
  std::ifstream in(dir / "scaling.csv");
  std::string line;
  std::getline(in, line);
  std::vector<double> n, k;
  while (std::getline(in, line)) {
    std::istringstream fields(line);
    std::string cell;
    std::vector<std::string> cols;
    while (std::getline(fields, cell, ',')) cols.push_back(cell);
    if (cols.size() < 4) continue;
    n.push_back(std::stod(cols[0]));
    k.push_back(std::stod(cols[3]));
  }
  std::ofstream(dir / "fit.json", std::ios::trunc) << to_json(fit_power_law(n, k)) << '\n';
}

// ---- evolution kinds ------------------------------------------------------

EvolutionConfig evolution_config(const ExperimentConfig& c, const TaskSpec& task, std::uint32_t n, double k,
                                 std::uint64_t m, std::uint64_t seed) {
  EvolutionConfig e;
  e.population = c.population;
  e.max_generations = c.generations;
  e.crossover_rate = c.crossover;
  e.mutation_rate = c.mutation;
  e.elitism = c.elitism;
  e.task = task;
  e.sample_size = m;
  e.network.nodes = n;
  e.network.connectivity = k;
  e.network.inputs = task.inputs();
  e.network.outputs = task.outputs();
  e.network.wiring = c.wiring;
  e.network.feedforward = c.feedforward;
  e.evaluation.initial = c.initial;
  e.evaluation.trials = c.trials;
  e.seed = seed;
  return e;
}

std::string run_line(std::uint32_t n, double k, std::uint32_t i, double s, std::uint32_t run, const RunRecord& r) {
  ordered_json j;
  j["N"] = n;
  j["K"] = k;
  j["I"] = i;
  j["s"] = s;
  j["run"] = run;
  const auto record = ordered_json::parse(run_record_json(r));
  for (const auto& [key, value] : record.items()) j[key] = value;
  return j.dump() + '\n';
}

std::string coords(std::uint32_t n, double k, std::uint32_t i) {
  return std::to_string(n) + ',' + num(k) + ',' + std::to_string(i) + ',';
}

// Runs every (m, run) unit of one (N, K, I) group; results indexed [m][run].
std::vector<std::vector<RunRecord>> run_group(const ExperimentConfig& c, std::uint32_t n, double k, std::uint32_t i,
                                              const std::vector<std::uint64_t>& sizes) {
  const TaskSpec task = make_task(c, i);
  std::vector<std::vector<RunRecord>> records(sizes.size(), std::vector<RunRecord>(c.runs));
  parallel_for(sizes.size() * c.runs, c.workers, [&](std::size_t unit) {
    const std::size_t mi = unit / c.runs;
    const auto run = static_cast<std::uint32_t>(unit % c.runs);
    const auto seed = derive_seed(evolution_cell_seed(*c.seed, n, k, i, sizes[mi]), run);
    records[mi][run] = evolve(evolution_config(c, task, n, k, sizes[mi], seed));
  });
  return records;
}

std::vector<Cell> evolve_sweep_cells(const ExperimentConfig& c) {
  std::vector<Cell> cells;
  for (auto n : c.nodes) {
    for (double k : c.connectivity) {
      for (auto i : c.inputs) {
        for (auto m : sample_sizes(c, i)) {
          const std::string label = "N=" + std::to_string(n) + " K=" + num(k) + " I=" + std::to_string(i) +
                                    " m=" + std::to_string(m);
          cells.push_back(Cell{label, [&c, n, k, i, m] {
            const double s = static_cast<double>(m) / static_cast<double>(std::uint64_t{1} << i);
            const auto records = run_group(c, n, k, i, {m}).front();
            std::string runs, gens;
            for (std::uint32_t r = 0; r < records.size(); ++r) {
              runs += run_line(n, k, i, s, r, records[r]);
              for (std::size_t g = 0; g < records[r].generations.size(); ++g) {
                const auto& st = records[r].generations[g];
                gens += coords(n, k, i) + num(s) + ',' + std::to_string(r) + ',' + std::to_string(g) + ',' +
                        num(st.best) + ',' + num(st.mean) + ',' + num(st.stddev) + '\n';
              }
            }
            return std::vector<std::string>{runs, gens};
          }});
        }
      }
    }
  }
  return cells;
}

constexpr Measure kMeasures[] = {Measure::LearningProbability, Measure::TrainingLikelihood,
                                 Measure::GeneralizationLikelihood, Measure::TrainingScore,
                                 Measure::GeneralizationScore};

std::vector<Cell> measure_cells(const ExperimentConfig& c) {
  std::vector<Cell> cells;
  for (auto n : c.nodes) {
    for (double k : c.connectivity) {
      for (auto i : c.inputs) {
        const std::string label = "N=" + std::to_string(n) + " K=" + num(k) + " I=" + std::to_string(i);
        cells.push_back(Cell{label, [&c, n, k, i] {
          const auto sizes = sample_sizes(c, i);
          const double space = static_cast<double>(std::uint64_t{1} << i);
          const auto records = run_group(c, n, k, i, sizes);

          std::string runs, curves, areas, spread;
          std::vector<MeasurePoint> points;
          std::vector<double> std_sum;
          std::vector<std::uint32_t> std_count;
          for (std::size_t mi = 0; mi < sizes.size(); ++mi) {
            const double s = static_cast<double>(sizes[mi]) / space;
            for (std::uint32_t r = 0; r < records[mi].size(); ++r) {
              const auto& rec = records[mi][r];
              runs += run_line(n, k, i, s, r, rec);
              for (std::size_t g = 0; g < rec.generations.size(); ++g) {
                if (std_sum.size() <= g) {
                  std_sum.resize(g + 1, 0.0);
                  std_count.resize(g + 1, 0);
                }
                std_sum[g] += rec.generations[g].stddev;
                ++std_count[g];
              }
            }
            points.push_back(aggregate(records[mi], s));
            curves += coords(n, k, i) + curve_row(points.back()) + '\n';
          }
          const MeasureCurve curve(points);
          for (auto measure : kMeasures) {
            areas += coords(n, k, i) + to_string(measure) + ',';
            try {
              const auto result = cumulative(curve, measure);
              areas += num(result.area) + ',' + std::to_string(result.dropped) + '\n';
            } catch (const InvalidSpecError&) {
              // Fewer than two defined points: the area is undefined.
              std::uint32_t dropped = 0;
              for (std::size_t p = 0; p < points.size(); ++p) dropped += curve.value(p, measure) ? 0 : 1;
              areas += "," + std::to_string(dropped) + '\n';
            }
          }
          for (std::size_t g = 0; g < std_sum.size(); ++g) {
            spread += coords(n, k, i) + std::to_string(g) + ',' + num(std_sum[g] / std_count[g]) + ',' +
                      std::to_string(std_count[g]) + '\n';
          }
          return std::vector<std::string>{runs, curves, areas, spread};
        }});
      }
    }
  }
  return cells;
}

}  // namespace

ResultManifest run_experiment(const ExperimentConfig& config, std::ostream* log) {
  config.validate();
  if (config.output.empty()) throw ConfigError("output", "no output directory given");
  const auto start = std::chrono::steady_clock::now();
  const fs::path dir(config.output);
  fs::create_directories(dir);
  const std::string hash = hex64(config.hash());

  std::vector<OutputSpec> outputs;
  std::vector<Cell> cells;
  switch (config.kind) {
    case ExperimentKind::EntropyScan:
      outputs = {{"landscape.csv", "N,K,I,samples,entropy_bits\n"}};
      cells = entropy_scan_cells(config);
      break;
    case ExperimentKind::MaxEntropyScaling:
      outputs = {{"scaling.csv", "N,I,samples,K_star,entropy_bits\n"},
                 {"landscape.csv", "N,K,I,samples,entropy_bits\n"}};
      cells = scaling_cells(config);
      break;
    case ExperimentKind::EvolveSweep:
      outputs = {{"runs.jsonl", ""}, {"generations.csv", "N,K,I,s,run,gen,best_f,mean_f,std_f\n"}};
      cells = evolve_sweep_cells(config);
      break;
    case ExperimentKind::MeasureCurves:
    case ExperimentKind::CumulativeLandscape:
      outputs = {{"runs.jsonl", ""},
                 {"curves.csv", "N,K,I,s,r,alpha,alpha_prime,delta,beta,beta_prime\n"},
                 {"cumulative.csv", "N,K,I,measure,area,dropped\n"},
                 {"fitness_std.csv", "N,K,I,gen,mean_std_f,runs\n"}};
      cells = measure_cells(config);
      break;
  }

  CellWriter writer(dir, outputs, hash);
  const std::uint64_t resumed = writer.completed();
  if (log && resumed > 0) *log << "resuming after " << resumed << " of " << cells.size() << " cells\n";
  for (std::uint64_t index = resumed; index < cells.size(); ++index) {
    writer.append(index, cells[index].compute());
    if (log) *log << "[" << index + 1 << "/" << cells.size() << "] " << cells[index].label << std::endl;
  }
  if (config.kind == ExperimentKind::MaxEntropyScaling) {
    write_scaling_fit(dir);
    outputs.push_back({"fit.json", ""});
  }

  ResultManifest manifest;
  manifest.kind = to_string(config.kind);
  manifest.config_hash = hash;
  manifest.tool_version = RBNLAB_VERSION;
  manifest.config = config.canonical();
  if (!config.preset.empty()) manifest.config["preset"] = config.preset;
  for (const auto& o : outputs) {
    const fs::path path = dir / o.name;
    manifest.files.push_back(ManifestFile{o.name, file_checksum(path), fs::file_size(path)});
  }
  manifest.cells = cells.size();
  manifest.resumed_cells = resumed;
  manifest.wall_time_s = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
  std::ofstream(dir / "manifest.json", std::ios::trunc) << manifest.to_json();
  return manifest;
}

}  // namespace rbn
