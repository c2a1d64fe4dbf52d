// Acceptance run: one PASS/FAIL line per criterion, with the measured
// numbers behind each verdict. Heavy experiments go through the same
// harness as the command line tool and land in a scratch directory.

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <functional>
#include <limits>
#include <map>
#include <optional>
#include <sstream>
#include <string>
#include <thread>
#include <vector>

#include "json.hpp"
#include "oracle.hpp"
#include "rbn/config.hpp"
#include "rbn/entropy.hpp"
#include "rbn/harness.hpp"
#include "rbn/metrics.hpp"
#include "rbn/power_law.hpp"
#include "rbn/tasks.hpp"

using namespace rbn;
namespace fs = std::filesystem;

namespace {

struct Verdict {
  bool pass = false;
  std::string detail;
};

fs::path g_root;
unsigned g_workers = 1;

using Row = std::map<std::string, std::string>;

std::vector<Row> read_csv(const fs::path& path) {
  std::ifstream in(path);
  if (!in) throw Error("cannot read " + path.string());
  std::vector<std::string> header;
  std::vector<Row> rows;
  std::string line;
  while (std::getline(in, line)) {
    std::vector<std::string> cells;
    std::stringstream fields(line);
    for (std::string cell; std::getline(fields, cell, ',');) cells.push_back(cell);
    if (!line.empty() && line.back() == ',') cells.emplace_back();
    if (header.empty()) {
      header = cells;
      continue;
    }
    Row row;
    for (std::size_t i = 0; i < header.size() && i < cells.size(); ++i) row[header[i]] = cells[i];
    rows.push_back(std::move(row));
  }
  return rows;
}

std::optional<double> number(const Row& row, const std::string& key) {
  const auto it = row.find(key);
  if (it == row.end() || it->second.empty()) return std::nullopt;
  return std::stod(it->second);
}

std::string fmt(double v, int digits = 4) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.*g", digits, v);
  return buf;
}

ExperimentConfig configure(const std::string& name, const std::string& text) {
  std::istringstream in(text);
  auto c = ExperimentConfig::from_key_values(read_key_values(in));
  c.output = (g_root / name).string();
  c.workers = g_workers;
  return c;
}

fs::path run(const ExperimentConfig& c) {
  const auto start = std::chrono::steady_clock::now();
  run_experiment(c);
  const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
  std::fprintf(stderr, "  %s done in %.1f s\n", fs::path(c.output).filename().c_str(), secs);
  return c.output;
}

// Learning-probability curve of one (N, K, I) cell, in s order.
std::vector<std::pair<double, std::optional<double>>> delta_curve(const fs::path& dir, int inputs) {
  std::vector<std::pair<double, std::optional<double>>> curve;
  for (const auto& row : read_csv(dir / "curves.csv")) {
    if (row.at("I") != std::to_string(inputs)) continue;
    curve.emplace_back(*number(row, "s"), number(row, "delta"));
  }
  return curve;
}

std::optional<double> cumulative_value(const fs::path& dir, const std::string& measure, const std::string& k = "") {
  for (const auto& row : read_csv(dir / "cumulative.csv")) {
    if (row.at("measure") == measure && (k.empty() || row.at("K") == k)) return number(row, "area");
  }
  return std::nullopt;
}

std::string describe(const std::vector<std::pair<double, std::optional<double>>>& curve) {
  std::string out;
  for (const auto& [s, d] : curve) out += (out.empty() ? "" : " ") + fmt(s, 3) + ":" + (d ? fmt(*d, 3) : "-");
  return out;
}

// Spearman rank correlation with average ranks for ties.
double spearman(const std::vector<double>& x, const std::vector<double>& y) {
  const auto ranks = [](const std::vector<double>& v) {
    std::vector<std::size_t> order(v.size());
    for (std::size_t i = 0; i < v.size(); ++i) order[i] = i;
    std::sort(order.begin(), order.end(), [&](auto a, auto b) { return v[a] < v[b]; });
    std::vector<double> r(v.size());
    for (std::size_t i = 0; i < order.size();) {
      std::size_t j = i;
      while (j + 1 < order.size() && v[order[j + 1]] == v[order[i]]) ++j;
      for (std::size_t t = i; t <= j; ++t) r[order[t]] = (i + j) / 2.0 + 1.0;
      i = j + 1;
    }
    return r;
  };
  const auto rx = ranks(x), ry = ranks(y);
  const double n = static_cast<double>(x.size());
  double mx = 0, my = 0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    mx += rx[i] / n;
    my += ry[i] / n;
  }
  double sxy = 0, sxx = 0, syy = 0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    sxy += (rx[i] - mx) * (ry[i] - my);
    sxx += (rx[i] - mx) * (rx[i] - mx);
    syy += (ry[i] - my) * (ry[i] - my);
  }
  if (sxx == 0 || syy == 0) return 0.0;
  return sxy / std::sqrt(sxx * syy);
}

// 1. Sampled entropy of an enumerable ensemble against its exact value.
Verdict oracle_equivalence() {
  const auto exact = oracle::exact_function_distribution(2, 2, 1);
  const double h_exact = oracle::shannon_bits(exact);
  NetworkSpec spec;
  spec.nodes = 2;
  spec.connectivity = 1.0;
  spec.inputs = 1;
  spec.outputs = 1;
  const auto hist = sample_ensemble(spec, 100000, 0xACCE97, g_workers);
  Rng rng(0xB007);
  const double se = entropy_standard_error(hist, 200, rng);
  const double h = entropy(hist);
  const double z = std::abs(h - h_exact) / se;
  return {z <= 3.0, "exact " + fmt(h_exact, 6) + " bits, sampled " + fmt(h, 6) + " bits, bootstrap se " + fmt(se, 3) +
                        ", |z| = " + fmt(z, 3)};
}

// 2. Location of the entropy maximum for N = 20 and N = 100.
Verdict entropy_peaks() {
  std::string detail;
  bool pass = true;
  for (const auto& [n, expected] : std::vector<std::pair<int, double>>{{20, 3.5}, {100, 2.5}}) {
    const auto dir = run(configure("peak-N" + std::to_string(n), "kind = entropy-scan\nN = " + std::to_string(n) +
                                                                   "\nI = 3\nK = 0.5:8:0.5\nsamples = 10000\nseed = 20\n"));
    double best_k = 0, best_h = -1;
    for (const auto& row : read_csv(dir / "landscape.csv")) {
      const double h = *number(row, "entropy_bits");
      if (h > best_h) {
        best_h = h;
        best_k = *number(row, "K");
      }
    }
    const bool ok = std::abs(best_k - expected) <= 0.5 + 1e-9;
    pass = pass && ok;
    detail += (detail.empty() ? "" : "; ") + std::string("N=") + std::to_string(n) + " peak K=" + fmt(best_k) + " (" +
              fmt(best_h) + " bits), expected " + fmt(expected) + " +- 0.5";
  }
  return {pass, detail};
}

// 3. Power law through the max-entropy connectivities, plus a synthetic
// round trip through the fitter.
Verdict power_law() {
  std::vector<double> n_syn{5, 10, 20, 50, 100, 200, 500, 1000, 2000}, k_syn;
  for (double v : n_syn) k_syn.push_back(14.06 * std::pow(v, -0.83) + 2.32);
  const auto syn = fit_power_law(n_syn, k_syn);
  const auto close = [](double got, double want) { return std::abs(got - want) <= 0.01 * std::abs(want); };
  const bool syn_ok = close(syn.a, 14.06) && close(syn.b, -0.83) && close(syn.c, 2.32);

  const auto dir = run(configure("scaling", "kind = max-entropy-scaling\nN = 5, 10, 20, 50, 100, 200, 500\nI = 3\n"
                                            "K = 0.5:8:0.5\nrefine_step = 0.1\nsamples = 1000\nseed = 30\n"));
  std::ifstream in(dir / "fit.json");
  const auto fit = nlohmann::json::parse(in);
  const double b = fit.at("b").get<double>();
  const double c = fit.at("c").get<double>();
  const bool desk_ok = b >= -1.1 && b <= -0.55 && c >= 1.8 && c <= 2.8;

  std::string peaks;
  for (const auto& row : read_csv(dir / "scaling.csv")) peaks += " " + row.at("N") + ":" + row.at("K_star");
  return {syn_ok && desk_ok, "desk fit a=" + fmt(fit.at("a").get<double>()) + " b=" + fmt(b) + " c=" + fmt(c) +
                                 " (b in [-1.1,-0.55], c in [1.8,2.8]); K* by N:" + peaks + "; synthetic a=" +
                                 fmt(syn.a, 6) + " b=" + fmt(syn.b, 6) + " c=" + fmt(syn.c, 6) +
                                 (syn_ok ? " within 1%" : " outside 1%")};
}

std::optional<double> first_reaching(const std::vector<std::pair<double, std::optional<double>>>& curve, double level) {
  for (const auto& [s, d] : curve) {
    if (d && *d >= level) return s;
  }
  return std::nullopt;
}

// 4. Feedforward networks: more inputs need a smaller training fraction.
Verdict feedforward_trend() {
  const auto dir = run(configure("feedforward-trend", "kind = measure-curves\nN = 50\nK = 2\nI = 3, 5\nfeedforward = true\n"
                                                      "runs = 100\ns_points = 8\ngenerations = 500\nseed = 40\n"));
  const auto c3 = delta_curve(dir, 3), c5 = delta_curve(dir, 5);
  const auto s3 = first_reaching(c3, 0.9), s5 = first_reaching(c5, 0.9);
  const bool pass = s5 && (!s3 || *s5 < *s3);
  return {pass, "first s with delta >= 0.9: I=3 " + (s3 ? fmt(*s3, 3) : std::string("never")) + ", I=5 " +
                    (s5 ? fmt(*s5, 3) : std::string("never")) + "; I=3 [" + describe(c3) + "]; I=5 [" + describe(c5) +
                    "]"};
}

// 5. Recurrent networks generalize worse than feedforward ones.
Verdict recurrent_gap() {
  const std::string common =
      "kind = measure-curves\nN = 20\nK = 2\nI = 5\nruns = 100\ns_points = 8\ngenerations = 500\n"
      "crossover = 0.6\nmutation = 0.3\nseed = 50\n";
  const auto rec = run(configure("gap-recurrent", common + "feedforward = false\n"));
  const auto ff = run(configure("gap-feedforward", common + "feedforward = true\n"));
  const auto a_rec = cumulative_value(rec, "learning_probability");
  const auto a_ff = cumulative_value(ff, "learning_probability");
  const auto curve = delta_curve(rec, 5);
  bool below_one = true;
  for (const auto& [s, d] : curve) {
    if (s < 1.0 && d && *d >= 1.0) below_one = false;
  }
  const bool gap = a_rec && a_ff && *a_rec < *a_ff;
  return {gap && below_one, "cumulative learning probability recurrent " + (a_rec ? fmt(*a_rec) : std::string("n/a")) +
                                " vs feedforward " + (a_ff ? fmt(*a_ff) : std::string("n/a")) +
                                "; recurrent delta [" + describe(curve) + "]" +
                                (below_one ? "" : " reaches 1 below s = 1")};
}

// 6. Cumulative training score grows with K.
Verdict k_trend() {
  const auto dir = run(configure("k-trend", "kind = measure-curves\nN = 15\nK = 1, 2, 3, 4\nI = 3\nruns = 100\n"
                                            "generations = 500\nseed = 60\n"));
  std::vector<double> ks{1, 2, 3, 4}, areas;
  std::string detail = "cumulative training score:";
  for (double k : ks) {
    const auto a = cumulative_value(dir, "training_score", fmt(k));
    areas.push_back(a.value_or(std::numeric_limits<double>::quiet_NaN()));
    detail += " K=" + fmt(k) + ":" + (a ? fmt(*a) : std::string("n/a"));
  }
  const double rho = spearman(ks, areas);
  return {rho > 0.8, detail + "; spearman rho = " + fmt(rho, 3)};
}

// 7. Hand-checkable values of the definitions.
Verdict definitions() {
  const auto record = [](double f, double g) {
    RunRecord r;
    r.f_final = f;
    r.g_final = g;
    r.sample_size = 4;
    r.input_space = 8;
    r.outputs = 1;
    return r;
  };
  const std::vector<RunRecord> runs{record(1, 1), record(1, 0.5), record(0.5, 0.5), record(1, 1)};
  const auto p = aggregate(runs, 0.5);
  const bool measures = p.alpha == 0.75 && p.alpha_prime == 0.5 && p.delta && *p.delta == 2.0 / 3.0 &&
                        p.beta == 0.875 && p.beta_prime == 0.75;

  const auto point = [](double s) {
    MeasurePoint m;
    m.s = s;
    m.runs = 1;
    m.alpha = m.alpha_prime = m.beta = m.beta_prime = s;
    m.delta = s;
    return m;
  };
  const double area = cumulative(MeasureCurve({point(0.25), point(0.5), point(1.0)}), Measure::TrainingScore).area;
  const bool linear = area == 0.5 - 0.25 * 0.25 / 2;

  const std::vector<std::uint8_t> parity{0, 1, 1, 0, 1, 0, 0, 1};
  const BooleanNetwork xor_net(1, 3, 1, {{0, 3}, {1, 3}, {2, 3}}, {LookupTable::from_bits(parity)});
  const double g = generalization(xor_net, TaskSpec::even_odd(3));

  return {measures && linear && g == 1.0, "alpha=" + fmt(p.alpha) + " alpha'=" + fmt(p.alpha_prime) +
                                              " delta=" + (p.delta ? fmt(*p.delta, 17) : std::string("n/a")) +
                                              " beta=" + fmt(p.beta) + " beta'=" + fmt(p.beta_prime) +
                                              "; linear-curve area " + fmt(area, 17) + "; XOR g=" + fmt(g)};
}

// 8. Outputs do not depend on the worker count.
Verdict determinism() {
  const std::vector<std::pair<std::string, std::string>> experiments{
      {"entropy", "kind = entropy-scan\nN = 12, 30\nI = 3\nK = 1:4:1\nsamples = 400\nseed = 80\n"},
      {"scaling", "kind = max-entropy-scaling\nN = 5, 8, 12, 16\nI = 2\nK = 1:4:1\nrefine_step = 0.5\n"
                  "samples = 200\nseed = 81\n"},
      {"sweep", "kind = evolve-sweep\nN = 10\nK = 1.5\nI = 3\nruns = 6\ns = 0.5, 1\ngenerations = 40\n"
                "feedforward = true\nseed = 82\n"},
      {"curves", "kind = cumulative-landscape\nN = 8, 12\nK = 1, 2\nI = 2, 3\nruns = 5\ngenerations = 30\n"
                 "task = mapping\ninitial_state = random\nseed = 83\n"},
  };
  bool pass = true;
  std::size_t compared = 0;
  std::string mismatch;
  for (const auto& [name, text] : experiments) {
    auto one = configure("determinism-" + name + "-w1", text);
    one.workers = 1;
    auto eight = configure("determinism-" + name + "-w8", text);
    eight.workers = 8;
    run(one);
    run(eight);
    for (const auto& entry : fs::directory_iterator(one.output)) {
      const auto file = entry.path().filename();
      std::ifstream a(entry.path(), std::ios::binary), b(fs::path(eight.output) / file, std::ios::binary);
      std::stringstream sa, sb;
      sa << a.rdbuf();
      sb << b.rdbuf();
      std::string ta = sa.str(), tb = sb.str();
      if (file == "manifest.json") {
        // Wall time is the one field that is allowed to differ.
        auto ja = nlohmann::json::parse(ta), jb = nlohmann::json::parse(tb);
        ja.erase("wall_time_s");
        jb.erase("wall_time_s");
        ta = ja.dump();
        tb = jb.dump();
      }
      ++compared;
      if (ta != tb) {
        pass = false;
        mismatch += " " + name + "/" + file.string();
      }
    }
  }
  return {pass, std::to_string(compared) + " files compared across 4 experiments" +
                    (pass ? ", all identical" : "; differing:" + mismatch)};
}

}  // namespace

int main() {
  g_root = fs::temp_directory_path() / "rbnlab-acceptance";
  fs::remove_all(g_root);
  fs::create_directories(g_root);
  g_workers = std::max(1U, std::thread::hardware_concurrency());

  const std::vector<std::pair<std::string, std::function<Verdict()>>> criteria{
      {"entropy oracle equivalence", oracle_equivalence},
      {"entropy peak positions", entropy_peaks},
      {"power-law recovery", power_law},
      {"feedforward input-size trend", feedforward_trend},
      {"recurrent vs feedforward gap", recurrent_gap},
      {"K trend in cumulative training score", k_trend},
      {"definitional exactness", definitions},
      {"determinism across worker counts", determinism},
  };

  int failed = 0;
  for (std::size_t i = 0; i < criteria.size(); ++i) {
    const auto start = std::chrono::steady_clock::now();
    Verdict v;
    try {
      v = criteria[i].second();
    } catch (const std::exception& e) {
      v = {false, std::string("error: ") + e.what()};
    }
    const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    if (!v.pass) ++failed;
    std::printf("%s %zu %s: %s [%.0f s]\n", v.pass ? "PASS" : "FAIL", i + 1, criteria[i].first.c_str(),
                v.detail.c_str(), secs);
    std::fflush(stdout);
  }
  std::printf("%d of %zu criteria passed\n", static_cast<int>(criteria.size()) - failed, criteria.size());
  return failed == 0 ? 0 : 1;
}
