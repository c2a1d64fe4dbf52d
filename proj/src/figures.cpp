#include "rbn/figures.hpp"

#include <fstream>
#include <map>
#include <set>
#include <sstream>

#include "json.hpp"
#include "rbn/format.hpp"
#include "rbn/harness.hpp"
#include "rbn/power_law.hpp"

namespace rbn {

namespace fs = std::filesystem;

namespace {

using Row = std::map<std::string, std::string>;

std::vector<Row> read_csv(const fs::path& path) {
  std::ifstream in(path);
  if (!in) throw FigureCoverageError("missing " + path.filename().string() + " in " + path.parent_path().string());
  auto split = [](const std::string& line) {
    std::vector<std::string> cells;
    std::stringstream s(line);
    for (std::string cell; std::getline(s, cell, ',');) cells.push_back(cell);
    if (!line.empty() && line.back() == ',') cells.emplace_back();
    return cells;
  };
  std::string line;
  std::getline(in, line);
  const auto header = split(line);
  std::vector<Row> rows;
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    const auto cells = split(line);
    Row row;
    for (std::size_t i = 0; i < header.size(); ++i) row[header[i]] = i < cells.size() ? cells[i] : "";
    rows.push_back(std::move(row));
  }
  return rows;
}

struct Figure {
  std::string id;
  std::string title;
  std::vector<std::string> kinds;  // accepted experiment kinds
};

const std::vector<Figure>& figures() {
  static const std::vector<Figure> all = {
      {"fig2", "functional entropy over mean connectivity", {"entropy-scan", "max-entropy-scaling"}},
      {"fig3", "maximum-entropy connectivity over system size with power-law fit", {"max-entropy-scaling"}},
      {"fig4", "learning probability over training fraction, feedforward networks", {"measure-curves", "cumulative-landscape"}},
      {"fig5", "learning probability over training fraction, recurrent networks", {"measure-curves", "cumulative-landscape"}},
      {"fig6", "learning probability and perfect training likelihood over training fraction", {"measure-curves", "cumulative-landscape"}},
      {"fig7", "generalization and training scores over training fraction", {"measure-curves", "cumulative-landscape"}},
      {"fig8", "cumulative learning probability and training likelihood over connectivity", {"measure-curves", "cumulative-landscape"}},
      {"fig9", "cumulative generalization and training scores over connectivity", {"measure-curves", "cumulative-landscape"}},
      {"fig10", "cumulative learning probability and training likelihood over N and K", {"measure-curves", "cumulative-landscape"}},
      {"fig11", "cumulative generalization and training scores over N and K", {"measure-curves", "cumulative-landscape"}},
      {"fig12", "mean population fitness spread over generations", {"measure-curves", "cumulative-landscape"}},
  };
  return all;
}

std::string emit(const Figure& fig, const std::vector<std::string>& columns, const std::vector<std::vector<std::string>>& rows) {
  std::string out = "# " + fig.id + ": " + fig.title + "\n# columns:";
  for (const auto& c : columns) out += " " + c;
  out += "\n";
  for (std::size_t i = 0; i < columns.size(); ++i) out += (i ? "," : "") + columns[i];
  out += "\n";
  for (const auto& row : rows) {
    for (std::size_t i = 0; i < row.size(); ++i) out += (i ? "," : "") + row[i];
    out += "\n";
  }
  return out;
}

std::size_t distinct(const std::vector<Row>& rows, const std::string& column) {
  std::set<std::string> values;
  for (const auto& r : rows) values.insert(r.at(column));
  return values.size();
}

void require_single(const Figure& fig, const std::vector<Row>& rows, const std::string& column) {
  if (distinct(rows, column) > 1) {
    throw FigureCoverageError(fig.id + " expects a single " + column + " value in the results");
  }
}

// Pivots cumulative.csv rows into one row per group with the two measures.
std::vector<std::vector<std::string>> pivot(const std::vector<Row>& rows, const std::vector<std::string>& keys,
                                            const std::string& first, const std::string& second) {
  std::vector<std::vector<std::string>> out;
  std::map<std::string, std::size_t> index;
  for (const auto& r : rows) {
    const auto& m = r.at("measure");
    if (m != first && m != second) continue;
    std::string group;
    for (const auto& k : {"N", "K", "I"}) group += r.at(k) + "|";
    if (!index.contains(group)) {
      index[group] = out.size();
      std::vector<std::string> row;
      for (const auto& k : keys) row.push_back(r.at(k));
      row.resize(keys.size() + 2);
      out.push_back(std::move(row));
    }
    out[index[group]][keys.size() + (m == first ? 0 : 1)] = r.at("area");
  }
  return out;
}

}  // namespace

std::vector<std::pair<std::string, std::string>> figure_catalog() {
  std::vector<std::pair<std::string, std::string>> out;
  for (const auto& f : figures()) out.emplace_back(f.id, f.title);
  return out;
}

std::string figure_data(const fs::path& results, const std::string& figure_id) {
  const Figure* fig = nullptr;
  for (const auto& f : figures()) {
    if (f.id == figure_id) fig = &f;
  }
  if (!fig) throw FigureCoverageError("unknown figure id '" + figure_id + "'");

  if (!fs::exists(results / "manifest.json")) {
    throw FigureCoverageError(results.string() + " holds no completed run (manifest.json missing)");
  }
  const auto manifest = ResultManifest::load(results);
  bool accepted = false;
  for (const auto& k : fig->kinds) accepted = accepted || k == manifest.kind;
  if (!accepted) {
    throw FigureCoverageError(fig->id + " cannot be drawn from " + manifest.kind + " results");
  }

  const auto& id = fig->id;
  if (id == "fig2") {
    std::vector<std::vector<std::string>> rows;
    for (const auto& r : read_csv(results / "landscape.csv")) rows.push_back({r.at("N"), r.at("I"), r.at("K"), r.at("entropy_bits")});
    return emit(*fig, {"N", "I", "K", "entropy_bits"}, rows);
  }
  if (id == "fig3") {
    std::ifstream in(results / "fit.json");
    const auto fit = nlohmann::json::parse(in);
    PowerLawFit model;
    model.a = fit.at("a").get<double>();
    model.b = fit.at("b").get<double>();
    model.c = fit.at("c").get<double>();
    std::vector<std::vector<std::string>> rows;
    for (const auto& r : read_csv(results / "scaling.csv")) {
      rows.push_back({r.at("N"), r.at("K_star"), format_double(model(std::stod(r.at("N"))))});
    }
    return emit(*fig, {"N", "K_star", "K_fit"}, rows);
  }

  if (id == "fig4" || id == "fig5") {
    const bool want_feedforward = id == "fig4";
    const auto it = manifest.config.find("feedforward");
    if (it == manifest.config.end() || (it->second == "true") != want_feedforward) {
      throw FigureCoverageError(id + " needs " + (want_feedforward ? "feedforward" : "recurrent") + " results");
    }
  }
  if (id == "fig4" || id == "fig5" || id == "fig6" || id == "fig7") {
    std::vector<std::vector<std::string>> rows;
    for (const auto& r : read_csv(results / "curves.csv")) {
      std::vector<std::string> row = {r.at("N"), r.at("K"), r.at("I"), r.at("s")};
      if (id == "fig7") {
        row.push_back(r.at("beta_prime"));
        row.push_back(r.at("beta"));
      } else {
        row.push_back(r.at("delta"));
        if (id == "fig6") row.push_back(r.at("alpha"));
      }
      rows.push_back(std::move(row));
    }
    std::vector<std::string> columns = {"N", "K", "I", "s"};
    if (id == "fig7") {
      columns.insert(columns.end(), {"generalization_score", "training_score"});
    } else {
      columns.push_back("learning_probability");
      if (id == "fig6") columns.push_back("training_likelihood");
    }
    return emit(*fig, columns, rows);
  }
  if (id == "fig12") {
    const auto data = read_csv(results / "fitness_std.csv");
    require_single(*fig, data, "N");
    std::vector<std::vector<std::string>> rows;
    for (const auto& r : data) rows.push_back({r.at("I"), r.at("K"), r.at("gen"), r.at("mean_std_f")});
    return emit(*fig, {"I", "K", "gen", "mean_std_f"}, rows);
  }

  const auto data = read_csv(results / "cumulative.csv");
  const bool scores = id == "fig9" || id == "fig11";
  const std::string first = scores ? "generalization_score" : "learning_probability";
  const std::string second = scores ? "training_score" : "training_likelihood";
  const std::vector<std::string> names = scores ? std::vector<std::string>{"cum_generalization_score", "cum_training_score"}
                                                : std::vector<std::string>{"cum_learning_prob", "cum_training_likelihood"};
  std::vector<std::string> keys;
  if (id == "fig8") {
    require_single(*fig, data, "N");
    require_single(*fig, data, "I");
    keys = {"K"};
  } else if (id == "fig9") {
    require_single(*fig, data, "N");
    keys = {"I", "K"};
  } else {
    require_single(*fig, data, "I");
    keys = {"N", "K"};
  }
  auto columns = keys;
  columns.insert(columns.end(), names.begin(), names.end());
  return emit(*fig, columns, pivot(data, keys, first, second));
}

}  // namespace rbn
