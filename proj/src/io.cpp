#include "markovdyn/io.hpp"

#include <fstream>
#include <sstream>
#include <stdexcept>

namespace markovdyn {

namespace {

using nlohmann::json;

std::vector<std::string> parse_labels(const json& j) {
  if (!j.contains("states") || !j.at("states").is_array()) {
    throw std::invalid_argument("document is missing the \"states\" array");
  }
  std::vector<std::string> labels;
  for (const auto& s : j.at("states")) labels.push_back(s.get<std::string>());
  return labels;
}

std::vector<std::string> split_csv_line(const std::string& line) {
  std::vector<std::string> fields;
  std::string field;
  std::stringstream ss(line);
  while (std::getline(ss, field, ',')) {
    // Trim surrounding whitespace.
    const auto b = field.find_first_not_of(" \t\r");
    const auto e = field.find_last_not_of(" \t\r");
    fields.push_back(b == std::string::npos ? "" : field.substr(b, e - b + 1));
  }
  return fields;
}

}  // namespace

json to_json(const MarkovKernel& k) {
  json rows = json::array();
  for (int i = 0; i < k.size(); ++i) {
    const auto r = k.row(i);
    rows.push_back(json(std::vector<double>(r.begin(), r.end())));
  }
  return json{{"states", k.space().labels()}, {"rows", rows}};
}

MarkovKernel kernel_from_json(const json& j, double tol) {
  StateSpace space(parse_labels(j));
  if (!j.contains("rows") || !j.at("rows").is_array()) {
    throw std::invalid_argument("kernel document is missing the \"rows\" array");
  }
  std::vector<std::vector<double>> rows;
  std::size_t row_index = 0;
  for (const auto& r : j.at("rows")) {
    if (!r.is_array()) {
      throw std::invalid_argument("kernel row " + std::to_string(row_index) + " is not an array");
    }
    std::vector<double> row;
    std::size_t col = 0;
    for (const auto& v : r) {
      if (!v.is_number()) {
        throw std::invalid_argument("kernel entry (" + std::to_string(row_index) + "," +
                                    std::to_string(col) + ") is not a number");
      }
      row.push_back(v.get<double>());
      ++col;
    }
    rows.push_back(std::move(row));
    ++row_index;
  }
  return MarkovKernel::from_rows(std::move(space), rows, tol);
}

MarkovKernel kernel_from_csv(std::istream& in, double tol) {
  std::string line;
  if (!std::getline(in, line)) throw std::invalid_argument("kernel csv: empty input");
  const std::vector<std::string> labels = split_csv_line(line);
  StateSpace space(labels);
  const auto n = static_cast<std::size_t>(space.size());

  std::vector<std::vector<double>> rows;
  std::size_t row_index = 0;
  while (std::getline(in, line)) {
    if (line.find_first_not_of(" \t\r") == std::string::npos) continue;
    const auto fields = split_csv_line(line);
    if (fields.size() != n) {
      throw std::invalid_argument("kernel csv row " + std::to_string(row_index) + " has " +
                                  std::to_string(fields.size()) + " fields, expected " +
                                  std::to_string(n));
    }
    std::vector<double> row;
    for (std::size_t c = 0; c < fields.size(); ++c) {
      try {
        std::size_t used = 0;
        row.push_back(std::stod(fields[c], &used));
        if (used != fields[c].size()) throw std::invalid_argument("trailing characters");
      } catch (const std::exception&) {
        throw std::invalid_argument("kernel csv entry (" + std::to_string(row_index) + "," +
                                    std::to_string(c) + ") = \"" + fields[c] +
                                    "\" is not a number");
      }
    }
    rows.push_back(std::move(row));
    ++row_index;
  }
  if (rows.size() != n) {
    throw std::invalid_argument("kernel csv has " + std::to_string(rows.size()) +
                                " data rows, expected " + std::to_string(n));
  }
  return MarkovKernel::from_rows(std::move(space), rows, tol);
}

void kernel_to_csv(std::ostream& out, const MarkovKernel& k) {
  const auto& labels = k.space().labels();
  for (std::size_t i = 0; i < labels.size(); ++i) {
    if (i) out << ",";
    out << labels[i];
  }
  out << "\n";
  out.precision(17);
  for (int i = 0; i < k.size(); ++i) {
    for (int j = 0; j < k.size(); ++j) {
      if (j) out << ",";
      out << k(i, j);
    }
    out << "\n";
  }
}

json to_json(const ProductDynamicalSystem& sys) {
  const int n = sys.states();
  const int m = sys.env_points();
  json x_rows = json::array();
  json y_rows = json::array();
  for (int x = 0; x < n; ++x) {
    std::vector<int> xr(static_cast<std::size_t>(m)), yr(static_cast<std::size_t>(m));
    for (int y = 0; y < m; ++y) {
      xr[static_cast<std::size_t>(y)] = sys.x_map(x, y);
      yr[static_cast<std::size_t>(y)] = sys.y_map(x, y);
    }
    x_rows.push_back(json(xr));
    y_rows.push_back(json(yr));
  }
  json env{{"weights", std::vector<double>(sys.env().weights().begin(),
                                           sys.env().weights().end())},
           {"ids", sys.env().ids()}};
  if (sys.env().functions()) env["functions"] = *sys.env().functions();
  return json{{"states", sys.system_space().labels()},
              {"env", env},
              {"x_map", x_rows},
              {"y_map", y_rows}};
}

ProductDynamicalSystem system_from_json(const json& j, double tol) {
  StateSpace space(parse_labels(j));
  if (!j.contains("env") || !j.at("env").is_object()) {
    throw std::invalid_argument("system document is missing the \"env\" object");
  }
  const auto& env_j = j.at("env");
  if (!env_j.contains("weights")) {
    throw std::invalid_argument("system env is missing \"weights\"");
  }
  std::vector<double> weights;
  for (const auto& w : env_j.at("weights")) weights.push_back(w.get<double>());

  std::vector<std::string> ids;
  if (env_j.contains("ids")) {
    for (const auto& s : env_j.at("ids")) ids.push_back(s.get<std::string>());
  } else {
    for (std::size_t i = 0; i < weights.size(); ++i) ids.push_back("e" + std::to_string(i));
  }

  std::optional<std::vector<std::vector<int>>> functions;
  if (env_j.contains("functions") && !env_j.at("functions").is_null()) {
    std::vector<std::vector<int>> fs;
    for (const auto& row : env_j.at("functions")) {
      fs.push_back(row.get<std::vector<int>>());
    }
    functions = std::move(fs);
  }

  auto parse_map = [&](const char* key) {
    if (!j.contains(key)) {
      throw std::invalid_argument(std::string("system document is missing \"") + key + "\"");
    }
    std::vector<int> flat;
    std::size_t row_index = 0;
    for (const auto& row : j.at(key)) {
      if (!row.is_array() || row.size() != weights.size()) {
        throw std::invalid_argument(std::string(key) + " row " + std::to_string(row_index) +
                                    " must list one entry per environment point");
      }
      for (const auto& v : row) flat.push_back(v.get<int>());
      ++row_index;
    }
    if (row_index != static_cast<std::size_t>(space.size())) {
      throw std::invalid_argument(std::string(key) + " has " + std::to_string(row_index) +
                                  " rows, expected " + std::to_string(space.size()));
    }
    return flat;
  };

  std::vector<int> x_map = parse_map("x_map");
  std::vector<int> y_map = parse_map("y_map");
  return ProductDynamicalSystem(std::move(space),
                                EnvironmentSpace(std::move(ids), std::move(weights),
                                                 std::move(functions), tol),
                                std::move(x_map), std::move(y_map));
}

json to_json(const FiniteMeasure& p) {
  return json{{"states", p.space().labels()},
              {"weights", std::vector<double>(p.weights().begin(), p.weights().end())}};
}

json read_json_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::invalid_argument("cannot open file: " + path);
  json j;
  try {
    in >> j;
  } catch (const json::parse_error& e) {
    throw std::invalid_argument("malformed JSON in " + path + ": " + e.what());
  }
  return j;
}

void write_text_file(const std::string& path, const std::string& content) {
  std::ofstream out(path);
  if (!out) throw std::invalid_argument("cannot open file for writing: " + path);
  out << content;
}

namespace {

bool ends_with(const std::string& s, const std::string& suffix) {
  return s.size() >= suffix.size() && s.compare(s.size() - suffix.size(), suffix.size(), suffix) == 0;
}

// CLI reports embed their artifacts under outputs.*; accept those too.
const json* descend(const json& j, const char* key) {
  if (j.contains("outputs") && j.at("outputs").is_object() && j.at("outputs").contains(key)) {
    return &j.at("outputs").at(key);
  }
  return nullptr;
}

}  // namespace

MarkovKernel load_kernel(const std::string& path, double tol) {
  if (ends_with(path, ".csv")) {
    std::ifstream in(path);
    if (!in) throw std::invalid_argument("cannot open file: " + path);
    return kernel_from_csv(in, tol);
  }
  const json j = read_json_file(path);
  if (const json* k = descend(j, "kernel")) return kernel_from_json(*k, tol);
  return kernel_from_json(j, tol);
}

ProductDynamicalSystem load_system(const std::string& path, double tol) {
  const json j = read_json_file(path);
  if (const json* s = descend(j, "system")) return system_from_json(*s, tol);
  return system_from_json(j, tol);
}

}  // namespace markovdyn
