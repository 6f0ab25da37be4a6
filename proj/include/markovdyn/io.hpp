#pragma once

#include <iosfwd>
#include <string>

#include <json.hpp>

#include "markovdyn/dilation.hpp"
#include "markovdyn/markov_kernel.hpp"

namespace markovdyn {

// Kernel wire format: {"states": ["a","b"], "rows": [[..],[..]]}.
nlohmann::json to_json(const MarkovKernel& k);
MarkovKernel kernel_from_json(const nlohmann::json& j, double tol = kStochasticTol);

// CSV alternative: header row of labels, then n rows of n probabilities.
MarkovKernel kernel_from_csv(std::istream& in, double tol = kStochasticTol);
void kernel_to_csv(std::ostream& out, const MarkovKernel& k);

// Product-system wire format:
// {"states": [...],
//  "env": {"weights": [...], "functions": [[...],...]?, "ids": [...]?},
//  "x_map": [[...]], "y_map": [[...]]}
// ids default to "e0","e1",... when absent.
nlohmann::json to_json(const ProductDynamicalSystem& sys);
ProductDynamicalSystem system_from_json(const nlohmann::json& j, double tol = kStochasticTol);

nlohmann::json to_json(const FiniteMeasure& p);

// File loaders dispatch on extension (.csv reads the CSV kernel format, else
// JSON). A report produced by the CLI is accepted wherever the bare document
// is: the loader descends into outputs.kernel / outputs.system.
MarkovKernel load_kernel(const std::string& path, double tol = kStochasticTol);
ProductDynamicalSystem load_system(const std::string& path, double tol = kStochasticTol);

nlohmann::json read_json_file(const std::string& path);
void write_text_file(const std::string& path, const std::string& content);

}  // namespace markovdyn
