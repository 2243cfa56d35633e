#pragma once

#include <string>
#include <vector>

#include "json.hpp"
#include "evaluate.hpp"
#include "mcmc.hpp"
#include "posterior.hpp"
#include "simulate.hpp"

// File formats. Node and component numbers are 1-based on disk.
namespace mixgbn {

using Json = nlohmann::json;

std::string read_text(const std::string& path);
// Writes to a temporary next to `path` and renames it into place.
void write_text_atomic(const std::string& path, const std::string& text);

Json matrix_to_json(const Matrix& m);  // list of rows
Matrix matrix_from_json(const Json& j);
Json vector_to_json(const Vector& v);
Vector vector_from_json(const Json& j);

Json hyperparameters_to_json(const Hyperparameters& hp);
// Missing keys fall back to Hyperparameters::defaults(n).
Hyperparameters hyperparameters_from_json(const Json& j, int n);

// Scalar settings of a chain (initial states are not echoed).
Json chain_config_to_json(const ChainConfig& cfg);

// One JSON object per draw: iter, log_score, edges [[j, i], ...], z.
std::string format_sample_jsonl(const PosteriorSample& sample);
Json sample_summary(const PosteriorSample& sample, int chains = 1);
std::string format_trace_csv(const PosteriorSample& sample);

// Rebuilds a sample from its draw file and summary (n, m, model, config).
PosteriorSample parse_sample(const std::string& jsonl, const Json& summary);
// "<stem>.jsonl" is read together with "<stem>.summary.json".
PosteriorSample read_sample(const std::string& jsonl_path);
std::string summary_path_for(const std::string& jsonl_path);
std::string trace_path_for(const std::string& jsonl_path);
// Writes the draw file plus the summary and trace sidecars.
void write_sample(const std::string& jsonl_path, const PosteriorSample& sample, int chains = 1);

Json truth_to_json(const GroundTruth& truth);
GroundTruth truth_from_json(const Json& j);

Json theta_to_json(const ThetaDraw& theta);

std::string format_matrix_csv(const Matrix& m, const std::string& prefix);

}  // namespace mixgbn
