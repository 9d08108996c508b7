#pragma once

#include <map>
#include <string>
#include <vector>

#include "past/clustering.hpp"
#include "past/metrics.hpp"
#include "past/reranking.hpp"
#include "past/synth.hpp"
#include "past/trainer.hpp"
#include "past/types.hpp"

namespace past {

// Dataset CSV: header id,identity,camera,f0,...,f{d-1}; identity and camera
// are empty when absent; features round-trip exactly.
void write_dataset_csv(const std::string& path, const Dataset& dataset);
Dataset read_dataset_csv(const std::string& path);

// id,pseudo_label
void write_labels_csv(const std::string& path, const PseudoLabeling& labeling);

// i,j,value for the strict upper triangle
void write_jaccard_csv(const std::string& path, const JaccardMatrix& jaccard);

void write_iterations_csv(const std::string& path, const std::vector<IterationLog>& logs);

// metric,rank,value rows: one cmc row per requested rank plus a map row
void write_results_csv(const std::string& path, const RetrievalResult& result);

// Flat `key = value` configuration with section-prefixed keys
// (e.g. adapt.lambda = 0.5). '#' starts a comment.
struct Config {
  std::map<std::string, std::string> values;

  bool has(const std::string& key) const { return values.count(key) > 0; }
  void set(const std::string& key, const std::string& value) { values[key] = value; }

  std::string get_str(const std::string& key, const std::string& fallback) const;
  double get_double(const std::string& key, double fallback) const;
  int get_int(const std::string& key, int fallback) const;
  std::uint64_t get_u64(const std::string& key, std::uint64_t fallback) const;
};

Config load_config_file(const std::string& path);

// Typed views over a Config; unknown keys are rejected to catch typos.
AdaptConfig make_adapt_config(const Config& config);
SynthSpec make_synth_spec(const Config& config);
void check_known_keys(const Config& config);

}  // namespace past
