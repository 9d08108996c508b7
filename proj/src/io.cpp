#include "past/io.hpp"

#include <algorithm>
#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <set>
#include <sstream>

#include "past/errors.hpp"

namespace past {

namespace {

std::vector<std::string> split(const std::string& line, char sep) {
  std::vector<std::string> out;
  std::string field;
  std::istringstream stream(line);
  while (std::getline(stream, field, sep)) out.push_back(field);
  if (!line.empty() && line.back() == sep) out.emplace_back();
  return out;
}

double parse_double(const std::string& s, const std::string& context) {
  char* end = nullptr;
  const double v = std::strtod(s.c_str(), &end);
  if (end == s.c_str() || *end != '\0') throw IoError("bad number '" + s + "' in " + context);
  return v;
}

long parse_long(const std::string& s, const std::string& context) {
  char* end = nullptr;
  const long v = std::strtol(s.c_str(), &end, 10);
  if (end == s.c_str() || *end != '\0') throw IoError("bad integer '" + s + "' in " + context);
  return v;
}

std::string trim(const std::string& s) {
  const auto begin = s.find_first_not_of(" \t\r\n");
  if (begin == std::string::npos) return "";
  const auto end = s.find_last_not_of(" \t\r\n");
  return s.substr(begin, end - begin + 1);
}

struct FileHandle {
  std::FILE* f;
  explicit FileHandle(const std::string& path) : f(std::fopen(path.c_str(), "w")) {
    if (!f) throw IoError("cannot open for writing: " + path);
  }
  ~FileHandle() {
    if (f) std::fclose(f);
  }
  FileHandle(const FileHandle&) = delete;
  FileHandle& operator=(const FileHandle&) = delete;
};

}  // namespace

void write_dataset_csv(const std::string& path, const Dataset& dataset) {
  dataset.validate();
  FileHandle out(path);
  std::fprintf(out.f, "id,identity,camera");
  for (int j = 0; j < dataset.dim(); ++j) std::fprintf(out.f, ",f%d", j);
  std::fputc('\n', out.f);
  for (int i = 0; i < dataset.size(); ++i) {
    const Sample& s = dataset.samples[i];
    std::fprintf(out.f, "%d,", s.id);
    if (s.identity) std::fprintf(out.f, "%d", *s.identity);
    std::fputc(',', out.f);
    if (s.camera) std::fprintf(out.f, "%d", *s.camera);
    for (int j = 0; j < dataset.dim(); ++j) std::fprintf(out.f, ",%.17g", dataset.features(i, j));
    std::fputc('\n', out.f);
  }
}

Dataset read_dataset_csv(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot open dataset: " + path);
  std::string line;
  if (!std::getline(in, line)) throw IoError("empty dataset file: " + path);
  const std::vector<std::string> header = split(trim(line), ',');
  if (header.size() < 4 || header[0] != "id" || header[1] != "identity" || header[2] != "camera")
    throw IoError("unexpected dataset header in " + path);
  const int dim = static_cast<int>(header.size()) - 3;

  struct Row {
    Sample sample;
    std::vector<double> values;
  };
  std::vector<Row> rows;
  while (std::getline(in, line)) {
    const std::string t = trim(line);
    if (t.empty()) continue;
    const std::vector<std::string> fields = split(t, ',');
    if (static_cast<int>(fields.size()) != dim + 3)
      throw IoError("row with " + std::to_string(fields.size()) + " fields in " + path);
    Row row;
    row.sample.id = static_cast<int>(parse_long(fields[0], path));
    if (!fields[1].empty()) row.sample.identity = static_cast<int>(parse_long(fields[1], path));
    if (!fields[2].empty()) row.sample.camera = static_cast<int>(parse_long(fields[2], path));
    row.values.reserve(dim);
    for (int j = 0; j < dim; ++j) row.values.push_back(parse_double(fields[3 + j], path));
    rows.push_back(std::move(row));
  }

  std::sort(rows.begin(), rows.end(),
            [](const Row& a, const Row& b) { return a.sample.id < b.sample.id; });
  Dataset dataset;
  dataset.features.resize(static_cast<Eigen::Index>(rows.size()), dim);
  for (std::size_t i = 0; i < rows.size(); ++i) {
    dataset.samples.push_back(rows[i].sample);
    for (int j = 0; j < dim; ++j) dataset.features(static_cast<Eigen::Index>(i), j) = rows[i].values[j];
  }
  dataset.validate();
  return dataset;
}

void write_labels_csv(const std::string& path, const PseudoLabeling& labeling) {
  FileHandle out(path);
  std::fprintf(out.f, "id,pseudo_label\n");
  for (int i = 0; i < labeling.size(); ++i)
    std::fprintf(out.f, "%d,%d\n", i, labeling.labels(i));
}

void write_jaccard_csv(const std::string& path, const JaccardMatrix& jaccard) {
  FileHandle out(path);
  std::fprintf(out.f, "i,j,value\n");
  for (int i = 0; i < jaccard.size(); ++i)
    for (int j = i + 1; j < jaccard.size(); ++j)
      std::fprintf(out.f, "%d,%d,%.17g\n", i, j, jaccard.values(i, j));
}

void write_iterations_csv(const std::string& path, const std::vector<IterationLog>& logs) {
  FileHandle out(path);
  std::fprintf(out.f,
               "iteration,clusters,selected,selection_ratio,label_accuracy,rank1,map,"
               "conservative_loss,promoting_loss\n");
  for (const auto& log : logs) {
    std::fprintf(out.f, "%d,%d,%d,", log.iteration, log.num_clusters, log.selected);
    if (log.has_label_accuracy)
      std::fprintf(out.f, "%.10g,%.10g,", log.selection_ratio, log.label_accuracy);
    else
      std::fprintf(out.f, ",,");
    if (log.has_eval)
      std::fprintf(out.f, "%.10g,%.10g,", log.rank1, log.map_score);
    else
      std::fprintf(out.f, ",,");
    std::fprintf(out.f, "%.10g,%.10g\n", log.conservative_loss_mean, log.promoting_loss_mean);
  }
}

void write_results_csv(const std::string& path, const RetrievalResult& result) {
  FileHandle out(path);
  std::fprintf(out.f, "metric,rank,value\n");
  for (const auto& [rank, value] : result.cmc) std::fprintf(out.f, "cmc,%d,%.10g\n", rank, value);
  std::fprintf(out.f, "map,,%.10g\n", result.map_score);
}

std::string Config::get_str(const std::string& key, const std::string& fallback) const {
  const auto it = values.find(key);
  return it == values.end() ? fallback : it->second;
}

double Config::get_double(const std::string& key, double fallback) const {
  const auto it = values.find(key);
  return it == values.end() ? fallback : parse_double(it->second, "config key " + key);
}

int Config::get_int(const std::string& key, int fallback) const {
  const auto it = values.find(key);
  return it == values.end() ? fallback : static_cast<int>(parse_long(it->second, "config key " + key));
}

std::uint64_t Config::get_u64(const std::string& key, std::uint64_t fallback) const {
  const auto it = values.find(key);
  if (it == values.end()) return fallback;
  return static_cast<std::uint64_t>(std::strtoull(it->second.c_str(), nullptr, 10));
}

Config load_config_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot open config: " + path);
  Config config;
  std::string line;
  int line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    const auto hash = line.find('#');
    if (hash != std::string::npos) line = line.substr(0, hash);
    line = trim(line);
    if (line.empty()) continue;
    const auto eq = line.find('=');
    if (eq == std::string::npos)
      throw IoError(path + ":" + std::to_string(line_no) + ": expected key = value");
    const std::string key = trim(line.substr(0, eq));
    const std::string value = trim(line.substr(eq + 1));
    if (key.empty()) throw IoError(path + ":" + std::to_string(line_no) + ": empty key");
    config.values[key] = value;
  }
  return config;
}

namespace {

const std::set<std::string>& known_keys() {
  static const std::set<std::string> keys = {
      "adapt.margin", "adapt.lambda", "adapt.eta", "adapt.s_min", "adapt.p", "adapt.k",
      "adapt.i_max", "adapt.epochs_conservative", "adapt.epochs_promoting", "adapt.k1", "adapt.k2",
      "adapt.jaccard_blend", "adapt.clustering_method", "adapt.dbscan_eps", "adapt.kmeans_k",
      "adapt.seed", "lr.conservative_backbone", "lr.conservative_embedding",
      "lr.promoting_classifier", "lr.promoting_other", "lr.decay_after", "lr.decay_factor",
      "model.hidden", "model.embedding_dim", "pretrain.epochs", "pretrain.lr_classifier",
      "pretrain.lr_model", "synth.source_identities", "synth.target_identities",
      "synth.samples_min", "synth.samples_max", "synth.raw_dim", "synth.noise",
      "synth.shift_rotate", "synth.shift_scale", "synth.shift_bias", "synth.cameras",
      "synth.query_per_identity", "synth.gallery_per_identity", "synth.seed"};
  return keys;
}

}  // namespace

void check_known_keys(const Config& config) {
  for (const auto& [key, value] : config.values)
    if (!known_keys().count(key)) throw IoError("unknown config key: " + key);
}

AdaptConfig make_adapt_config(const Config& config) {
  AdaptConfig out;
  out.margin = config.get_double("adapt.margin", out.margin);
  out.lambda = config.get_double("adapt.lambda", out.lambda);
  out.eta = config.get_int("adapt.eta", out.eta);
  out.s_min = config.get_int("adapt.s_min", out.s_min);
  out.batch_p = config.get_int("adapt.p", out.batch_p);
  out.batch_k = config.get_int("adapt.k", out.batch_k);
  out.max_iterations = config.get_int("adapt.i_max", out.max_iterations);
  out.epochs_conservative = config.get_int("adapt.epochs_conservative", out.epochs_conservative);
  out.epochs_promoting = config.get_int("adapt.epochs_promoting", out.epochs_promoting);
  out.k1 = config.get_int("adapt.k1", out.k1);
  out.k2 = config.get_int("adapt.k2", out.k2);
  out.jaccard_blend = config.get_double("adapt.jaccard_blend", out.jaccard_blend);
  out.clustering_method =
      clustering_method_from_string(config.get_str("adapt.clustering_method", "hdbscan"));
  out.dbscan_eps = config.get_double("adapt.dbscan_eps", out.dbscan_eps);
  out.kmeans_k = config.get_int("adapt.kmeans_k", out.kmeans_k);
  out.seed = config.get_u64("adapt.seed", out.seed);
  out.lr.conservative_backbone =
      config.get_double("lr.conservative_backbone", out.lr.conservative_backbone);
  out.lr.conservative_embedding =
      config.get_double("lr.conservative_embedding", out.lr.conservative_embedding);
  out.lr.promoting_classifier =
      config.get_double("lr.promoting_classifier", out.lr.promoting_classifier);
  out.lr.promoting_other = config.get_double("lr.promoting_other", out.lr.promoting_other);
  out.lr.decay_after = config.get_int("lr.decay_after", out.lr.decay_after);
  out.lr.decay_factor = config.get_double("lr.decay_factor", out.lr.decay_factor);
  const std::string hidden = config.get_str("model.hidden", "");
  if (!hidden.empty()) {
    out.model.hidden.clear();
    for (const std::string& part : split(hidden, ':'))
      out.model.hidden.push_back(static_cast<int>(parse_long(trim(part), "model.hidden")));
  }
  out.model.embedding_dim = config.get_int("model.embedding_dim", out.model.embedding_dim);
  out.pretrain_epochs = config.get_int("pretrain.epochs", out.pretrain_epochs);
  out.pretrain_lr_classifier =
      config.get_double("pretrain.lr_classifier", out.pretrain_lr_classifier);
  out.pretrain_lr_model = config.get_double("pretrain.lr_model", out.pretrain_lr_model);
  return out;
}

SynthSpec make_synth_spec(const Config& config) {
  SynthSpec out;
  out.source_identities = config.get_int("synth.source_identities", out.source_identities);
  out.target_identities = config.get_int("synth.target_identities", out.target_identities);
  out.samples_min = config.get_int("synth.samples_min", out.samples_min);
  out.samples_max = config.get_int("synth.samples_max", out.samples_max);
  out.raw_dim = config.get_int("synth.raw_dim", out.raw_dim);
  out.noise = config.get_double("synth.noise", out.noise);
  out.shift_rotate = config.get_int("synth.shift_rotate", out.shift_rotate ? 1 : 0) != 0;
  out.shift_scale = config.get_double("synth.shift_scale", out.shift_scale);
  out.shift_bias = config.get_double("synth.shift_bias", out.shift_bias);
  out.cameras = config.get_int("synth.cameras", out.cameras);
  out.query_per_identity = config.get_int("synth.query_per_identity", out.query_per_identity);
  out.gallery_per_identity = config.get_int("synth.gallery_per_identity", out.gallery_per_identity);
  out.seed = config.get_u64("synth.seed", out.seed);
  return out;
}

}  // namespace past
