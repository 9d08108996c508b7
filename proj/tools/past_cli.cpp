#include <CLI11.hpp>
#include <cstdio>
#include <filesystem>
#include <string>
#include <vector>

#include "past/distance.hpp"
#include "past/errors.hpp"
#include "past/io.hpp"
#include "past/metrics.hpp"
#include "past/reranking.hpp"
#include "past/sweep.hpp"
#include "past/synth.hpp"
#include "past/trainer.hpp"

namespace {

struct CommonOpts {
  std::string config_path;
  std::string out_dir = ".";
  std::vector<std::string> overrides;  // key=value
  bool seed_given = false;
  std::uint64_t seed = 1;
};

void add_common(CLI::App* cmd, CommonOpts& opts) {
  cmd->add_option("--config", opts.config_path, "config file (key = value lines)");
  cmd->add_option("--out-dir", opts.out_dir, "output directory");
  cmd->add_option("--set", opts.overrides, "override a config key, e.g. --set adapt.lambda=1.0")
      ->take_all();
  cmd->add_option("--seed", opts.seed, "seed override for data generation and training")
      ->each([&opts](const std::string&) { opts.seed_given = true; });
}

past::Config resolve_config(const CommonOpts& opts) {
  past::Config config;
  if (!opts.config_path.empty()) config = past::load_config_file(opts.config_path);
  for (const std::string& item : opts.overrides) {
    const auto eq = item.find('=');
    if (eq == std::string::npos) throw past::IoError("--set expects key=value, got: " + item);
    config.set(item.substr(0, eq), item.substr(eq + 1));
  }
  if (opts.seed_given) {
    config.set("adapt.seed", std::to_string(opts.seed));
    config.set("synth.seed", std::to_string(opts.seed));
  }
  past::check_known_keys(config);
  return config;
}

std::string joined(const std::string& dir, const std::string& name) {
  return (std::filesystem::path(dir) / name).string();
}

void ensure_out_dir(const std::string& dir) {
  if (!dir.empty()) std::filesystem::create_directories(dir);
}

std::vector<int> parse_rank_list(const std::string& csv) {
  std::vector<int> ranks;
  std::size_t start = 0;
  while (start <= csv.size()) {
    const auto comma = csv.find(',', start);
    const std::string part = csv.substr(start, comma == std::string::npos ? csv.size() - start
                                                                          : comma - start);
    if (!part.empty()) ranks.push_back(std::stoi(part));
    if (comma == std::string::npos) break;
    start = comma + 1;
  }
  return ranks;
}

std::vector<double> parse_value_list(const std::string& csv) {
  std::vector<double> values;
  std::size_t start = 0;
  while (start <= csv.size()) {
    const auto comma = csv.find(',', start);
    const std::string part = csv.substr(start, comma == std::string::npos ? csv.size() - start
                                                                          : comma - start);
    if (!part.empty()) values.push_back(std::stod(part));
    if (comma == std::string::npos) break;
    start = comma + 1;
  }
  return values;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Self-training domain adaptation for embedding models"};
  app.require_subcommand(1);

  CommonOpts gen_opts, pre_opts, adapt_opts, eval_opts, rerank_opts, cluster_opts, sweep_opts;

  auto* gen = app.add_subcommand("gen-data", "generate a synthetic domain-shift benchmark");
  add_common(gen, gen_opts);

  auto* pre = app.add_subcommand("pretrain", "supervised pretraining on the labeled source set");
  add_common(pre, pre_opts);
  std::string pre_source;
  pre->add_option("--source", pre_source, "source dataset csv")->required();

  auto* adapt = app.add_subcommand("adapt", "self-training adaptation on the unlabeled target set");
  add_common(adapt, adapt_opts);
  std::string adapt_ckpt, adapt_target, adapt_query, adapt_gallery;
  adapt->add_option("--checkpoint", adapt_ckpt, "pretrained checkpoint")->required();
  adapt->add_option("--target", adapt_target, "target dataset csv")->required();
  adapt->add_option("--query", adapt_query, "query csv for per-iteration logging");
  adapt->add_option("--gallery", adapt_gallery, "gallery csv for per-iteration logging");

  auto* eval = app.add_subcommand("eval", "retrieval evaluation (CMC, mAP)");
  add_common(eval, eval_opts);
  std::string eval_ckpt, eval_query, eval_gallery, eval_ranks = "1,5,10";
  eval->add_option("--checkpoint", eval_ckpt)->required();
  eval->add_option("--query", eval_query)->required();
  eval->add_option("--gallery", eval_gallery)->required();
  eval->add_option("--ranks", eval_ranks, "comma-separated CMC ranks");

  auto* rerank = app.add_subcommand("rerank", "dump the Jaccard distance matrix for a feature csv");
  add_common(rerank, rerank_opts);
  std::string rerank_features;
  rerank->add_option("--features", rerank_features, "dataset csv")->required();

  auto* cluster = app.add_subcommand("cluster", "pseudo-label a feature csv");
  add_common(cluster, cluster_opts);
  std::string cluster_features;
  cluster->add_option("--features", cluster_features, "dataset csv")->required();

  auto* sweep = app.add_subcommand("sweep", "run one adaptation per hyperparameter value");
  add_common(sweep, sweep_opts);
  std::string sweep_param, sweep_values, sweep_ckpt, sweep_source, sweep_target, sweep_query,
      sweep_gallery;
  sweep->add_option("--param", sweep_param, "lambda, s_min or eta")->required();
  sweep->add_option("--values", sweep_values, "comma-separated values")->required();
  sweep->add_option("--checkpoint", sweep_ckpt, "pretrained checkpoint (else --source)");
  sweep->add_option("--source", sweep_source, "source csv to pretrain on when no checkpoint");
  sweep->add_option("--target", sweep_target)->required();
  sweep->add_option("--query", sweep_query)->required();
  sweep->add_option("--gallery", sweep_gallery)->required();

  CLI11_PARSE(app, argc, argv);

  try {
    if (gen->parsed()) {
      const past::Config config = resolve_config(gen_opts);
      const past::SynthSpec spec = past::make_synth_spec(config);
      const past::SynthData data = past::generate(spec);
      ensure_out_dir(gen_opts.out_dir);
      past::write_dataset_csv(joined(gen_opts.out_dir, "source.csv"), data.source);
      past::write_dataset_csv(joined(gen_opts.out_dir, "target.csv"), data.target);
      past::write_dataset_csv(joined(gen_opts.out_dir, "query.csv"), data.query);
      past::write_dataset_csv(joined(gen_opts.out_dir, "gallery.csv"), data.gallery);
      std::printf("wrote source/target/query/gallery csv to %s\n", gen_opts.out_dir.c_str());
    } else if (pre->parsed()) {
      const past::Config config = resolve_config(pre_opts);
      const past::AdaptConfig adapt_config = past::make_adapt_config(config);
      const past::Dataset source = past::read_dataset_csv(pre_source);
      const past::EmbedderParams params = past::pretrain_source(source, adapt_config);
      ensure_out_dir(pre_opts.out_dir);
      const std::string out = joined(pre_opts.out_dir, "model_pretrained.ckpt");
      past::save_checkpoint(out, params);
      std::printf("wrote %s\n", out.c_str());
    } else if (adapt->parsed()) {
      const past::Config config = resolve_config(adapt_opts);
      const past::AdaptConfig adapt_config = past::make_adapt_config(config);
      const past::EmbedderParams pretrained = past::load_checkpoint(adapt_ckpt);
      const past::Dataset target = past::read_dataset_csv(adapt_target);
      past::Dataset query, gallery;
      const bool with_eval = !adapt_query.empty() && !adapt_gallery.empty();
      if (with_eval) {
        query = past::read_dataset_csv(adapt_query);
        gallery = past::read_dataset_csv(adapt_gallery);
      }
      const past::AdaptResult result =
          past::run_past(pretrained, target, adapt_config, with_eval ? &query : nullptr,
                         with_eval ? &gallery : nullptr);
      ensure_out_dir(adapt_opts.out_dir);
      past::write_iterations_csv(joined(adapt_opts.out_dir, "iterations.csv"), result.logs);
      past::save_checkpoint(joined(adapt_opts.out_dir, "model_adapted.ckpt"), result.params);
      std::printf("wrote iterations.csv and model_adapted.ckpt to %s\n",
                  adapt_opts.out_dir.c_str());
    } else if (eval->parsed()) {
      resolve_config(eval_opts);
      const past::EmbedderParams params = past::load_checkpoint(eval_ckpt);
      const past::Dataset query = past::read_dataset_csv(eval_query);
      const past::Dataset gallery = past::read_dataset_csv(eval_gallery);
      const past::RetrievalResult result =
          past::evaluate(query, gallery, params, parse_rank_list(eval_ranks));
      ensure_out_dir(eval_opts.out_dir);
      const std::string out = joined(eval_opts.out_dir, "results.csv");
      past::write_results_csv(out, result);
      std::printf("wrote %s (map %.4f, skipped queries %d)\n", out.c_str(), result.map_score,
                  result.skipped_queries);
    } else if (rerank->parsed()) {
      const past::Config config = resolve_config(rerank_opts);
      const past::AdaptConfig adapt_config = past::make_adapt_config(config);
      const past::Dataset data = past::read_dataset_csv(rerank_features);
      const int n = data.size();
      const int k1 = std::min(adapt_config.k1, n - 1);
      const int k2 = std::min(adapt_config.k2, k1);
      const past::JaccardMatrix jaccard = past::jaccard_matrix(
          past::pairwise_euclidean(data.features), k1, k2, adapt_config.jaccard_blend);
      ensure_out_dir(rerank_opts.out_dir);
      const std::string out = joined(rerank_opts.out_dir, "jaccard.csv");
      past::write_jaccard_csv(out, jaccard);
      std::printf("wrote %s\n", out.c_str());
    } else if (cluster->parsed()) {
      const past::Config config = resolve_config(cluster_opts);
      const past::AdaptConfig adapt_config = past::make_adapt_config(config);
      const past::Dataset data = past::read_dataset_csv(cluster_features);
      const int n = data.size();
      past::PseudoLabeling labeling;
      if (adapt_config.clustering_method == past::ClusteringMethod::Kmeans) {
        const int k = adapt_config.kmeans_k > 0 ? adapt_config.kmeans_k : adapt_config.s_min;
        labeling = past::kmeans(data.features, std::min(k, n), adapt_config.seed);
      } else {
        const int k1 = std::min(adapt_config.k1, n - 1);
        const int k2 = std::min(adapt_config.k2, k1);
        const past::JaccardMatrix jaccard = past::jaccard_matrix(
            past::pairwise_euclidean(data.features), k1, k2, adapt_config.jaccard_blend);
        if (adapt_config.clustering_method == past::ClusteringMethod::Hdbscan) {
          labeling = past::hdbscan(jaccard.values, adapt_config.s_min);
        } else {
          const double eps =
              adapt_config.dbscan_eps > 0.0
                  ? adapt_config.dbscan_eps
                  : past::dbscan_eps_heuristic(past::ranking_matrix(jaccard), adapt_config.s_min);
          labeling = past::dbscan(jaccard.values, eps, adapt_config.s_min);
        }
      }
      ensure_out_dir(cluster_opts.out_dir);
      const std::string out = joined(cluster_opts.out_dir, "labels.csv");
      past::write_labels_csv(out, labeling);
      std::printf("wrote %s (%d clusters, %d selected of %d)\n", out.c_str(),
                  labeling.num_clusters, labeling.selected_count(), labeling.size());
    } else if (sweep->parsed()) {
      const past::Config config = resolve_config(sweep_opts);
      past::SweepSpec spec;
      spec.parameter = sweep_param;
      spec.values = parse_value_list(sweep_values);
      spec.base = past::make_adapt_config(config);
      const past::Dataset target = past::read_dataset_csv(sweep_target);
      const past::Dataset query = past::read_dataset_csv(sweep_query);
      const past::Dataset gallery = past::read_dataset_csv(sweep_gallery);
      past::EmbedderParams pretrained;
      if (!sweep_ckpt.empty()) {
        pretrained = past::load_checkpoint(sweep_ckpt);
      } else if (!sweep_source.empty()) {
        pretrained = past::pretrain_source(past::read_dataset_csv(sweep_source), spec.base);
      } else {
        throw past::InvalidSpec("sweep: give either --checkpoint or --source");
      }
      const std::vector<past::SweepRow> rows =
          past::run_sweep(spec, pretrained, target, query, gallery);
      ensure_out_dir(sweep_opts.out_dir);
      const std::string out = joined(sweep_opts.out_dir, "sweep_" + sweep_param + ".csv");
      past::write_sweep_csv(out, rows);
      std::printf("wrote %s (%zu rows)\n", out.c_str(), rows.size());
    }
  } catch (const past::Error& e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    return 1;
  } catch (const std::exception& e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    return 1;
  }
  return 0;
}
