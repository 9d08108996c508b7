#include "past/sweep.hpp"

#include <cmath>
#include <cstdio>

#include "past/errors.hpp"
#include "past/metrics.hpp"

namespace past {

void SweepSpec::validate() const {
  if (parameter != "lambda" && parameter != "s_min" && parameter != "eta")
    throw InvalidSpec("sweep: parameter must be one of lambda, s_min, eta");
  if (values.empty()) throw InvalidSpec("sweep: empty value list");
}

std::vector<SweepRow> run_sweep(const SweepSpec& sweep, const EmbedderParams& pretrained,
                                const Dataset& target, const Dataset& query,
                                const Dataset& gallery) {
  sweep.validate();
  std::vector<SweepRow> rows;
  for (double value : sweep.values) {
    AdaptConfig config = sweep.base;
    if (sweep.parameter == "lambda") {
      config.lambda = value;
    } else if (sweep.parameter == "s_min") {
      config.s_min = static_cast<int>(std::lround(value));
    } else {
      config.eta = static_cast<int>(std::lround(value));
    }
    const AdaptResult run = run_past(pretrained, target, config, &query, &gallery);
    SweepRow row;
    row.value = value;
    if (!run.logs.empty()) row.clusters = run.logs.back().num_clusters;
    const RetrievalResult eval = evaluate(query, gallery, run.params, {1, 5, 10});
    row.rank1 = eval.rank1();
    row.map_score = eval.map_score;
    rows.push_back(row);
  }
  return rows;
}

void write_sweep_csv(const std::string& path, const std::vector<SweepRow>& rows) {
  std::FILE* f = std::fopen(path.c_str(), "w");
  if (!f) throw IoError("cannot open for writing: " + path);
  std::fprintf(f, "value,rank1,map,clusters\n");
  for (const auto& row : rows)
    std::fprintf(f, "%.10g,%.10g,%.10g,%d\n", row.value, row.rank1, row.map_score, row.clusters);
  std::fclose(f);
}

}  // namespace past
