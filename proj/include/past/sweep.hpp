#pragma once

#include <string>
#include <vector>

#include "past/trainer.hpp"

namespace past {

// Hyperparameter sweep: one full adaptation run per value, all runs sharing
// the same seed so results stay comparable.
struct SweepSpec {
  std::string parameter;  // lambda, s_min or eta
  std::vector<double> values;
  AdaptConfig base;

  void validate() const;
};

struct SweepRow {
  double value = 0.0;
  double rank1 = 0.0;
  double map_score = 0.0;
  int clusters = 0;  // cluster count of the final iteration
};

std::vector<SweepRow> run_sweep(const SweepSpec& sweep, const EmbedderParams& pretrained,
                                const Dataset& target, const Dataset& query,
                                const Dataset& gallery);

void write_sweep_csv(const std::string& path, const std::vector<SweepRow>& rows);

}  // namespace past
