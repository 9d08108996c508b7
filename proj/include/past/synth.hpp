#pragma once

#include <cstdint>

#include "past/types.hpp"

namespace past {

// Gaussian identity blobs in raw space; target-domain samples additionally
// pass through a fixed random map (rotation, per-dimension scaling, bias)
// drawn once per seed.
struct SynthSpec {
  int source_identities = 20;
  int target_identities = 15;
  int samples_min = 20;  // training samples per identity (uniform in range)
  int samples_max = 20;
  int raw_dim = 16;
  double noise = 0.3;  // intra-identity standard deviation
  bool shift_rotate = true;
  double shift_scale = 2.0;  // per-dim scales log-uniform in [1/s, s]; 1 = none
  double shift_bias = 1.5;   // bias standard deviation; 0 = none
  int cameras = 3;
  int query_per_identity = 2;    // held-out target samples per identity
  int gallery_per_identity = 4;
  std::uint64_t seed = 1;

  void validate() const;
};

struct SynthData {
  Dataset source;
  Dataset target;   // training split, identities kept for logging only
  Dataset query;    // held-out target samples
  Dataset gallery;  // held-out target samples, disjoint from query
};

SynthData generate(const SynthSpec& spec);

}  // namespace past
