#include <doctest.h>

#include <algorithm>
#include <fstream>
#include <limits>
#include <sstream>
#include <vector>

#include "past/clustering.hpp"
#include "past/distance.hpp"
#include "past/rng.hpp"
#include "test_util.hpp"

using past::Matrix;

namespace {

Matrix load_matrix_csv(const std::string& path) {
  std::ifstream in(path);
  REQUIRE(in.good());
  std::vector<std::vector<double>> rows;
  std::string line;
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    std::vector<double> row;
    std::istringstream stream(line);
    std::string field;
    while (std::getline(stream, field, ',')) row.push_back(std::stod(field));
    rows.push_back(std::move(row));
  }
  Matrix m(rows.size(), rows[0].size());
  for (std::size_t i = 0; i < rows.size(); ++i)
    for (std::size_t j = 0; j < rows[i].size(); ++j) m(i, j) = rows[i][j];
  return m;
}

past::IntVector load_labels_csv(const std::string& path) {
  std::ifstream in(path);
  REQUIRE(in.good());
  std::string line;
  std::getline(in, line);  // header
  std::vector<int> labels;
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    const auto comma = line.find(',');
    labels.push_back(std::stoi(line.substr(comma + 1)));
  }
  past::IntVector out(labels.size());
  for (std::size_t i = 0; i < labels.size(); ++i) out(static_cast<Eigen::Index>(i)) = labels[i];
  return out;
}

// --- brute-force oracle -----------------------------------------------------
// Naive single-linkage agglomeration over mutual reachability, then cluster
// stabilities straight from the definition: every point contributes
// (lambda at which it leaves the cluster) - (lambda at the cluster's birth).

struct NaiveMerge {
  int left, right;
  double dist;
  int size;
};

Matrix mutual_reachability(const Matrix& dist, int s_min) {
  const int n = static_cast<int>(dist.rows());
  past::Vector core(n);
  for (int i = 0; i < n; ++i) {
    std::vector<double> row;
    for (int j = 0; j < n; ++j) row.push_back(dist(i, j));
    std::sort(row.begin(), row.end());
    core(i) = row[s_min - 1];
  }
  Matrix mr(n, n);
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j)
      mr(i, j) = i == j ? 0.0 : std::max({core(i), core(j), dist(i, j)});
  return mr;
}

std::vector<NaiveMerge> naive_single_linkage(const Matrix& mr) {
  const int n = static_cast<int>(mr.rows());
  struct Group {
    int node;
    std::vector<int> points;
  };
  std::vector<Group> groups;
  for (int i = 0; i < n; ++i) groups.push_back({i, {i}});

  std::vector<NaiveMerge> merges;
  int next_node = n;
  while (groups.size() > 1) {
    double best = std::numeric_limits<double>::infinity();
    std::size_t ba = 0, bb = 1;
    for (std::size_t a = 0; a < groups.size(); ++a)
      for (std::size_t b = a + 1; b < groups.size(); ++b) {
        double link = std::numeric_limits<double>::infinity();
        for (int p : groups[a].points)
          for (int q : groups[b].points) link = std::min(link, mr(p, q));
        if (link < best) {
          best = link;
          ba = a;
          bb = b;
        }
      }
    NaiveMerge merge;
    merge.left = std::min(groups[ba].node, groups[bb].node);
    merge.right = std::max(groups[ba].node, groups[bb].node);
    merge.dist = best;
    merge.size = static_cast<int>(groups[ba].points.size() + groups[bb].points.size());
    groups[ba].points.insert(groups[ba].points.end(), groups[bb].points.begin(),
                             groups[bb].points.end());
    groups[ba].node = next_node++;
    groups.erase(groups.begin() + static_cast<std::ptrdiff_t>(bb));
    merges.push_back(merge);
  }
  return merges;
}

std::vector<double> naive_stabilities(const std::vector<NaiveMerge>& merges, int n, int m) {
  auto node_size = [&](int node) { return node < n ? 1 : merges[node - n].size; };
  auto lam = [](double d) { return d > 0.0 ? 1.0 / d : std::numeric_limits<double>::infinity(); };

  std::vector<double> out;
  if (merges.empty()) return out;
  std::vector<std::pair<int, double>> stack{{n + static_cast<int>(merges.size()) - 1, 0.0}};
  while (!stack.empty()) {
    auto [v, birth] = stack.back();
    stack.pop_back();
    double total = 0.0;
    while (true) {
      const NaiveMerge& merge = merges[v - n];
      const double l = lam(merge.dist);
      const int sl = node_size(merge.left), sr = node_size(merge.right);
      if (sl >= m && sr >= m) {
        total += node_size(v) * (l - birth);  // true split: everyone leaves
        stack.push_back({merge.left, l});
        stack.push_back({merge.right, l});
        break;
      } else if (sl >= m) {
        total += sr * (l - birth);
        v = merge.left;
      } else if (sr >= m) {
        total += sl * (l - birth);
        v = merge.right;
      } else {
        total += node_size(v) * (l - birth);  // cluster dissolves
        break;
      }
    }
    out.push_back(total);
  }
  std::sort(out.begin(), out.end());
  return out;
}

}  // namespace

TEST_CASE("hdbscan reproduces the frozen two-blob reference labels") {
  const Matrix dist = load_matrix_csv(std::string(TEST_DATA_DIR) + "/hdbscan_two_blobs_dist.csv");
  const past::IntVector expected =
      load_labels_csv(std::string(TEST_DATA_DIR) + "/hdbscan_two_blobs_labels.csv");
  const past::PseudoLabeling got = past::hdbscan(dist, 5);
  CHECK(got.num_clusters == 2);
  CHECK(test_util::same_partition(got.labels, expected));
  for (int i = 0; i < got.size(); ++i) CHECK(got.labels(i) >= 0);  // zero noise
}

TEST_CASE("hdbscan reproduces the frozen three-blob reference labels") {
  const Matrix dist = load_matrix_csv(std::string(TEST_DATA_DIR) + "/hdbscan_three_blobs_dist.csv");
  const past::IntVector expected =
      load_labels_csv(std::string(TEST_DATA_DIR) + "/hdbscan_three_blobs_labels.csv");
  const past::PseudoLabeling got = past::hdbscan(dist, 5);
  CHECK(got.num_clusters == 3);
  CHECK(test_util::same_partition(got.labels, expected));
}

TEST_CASE("hdbscan finds two clean blobs with zero noise") {
  past::Rng rng(61);
  const Matrix dist = past::pairwise_euclidean(test_util::two_blob_points(20, rng));
  const past::PseudoLabeling got = past::hdbscan(dist, 5);
  CHECK(got.num_clusters == 2);
  for (int i = 0; i < 20; ++i) {
    CHECK(got.labels(i) == got.labels(0));
    CHECK(got.labels(20 + i) == got.labels(20));
  }
  CHECK(got.labels(0) != got.labels(20));
}

TEST_CASE("hdbscan labels everything noise when N < s_min") {
  past::Rng rng(67);
  const Matrix dist = past::pairwise_euclidean(test_util::random_matrix(4, 2, rng));
  const past::PseudoLabeling got = past::hdbscan(dist, 5);
  CHECK(got.num_clusters == 0);
  for (int i = 0; i < 4; ++i) CHECK(got.labels(i) == -1);
}

TEST_CASE("hdbscan rejects s_min < 2") {
  const Matrix dist = Matrix::Zero(3, 3);
  CHECK_THROWS_AS(past::hdbscan(dist, 1), past::InvalidMinSamples);
}

TEST_CASE("hdbscan condensed stabilities match the brute-force dendrogram oracle") {
  past::Rng rng(71);
  for (int trial = 0; trial < 8; ++trial) {
    const int n = 12;
    const int m = 3;
    Matrix pts = test_util::random_matrix(n, 2, rng);
    if (trial % 2 == 1) {
      // two loose groups so that true splits occur
      for (int i = 0; i < n / 2; ++i) pts(i, 0) += 6.0;
    }
    const Matrix dist = past::pairwise_euclidean(pts);
    const past::HdbscanResult result = past::hdbscan_full(dist, m);

    const Matrix mr = mutual_reachability(dist, m);
    const std::vector<NaiveMerge> naive = naive_single_linkage(mr);
    REQUIRE(naive.size() == result.dendrogram.size());
    // same single-linkage merge heights
    for (std::size_t i = 0; i < naive.size(); ++i)
      CHECK(std::abs(naive[i].dist - result.dendrogram[i].distance) < 1e-12);

    std::vector<double> expected = naive_stabilities(naive, n, m);
    std::vector<double> got;
    for (const auto& c : result.clusters) got.push_back(c.stability);
    std::sort(got.begin(), got.end());
    REQUIRE(got.size() == expected.size());
    for (std::size_t i = 0; i < got.size(); ++i) CHECK(std::abs(got[i] - expected[i]) < 1e-9);
  }
}

TEST_CASE("hdbscan is deterministic") {
  past::Rng rng(73);
  const Matrix dist = past::pairwise_euclidean(test_util::random_matrix(30, 3, rng));
  const past::PseudoLabeling a = past::hdbscan(dist, 3);
  const past::PseudoLabeling b = past::hdbscan(dist, 3);
  CHECK(a.num_clusters == b.num_clusters);
  for (int i = 0; i < a.size(); ++i) CHECK(a.labels(i) == b.labels(i));
}

TEST_CASE("hdbscan clusters meet the minimum size") {
  past::Rng rng(79);
  for (int trial = 0; trial < 5; ++trial) {
    const Matrix dist = past::pairwise_euclidean(test_util::two_blob_points(12, rng, 0.5, 6.0));
    const past::PseudoLabeling got = past::hdbscan(dist, 4);
    std::vector<int> counts(std::max(1, got.num_clusters), 0);
    for (int i = 0; i < got.size(); ++i)
      if (got.labels(i) >= 0) ++counts[got.labels(i)];
    for (int c = 0; c < got.num_clusters; ++c) CHECK(counts[c] >= 4);
  }
}

TEST_CASE("hdbscan is invariant under sample permutation") {
  past::Rng rng(83);
  const Matrix dist = past::pairwise_euclidean(test_util::two_blob_points(10, rng, 0.6, 5.0));
  const int n = static_cast<int>(dist.rows());
  std::vector<int> perm(n);
  for (int i = 0; i < n; ++i) perm[i] = i;
  rng.shuffle(perm);

  Matrix permuted(n, n);
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j) permuted(i, j) = dist(perm[i], perm[j]);

  const past::PseudoLabeling base = past::hdbscan(dist, 4);
  const past::PseudoLabeling shuffled = past::hdbscan(permuted, 4);
  past::IntVector base_on_perm(n);
  for (int i = 0; i < n; ++i) base_on_perm(i) = base.labels(perm[i]);
  CHECK(test_util::same_partition(shuffled.labels, base_on_perm));
}
