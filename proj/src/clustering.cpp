#include "past/clustering.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <queue>

#include "past/errors.hpp"
#include "past/reranking.hpp"
#include "past/rng.hpp"

namespace past {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

double to_lambda(double distance) { return distance > 0.0 ? 1.0 / distance : kInf; }

// Prim's algorithm on the dense mutual-reachability graph.
std::vector<HdbscanResult::Merge> mutual_reachability_mst(const DistanceMatrix& dist,
                                                          const Vector& core) {
  const int n = static_cast<int>(dist.rows());
  struct Edge {
    int u, v;
    double w;
  };
  std::vector<Edge> edges;
  edges.reserve(n > 0 ? n - 1 : 0);

  std::vector<bool> in_tree(n, false);
  std::vector<double> best(n, kInf);
  std::vector<int> best_from(n, -1);
  in_tree[0] = true;
  for (int v = 1; v < n; ++v) {
    best[v] = std::max({core(0), core(v), dist(0, v)});
    best_from[v] = 0;
  }
  for (int step = 1; step < n; ++step) {
    int pick = -1;
    for (int v = 0; v < n; ++v) {
      if (!in_tree[v] && (pick < 0 || best[v] < best[pick])) pick = v;
    }
    in_tree[pick] = true;
    edges.push_back({best_from[pick], pick, best[pick]});
    for (int v = 0; v < n; ++v) {
      if (in_tree[v]) continue;
      const double w = std::max({core(pick), core(v), dist(pick, v)});
      if (w < best[v]) {
        best[v] = w;
        best_from[v] = pick;
      }
    }
  }
  std::sort(edges.begin(), edges.end(), [](const Edge& a, const Edge& b) {
    if (a.w != b.w) return a.w < b.w;
    const int au = std::min(a.u, a.v), av = std::max(a.u, a.v);
    const int bu = std::min(b.u, b.v), bv = std::max(b.u, b.v);
    return au != bu ? au < bu : av < bv;
  });

  // Union-find over dendrogram node ids; merge j creates node n + j.
  std::vector<int> parent(2 * n - 1);
  std::iota(parent.begin(), parent.end(), 0);
  auto find = [&](int x) {
    while (parent[x] != x) {
      parent[x] = parent[parent[x]];
      x = parent[x];
    }
    return x;
  };
  std::vector<int> sizes(2 * n - 1, 1);
  std::vector<HdbscanResult::Merge> merges;
  merges.reserve(edges.size());
  for (std::size_t j = 0; j < edges.size(); ++j) {
    const int node = n + static_cast<int>(j);
    int ra = find(edges[j].u);
    int rb = find(edges[j].v);
    if (ra > rb) std::swap(ra, rb);
    sizes[node] = sizes[ra] + sizes[rb];
    parent[ra] = node;
    parent[rb] = node;
    merges.push_back({ra, rb, edges[j].w, sizes[node]});
  }
  return merges;
}

struct CondenseOutput {
  std::vector<HdbscanResult::CondensedEdge> edges;
  std::vector<HdbscanResult::ClusterInfo> clusters;
};

// Walk the dendrogram top-down. A side of a split survives as a cluster only
// if it still holds >= min_size points; smaller sides shed their points at
// the split's lambda.
CondenseOutput condense_tree(const std::vector<HdbscanResult::Merge>& merges, int n, int min_size) {
  CondenseOutput out;
  if (merges.empty()) return out;

  auto node_size = [&](int node) { return node < n ? 1 : merges[node - n].size; };
  auto collect_leaves = [&](int node, std::vector<int>& leaves) {
    std::vector<int> stack{node};
    while (!stack.empty()) {
      const int v = stack.back();
      stack.pop_back();
      if (v < n) {
        leaves.push_back(v);
      } else {
        stack.push_back(merges[v - n].left);
        stack.push_back(merges[v - n].right);
      }
    }
    std::sort(leaves.begin(), leaves.end());
  };

  const int root_node = n + static_cast<int>(merges.size()) - 1;
  out.clusters.push_back({0, -1, root_node, 0.0, 0.0, false});

  struct Item {
    int node;
    int cluster;
  };
  std::vector<Item> stack{{root_node, 0}};
  while (!stack.empty()) {
    const Item item = stack.back();
    stack.pop_back();
    const auto& merge = merges[item.node - n];
    const double lambda = to_lambda(merge.distance);
    const int left = merge.left, right = merge.right;
    const int ls = node_size(left), rs = node_size(right);

    const bool left_big = ls >= min_size;
    const bool right_big = rs >= min_size;
    if (left_big && right_big) {
      // true split: both sides become new clusters
      for (int child_node : {left, right}) {
        const int child_id = static_cast<int>(out.clusters.size());
        out.clusters.push_back({child_id, item.cluster, child_node, lambda, 0.0, false});
        out.edges.push_back({item.cluster, child_id, false, lambda, node_size(child_node)});
        if (child_node >= n) stack.push_back({child_node, child_id});
      }
    } else if (left_big || right_big) {
      const int keep = left_big ? left : right;
      const int shed = left_big ? right : left;
      std::vector<int> leaves;
      collect_leaves(shed, leaves);
      for (int p : leaves) out.edges.push_back({item.cluster, p, true, lambda, 1});
      stack.push_back({keep, item.cluster});
    } else {
      // cluster dissolves entirely
      std::vector<int> leaves;
      collect_leaves(item.node, leaves);
      for (int p : leaves) out.edges.push_back({item.cluster, p, true, lambda, 1});
    }
  }
  return out;
}

void compute_stabilities(CondenseOutput& ct) {
  for (const auto& e : ct.edges) {
    auto& c = ct.clusters[e.parent];
    c.stability += (e.lambda - c.birth_lambda) * e.size;
  }
}

// Excess-of-mass cluster extraction. The root is never a candidate.
void select_clusters_eom(CondenseOutput& ct) {
  const int m = static_cast<int>(ct.clusters.size());
  std::vector<std::vector<int>> children(m);
  for (const auto& c : ct.clusters)
    if (c.parent >= 0) children[c.parent].push_back(c.id);

  std::vector<double> score(m, 0.0);
  for (int c = m - 1; c >= 1; --c) {
    if (children[c].empty()) {
      score[c] = ct.clusters[c].stability;
      ct.clusters[c].selected = true;
      continue;
    }
    double subtree = 0.0;
    for (int ch : children[c]) subtree += score[ch];
    if (subtree > ct.clusters[c].stability) {
      score[c] = subtree;
      ct.clusters[c].selected = false;
    } else {
      score[c] = ct.clusters[c].stability;
      ct.clusters[c].selected = true;
      std::vector<int> stack = children[c];
      while (!stack.empty()) {
        const int d = stack.back();
        stack.pop_back();
        ct.clusters[d].selected = false;
        stack.insert(stack.end(), children[d].begin(), children[d].end());
      }
    }
  }
}

PseudoLabeling label_points(const CondenseOutput& ct, int n) {
  PseudoLabeling labeling;
  labeling.labels = IntVector::Constant(n, -1);

  std::vector<int> dense_label(ct.clusters.size(), -1);
  int next = 0;
  for (const auto& c : ct.clusters)
    if (c.selected) dense_label[c.id] = next++;
  labeling.num_clusters = next;

  for (const auto& e : ct.edges) {
    if (!e.child_is_point) continue;
    // nearest selected ancestor, if any
    for (int c = e.parent; c >= 0; c = ct.clusters[c].parent) {
      if (ct.clusters[c].selected) {
        labeling.labels(e.child) = dense_label[c];
        break;
      }
    }
  }
  return labeling;
}

}  // namespace

HdbscanResult hdbscan_full(const DistanceMatrix& dist, int s_min) {
  if (s_min < 2) throw InvalidMinSamples("hdbscan: s_min must be >= 2");
  const int n = static_cast<int>(dist.rows());

  HdbscanResult result;
  result.labeling.labels = IntVector::Constant(n, -1);
  result.labeling.num_clusters = 0;
  if (n < 1) return result;

  result.core_distances = Vector::Zero(n);
  if (n < s_min) return result;  // no cluster can reach the minimum size

  for (int i = 0; i < n; ++i) {
    std::vector<double> row(n);
    for (int j = 0; j < n; ++j) row[j] = dist(i, j);
    std::nth_element(row.begin(), row.begin() + (s_min - 1), row.end());
    result.core_distances(i) = row[s_min - 1];
  }

  result.dendrogram = mutual_reachability_mst(dist, result.core_distances);
  CondenseOutput ct = condense_tree(result.dendrogram, n, s_min);
  compute_stabilities(ct);
  select_clusters_eom(ct);
  result.labeling = label_points(ct, n);
  result.condensed = std::move(ct.edges);
  result.clusters = std::move(ct.clusters);
  return result;
}

PseudoLabeling hdbscan(const DistanceMatrix& dist, int s_min) {
  return hdbscan_full(dist, s_min).labeling;
}

PseudoLabeling dbscan(const DistanceMatrix& dist, double eps, int min_samples) {
  if (!(eps > 0.0)) throw InvalidEps("dbscan: eps must be > 0");
  if (min_samples < 1) throw InvalidMinSamples("dbscan: min_samples must be >= 1");
  const int n = static_cast<int>(dist.rows());

  auto neighbors = [&](int i) {
    std::vector<int> out;
    for (int j = 0; j < n; ++j)
      if (dist(i, j) <= eps) out.push_back(j);
    return out;
  };

  constexpr int kUnvisited = -2;
  PseudoLabeling labeling;
  labeling.labels = IntVector::Constant(n, kUnvisited);

  int next_cluster = 0;
  for (int i = 0; i < n; ++i) {
    if (labeling.labels(i) != kUnvisited) continue;
    std::vector<int> nbrs = neighbors(i);
    if (static_cast<int>(nbrs.size()) < min_samples) {
      labeling.labels(i) = -1;
      continue;
    }
    const int cluster = next_cluster++;
    labeling.labels(i) = cluster;
    std::queue<int> frontier;
    for (int j : nbrs) frontier.push(j);
    while (!frontier.empty()) {
      const int j = frontier.front();
      frontier.pop();
      if (labeling.labels(j) == -1) labeling.labels(j) = cluster;  // border point
      if (labeling.labels(j) != kUnvisited) continue;
      labeling.labels(j) = cluster;
      std::vector<int> jn = neighbors(j);
      if (static_cast<int>(jn.size()) >= min_samples) {
        for (int q : jn) frontier.push(q);
      }
    }
  }
  labeling.num_clusters = next_cluster;
  return labeling;
}

static KmeansResult kmeans_impl(const FeatureMatrix& features, int k, std::uint64_t seed) {
  const int n = static_cast<int>(features.rows());
  const int d = static_cast<int>(features.cols());
  if (k < 1 || k > n) throw InvalidK("kmeans: need 1 <= k <= N");

  Rng rng(seed);
  Matrix centroids(k, d);

  // k-means++ seeding
  std::vector<double> sq_dist(n, kInf);
  centroids.row(0) = features.row(rng.next_int(n));
  for (int c = 1; c < k; ++c) {
    double total = 0.0;
    for (int i = 0; i < n; ++i) {
      const double dd = (features.row(i) - centroids.row(c - 1)).squaredNorm();
      sq_dist[i] = std::min(sq_dist[i], dd);
      total += sq_dist[i];
    }
    int pick = -1;
    if (total > 0.0) {
      const double target = rng.next_double() * total;
      double acc = 0.0;
      for (int i = 0; i < n; ++i) {
        acc += sq_dist[i];
        if (acc >= target) {
          pick = i;
          break;
        }
      }
      if (pick < 0) pick = n - 1;
    } else {
      pick = rng.next_int(n);  // all mass at existing centers
    }
    centroids.row(c) = features.row(pick);
  }

  KmeansResult result;
  result.labeling.labels = IntVector::Zero(n);
  result.labeling.num_clusters = k;

  constexpr int kMaxIters = 300;
  for (int iter = 0; iter < kMaxIters; ++iter) {
    // assignment
    double inertia = 0.0;
    for (int i = 0; i < n; ++i) {
      int best = 0;
      double best_d = (features.row(i) - centroids.row(0)).squaredNorm();
      for (int c = 1; c < k; ++c) {
        const double dd = (features.row(i) - centroids.row(c)).squaredNorm();
        if (dd < best_d) {
          best_d = dd;
          best = c;
        }
      }
      result.labeling.labels(i) = best;
      inertia += best_d;
    }
    result.inertia_trace.push_back(inertia);

    // update
    Matrix next = Matrix::Zero(k, d);
    std::vector<int> counts(k, 0);
    for (int i = 0; i < n; ++i) {
      next.row(result.labeling.labels(i)) += features.row(i);
      ++counts[result.labeling.labels(i)];
    }
    for (int c = 0; c < k; ++c) {
      if (counts[c] > 0) {
        next.row(c) /= static_cast<double>(counts[c]);
      } else {
        // re-seed an empty cluster with the point farthest from its centroid
        int far = 0;
        double far_d = -1.0;
        for (int i = 0; i < n; ++i) {
          const double dd = (features.row(i) - centroids.row(result.labeling.labels(i))).squaredNorm();
          if (dd > far_d) {
            far_d = dd;
            far = i;
          }
        }
        next.row(c) = features.row(far);
      }
    }
    const double shift = (next - centroids).rowwise().norm().maxCoeff();
    centroids = next;
    if (shift < 1e-6) break;
  }

  // final assignment against the settled centroids
  double inertia = 0.0;
  for (int i = 0; i < n; ++i) {
    int best = 0;
    double best_d = (features.row(i) - centroids.row(0)).squaredNorm();
    for (int c = 1; c < k; ++c) {
      const double dd = (features.row(i) - centroids.row(c)).squaredNorm();
      if (dd < best_d) {
        best_d = dd;
        best = c;
      }
    }
    result.labeling.labels(i) = best;
    inertia += best_d;
  }
  result.inertia_trace.push_back(inertia);

  // drop empty clusters so ids stay dense
  std::vector<int> remap(k, -1);
  int next_id = 0;
  for (int i = 0; i < n; ++i) {
    int& lbl = result.labeling.labels(i);
    if (remap[lbl] < 0) remap[lbl] = next_id++;
  }
  Matrix packed(next_id, d);
  for (int c = 0; c < k; ++c)
    if (remap[c] >= 0) packed.row(remap[c]) = centroids.row(c);
  for (int i = 0; i < n; ++i) result.labeling.labels(i) = remap[result.labeling.labels(i)];
  result.labeling.num_clusters = next_id;
  result.centroids = std::move(packed);
  return result;
}

double dbscan_eps_heuristic(const RankingIndex& ranking, int s_min) {
  const int n = ranking.size();
  if (n < 2) throw InvalidMinSamples("dbscan_eps_heuristic: need at least 2 samples");
  std::vector<double> kth(n);
  const int rank = std::min(s_min, n - 1);
  for (int i = 0; i < n; ++i) kth[i] = ranking.scores(i, rank);
  std::sort(kth.begin(), kth.end());
  const double eps = kth[static_cast<int>(0.9 * (n - 1))];
  return eps > 0.0 ? eps : 1e-6;
}

KmeansResult kmeans_full(const FeatureMatrix& features, int k, std::uint64_t seed) {
  return kmeans_impl(features, k, seed);
}

PseudoLabeling kmeans(const FeatureMatrix& features, int k, std::uint64_t seed) {
  return kmeans_impl(features, k, seed).labeling;
}

Matrix cluster_means(const FeatureMatrix& features, const PseudoLabeling& labeling) {
  if (labeling.num_clusters < 1) throw EmptyCluster("cluster_means: no clusters");
  if (features.rows() != labeling.labels.size())
    throw ShapeMismatch("cluster_means: labeling length does not match feature rows");

  Matrix means = Matrix::Zero(labeling.num_clusters, features.cols());
  std::vector<int> counts(labeling.num_clusters, 0);
  for (Eigen::Index i = 0; i < features.rows(); ++i) {
    const int lbl = labeling.labels(i);
    if (lbl < 0) continue;
    means.row(lbl) += features.row(i);
    ++counts[lbl];
  }
  for (int c = 0; c < labeling.num_clusters; ++c) {
    if (counts[c] == 0) throw EmptyCluster("cluster_means: cluster " + std::to_string(c) + " is empty");
    means.row(c) /= static_cast<double>(counts[c]);
  }
  return means;
}

}  // namespace past
