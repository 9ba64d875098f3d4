#include "advpara/clustering.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>

#include <Eigen/Dense>

#include "advpara/errors.hpp"

namespace advpara::clustering {

namespace {

double distance(const std::vector<double>& a, const std::vector<double>& b) {
  double s = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) {
    const double d = a[i] - b[i];
    s += d * d;
  }
  return std::sqrt(s);
}

struct Edge {
  std::size_t a, b;
  double w;
};

// Minimum spanning tree of the mutual reachability graph (dense Prim).
std::vector<Edge> mutual_reachability_mst(const Points& pts, std::size_t min_samples) {
  const std::size_t n = pts.size();
  std::vector<std::vector<double>> d(n, std::vector<double>(n, 0.0));
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = i + 1; j < n; ++j) d[i][j] = d[j][i] = distance(pts[i], pts[j]);

  // core distance counts the point itself as its first neighbour
  const std::size_t k = std::min(min_samples, n);
  std::vector<double> core(n);
  for (std::size_t i = 0; i < n; ++i) {
    std::vector<double> row = d[i];
    std::nth_element(row.begin(), row.begin() + static_cast<std::ptrdiff_t>(k - 1), row.end());
    core[i] = row[k - 1];
  }

  std::vector<bool> in_tree(n, false);
  std::vector<double> best(n, std::numeric_limits<double>::infinity());
  std::vector<std::size_t> from(n, 0);
  std::vector<Edge> edges;
  std::size_t cur = 0;
  in_tree[0] = true;
  for (std::size_t step = 1; step < n; ++step) {
    std::size_t next = n;
    for (std::size_t j = 0; j < n; ++j) {
      if (in_tree[j]) continue;
      const double mr = std::max({core[cur], core[j], d[cur][j]});
      if (mr < best[j]) {
        best[j] = mr;
        from[j] = cur;
      }
      if (next == n || best[j] < best[next]) next = j;
    }
    edges.push_back({from[next], next, best[next]});
    in_tree[next] = true;
    cur = next;
  }
  std::stable_sort(edges.begin(), edges.end(), [](const Edge& x, const Edge& y) { return x.w < y.w; });
  return edges;
}

struct Merge {
  std::size_t left, right;
  double dist;
  std::size_t size;
};

// Single-linkage dendrogram; node n + i is created by merge i.
std::vector<Merge> single_linkage(const std::vector<Edge>& edges, std::size_t n) {
  std::vector<std::size_t> parent(2 * n - 1);
  std::iota(parent.begin(), parent.end(), 0);
  std::vector<std::size_t> size(2 * n - 1, 1);
  auto find = [&](std::size_t x) {
    while (parent[x] != x) x = parent[x] = parent[parent[x]];
    return x;
  };
  std::vector<Merge> merges;
  std::size_t next = n;
  for (const auto& e : edges) {
    const std::size_t ra = find(e.a), rb = find(e.b);
    merges.push_back({ra, rb, e.w, size[ra] + size[rb]});
    parent[ra] = parent[rb] = next;
    size[next] = size[ra] + size[rb];
    ++next;
  }
  return merges;
}

struct CondensedRow {
  std::size_t parent;  // condensed cluster id (>= n)
  std::size_t child;   // point index (< n) or cluster id
  double lambda;
  std::size_t size;
};

std::vector<CondensedRow> condense(const std::vector<Merge>& merges, std::size_t n, std::size_t mcs) {
  const std::size_t root = 2 * n - 2;
  auto node_size = [&](std::size_t x) { return x < n ? std::size_t{1} : merges[x - n].size; };
  auto leaves = [&](std::size_t x) {
    std::vector<std::size_t> out, stack{x};
    while (!stack.empty()) {
      const std::size_t y = stack.back();
      stack.pop_back();
      if (y < n) {
        out.push_back(y);
      } else {
        stack.push_back(merges[y - n].right);
        stack.push_back(merges[y - n].left);
      }
    }
    return out;
  };

  std::vector<CondensedRow> rows;
  std::vector<std::size_t> label(2 * n - 1, 0);
  std::size_t next_label = n + 1;
  label[root] = n;
  std::vector<std::size_t> queue{root};
  for (std::size_t qi = 0; qi < queue.size(); ++qi) {
    const std::size_t node = queue[qi];
    if (node < n) continue;
    const Merge& m = merges[node - n];
    const double lambda = 1.0 / std::max(m.dist, 1e-12);
    const std::size_t ls = node_size(m.left), rs = node_size(m.right);
    const std::size_t parent = label[node];
    if (ls >= mcs && rs >= mcs) {
      for (std::size_t c : {m.left, m.right}) {
        label[c] = next_label++;
        rows.push_back({parent, label[c], lambda, node_size(c)});
        queue.push_back(c);
      }
    } else if (ls < mcs && rs < mcs) {
      for (std::size_t c : {m.left, m.right})
        for (std::size_t p : leaves(c)) rows.push_back({parent, p, lambda, 1});
    } else {
      const std::size_t big = ls >= mcs ? m.left : m.right;
      const std::size_t small = ls >= mcs ? m.right : m.left;
      for (std::size_t p : leaves(small)) rows.push_back({parent, p, lambda, 1});
      label[big] = parent;
      queue.push_back(big);
    }
  }
  return rows;
}

}  // namespace

Result hdbscan(const Points& points, std::size_t min_cluster_size, std::size_t min_samples,
               bool allow_single_cluster) {
  if (min_cluster_size < 2) throw Error("min_cluster_size must be at least 2");
  if (min_samples < 1) throw Error("min_samples must be positive");
  const std::size_t n = points.size();
  Result res;
  res.labels.assign(n, -1);
  if (n == 0) return res;
  for (const auto& p : points)
    if (p.size() != points[0].size()) throw Error("points differ in dimension");
  if (n < min_cluster_size) {
    res.num_noise = n;
    return res;
  }

  const auto merges = single_linkage(mutual_reachability_mst(points, min_samples), n);
  const auto rows = condense(merges, n, min_cluster_size);

  std::size_t max_cluster = n;
  for (const auto& r : rows) max_cluster = std::max(max_cluster, r.parent);
  for (const auto& r : rows)
    if (r.size > 1 || r.child >= n) max_cluster = std::max(max_cluster, r.child);
  const std::size_t nc = max_cluster - n + 1;

  std::vector<double> birth(nc, 0.0);
  std::vector<std::size_t> parent_of(nc, 0);
  std::vector<std::vector<std::size_t>> children(nc);
  for (const auto& r : rows) {
    if (r.child >= n) {
      birth[r.child - n] = r.lambda;
      parent_of[r.child - n] = r.parent;
      children[r.parent - n].push_back(r.child);
    }
  }
  std::vector<double> stability(nc, 0.0);
  for (const auto& r : rows) {
    stability[r.parent - n] += (r.lambda - birth[r.parent - n]) * static_cast<double>(r.size);
  }

  // Excess of mass: children ids are always larger than their parent's.
  std::vector<bool> selected(nc, false);
  std::vector<double> best(stability);
  const std::size_t first = allow_single_cluster ? 0 : 1;
  for (std::size_t c = nc; c-- > first;) {
    double sub = 0.0;
    for (std::size_t ch : children[c]) sub += best[ch - n];
    if (!children[c].empty() && sub > stability[c]) {
      best[c] = sub;
    } else {
      selected[c] = true;
      std::vector<std::size_t> stack(children[c]);
      while (!stack.empty()) {
        const std::size_t d = stack.back() - n;
        stack.pop_back();
        selected[d] = false;
        for (std::size_t ch : children[d]) stack.push_back(ch);
      }
    }
  }

  std::vector<int> index(nc, -1);
  int next = 0;
  for (std::size_t c = 0; c < nc; ++c)
    if (selected[c]) index[c] = next++;
  res.num_clusters = static_cast<std::size_t>(next);

  double root_max_lambda = 0.0;
  for (const auto& r : rows)
    if (r.parent == n) root_max_lambda = std::max(root_max_lambda, r.lambda);

  for (const auto& r : rows) {
    if (r.child >= n) continue;
    std::size_t c = r.parent;
    while (c != n && !selected[c - n]) c = parent_of[c - n];
    if (!selected[c - n]) continue;
    // a selected root keeps only points that persist to its densest split
    if (c == n && r.lambda < root_max_lambda) continue;
    res.labels[r.child] = index[c - n];
  }
  res.num_noise = static_cast<std::size_t>(std::count(res.labels.begin(), res.labels.end(), -1));
  return res;
}

Points pca_reduce(const Points& points, std::size_t dims) {
  const std::size_t n = points.size();
  if (n == 0) return {};
  const std::size_t d = points[0].size();
  Eigen::MatrixXd x(static_cast<Eigen::Index>(n), static_cast<Eigen::Index>(d));
  for (std::size_t i = 0; i < n; ++i) {
    if (points[i].size() != d) throw Error("points differ in dimension");
    for (std::size_t j = 0; j < d; ++j) x(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j)) = points[i][j];
  }
  x.rowwise() -= x.colwise().mean();
  Eigen::BDCSVD<Eigen::MatrixXd> svd(x, Eigen::ComputeThinV);
  Eigen::MatrixXd v = svd.matrixV();
  const auto k = static_cast<Eigen::Index>(std::min({dims, d, n}));
  for (Eigen::Index c = 0; c < k; ++c) {
    Eigen::Index arg = 0;
    v.col(c).cwiseAbs().maxCoeff(&arg);
    if (v(arg, c) < 0) v.col(c) *= -1.0;
  }
  const Eigen::MatrixXd proj = x * v.leftCols(k);
  Points out(n, std::vector<double>(static_cast<std::size_t>(k)));
  for (std::size_t i = 0; i < n; ++i)
    for (Eigen::Index j = 0; j < k; ++j) out[i][static_cast<std::size_t>(j)] = proj(static_cast<Eigen::Index>(i), j);
  return out;
}

Result cluster(const Points& points, const ClusteringConfig& cfg) {
  const bool reduce = !points.empty() && points[0].size() > cfg.reduce_above_dims &&
                      points.size() > cfg.reduce_above_points;
  return hdbscan(reduce ? pca_reduce(points, cfg.reduced_dims) : points, cfg.min_cluster_size, cfg.min_samples,
                 cfg.allow_single_cluster);
}

}  // namespace advpara::clustering
