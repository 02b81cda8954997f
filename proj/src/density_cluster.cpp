#include <algorithm>
#include <cmath>
#include <limits>
#include <map>
#include <numeric>
#include <vector>

#include "scalex/atlas.hpp"
#include "scalex/kernels.hpp"

// Hierarchical density clustering: mutual-reachability distances, an MST,
// a single-linkage hierarchy condensed by min_cluster_size, and flat cluster
// extraction by excess-of-mass stability. Noise is -1.
//
// Root policy: when the condensed tree has no internal clusters at all, the
// whole set counts as one cluster only if it is persistent (densest scale at
// least kSingleClusterPersistence times the connectivity scale); otherwise
// everything is noise. This keeps one compact blob = one cluster while sparse
// uniform scatter with large min_samples dissolves.

namespace scalex {

namespace {

constexpr double kSingleClusterPersistence = 2.0;

struct MstEdge {
    std::size_t a = 0;
    std::size_t b = 0;
    double dist = 0.0;
};

class MutualReachabilityClusterer final : public DensityClusterer {
  public:
    std::vector<int> cluster(std::span<const std::vector<double>> vectors,
                             int min_cluster_size, int min_samples) const override;
    std::string name() const override { return "mreach-mst-eom"; }
};

std::vector<int> canonical_relabel(std::vector<int> labels) {
    std::map<int, int> next;
    int fresh = 0;
    for (int& l : labels) {
        if (l < 0) continue;
        const auto [it, inserted] = next.try_emplace(l, fresh);
        if (inserted) ++fresh;
        l = it->second;
    }
    return labels;
}

}  // namespace

std::vector<int> MutualReachabilityClusterer::cluster(
    std::span<const std::vector<double>> vectors, int min_cluster_size,
    int min_samples) const {
    const std::size_t n = vectors.size();
    if (n < static_cast<std::size_t>(std::max(min_cluster_size, 2))) {
        raise(ErrorCode::TooFewPoints,
              std::to_string(n) + " points with min_cluster_size " +
                  std::to_string(min_cluster_size));
    }
    const std::size_t dims = vectors.front().size();
    const auto& ops = kernels::active();

    std::vector<double> dist(n * n, 0.0);
    for (std::size_t i = 0; i < n; ++i) {
        for (std::size_t j = i + 1; j < n; ++j) {
            const double d =
                std::sqrt(ops.sqdist_f64(vectors[i].data(), vectors[j].data(), dims));
            dist[i * n + j] = d;
            dist[j * n + i] = d;
        }
    }

    // Core distance: distance to the k-th nearest other point.
    const std::size_t k = std::min<std::size_t>(std::max(min_samples, 1), n - 1);
    std::vector<double> core(n);
    {
        std::vector<double> row(n - 1);
        for (std::size_t i = 0; i < n; ++i) {
            std::size_t m = 0;
            for (std::size_t j = 0; j < n; ++j) {
                if (j != i) row[m++] = dist[i * n + j];
            }
            std::nth_element(row.begin(), row.begin() + (k - 1), row.end());
            core[i] = row[k - 1];
        }
    }

    // Prim's MST over mutual reachability.
    std::vector<MstEdge> mst;
    mst.reserve(n - 1);
    {
        std::vector<bool> in_tree(n, false);
        std::vector<double> best(n, std::numeric_limits<double>::infinity());
        std::vector<std::size_t> from(n, 0);
        in_tree[0] = true;
        for (std::size_t j = 1; j < n; ++j) {
            best[j] = std::max({core[0], core[j], dist[j]});
            from[j] = 0;
        }
        for (std::size_t added = 1; added < n; ++added) {
            std::size_t pick = n;
            double pick_d = std::numeric_limits<double>::infinity();
            for (std::size_t j = 0; j < n; ++j) {
                if (!in_tree[j] && best[j] < pick_d) {
                    pick = j;
                    pick_d = best[j];
                }
            }
            in_tree[pick] = true;
            mst.push_back({from[pick], pick, pick_d});
            for (std::size_t j = 0; j < n; ++j) {
                if (in_tree[j]) continue;
                const double mr = std::max({core[pick], core[j], dist[pick * n + j]});
                if (mr < best[j]) {
                    best[j] = mr;
                    from[j] = pick;
                }
            }
        }
    }
    std::sort(mst.begin(), mst.end(),
              [](const MstEdge& x, const MstEdge& y) { return x.dist < y.dist; });

    // Single-linkage dendrogram via union-find: internal nodes n .. 2n-2.
    const std::size_t total_nodes = 2 * n - 1;
    std::vector<std::size_t> uf_parent(total_nodes);
    std::iota(uf_parent.begin(), uf_parent.end(), 0);
    std::vector<std::size_t> uf_node(total_nodes);  // component -> dendrogram node
    std::iota(uf_node.begin(), uf_node.end(), 0);
    auto find = [&](std::size_t x) {
        while (uf_parent[x] != x) {
            uf_parent[x] = uf_parent[uf_parent[x]];
            x = uf_parent[x];
        }
        return x;
    };

    struct Node {
        std::size_t left, right;
        double dist;
        std::size_t size;
    };
    std::vector<Node> nodes(total_nodes, {0, 0, 0.0, 1});
    std::size_t next_node = n;
    for (const MstEdge& e : mst) {
        const std::size_t ra = find(e.a);
        const std::size_t rb = find(e.b);
        const std::size_t na = uf_node[ra];
        const std::size_t nb = uf_node[rb];
        nodes[next_node] = {na, nb, e.dist, nodes[na].size + nodes[nb].size};
        uf_parent[ra] = next_node;
        uf_parent[rb] = next_node;
        uf_node[find(next_node)] = next_node;
        ++next_node;
    }
    const std::size_t root = total_nodes - 1;
    const std::size_t min_size = static_cast<std::size_t>(min_cluster_size);

    // Condense: walk top-down; a split is real when both sides reach
    // min_cluster_size. Otherwise small sides fall out of the current
    // condensed cluster at that lambda.
    struct Condensed {
        int parent = -1;                 // condensed cluster id
        double lambda_birth = 0.0;
        double stability = 0.0;
        std::vector<int> children;       // condensed cluster ids
        std::vector<std::size_t> points; // points falling out of this cluster
        std::vector<double> point_lambdas;
    };
    std::vector<Condensed> condensed;
    condensed.push_back({});  // id 0 = root cluster
    condensed[0].lambda_birth = nodes[root].dist > 0.0 ? 1.0 / nodes[root].dist : 0.0;

    struct WorkItem {
        std::size_t node;
        int cluster;
    };
    std::vector<WorkItem> stack{{root, 0}};
    auto spill_points = [&](std::size_t node, int cluster, double lambda) {
        // Every leaf under `node` falls out of `cluster` at `lambda`.
        std::vector<std::size_t> sub{node};
        while (!sub.empty()) {
            const std::size_t cur = sub.back();
            sub.pop_back();
            if (cur < n) {
                condensed[cluster].points.push_back(cur);
                condensed[cluster].point_lambdas.push_back(lambda);
            } else {
                sub.push_back(nodes[cur].left);
                sub.push_back(nodes[cur].right);
            }
        }
    };
    while (!stack.empty()) {
        const WorkItem item = stack.back();
        stack.pop_back();
        if (item.node < n) {
            // Singleton component at the very top (cannot happen with n>=2).
            condensed[item.cluster].points.push_back(item.node);
            condensed[item.cluster].point_lambdas.push_back(
                condensed[item.cluster].lambda_birth);
            continue;
        }
        const Node& nd = nodes[item.node];
        const double lambda = nd.dist > 0.0 ? 1.0 / nd.dist
                                            : std::numeric_limits<double>::infinity();
        const std::size_t ls = nodes[nd.left].size;
        const std::size_t rs = nodes[nd.right].size;
        const bool left_big = ls >= min_size;
        const bool right_big = rs >= min_size;
        if (left_big && right_big) {
            for (std::size_t child : {nd.left, nd.right}) {
                Condensed c;
                c.parent = item.cluster;
                c.lambda_birth = lambda;
                condensed.push_back(std::move(c));
                const int child_id = static_cast<int>(condensed.size() - 1);
                condensed[item.cluster].children.push_back(child_id);
                stack.push_back({child, child_id});
            }
        } else if (left_big || right_big) {
            const std::size_t keep = left_big ? nd.left : nd.right;
            const std::size_t drop = left_big ? nd.right : nd.left;
            spill_points(drop, item.cluster, lambda);
            stack.push_back({keep, item.cluster});
        } else {
            spill_points(nd.left, item.cluster, lambda);
            spill_points(nd.right, item.cluster, lambda);
        }
    }

    // Stability = sum over points of (lambda_leave - lambda_birth); a child
    // cluster's points contribute up to the child's birth.
    for (std::size_t c = 0; c < condensed.size(); ++c) {
        double s = 0.0;
        for (double lp : condensed[c].point_lambdas) {
            const double capped = std::isinf(lp) ? condensed[c].lambda_birth : lp;
            s += std::max(0.0, capped - condensed[c].lambda_birth);
        }
        for (int child : condensed[c].children) {
            const double lb = condensed[child].lambda_birth;
            // Points that continue into the child lived in this cluster from
            // birth to split.
            double child_mass = 0.0;
            std::vector<int> frontier{child};
            while (!frontier.empty()) {
                const int cur = frontier.back();
                frontier.pop_back();
                child_mass += static_cast<double>(condensed[cur].points.size());
                for (int g : condensed[cur].children) frontier.push_back(g);
            }
            s += child_mass * std::max(0.0, lb - condensed[c].lambda_birth);
        }
        condensed[c].stability = s;
    }

    // Excess-of-mass selection over non-root clusters, children before
    // parents (condensed ids increase top-down, so walk backwards).
    std::vector<bool> selected(condensed.size(), false);
    std::vector<double> subtree_stability(condensed.size(), 0.0);
    for (std::size_t c = condensed.size(); c-- > 1;) {
        double child_total = 0.0;
        for (int child : condensed[c].children) child_total += subtree_stability[child];
        if (condensed[c].children.empty() || condensed[c].stability >= child_total) {
            selected[c] = true;
            subtree_stability[c] = condensed[c].stability;
            std::vector<int> frontier(condensed[c].children);
            while (!frontier.empty()) {  // deselect descendants
                const int cur = frontier.back();
                frontier.pop_back();
                selected[cur] = false;
                for (int g : condensed[cur].children) frontier.push_back(g);
            }
        } else {
            subtree_stability[c] = child_total;
        }
    }

    // Root-as-single-cluster fallback.
    if (condensed.size() == 1) {
        const auto& lams = condensed[0].point_lambdas;
        std::vector<double> finite;
        for (double l : lams) {
            finite.push_back(std::isinf(l) ? condensed[0].lambda_birth : l);
        }
        std::nth_element(finite.begin(), finite.begin() + finite.size() / 2, finite.end());
        const double median_lambda = finite[finite.size() / 2];
        const double birth = condensed[0].lambda_birth;
        if (birth > 0.0 && median_lambda >= kSingleClusterPersistence * birth) {
            selected[0] = true;
        }
    }

    std::vector<int> labels(n, -1);
    for (std::size_t c = 0; c < condensed.size(); ++c) {
        if (!selected[c]) continue;
        // All points in this cluster's subtree belong to it.
        std::vector<int> frontier{static_cast<int>(c)};
        while (!frontier.empty()) {
            const int cur = frontier.back();
            frontier.pop_back();
            for (std::size_t p : condensed[cur].points) labels[p] = static_cast<int>(c);
            for (int g : condensed[cur].children) frontier.push_back(g);
        }
    }
    return canonical_relabel(std::move(labels));
}

std::unique_ptr<DensityClusterer> make_density_clusterer() {
    return std::make_unique<MutualReachabilityClusterer>();
}

}  // namespace scalex
