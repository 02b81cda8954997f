#include <algorithm>
#include <cmath>
#include <random>
#include <vector>

#include "scalex/atlas.hpp"
#include "scalex/kernels.hpp"

// Exact (dense) t-SNE: Gaussian affinities with per-point bandwidth found by
// binary search for the target perplexity, Student-t low-dimensional kernel,
// gradient descent with early exaggeration, momentum, and adaptive gains.
// O(N^2) per iteration, which covers the corpus sizes this toolkit targets.

namespace scalex {

namespace {

constexpr int kIterations = 600;
constexpr int kExaggerationIters = 200;
constexpr double kExaggeration = 12.0;
constexpr double kLearningRate = 200.0;
constexpr double kMomentumEarly = 0.5;
constexpr double kMomentumLate = 0.8;
constexpr double kMinGain = 0.01;
constexpr double kTinyProb = 1e-12;

class TsneEmbedder final : public Embedder2d {
  public:
    std::vector<Point2d> embed(std::span<const std::vector<double>> vectors,
                               double perplexity, std::uint64_t seed) const override;
    std::string name() const override { return "tsne-exact"; }
};

// Row of conditional probabilities for point i at precision beta.
double row_probabilities(const std::vector<double>& d2_row, std::size_t i, double beta,
                         std::vector<double>& p_row) {
    const std::size_t n = p_row.size();
    double sum = 0.0;
    for (std::size_t j = 0; j < n; ++j) {
        if (j == i) {
            p_row[j] = 0.0;
            continue;
        }
        p_row[j] = std::exp(-beta * d2_row[j]);
        sum += p_row[j];
    }
    double entropy = 0.0;
    if (sum > 0.0) {
        for (std::size_t j = 0; j < n; ++j) {
            if (j == i || p_row[j] == 0.0) continue;
            const double p = p_row[j] / sum;
            entropy -= p * std::log(p);
            p_row[j] = p;
        }
    } else {
        // Degenerate row (all duplicates at beta -> inf); fall back to uniform.
        const double u = 1.0 / static_cast<double>(n - 1);
        for (std::size_t j = 0; j < n; ++j) p_row[j] = j == i ? 0.0 : u;
        entropy = std::log(static_cast<double>(n - 1));
    }
    return entropy;
}

}  // namespace

std::vector<Point2d> TsneEmbedder::embed(std::span<const std::vector<double>> vectors,
                                         double perplexity, std::uint64_t seed) const {
    const std::size_t n = vectors.size();
    const std::size_t dims = vectors.front().size();
    const auto& ops = kernels::active();

    // Pairwise squared distances.
    std::vector<std::vector<double>> d2(n, std::vector<double>(n, 0.0));
    for (std::size_t i = 0; i < n; ++i) {
        for (std::size_t j = i + 1; j < n; ++j) {
            const double d = ops.sqdist_f64(vectors[i].data(), vectors[j].data(), dims);
            d2[i][j] = d;
            d2[j][i] = d;
        }
    }

    // Conditional affinities at the requested perplexity.
    const double target_entropy = std::log(perplexity);
    std::vector<std::vector<double>> p_cond(n, std::vector<double>(n, 0.0));
    for (std::size_t i = 0; i < n; ++i) {
        double beta = 1.0, beta_lo = 0.0, beta_hi = std::numeric_limits<double>::infinity();
        for (int iter = 0; iter < 64; ++iter) {
            const double entropy = row_probabilities(d2[i], i, beta, p_cond[i]);
            const double diff = entropy - target_entropy;
            if (std::abs(diff) < 1e-5) break;
            if (diff > 0.0) {
                beta_lo = beta;
                beta = std::isinf(beta_hi) ? beta * 2.0 : 0.5 * (beta + beta_hi);
            } else {
                beta_hi = beta;
                beta = beta_lo == 0.0 ? beta * 0.5 : 0.5 * (beta + beta_lo);
            }
        }
    }

    // Symmetrize.
    std::vector<std::vector<double>> p(n, std::vector<double>(n, 0.0));
    for (std::size_t i = 0; i < n; ++i) {
        for (std::size_t j = i + 1; j < n; ++j) {
            const double v = std::max((p_cond[i][j] + p_cond[j][i]) / (2.0 * n), kTinyProb);
            p[i][j] = v;
            p[j][i] = v;
        }
    }

    std::mt19937_64 rng(seed);
    std::normal_distribution<double> init(0.0, 1e-4);
    std::vector<double> y(2 * n), dy(2 * n, 0.0), gains(2 * n, 1.0), grad(2 * n, 0.0);
    for (double& v : y) v = init(rng);

    std::vector<double> q_row(n);
    for (int iter = 0; iter < kIterations; ++iter) {
        const double exaggeration = iter < kExaggerationIters ? kExaggeration : 1.0;
        const double momentum = iter < kExaggerationIters ? kMomentumEarly : kMomentumLate;

        // q_ij ~ (1 + |y_i - y_j|^2)^-1, normalized.
        double q_sum = 0.0;
        std::vector<std::vector<double>> w(n, std::vector<double>(n, 0.0));
        for (std::size_t i = 0; i < n; ++i) {
            for (std::size_t j = i + 1; j < n; ++j) {
                const double dx = y[2 * i] - y[2 * j];
                const double dyv = y[2 * i + 1] - y[2 * j + 1];
                const double v = 1.0 / (1.0 + dx * dx + dyv * dyv);
                w[i][j] = v;
                w[j][i] = v;
                q_sum += 2.0 * v;
            }
        }
        q_sum = std::max(q_sum, kTinyProb);

        std::fill(grad.begin(), grad.end(), 0.0);
        for (std::size_t i = 0; i < n; ++i) {
            for (std::size_t j = 0; j < n; ++j) {
                if (i == j) continue;
                const double q = std::max(w[i][j] / q_sum, kTinyProb);
                const double mult = (exaggeration * p[i][j] - q) * w[i][j];
                grad[2 * i] += 4.0 * mult * (y[2 * i] - y[2 * j]);
                grad[2 * i + 1] += 4.0 * mult * (y[2 * i + 1] - y[2 * j + 1]);
            }
        }

        for (std::size_t k = 0; k < 2 * n; ++k) {
            gains[k] = (grad[k] > 0.0) != (dy[k] > 0.0) ? gains[k] + 0.2
                                                        : gains[k] * 0.8;
            gains[k] = std::max(gains[k], kMinGain);
            dy[k] = momentum * dy[k] - kLearningRate * gains[k] * grad[k];
            y[k] += dy[k];
        }

        // Keep the embedding centered.
        double cx = 0.0, cy = 0.0;
        for (std::size_t i = 0; i < n; ++i) {
            cx += y[2 * i];
            cy += y[2 * i + 1];
        }
        cx /= static_cast<double>(n);
        cy /= static_cast<double>(n);
        for (std::size_t i = 0; i < n; ++i) {
            y[2 * i] -= cx;
            y[2 * i + 1] -= cy;
        }
    }

    std::vector<Point2d> points(n);
    for (std::size_t i = 0; i < n; ++i) {
        points[i] = {y[2 * i], y[2 * i + 1]};
    }
    return points;
}

std::unique_ptr<Embedder2d> make_tsne_embedder() {
    return std::make_unique<TsneEmbedder>();
}

}  // namespace scalex
