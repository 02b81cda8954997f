#pragma once

#include <unistd.h>

#include <atomic>
#include <cmath>
#include <cstdint>
#include <cstdlib>
#include <filesystem>
#include <random>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "scalex/hvector.hpp"

// Shared fixtures and independent oracles. Everything here recomputes results
// with plain scalar loops so the implementations under test never check
// themselves.

namespace testutil {

inline std::filesystem::path fixtures_dir() {
    if (const char* env = std::getenv("SCALEX_FIXTURES")) return env;
    return std::filesystem::path("fixtures");
}

class TempDir {
  public:
    explicit TempDir(const std::string& tag) {
        static std::atomic<int> counter{0};
        dir_ = std::filesystem::temp_directory_path() /
               ("scalex_test_" + tag + "_" + std::to_string(::getpid()) + "_" +
                std::to_string(counter++));
        std::filesystem::create_directories(dir_);
    }
    ~TempDir() {
        std::error_code ec;
        std::filesystem::remove_all(dir_, ec);
    }
    const std::filesystem::path& path() const { return dir_; }

  private:
    std::filesystem::path dir_;
};

inline std::vector<float> random_f32(std::mt19937_64& rng, std::size_t n,
                                     float lo = -1.0f, float hi = 1.0f) {
    std::uniform_real_distribution<float> dist(lo, hi);
    std::vector<float> out(n);
    for (float& v : out) v = dist(rng);
    return out;
}

inline std::vector<double> random_f64(std::mt19937_64& rng, std::size_t n,
                                      double lo = -1.0, double hi = 1.0) {
    std::uniform_real_distribution<double> dist(lo, hi);
    std::vector<double> out(n);
    for (double& v : out) v = dist(rng);
    return out;
}

inline scalex::HVector make_hvector(std::vector<float> values,
                                    scalex::TensorShape shape = {},
                                    std::uint64_t seed = 0) {
    if (shape.size() == 0) {
        shape = {static_cast<int>(values.size()), 1, 1};
    }
    scalex::HVector h;
    h.values = std::move(values);
    h.shape = shape;
    h.model_id = "fixture";
    h.prompt.text = "fixture vector";
    h.prompt.seed = seed;
    h.prompt.guidance_scale = 0.0;
    return h;
}

// --- scalar-loop oracles ---

inline double cosine_oracle(std::span<const float> a, std::span<const float> b) {
    double ab = 0, aa = 0, bb = 0;
    for (std::size_t i = 0; i < a.size(); ++i) {
        ab += double(a[i]) * double(b[i]);
        aa += double(a[i]) * double(a[i]);
        bb += double(b[i]) * double(b[i]);
    }
    double c = ab / (std::sqrt(aa) * std::sqrt(bb));
    if (c > 1.0) c = 1.0;
    if (c < -1.0) c = -1.0;
    return 1.0 - c;
}

inline double cosine_oracle_f64(std::span<const double> a, std::span<const double> b) {
    double ab = 0, aa = 0, bb = 0;
    for (std::size_t i = 0; i < a.size(); ++i) {
        ab += a[i] * b[i];
        aa += a[i] * a[i];
        bb += b[i] * b[i];
    }
    double c = ab / (std::sqrt(aa) * std::sqrt(bb));
    if (c > 1.0) c = 1.0;
    if (c < -1.0) c = -1.0;
    return 1.0 - c;
}

inline double delta_oracle(std::span<const float> neutral, std::span<const float> a,
                           std::span<const float> b) {
    return cosine_oracle(a, neutral) - cosine_oracle(b, neutral);
}

// Cyclic Jacobi eigensolver for small symmetric matrices. Returns
// eigenvalues descending; eigenvectors as rows of `vectors`.
inline void jacobi_eigen(std::vector<std::vector<double>> m,
                         std::vector<double>& values,
                         std::vector<std::vector<double>>& vectors) {
    const std::size_t n = m.size();
    vectors.assign(n, std::vector<double>(n, 0.0));
    for (std::size_t i = 0; i < n; ++i) vectors[i][i] = 1.0;
    for (int sweep = 0; sweep < 100; ++sweep) {
        double off = 0.0;
        for (std::size_t p = 0; p < n; ++p) {
            for (std::size_t q = p + 1; q < n; ++q) off += m[p][q] * m[p][q];
        }
        if (off < 1e-24) break;
        for (std::size_t p = 0; p < n; ++p) {
            for (std::size_t q = p + 1; q < n; ++q) {
                if (std::abs(m[p][q]) < 1e-18) continue;
                const double theta = (m[q][q] - m[p][p]) / (2.0 * m[p][q]);
                const double t = (theta >= 0 ? 1.0 : -1.0) /
                                 (std::abs(theta) + std::sqrt(theta * theta + 1.0));
                const double c = 1.0 / std::sqrt(t * t + 1.0);
                const double s = t * c;
                for (std::size_t k = 0; k < n; ++k) {
                    const double mkp = m[k][p], mkq = m[k][q];
                    m[k][p] = c * mkp - s * mkq;
                    m[k][q] = s * mkp + c * mkq;
                }
                for (std::size_t k = 0; k < n; ++k) {
                    const double mpk = m[p][k], mqk = m[q][k];
                    m[p][k] = c * mpk - s * mqk;
                    m[q][k] = s * mpk + c * mqk;
                }
                for (std::size_t k = 0; k < n; ++k) {
                    const double vpk = vectors[p][k], vqk = vectors[q][k];
                    vectors[p][k] = c * vpk - s * vqk;
                    vectors[q][k] = s * vpk + c * vqk;
                }
            }
        }
    }
    values.resize(n);
    for (std::size_t i = 0; i < n; ++i) values[i] = m[i][i];
    // Sort descending, keeping rows aligned.
    for (std::size_t i = 0; i < n; ++i) {
        std::size_t best = i;
        for (std::size_t j = i + 1; j < n; ++j) {
            if (values[j] > values[best]) best = j;
        }
        std::swap(values[i], values[best]);
        std::swap(vectors[i], vectors[best]);
    }
}

// Brute-force PCA-projection distance oracle at tiny dimension: center the
// concepts (optionally per seed group), form the D x D covariance,
// eigendecompose with Jacobi, project, recompute cosine distances.
struct PcaOracleResult {
    std::vector<std::vector<double>> distances;  // rows descriptors
    std::vector<std::vector<double>> axes;       // M x D
};

inline PcaOracleResult pca_distance_oracle(
    const std::vector<std::vector<double>>& descriptors,
    const std::vector<std::vector<double>>& concepts, std::size_t rank,
    const std::vector<int>& concept_groups,  // empty = single group
    const std::vector<int>& descriptor_groups, bool center) {
    const std::size_t n = concepts.size();
    const std::size_t dims = concepts.front().size();

    std::vector<std::vector<double>> group_center;
    std::vector<double> global_center(dims, 0.0);
    for (const auto& c : concepts) {
        for (std::size_t d = 0; d < dims; ++d) global_center[d] += c[d] / double(n);
    }
    int n_groups = 1;
    if (!concept_groups.empty()) {
        for (int g : concept_groups) n_groups = std::max(n_groups, g + 1);
    }
    group_center.assign(n_groups, std::vector<double>(dims, 0.0));
    std::vector<int> group_count(n_groups, 0);
    for (std::size_t j = 0; j < n; ++j) {
        const int g = concept_groups.empty() ? 0 : concept_groups[j];
        for (std::size_t d = 0; d < dims; ++d) group_center[g][d] += concepts[j][d];
        group_count[g] += 1;
    }
    for (int g = 0; g < n_groups; ++g) {
        for (double& v : group_center[g]) v /= double(group_count[g]);
    }

    auto center_of = [&](int g) -> const std::vector<double>& {
        return center && !concept_groups.empty() ? group_center[g] : global_center;
    };

    std::vector<std::vector<double>> centered(n, std::vector<double>(dims));
    for (std::size_t j = 0; j < n; ++j) {
        const int g = concept_groups.empty() ? 0 : concept_groups[j];
        const auto& c = center ? center_of(g) : global_center;
        for (std::size_t d = 0; d < dims; ++d) centered[j][d] = concepts[j][d] - c[d];
    }

    std::vector<std::vector<double>> cov(dims, std::vector<double>(dims, 0.0));
    for (const auto& x : centered) {
        for (std::size_t a = 0; a < dims; ++a) {
            for (std::size_t b = 0; b < dims; ++b) cov[a][b] += x[a] * x[b];
        }
    }

    std::vector<double> eigenvalues;
    std::vector<std::vector<double>> eigenvectors;
    jacobi_eigen(cov, eigenvalues, eigenvectors);

    PcaOracleResult result;
    result.axes.assign(eigenvectors.begin(), eigenvectors.begin() + rank);

    auto project = [&](const std::vector<double>& v, int group) {
        std::vector<double> shifted = v;
        if (center) {
            const auto& c = group >= 0 && group < n_groups ? group_center[group]
                                                           : global_center;
            for (std::size_t d = 0; d < dims; ++d) shifted[d] -= c[d];
        }
        std::vector<double> out(rank, 0.0);
        for (std::size_t m = 0; m < rank; ++m) {
            for (std::size_t d = 0; d < dims; ++d) out[m] += result.axes[m][d] * shifted[d];
        }
        return out;
    };

    std::vector<std::vector<double>> proj_concepts(n);
    for (std::size_t j = 0; j < n; ++j) {
        proj_concepts[j] = project(concepts[j], concept_groups.empty() ? 0 : concept_groups[j]);
    }
    result.distances.assign(descriptors.size(), std::vector<double>(n, 0.0));
    for (std::size_t i = 0; i < descriptors.size(); ++i) {
        const auto pd = project(descriptors[i],
                                descriptor_groups.empty() ? -1 : descriptor_groups[i]);
        for (std::size_t j = 0; j < n; ++j) {
            result.distances[i][j] = cosine_oracle_f64(pd, proj_concepts[j]);
        }
    }
    return result;
}

// Mean silhouette of a 2-labelling over 2-d points.
inline double silhouette_2d(const std::vector<std::pair<double, double>>& pts,
                            const std::vector<int>& labels) {
    const std::size_t n = pts.size();
    auto dist = [&](std::size_t i, std::size_t j) {
        const double dx = pts[i].first - pts[j].first;
        const double dy = pts[i].second - pts[j].second;
        return std::sqrt(dx * dx + dy * dy);
    };
    double total = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
        double a_sum = 0, b_sum = 0;
        int a_count = 0, b_count = 0;
        for (std::size_t j = 0; j < n; ++j) {
            if (j == i) continue;
            if (labels[j] == labels[i]) {
                a_sum += dist(i, j);
                ++a_count;
            } else {
                b_sum += dist(i, j);
                ++b_count;
            }
        }
        const double a = a_count ? a_sum / a_count : 0.0;
        const double b = b_count ? b_sum / b_count : 0.0;
        total += (b - a) / std::max(a, b);
    }
    return total / double(n);
}

// Adjusted Rand index; noise labels (-1) are treated as singleton clusters.
inline double adjusted_rand_index(const std::vector<int>& truth,
                                  std::vector<int> predicted) {
    int next = 0;
    for (int l : predicted) next = std::max(next, l + 1);
    for (int& l : predicted) {
        if (l < 0) l = next++;
    }
    const std::size_t n = truth.size();
    int tmax = 0, pmax = 0;
    for (int l : truth) tmax = std::max(tmax, l + 1);
    for (int l : predicted) pmax = std::max(pmax, l + 1);
    std::vector<std::vector<long long>> table(tmax, std::vector<long long>(pmax, 0));
    for (std::size_t i = 0; i < n; ++i) table[truth[i]][predicted[i]] += 1;
    auto choose2 = [](long long v) { return v * (v - 1) / 2; };
    long long sum_ij = 0, sum_a = 0, sum_b = 0;
    for (int i = 0; i < tmax; ++i) {
        long long row = 0;
        for (int j = 0; j < pmax; ++j) {
            sum_ij += choose2(table[i][j]);
            row += table[i][j];
        }
        sum_a += choose2(row);
    }
    for (int j = 0; j < pmax; ++j) {
        long long col = 0;
        for (int i = 0; i < tmax; ++i) col += table[i][j];
        sum_b += choose2(col);
    }
    const double total = double(choose2(static_cast<long long>(n)));
    const double expected = double(sum_a) * double(sum_b) / total;
    const double maximum = 0.5 * (double(sum_a) + double(sum_b));
    if (maximum == expected) return 1.0;
    return (double(sum_ij) - expected) / (maximum - expected);
}

}  // namespace testutil
