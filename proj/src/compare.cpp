#include "scalex/compare.hpp"

#include <Eigen/Dense>

#include <algorithm>
#include <cmath>
#include <map>
#include <numeric>
#include <set>

#include "scalex/kernels.hpp"

namespace scalex {

namespace {

double cosine_from_sums(double ab, double aa, double bb) {
    if (aa == 0.0 || bb == 0.0) {
        raise(ErrorCode::ZeroVector, "cosine distance of a zero vector");
    }
    double c = ab / (std::sqrt(aa) * std::sqrt(bb));
    c = std::clamp(c, -1.0, 1.0);
    return 1.0 - c;
}

}  // namespace

double cosine_distance(std::span<const float> a, std::span<const float> b) {
    if (a.size() != b.size()) {
        raise(ErrorCode::ShapeMismatch, "cosine distance over mismatched lengths");
    }
    double ab, aa, bb;
    kernels::active().dot3_f32(a.data(), b.data(), a.size(), ab, aa, bb);
    return cosine_from_sums(ab, aa, bb);
}

double cosine_distance(std::span<const double> a, std::span<const double> b) {
    if (a.size() != b.size()) {
        raise(ErrorCode::ShapeMismatch, "cosine distance over mismatched lengths");
    }
    double ab, aa, bb;
    kernels::active().dot3_f64(a.data(), b.data(), a.size(), ab, aa, bb);
    return cosine_from_sums(ab, aa, bb);
}

double cosine_distance(const HVector& a, const HVector& b) {
    if (a.shape != b.shape) {
        raise(ErrorCode::ShapeMismatch,
              "cosine distance between " + a.shape.str() + " and " + b.shape.str());
    }
    return cosine_distance(a.data(), b.data());
}

double default_delta(const HVector& h_neutral, const HVector& h_attr_a,
                     const HVector& h_attr_b) {
    return cosine_distance(h_attr_a, h_neutral) - cosine_distance(h_attr_b, h_neutral);
}

const char* normalization_name(Normalization n) {
    switch (n) {
        case Normalization::raw: return "raw";
        case Normalization::mean_centered: return "mean";
        case Normalization::std_scaled: return "std";
        case Normalization::pca_projected: return "pca";
    }
    return "unknown";
}

DistanceMatrix distance_matrix(std::span<const HVector> descriptors,
                               std::span<const HVector> concepts,
                               std::span<const std::string> descriptor_ids,
                               std::span<const std::string> concept_ids) {
    if (concepts.size() < 2) {
        raise(ErrorCode::EmptyInput, "need at least 2 target concepts");
    }
    if (descriptors.empty()) {
        raise(ErrorCode::EmptyInput, "need at least 1 descriptor");
    }
    DistanceMatrix m;
    m.rows = descriptors.size();
    m.cols = concepts.size();
    m.values.resize(m.rows * m.cols);
    for (std::size_t i = 0; i < m.rows; ++i) {
        for (std::size_t j = 0; j < m.cols; ++j) {
            m.at(i, j) = cosine_distance(descriptors[i], concepts[j]);
        }
    }
    auto fill_ids = [](std::vector<std::string>& out, std::span<const std::string> ids,
                       std::size_t n, const char* prefix) {
        if (!ids.empty()) {
            out.assign(ids.begin(), ids.end());
        } else {
            for (std::size_t k = 0; k < n; ++k) out.push_back(prefix + std::to_string(k));
        }
    };
    fill_ids(m.descriptor_ids, descriptor_ids, m.rows, "d");
    fill_ids(m.concept_ids, concept_ids, m.cols, "c");
    if (m.descriptor_ids.size() != m.rows || m.concept_ids.size() != m.cols) {
        raise(ErrorCode::LengthMismatch, "id lists do not match matrix dimensions");
    }
    return m;
}

DistanceMatrix normalize_mean(const DistanceMatrix& raw) {
    if (raw.normalization != Normalization::raw) {
        raise(ErrorCode::AlreadyNormalized, "normalize_mean expects a raw matrix");
    }
    DistanceMatrix out = raw;
    out.normalization = Normalization::mean_centered;
    out.mu.resize(raw.rows);
    for (std::size_t i = 0; i < raw.rows; ++i) {
        double sum = 0.0;
        for (std::size_t j = 0; j < raw.cols; ++j) sum += raw.at(i, j);
        const double mean = sum / static_cast<double>(raw.cols);
        out.mu[i] = mean;
        for (std::size_t j = 0; j < raw.cols; ++j) out.at(i, j) = raw.at(i, j) - mean;
    }
    return out;
}

DistanceMatrix normalize_std(const DistanceMatrix& raw, StdAxis axis) {
    if (raw.normalization != Normalization::raw) {
        raise(ErrorCode::AlreadyNormalized, "normalize_std expects a raw matrix");
    }
    DistanceMatrix out = raw;
    out.normalization = Normalization::std_scaled;
    out.std_axis = axis;
    const std::size_t groups = axis == StdAxis::per_descriptor ? raw.rows : raw.cols;
    const std::size_t len = axis == StdAxis::per_descriptor ? raw.cols : raw.rows;
    out.mu.resize(groups);
    out.sigma.resize(groups);
    for (std::size_t g = 0; g < groups; ++g) {
        auto value = [&](std::size_t k) {
            return axis == StdAxis::per_descriptor ? raw.at(g, k) : raw.at(k, g);
        };
        double sum = 0.0;
        for (std::size_t k = 0; k < len; ++k) sum += value(k);
        const double mean = sum / static_cast<double>(len);
        double ss = 0.0;
        for (std::size_t k = 0; k < len; ++k) {
            const double d = value(k) - mean;
            ss += d * d;
        }
        const double sigma = std::sqrt(ss / static_cast<double>(len));  // population
        if (sigma == 0.0) {
            const char* kind = axis == StdAxis::per_descriptor ? "descriptor " : "concept ";
            const std::string& id = axis == StdAxis::per_descriptor
                                        ? raw.descriptor_ids[g]
                                        : raw.concept_ids[g];
            raise(ErrorCode::ZeroVariance, std::string(kind) + id + " has zero variance");
        }
        out.mu[g] = mean;
        out.sigma[g] = sigma;
        for (std::size_t k = 0; k < len; ++k) {
            const double v = (value(k) - mean) / sigma;
            if (axis == StdAxis::per_descriptor) {
                out.at(g, k) = v;
            } else {
                out.at(k, g) = v;
            }
        }
    }
    return out;
}

namespace {

// Principal axes of the (centered) concept set via the Gram matrix: with few
// concepts in a very high-dimensional space, the n x n eigenproblem is the
// whole cost.
PcaProjector fit_projector(const std::vector<std::vector<double>>& centered,
                           std::size_t dims, std::size_t rank) {
    const std::size_t n = centered.size();
    const auto& ops = kernels::active();

    Eigen::MatrixXd gram(n, n);
    for (std::size_t i = 0; i < n; ++i) {
        for (std::size_t j = i; j < n; ++j) {
            const double g = ops.dot_f64(centered[i].data(), centered[j].data(), dims);
            gram(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j)) = g;
            gram(static_cast<Eigen::Index>(j), static_cast<Eigen::Index>(i)) = g;
        }
    }
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> solver(gram);
    if (solver.info() != Eigen::Success) {
        raise(ErrorCode::RankDeficient, "eigendecomposition failed");
    }
    // Eigen returns ascending eigenvalues; take the top `rank` from the back.
    const double tol = 1e-9 * std::max(1.0, solver.eigenvalues().cwiseAbs().maxCoeff());
    std::size_t spanned = 0;
    for (Eigen::Index k = 0; k < solver.eigenvalues().size(); ++k) {
        if (solver.eigenvalues()(k) > tol) ++spanned;
    }
    if (spanned < rank) {
        raise(ErrorCode::RankDeficient,
              "concepts span " + std::to_string(spanned) + " dims, need " +
                  std::to_string(rank));
    }

    PcaProjector proj;
    proj.dims = dims;
    proj.rank = rank;
    proj.components.assign(rank * dims, 0.0);
    for (std::size_t m = 0; m < rank; ++m) {
        const Eigen::Index col = static_cast<Eigen::Index>(n - 1 - m);
        const double lambda = solver.eigenvalues()(col);
        double* axis = proj.components.data() + m * dims;
        for (std::size_t i = 0; i < n; ++i) {
            const double alpha = solver.eigenvectors()(static_cast<Eigen::Index>(i), col);
            ops.axpy_f64(axis, centered[i].data(), dims, alpha);
        }
        const double inv_norm = 1.0 / std::sqrt(lambda);
        for (std::size_t d = 0; d < dims; ++d) axis[d] *= inv_norm;
    }
    return proj;
}

std::vector<double> project(const PcaProjector& proj, std::span<const double> v) {
    std::vector<double> out(proj.rank);
    const auto& ops = kernels::active();
    for (std::size_t m = 0; m < proj.rank; ++m) {
        out[m] = ops.dot_f64(proj.component(m).data(), v.data(), proj.dims);
    }
    return out;
}

std::vector<double> widen(std::span<const float> v) {
    return {v.begin(), v.end()};
}

}  // namespace

DistanceMatrix normalize_pca(std::span<const HVector> descriptors,
                             std::span<const HVector> concepts, std::size_t rank,
                             bool center_per_seed,
                             std::span<const std::uint64_t> seed_labels,
                             std::span<const std::string> descriptor_ids,
                             std::span<const std::string> concept_ids) {
    const std::size_t n = concepts.size();
    if (n < 2) raise(ErrorCode::EmptyInput, "need at least 2 target concepts");
    if (descriptors.empty()) raise(ErrorCode::EmptyInput, "need at least 1 descriptor");
    const TensorShape shape = concepts.front().shape;
    for (const HVector& v : concepts) {
        if (v.shape != shape) raise(ErrorCode::ShapeMismatch, "concept shapes differ");
    }
    for (const HVector& v : descriptors) {
        if (v.shape != shape) raise(ErrorCode::ShapeMismatch, "descriptor shapes differ");
    }
    if (!seed_labels.empty() && seed_labels.size() != n) {
        raise(ErrorCode::LengthMismatch, "seed_labels must parallel concepts");
    }
    const std::size_t max_rank = center_per_seed ? n - 1 : n;
    if (rank < 1 || rank > max_rank) {
        raise(ErrorCode::BadM,
              "M=" + std::to_string(rank) + " out of range [1, " +
                  std::to_string(max_rank) + "]");
    }

    const std::size_t dims = shape.size();
    const auto& ops = kernels::active();

    // Per-seed concept centers (or the single global center when not
    // centering per seed; PCA axes always come from centered data).
    std::map<std::uint64_t, std::vector<double>> group_centers;
    std::map<std::uint64_t, std::size_t> group_sizes;
    auto seed_of = [&](std::size_t j) {
        return seed_labels.empty() ? concepts[j].prompt.seed : seed_labels[j];
    };
    std::vector<double> global_center(dims, 0.0);
    for (std::size_t j = 0; j < n; ++j) {
        ops.axpy_f32_acc(global_center.data(), concepts[j].values.data(), dims, 1.0);
        if (center_per_seed) {
            auto [it, fresh] = group_centers.try_emplace(seed_of(j),
                                                         std::vector<double>(dims, 0.0));
            ops.axpy_f32_acc(it->second.data(), concepts[j].values.data(), dims, 1.0);
            group_sizes[seed_of(j)] += 1;
        }
    }
    for (double& v : global_center) v /= static_cast<double>(n);
    for (auto& [seed, center] : group_centers) {
        const double inv = 1.0 / static_cast<double>(group_sizes[seed]);
        for (double& v : center) v *= inv;
    }
    auto center_for = [&](std::uint64_t seed) -> const std::vector<double>& {
        if (!center_per_seed) return global_center;
        const auto it = group_centers.find(seed);
        return it != group_centers.end() ? it->second : global_center;
    };

    std::vector<std::vector<double>> centered(n);
    for (std::size_t j = 0; j < n; ++j) {
        const std::vector<double>& c = center_for(seed_of(j));
        centered[j] = widen(concepts[j].values);
        for (std::size_t d = 0; d < dims; ++d) centered[j][d] -= c[d];
    }

    PcaProjector proj = fit_projector(centered, dims, rank);
    proj.center = global_center;

    // Projected forms. Without centering, projection is W v on the raw
    // vectors; with centering, W (v - center of its seed group).
    auto projected_form = [&](const HVector& v) {
        std::vector<double> wide = widen(v.values);
        if (center_per_seed) {
            const std::vector<double>& c = center_for(v.prompt.seed);
            for (std::size_t d = 0; d < dims; ++d) wide[d] -= c[d];
        }
        return project(proj, wide);
    };

    std::vector<std::vector<double>> proj_concepts(n);
    for (std::size_t j = 0; j < n; ++j) proj_concepts[j] = projected_form(concepts[j]);

    DistanceMatrix m;
    m.rows = descriptors.size();
    m.cols = n;
    m.values.resize(m.rows * m.cols);
    for (std::size_t i = 0; i < m.rows; ++i) {
        const std::vector<double> pd = projected_form(descriptors[i]);
        for (std::size_t j = 0; j < n; ++j) {
            m.at(i, j) = cosine_distance(std::span<const double>(pd),
                                         std::span<const double>(proj_concepts[j]));
        }
    }
    auto fill_ids = [](std::vector<std::string>& out, std::span<const std::string> ids,
                       std::size_t count, const char* prefix) {
        if (!ids.empty()) {
            out.assign(ids.begin(), ids.end());
        } else {
            for (std::size_t k = 0; k < count; ++k) out.push_back(prefix + std::to_string(k));
        }
    };
    fill_ids(m.descriptor_ids, descriptor_ids, m.rows, "d");
    fill_ids(m.concept_ids, concept_ids, m.cols, "c");
    m.normalization = Normalization::pca_projected;
    m.projector = std::move(proj);
    m.centered_per_seed = center_per_seed;
    return m;
}

RankingResult rank_descriptors(const DistanceMatrix& normalized,
                               std::size_t target_concept_index) {
    if (target_concept_index >= normalized.cols) {
        raise(ErrorCode::BadIndex,
              "target concept index " + std::to_string(target_concept_index) +
                  " out of range");
    }
    if (normalized.normalization == Normalization::raw && normalized.cols != 2) {
        raise(ErrorCode::NotNormalized,
              "raw distances only rank pairwise (n=2); normalize first");
    }

    const std::size_t target = target_concept_index;
    const bool pairwise = normalized.cols == 2 &&
                          (normalized.normalization == Normalization::raw ||
                           normalized.normalization == Normalization::mean_centered);
    const std::size_t other = target == 0 ? 1 : 0;

    std::vector<std::size_t> order(normalized.rows);
    std::iota(order.begin(), order.end(), 0);
    std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
        const double da = normalized.at(a, target);
        const double db = normalized.at(b, target);
        if (da != db) return da < db;  // most aligned with target first
        return normalized.descriptor_ids[a] < normalized.descriptor_ids[b];
    });

    RankingResult result;
    result.concept_id = normalized.concept_ids[target];
    result.concept_index = target;
    result.normalization = normalized.normalization;
    result.pairwise_score = pairwise;
    result.rows.reserve(normalized.rows);
    for (std::size_t i : order) {
        const double score = pairwise
                                 ? normalized.at(i, other) - normalized.at(i, target)
                                 : normalized.at(i, target);
        result.rows.push_back({normalized.descriptor_ids[i], score});
    }
    return result;
}

namespace {

std::vector<double> average_ranks(std::span<const double> x) {
    const std::size_t n = x.size();
    std::vector<std::size_t> order(n);
    std::iota(order.begin(), order.end(), 0);
    std::sort(order.begin(), order.end(),
              [&](std::size_t a, std::size_t b) { return x[a] < x[b]; });
    std::vector<double> ranks(n);
    std::size_t i = 0;
    while (i < n) {
        std::size_t j = i;
        while (j + 1 < n && x[order[j + 1]] == x[order[i]]) ++j;
        const double avg = 0.5 * (static_cast<double>(i) + static_cast<double>(j)) + 1.0;
        for (std::size_t k = i; k <= j; ++k) ranks[order[k]] = avg;
        i = j + 1;
    }
    return ranks;
}

double pearson(std::span<const double> x, std::span<const double> y) {
    const std::size_t n = x.size();
    double mx = 0.0, my = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
        mx += x[i];
        my += y[i];
    }
    mx /= static_cast<double>(n);
    my /= static_cast<double>(n);
    double sxy = 0.0, sxx = 0.0, syy = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
        const double dx = x[i] - mx;
        const double dy = y[i] - my;
        sxy += dx * dy;
        sxx += dx * dx;
        syy += dy * dy;
    }
    if (sxx == 0.0 || syy == 0.0) {
        raise(ErrorCode::DegenerateInput, "correlation input has zero variance");
    }
    return sxy / std::sqrt(sxx * syy);
}

}  // namespace

Correlation variant_correlation(std::span<const double> a, std::span<const double> b) {
    if (a.size() != b.size()) {
        raise(ErrorCode::LengthMismatch, "correlation inputs differ in length");
    }
    if (a.size() < 3) {
        raise(ErrorCode::DegenerateInput, "need at least 3 paired values");
    }
    Correlation c;
    c.pearson = pearson(a, b);
    const std::vector<double> ra = average_ranks(a);
    const std::vector<double> rb = average_ranks(b);
    c.spearman = pearson(ra, rb);
    return c;
}

std::vector<DefaultDeltaResult> profession_delta_table(
    const VectorStore& store, const TagMap& profession_tagset,
    const std::pair<std::string, std::string>& attr_pair,
    std::span<const std::uint64_t> seeds, const std::string& variant) {
    const std::vector<VectorRecord> all = store.query(profession_tagset);
    return profession_delta_table(all, attr_pair, seeds, variant);
}

std::vector<DefaultDeltaResult> profession_delta_table(
    std::span<const VectorRecord> records,
    const std::pair<std::string, std::string>& attr_pair,
    std::span<const std::uint64_t> seeds, const std::string& variant) {
    if (seeds.empty()) raise(ErrorCode::EmptyInput, "no seeds requested");

    // profession -> prompt key -> gender -> seed -> record
    std::map<std::string,
             std::map<std::string, std::map<std::string,
                                            std::map<std::uint64_t, VectorRecord>>>>
        grouped;
    for (const VectorRecord& r : records) {
        const auto prof = r.tags.find("profession");
        const auto gender = r.tags.find("gender");
        if (prof == r.tags.end() || gender == r.tags.end()) continue;
        if (gender->second != "neutral" && !variant.empty()) {
            const auto v = r.tags.find("variant");
            if (v != r.tags.end() && v->second != variant) continue;
        }
        const auto scenario = r.tags.find("scenario");
        const std::string prompt_key =
            scenario != r.tags.end() ? scenario->second : r.hvector.prompt.text;
        grouped[prof->second][prompt_key][gender->second][r.hvector.prompt.seed] = r;
    }
    if (grouped.empty()) {
        raise(ErrorCode::EmptyInput, "no profession-tagged records match the filter");
    }

    std::vector<DefaultDeltaResult> table;
    for (const auto& [profession, prompts] : grouped) {
        DefaultDeltaResult row;
        row.label = profession;
        for (const auto& [prompt_key, by_gender] : prompts) {
            auto pick = [&](const std::string& gender, std::uint64_t seed)
                -> const VectorRecord& {
                const auto git = by_gender.find(gender);
                if (git != by_gender.end()) {
                    const auto sit = git->second.find(seed);
                    if (sit != git->second.end()) return sit->second;
                }
                raise(ErrorCode::MissingVariant,
                      profession + "/" + prompt_key + " is missing gender=" + gender +
                          " at seed " + std::to_string(seed));
            };
            for (std::uint64_t seed : seeds) {
                const VectorRecord& neutral = pick("neutral", seed);
                const VectorRecord& a = pick(attr_pair.first, seed);
                const VectorRecord& b = pick(attr_pair.second, seed);
                if (row.neutral_id.empty()) {
                    row.neutral_id = neutral.id;
                    row.attr_a_id = a.id;
                    row.attr_b_id = b.id;
                }
                row.per_seed_deltas.push_back(
                    default_delta(neutral.hvector, a.hvector, b.hvector));
            }
        }
        double sum = 0.0;
        for (double d : row.per_seed_deltas) sum += d;
        row.delta = sum / static_cast<double>(row.per_seed_deltas.size());
        table.push_back(std::move(row));
    }
    std::stable_sort(table.begin(), table.end(),
                     [](const DefaultDeltaResult& a, const DefaultDeltaResult& b) {
                         if (a.delta != b.delta) return a.delta < b.delta;
                         return a.label < b.label;
                     });
    return table;
}

}  // namespace scalex
