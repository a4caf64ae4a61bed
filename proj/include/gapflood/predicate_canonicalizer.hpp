#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <limits>
#include <random>
#include <set>
#include <span>
#include <string>
#include <vector>

#include "clustering.hpp"
#include "embedding_store.hpp"
#include "error.hpp"

namespace gapflood {

struct KMeansResult {
    std::vector<std::uint32_t> assignment;
    std::vector<std::vector<double>> centroids;
    double wcss = 0.0;
    int iterations = 0;
};

namespace detail {

inline double sq_dist(std::span<const double> a, std::span<const double> b) {
    double s = 0.0;
    for (std::size_t i = 0; i < a.size(); ++i) {
        const double d = a[i] - b[i];
        s += d * d;
    }
    return s;
}

inline std::size_t nearest(std::span<const double> p, const std::vector<std::vector<double>>& centers) {
    std::size_t best = 0;
    double best_d = std::numeric_limits<double>::infinity();
    for (std::size_t c = 0; c < centers.size(); ++c) {
        const double d = sq_dist(p, centers[c]);
        if (d < best_d) {
            best_d = d;
            best = c;
        }
    }
    return best;
}

inline std::vector<std::vector<double>> farthest_point_seeds(const std::vector<std::vector<double>>& pts,
                                                             std::size_t k, std::size_t first) {
    std::vector<std::vector<double>> centers{pts[first]};
    std::vector<bool> used(pts.size(), false);
    used[first] = true;
    std::vector<double> mind(pts.size());
    for (std::size_t i = 0; i < pts.size(); ++i) mind[i] = sq_dist(pts[i], pts[first]);
    while (centers.size() < k) {
        std::size_t pick = pts.size();
        double best = -1.0;
        for (std::size_t i = 0; i < pts.size(); ++i) {
            if (used[i]) continue;
            if (mind[i] > best) {
                best = mind[i];
                pick = i;
            }
        }
        used[pick] = true;
        centers.push_back(pts[pick]);
        for (std::size_t i = 0; i < pts.size(); ++i) mind[i] = std::min(mind[i], sq_dist(pts[i], pts[pick]));
    }
    return centers;
}

inline KMeansResult lloyd(const std::vector<std::vector<double>>& pts, std::vector<std::vector<double>> centers,
                          int max_iter) {
    const std::size_t n = pts.size(), k = centers.size(), dim = pts.front().size();
    KMeansResult r;
    r.assignment.assign(n, std::numeric_limits<std::uint32_t>::max());
    for (int it = 0; it < max_iter; ++it) {
        bool changed = false;
        for (std::size_t i = 0; i < n; ++i) {
            auto c = static_cast<std::uint32_t>(nearest(pts[i], centers));
            if (c != r.assignment[i]) {
                r.assignment[i] = c;
                changed = true;
            }
        }
        r.iterations = it + 1;
        // Reseed any empty cluster with the point farthest from its own centroid.
        for (std::size_t c = 0; c < k; ++c) {
            std::vector<std::size_t> sizes(k, 0);
            for (auto a : r.assignment) ++sizes[a];
            if (sizes[c] != 0) continue;
            std::size_t far = n;
            double far_d = -1.0;
            for (std::size_t i = 0; i < n; ++i) {
                if (sizes[r.assignment[i]] < 2) continue;
                const double d = sq_dist(pts[i], centers[r.assignment[i]]);
                if (d > far_d) {
                    far_d = d;
                    far = i;
                }
            }
            if (far == n) break;
            r.assignment[far] = static_cast<std::uint32_t>(c);
            centers[c] = pts[far];
            changed = true;
        }
        std::vector<std::vector<double>> sums(k, std::vector<double>(dim, 0.0));
        std::vector<std::size_t> counts(k, 0);
        for (std::size_t i = 0; i < n; ++i) {
            auto& s = sums[r.assignment[i]];
            for (std::size_t d = 0; d < dim; ++d) s[d] += pts[i][d];
            ++counts[r.assignment[i]];
        }
        for (std::size_t c = 0; c < k; ++c) {
            if (counts[c] == 0) continue;
            for (std::size_t d = 0; d < dim; ++d) centers[c][d] = sums[c][d] / static_cast<double>(counts[c]);
        }
        if (!changed) break;
    }
    r.centroids = std::move(centers);
    r.wcss = 0.0;
    for (std::size_t i = 0; i < n; ++i) r.wcss += sq_dist(pts[i], r.centroids[r.assignment[i]]);
    return r;
}

/// D^2-weighted seeding (k-means++) driven by the caller's generator.
inline std::vector<std::vector<double>> d2_seeds(const std::vector<std::vector<double>>& pts, std::size_t k,
                                                 std::mt19937_64& rng) {
    std::vector<std::vector<double>> centers{pts[rng() % pts.size()]};
    std::vector<double> mind(pts.size());
    for (std::size_t i = 0; i < pts.size(); ++i) mind[i] = sq_dist(pts[i], centers[0]);
    while (centers.size() < k) {
        double total = 0.0;
        for (double d : mind) total += d;
        std::size_t pick = 0;
        if (total <= 0.0) {
            pick = rng() % pts.size();
        } else {
            double u = std::uniform_real_distribution<double>(0.0, total)(rng);
            while (pick + 1 < pts.size() && u >= mind[pick]) u -= mind[pick++];
        }
        centers.push_back(pts[pick]);
        for (std::size_t i = 0; i < pts.size(); ++i) mind[i] = std::min(mind[i], sq_dist(pts[i], pts[pick]));
    }
    return centers;
}

/// Single-point moves (Hartigan): relocate a point whenever that strictly
/// lowers WCSS. Runs after Lloyd, whose fixpoints it can escape.
inline void hartigan_refine(const std::vector<std::vector<double>>& pts, KMeansResult& r, int max_rounds) {
    const std::size_t n = pts.size(), k = r.centroids.size(), dim = pts.front().size();
    std::vector<std::size_t> counts(k, 0);
    for (auto a : r.assignment) ++counts[a];
    for (int round = 0; round < max_rounds; ++round) {
        bool moved = false;
        for (std::size_t i = 0; i < n; ++i) {
            const auto from = r.assignment[i];
            if (counts[from] < 2) continue;
            const double na = static_cast<double>(counts[from]);
            const double loss = na / (na - 1.0) * sq_dist(pts[i], r.centroids[from]);
            std::size_t best = from;
            double best_gain = 1e-12 * (1.0 + loss);
            for (std::size_t c = 0; c < k; ++c) {
                if (c == from) continue;
                const double nb = static_cast<double>(counts[c]);
                const double gain = loss - nb / (nb + 1.0) * sq_dist(pts[i], r.centroids[c]);
                if (gain > best_gain) {
                    best_gain = gain;
                    best = c;
                }
            }
            if (best == from) continue;
            auto& ca = r.centroids[from];
            auto& cb = r.centroids[best];
            const double nb = static_cast<double>(counts[best]);
            for (std::size_t d = 0; d < dim; ++d) {
                ca[d] = (ca[d] * na - pts[i][d]) / (na - 1.0);
                cb[d] = (cb[d] * nb + pts[i][d]) / (nb + 1.0);
            }
            --counts[from];
            ++counts[best];
            r.assignment[i] = static_cast<std::uint32_t>(best);
            moved = true;
        }
        if (!moved) break;
    }
    // exact centroids and WCSS after the incremental updates
    std::vector<std::vector<double>> sums(k, std::vector<double>(dim, 0.0));
    for (std::size_t i = 0; i < n; ++i)
        for (std::size_t d = 0; d < dim; ++d) sums[r.assignment[i]][d] += pts[i][d];
    for (std::size_t c = 0; c < k; ++c)
        if (counts[c] != 0)
            for (std::size_t d = 0; d < dim; ++d) r.centroids[c][d] = sums[c][d] / static_cast<double>(counts[c]);
    r.wcss = 0.0;
    for (std::size_t i = 0; i < n; ++i) r.wcss += sq_dist(pts[i], r.centroids[r.assignment[i]]);
}

/// Renumbers clusters by first member so ids are contiguous and order-stable.
inline void relabel_by_first_member(KMeansResult& r) {
    const std::uint32_t none = std::numeric_limits<std::uint32_t>::max();
    std::vector<std::uint32_t> map(r.centroids.size(), none);
    std::uint32_t next = 0;
    for (auto a : r.assignment)
        if (map[a] == none) map[a] = next++;
    std::vector<std::vector<double>> centroids(next);
    for (std::size_t c = 0; c < r.centroids.size(); ++c)
        if (map[c] != none) centroids[map[c]] = r.centroids[c];
    for (auto& a : r.assignment) a = map[a];
    r.centroids = std::move(centroids);
}

} // namespace detail

inline constexpr int kMaxLloydIterations = 300;
inline constexpr std::size_t kSeedingStarts = 8;
inline constexpr std::size_t kD2Starts = 8;

/// Lloyd's k-means with farthest-point seeding. Several seed-derived first
/// centres are tried and the lowest-WCSS run is kept, so the result depends
/// only on (points, k, seed).
inline KMeansResult kmeans(const std::vector<std::vector<double>>& points, std::size_t k, std::uint64_t seed) {
    if (k == 0) throw ContractViolation("k must be positive");
    if (k > points.size())
        throw ContractViolation("k = " + std::to_string(k) + " exceeds the number of points (" +
                                std::to_string(points.size()) + ")");
    const std::size_t n = points.size();
    std::mt19937_64 rng(seed);
    const std::size_t offset = static_cast<std::size_t>(rng() % n);
    const std::size_t starts = std::min(n, kSeedingStarts);

    KMeansResult best;
    bool have = false;
    auto run = [&](std::vector<std::vector<double>> centers) {
        auto r = detail::lloyd(points, std::move(centers), kMaxLloydIterations);
        detail::hartigan_refine(points, r, kMaxLloydIterations);
        if (!have || r.wcss < best.wcss - 1e-12 * (1.0 + best.wcss)) {
            best = std::move(r);
            have = true;
        }
    };
    for (std::size_t s = 0; s < starts; ++s) run(detail::farthest_point_seeds(points, k, (offset + s) % n));
    for (std::size_t s = 0; s < kD2Starts; ++s) run(detail::d2_seeds(points, k, rng));
    detail::relabel_by_first_member(best);
    return best;
}

inline std::vector<std::vector<double>> predicate_points(const std::vector<std::string>& predicates,
                                                         const EmbeddingStore& store) {
    std::vector<std::vector<double>> pts;
    pts.reserve(predicates.size());
    for (const auto& p : predicates) pts.push_back(phrase_vector(p, store).values);
    return pts;
}

inline PredicateClustering cluster_predicates(const std::set<std::string>& predicates, const EmbeddingStore& store,
                                              std::size_t k, std::uint64_t seed) {
    if (k == 0) throw ContractViolation("k must be positive");
    if (k > predicates.size())
        throw ContractViolation("k = " + std::to_string(k) + " exceeds predicate count " +
                                std::to_string(predicates.size()));
    std::vector<std::string> ordered(predicates.begin(), predicates.end());
    auto r = kmeans(predicate_points(ordered, store), k, seed);
    PredicateClustering c;
    c.k = static_cast<std::uint32_t>(r.centroids.size());
    c.seed = seed;
    c.centroids = std::move(r.centroids);
    for (std::size_t i = 0; i < ordered.size(); ++i) c.assignment[ordered[i]] = ClusterId{r.assignment[i]};
    return c;
}

/// Knee of a WCSS curve (index 0 is k = 1): the k whose point lies farthest
/// from the chord joining the first and last points. Ties go to the smaller k.
inline std::size_t elbow_k(std::span<const double> wcss) {
    if (wcss.empty()) throw EmptyInputError("empty WCSS curve");
    const std::size_t last = wcss.size();
    if (last == 1) return 1;
    const double x1 = 1.0, y1 = wcss.front();
    const double x2 = static_cast<double>(last), y2 = wcss.back();
    const double dx = x2 - x1, dy = y2 - y1;
    const double len = std::sqrt(dx * dx + dy * dy);
    std::size_t best_k = 1;
    double best_d = 0.0;
    for (std::size_t i = 0; i < last; ++i) {
        const double x = static_cast<double>(i + 1), y = wcss[i];
        const double d = std::abs(dy * (x - x1) - dx * (y - y1)) / len;
        if (d > best_d + 1e-12 * (1.0 + best_d)) {
            best_d = d;
            best_k = i + 1;
        }
    }
    return best_k;
}

inline std::vector<double> wcss_curve(const std::set<std::string>& predicates, const EmbeddingStore& store,
                                      std::size_t k_max, std::uint64_t seed) {
    if (predicates.empty()) throw EmptyInputError("no predicates to cluster");
    if (k_max == 0) throw ContractViolation("k_max must be positive");
    std::vector<std::string> ordered(predicates.begin(), predicates.end());
    auto pts = predicate_points(ordered, store);
    const std::size_t last = std::min(k_max, ordered.size());
    std::vector<double> curve;
    for (std::size_t k = 1; k <= last; ++k) curve.push_back(kmeans(pts, k, seed).wcss);
    return curve;
}

inline std::size_t select_k(const std::set<std::string>& predicates, const EmbeddingStore& store, std::size_t k_max,
                            std::uint64_t seed) {
    auto curve = wcss_curve(predicates, store, k_max, seed);
    return elbow_k(curve);
}

/// Elbow-selected clustering with the WCSS curve attached.
inline PredicateClustering cluster_predicates_auto(const std::set<std::string>& predicates,
                                                   const EmbeddingStore& store, std::size_t k_max,
                                                   std::uint64_t seed) {
    auto curve = wcss_curve(predicates, store, k_max, seed);
    auto c = cluster_predicates(predicates, store, elbow_k(curve), seed);
    c.wcss_curve = std::move(curve);
    return c;
}

} // namespace gapflood
