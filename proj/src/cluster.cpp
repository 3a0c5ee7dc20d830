#include "svp/cluster.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

#include "svp/decompose.hpp"
#include "svp/error.hpp"
#include "svp/rng.hpp"

namespace svp {

namespace {

struct threshold_out {
    double x = 0.0;
    std::vector<int> selected;
};

// Threshold the i-th vector at half its largest coordinate. The
// decomposition already fixes the sign so the largest-magnitude entry is
// positive, which is exactly the convention the clustering needs.
threshold_out threshold_vector(const spectral_decomposition& d, int i) {
    threshold_out out;
    const double* u = d.vector(i);
    for (int l = 0; l < d.n(); ++l) out.x = std::max(out.x, u[l]);
    for (int l = 0; l < d.n(); ++l) {
        if (u[l] >= out.x / 2.0) out.selected.push_back(l);
    }
    return out;
}

threshold_out cluster_once(const sym_matrix& m, int i, errc deficient) {
    require(i >= 1 && i <= m.n(), errc::index_out_of_range,
            "vector index " + std::to_string(i) + " outside [1, " + std::to_string(m.n()) + "]");
    spectral_decomposition d = spectral_decompose(m);
    require(d.sigma_at(i) > d.rank_tol(), deficient,
            "singular value " + std::to_string(i) + " is below the rank tolerance");
    return threshold_vector(d, i);
}

sym_matrix induced_adjacency(const sym_matrix& adj, const std::vector<int>& vertices) {
    const int m = static_cast<int>(vertices.size());
    sym_matrix sub(m);
    for (int a = 0; a < m; ++a) {
        for (int b = a; b < m; ++b) {
            sub.set(a, b, adj(vertices[static_cast<std::size_t>(a)],
                              vertices[static_cast<std::size_t>(b)]));
        }
    }
    return sub;
}

double hypothesis_ratio(const partition_spec& part) {
    if (part.sizes.empty()) return 0.0;
    const int r = part.r();
    const double head = part.sizes.front() * part.block_value(0);
    const double tail = part.sizes.back() * part.block_value(r - 1);
    return tail > 0.0 ? head / tail : 0.0;
}

// Steps shared by both partition recoveries: sample S, then peel r-1
// blocks off the graph spanned by the rest, last block by remainder.
struct peeled {
    std::vector<int> s;                    // sampled vertices, ascending
    std::vector<std::vector<int>> blocks;  // original ids per recovered block
    std::vector<fsc_step> steps;
};

peeled truncate_and_peel(const planted_graph& g, int r, double epsilon, std::uint64_t seed,
                         std::uint32_t trial) {
    const int n = g.adjacency.n();
    require(r >= 1 && r <= n, errc::bad_partition,
            "cannot split " + std::to_string(n) + " vertices into " + std::to_string(r) +
                " blocks");
    require(epsilon >= 0.0 && epsilon < 1.0, errc::bad_spec,
            "truncation exponent must lie in [0, 1)");

    peeled out;
    const double rho = epsilon == 0.0 ? 0.0 : std::pow(n, -1.0 + epsilon);
    std::vector<int> work;
    for (int v = 0; v < n; ++v) {
        rng_stream pick(seed, rng_purpose::vertex_shuffle, trial, static_cast<std::uint32_t>(v));
        if (rho > 0.0 && pick.next_bernoulli(rho)) {
            out.s.push_back(v);
        } else {
            work.push_back(v);
        }
    }

    for (int round = 1; round < r; ++round) {
        sym_matrix sub = induced_adjacency(g.adjacency, work);
        // At zero cross density the +-transform degenerates to the identity
        // (zeros map to -0/(1-0) = 0), so the raw adjacency is already the
        // transformed matrix.
        sym_matrix transformed =
            g.part.cross > 0.0 ? adjacency_transform(sub, g.part.cross) : std::move(sub);
        threshold_out sel = cluster_once(transformed, 1, errc::zero_matrix);
        fsc_step step;
        step.round = round;
        step.x = sel.x;
        for (int l : sel.selected) step.selected.push_back(work[static_cast<std::size_t>(l)]);
        out.steps.push_back(step);
        out.blocks.push_back(step.selected);

        std::vector<int> rest;
        std::size_t cursor = 0;
        for (int v : work) {
            if (cursor < step.selected.size() && step.selected[cursor] == v) {
                ++cursor;
            } else {
                rest.push_back(v);
            }
        }
        work = std::move(rest);
    }
    out.blocks.push_back(work);
    return out;
}

} // namespace

std::vector<int> fsc(const sym_matrix& m) {
    return cluster_once(m, 1, errc::zero_matrix).selected;
}

std::vector<int> ith_clique(const sym_matrix& m, int i) {
    return cluster_once(m, i, errc::rank_deficient).selected;
}

predicted_partition clique_partition(const planted_graph& g, int r, double epsilon,
                                     std::uint64_t seed, std::uint32_t trial) {
    const int n = g.adjacency.n();
    predicted_partition pred;
    pred.r = r;
    pred.labels.assign(static_cast<std::size_t>(n), 0);
    pred.weight_ratio = hypothesis_ratio(g.part);
    if (r == 1) return pred;  // the partition is forced

    peeled p = truncate_and_peel(g, r, epsilon, seed, trial);
    pred.truncated = p.s;
    pred.steps = std::move(p.steps);
    for (int i = 0; i < r; ++i) {
        for (int v : p.blocks[static_cast<std::size_t>(i)]) {
            pred.labels[static_cast<std::size_t>(v)] = i;
        }
    }

    for (int v : p.s) {
        int hits = 0;
        int found = -1;
        for (int i = 0; i < r; ++i) {
            bool all = true;
            for (int w : p.blocks[static_cast<std::size_t>(i)]) {
                if (g.adjacency(v, w) == 0.0) {
                    all = false;
                    break;
                }
            }
            if (all) {
                hits += 1;
                found = i;
            }
        }
        require(hits == 1, errc::assignment_ambiguous,
                "vertex " + std::to_string(v) + " is fully adjacent to " + std::to_string(hits) +
                    " recovered blocks");
        pred.labels[static_cast<std::size_t>(v)] = found;
    }
    return pred;
}

predicted_partition hidden_partition(const planted_graph& g, int r, double epsilon, double c_y,
                                     std::uint64_t seed, std::uint32_t trial) {
    const int n = g.adjacency.n();
    require(c_y > 0.0 && c_y <= 1.0, errc::bad_spec, "reference fraction must lie in (0, 1]");
    predicted_partition pred;
    pred.r = r;
    pred.labels.assign(static_cast<std::size_t>(n), 0);
    pred.weight_ratio = hypothesis_ratio(g.part);
    if (r == 1) return pred;

    peeled p = truncate_and_peel(g, r, epsilon, seed, trial);
    pred.truncated = p.s;
    pred.steps = std::move(p.steps);
    for (int i = 0; i < r; ++i) {
        for (int v : p.blocks[static_cast<std::size_t>(i)]) {
            pred.labels[static_cast<std::size_t>(v)] = i;
        }
    }

    const int m_y = static_cast<int>(std::floor(c_y * n));
    require(m_y >= 1, errc::bad_spec, "reference fraction selects no vertices");
    std::vector<std::vector<int>> reference;
    for (int i = 0; i < r; ++i) {
        std::vector<int> block = p.blocks[static_cast<std::size_t>(i)];
        require(static_cast<int>(block.size()) >= m_y, errc::block_too_small,
                "recovered block " + std::to_string(i) + " holds " +
                    std::to_string(block.size()) + " vertices, need " + std::to_string(m_y));
        // Seeded partial shuffle; entry offset (i+1)*n keeps the lanes
        // disjoint from the S draws at entries [0, n).
        for (std::size_t j = block.size() - 1; j > 0; --j) {
            rng_stream pick(seed, rng_purpose::vertex_shuffle, trial,
                            static_cast<std::uint32_t>((i + 1) * static_cast<long>(n) +
                                                       static_cast<long>(j)));
            std::swap(block[j], block[pick.next_below(j + 1)]);
        }
        block.resize(static_cast<std::size_t>(m_y));
        reference.push_back(std::move(block));
    }

    for (int v : p.s) {
        int best = 0;
        int best_count = -1;
        for (int i = 0; i < r; ++i) {
            int count = 0;
            for (int w : reference[static_cast<std::size_t>(i)]) {
                if (g.adjacency(v, w) != 0.0) count += 1;
            }
            if (count > best_count) {  // ties stay with the lowest index
                best_count = count;
                best = i;
            }
        }
        pred.labels[static_cast<std::size_t>(v)] = best;
    }
    return pred;
}

recovery_result score(const std::vector<int>& predicted, const std::vector<int>& truth) {
    require(predicted.size() == truth.size(), errc::universe_mismatch,
            "label vectors cover different vertex sets");
    require(!truth.empty(), errc::universe_mismatch, "empty vertex set");
    const int n = static_cast<int>(truth.size());

    int m = 0;
    for (int t : truth) {
        require(t >= 0, errc::bad_partition, "truth labels must be nonnegative");
        m = std::max(m, t + 1);
    }
    for (int p : predicted) m = std::max(m, p + 1);

    // Contingency counts; negative predictions fall outside every cell and
    // can never be matched.
    std::vector<std::vector<int>> counts(static_cast<std::size_t>(m),
                                         std::vector<int>(static_cast<std::size_t>(m), 0));
    for (int l = 0; l < n; ++l) {
        const int p = predicted[static_cast<std::size_t>(l)];
        if (p >= 0) {
            counts[static_cast<std::size_t>(p)][static_cast<std::size_t>(
                truth[static_cast<std::size_t>(l)])] += 1;
        }
    }

    int agreement = 0;
    if (m <= 8) {
        std::vector<int> perm(static_cast<std::size_t>(m));
        std::iota(perm.begin(), perm.end(), 0);
        do {
            int total = 0;
            for (int p = 0; p < m; ++p) {
                total += counts[static_cast<std::size_t>(p)][static_cast<std::size_t>(
                    perm[static_cast<std::size_t>(p)])];
            }
            agreement = std::max(agreement, total);
        } while (std::next_permutation(perm.begin(), perm.end()));
    } else {
        std::vector<bool> row_used(static_cast<std::size_t>(m), false);
        std::vector<bool> col_used(static_cast<std::size_t>(m), false);
        for (int step = 0; step < m; ++step) {
            int best = -1, bp = -1, bt = -1;
            for (int p = 0; p < m; ++p) {
                if (row_used[static_cast<std::size_t>(p)]) continue;
                for (int t = 0; t < m; ++t) {
                    if (col_used[static_cast<std::size_t>(t)]) continue;
                    if (counts[static_cast<std::size_t>(p)][static_cast<std::size_t>(t)] > best) {
                        best = counts[static_cast<std::size_t>(p)][static_cast<std::size_t>(t)];
                        bp = p;
                        bt = t;
                    }
                }
            }
            row_used[static_cast<std::size_t>(bp)] = true;
            col_used[static_cast<std::size_t>(bt)] = true;
            agreement += best;
        }
    }

    recovery_result res;
    res.misclassified = n - agreement;
    res.exact = res.misclassified == 0;
    return res;
}

} // namespace svp
