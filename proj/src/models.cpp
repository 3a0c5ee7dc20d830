#include "svp/models.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <string>

namespace svp {

namespace {

constexpr double inf = std::numeric_limits<double>::infinity();

std::uint32_t pair_entry(int i, int j, int n) {
    return static_cast<std::uint32_t>(static_cast<std::uint64_t>(i) * n + j);
}

} // namespace

int partition_spec::n() const {
    int s = 0;
    for (int k : sizes) s += k;
    return s;
}

void partition_spec::validate() const {
    require(!sizes.empty(), errc::bad_partition, "partition needs at least one block");
    require(sizes.size() == densities.size(), errc::bad_partition,
            "sizes and densities must pair up");
    for (int k : sizes) require(k >= 1, errc::bad_partition, "block sizes must be >= 1");
    for (double p : densities)
        require(p > 0.0 && p <= 1.0, errc::bad_partition, "densities must lie in (0, 1]");
    require(cross >= 0.0 && cross < 1.0, errc::bad_density, "cross density must lie in [0, 1)");
}

double partition_spec::block_value(int i) const {
    require(i >= 0 && i < r(), errc::index_out_of_range, "block " + std::to_string(i));
    return (densities[i] - cross) / (1.0 - cross);
}

const char* noise_kind_name(noise_kind k) {
    switch (k) {
        case noise_kind::rademacher: return "rademacher";
        case noise_kind::truncated_gaussian: return "truncated_gaussian";
        case noise_kind::centered_edge: return "centered_edge";
        case noise_kind::partition_edge: return "partition_edge";
        case noise_kind::completion_sampling: return "completion_sampling";
    }
    return "unknown";
}

noise_kind noise_kind_from_name(const std::string& name) {
    if (name == "rademacher") return noise_kind::rademacher;
    if (name == "truncated_gaussian") return noise_kind::truncated_gaussian;
    if (name == "centered_edge") return noise_kind::centered_edge;
    if (name == "partition_edge") return noise_kind::partition_edge;
    if (name == "completion_sampling") return noise_kind::completion_sampling;
    fail(errc::bad_spec, "unknown noise kind '" + name + "'");
}

void noise_spec::validate(int n) const {
    require(n >= 1, errc::bad_size, "noise dimension must be >= 1");
    require(scale >= 0.0, errc::bad_spec, "noise scale must be >= 0");
    require(k_bound >= 0.0 && second_moment >= 0.0, errc::bad_spec,
            "K and second moment overrides must be >= 0");
    switch (kind) {
        case noise_kind::centered_edge:
        case noise_kind::completion_sampling:
            require(p > 0.0 && p < 1.0, errc::bad_density, "edge/sampling density must lie in (0, 1)");
            break;
        case noise_kind::partition_edge:
            part.validate();
            require(part.n() == n, errc::bad_partition,
                    "partition covers " + std::to_string(part.n()) + " vertices, matrix has " +
                        std::to_string(n));
            require(part.cross > 0.0, errc::bad_density,
                    "partition noise needs a positive cross density");
            break;
        default:
            break;
    }
    double k = resolved_k(n), m2 = resolved_second_moment(n);
    require(m2 <= k * k * (1.0 + 1e-12), errc::bad_spec, "second moment above K^2");
}

double noise_spec::resolved_k(int n) const {
    if (k_bound > 0.0) return scale * k_bound;
    switch (kind) {
        case noise_kind::rademacher:
            return scale;
        case noise_kind::truncated_gaussian:
            return scale * 20.0 * std::sqrt(std::log(static_cast<double>(std::max(n, 2))));
        case noise_kind::centered_edge:
            return scale * std::max(1.0, p / (1.0 - p));
        case noise_kind::partition_edge: {
            double q = part.cross;
            double k = std::max(1.0, q / (1.0 - q));
            for (double pd : part.densities)
                k = std::max({k, (1.0 - pd) / (1.0 - q), pd / (1.0 - q)});
            return scale * k;
        }
        case noise_kind::completion_sampling:
            fail(errc::bad_spec, "completion K depends on the signal amplitude; use completion_k");
    }
    return scale;
}

double noise_spec::resolved_second_moment(int n) const {
    if (second_moment > 0.0) return scale * scale * second_moment;
    switch (kind) {
        case noise_kind::rademacher:
            return scale * scale;
        case noise_kind::truncated_gaussian:
            (void)n;
            return scale * scale; // truncation only shrinks the variance
        case noise_kind::centered_edge:
            return scale * scale * (p / (1.0 - p));
        case noise_kind::partition_edge: {
            double q = part.cross;
            double m2 = q / (1.0 - q);
            for (double pd : part.densities) {
                double within = pd * (1.0 - pd) / ((1.0 - q) * (1.0 - q));
                m2 = std::max(m2, within);
            }
            return scale * scale * m2;
        }
        case noise_kind::completion_sampling:
            fail(errc::bad_spec,
                 "completion second moment depends on the signal amplitude; use completion_second_moment");
    }
    return scale * scale;
}

double noise_spec::completion_k(double amp) const {
    require(kind == noise_kind::completion_sampling, errc::bad_spec, "not a completion spec");
    require(amp >= 0.0, errc::non_positive_input, "amplitude must be >= 0");
    if (k_bound > 0.0) return k_bound;
    return amp / p;
}

double noise_spec::completion_second_moment(double amp) const {
    require(kind == noise_kind::completion_sampling, errc::bad_spec, "not a completion spec");
    if (second_moment > 0.0) return second_moment;
    return amp * amp * (1.0 - p) / p;
}

sym_matrix draw_noise(const noise_spec& s, int n, std::uint32_t trial) {
    require(s.kind != noise_kind::completion_sampling, errc::bad_spec,
            "completion sampling needs the signal; use draw_completion_noise");
    s.validate(n);
    sym_matrix e(n);
    if (s.scale == 0.0) return e; // zero-noise spec
    double k = s.resolved_k(n);

    for (int i = 0; i < n; ++i) {
        for (int j = i; j < n; ++j) {
            rng_stream g(s.seed, rng_purpose::noise_entry, trial, pair_entry(i, j, n));
            double v = 0.0;
            switch (s.kind) {
                case noise_kind::rademacher:
                    v = g.next_bernoulli(0.5) ? 1.0 : -1.0;
                    break;
                case noise_kind::truncated_gaussian:
                    v = g.next_gaussian_truncated(k / s.scale);
                    break;
                case noise_kind::centered_edge:
                    v = g.next_bernoulli(s.p) ? 1.0 : -s.p / (1.0 - s.p);
                    break;
                case noise_kind::partition_edge: {
                    // Centered transformed edge indicator: same-block pairs
                    // use the block density, cross pairs the cross density.
                    int bi = 0, bj = 0, acc = 0;
                    for (int b = 0; b < s.part.r(); ++b) {
                        acc += s.part.sizes[b];
                        if (i >= acc - s.part.sizes[b] && i < acc) bi = b;
                        if (j >= acc - s.part.sizes[b] && j < acc) bj = b;
                    }
                    double q = s.part.cross;
                    double pe = bi == bj ? s.part.densities[bi] : q;
                    double mean = (pe - q) / (1.0 - q);
                    v = (g.next_bernoulli(pe) ? 1.0 : -q / (1.0 - q)) - mean;
                    break;
                }
                case noise_kind::completion_sampling:
                    break; // rejected above
            }
            e.set(i, j, s.scale * v);
        }
    }
    return e;
}

rect_matrix draw_completion_noise(const noise_spec& s, const rect_matrix& a, std::uint32_t trial) {
    require(s.kind == noise_kind::completion_sampling, errc::bad_spec,
            "draw_completion_noise needs a completion_sampling spec");
    require(s.p > 0.0 && s.p < 1.0, errc::bad_density, "sampling density must lie in (0, 1)");
    rect_matrix e(a.rows(), a.cols());
    for (int i = 0; i < a.rows(); ++i)
        for (int j = 0; j < a.cols(); ++j) {
            rng_stream g(s.seed, rng_purpose::observe_mask, trial, pair_entry(i, j, a.cols()));
            double v = a(i, j);
            e(i, j) = g.next_bernoulli(s.p) ? v * (1.0 - s.p) / s.p : -v;
        }
    return e;
}

clique_instance clique_signal(int n, int k, std::uint64_t seed, std::uint32_t trial) {
    require(n >= 1, errc::bad_size, "clique signal needs n >= 1");
    require(k >= 1 && k <= n, errc::bad_size,
            "clique size " + std::to_string(k) + " outside [1, " + std::to_string(n) + "]");
    // Partial Fisher-Yates: the first k slots of a virtual shuffle.
    std::vector<int> pool(n);
    std::iota(pool.begin(), pool.end(), 0);
    rng_stream g(seed, rng_purpose::clique_placement, trial, 0);
    std::vector<int> members;
    members.reserve(k);
    for (int t = 0; t < k; ++t) {
        int pick = t + static_cast<int>(g.next_below(static_cast<std::uint64_t>(n - t)));
        std::swap(pool[t], pool[pick]);
        members.push_back(pool[t]);
    }
    index_set set(members, n);
    sym_matrix a(n);
    for (int x : set.ids())
        for (int y : set.ids())
            if (x <= y) a.set(x, y, 1.0);
    return {std::move(a), std::move(set)};
}

partition_instance partition_signal(const partition_spec& spec) {
    spec.validate();
    for (int b = 1; b < spec.r(); ++b)
        require(spec.sizes[b] <= spec.sizes[b - 1], errc::bad_size,
                "block sizes must be nonincreasing");
    for (double pd : spec.densities)
        require(pd > spec.cross, errc::bad_size,
                "block densities must exceed the cross density");
    int n = spec.n();
    sym_matrix a(n);
    std::vector<int> labels(n, 0);
    int start = 0;
    for (int b = 0; b < spec.r(); ++b) {
        double v = spec.block_value(b);
        for (int i = start; i < start + spec.sizes[b]; ++i) {
            labels[i] = b;
            for (int j = i; j < start + spec.sizes[b]; ++j) a.set(i, j, v);
        }
        start += spec.sizes[b];
    }
    return {std::move(a), std::move(labels)};
}

rect_matrix integer_block_signal(int m, int n, const std::vector<int>& block_rows,
                                 const std::vector<int>& block_cols, const rect_matrix& values) {
    auto total = [](const std::vector<int>& v) {
        int s = 0;
        for (int k : v) {
            if (k < 1) return -1;
            s += k;
        }
        return s;
    };
    require(total(block_rows) == m, errc::bad_partition, "row blocks must sum to the row count");
    require(total(block_cols) == n, errc::bad_partition, "column blocks must sum to the column count");
    require(values.rows() == static_cast<int>(block_rows.size()) &&
                values.cols() == static_cast<int>(block_cols.size()),
            errc::bad_partition, "values shape must match the block grid");
    rect_matrix a(m, n);
    int r0 = 0;
    for (size_t bi = 0; bi < block_rows.size(); ++bi) {
        int c0 = 0;
        for (size_t bj = 0; bj < block_cols.size(); ++bj) {
            double v = values(static_cast<int>(bi), static_cast<int>(bj));
            require(v == std::floor(v), errc::bad_partition, "block values must be integers");
            for (int i = r0; i < r0 + block_rows[bi]; ++i)
                for (int j = c0; j < c0 + block_cols[bj]; ++j) a(i, j) = v;
            c0 += block_cols[bj];
        }
        r0 += block_rows[bi];
    }
    return a;
}

sym_matrix adjacency_transform(const sym_matrix& adj, double q) {
    require(q > 0.0 && q < 1.0, errc::bad_density, "null density must lie in (0, 1)");
    int n = adj.n();
    double miss = -q / (1.0 - q);
    sym_matrix out(n);
    for (int i = 0; i < n; ++i)
        for (int j = i; j < n; ++j) {
            double v = adj(i, j);
            require(v == 0.0 || v == 1.0, errc::not_binary,
                    "adjacency entry (" + std::to_string(i) + "," + std::to_string(j) +
                        ") is not 0/1");
            out.set(i, j, i == j ? miss : (v == 1.0 ? 1.0 : miss));
        }
    return out;
}

planted_graph sample_clique_graph(int n, int k, double q, std::uint64_t seed, std::uint32_t trial) {
    require(q >= 0.0 && q < 1.0, errc::bad_density, "background density must lie in [0, 1)");
    clique_instance sig = clique_signal(n, k, seed, trial);
    sym_matrix adj(n);
    for (int i = 0; i < n; ++i)
        for (int j = i + 1; j < n; ++j) {
            bool in_clique = sig.members.contains(i) && sig.members.contains(j);
            bool edge = in_clique;
            if (!edge) {
                rng_stream g(seed, rng_purpose::graph_edge, trial, pair_entry(i, j, n));
                edge = g.next_bernoulli(q);
            }
            adj.set(i, j, edge ? 1.0 : 0.0);
        }
    std::vector<int> labels(n, 1);
    for (int v : sig.members.ids()) labels[v] = 0;
    partition_spec part;
    part.sizes = {k, n - k};
    part.densities = {1.0, q};
    part.cross = q;
    return {std::move(adj), std::move(labels), std::move(part)};
}

planted_graph sample_partition_graph(const partition_spec& spec, std::uint64_t seed,
                                     std::uint32_t trial) {
    spec.validate();
    int n = spec.n();
    std::vector<int> labels(n, 0);
    int start = 0;
    for (int b = 0; b < spec.r(); ++b) {
        for (int i = start; i < start + spec.sizes[b]; ++i) labels[i] = b;
        start += spec.sizes[b];
    }
    sym_matrix adj(n);
    for (int i = 0; i < n; ++i)
        for (int j = i + 1; j < n; ++j) {
            double pe = labels[i] == labels[j] ? spec.densities[labels[i]] : spec.cross;
            bool edge;
            if (pe >= 1.0) {
                edge = true;
            } else if (pe <= 0.0) {
                edge = false;
            } else {
                rng_stream g(seed, rng_purpose::graph_edge, trial, pair_entry(i, j, n));
                edge = g.next_bernoulli(pe);
            }
            adj.set(i, j, edge ? 1.0 : 0.0);
        }
    return {std::move(adj), std::move(labels), spec};
}

double signal_summary::sigma_at(int i) const {
    require(i >= 1 && i <= r + 1, errc::index_out_of_range, "sigma index " + std::to_string(i));
    return sigma[i - 1];
}

double signal_summary::gap_at(int i) const {
    require(i >= 1 && i <= r, errc::index_out_of_range, "gap index " + std::to_string(i));
    return gap[i - 1];
}

double signal_summary::delta_at(int i) const {
    require(i >= 1 && i <= r, errc::index_out_of_range, "delta index " + std::to_string(i));
    return delta[i - 1];
}

double signal_summary::kappa_at(int i) const {
    require(i >= 1 && i <= r, errc::index_out_of_range, "kappa index " + std::to_string(i));
    return kappa[i - 1];
}

bool signal_summary::degenerate_at(int i) const {
    require(i >= 1 && i <= r, errc::index_out_of_range, "degenerate index " + std::to_string(i));
    return degenerate[i - 1];
}

namespace {

signal_summary summarize_values(const std::vector<double>& values, int r, double resolution, int n) {
    require(r >= 1 && r <= static_cast<int>(values.size()), errc::rank_exceeded,
            "summary rank " + std::to_string(r) + " outside the spectrum");
    signal_summary s;
    s.n = n;
    s.r = r;
    s.sigma.assign(values.begin(), values.begin() + r);
    s.sigma.push_back(r < static_cast<int>(values.size()) ? values[r] : 0.0);
    for (int i = 1; i <= r; ++i) s.gap.push_back(s.sigma[i - 1] - s.sigma[i]);
    for (int i = 1; i <= r; ++i) {
        double prev = i == 1 ? inf : s.gap[i - 2];
        s.delta.push_back(std::min(prev, s.gap[i - 1]));
    }
    require(s.sigma[0] > 0.0, errc::zero_matrix, "summary needs a nonzero leading value");
    for (int i = 1; i <= r; ++i) s.kappa.push_back(s.sigma[0] / s.sigma[i - 1]);
    for (int i = 1; i <= r; ++i) s.degenerate.push_back(s.gap[i - 1] <= resolution);
    return s;
}

} // namespace

signal_summary summarize_signal(const spectral_decomposition& d, int r) {
    signal_summary s = summarize_values(d.sigma(), r, d.rank_tol(), d.n());
    double m = 0.0;
    for (int i = 1; i <= r; ++i) {
        const double* u = d.vector(i);
        for (int l = 0; l < d.n(); ++l) m = std::max(m, std::fabs(u[l]));
    }
    s.u_inf = s.top_inf = s.bottom_inf = m;
    return s;
}

signal_summary summarize_rect_signal(const spectral_decomposition& d, int r, int rows, int cols) {
    require(rows + cols == d.n(), errc::shape_mismatch,
            "rows+cols must match the symmetrized dimension");
    std::vector<double> pos = rect_singular_values(d);
    signal_summary s = summarize_values(pos, r, d.rank_tol(), d.n());
    double mt = 0.0, mb = 0.0;
    int seen = 0;
    for (int i = 1; i <= d.n() && seen < r; ++i) {
        if (d.sign_at(i) != 1) continue;
        ++seen;
        const double* w = d.vector(i);
        for (int l = 0; l < rows; ++l) mt = std::max(mt, std::fabs(w[l]));
        for (int l = rows; l < d.n(); ++l) mb = std::max(mb, std::fabs(w[l]));
    }
    // Eigenvectors of the symmetrization are (u; v)/sqrt(2); undo the scale
    // so the summary reports max |entry| over [U, V] itself.
    s.top_inf = mt * std::sqrt(2.0);
    s.bottom_inf = mb * std::sqrt(2.0);
    s.u_inf = std::max(s.top_inf, s.bottom_inf);
    return s;
}

} // namespace svp
