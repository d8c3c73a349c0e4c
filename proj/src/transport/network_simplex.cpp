// Network simplex for the complete bipartite transportation problem.
//
// Node layout: rows are nodes [0, n), columns are nodes [n, n+m) and an
// artificial root is node n+m. Arc e < n*m runs from row e/m to column e%m
// with cost C[e]; arc n*m+u joins node u with the root. The start basis ships
// every supply through the root on artificial arcs (big-M cost on the demand
// side), so the first feasible tree is trivial and pricing drives the
// artificial arcs out.
//
// The spanning tree is kept as adjacency lists plus parent/depth/potential
// arrays. After each pivot only the subtree that changes its attachment is
// re-walked. The leaving arc follows the strongly-feasible-tree rule, which
// rules out cycling; pricing is block search with a Bland's-rule fallback
// after a long run of degenerate pivots.

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <limits>
#include <numeric>
#include <string>
#include <type_traits>
#include <vector>

#include "genmetrics/error.hpp"
#include "genmetrics/transport.hpp"

namespace genmetrics {

namespace {

constexpr double kWeightSumTolerance = 1e-8;

template <typename Flow>
class NetworkSimplex {
public:
    NetworkSimplex(std::span<const double> cost, std::size_t rows, std::size_t cols,
                   std::vector<Flow> supply, const EmdOptions& options)
        : cost_(cost),
          rows_(rows),
          cols_(cols),
          nodes_(rows + cols),
          root_(rows + cols),
          real_arcs_(rows * cols),
          supply_(std::move(supply)),
          options_(options) {}

    void run();

    Flow flow(std::size_t arc) const { return flow_[arc]; }
    std::size_t pivots() const { return pivots_; }
    std::size_t degenerate_pivots() const { return degenerate_; }

private:
    static constexpr std::int8_t kTree = 0;
    static constexpr std::int8_t kLower = 1;

    std::size_t src(std::size_t arc) const {
        return arc < real_arcs_ ? arc / cols_ : art_src_[arc - real_arcs_];
    }
    std::size_t dst(std::size_t arc) const {
        return arc < real_arcs_ ? rows_ + arc % cols_ : art_dst_[arc - real_arcs_];
    }
    double arc_cost(std::size_t arc) const {
        return arc < real_arcs_ ? cost_[arc] : art_cost_[arc - real_arcs_];
    }
    std::size_t other_end(std::size_t arc, std::size_t node) const {
        const auto s = src(arc);
        return s == node ? dst(arc) : s;
    }

    void init();
    bool price_block(std::size_t& entering);
    bool price_bland(std::size_t& entering);
    void pivot(std::size_t entering);
    void remove_tree_arc(std::size_t node, std::size_t arc);
    void rehang(std::size_t u_in, std::size_t v_in, std::size_t arc);

    std::span<const double> cost_;
    std::size_t rows_, cols_, nodes_, root_, real_arcs_;
    std::vector<Flow> supply_;
    EmdOptions options_;

    std::vector<Flow> flow_;
    std::vector<std::int8_t> state_;
    std::vector<std::size_t> art_src_, art_dst_;
    std::vector<double> art_cost_;

    std::vector<std::size_t> parent_, pred_, depth_;
    std::vector<bool> pred_up_;  // pred arc points from the node to its parent
    std::vector<double> pot_;
    std::vector<std::vector<std::size_t>> adj_;
    std::vector<std::size_t> stack_;

    double eps_ = 0.0;
    std::size_t block_size_ = 0;
    std::size_t next_arc_ = 0;
    std::size_t pivots_ = 0;
    std::size_t degenerate_ = 0;
};

template <typename Flow>
void NetworkSimplex<Flow>::init() {
    double max_cost = 0.0;
    for (const double c : cost_) max_cost = std::max(max_cost, c);
    const double art = (max_cost + 1.0) * static_cast<double>(nodes_ + 1);
    // Reduced costs are differences of potentials as large as `art`.
    eps_ = 64.0 * std::numeric_limits<double>::epsilon() * art;

    flow_.assign(real_arcs_ + nodes_, Flow{0});
    state_.assign(real_arcs_, kLower);
    art_src_.resize(nodes_);
    art_dst_.resize(nodes_);
    art_cost_.resize(nodes_);

    parent_.assign(nodes_ + 1, 0);
    pred_.assign(nodes_ + 1, 0);
    depth_.assign(nodes_ + 1, 0);
    pred_up_.assign(nodes_ + 1, false);
    pot_.assign(nodes_ + 1, 0.0);
    adj_.assign(nodes_ + 1, {});
    adj_[root_].reserve(nodes_);

    for (std::size_t u = 0; u < nodes_; ++u) {
        const std::size_t arc = real_arcs_ + u;
        parent_[u] = root_;
        pred_[u] = arc;
        depth_[u] = 1;
        if (supply_[u] >= Flow{0}) {
            art_src_[u] = u;
            art_dst_[u] = root_;
            art_cost_[u] = 0.0;
            flow_[arc] = supply_[u];
            pred_up_[u] = true;
            pot_[u] = 0.0;
        } else {
            art_src_[u] = root_;
            art_dst_[u] = u;
            art_cost_[u] = art;
            flow_[arc] = -supply_[u];
            pred_up_[u] = false;
            pot_[u] = art;
        }
        adj_[u].push_back(arc);
        adj_[root_].push_back(arc);
    }

    block_size_ = std::max<std::size_t>(
        10, static_cast<std::size_t>(std::sqrt(static_cast<double>(real_arcs_))));
    if (options_.max_pivots == 0) {
        options_.max_pivots = std::max<std::size_t>(1'000'000, 50 * real_arcs_);
    }
    if (options_.bland_threshold == 0) options_.bland_threshold = nodes_ + 1;
}

// Most negative reduced cost within the first block that contains one.
template <typename Flow>
bool NetworkSimplex<Flow>::price_block(std::size_t& entering) {
    double best = -eps_;
    bool found = false;
    std::size_t scanned_in_block = 0;
    std::size_t i = next_arc_ / cols_;
    std::size_t j = next_arc_ % cols_;
    for (std::size_t step = 0; step < real_arcs_; ++step) {
        const std::size_t arc = i * cols_ + j;
        if (state_[arc] == kLower) {
            const double rc = cost_[arc] + pot_[i] - pot_[rows_ + j];
            if (rc < best) {
                best = rc;
                entering = arc;
                found = true;
            }
        }
        if (++j == cols_) {
            j = 0;
            if (++i == rows_) i = 0;
        }
        if (++scanned_in_block == block_size_) {
            if (found) {
                next_arc_ = i * cols_ + j;
                return true;
            }
            scanned_in_block = 0;
        }
    }
    if (found) next_arc_ = i * cols_ + j;
    return found;
}

template <typename Flow>
bool NetworkSimplex<Flow>::price_bland(std::size_t& entering) {
    for (std::size_t arc = 0; arc < real_arcs_; ++arc) {
        if (state_[arc] != kLower) continue;
        const double rc = cost_[arc] + pot_[arc / cols_] - pot_[rows_ + arc % cols_];
        if (rc < -eps_) {
            entering = arc;
            return true;
        }
    }
    return false;
}

template <typename Flow>
void NetworkSimplex<Flow>::remove_tree_arc(std::size_t node, std::size_t arc) {
    auto& list = adj_[node];
    const auto it = std::find(list.begin(), list.end(), arc);
    *it = list.back();
    list.pop_back();
}

// Re-attaches the subtree containing u_in below v_in through `arc`, then
// refreshes parent, depth and potentials inside that subtree.
template <typename Flow>
void NetworkSimplex<Flow>::rehang(std::size_t u_in, std::size_t v_in, std::size_t arc) {
    parent_[u_in] = v_in;
    pred_[u_in] = arc;
    pred_up_[u_in] = src(arc) == u_in;
    stack_.clear();
    stack_.push_back(u_in);
    while (!stack_.empty()) {
        const std::size_t x = stack_.back();
        stack_.pop_back();
        const std::size_t p = parent_[x];
        const std::size_t via = pred_[x];
        depth_[x] = depth_[p] + 1;
        // Tree arcs have zero reduced cost: cost + pot[src] - pot[dst] == 0.
        pot_[x] = pred_up_[x] ? pot_[p] - arc_cost(via) : pot_[p] + arc_cost(via);
        for (const std::size_t a : adj_[x]) {
            if (a == via) continue;
            const std::size_t y = other_end(a, x);
            parent_[y] = x;
            pred_[y] = a;
            pred_up_[y] = src(a) == y;
            stack_.push_back(y);
        }
    }
}

template <typename Flow>
void NetworkSimplex<Flow>::pivot(std::size_t entering) {
    const std::size_t s = src(entering);
    const std::size_t t = dst(entering);

    std::size_t u = s, v = t;
    while (depth_[u] > depth_[v]) u = parent_[u];
    while (depth_[v] > depth_[u]) v = parent_[v];
    while (u != v) {
        u = parent_[u];
        v = parent_[v];
    }
    const std::size_t join = u;

    // Cycle orientation: join -> ... -> s -> t -> ... -> join. The leaving arc
    // is the last blocking arc met along it (strongly feasible tree rule).
    constexpr Flow kInfinite = std::numeric_limits<Flow>::max();
    Flow delta = kInfinite;
    std::size_t u_out = root_;
    bool on_source_side = false;
    for (std::size_t x = s; x != join; x = parent_[x]) {
        if (pred_up_[x] && flow_[pred_[x]] < delta) {
            delta = flow_[pred_[x]];
            u_out = x;
            on_source_side = true;
        }
    }
    for (std::size_t x = t; x != join; x = parent_[x]) {
        if (!pred_up_[x] && flow_[pred_[x]] <= delta) {
            delta = flow_[pred_[x]];
            u_out = x;
            on_source_side = false;
        }
    }
    if (u_out == root_) fail(ErrorCode::solver_failure, "transport cycle has no blocking arc");
    if constexpr (std::is_floating_point_v<Flow>) delta = std::max(delta, Flow{0});

    if (delta > Flow{0}) {
        flow_[entering] += delta;
        for (std::size_t x = s; x != join; x = parent_[x]) {
            flow_[pred_[x]] += pred_up_[x] ? -delta : delta;
        }
        for (std::size_t x = t; x != join; x = parent_[x]) {
            flow_[pred_[x]] += pred_up_[x] ? delta : -delta;
        }
    } else {
        ++degenerate_;
    }

    const std::size_t leaving = pred_[u_out];
    flow_[leaving] = Flow{0};
    if (leaving < real_arcs_) state_[leaving] = kLower;
    remove_tree_arc(u_out, leaving);
    remove_tree_arc(parent_[u_out], leaving);
    state_[entering] = kTree;
    adj_[s].push_back(entering);
    adj_[t].push_back(entering);

    const std::size_t u_in = on_source_side ? s : t;
    const std::size_t v_in = on_source_side ? t : s;
    rehang(u_in, v_in, entering);
}

template <typename Flow>
void NetworkSimplex<Flow>::run() {
    init();
    std::size_t degenerate_streak = 0;
    std::size_t entering = 0;
    while (true) {
        const bool bland = degenerate_streak >= options_.bland_threshold;
        const bool found = bland ? price_bland(entering) : price_block(entering);
        if (!found) break;
        if (pivots_ >= options_.max_pivots) {
            fail(ErrorCode::solver_failure,
                 "network simplex exceeded its cap of " + std::to_string(options_.max_pivots) +
                     " pivots without reaching optimality");
        }
        const std::size_t before = degenerate_;
        pivot(entering);
        ++pivots_;
        degenerate_streak = degenerate_ > before ? degenerate_streak + 1 : 0;
    }

    for (std::size_t u = 0; u < nodes_; ++u) {
        const Flow left = flow_[real_arcs_ + u];
        const bool clean = std::is_floating_point_v<Flow> ? std::abs(static_cast<double>(left)) <= 1e-12
                                                           : left == Flow{0};
        if (!clean) fail(ErrorCode::solver_failure, "transport problem ended with unrouted supply");
    }
}

std::vector<double> normalized_weights(std::span<const double> w, std::size_t expected,
                                       const char* side) {
    if (w.size() != expected) {
        fail(ErrorCode::validation, std::string(side) + " weights have " + std::to_string(w.size()) +
                                        " entries, expected " + std::to_string(expected));
    }
    double sum = 0.0;
    for (const double x : w) {
        if (!(x >= 0.0) || !std::isfinite(x)) {
            fail(ErrorCode::validation, std::string(side) + " weights must be finite and >= 0");
        }
        sum += x;
    }
    if (std::abs(sum - 1.0) > kWeightSumTolerance) {
        fail(ErrorCode::validation, std::string(side) + " weights sum to " + std::to_string(sum) +
                                        ", not 1");
    }
    std::vector<double> out(w.begin(), w.end());
    for (auto& x : out) x /= sum;
    return out;
}

}  // namespace

EmdResult solve_transport(std::span<const double> cost, std::size_t rows, std::size_t cols,
                          std::optional<std::span<const double>> row_weights,
                          std::optional<std::span<const double>> col_weights,
                          const EmdOptions& options) {
    if (rows == 0 || cols == 0) fail(ErrorCode::validation, "transport needs non-empty sides");
    if (cost.size() != rows * cols) fail(ErrorCode::dimension, "cost matrix shape mismatch");
    for (const double c : cost) {
        if (!std::isfinite(c)) fail(ErrorCode::validation, "transport costs must be finite");
    }

    EmdResult result;
    auto& plan = result.plan;
    plan.rows = rows;
    plan.cols = cols;
    plan.weights.assign(rows * cols, 0.0);

    if (!row_weights && !col_weights) {
        // Uniform marginals scaled to integers: row i ships cols units, column j
        // receives rows units; total rows*cols units.
        std::vector<std::int64_t> supply(rows + cols);
        std::fill_n(supply.begin(), rows, static_cast<std::int64_t>(cols));
        std::fill(supply.begin() + static_cast<std::ptrdiff_t>(rows), supply.end(),
                  -static_cast<std::int64_t>(rows));
        NetworkSimplex<std::int64_t> solver(cost, rows, cols, std::move(supply), options);
        solver.run();
        const double total = static_cast<double>(rows) * static_cast<double>(cols);
        for (std::size_t e = 0; e < rows * cols; ++e) {
            plan.weights[e] = static_cast<double>(solver.flow(e)) / total;
        }
        plan.row_marginals.assign(rows, 1.0 / static_cast<double>(rows));
        plan.col_marginals.assign(cols, 1.0 / static_cast<double>(cols));
        result.pivots = solver.pivots();
        result.degenerate_pivots = solver.degenerate_pivots();
    } else {
        std::vector<double> p = row_weights ? normalized_weights(*row_weights, rows, "row")
                                            : std::vector<double>(rows, 1.0 / static_cast<double>(rows));
        std::vector<double> q = col_weights ? normalized_weights(*col_weights, cols, "column")
                                            : std::vector<double>(cols, 1.0 / static_cast<double>(cols));
        std::vector<double> supply(rows + cols);
        std::copy(p.begin(), p.end(), supply.begin());
        std::transform(q.begin(), q.end(), supply.begin() + static_cast<std::ptrdiff_t>(rows),
                       [](double x) { return -x; });
        NetworkSimplex<double> solver(cost, rows, cols, std::move(supply), options);
        solver.run();
        for (std::size_t e = 0; e < rows * cols; ++e) plan.weights[e] = std::max(0.0, solver.flow(e));
        plan.row_marginals = std::move(p);
        plan.col_marginals = std::move(q);
        result.pivots = solver.pivots();
        result.degenerate_pivots = solver.degenerate_pivots();
    }

    double score = 0.0;
    for (std::size_t e = 0; e < rows * cols; ++e) {
        if (plan.weights[e] != 0.0) score += plan.weights[e] * cost[e];
    }
    result.score = std::max(0.0, score);
    return result;
}

EmdResult emd(const FeatureSet& a, const FeatureSet& b, std::optional<std::span<const double>> a_weights,
              std::optional<std::span<const double>> b_weights, const EmdOptions& options) {
    const auto dist = pairwise_distances(a, b);
    return solve_transport(dist.values(), a.rows(), b.rows(), a_weights, b_weights, options);
}

}  // namespace genmetrics
