#pragma once

// Simultaneous Optimistic Optimisation over a hierarchical partition.
//
// The engine is generic in the cell type: anything that can be split into an
// odd number K of children (middle child sharing the parent's center) and
// scored can be searched. `BoxPartition` gives the classic fixed-dimension
// hyperrectangle version; multilevel.hpp plugs in curve cells.
//
// Scores follow the maximization convention. A score of -inf marks an
// infeasible cell: it is stored and traced but never selected for expansion.

#include "mlsoo/errors.hpp"

#include <algorithm>
#include <cmath>
#include <concepts>
#include <cstddef>
#include <functional>
#include <limits>
#include <optional>
#include <span>
#include <string>
#include <utility>
#include <vector>

namespace mlsoo {

inline constexpr double kNegInf = -std::numeric_limits<double>::infinity();

struct Interval {
  double lower = 0.0;
  double upper = 1.0;
};

/// Axis-aligned search box; at least one dimension, lower < upper everywhere.
class Box {
public:
  explicit Box(std::vector<Interval> dims) : dims_(std::move(dims)) {
    if (dims_.empty())
      throw ConfigError("box needs at least one dimension");
    for (std::size_t d = 0; d < dims_.size(); ++d)
      if (!(dims_[d].lower < dims_[d].upper))
        throw ConfigError("box dimension " + std::to_string(d) + " has lower >= upper");
  }

  static Box uniform(std::size_t dim, double lower, double upper) {
    return Box(std::vector<Interval>(dim, Interval{lower, upper}));
  }

  std::size_t size() const noexcept { return dims_.size(); }
  const Interval& operator[](std::size_t d) const { return dims_[d]; }
  std::span<const Interval> dims() const noexcept { return dims_; }

private:
  std::vector<Interval> dims_;
};

/// Maximum expandable depth as a function of the fresh evaluation count.
using DepthCap = std::function<std::size_t(std::size_t)>;

/// ceil(sqrt(n)), computed in integers so perfect squares are exact.
inline std::size_t h_max_default(std::size_t n) {
  if (n == 0)
    return 0;
  auto r = static_cast<std::size_t>(std::sqrt(static_cast<double>(n)));
  while (r * r > n)
    --r;
  while (r * r < n)
    ++r;
  return r;
}

/// One row per fresh objective evaluation.
struct TraceRecord {
  std::size_t n = 0;
  double best_score = kNegInf;
};

template <class Cell>
struct Node {
  static constexpr std::size_t npos = static_cast<std::size_t>(-1);

  Cell cell;
  std::size_t depth = 0;
  double score = kNegInf;
  std::size_t parent = npos;
  std::vector<std::size_t> children;

  bool is_leaf() const noexcept { return children.empty(); }
};

/// Partition tree. Nodes live in creation order, so a node's index is also
/// its creation rank (used for deterministic tie-breaks).
template <class Cell>
class Tree {
public:
  using node_type = Node<Cell>;
  static constexpr std::size_t npos = node_type::npos;

  bool empty() const noexcept { return nodes_.empty(); }
  std::size_t size() const noexcept { return nodes_.size(); }
  const node_type& operator[](std::size_t i) const { return nodes_[i]; }
  std::span<const node_type> nodes() const noexcept { return nodes_; }
  const node_type& root() const { return nodes_.front(); }

  /// Deepest depth currently present.
  std::size_t depth() const noexcept { return leaves_.empty() ? 0 : leaves_.size() - 1; }

  std::span<const std::size_t> leaves_at(std::size_t h) const {
    if (h >= leaves_.size())
      return {};
    return leaves_[h];
  }

  /// Index of the highest-scoring node; earliest created wins ties.
  std::size_t best() const noexcept { return best_; }

  std::size_t add_root(Cell cell, double score) {
    nodes_.clear();
    leaves_.clear();
    nodes_.push_back(node_type{std::move(cell), 0, score, npos, {}});
    leaves_.push_back({0});
    best_ = 0;
    return 0;
  }

  /// Attaches `cells` as the children of leaf `parent`. Returns the new indices.
  std::vector<std::size_t> add_children(std::size_t parent, std::vector<Cell> cells,
                                        std::span<const double> scores) {
    if (parent >= nodes_.size() || !nodes_[parent].is_leaf())
      throw std::logic_error("add_children: parent must be an existing leaf");
    if (cells.size() != scores.size() || cells.empty())
      throw std::logic_error("add_children: cells/scores size mismatch");

    const std::size_t h = nodes_[parent].depth + 1;
    auto& parent_level = leaves_[h - 1];
    parent_level.erase(std::find(parent_level.begin(), parent_level.end(), parent));
    if (leaves_.size() <= h)
      leaves_.resize(h + 1);

    std::vector<std::size_t> ids;
    ids.reserve(cells.size());
    for (std::size_t k = 0; k < cells.size(); ++k) {
      const std::size_t id = nodes_.size();
      nodes_.push_back(node_type{std::move(cells[k]), h, scores[k], parent, {}});
      leaves_[h].push_back(id);
      if (scores[k] > nodes_[best_].score)
        best_ = id;
      ids.push_back(id);
    }
    nodes_[parent].children = ids;
    return ids;
  }

  /// The maximal-score leaf at depth h if its score is >= v_max, else none.
  /// Infeasible (-inf) leaves are never returned.
  std::optional<std::size_t> select_expandable(std::size_t h, double v_max) const {
    std::optional<std::size_t> pick;
    for (std::size_t id : leaves_at(h)) {
      const double s = nodes_[id].score;
      if (s == kNegInf)
        continue;
      if (!pick || s > nodes_[*pick].score)
        pick = id;
    }
    if (pick && nodes_[*pick].score >= v_max)
      return pick;
    return std::nullopt;
  }

private:
  std::vector<node_type> nodes_;
  std::vector<std::vector<std::size_t>> leaves_;  // leaf ids per depth, creation order
  std::size_t best_ = npos;
};

/// A cell family the engine can search: split into K children (K odd, the
/// middle one sharing the parent's center) and score at the center.
template <class P>
concept Partition = requires(const P& p, const typename P::cell_type& c) {
  typename P::cell_type;
  { p.split(c) } -> std::same_as<std::vector<typename P::cell_type>>;
  { p.score(c) } -> std::convertible_to<double>;
};

struct SooOptions {
  std::size_t budget = 1000;
  DepthCap depth_cap = h_max_default;
  /// When false, the middle child is re-evaluated and charged like the others.
  bool reuse_center = true;
};

template <class Cell>
struct SooResult {
  Tree<Cell> tree;
  std::vector<TraceRecord> trace;
  std::size_t evaluations = 0;

  const Node<Cell>& best() const { return tree[tree.best()]; }
};

template <Partition P>
class Soo {
public:
  using cell_type = typename P::cell_type;

  Soo(P partition, SooOptions options)
      : partition_(std::move(partition)), options_(std::move(options)) {
    if (options_.budget < 1)
      throw ConfigError("budget must be at least 1");
    if (!options_.depth_cap)
      options_.depth_cap = h_max_default;
  }

  /// Evaluates the root cell and resets all counters.
  void initialize(cell_type root) {
    n_ = 0;
    trace_.clear();
    const double s = evaluate(root);
    tree_.add_root(std::move(root), s);
    record();
  }

  /// Splits leaf `id` and evaluates the new children.
  std::vector<std::size_t> expand(std::size_t id) {
    auto cells = partition_.split(tree_[id].cell);
    const std::size_t k = cells.size();
    if (k < 2)
      throw std::logic_error("partition produced fewer than two children");
    const bool reuse = options_.reuse_center && k % 2 == 1;
    const std::size_t mid = k / 2;

    std::vector<double> scores(k);
    std::vector<bool> fresh(k, true);
    for (std::size_t i = 0; i < k; ++i) {
      if (reuse && i == mid) {
        scores[i] = tree_[id].score;
        fresh[i] = false;
      } else {
        scores[i] = evaluate(cells[i]);
      }
    }

    // Children are attached first so the per-evaluation trace sees the best
    // value after each fresh evaluation in order.
    const double before = tree_[tree_.best()].score;
    auto ids = tree_.add_children(id, std::move(cells), scores);
    double running = before;
    for (std::size_t i = 0; i < k; ++i) {
      if (!fresh[i])
        continue;
      running = std::max(running, scores[i]);
      ++n_;
      trace_.push_back(TraceRecord{n_, running});
    }
    return ids;
  }

  /// One outer pass over depths 0..min(depth, h_max(n)). Stops early once the
  /// budget is reached. Returns the number of expansions performed.
  std::size_t sweep() {
    double v_max = kNegInf;
    std::size_t expansions = 0;
    const std::size_t top = std::min(tree_.depth(), options_.depth_cap(n_));
    for (std::size_t h = 0; h <= top; ++h) {
      if (n_ >= options_.budget)
        break;
      auto pick = tree_.select_expandable(h, v_max);
      if (!pick)
        continue;
      v_max = tree_[*pick].score;
      expand(*pick);
      ++expansions;
    }
    return expansions;
  }

  /// Root evaluation followed by sweeps until the budget is spent or no leaf
  /// can be expanded any more.
  SooResult<cell_type> run(cell_type root) {
    initialize(std::move(root));
    while (n_ < options_.budget) {
      if (sweep() == 0)
        break;
    }
    return SooResult<cell_type>{tree_, trace_, n_};
  }

  const Tree<cell_type>& tree() const noexcept { return tree_; }
  Tree<cell_type>& tree() noexcept { return tree_; }
  std::span<const TraceRecord> trace() const noexcept { return trace_; }
  std::size_t evaluations() const noexcept { return n_; }
  const P& partition() const noexcept { return partition_; }
  const SooOptions& options() const noexcept { return options_; }

private:
  double evaluate(const cell_type& cell) const {
    const double s = partition_.score(cell);
    if (std::isnan(s))
      throw ObjectiveError("objective returned NaN");
    return s;
  }

  void record() {
    ++n_;
    trace_.push_back(TraceRecord{n_, tree_[tree_.best()].score});
  }

  P partition_;
  SooOptions options_;
  Tree<cell_type> tree_;
  std::vector<TraceRecord> trace_;
  std::size_t n_ = 0;
};

// ---------------------------------------------------------------------------
// Fixed-dimension hyperrectangle cells.

struct BoxCell {
  std::vector<double> center;
  std::vector<double> width;

  static BoxCell from_box(const Box& box) {
    BoxCell c;
    for (const auto& iv : box.dims()) {
      c.center.push_back(0.5 * (iv.lower + iv.upper));
      c.width.push_back(iv.upper - iv.lower);
    }
    return c;
  }
};

/// Longest dimension; ties go to the lowest index.
inline std::size_t longest_dimension(std::span<const double> widths) {
  std::size_t best = 0;
  for (std::size_t d = 1; d < widths.size(); ++d)
    if (widths[d] > widths[best] * (1.0 + 1e-12))
      best = d;
  return best;
}

/// Splits `width` around `center` into `arity` equal parts.
inline std::vector<std::pair<double, double>> split_interval(double center, double width,
                                                             std::size_t arity) {
  std::vector<std::pair<double, double>> parts(arity);
  const double w = width / static_cast<double>(arity);
  const auto mid = static_cast<std::ptrdiff_t>(arity / 2);
  for (std::size_t i = 0; i < arity; ++i) {
    const auto off = static_cast<std::ptrdiff_t>(i) - mid;
    parts[i] = {off == 0 ? center : center + static_cast<double>(off) * w, w};
  }
  return parts;
}

template <class Objective>
  requires std::invocable<const Objective&, std::span<const double>>
class BoxPartition {
public:
  using cell_type = BoxCell;

  explicit BoxPartition(Objective f, std::size_t arity = 3) : f_(std::move(f)), arity_(arity) {
    if (arity_ < 2)
      throw ConfigError("split arity must be at least 2");
  }

  std::vector<BoxCell> split(const BoxCell& c) const {
    const std::size_t d = longest_dimension(c.width);
    std::vector<BoxCell> out;
    out.reserve(arity_);
    for (auto [center, width] : split_interval(c.center[d], c.width[d], arity_)) {
      BoxCell child = c;
      child.center[d] = center;
      child.width[d] = width;
      out.push_back(std::move(child));
    }
    return out;
  }

  double score(const BoxCell& c) const { return static_cast<double>(f_(std::span<const double>(c.center))); }

private:
  Objective f_;
  std::size_t arity_;
};

/// Maximizes `f` over `box` with plain SOO.
template <class Objective>
SooResult<BoxCell> soo_run(Objective f, const Box& box, std::size_t budget,
                           DepthCap cap = h_max_default, std::size_t arity = 3,
                           bool reuse_center = true) {
  Soo engine(BoxPartition<Objective>(std::move(f), arity),
             SooOptions{budget, std::move(cap), reuse_center});
  return engine.run(BoxCell::from_box(box));
}

} // namespace mlsoo
