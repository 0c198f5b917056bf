#include "learners/gbt.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

#include "core/error.hpp"

namespace geolift {

double RegressionTree::Predict(const Eigen::MatrixXd& x, Eigen::Index row) const {
  int id = 0;
  while (nodes[id].feature >= 0) {
    const TreeNode& n = nodes[id];
    id = x(row, n.feature) <= n.threshold ? n.left : n.right;
  }
  return nodes[id].value;
}

int RegressionTree::depth() const {
  std::vector<int> depth(nodes.size(), 0);
  int deepest = 0;
  for (size_t i = 0; i < nodes.size(); ++i) {
    if (nodes[i].feature < 0) continue;
    depth[nodes[i].left] = depth[i] + 1;
    depth[nodes[i].right] = depth[i] + 1;
    deepest = std::max(deepest, depth[i] + 1);
  }
  return deepest;
}

GbtModel::GbtModel(LearnerSpec spec, int train_rows, int n_features, double base_score,
                   std::vector<RegressionTree> trees)
    : FittedModel(spec, train_rows, n_features),
      base_score_(base_score),
      trees_(std::move(trees)) {}

Eigen::VectorXd GbtModel::PredictScore(const Eigen::MatrixXd& x, int n_stages) const {
  const int stages = std::clamp(n_stages, 0, static_cast<int>(trees_.size()));
  Eigen::VectorXd score = Eigen::VectorXd::Constant(x.rows(), base_score_);
  for (int m = 0; m < stages; ++m) {
    for (Eigen::Index r = 0; r < x.rows(); ++r) score[r] += trees_[m].Predict(x, r);
  }
  return score;
}

Eigen::VectorXd GbtModel::PredictImpl(const Eigen::MatrixXd& x) const {
  Eigen::VectorXd score = PredictScore(x, static_cast<int>(trees_.size()));
  if (spec().kind == LearnerKind::kGbtClassifier) {
    for (Eigen::Index r = 0; r < score.size(); ++r) {
      score[r] = ClipProbability(1.0 / (1.0 + std::exp(-score[r])));
    }
  }
  return score;
}

namespace {

double MeanLoss(bool classifier, const Eigen::VectorXd& y, const Eigen::VectorXd& score) {
  double total = 0.0;
  for (Eigen::Index r = 0; r < y.size(); ++r) {
    const double s = score[r];
    if (classifier) {
      // log(1 + e^s) - y s, computed stably
      total += std::max(s, 0.0) + std::log1p(std::exp(-std::abs(s))) - y[r] * s;
    } else {
      total += (s - y[r]) * (s - y[r]);
    }
  }
  return total / static_cast<double>(y.size());
}

void Gradient(bool classifier, const Eigen::VectorXd& y, const Eigen::VectorXd& score,
              Eigen::VectorXd& grad, Eigen::VectorXd& hess) {
  if (!classifier) {
    grad = score - y;
    hess.setOnes();
    return;
  }
  for (Eigen::Index r = 0; r < y.size(); ++r) {
    const double p = 1.0 / (1.0 + std::exp(-score[r]));
    grad[r] = p - y[r];
    hess[r] = p * (1.0 - p);
  }
}

// Column layout prepared once per fit.
struct FeatureIndex {
  enum class Kind { kConstant, kTwoValued, kDense };
  Kind kind = Kind::kConstant;
  // kDense: rows sorted by value, with the sorted values alongside.
  std::vector<int> order;
  std::vector<double> sorted_values;
  // kTwoValued: rows holding `listed_value` (the rarer one); the rest hold
  // `other_value`.
  std::vector<int> listed_rows;
  double listed_value = 0.0;
  double other_value = 0.0;
};

std::vector<FeatureIndex> IndexFeatures(const Eigen::MatrixXd& x) {
  const int n = static_cast<int>(x.rows());
  std::vector<FeatureIndex> index(static_cast<size_t>(x.cols()));
  for (Eigen::Index f = 0; f < x.cols(); ++f) {
    FeatureIndex& fi = index[static_cast<size_t>(f)];
    const auto col = x.col(f);
    const double first = col[0];
    double second = first;
    bool more = false;
    for (int r = 1; r < n; ++r) {
      const double v = col[r];
      if (v == first) continue;
      if (second == first) {
        second = v;
      } else if (v != second) {
        more = true;
        break;
      }
    }
    if (second == first) {
      fi.kind = FeatureIndex::Kind::kConstant;
    } else if (!more) {
      fi.kind = FeatureIndex::Kind::kTwoValued;
      int first_count = 0;
      for (int r = 0; r < n; ++r) first_count += col[r] == first ? 1 : 0;
      const bool list_first = first_count <= n - first_count;
      fi.listed_value = list_first ? first : second;
      fi.other_value = list_first ? second : first;
      for (int r = 0; r < n; ++r) {
        if (col[r] == fi.listed_value) fi.listed_rows.push_back(r);
      }
    } else {
      fi.kind = FeatureIndex::Kind::kDense;
      fi.order.resize(static_cast<size_t>(n));
      std::iota(fi.order.begin(), fi.order.end(), 0);
      std::stable_sort(fi.order.begin(), fi.order.end(),
                       [&](int a, int b) { return col[a] < col[b]; });
      fi.sorted_values.resize(static_cast<size_t>(n));
      for (int k = 0; k < n; ++k) fi.sorted_values[static_cast<size_t>(k)] = col[fi.order[k]];
    }
  }
  return index;
}

double Midpoint(double low, double high) {
  const double mid = low + 0.5 * (high - low);
  return mid < high ? mid : low;
}

struct NodeStats {
  double g = 0.0;
  double h = 0.0;
  int count = 0;
};

struct SplitChoice {
  double gain = 0.0;
  int feature = -1;
  double threshold = 0.0;

  // Ties go to the lower feature index so the result does not depend on
  // the order in which candidates are visited.
  void Offer(double candidate_gain, int candidate_feature, double candidate_threshold) {
    if (candidate_gain > gain || (candidate_gain == gain && feature >= 0 &&
                                  candidate_feature < feature)) {
      gain = candidate_gain;
      feature = candidate_feature;
      threshold = candidate_threshold;
    }
  }
};

// Level-wise exact greedy tree growth. For every dense feature the active
// rows are kept presorted, and the rows of each frontier node occupy one
// contiguous segment of that order; segments are stably partitioned after
// each level. Two-valued features are scanned through their sparse row lists.
class TreeBuilder {
 public:
  TreeBuilder(const LearnerSpec& spec, const std::vector<FeatureIndex>& index,
              const Eigen::MatrixXd& x)
      : spec_(spec), index_(index), x_(x) {
    for (size_t f = 0; f < index_.size(); ++f) {
      if (index_[f].kind == FeatureIndex::Kind::kDense) dense_.push_back(static_cast<int>(f));
    }
    order_.resize(dense_.size());
    values_.resize(dense_.size());
    const size_t n = static_cast<size_t>(x.rows());
    inverse_count_.resize(n + 1);
    for (size_t c = 0; c <= n; ++c) inverse_count_[c] = 1.0 / (static_cast<double>(c) + spec_.l2_leaf);
  }

  // `row_active` marks the rows sampled for this tree; `unit_hessian` is set
  // for squared loss, where node hessians equal row counts.
  RegressionTree Build(const Eigen::VectorXd& grad, const Eigen::VectorXd& hess,
                       const std::vector<char>& row_active, bool unit_hessian) {
    const int n = static_cast<int>(grad.size());
    unit_hessian_ = unit_hessian;
    grad_ = grad.data();
    hess_ = hess.data();
    RegressionTree tree;
    tree.nodes.emplace_back();
    row_slot_.assign(static_cast<size_t>(n), -1);
    leaf_of_row_.assign(static_cast<size_t>(n), -1);
    NodeStats root;
    for (int r = 0; r < n; ++r) {
      if (!row_active[static_cast<size_t>(r)]) continue;
      row_slot_[static_cast<size_t>(r)] = 0;
      root.g += grad[r];
      root.h += hess[r];
      ++root.count;
    }
    for (size_t d = 0; d < dense_.size(); ++d) {
      const FeatureIndex& fi = index_[static_cast<size_t>(dense_[d])];
      std::vector<int>& ord = order_[d];
      std::vector<double>& val = values_[d];
      if (root.count == n) {
        ord = fi.order;
        val = fi.sorted_values;
        continue;
      }
      ord.clear();
      val.clear();
      for (size_t k = 0; k < fi.order.size(); ++k) {
        if (!row_active[static_cast<size_t>(fi.order[k])]) continue;
        ord.push_back(fi.order[k]);
        val.push_back(fi.sorted_values[k]);
      }
    }
    std::vector<int> frontier{0};
    std::vector<NodeStats> stats{root};
    std::vector<int> segment_begin{0};

    for (int depth = 0; depth < spec_.max_depth && !frontier.empty(); ++depth) {
      const std::vector<SplitChoice> best = FindSplits(stats, segment_begin);
      std::vector<int> next_frontier;
      std::vector<NodeStats> next_stats;
      std::vector<int> next_begin;
      // slot -> first child slot in the next level, or -1 when it becomes a leaf
      std::vector<int> child_slot(frontier.size(), -1);
      for (size_t s = 0; s < frontier.size(); ++s) {
        const int id = frontier[s];
        if (best[s].feature < 0) {
          SetLeaf(tree.nodes[static_cast<size_t>(id)], stats[s]);
          continue;
        }
        TreeNode& node = tree.nodes[static_cast<size_t>(id)];
        node.feature = best[s].feature;
        node.threshold = best[s].threshold;
        node.left = static_cast<int>(tree.nodes.size());
        node.right = node.left + 1;
        child_slot[s] = static_cast<int>(next_frontier.size());
        next_frontier.push_back(node.left);
        next_frontier.push_back(node.right);
        next_stats.emplace_back();
        next_stats.emplace_back();
        next_begin.push_back(segment_begin[s]);
        next_begin.push_back(0);  // set once the left count is known
        tree.nodes.emplace_back();
        tree.nodes.emplace_back();
      }
      go_left_.assign(static_cast<size_t>(n), 0);
      for (int r = 0; r < n; ++r) {
        int& slot = row_slot_[static_cast<size_t>(r)];
        if (slot < 0) continue;
        const int base = child_slot[static_cast<size_t>(slot)];
        if (base < 0) {
          leaf_of_row_[static_cast<size_t>(r)] = frontier[static_cast<size_t>(slot)];
          slot = -1;
          continue;
        }
        const TreeNode& node = tree.nodes[static_cast<size_t>(frontier[static_cast<size_t>(slot)])];
        const bool left = x_(r, node.feature) <= node.threshold;
        go_left_[static_cast<size_t>(r)] = left ? 1 : 0;
        slot = base + (left ? 0 : 1);
        NodeStats& st = next_stats[static_cast<size_t>(slot)];
        st.g += grad[r];
        st.h += hess[r];
        ++st.count;
      }
      for (size_t c = 0; c < next_stats.size(); c += 2) {
        next_begin[c + 1] = next_begin[c] + next_stats[c].count;
      }
      if (depth + 1 < spec_.max_depth) PartitionSegments(frontier.size(), child_slot, stats, segment_begin);
      frontier = std::move(next_frontier);
      stats = std::move(next_stats);
      segment_begin = std::move(next_begin);
    }
    for (size_t s = 0; s < frontier.size(); ++s) {
      SetLeaf(tree.nodes[static_cast<size_t>(frontier[s])], stats[s]);
    }
    for (int r = 0; r < n; ++r) {
      const int slot = row_slot_[static_cast<size_t>(r)];
      if (slot >= 0) leaf_of_row_[static_cast<size_t>(r)] = frontier[static_cast<size_t>(slot)];
    }
    return tree;
  }

  // Leaf reached by each active row in the last built tree (-1 for inactive rows).
  const std::vector<int>& leaf_of_row() const { return leaf_of_row_; }

 private:
  void SetLeaf(TreeNode& node, const NodeStats& st) const {
    node.feature = -1;
    node.value = st.count > 0 ? -st.g / (st.h + spec_.l2_leaf) * spec_.learning_rate : 0.0;
  }

  double Score(double g, double h) const { return g * g / (h + spec_.l2_leaf); }

  double Gain(const NodeStats& parent, double parent_score, double gl, double hl, int cl) const {
    const double gr = parent.g - gl;
    if (unit_hessian_) {
      return gl * gl * inverse_count_[static_cast<size_t>(cl)] +
             gr * gr * inverse_count_[static_cast<size_t>(parent.count - cl)] - parent_score;
    }
    return Score(gl, hl) + Score(gr, parent.h - hl) - parent_score;
  }

  void ScanSegment(SplitChoice& best, const NodeStats& parent, double parent_score, int feature,
                   const int* ord, const double* val, int count) const {
    const int min_leaf = spec_.min_leaf;
    const int last_left = count - min_leaf;  // left side may hold at most this many rows
    double gl = 0.0;
    double hl = 0.0;
    int k = 0;
    for (; k < min_leaf; ++k) {
      gl += grad_[ord[k]];
      hl += hess_[ord[k]];
    }
    double best_gain = best.gain;
    int best_k = -1;
    for (; k <= last_left; ++k) {
      // Threshold between val[k-1] and val[k], with k rows on the left.
      if (val[k] > val[k - 1]) {
        const double gain = Gain(parent, parent_score, gl, hl, k);
        if (gain > best_gain) {
          best_gain = gain;
          best_k = k;
        }
      }
      gl += grad_[ord[k]];
      hl += hess_[ord[k]];
    }
    if (best_k >= 0) best.Offer(best_gain, feature, Midpoint(val[best_k - 1], val[best_k]));
  }

  std::vector<SplitChoice> FindSplits(const std::vector<NodeStats>& stats,
                                      const std::vector<int>& segment_begin) {
    const size_t slots = stats.size();
    std::vector<SplitChoice> best(slots);
    std::vector<char> splittable(slots);
    std::vector<double> parent_score(slots);
    bool any = false;
    for (size_t s = 0; s < slots; ++s) {
      splittable[s] = stats[s].count >= 2 * spec_.min_leaf;
      any = any || splittable[s];
      parent_score[s] = Score(stats[s].g, stats[s].h);
    }
    if (!any) return best;

    for (size_t d = 0; d < dense_.size(); ++d) {
      for (size_t s = 0; s < slots; ++s) {
        if (!splittable[s]) continue;
        const size_t b = static_cast<size_t>(segment_begin[s]);
        ScanSegment(best[s], stats[s], parent_score[s], dense_[d], order_[d].data() + b,
                    values_[d].data() + b, stats[s].count);
      }
    }

    std::vector<double> gl(slots);
    std::vector<double> hl(slots);
    std::vector<int> cl(slots);
    for (size_t f = 0; f < index_.size(); ++f) {
      const FeatureIndex& fi = index_[f];
      if (fi.kind != FeatureIndex::Kind::kTwoValued) continue;
      std::fill(gl.begin(), gl.end(), 0.0);
      std::fill(hl.begin(), hl.end(), 0.0);
      std::fill(cl.begin(), cl.end(), 0);
      for (int r : fi.listed_rows) {
        const int s = row_slot_[static_cast<size_t>(r)];
        if (s < 0) continue;
        gl[static_cast<size_t>(s)] += grad_[r];
        hl[static_cast<size_t>(s)] += hess_[r];
        ++cl[static_cast<size_t>(s)];
      }
      const bool listed_low = fi.listed_value < fi.other_value;
      const double threshold = listed_low ? Midpoint(fi.listed_value, fi.other_value)
                                          : Midpoint(fi.other_value, fi.listed_value);
      for (size_t s = 0; s < slots; ++s) {
        if (!splittable[s]) continue;
        const NodeStats& p = stats[s];
        const double left_g = listed_low ? gl[s] : p.g - gl[s];
        const double left_h = listed_low ? hl[s] : p.h - hl[s];
        const int left_c = listed_low ? cl[s] : p.count - cl[s];
        if (left_c < spec_.min_leaf || p.count - left_c < spec_.min_leaf) continue;
        best[s].Offer(Gain(p, parent_score[s], left_g, left_h, left_c), static_cast<int>(f),
                      threshold);
      }
    }
    return best;
  }

  // Stable left/right partition of every split node's segment, per dense feature.
  void PartitionSegments(size_t slots, const std::vector<int>& child_slot,
                         const std::vector<NodeStats>& stats,
                         const std::vector<int>& segment_begin) {
    for (size_t d = 0; d < dense_.size(); ++d) {
      std::vector<int>& ord = order_[d];
      std::vector<double>& val = values_[d];
      for (size_t s = 0; s < slots; ++s) {
        if (child_slot[s] < 0) continue;
        const size_t b = static_cast<size_t>(segment_begin[s]);
        const size_t e = b + static_cast<size_t>(stats[s].count);
        scratch_order_.clear();
        scratch_values_.clear();
        size_t write = b;
        for (size_t k = b; k < e; ++k) {
          if (go_left_[static_cast<size_t>(ord[k])]) {
            ord[write] = ord[k];
            val[write] = val[k];
            ++write;
          } else {
            scratch_order_.push_back(ord[k]);
            scratch_values_.push_back(val[k]);
          }
        }
        std::copy(scratch_order_.begin(), scratch_order_.end(), ord.begin() + static_cast<std::ptrdiff_t>(write));
        std::copy(scratch_values_.begin(), scratch_values_.end(), val.begin() + static_cast<std::ptrdiff_t>(write));
      }
    }
  }

  const LearnerSpec& spec_;
  const std::vector<FeatureIndex>& index_;
  const Eigen::MatrixXd& x_;
  std::vector<int> dense_;  // feature ids of dense columns
  std::vector<std::vector<int>> order_;
  std::vector<std::vector<double>> values_;
  std::vector<double> inverse_count_;
  std::vector<int> row_slot_;
  std::vector<int> leaf_of_row_;
  std::vector<char> go_left_;
  std::vector<int> scratch_order_;
  std::vector<double> scratch_values_;
  const double* grad_ = nullptr;
  const double* hess_ = nullptr;
  bool unit_hessian_ = false;
};

}  // namespace

std::vector<double> GbtModel::LossPath(const Eigen::MatrixXd& x, const Eigen::VectorXd& y) const {
  Require(x.cols() == n_features() && x.rows() == y.size(), ErrorCode::kDimensionMismatch,
          "loss path inputs do not match the model");
  const bool classifier = spec().kind == LearnerKind::kGbtClassifier;
  Eigen::VectorXd score = Eigen::VectorXd::Constant(x.rows(), base_score_);
  std::vector<double> path{MeanLoss(classifier, y, score)};
  for (const RegressionTree& tree : trees_) {
    for (Eigen::Index r = 0; r < x.rows(); ++r) score[r] += tree.Predict(x, r);
    path.push_back(MeanLoss(classifier, y, score));
  }
  return path;
}

std::shared_ptr<const GbtModel> FitGbt(const LearnerSpec& spec, const Eigen::MatrixXd& x,
                                       const Eigen::VectorXd& y, RngStream& rng) {
  const int n = static_cast<int>(x.rows());
  Require(n >= 2 * spec.min_leaf && n >= 1, ErrorCode::kInvalidArgument,
          "boosting needs at least 2 * min_leaf rows");
  const bool classifier = spec.kind == LearnerKind::kGbtClassifier;
  const double mean = y.mean();
  std::vector<RegressionTree> trees;

  Eigen::VectorXd grad(n);
  Eigen::VectorXd hess(n);
  if (classifier && (mean <= 0.0 || mean >= 1.0)) {
    // Single-class target: constant model at the (clipped) observed class.
    const double p = ClipProbability(mean);
    const double base = std::log(p / (1.0 - p));
    return std::make_shared<GbtModel>(spec, n, static_cast<int>(x.cols()), base,
                                      std::move(trees));
  }

  const double base = classifier ? std::log(mean / (1.0 - mean)) : mean;
  Eigen::VectorXd score = Eigen::VectorXd::Constant(n, base);

  const std::vector<FeatureIndex> index = IndexFeatures(x);
  TreeBuilder builder(spec, index, x);
  std::vector<char> active(static_cast<size_t>(n), 1);
  std::vector<int> rows(static_cast<size_t>(n));
  const int sample_size =
      std::max(1, static_cast<int>(std::floor(spec.subsample * static_cast<double>(n))));
  trees.reserve(static_cast<size_t>(spec.n_trees));

  for (int m = 0; m < spec.n_trees; ++m) {
    if (sample_size < n) {
      std::iota(rows.begin(), rows.end(), 0);
      // Partial Fisher-Yates: the first sample_size entries are the sample.
      for (int i = 0; i < sample_size; ++i) {
        const auto j = static_cast<size_t>(rng.UniformInt(i, n - 1));
        std::swap(rows[static_cast<size_t>(i)], rows[j]);
      }
      std::fill(active.begin(), active.end(), 0);
      for (int i = 0; i < sample_size; ++i) active[static_cast<size_t>(rows[static_cast<size_t>(i)])] = 1;
    }
    Gradient(classifier, y, score, grad, hess);
    RegressionTree tree = builder.Build(grad, hess, active, !classifier);
    const std::vector<int>& leaf = builder.leaf_of_row();
    for (int r = 0; r < n; ++r) {
      const int id = leaf[static_cast<size_t>(r)];
      score[r] += id >= 0 ? tree.nodes[static_cast<size_t>(id)].value : tree.Predict(x, r);
    }
    trees.push_back(std::move(tree));
  }
  return std::make_shared<GbtModel>(spec, n, static_cast<int>(x.cols()), base, std::move(trees));
}

}  // namespace geolift
