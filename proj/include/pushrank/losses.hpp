#ifndef PUSHRANK_LOSSES_HPP_
#define PUSHRANK_LOSSES_HPP_

#include <algorithm>
#include <cmath>
#include <numeric>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "pushrank/common.hpp"
#include "pushrank/stats.hpp"

namespace pushrank {

enum class LossKind {
  kPointwiseCe,
  kPointwiseL2,
  kPairwiseHinge,
  kKosAuc,
  kExpectedRegret,
};

inline const char* loss_kind_name(LossKind k) {
  switch (k) {
    case LossKind::kPointwiseCe: return "pointwise_ce";
    case LossKind::kPointwiseL2: return "pointwise_l2";
    case LossKind::kPairwiseHinge: return "pairwise_hinge";
    case LossKind::kKosAuc: return "kos_auc";
    case LossKind::kExpectedRegret: return "expected_regret";
  }
  return "unknown";
}

inline std::optional<LossKind> parse_loss_kind(std::string_view name) {
  if (name == "pointwise_ce") return LossKind::kPointwiseCe;
  if (name == "pointwise_l2") return LossKind::kPointwiseL2;
  if (name == "pairwise_hinge") return LossKind::kPairwiseHinge;
  if (name == "kos_auc") return LossKind::kKosAuc;
  if (name == "expected_regret") return LossKind::kExpectedRegret;
  return std::nullopt;
}

/*!
 * \brief Which loss to train with, plus its two knobs.
 *
 * cap_k is the rank-weight cap for the ordered pairwise loss and doubles as
 * the weight floor for the regret-weighted loss. alpha mixes the auxiliary
 * squared loss into the regret objective.
 */
struct LossSpec {
  LossKind kind = LossKind::kPointwiseCe;
  double cap_k = 0.001;
  double alpha = 0.3;
};

inline void validate(const LossSpec& spec) {
  if (!(spec.cap_k >= 0.0 && spec.cap_k <= 1.0)) {
    throw ConfigError("loss cap_k must be in [0,1], got " +
                      std::to_string(spec.cap_k));
  }
  if (!std::isfinite(spec.alpha) || spec.alpha < 0.0) {
    throw ConfigError("loss alpha must be finite and >= 0");
  }
}

/*!
 * \brief A user-type group of logged examples split by label, standing in
 *        for the unobservable fully-labelled candidate set. Members are
 *        indices into the batch the group was built from.
 */
struct PseudoCandidateSet {
  int user_type = 0;
  std::vector<int> positives;
  std::vector<int> negatives;

  bool pair_empty() const { return positives.empty() || negatives.empty(); }
};

/*! \brief Batch-level distribution context for regret weighting. */
struct ErContext {
  EmpiricalCDF cdf;
  int n = 1;  // size of the real serving candidate set
};

struct PointLoss {
  double loss = 0.0;
  double d_score = 0.0;
};

struct PairLoss {
  double loss = 0.0;
  double d_pos = 0.0;
  double d_neg = 0.0;
};

/*! \brief Loss over one positive/negative group with per-score gradients. */
struct SetLoss {
  double loss = 0.0;
  std::vector<double> d_pos;
  std::vector<double> d_neg;
};

namespace detail {

inline void check_finite_score(double score) {
  if (!std::isfinite(score)) {
    throw NumericError("score is not finite: " + std::to_string(score));
  }
}

// log(1 + e^x) without overflow for large |x|
inline double softplus(double x) {
  return std::max(x, 0.0) + std::log1p(std::exp(-std::abs(x)));
}

}  // namespace detail

/*!
 * \brief Binary cross-entropy on a sigmoid-squashed score.
 *
 * loss = -log sigmoid(s) for label 1, -log(1 - sigmoid(s)) for label 0,
 * evaluated in log-sum-exp form so saturated scores neither overflow nor
 * lose the gradient sign.
 */
inline PointLoss pointwise_ce(double score, int label) {
  detail::check_finite_score(score);
  if (label != 0 && label != 1) {
    throw ContractError("cross-entropy label must be 0 or 1, got " +
                        std::to_string(label));
  }
  PointLoss out;
  out.loss = label == 1 ? detail::softplus(-score) : detail::softplus(score);
  out.d_score = sigmoid(score) - static_cast<double>(label);
  return out;
}

/*! \brief Squared loss against signed labels in {-1, +1}. */
inline PointLoss pointwise_l2(double score, int signed_label) {
  detail::check_finite_score(score);
  if (signed_label != -1 && signed_label != 1) {
    throw ContractError("squared loss label must be -1 or +1, got " +
                        std::to_string(signed_label));
  }
  const double diff = score - static_cast<double>(signed_label);
  return {diff * diff, 2.0 * diff};
}

/*!
 * \brief Margin-1 hinge on a (positive, negative) score pair.
 *
 * Subgradient convention: exactly-met margins contribute zero gradient.
 */
inline PairLoss pairwise_hinge(double score_pos, double score_neg) {
  detail::check_finite_score(score_pos);
  detail::check_finite_score(score_neg);
  const double slack = 1.0 - (score_pos - score_neg);
  if (slack > 0.0) return {slack, -1.0, 1.0};
  return {0.0, 0.0, 0.0};
}

/*!
 * \brief Rank weight for the ordered pairwise loss: the top-ranked positive
 *        counts fully, every later rank counts cap_k.
 */
inline double kos_weight(int rank_index, double cap_k) {
  if (rank_index < 1) {
    throw ContractError("rank index must be >= 1, got " +
                        std::to_string(rank_index));
  }
  if (!(cap_k >= 0.0 && cap_k <= 1.0)) {
    throw ContractError("cap_k must be in [0,1]");
  }
  return rank_index == 1 ? 1.0 : cap_k;
}

/*!
 * \brief Order-statistics AUC loss over one group.
 *
 * Positives are ranked by their current score (ties broken by original
 * position); rank i earns weight W(i) = kos_weight(i, cap_k) and the loss is
 * (1/Z) * sum_i W(i) * sum_neg hinge(pos_i, neg) with Z = sum_i W(i).
 * The ranking itself is treated as a constant: gradients flow only through
 * the hinge terms.
 */
inline SetLoss kos_auc_loss(std::span<const double> pos_scores,
                            std::span<const double> neg_scores, double cap_k) {
  if (pos_scores.empty() || neg_scores.empty()) {
    throw ContractError(
        "kos_auc_loss needs at least one positive and one negative");
  }
  const int num_pos = static_cast<int>(pos_scores.size());
  std::vector<int> order(num_pos);
  std::iota(order.begin(), order.end(), 0);
  std::stable_sort(order.begin(), order.end(), [&](int a, int b) {
    return pos_scores[a] > pos_scores[b];
  });

  const double z = 1.0 + (num_pos - 1) * cap_k;
  SetLoss out;
  out.d_pos.assign(pos_scores.size(), 0.0);
  out.d_neg.assign(neg_scores.size(), 0.0);
  for (int rank = 1; rank <= num_pos; ++rank) {
    const double w = kos_weight(rank, cap_k) / z;
    if (w == 0.0) continue;
    const int p = order[rank - 1];
    for (std::size_t j = 0; j < neg_scores.size(); ++j) {
      const PairLoss h = pairwise_hinge(pos_scores[p], neg_scores[j]);
      out.loss += w * h.loss;
      out.d_pos[p] += w * h.d_pos;
      out.d_neg[j] += w * h.d_neg;
    }
  }
  return out;
}

/*!
 * \brief Probability that a candidate is the best of n i.i.d. candidates,
 *        given the distribution mass strictly above its CTR.
 *
 * upper_tail = 0 means nothing scores above it, so it tops any set.
 */
inline double p_top(double upper_tail, int n) {
  if (!(upper_tail >= 0.0 && upper_tail <= 1.0)) {
    throw ContractError("p_top tail mass must be in [0,1], got " +
                        std::to_string(upper_tail));
  }
  if (n < 1) throw ContractError("p_top needs n >= 1");
  if (n == 1) return 1.0;
  return std::pow(1.0 - upper_tail, n - 1);
}

/*!
 * \brief Weight of a pair: expected CTR regret of misranking it.
 *
 * The chance the positive would top a real candidate set times the CTR gap
 * given up by sending the negative instead, floored at floor_k so no pair
 * is negative-weighted or dropped entirely.
 */
inline double er_weight(double ctr_pos, double ctr_neg, double upper_tail_pos,
                        int n, double floor_k) {
  if (!(ctr_pos >= 0.0 && ctr_pos <= 1.0) ||
      !(ctr_neg >= 0.0 && ctr_neg <= 1.0)) {
    throw ContractError("er_weight CTR estimates must be in [0,1]");
  }
  if (!(floor_k > 0.0)) throw ContractError("er_weight floor must be > 0");
  const double raw = p_top(upper_tail_pos, n) * (ctr_pos - ctr_neg);
  return std::max(raw, floor_k);
}

/*!
 * \brief Weighted hinge over all pairs of one group.
 *
 * pair_weights is laid out positive-major: weight of (pos p, neg j) sits at
 * p * num_neg + j. Weights are constants here; whoever computed them from
 * scores already decided not to differentiate through them.
 */
inline SetLoss er_loss(std::span<const double> pos_scores,
                       std::span<const double> neg_scores,
                       std::span<const double> pair_weights) {
  const std::size_t num_pairs = pos_scores.size() * neg_scores.size();
  if (pair_weights.size() != num_pairs) {
    throw ContractError("er_loss got " + std::to_string(pair_weights.size()) +
                        " weights for " + std::to_string(num_pairs) +
                        " pairs");
  }
  SetLoss out;
  out.d_pos.assign(pos_scores.size(), 0.0);
  out.d_neg.assign(neg_scores.size(), 0.0);
  for (std::size_t p = 0; p < pos_scores.size(); ++p) {
    for (std::size_t j = 0; j < neg_scores.size(); ++j) {
      const double w = pair_weights[p * neg_scores.size() + j];
      if (!(w >= 0.0)) {
        throw ContractError("er_loss pair weights must be >= 0");
      }
      const PairLoss h = pairwise_hinge(pos_scores[p], neg_scores[j]);
      out.loss += w * h.loss;
      out.d_pos[p] += w * h.d_pos;
      out.d_neg[j] += w * h.d_neg;
    }
  }
  return out;
}

/*! \brief Final training objective: regret term plus alpha times the
 *         pointwise squared term. */
inline double combined_loss(double er_value, double l2_value, double alpha) {
  return er_value + alpha * l2_value;
}

/*!
 * \brief Map a raw score into [0,1] as a CTR estimate.
 *
 * The squared loss pulls scores toward the signed labels -1/+1, so the
 * affine map (clamp(s, -1, 1) + 1) / 2 sends those targets to CTR 0 and 1.
 */
inline double score_to_ctr(double score) {
  detail::check_finite_score(score);
  return (std::clamp(score, -1.0, 1.0) + 1.0) / 2.0;
}

}  // namespace pushrank

#endif  // PUSHRANK_LOSSES_HPP_
