#ifndef PUSHRANK_SIMULATOR_HPP_
#define PUSHRANK_SIMULATOR_HPP_

#include <array>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <functional>
#include <span>
#include <string>
#include <variant>
#include <vector>

#include "pushrank/common.hpp"
#include "pushrank/mlp.hpp"
#include "pushrank/rng.hpp"
#include "pushrank/stats.hpp"

namespace pushrank {

inline constexpr int kNumUserTypes = 7;
inline constexpr int kNumDocFeatures = 5;
inline constexpr int kScorerInputDim = kNumUserTypes + kNumDocFeatures;

/*! \brief A simulated user is fully described by its engagement type. */
struct User {
  long long id = -1;
  int user_type = 0;
};

/*!
 * \brief One candidate document. latent_ctr is the ground-truth open
 *        probability; it drives label sampling and exact regret and is
 *        never visible to a model.
 */
struct Document {
  long long id = -1;
  double latent_ctr = 0.0;
  std::array<double, kNumDocFeatures> features{};
};

struct CandidateSet {
  long long id = -1;
  User user;
  std::vector<Document> documents;
};

/*!
 * \brief The single logged record a candidate set produces: only the sent
 *        document gets feedback.
 */
struct LoggedExample {
  long long candidate_set_id = -1;
  int user_type = 0;
  std::array<double, kNumDocFeatures> features{};
  int label = 0;
  double latent_ctr = 0.0;  // evaluation only; the training loader drops it
  bool explored = false;
};

/*!
 * \brief How the latent CTR turns into document features.
 *
 * kMonomial: dimension d is latent^d plus noise, d = 1..5.
 * kRandomLinear: dimension d is coeff_d * latent plus noise, with the
 * coefficients drawn once per configuration.
 */
enum class FeatureProjection { kMonomial, kRandomLinear };

struct SimConfig {
  int n_candidates = 60;
  // one entry shared across user types, or exactly one entry per type
  std::vector<BetaParams> beta_params = {BetaParams{2.0, 5.0}};
  std::array<double, kNumUserTypes> user_type_probs = {
      1.0 / 7, 1.0 / 7, 1.0 / 7, 1.0 / 7, 1.0 / 7, 1.0 / 7, 1.0 / 7};
  double feature_noise_sigma = 0.1;
  FeatureProjection feature_projection = FeatureProjection::kMonomial;
  std::array<double, kNumDocFeatures> projection_coeffs{};  // kRandomLinear
  double epsilon = 0.14;
  long long n_interactions = 100000;
  std::uint64_t master_seed = 1;
};

inline void validate(const SimConfig& config) {
  if (config.n_candidates < 1) {
    throw ConfigError("n_candidates must be >= 1");
  }
  if (config.beta_params.size() != 1 &&
      config.beta_params.size() != kNumUserTypes) {
    throw ConfigError("beta_params must hold 1 shared entry or " +
                      std::to_string(kNumUserTypes) + " per-type entries");
  }
  for (const auto& b : config.beta_params) validate(b);
  double total = 0.0;
  for (double p : config.user_type_probs) {
    if (!(p >= 0.0)) throw ConfigError("user_type_probs must be >= 0");
    total += p;
  }
  if (std::abs(total - 1.0) > 1e-9) {
    throw ConfigError("user_type_probs must sum to 1");
  }
  if (!(config.feature_noise_sigma >= 0.0)) {
    throw ConfigError("feature_noise_sigma must be >= 0");
  }
  if (!(config.epsilon >= 0.0 && config.epsilon <= 1.0)) {
    throw ConfigError("epsilon must be in [0,1]");
  }
  if (config.n_interactions < 1) {
    throw ConfigError("n_interactions must be >= 1");
  }
}

/*! \brief Draw the linear projection coefficients from the master seed. */
inline void resolve_projection(SimConfig& config) {
  if (config.feature_projection != FeatureProjection::kRandomLinear) return;
  SeededRng rng(derive_seed(config.master_seed, /*tag=*/0x50726f6aULL));
  for (auto& c : config.projection_coeffs) {
    c = sample_gaussian(0.0, 1.0, rng);
  }
}

inline const BetaParams& beta_for_type(const SimConfig& config,
                                       int user_type) {
  return config.beta_params.size() == 1
             ? config.beta_params[0]
             : config.beta_params[static_cast<std::size_t>(user_type)];
}

/*! \brief Scorer input layout: one-hot user type then the document features. */
inline std::array<double, kScorerInputDim> encode_input(
    int user_type, const std::array<double, kNumDocFeatures>& features) {
  if (user_type < 0 || user_type >= kNumUserTypes) {
    throw ContractError("user_type out of range: " +
                        std::to_string(user_type));
  }
  std::array<double, kScorerInputDim> x{};
  x[static_cast<std::size_t>(user_type)] = 1.0;
  for (int d = 0; d < kNumDocFeatures; ++d) {
    x[static_cast<std::size_t>(kNumUserTypes + d)] = features[d];
  }
  return x;
}

inline User sample_user(const SimConfig& config, SeededRng& rng,
                        long long id = -1) {
  const int type = sample_categorical(config.user_type_probs, rng);
  return User{id, type};
}

/*! \brief Noisy feature view of a latent CTR. */
inline std::array<double, kNumDocFeatures> featurize(double latent_ctr,
                                                     const SimConfig& config,
                                                     SeededRng& rng) {
  if (!(latent_ctr >= 0.0 && latent_ctr <= 1.0)) {
    throw ContractError("latent_ctr must be in [0,1]");
  }
  std::array<double, kNumDocFeatures> f{};
  double power = 1.0;
  for (int d = 0; d < kNumDocFeatures; ++d) {
    double clean = 0.0;
    if (config.feature_projection == FeatureProjection::kMonomial) {
      power *= latent_ctr;
      clean = power;
    } else {
      clean = config.projection_coeffs[static_cast<std::size_t>(d)] * latent_ctr;
    }
    f[static_cast<std::size_t>(d)] =
        clean + sample_gaussian(0.0, config.feature_noise_sigma, rng);
  }
  return f;
}

inline CandidateSet sample_candidate_set(const SimConfig& config,
                                         const User& user, SeededRng& rng,
                                         long long set_id = -1) {
  CandidateSet set;
  set.id = set_id;
  set.user = user;
  set.documents.reserve(static_cast<std::size_t>(config.n_candidates));
  const BetaParams& beta = beta_for_type(config, user.user_type);
  for (int j = 0; j < config.n_candidates; ++j) {
    Document doc;
    doc.id = j;
    doc.latent_ctr = sample_beta(beta, rng);
    doc.features = featurize(doc.latent_ctr, config, rng);
    set.documents.push_back(doc);
  }
  return set;
}

/*! \brief Scoring policy: higher score wins the send. */
using ScoreFn = std::function<double(const User&, const Document&)>;

inline ScoreFn make_scorer_policy(const ScorerParams& params) {
  if (params.input_dim() != kScorerInputDim) {
    throw ShapeError("scorer policy expects input dim " +
                     std::to_string(kScorerInputDim) + ", model has " +
                     std::to_string(params.input_dim()));
  }
  return [&params](const User& u, const Document& d) {
    const auto x = encode_input(u.user_type, d.features);
    return forward(params, x);
  };
}

inline int argmax_document(const ScoreFn& score, const CandidateSet& set) {
  if (set.documents.empty()) {
    throw ContractError("candidate set is empty");
  }
  int best = 0;
  double best_score = score(set.user, set.documents[0]);
  for (std::size_t j = 1; j < set.documents.size(); ++j) {
    const double s = score(set.user, set.documents[j]);
    if (s > best_score) {
      best_score = s;
      best = static_cast<int>(j);
    }
  }
  return best;
}

/*!
 * \brief Exact latent regret of sending documents[chosen_index]: the best
 *        available open probability minus the chosen one.
 */
inline double regret(const CandidateSet& set, int chosen_index) {
  if (set.documents.empty()) throw ContractError("candidate set is empty");
  if (chosen_index < 0 ||
      chosen_index >= static_cast<int>(set.documents.size())) {
    throw ContractError("chosen document is not in the candidate set");
  }
  double best = set.documents[0].latent_ctr;
  for (const auto& d : set.documents) best = std::max(best, d.latent_ctr);
  return best - set.documents[static_cast<std::size_t>(chosen_index)].latent_ctr;
}

struct Interaction {
  LoggedExample logged;
  double regret_value = 0.0;
};

/*!
 * \brief One ranking pass: send the argmax-scored document, sample the
 *        user's binary response, log it, and report the exact regret.
 */
inline Interaction interact(const ScoreFn& score, const CandidateSet& set,
                            SeededRng& rng) {
  const int chosen = argmax_document(score, set);
  const Document& doc = set.documents[static_cast<std::size_t>(chosen)];
  Interaction out;
  out.logged.candidate_set_id = set.id;
  out.logged.user_type = set.user.user_type;
  out.logged.features = doc.features;
  out.logged.label = sample_bernoulli(doc.latent_ctr, rng);
  out.logged.latent_ctr = doc.latent_ctr;
  out.logged.explored = false;
  out.regret_value = regret(set, chosen);
  return out;
}

/*! \brief Every send picks a uniformly random candidate. */
struct UniformRandomPolicy {};

/*! \brief Fraction epsilon of sends explore uniformly; the rest follow the
 *         incumbent scorer greedily. */
struct EpsilonGreedyPolicy {
  ScoreFn score;
};

using LogPolicy = std::variant<UniformRandomPolicy, EpsilonGreedyPolicy>;

/*!
 * \brief Produce a logged dataset of n_interactions sends, one record per
 *        candidate set. Deterministic given (config, rng seed).
 */
inline std::vector<LoggedExample> generate_log(const SimConfig& config,
                                               const LogPolicy& policy,
                                               SeededRng& rng) {
  validate(config);
  std::vector<LoggedExample> log;
  log.reserve(static_cast<std::size_t>(config.n_interactions));
  for (long long i = 0; i < config.n_interactions; ++i) {
    const User user = sample_user(config, rng, i);
    const CandidateSet set = sample_candidate_set(config, user, rng, i);
    int chosen = 0;
    bool explored = false;
    if (std::holds_alternative<UniformRandomPolicy>(policy)) {
      chosen = static_cast<int>(
          rng.bounded(static_cast<std::uint64_t>(config.n_candidates)));
      explored = true;
    } else {
      const auto& eg = std::get<EpsilonGreedyPolicy>(policy);
      if (rng.uniform01() < config.epsilon) {
        chosen = static_cast<int>(
            rng.bounded(static_cast<std::uint64_t>(config.n_candidates)));
        explored = true;
      } else {
        chosen = argmax_document(eg.score, set);
      }
    }
    const Document& doc = set.documents[static_cast<std::size_t>(chosen)];
    LoggedExample rec;
    rec.candidate_set_id = set.id;
    rec.user_type = user.user_type;
    rec.features = doc.features;
    rec.label = sample_bernoulli(doc.latent_ctr, rng);
    rec.latent_ctr = doc.latent_ctr;
    rec.explored = explored;
    log.push_back(rec);
  }
  return log;
}

/*! \brief Fresh candidate sets for evaluation, shared across policies so
 *         regret comparisons are paired. */
inline std::vector<CandidateSet> sample_eval_sets(const SimConfig& config,
                                                  long long n_sets,
                                                  SeededRng& rng) {
  validate(config);
  std::vector<CandidateSet> sets;
  sets.reserve(static_cast<std::size_t>(n_sets));
  for (long long i = 0; i < n_sets; ++i) {
    const User user = sample_user(config, rng, i);
    sets.push_back(sample_candidate_set(config, user, rng, i));
  }
  return sets;
}

/*! \brief Mean exact regret of the greedy policy induced by score. */
inline double mean_regret_greedy(std::span<const CandidateSet> sets,
                                 const ScoreFn& score) {
  if (sets.empty()) throw ContractError("no evaluation sets");
  double total = 0.0;
  for (const auto& set : sets) {
    total += regret(set, argmax_document(score, set));
  }
  return total / static_cast<double>(sets.size());
}

inline double mean_regret_greedy(std::span<const CandidateSet> sets,
                                 const ScorerParams& params) {
  return mean_regret_greedy(sets, make_scorer_policy(params));
}

/*! \brief Mean exact regret of sending a uniformly random candidate. */
inline double mean_regret_uniform(std::span<const CandidateSet> sets,
                                  SeededRng& rng) {
  if (sets.empty()) throw ContractError("no evaluation sets");
  double total = 0.0;
  for (const auto& set : sets) {
    total += regret(set, static_cast<int>(rng.bounded(set.documents.size())));
  }
  return total / static_cast<double>(sets.size());
}

// ---------------------------------------------------------------------------
// Dataset file format: CSV with a fixed header. latent_ctr is carried for
// evaluation and provenance; the training loader never exposes it.
// ---------------------------------------------------------------------------

inline constexpr const char* kDatasetHeader =
    "candidate_set_id,user_type,f1,f2,f3,f4,f5,label,latent_ctr,explored";

inline void write_dataset_csv(std::span<const LoggedExample> log,
                              const std::string& path) {
  std::FILE* f = std::fopen(path.c_str(), "w");
  if (f == nullptr) {
    throw ConfigError("cannot open dataset file for writing: " + path);
  }
  std::fprintf(f, "%s\n", kDatasetHeader);
  for (const auto& r : log) {
    std::fprintf(f, "%lld,%d", r.candidate_set_id, r.user_type);
    for (double v : r.features) std::fprintf(f, ",%.17g", v);
    std::fprintf(f, ",%d,%.17g,%d\n", r.label, r.latent_ctr,
                 r.explored ? 1 : 0);
  }
  std::fclose(f);
}

inline std::vector<LoggedExample> read_dataset_csv(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open dataset file: " + path);
  std::string line;
  if (!std::getline(in, line) || line != kDatasetHeader) {
    throw ConfigError("dataset file has an unexpected header: " + path);
  }
  std::vector<LoggedExample> log;
  std::size_t lineno = 1;
  while (std::getline(in, line)) {
    ++lineno;
    if (line.empty()) continue;
    std::array<std::string, 10> fields;
    std::size_t start = 0, idx = 0;
    for (; idx < fields.size(); ++idx) {
      const std::size_t comma = line.find(',', start);
      if (comma == std::string::npos) {
        fields[idx] = line.substr(start);
        ++idx;
        break;
      }
      fields[idx] = line.substr(start, comma - start);
      start = comma + 1;
    }
    if (idx != fields.size() || line.find(',', start) != std::string::npos) {
      throw ConfigError("dataset line " + std::to_string(lineno) +
                        ": expected 10 comma-separated fields");
    }
    LoggedExample r;
    r.candidate_set_id = std::strtoll(fields[0].c_str(), nullptr, 10);
    r.user_type = static_cast<int>(std::strtol(fields[1].c_str(), nullptr, 10));
    for (int d = 0; d < kNumDocFeatures; ++d) {
      r.features[static_cast<std::size_t>(d)] =
          std::strtod(fields[static_cast<std::size_t>(2 + d)].c_str(), nullptr);
    }
    r.label = static_cast<int>(std::strtol(fields[7].c_str(), nullptr, 10));
    r.latent_ctr = std::strtod(fields[8].c_str(), nullptr);
    r.explored = fields[9] == "1";
    if (r.user_type < 0 || r.user_type >= kNumUserTypes ||
        (r.label != 0 && r.label != 1)) {
      throw ConfigError("dataset line " + std::to_string(lineno) +
                        ": invalid user_type or label");
    }
    log.push_back(r);
  }
  return log;
}

}  // namespace pushrank

#endif  // PUSHRANK_SIMULATOR_HPP_
