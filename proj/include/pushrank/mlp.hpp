#ifndef PUSHRANK_MLP_HPP_
#define PUSHRANK_MLP_HPP_

#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <cstring>
#include <fstream>
#include <functional>
#include <span>
#include <sstream>
#include <string>
#include <utility>
#include <vector>

#include "pushrank/common.hpp"
#include "pushrank/rng.hpp"

namespace pushrank {

enum class Activation { kSigmoid, kLeakyRelu };

inline const char* activation_name(Activation a) {
  return a == Activation::kSigmoid ? "sigmoid" : "leaky_relu";
}

inline double sigmoid(double x) {
  if (x >= 0.0) return 1.0 / (1.0 + std::exp(-x));
  const double e = std::exp(x);
  return e / (1.0 + e);
}

/*!
 * \brief Weights and biases of a dense scorer network.
 *
 * Layer i maps layer_dims[i] -> layer_dims[i+1] with a row-major weight
 * matrix of shape (layer_dims[i+1] x layer_dims[i]). Hidden layers apply
 * the configured activation; the final layer is a single linear unit, so
 * scores are unbounded reals and any squashing lives in the loss.
 */
struct ScorerParams {
  std::vector<int> layer_dims;
  Activation hidden_activation = Activation::kSigmoid;
  double leaky_slope = 0.01;
  std::vector<std::vector<double>> weights;
  std::vector<std::vector<double>> biases;

  int input_dim() const { return layer_dims.front(); }
  int num_weight_layers() const {
    return static_cast<int>(layer_dims.size()) - 1;
  }
};

/*! \brief Per-parameter loss gradients, shape-congruent with ScorerParams. */
struct ParamGrads {
  std::vector<std::vector<double>> weights;
  std::vector<std::vector<double>> biases;
};

inline ParamGrads make_grads_like(const ScorerParams& params) {
  ParamGrads g;
  g.weights.reserve(params.weights.size());
  g.biases.reserve(params.biases.size());
  for (const auto& w : params.weights) g.weights.emplace_back(w.size(), 0.0);
  for (const auto& b : params.biases) g.biases.emplace_back(b.size(), 0.0);
  return g;
}

/*!
 * \brief Fresh parameters with zero biases and uniform(-r, r) weights,
 *        r = sqrt(6 / (fan_in + fan_out)).
 *
 * layer_dims lists the input dimension first and must end in 1 (the scorer
 * emits a single real score). Deterministic given the seed.
 */
inline ScorerParams init_params(const std::vector<int>& layer_dims,
                                Activation activation, std::uint64_t seed,
                                double leaky_slope = 0.01) {
  if (layer_dims.size() < 2) {
    throw ConfigError("scorer needs at least an input and an output layer");
  }
  if (layer_dims.back() != 1) {
    throw ConfigError("scorer output dimension must be 1, got " +
                      std::to_string(layer_dims.back()));
  }
  for (int d : layer_dims) {
    if (d <= 0) {
      throw ConfigError("scorer layer dimensions must be positive, got " +
                        std::to_string(d));
    }
  }
  ScorerParams p;
  p.layer_dims = layer_dims;
  p.hidden_activation = activation;
  p.leaky_slope = leaky_slope;
  SeededRng rng(seed);
  for (std::size_t i = 0; i + 1 < layer_dims.size(); ++i) {
    const int fan_in = layer_dims[i];
    const int fan_out = layer_dims[i + 1];
    const double r = std::sqrt(6.0 / (fan_in + fan_out));
    std::vector<double> w(static_cast<std::size_t>(fan_in) * fan_out);
    for (auto& v : w) v = (2.0 * rng.uniform01() - 1.0) * r;
    p.weights.push_back(std::move(w));
    p.biases.emplace_back(fan_out, 0.0);
  }
  return p;
}

namespace detail {

inline double activate(Activation a, double slope, double z) {
  if (a == Activation::kSigmoid) return sigmoid(z);
  return z > 0.0 ? z : slope * z;
}

inline double activate_deriv(Activation a, double slope, double z,
                             double out) {
  if (a == Activation::kSigmoid) return out * (1.0 - out);
  return z > 0.0 ? 1.0 : slope;
}

inline void check_input(const ScorerParams& p, std::span<const double> input) {
  if (static_cast<int>(input.size()) != p.input_dim()) {
    throw ShapeError("scorer input has length " +
                     std::to_string(input.size()) + ", expected " +
                     std::to_string(p.input_dim()));
  }
}

}  // namespace detail

/*!
 * \brief Activations captured during a forward pass, kept so the backward
 *        pass does not recompute them.
 */
struct ForwardTrace {
  std::vector<std::vector<double>> layer_outputs;  // [0] is the input itself
  std::vector<std::vector<double>> preacts;
  double score = 0.0;
};

inline ForwardTrace forward_trace(const ScorerParams& params,
                                  std::span<const double> input) {
  detail::check_input(params, input);
  ForwardTrace t;
  const int layers = params.num_weight_layers();
  t.layer_outputs.resize(layers + 1);
  t.preacts.resize(layers);
  t.layer_outputs[0].assign(input.begin(), input.end());
  for (int l = 0; l < layers; ++l) {
    const int in_dim = params.layer_dims[l];
    const int out_dim = params.layer_dims[l + 1];
    const auto& w = params.weights[l];
    const auto& b = params.biases[l];
    const auto& a_in = t.layer_outputs[l];
    auto& z = t.preacts[l];
    auto& a_out = t.layer_outputs[l + 1];
    z.resize(out_dim);
    a_out.resize(out_dim);
    const bool last = (l == layers - 1);
    for (int j = 0; j < out_dim; ++j) {
      double acc = b[j];
      const double* row = &w[static_cast<std::size_t>(j) * in_dim];
      for (int k = 0; k < in_dim; ++k) acc += row[k] * a_in[k];
      z[j] = acc;
      a_out[j] = last ? acc
                      : detail::activate(params.hidden_activation,
                                         params.leaky_slope, acc);
    }
  }
  t.score = t.layer_outputs.back()[0];
  return t;
}

/*! \brief Score an input vector. Pure: same (params, input) -> same score. */
inline double forward(const ScorerParams& params,
                      std::span<const double> input) {
  return forward_trace(params, input).score;
}

/*!
 * \brief Accumulate d(loss)/d(parameters) into grads for one example, given
 *        d_score = d(loss)/d(score) from the loss layer.
 */
inline void accumulate_backward(const ScorerParams& params,
                                const ForwardTrace& trace, double d_score,
                                ParamGrads* grads) {
  const int layers = params.num_weight_layers();
  std::vector<double> delta{d_score};
  for (int l = layers - 1; l >= 0; --l) {
    const int in_dim = params.layer_dims[l];
    const int out_dim = params.layer_dims[l + 1];
    const auto& a_in = trace.layer_outputs[l];
    auto& gw = grads->weights[l];
    auto& gb = grads->biases[l];
    for (int j = 0; j < out_dim; ++j) {
      const double d = delta[j];
      gb[j] += d;
      double* row = &gw[static_cast<std::size_t>(j) * in_dim];
      for (int k = 0; k < in_dim; ++k) row[k] += d * a_in[k];
    }
    if (l == 0) break;
    const auto& w = params.weights[l];
    std::vector<double> prev(in_dim, 0.0);
    for (int j = 0; j < out_dim; ++j) {
      const double d = delta[j];
      const double* row = &w[static_cast<std::size_t>(j) * in_dim];
      for (int k = 0; k < in_dim; ++k) prev[k] += d * row[k];
    }
    // chain through the hidden activation of layer l-1
    const auto& z = trace.preacts[l - 1];
    const auto& a = trace.layer_outputs[l];
    for (int k = 0; k < in_dim; ++k) {
      prev[k] *= detail::activate_deriv(params.hidden_activation,
                                        params.leaky_slope, z[k], a[k]);
    }
    delta = std::move(prev);
  }
}

/*! \brief Exact gradients for a single example; see accumulate_backward. */
inline ParamGrads backward(const ScorerParams& params,
                           std::span<const double> input, double d_score) {
  const ForwardTrace trace = forward_trace(params, input);
  ParamGrads grads = make_grads_like(params);
  accumulate_backward(params, trace, d_score, &grads);
  return grads;
}

/*! \brief Loss layer stub: maps a score to (loss, d loss / d score). */
using LossClosure = std::function<std::pair<double, double>(double)>;

/*!
 * \brief Compare analytic parameter gradients against central differences.
 *
 * Returns max over parameters of |analytic - numeric| divided by
 * max(|analytic|, |numeric|, 1e-12). The closure must be smooth at the
 * evaluation point and produce finite losses.
 */
inline double grad_check(const ScorerParams& params,
                         std::span<const double> input,
                         const LossClosure& loss_closure, double step = 1e-5) {
  const auto [loss0, d_score] = loss_closure(forward(params, input));
  if (!std::isfinite(loss0)) {
    throw NumericError("grad_check: loss is not finite at the base point");
  }
  const ParamGrads analytic = backward(params, input, d_score);

  ScorerParams probe = params;
  double worst = 0.0;
  auto probe_param = [&](double* slot, double analytic_grad) {
    const double saved = *slot;
    *slot = saved + step;
    const double up = loss_closure(forward(probe, input)).first;
    *slot = saved - step;
    const double down = loss_closure(forward(probe, input)).first;
    *slot = saved;
    if (!std::isfinite(up) || !std::isfinite(down)) {
      throw NumericError("grad_check: loss is not finite near the base point");
    }
    const double numeric = (up - down) / (2.0 * step);
    const double denom =
        std::max({std::abs(analytic_grad), std::abs(numeric), 1e-12});
    worst = std::max(worst, std::abs(analytic_grad - numeric) / denom);
  };
  for (std::size_t l = 0; l < probe.weights.size(); ++l) {
    for (std::size_t i = 0; i < probe.weights[l].size(); ++i) {
      probe_param(&probe.weights[l][i], analytic.weights[l][i]);
    }
    for (std::size_t i = 0; i < probe.biases[l].size(); ++i) {
      probe_param(&probe.biases[l][i], analytic.biases[l][i]);
    }
  }
  return worst;
}

// ---------------------------------------------------------------------------
// Checkpoint format: line-oriented text with hex floats, so that a
// save/load round trip is bit-exact.
// ---------------------------------------------------------------------------

namespace detail {

inline void write_double_row(std::FILE* f, const std::vector<double>& row) {
  for (std::size_t i = 0; i < row.size(); ++i) {
    std::fprintf(f, i == 0 ? "%a" : " %a", row[i]);
  }
  std::fprintf(f, "\n");
}

inline std::vector<double> parse_double_row(const std::string& line,
                                            std::size_t expected,
                                            const std::string& what) {
  std::vector<double> out;
  out.reserve(expected);
  const char* p = line.c_str();
  char* end = nullptr;
  while (*p != '\0') {
    const double v = std::strtod(p, &end);
    if (end == p) break;
    out.push_back(v);
    p = end;
  }
  if (out.size() != expected) {
    throw ConfigError("checkpoint: expected " + std::to_string(expected) +
                      " values for " + what + ", got " +
                      std::to_string(out.size()));
  }
  return out;
}

}  // namespace detail

inline void save_checkpoint(const ScorerParams& params,
                            const std::string& path) {
  std::FILE* f = std::fopen(path.c_str(), "w");
  if (f == nullptr) {
    throw ConfigError("cannot open checkpoint file for writing: " + path);
  }
  std::fprintf(f, "pushrank_mlp_v1\n");
  std::fprintf(f, "activation %s %a\n",
               activation_name(params.hidden_activation), params.leaky_slope);
  std::fprintf(f, "dims");
  for (int d : params.layer_dims) std::fprintf(f, " %d", d);
  std::fprintf(f, "\n");
  for (int l = 0; l < params.num_weight_layers(); ++l) {
    std::fprintf(f, "weights %d\n", l);
    detail::write_double_row(f, params.weights[l]);
    std::fprintf(f, "biases %d\n", l);
    detail::write_double_row(f, params.biases[l]);
  }
  std::fclose(f);
}

inline ScorerParams load_checkpoint(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open checkpoint file: " + path);
  std::string line;
  auto next_line = [&](const char* what) {
    if (!std::getline(in, line)) {
      throw ConfigError(std::string("checkpoint truncated, expected ") + what);
    }
    return line;
  };
  if (next_line("header") != "pushrank_mlp_v1") {
    throw ConfigError("not a pushrank checkpoint: " + path);
  }
  ScorerParams p;
  {
    std::istringstream ss(next_line("activation"));
    std::string tag, name, slope_tok;
    ss >> tag >> name >> slope_tok;
    if (tag != "activation" || slope_tok.empty()) {
      throw ConfigError("checkpoint: malformed activation line");
    }
    if (name == "sigmoid") {
      p.hidden_activation = Activation::kSigmoid;
    } else if (name == "leaky_relu") {
      p.hidden_activation = Activation::kLeakyRelu;
    } else {
      throw ConfigError("checkpoint: unknown activation '" + name + "'");
    }
    p.leaky_slope = std::strtod(slope_tok.c_str(), nullptr);
  }
  {
    std::istringstream ss(next_line("dims"));
    std::string tag;
    ss >> tag;
    if (tag != "dims") throw ConfigError("checkpoint: malformed dims line");
    int d = 0;
    while (ss >> d) p.layer_dims.push_back(d);
    if (p.layer_dims.size() < 2 || p.layer_dims.back() != 1) {
      throw ConfigError("checkpoint: invalid layer dims");
    }
  }
  for (std::size_t l = 0; l + 1 < p.layer_dims.size(); ++l) {
    const std::size_t in_dim = static_cast<std::size_t>(p.layer_dims[l]);
    const std::size_t out_dim = static_cast<std::size_t>(p.layer_dims[l + 1]);
    if (next_line("weights tag") != "weights " + std::to_string(l)) {
      throw ConfigError("checkpoint: expected weights " + std::to_string(l));
    }
    p.weights.push_back(detail::parse_double_row(
        next_line("weights row"), in_dim * out_dim, "weights"));
    if (next_line("biases tag") != "biases " + std::to_string(l)) {
      throw ConfigError("checkpoint: expected biases " + std::to_string(l));
    }
    p.biases.push_back(
        detail::parse_double_row(next_line("biases row"), out_dim, "biases"));
  }
  return p;
}

}  // namespace pushrank

#endif  // PUSHRANK_MLP_HPP_
