#pragma once

#include <functional>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "cvtest/rng.hpp"
#include "cvtest/sample.hpp"

namespace cvtest {

/// Data-generating processes of the simulation study.
///
/// Cross-sectional (x ~ U[0,1], eps ~ N(0,1), y = m(x) + sigma(x) eps):
///   s6: m = c (1 + 0.1 x),  sigma = 1 + 0.1 x            (null holds)
///   s7: m = c (1 + 0.1 x),  sigma = 1 + 0.1 x + sqrt(x)  (alternative)
///   s8: m = c (1 + 0.1 x),  sigma = 1 + 0.1 x + 2 sqrt(x)(alternative)
///
/// Stationary recursions (z_t = m(z_{t-1}) + sigma(z_{t-1}) eps_t, lag pairs):
///   sta1: m = 1 + 0.1 z,         sigma = 1 + 0.1 z          (null holds)
///   sta2: m = sin(1 + 0.5 z),    sigma = sin(1 + 0.5 z)     (null holds)
///   sta3: m = 1 + 0.1 z,         sigma = 0.5 sqrt(|z|)      (alternative)
///   sta4: m = sin(1 + 0.5 z),    sigma = cos(1 + 0.5 z)     (alternative)
///
/// Conditional-variance recursion (squared-lag pairs y_t = z_t^2,
/// x_t = z_{t-1}^2):
///   arch1: z_t = sqrt(theta0 + theta1 z_{t-1}^2) eta_t, eta ~ N(0,1);
///          m(x) = theta0 + theta1 x, sigma = m / c with
///          c^2 = 1 / (E[eta^4] - 1) = 1/2   (null holds)
enum class ModelId { s6, s7, s8, sta1, sta2, sta3, sta4, arch1 };

[[nodiscard]] std::string model_name(ModelId id);
[[nodiscard]] ModelId parse_model(const std::string& name);

struct ModelSpec {
  ModelId id = ModelId::s6;
  double c = 1.0;             // s6..s8 only
  double theta0 = 1.0;        // arch1 only
  double theta1 = 0.5;        // arch1 only; must stay below 1
  std::size_t n = 100;        // observations after embedding
  std::size_t burn_in = 200;  // recursion models only

  /// Throws InputError on out-of-range parameters (n < 5, c <= 0,
  /// theta0 <= 0, theta1 < 0 or theta1 >= 1).
  void validate() const;
};

/// How a raw series was turned into regression pairs.
enum class EmbedMode { lag, squared_lag };

[[nodiscard]] std::string embed_name(EmbedMode mode);
[[nodiscard]] EmbedMode parse_embed(const std::string& name);

/// Raw series retained next to its embedded sample: n pairs come from n+1
/// consecutive values.
struct EmbeddedSeries {
  std::vector<double> raw;
  EmbedMode mode = EmbedMode::lag;
};

/// Embeds a raw series into regression pairs: (z_{t-1}, z_t) for lag mode,
/// (z_{t-1}^2, z_t^2) for squared-lag mode.
[[nodiscard]] Sample embed_series(std::span<const double> raw, EmbedMode mode);

/// Model truth for a spec: the mean and standard-deviation functions on the
/// predictor scale, whether the proportionality null holds, and the true
/// squared ratio when it does.
struct TrueFunctions {
  std::function<double(double)> m;
  std::function<double(double)> sigma;
  bool h0_holds = false;
  std::optional<double> c2_true;
};

[[nodiscard]] TrueFunctions true_functions(const ModelSpec& spec);

/// One generated dataset. `innovations[i]` is the innovation that produced
/// sample row i (unit-variance model errors for s6..sta4, the raw normal
/// eta_t for arch1), kept for self-consistency checks.
struct Generated {
  Sample sample;
  std::vector<double> innovations;
  std::optional<EmbeddedSeries> series;  // recursion models only
};

/// Draws one dataset of spec.n observations. Deterministic given the stream
/// state. Throws ExplosiveSeries if a recursion exceeds 1e8 in magnitude.
[[nodiscard]] Generated generate(const ModelSpec& spec, rng::Stream& stream);

/// Advances a recursion model over explicit innovations, starting from z0.
/// Returns z_0 .. z_N for N = innovations.size() (testing hook; generate()
/// is built on it). Throws ExplosiveSeries past the 1e8 guard.
[[nodiscard]] std::vector<double> iterate_recursion(const ModelSpec& spec,
                                                    std::span<const double> innovations,
                                                    double z0 = 0.0);

}  // namespace cvtest
