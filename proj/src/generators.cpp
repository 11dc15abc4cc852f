#include "cvtest/generators.hpp"

#include <cmath>
#include <string>

#include "cvtest/errors.hpp"

namespace cvtest {

namespace {

constexpr double kExplosionGuard = 1e8;

bool is_recursion(ModelId id) {
  switch (id) {
    case ModelId::sta1:
    case ModelId::sta2:
    case ModelId::sta3:
    case ModelId::sta4:
    case ModelId::arch1:
      return true;
    default:
      return false;
  }
}

}  // namespace

std::string model_name(ModelId id) {
  switch (id) {
    case ModelId::s6: return "s6";
    case ModelId::s7: return "s7";
    case ModelId::s8: return "s8";
    case ModelId::sta1: return "sta1";
    case ModelId::sta2: return "sta2";
    case ModelId::sta3: return "sta3";
    case ModelId::sta4: return "sta4";
    case ModelId::arch1: return "arch1";
  }
  return "?";
}

ModelId parse_model(const std::string& name) {
  if (name == "s6") return ModelId::s6;
  if (name == "s7") return ModelId::s7;
  if (name == "s8") return ModelId::s8;
  if (name == "sta1") return ModelId::sta1;
  if (name == "sta2") return ModelId::sta2;
  if (name == "sta3") return ModelId::sta3;
  if (name == "sta4") return ModelId::sta4;
  if (name == "arch1") return ModelId::arch1;
  throw InputError("unknown model '" + name +
                   "' (expected s6, s7, s8, sta1..sta4 or arch1)");
}

std::string embed_name(EmbedMode mode) {
  return mode == EmbedMode::lag ? "lag" : "squared-lag";
}

EmbedMode parse_embed(const std::string& name) {
  if (name == "lag") return EmbedMode::lag;
  if (name == "squared-lag") return EmbedMode::squared_lag;
  throw InputError("unknown embedding '" + name + "' (expected lag or squared-lag)");
}

void ModelSpec::validate() const {
  if (n < 5) throw InputError("model needs n >= 5, got " + std::to_string(n));
  if (id == ModelId::s6 || id == ModelId::s7 || id == ModelId::s8) {
    if (!(c > 0.0) || !std::isfinite(c)) {
      throw InputError("ratio c must be positive and finite");
    }
  }
  if (id == ModelId::arch1) {
    if (!(theta0 > 0.0) || !std::isfinite(theta0)) {
      throw InputError("theta0 must be positive and finite");
    }
    if (!(theta1 >= 0.0) || !(theta1 < 1.0)) {
      throw InputError("theta1 must lie in [0, 1) for a stationary recursion");
    }
  }
}

Sample embed_series(std::span<const double> raw, EmbedMode mode) {
  if (raw.size() < 2) throw InputError("series too short to embed");
  const std::size_t n = raw.size() - 1;
  Sample s;
  s.x.resize(n);
  s.y.resize(n);
  for (std::size_t t = 0; t < n; ++t) {
    if (mode == EmbedMode::lag) {
      s.x[t] = raw[t];
      s.y[t] = raw[t + 1];
    } else {
      s.x[t] = raw[t] * raw[t];
      s.y[t] = raw[t + 1] * raw[t + 1];
    }
  }
  return s;
}

TrueFunctions true_functions(const ModelSpec& spec) {
  spec.validate();
  TrueFunctions f;
  const double c = spec.c;
  switch (spec.id) {
    case ModelId::s6:
      f.m = [c](double x) { return c * (1.0 + 0.1 * x); };
      f.sigma = [](double x) { return 1.0 + 0.1 * x; };
      f.h0_holds = true;
      f.c2_true = c * c;
      break;
    case ModelId::s7:
      f.m = [c](double x) { return c * (1.0 + 0.1 * x); };
      f.sigma = [](double x) { return 1.0 + 0.1 * x + std::sqrt(x); };
      f.h0_holds = false;
      break;
    case ModelId::s8:
      f.m = [c](double x) { return c * (1.0 + 0.1 * x); };
      f.sigma = [](double x) { return 1.0 + 0.1 * x + 2.0 * std::sqrt(x); };
      f.h0_holds = false;
      break;
    case ModelId::sta1:
      f.m = [](double x) { return 1.0 + 0.1 * x; };
      f.sigma = [](double x) { return 1.0 + 0.1 * x; };
      f.h0_holds = true;
      f.c2_true = 1.0;
      break;
    case ModelId::sta2:
      f.m = [](double x) { return std::sin(1.0 + 0.5 * x); };
      f.sigma = [](double x) { return std::sin(1.0 + 0.5 * x); };
      f.h0_holds = true;
      f.c2_true = 1.0;
      break;
    case ModelId::sta3:
      f.m = [](double x) { return 1.0 + 0.1 * x; };
      f.sigma = [](double x) { return 0.5 * std::sqrt(std::abs(x)); };
      f.h0_holds = false;
      break;
    case ModelId::sta4:
      f.m = [](double x) { return std::sin(1.0 + 0.5 * x); };
      f.sigma = [](double x) { return std::cos(1.0 + 0.5 * x); };
      f.h0_holds = false;
      break;
    case ModelId::arch1: {
      const double t0 = spec.theta0;
      const double t1 = spec.theta1;
      // Squared-lag scale: y_t = z_t^2, x_t = z_{t-1}^2. With standard normal
      // eta, E[eta^4] - 1 = 2, so the proportionality ratio is c^2 = 1/2.
      f.m = [t0, t1](double x) { return t0 + t1 * x; };
      f.sigma = [t0, t1](double x) { return std::sqrt(2.0) * (t0 + t1 * x); };
      f.h0_holds = true;
      f.c2_true = 0.5;
      break;
    }
  }
  return f;
}

std::vector<double> iterate_recursion(const ModelSpec& spec,
                                      std::span<const double> innovations,
                                      double z0) {
  std::vector<double> z(innovations.size() + 1);
  z[0] = z0;
  for (std::size_t t = 0; t < innovations.size(); ++t) {
    const double prev = z[t];
    double next = 0.0;
    switch (spec.id) {
      case ModelId::sta1:
        next = (1.0 + 0.1 * prev) * (1.0 + innovations[t]);
        break;
      case ModelId::sta2:
        next = std::sin(1.0 + 0.5 * prev) * (1.0 + innovations[t]);
        break;
      case ModelId::sta3:
        next = 1.0 + 0.1 * prev + 0.5 * std::sqrt(std::abs(prev)) * innovations[t];
        break;
      case ModelId::sta4:
        next = std::sin(1.0 + 0.5 * prev) +
               std::cos(1.0 + 0.5 * prev) * innovations[t];
        break;
      case ModelId::arch1:
        next = std::sqrt(spec.theta0 + spec.theta1 * prev * prev) * innovations[t];
        break;
      default:
        throw std::invalid_argument("iterate_recursion needs a recursion model");
    }
    if (!(std::abs(next) <= kExplosionGuard)) {
      throw ExplosiveSeries("series left the safety region |z| <= 1e8 at step " +
                            std::to_string(t + 1));
    }
    z[t + 1] = next;
  }
  return z;
}

Generated generate(const ModelSpec& spec, rng::Stream& stream) {
  spec.validate();
  Generated out;

  if (!is_recursion(spec.id)) {
    const TrueFunctions f = true_functions(spec);
    out.sample.x.resize(spec.n);
    out.sample.y.resize(spec.n);
    out.innovations.resize(spec.n);
    for (std::size_t i = 0; i < spec.n; ++i) out.sample.x[i] = stream.uniform01();
    for (std::size_t i = 0; i < spec.n; ++i) out.innovations[i] = stream.normal();
    for (std::size_t i = 0; i < spec.n; ++i) {
      const double x = out.sample.x[i];
      out.sample.y[i] = f.m(x) + f.sigma(x) * out.innovations[i];
    }
    return out;
  }

  // Recursion models: run burn_in + n steps from z = 0, keep the last n + 1
  // states, embed consecutive pairs.
  const std::size_t steps = spec.burn_in + spec.n;
  std::vector<double> innov(steps);
  for (std::size_t t = 0; t < steps; ++t) innov[t] = stream.normal();
  const std::vector<double> path = iterate_recursion(spec, innov, 0.0);

  const EmbedMode mode =
      spec.id == ModelId::arch1 ? EmbedMode::squared_lag : EmbedMode::lag;
  std::vector<double> raw(path.end() - static_cast<std::ptrdiff_t>(spec.n) - 1,
                          path.end());
  out.sample = embed_series(raw, mode);
  out.series = EmbeddedSeries{std::move(raw), mode};
  out.innovations.assign(innov.end() - static_cast<std::ptrdiff_t>(spec.n),
                         innov.end());
  return out;
}

}  // namespace cvtest
