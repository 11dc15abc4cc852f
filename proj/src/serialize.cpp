#include "cvtest/serialize.hpp"

#include <cstdio>
#include <sstream>

#include "json.hpp"

#include "cvtest/errors.hpp"

namespace cvtest {

namespace {

using nlohmann::json;

// Shortest round-trip decimal form of a number, for use as an object key.
std::string number_key(double v) { return json(v).dump(); }

}  // namespace

std::string outcome_to_json(const TestOutcome& outcome,
                            const std::string& config_echo, int indent) {
  json j;
  j["schema"] = 1;
  j["t_n"] = outcome.t_observed;
  j["c2_hat"] = outcome.c2_hat;
  j["p_value"] = outcome.p_value;
  json rej = json::object();
  for (const auto& [alpha, reject] : outcome.rejections) {
    rej[number_key(alpha)] = reject;
  }
  j["rejections"] = rej;
  j["t_star"] = outcome.t_star;
  j["bandwidths"] = {{"h_mean", outcome.bandwidths_used.h_mean},
                     {"h_var", outcome.bandwidths_used.h_var},
                     {"g", outcome.bandwidths_used.g}};
  j["weighted"] = outcome.weighted;
  if (!config_echo.empty()) {
    try {
      j["config"] = json::parse(config_echo);
    } catch (const json::exception& e) {
      throw InputError(std::string("config echo is not valid JSON: ") + e.what());
    }
  }
  return j.dump(indent) + "\n";
}

std::string outcome_to_text(const TestOutcome& outcome) {
  std::ostringstream out;
  char buf[128];
  std::snprintf(buf, sizeof(buf), "t_n      = %.10g\n", outcome.t_observed);
  out << buf;
  std::snprintf(buf, sizeof(buf), "c2_hat   = %.10g\n", outcome.c2_hat);
  out << buf;
  std::snprintf(buf, sizeof(buf), "p_value  = %.10g\n", outcome.p_value);
  out << buf;
  std::snprintf(buf, sizeof(buf),
                "bandwidths: h_mean = %.6g, h_var = %.6g, g = %.6g%s\n",
                outcome.bandwidths_used.h_mean, outcome.bandwidths_used.h_var,
                outcome.bandwidths_used.g,
                outcome.weighted ? "  (doubly weighted)" : "");
  out << buf;
  for (const auto& [alpha, reject] : outcome.rejections) {
    std::snprintf(buf, sizeof(buf), "alpha = %-6.4g  ->  %s\n", alpha,
                  reject ? "reject" : "retain");
    out << buf;
  }
  return out.str();
}

}  // namespace cvtest
