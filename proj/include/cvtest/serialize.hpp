#pragma once

#include <string>

#include "cvtest/bootstrap.hpp"

namespace cvtest {

/// JSON rendering of a single test outcome (keys: schema, t_n, c2_hat,
/// p_value, rejections, t_star, bandwidths, weighted). `config_echo`, when
/// nonempty, is attached under "config" so a run can be reproduced from its
/// own output; it must itself be a JSON object in text form.
[[nodiscard]] std::string outcome_to_json(const TestOutcome& outcome,
                                          const std::string& config_echo = "",
                                          int indent = 2);

/// Human-readable rendering of a single test outcome.
[[nodiscard]] std::string outcome_to_text(const TestOutcome& outcome);

}  // namespace cvtest
