#pragma once

// Flat key-value calibration files (`key = value`, '#' comments). Every key
// can be overridden through the environment with the EZEGM_ prefix, e.g.
// EZEGM_BETA=0.97.

#include <cstdint>
#include <map>
#include <string>

#include "ezegm/euler.hpp"
#include "ezegm/model.hpp"

namespace ezegm {

inline constexpr const char* kEnvPrefix = "EZEGM_";

/// Everything needed to build a Model, mirroring the config file keys.
struct Calibration {
  ModelParams params;
  double persistence = 0.95;
  double innovation_sd = 0.10;
  Index n_states = 10;
  double width = 3.0;
  Index n_m = 100;
  Index n_a = 100;
  double m_max_multiple = 20.0;
  double curvature = kDefaultCurvature;
  long howard_k = 1;
  std::uint64_t seed = 12345;
};

/// Parsed key-value pairs after environment overrides. Unknown keys are
/// rejected.
std::map<std::string, std::string> parse_config_file(const std::string& path);

Calibration calibration_from(const std::map<std::string, std::string>& entries);

/// Defaults, file (optional), then environment, in that order.
Calibration load_calibration(const std::string& path = "");

Model build_model(const Calibration& calibration);

}  // namespace ezegm
