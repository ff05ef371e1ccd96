#pragma once

#include <cstdint>
#include <string>

#include "json.hpp"

namespace dunkl {

/// Outcome of one numerical bound check.
///
/// `empirical_sup` is taken over every evaluated sample; for stability checks
/// `sup_base` is the sup over the first half (N samples against 2N), and
/// `margin` is the distance to the failure threshold (positive when passing).
struct VerificationReport {
  std::string check_name;
  std::uint64_t sample_count = 0;
  double empirical_sup = 0.0;
  double sup_base = 0.0;
  nlohmann::json arg_sup = nlohmann::json::object();
  double margin = 0.0;
  bool pass = false;
  std::uint64_t seed = 0;
  std::int64_t runtime_ms = 0;
  nlohmann::json details = nlohmann::json::object();
};

} // namespace dunkl
