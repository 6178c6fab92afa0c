#pragma once

#include <json.hpp>

#include <string>
#include <vector>

namespace finidist {

enum class Verdict { pass, fail, hypothesis_not_met };

std::string to_string(Verdict v);

struct Hypothesis {
  std::string name;
  double value = 0.0;
  double threshold = 0.0;
  bool ok = true;
};

/// One checked inequality lhs <= rhs (1 + tolerance).
///
/// Oscillations entering lhs are sampled maxima, i.e. lower bounds of the
/// true oscillation: a pass is evidence, a fail is a genuine violation up to
/// quadrature error in rhs.
struct VerificationReport {
  std::string name;
  std::string suite;
  std::string map;
  nlohmann::json params = nlohmann::json::object();
  std::vector<Hypothesis> hypotheses;
  double lhs = 0.0;
  double rhs = 0.0;
  double ratio = 0.0;
  double tolerance = 0.0;
  Verdict verdict = Verdict::pass;
  // The check is constructed to fail; a fail verdict is the expected outcome.
  bool expected_fail = false;
  int level = 0;
  double error_indicator = 0.0;
  nlohmann::json details = nlohmann::json::object();

  bool hypotheses_hold() const;
  /// Sets ratio and verdict from lhs, rhs, tolerance and hypotheses.
  void decide();
  /// A fail that was not expected, or an expected fail that passed.
  bool unexpected() const;
};

}  // namespace finidist
