#include "finidist/report.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

namespace finidist {

std::string to_string(Verdict v) {
  switch (v) {
    case Verdict::pass: return "pass";
    case Verdict::fail: return "fail";
    case Verdict::hypothesis_not_met: return "hypothesis-not-met";
  }
  return "unknown";
}

bool VerificationReport::hypotheses_hold() const {
  return std::all_of(hypotheses.begin(), hypotheses.end(), [](const Hypothesis& h) { return h.ok; });
}

void VerificationReport::decide() {
  if (rhs > 0.0) ratio = lhs / rhs;
  else ratio = lhs > 0.0 ? std::numeric_limits<double>::infinity() : 0.0;
  if (!hypotheses_hold()) verdict = Verdict::hypothesis_not_met;
  else verdict = lhs <= rhs * (1.0 + tolerance) ? Verdict::pass : Verdict::fail;
}

bool VerificationReport::unexpected() const {
  return expected_fail ? verdict != Verdict::fail : verdict == Verdict::fail;
}

}  // namespace finidist
