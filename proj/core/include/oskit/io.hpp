#pragma once

#include <optional>
#include <stdexcept>
#include <string>

#include "oskit/cpmaps.hpp"
#include "oskit/riesz.hpp"
#include "oskit/sdp.hpp"

namespace oskit {

/// Input rejection with a location string ("systems[2].basis[0]").
class ParseError : public std::runtime_error {
 public:
  explicit ParseError(const std::string& what) : std::runtime_error(what) {}
};

/// A finished run. The machine report is deterministic for fixed inputs,
/// flags and seed (wall-clock timing only appears in the human text).
/// Exit code contract: 0 all expectations met, 1 verdict mismatch or
/// violation, 2 input error, 3 solver Unknown on a required decision.
struct RunReport {
  std::string machine_json;
  std::string human_text;
  int exit_code = 0;
};

/// Run every problem in an instance file (version-1 JSON schema: system
/// definitions with [re, im] entry lists or diagonal shorthand, problem
/// sections of type interpolation | extension | cone | campaign | lmi).
/// Every emitted witness is replay-checked before the report is written.
RunReport run_instance_file(const std::string& json_text, std::optional<double> tol_override);

/// The two built-in counterexample runs on the exact path; nonzero exit on
/// any mismatch with the expected verdicts.
RunReport run_paper_examples(std::optional<double> tol_override);

/// Campaign front end.
RunReport run_campaign_report(const CampaignConfig& cfg);

/// Problem dump/load for reproducibility of any LMI verdict (shared schema
/// with the instance files).
std::string lmi_to_json(const LmiProblem& p);
LmiProblem lmi_from_json(const std::string& text);

/// System serialization for round-trips of the built-in constructions.
std::string system_to_json(const OperatorSystem& s);
OperatorSystem system_from_json(const std::string& text);

}  // namespace oskit
