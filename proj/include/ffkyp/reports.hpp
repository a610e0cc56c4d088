#pragma once

#include "ffkyp/enlargement.hpp"
#include "ffkyp/gramians.hpp"
#include "ffkyp/lmi.hpp"
#include "ffkyp/simulation.hpp"
#include "ffkyp/system_io.hpp"

#include <string>
#include <vector>

namespace ffkyp {

Json to_json(const FrequencyRange& range);
Json to_json(const GammaResult& result);
Json to_json(const UasCertificate& cert);
Json to_json(const ShiftedTraceBound& bound);
Json to_json(const EnlargementResult& result);
Json to_json(const GramianSet& set, const GramianOptions& options);

/// Final γ_R and IQC verdicts of one simulation.
Json simulation_summary(const SimulationResult& result, const std::vector<FrequencyRange>& ranges);

/// One published number with its acceptance band.
struct ReferenceValue {
  std::string key;
  double value = 0.0;
  double rel_tol = 0.0;
  std::string label;
};

const std::vector<ReferenceValue>& reference_values();
const ReferenceValue& reference(const std::string& key);
bool within_band(const ReferenceValue& ref, double computed);

struct ComparisonRow {
  std::string key;
  std::string label;
  double reference = 0.0;
  double computed = 0.0;
  double rel_tol = 0.0;
  bool pass = false;
  std::string note;
};

ComparisonRow compare(const std::string& key, double computed, const std::string& note = "");
Json to_json(const std::vector<ComparisonRow>& rows);
std::string format_table(const std::vector<ComparisonRow>& rows);

}  // namespace ffkyp
