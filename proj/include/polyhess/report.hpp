#pragma once

// JSON views of the library's result types, used by the CLI run summaries.
// Rationals are rendered as "num/den" strings.

#include "json.hpp"
#include "polyhess/config.hpp"
#include "polyhess/energy.hpp"
#include "polyhess/exponents.hpp"
#include "polyhess/solvers.hpp"

namespace polyhess {

using nlohmann::json;

inline constexpr std::size_t kRecordRows = 1000;

json to_json(const RegimeReport& r);
json to_json(const EnergyReport& r);
json to_json(const MinorantFit& f);
json to_json(const MinorantRadii& r);
/// Downsampled to at most kRecordRows rows.
json to_json(const PSRecord& r);
/// Scalars only; the fields themselves go to dumps.
json to_json(const SolutionPair& p, int alpha);
json to_json(const SolverConfig& c);
json to_json(const RunConfig& c);
json to_json(const ContinuationRow& r);

/// Which alpha the setting uses and where it came from.
json alpha_provenance(const EnergySetting& s);

}  // namespace polyhess
