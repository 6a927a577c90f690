// JSON (de)serialization for the SDP problem/solution interchange format and
// the statistics / certification result payloads used by the pipeline.
#pragma once

#include <json.hpp>

#include "dicert/certify.hpp"
#include "dicert/qmodel.hpp"
#include "dicert/sdp.hpp"
#include "dicert/stats.hpp"

namespace dicert::json_io {

using nlohmann::json;

json problem_to_json(const sdp::Problem& p);
sdp::Problem problem_from_json(const json& j);

json solution_to_json(const sdp::Solution& s);

json bell_to_json(const qmodel::BellExpression& e);
qmodel::BellExpression bell_from_json(const json& j);

json correlators_to_json(const qmodel::CorrelatorSet& c);
qmodel::CorrelatorSet correlators_from_json(const json& j);

json summary_to_json(const stats::ExperimentSummary& s);

json guessing_to_json(const certify::GuessingResult& r);
json vn_to_json(const certify::VNResult& r);

}  // namespace dicert::json_io
