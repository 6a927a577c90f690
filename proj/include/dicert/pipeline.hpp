// High-level JSON-config entry points: everything the command-line tool and
// the C API expose is a thin wrapper over these.
#pragma once

#include <json.hpp>
#include <string>

namespace dicert::pipeline {

using nlohmann::json;

// "0.45", "pi/24", "3*pi/4", "-pi/6" -> double.
double parse_real(const std::string& s);

// Synthesize counts from an explicit two-qubit model. Config:
//   family, parameter, angles_deg {alice: [...], bob: [...]},
//   visibility (default 1), events_per_pair, runs (default 1), seed,
//   counts_out (optional CSV path)
json simulate(const json& config);

// Aggregate a counts CSV into correlators and a Bell value. Config:
//   counts (path), aggregation ("per_run" | "pooled"),
//   family/parameter (optional, adds the Bell value)
json ingest(const json& config);

// Certified randomness from observed statistics. Config:
//   family, parameter,
//   constraints: {bell_value: v} or
//                {correlators: <correlator set>, k_sigma: k}
//   min_entropy: {level} (optional)
//   von_neumann: {m, level} (optional)
//   rate_hz (optional)
json certify(const json& config);

// Batch of certify cases; config {cases: [...]}, each case a certify config
// plus an optional "name". Output {rows: [...]}.
json reproduce(const json& config);

// Solve a serialized SDP. Config: {problem: {...}} or {problem_file: path},
// optional {options: {max_iter, gap_tol, feas_tol, verbose}}.
json sdp_solve(const json& config);

// Dispatch by command name ("simulate", "ingest", "certify", "reproduce",
// "sdp_solve"); throws std::invalid_argument for unknown commands.
json run(const std::string& command, const json& config);

}  // namespace dicert::pipeline
