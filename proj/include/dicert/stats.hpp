// Coincidence-count ingestion: turn raw counts into correlators with
// uncertainties, aggregate repeated runs, and synthesize counts for testing.
#pragma once

#include <cstdint>
#include <filesystem>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include "dicert/qmodel.hpp"

namespace dicert::stats {

struct ParseError : std::runtime_error {
  int line = 0;
  ParseError(int line_no, const std::string& what)
      : std::runtime_error("line " + std::to_string(line_no) + ": " + what), line(line_no) {}
};

// Coincidence counts n(a,b) for one setting pair.
struct CountsRecord {
  int x = 0, y = 0;
  std::uint64_t n[2][2] = {{0, 0}, {0, 0}};
  std::uint64_t total() const { return n[0][0] + n[0][1] + n[1][0] + n[1][1]; }
};

struct RunDataset {
  std::string run_id;
  double collection_seconds = 0.0;
  double coincidence_window_ns = 0.0;
  std::vector<CountsRecord> records;  // at most one per (x,y)
};

struct PairEstimate {
  int x = 0, y = 0;
  double correlator = 0.0;
  double stderr = 0.0;   // per the chosen aggregation mode
  double run_std = 0.0;  // sample std across runs (0 for a single run)
  std::uint64_t events = 0;
};

struct ExperimentSummary {
  std::vector<PairEstimate> pairs;
  std::uint64_t total_events = 0;
  double rate_hz = 0.0;  // mean event rate, 0 when collection time unknown
};

// C = (n00 + n11 - n01 - n10)/N, stderr = sqrt((1 - C^2)/N) (binomial model).
std::pair<double, double> estimate_correlator(const CountsRecord& r);

enum class AggregationMode {
  PerRunStddev,    // C = mean over runs, stderr = sample std / sqrt(#runs)
  PooledBinomial,  // sum counts first, then binomial estimate
};

ExperimentSummary aggregate_runs(const std::vector<RunDataset>& runs,
                                 AggregationMode mode);

// Multinomial draws per setting pair, deterministic for a fixed seed.
RunDataset synthesize_counts(const qmodel::BehaviorTable& b,
                             std::uint64_t events_per_pair, std::uint64_t seed);

// CSV with header run,x,y,n00,n01,n10,n11; one row per setting pair per run.
std::vector<RunDataset> load_counts(const std::filesystem::path& path);
void save_counts(const std::filesystem::path& path,
                 const std::vector<RunDataset>& runs);

qmodel::CorrelatorSet summary_to_correlators(const ExperimentSummary& s);

}  // namespace dicert::stats
