#include "dicert/stats.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <map>
#include <random>
#include <sstream>

namespace dicert::stats {

std::pair<double, double> estimate_correlator(const CountsRecord& r) {
  std::uint64_t N = r.total();
  if (N == 0) throw std::invalid_argument("estimate_correlator: no events");
  double c = (static_cast<double>(r.n[0][0]) + r.n[1][1] -
              static_cast<double>(r.n[0][1]) - r.n[1][0]) /
             static_cast<double>(N);
  double var = std::max(0.0, 1.0 - c * c) / static_cast<double>(N);
  return {c, std::sqrt(var)};
}

ExperimentSummary aggregate_runs(const std::vector<RunDataset>& runs,
                                 AggregationMode mode) {
  if (runs.empty()) throw std::invalid_argument("aggregate_runs: no runs");

  // Collect per-run estimates and pooled counts, keyed by setting pair.
  struct Acc {
    std::vector<double> per_run;
    CountsRecord pooled;
  };
  std::map<std::pair<int, int>, Acc> acc;
  for (const auto& run : runs)
    for (const auto& rec : run.records) {
      auto& a = acc[{rec.x, rec.y}];
      a.pooled.x = rec.x;
      a.pooled.y = rec.y;
      for (int i = 0; i < 2; ++i)
        for (int j = 0; j < 2; ++j) a.pooled.n[i][j] += rec.n[i][j];
      a.per_run.push_back(estimate_correlator(rec).first);
    }

  ExperimentSummary s;
  double total_seconds = 0.0;
  for (const auto& run : runs) total_seconds += run.collection_seconds;
  for (auto& [xy, a] : acc) {
    PairEstimate e;
    e.x = xy.first;
    e.y = xy.second;
    e.events = a.pooled.total();
    s.total_events += e.events;

    std::size_t k = a.per_run.size();
    double mean = 0.0;
    for (double v : a.per_run) mean += v;
    mean /= static_cast<double>(k);
    if (k > 1) {
      double ss = 0.0;
      for (double v : a.per_run) ss += (v - mean) * (v - mean);
      e.run_std = std::sqrt(ss / static_cast<double>(k - 1));
    }

    switch (mode) {
      case AggregationMode::PerRunStddev:
        e.correlator = mean;
        e.stderr = k > 1 ? e.run_std / std::sqrt(static_cast<double>(k))
                         : estimate_correlator(a.pooled).second;
        break;
      case AggregationMode::PooledBinomial:
        std::tie(e.correlator, e.stderr) = estimate_correlator(a.pooled);
        break;
    }
    s.pairs.push_back(e);
  }
  if (total_seconds > 0.0)
    s.rate_hz = static_cast<double>(s.total_events) / total_seconds;
  return s;
}

RunDataset synthesize_counts(const qmodel::BehaviorTable& b,
                             std::uint64_t events_per_pair, std::uint64_t seed) {
  b.validate();
  std::mt19937_64 rng(seed);
  RunDataset run;
  run.run_id = "synthetic";
  for (int x = 0; x < b.nx; ++x)
    for (int y = 0; y < b.ny; ++y) {
      CountsRecord rec;
      rec.x = x;
      rec.y = y;
      // Multinomial via chained binomials over the conditional remainders.
      std::uint64_t left = events_per_pair;
      double mass = 1.0;
      int cell = 0;
      for (int a = 0; a < 2; ++a)
        for (int bb = 0; bb < 2; ++bb, ++cell) {
          double p = std::clamp(b.p(x, y, a, bb), 0.0, 1.0);
          if (cell == 3 || mass <= 0.0) {
            rec.n[a][bb] = left;
            left = 0;
            break;
          }
          double q = std::clamp(p / mass, 0.0, 1.0);
          std::binomial_distribution<std::uint64_t> bin(left, q);
          std::uint64_t k = bin(rng);
          rec.n[a][bb] = k;
          left -= k;
          mass -= p;
        }
      run.records.push_back(rec);
    }
  return run;
}

std::vector<RunDataset> load_counts(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("load_counts: cannot open " + path.string());

  std::vector<RunDataset> runs;
  std::map<std::string, std::size_t> index;
  std::string line;
  int line_no = 0;
  bool header_seen = false;
  while (std::getline(in, line)) {
    ++line_no;
    // tolerate CRLF and blank lines
    while (!line.empty() && (line.back() == '\r' || line.back() == '\n')) line.pop_back();
    if (line.empty() || line[0] == '#') continue;
    std::vector<std::string> fields;
    std::stringstream ss(line);
    std::string f;
    while (std::getline(ss, f, ',')) fields.push_back(f);
    if (!header_seen) {
      header_seen = true;
      if (fields.size() != 7 || fields[0] != "run")
        throw ParseError(line_no, "expected header run,x,y,n00,n01,n10,n11");
      continue;
    }
    if (fields.size() != 7) throw ParseError(line_no, "expected 7 fields");
    CountsRecord rec;
    try {
      rec.x = std::stoi(fields[1]);
      rec.y = std::stoi(fields[2]);
      rec.n[0][0] = std::stoull(fields[3]);
      rec.n[0][1] = std::stoull(fields[4]);
      rec.n[1][0] = std::stoull(fields[5]);
      rec.n[1][1] = std::stoull(fields[6]);
    } catch (const std::exception&) {
      throw ParseError(line_no, "malformed numeric field");
    }
    if (rec.x < 0 || rec.y < 0) throw ParseError(line_no, "negative setting index");
    auto [it, inserted] = index.try_emplace(fields[0], runs.size());
    if (inserted) {
      RunDataset run;
      run.run_id = fields[0];
      runs.push_back(std::move(run));
    }
    auto& run = runs[it->second];
    for (const auto& prev : run.records)
      if (prev.x == rec.x && prev.y == rec.y)
        throw ParseError(line_no, "duplicate setting pair within a run");
    run.records.push_back(rec);
  }
  return runs;
}

void save_counts(const std::filesystem::path& path,
                 const std::vector<RunDataset>& runs) {
  std::ofstream out(path);
  if (!out) throw std::runtime_error("save_counts: cannot open " + path.string());
  out << "run,x,y,n00,n01,n10,n11\n";
  for (const auto& run : runs)
    for (const auto& r : run.records)
      out << run.run_id << ',' << r.x << ',' << r.y << ',' << r.n[0][0] << ','
          << r.n[0][1] << ',' << r.n[1][0] << ',' << r.n[1][1] << '\n';
}

qmodel::CorrelatorSet summary_to_correlators(const ExperimentSummary& s) {
  qmodel::CorrelatorSet c;
  for (const auto& e : s.pairs) {
    c.nx = std::max(c.nx, e.x + 1);
    c.ny = std::max(c.ny, e.y + 1);
  }
  c.values.assign(static_cast<std::size_t>(c.nx) * c.ny, 0.0);
  c.stderrs = std::vector<double>(c.values.size(), 0.0);
  std::vector<bool> seen(c.values.size(), false);
  for (const auto& e : s.pairs) {
    auto i = static_cast<std::size_t>(e.x * c.ny + e.y);
    c.values[i] = e.correlator;
    (*c.stderrs)[i] = e.stderr;
    seen[i] = true;
  }
  for (bool ok : seen)
    if (!ok)
      throw std::runtime_error("summary_to_correlators: missing setting pair");
  return c;
}

}  // namespace dicert::stats
