#include <doctest.h>

#include <cmath>
#include <filesystem>
#include <fstream>
#include <numbers>

#include "dicert/pipeline.hpp"

using namespace dicert;
using pipeline::json;

TEST_CASE("parse_real accepts plain numbers and pi fractions") {
  CHECK(pipeline::parse_real("0.45") == doctest::Approx(0.45));
  CHECK(pipeline::parse_real("pi") == doctest::Approx(std::numbers::pi));
  CHECK(pipeline::parse_real("pi/24") == doctest::Approx(std::numbers::pi / 24));
  CHECK(pipeline::parse_real("3*pi/4") == doctest::Approx(3 * std::numbers::pi / 4));
  CHECK(pipeline::parse_real("-pi/12") == doctest::Approx(-std::numbers::pi / 12));
  CHECK_THROWS(pipeline::parse_real("two"));
  CHECK_THROWS(pipeline::parse_real("1.5x"));
}

TEST_CASE("simulate with explicit angles reproduces the ideal Bell value") {
  json cfg = {{"family", "j_gamma"},
              {"parameter", 0.0},
              {"angles_deg", {{"alice", {0.0, 30.0}}, {"bob", {22.5, 82.5}}}}};
  auto out = pipeline::simulate(cfg);
  CHECK(out.at("bell").at("value").get<double>() ==
        doctest::Approx(8 * std::pow(std::cos(std::numbers::pi / 6), 3)).epsilon(1e-6));
  CHECK(out.at("bell").at("relative").get<double>() == doctest::Approx(1.0).epsilon(1e-6));
}

TEST_CASE("simulate falls back to the bundled angle fixtures") {
  json cfg = {{"family", "i_delta"}, {"parameter", 0.52}};
  auto out = pipeline::simulate(cfg);
  CHECK(out.at("bell").at("value").get<double>() == doctest::Approx(5.196687).epsilon(1e-4));
}

TEST_CASE("simulate with visibility scales the violation") {
  json cfg = {{"family", "i_delta"}, {"parameter", 0.52}, {"visibility", 0.997}};
  auto out = pipeline::simulate(cfg);
  CHECK(out.at("bell").at("value").get<double>() == doctest::Approx(5.179).epsilon(2e-3));
}

TEST_CASE("simulate -> counts file -> ingest round trip") {
  auto counts = std::filesystem::temp_directory_path() / "dicert_pipe_counts.csv";
  json sim = {{"family", "i_delta"},
              {"parameter", 0.5},
              {"events_per_pair", 20000},
              {"runs", 5},
              {"seed", 11},
              {"counts_out", counts.string()}};
  auto out = pipeline::simulate(sim);
  REQUIRE(out.contains("sampled_bell"));
  double sampled = out.at("sampled_bell").at("value").get<double>();

  json ing = {{"counts", counts.string()}, {"family", "i_delta"}, {"parameter", 0.5}};
  auto in = pipeline::ingest(ing);
  CHECK(in.at("bell").at("value").get<double>() == doctest::Approx(sampled).epsilon(1e-12));
  CHECK(in.at("bell").at("stderr").get<double>() > 0.0);
  CHECK(in.at("summary").at("total_events").get<std::uint64_t>() == 5u * 4u * 20000u);
  std::filesystem::remove(counts);
}

TEST_CASE("ingest of an empty file is an error") {
  auto path = std::filesystem::temp_directory_path() / "dicert_pipe_empty.csv";
  std::ofstream(path) << "run,x,y,n00,n01,n10,n11\n";
  CHECK_THROWS(pipeline::ingest({{"counts", path.string()}}));
  std::filesystem::remove(path);
}

TEST_CASE("reproduce with inline cases reports per-row deltas") {
  json cfg = {{"cases",
               {{{"name", "trivial rate"},
                 {"mode", "rate"},
                 {"entropy_bits", 1.5},
                 {"rate_hz", 675.0},
                 {"expect", 1012.0},
                 {"tolerance", 1.0}},
                {{"name", "failing rate"},
                 {"mode", "rate"},
                 {"entropy_bits", 1.0},
                 {"rate_hz", 675.0},
                 {"expect", 1012.0},
                 {"tolerance", 1.0}}}}};
  auto out = pipeline::reproduce(cfg);
  REQUIRE(out.at("rows").size() == 2);
  CHECK(out.at("rows")[0].at("pass").get<bool>());
  CHECK_FALSE(out.at("rows")[1].at("pass").get<bool>());
  CHECK_FALSE(out.at("pass").get<bool>());
}

TEST_CASE("reproduce loads a bundled table by name") {
  auto out = pipeline::reproduce({{"table", "bounds"}});
  CHECK(out.at("rows").size() == 16);
  CHECK(out.at("pass").get<bool>());
}

TEST_CASE("unknown table and unknown command raise invalid-argument errors") {
  CHECK_THROWS_AS(pipeline::reproduce({{"table", "nonexistent"}}), std::invalid_argument);
  CHECK_THROWS_AS(pipeline::run("frobnicate", json::object()), std::invalid_argument);
}

TEST_CASE("certify command produces both entropy sections with rates") {
  json cfg = {{"family", "i_delta"},
              {"parameter", 0.52},
              {"constraints", {{"bell_value", 5.179}}},
              {"rate_hz", 675.0},
              {"min_entropy", json::object()},
              {"von_neumann", {{"m", 2}}}};
  auto out = pipeline::certify(cfg);
  CHECK(out.at("min_entropy").at("h_min_bits").get<double>() ==
        doctest::Approx(1.50).epsilon(0.02));
  CHECK(out.at("min_entropy").at("bits_per_second").get<double>() ==
        doctest::Approx(675.0 * 1.50).epsilon(0.02));
  CHECK(out.at("von_neumann").at("bits").get<double>() ==
        doctest::Approx(1.4768).epsilon(0.01));
}

TEST_CASE("sdp_solve command round-trips a tiny problem") {
  json prob = {{"nvars", 1},
               {"c", {1.0}},
               {"blocks",
                {{{"dim", 1},
                  {"f0", {{0, 0, -2.0}}},
                  {"vars", {{{"var", 0}, {"entries", {{0, 0, 1.0}}}}}}}}}};
  auto out = pipeline::sdp_solve({{"problem", prob}});
  CHECK(out.at("y")[0].get<double>() == doctest::Approx(2.0).epsilon(1e-6));
}
