#include <doctest.h>

#include <json.hpp>

#include <cmath>
#include <cstring>
#include <string>

#include "dicert.h"

using nlohmann::json;

namespace {
struct Ctx {
  dicert_ctx* c = dicert_ctx_new();
  ~Ctx() { dicert_ctx_free(c); }
  operator dicert_ctx*() const { return c; }
};
}  // namespace

TEST_CASE("version string is present") {
  const char* v = dicert_version();
  REQUIRE(v != nullptr);
  CHECK(std::strlen(v) > 0);
}

TEST_CASE("parse_real and its error path") {
  Ctx ctx;
  double out = 0.0;
  REQUIRE(dicert_parse_real(ctx, "pi/24", &out) == DICERT_OK);
  CHECK(out == doctest::Approx(0.1308996939).epsilon(1e-9));
  CHECK(dicert_parse_real(ctx, "garbage", &out) == DICERT_ERR_INVALID_ARGUMENT);
  CHECK(std::strlen(dicert_last_error(ctx)) > 0);
  // A following successful call clears the message.
  REQUIRE(dicert_parse_real(ctx, "1.5", &out) == DICERT_OK);
  CHECK(std::strlen(dicert_last_error(ctx)) == 0);
}

TEST_CASE("closed-form bounds through the C surface") {
  Ctx ctx;
  double q = 0.0, c = 0.0;
  REQUIRE(dicert_tsirelson_bound(ctx, "i_delta", 0.52, &q) == DICERT_OK);
  CHECK(q == doctest::Approx(5.196687141).epsilon(1e-8));
  REQUIRE(dicert_classical_bound(ctx, "j_gamma", 0.0, &c) == DICERT_OK);
  CHECK(c == doctest::Approx(5.0));
  CHECK(dicert_tsirelson_bound(ctx, "nonsense", 0.0, &q) ==
        DICERT_ERR_INVALID_ARGUMENT);
  CHECK(dicert_tsirelson_bound(ctx, "i_delta", 9.0, &q) ==
        DICERT_ERR_INVALID_ARGUMENT);
}

TEST_CASE("relaxation bound and entropies") {
  Ctx ctx;
  double v = 0.0;
  REQUIRE(dicert_bell_quantum_bound(ctx, "mod_chsh", 0.0, 2, &v) == DICERT_OK);
  CHECK(v == doctest::Approx(1.0 + 2.0 * std::sqrt(2.0)).epsilon(1e-5));
  REQUIRE(dicert_min_entropy(ctx, "i_delta", 0.52, 5.179, 2, &v) == DICERT_OK);
  CHECK(v == doctest::Approx(1.50).epsilon(0.015));
  REQUIRE(dicert_von_neumann(ctx, "i_delta", 0.52, 5.179, 2, 2, &v) == DICERT_OK);
  CHECK(v == doctest::Approx(1.4768).epsilon(0.01));
}

TEST_CASE("quadrature rule export") {
  Ctx ctx;
  double nodes[3], weights[3];
  REQUIRE(dicert_gauss_radau(ctx, 2, nodes, weights) == DICERT_OK);
  CHECK(nodes[0] == doctest::Approx(1.0 / 3.0));
  CHECK(nodes[1] == doctest::Approx(1.0));
  CHECK(weights[0] == doctest::Approx(0.75));
  CHECK(dicert_gauss_radau(ctx, 1, nodes, weights) == DICERT_ERR_INVALID_ARGUMENT);
}

TEST_CASE("run_json executes pipeline commands") {
  Ctx ctx;
  json cfg = {{"family", "j_gamma"},
              {"parameter", 0.0},
              {"angles_deg", {{"alice", {0.0, 30.0}}, {"bob", {22.5, 82.5}}}}};
  char* out = nullptr;
  REQUIRE(dicert_run_json(ctx, "simulate", cfg.dump().c_str(), &out) == DICERT_OK);
  REQUIRE(out != nullptr);
  auto j = json::parse(out);
  dicert_string_free(out);
  CHECK(j.at("bell").at("value").get<double>() == doctest::Approx(5.196152).epsilon(1e-5));

  char* out2 = nullptr;
  CHECK(dicert_run_json(ctx, "nope", "{}", &out2) == DICERT_ERR_INVALID_ARGUMENT);
  CHECK(out2 == nullptr);
  CHECK(std::strlen(dicert_last_error(ctx)) > 0);
}

TEST_CASE("null arguments are rejected, not dereferenced") {
  Ctx ctx;
  double v = 0.0;
  CHECK(dicert_parse_real(ctx, nullptr, &v) == DICERT_ERR_INVALID_ARGUMENT);
  CHECK(dicert_parse_real(ctx, "1", nullptr) == DICERT_ERR_INVALID_ARGUMENT);
  char* out = nullptr;
  CHECK(dicert_run_json(ctx, nullptr, "{}", &out) == DICERT_ERR_INVALID_ARGUMENT);
}
