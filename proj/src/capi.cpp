#include "dicert.h"

#include <cstdlib>
#include <cstring>
#include <string>

#include "dicert/certify.hpp"
#include "dicert/pipeline.hpp"
#include "dicert/qmodel.hpp"
#include "dicert/quadrature.hpp"

struct dicert_ctx {
  std::string last_error;
};

namespace {

char* dup_string(const std::string& s) {
  char* out = static_cast<char*>(std::malloc(s.size() + 1));
  if (out) std::memcpy(out, s.c_str(), s.size() + 1);
  return out;
}

template <typename Fn>
dicert_status guarded(dicert_ctx* ctx, Fn&& fn) {
  if (!ctx) return DICERT_ERR_INVALID_ARGUMENT;
  ctx->last_error.clear();
  try {
    return fn();
  } catch (const std::invalid_argument& e) {
    ctx->last_error = e.what();
    return DICERT_ERR_INVALID_ARGUMENT;
  } catch (const dicert::qmodel::ValidationError& e) {
    ctx->last_error = e.what();
    return DICERT_ERR_INVALID_ARGUMENT;
  } catch (const std::exception& e) {
    ctx->last_error = e.what();
    return DICERT_ERR_RUNTIME;
  } catch (...) {
    ctx->last_error = "unknown error";
    return DICERT_ERR_RUNTIME;
  }
}

dicert::qmodel::BellExpression bell_of(const char* family, double parameter) {
  if (!family) throw std::invalid_argument("family is null");
  std::string f = family;
  if (f == "mod_chsh") return dicert::qmodel::BellExpression::mod_chsh();
  if (f == "i_delta") return dicert::qmodel::BellExpression::i_delta(parameter);
  if (f == "j_gamma") return dicert::qmodel::BellExpression::j_gamma(parameter);
  throw std::invalid_argument("unknown Bell family: " + f);
}

dicert_status check_solver(dicert_ctx* ctx, dicert::sdp::Status s) {
  using dicert::sdp::Status;
  if (s == Status::Optimal || s == Status::NearOptimal) return DICERT_OK;
  ctx->last_error = "solver did not converge: " + dicert::sdp::status_name(s);
  return DICERT_ERR_NUMERICAL;
}

}  // namespace

extern "C" {

dicert_ctx* dicert_ctx_new(void) { return new (std::nothrow) dicert_ctx; }

void dicert_ctx_free(dicert_ctx* ctx) { delete ctx; }

const char* dicert_last_error(const dicert_ctx* ctx) {
  return ctx ? ctx->last_error.c_str() : "null context";
}

const char* dicert_version(void) { return "1.0.0"; }

void dicert_string_free(char* s) { std::free(s); }

dicert_status dicert_run_json(dicert_ctx* ctx, const char* command,
                              const char* config_json, char** out_json) {
  return guarded(ctx, [&]() -> dicert_status {
    if (!command || !config_json || !out_json)
      throw std::invalid_argument("null argument");
    auto config = nlohmann::json::parse(config_json);
    auto result = dicert::pipeline::run(command, config);
    *out_json = dup_string(result.dump(2));
    if (!*out_json) throw std::runtime_error("out of memory");
    return DICERT_OK;
  });
}

dicert_status dicert_parse_real(dicert_ctx* ctx, const char* text, double* out) {
  return guarded(ctx, [&]() -> dicert_status {
    if (!text || !out) throw std::invalid_argument("null argument");
    *out = dicert::pipeline::parse_real(text);
    return DICERT_OK;
  });
}

dicert_status dicert_tsirelson_bound(dicert_ctx* ctx, const char* family,
                                     double parameter, double* out) {
  return guarded(ctx, [&]() -> dicert_status {
    if (!out) throw std::invalid_argument("null argument");
    *out = dicert::qmodel::tsirelson_bound(bell_of(family, parameter));
    return DICERT_OK;
  });
}

dicert_status dicert_classical_bound(dicert_ctx* ctx, const char* family,
                                     double parameter, double* out) {
  return guarded(ctx, [&]() -> dicert_status {
    if (!out) throw std::invalid_argument("null argument");
    *out = dicert::qmodel::classical_bound(bell_of(family, parameter));
    return DICERT_OK;
  });
}

dicert_status dicert_bell_quantum_bound(dicert_ctx* ctx, const char* family,
                                        double parameter, int level,
                                        double* out) {
  return guarded(ctx, [&]() -> dicert_status {
    if (!out) throw std::invalid_argument("null argument");
    dicert::certify::NpaOptions o;
    o.level = level;
    auto r = dicert::certify::npa_max_bell(bell_of(family, parameter), o);
    if (auto s = check_solver(ctx, r.status); s != DICERT_OK) return s;
    *out = r.certified_bound;
    return DICERT_OK;
  });
}

dicert_status dicert_min_entropy(dicert_ctx* ctx, const char* family,
                                 double parameter, double bell_value,
                                 int level, double* out_bits) {
  return guarded(ctx, [&]() -> dicert_status {
    if (!out_bits) throw std::invalid_argument("null argument");
    auto cs = dicert::certify::ConstraintSet::from_bell(bell_of(family, parameter),
                                                        bell_value);
    dicert::certify::NpaOptions o;
    o.level = level;
    auto r = dicert::certify::min_entropy(cs, 0, 0, o);
    if (auto s = check_solver(ctx, r.status); s != DICERT_OK) return s;
    *out_bits = r.h_min_bits;
    return DICERT_OK;
  });
}

dicert_status dicert_von_neumann(dicert_ctx* ctx, const char* family,
                                 double parameter, double bell_value, int m,
                                 int level, double* out_bits) {
  return guarded(ctx, [&]() -> dicert_status {
    if (!out_bits) throw std::invalid_argument("null argument");
    auto cs = dicert::certify::ConstraintSet::from_bell(bell_of(family, parameter),
                                                        bell_value);
    dicert::certify::VNOptions o;
    o.m = m;
    o.level = level;
    auto r = dicert::certify::von_neumann_bound(cs, 0, 0, o);
    if (auto s = check_solver(ctx, r.status); s != DICERT_OK) return s;
    *out_bits = r.bits;
    return DICERT_OK;
  });
}

dicert_status dicert_gauss_radau(dicert_ctx* ctx, int m, double* nodes,
                                 double* weights) {
  return guarded(ctx, [&]() -> dicert_status {
    if (!nodes || !weights) throw std::invalid_argument("null argument");
    auto rule = dicert::quadrature::gauss_radau(m);
    for (int i = 0; i < m; ++i) {
      nodes[i] = rule.nodes[static_cast<std::size_t>(i)];
      weights[i] = rule.weights[static_cast<std::size_t>(i)];
    }
    return DICERT_OK;
  });
}

}  // extern "C"
