#include "seq2attn/seq2attn.h"

#include <cstring>
#include <string>

#include "s2a/config.hpp"
#include "s2a/runner.hpp"

namespace {

thread_local std::string g_last_error;

void copy_out(const std::string& value, char* buf, size_t buf_size) {
  if (!buf || buf_size == 0) return;
  const size_t n = std::min(value.size(), buf_size - 1);
  std::memcpy(buf, value.data(), n);
  buf[n] = '\0';
}

// Runs `fn`, translating exceptions into status codes + the thread's
// error message. ConfigError maps to the usage/config code; everything
// else (I/O, internal errors) is a runtime failure.
template <typename Fn>
s2a_status guarded(Fn&& fn) {
  try {
    fn();
    g_last_error.clear();
    return S2A_OK;
  } catch (const s2a::ConfigError& e) {
    g_last_error = e.what();
    return S2A_CONFIG_ERROR;
  } catch (const std::exception& e) {
    g_last_error = e.what();
    return S2A_RUNTIME_ERROR;
  }
}

s2a_status require(bool ok, const char* message) {
  if (ok) return S2A_OK;
  g_last_error = message;
  return S2A_CONFIG_ERROR;
}

const s2a::RunConfig& unwrap(const s2a_config* cfg) {
  return *reinterpret_cast<const s2a::RunConfig*>(cfg);
}

s2a::RunConfig& unwrap(s2a_config* cfg) {
  return *reinterpret_cast<s2a::RunConfig*>(cfg);
}

}  // namespace

extern "C" {

const char* s2a_last_error(void) { return g_last_error.c_str(); }

s2a_status s2a_config_create(s2a_config** out) {
  if (const s2a_status bad = require(out != nullptr, "out pointer is NULL")) {
    return bad;
  }
  return guarded([&] {
    *out = reinterpret_cast<s2a_config*>(new s2a::RunConfig());
  });
}

s2a_status s2a_config_load(const char* path, s2a_config** out) {
  if (const s2a_status bad =
          require(path && out, "path and out must be non-NULL")) {
    return bad;
  }
  return guarded([&] {
    *out = reinterpret_cast<s2a_config*>(
        new s2a::RunConfig(s2a::RunConfig::from_file(path)));
  });
}

s2a_status s2a_config_set(s2a_config* cfg, const char* assignment) {
  if (const s2a_status bad =
          require(cfg && assignment, "cfg and assignment must be non-NULL")) {
    return bad;
  }
  return guarded([&] { unwrap(cfg).apply_override(assignment); });
}

s2a_status s2a_config_get(const s2a_config* cfg, const char* key, char* buf,
                          size_t buf_size) {
  if (const s2a_status bad =
          require(cfg && key, "cfg and key must be non-NULL")) {
    return bad;
  }
  return guarded([&] { copy_out(unwrap(cfg).get(key), buf, buf_size); });
}

s2a_status s2a_config_validate(const s2a_config* cfg) {
  if (const s2a_status bad = require(cfg != nullptr, "cfg is NULL")) {
    return bad;
  }
  return guarded([&] { unwrap(cfg).validate(); });
}

void s2a_config_free(s2a_config* cfg) {
  delete reinterpret_cast<s2a::RunConfig*>(cfg);
}

s2a_status s2a_generate(const s2a_config* cfg) {
  if (const s2a_status bad = require(cfg != nullptr, "cfg is NULL")) {
    return bad;
  }
  return guarded([&] { s2a::runner::generate(unwrap(cfg)); });
}

s2a_status s2a_train(const s2a_config* cfg, char* run_dir_buf,
                     size_t buf_size) {
  if (const s2a_status bad = require(cfg != nullptr, "cfg is NULL")) {
    return bad;
  }
  return guarded([&] {
    copy_out(s2a::runner::run_train(unwrap(cfg)).run_dir, run_dir_buf,
             buf_size);
  });
}

s2a_status s2a_eval(const s2a_config* cfg, const char* checkpoint_path,
                    const char* dataset_path, int dump_attention,
                    double* sequence_accuracy, double* loss) {
  if (const s2a_status bad =
          require(cfg && checkpoint_path && dataset_path,
                  "cfg, checkpoint_path and dataset_path must be non-NULL")) {
    return bad;
  }
  return guarded([&] {
    const s2a::runner::EvalArtifacts result = s2a::runner::run_eval(
        unwrap(cfg), checkpoint_path, dataset_path, dump_attention != 0);
    if (sequence_accuracy) *sequence_accuracy = result.sequence_accuracy;
    if (loss) *loss = result.loss;
  });
}

s2a_status s2a_ablate(const s2a_config* cfg, char* run_dir_buf,
                      size_t buf_size) {
  if (const s2a_status bad = require(cfg != nullptr, "cfg is NULL")) {
    return bad;
  }
  return guarded([&] {
    copy_out(s2a::runner::run_ablate(unwrap(cfg)).run_dir, run_dir_buf,
             buf_size);
  });
}

s2a_status s2a_grid(const s2a_config* cfg, char* run_dir_buf,
                    size_t buf_size) {
  if (const s2a_status bad = require(cfg != nullptr, "cfg is NULL")) {
    return bad;
  }
  return guarded([&] {
    copy_out(s2a::runner::run_grid(unwrap(cfg)).run_dir, run_dir_buf,
             buf_size);
  });
}

s2a_status s2a_overgen(const s2a_config* cfg, char* run_dir_buf,
                       size_t buf_size) {
  if (const s2a_status bad = require(cfg != nullptr, "cfg is NULL")) {
    return bad;
  }
  return guarded([&] {
    copy_out(s2a::runner::run_overgen(unwrap(cfg)).run_dir, run_dir_buf,
             buf_size);
  });
}

}  // extern "C"
