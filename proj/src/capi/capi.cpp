#include "cdmm/cdmm.h"

#include <algorithm>
#include <cmath>
#include <cstring>
#include <string>

#include "cdmm/glm.hpp"
#include "cdmm/partition.hpp"
#include "cdmm/security.hpp"
#include "cdmm/simulator.hpp"
#include "cdmm/worked_examples.hpp"

struct cdmm_field {
  cdmm::PrimeField field;
};
struct cdmm_matrix {
  cdmm::Matrix matrix;
};
struct cdmm_scheme {
  cdmm::SchemeParams params;
};
struct cdmm_report {
  cdmm::SchemeParams params;
  cdmm::SimReport report;
};

namespace {

thread_local std::string last_error;

int record(cdmm::ErrorCode code, const std::string& message) {
  last_error = message;
  return static_cast<int>(code);
}

template <class Fn>
int guarded(Fn&& fn) {
  try {
    last_error.clear();
    fn();
    return CDMM_OK;
  } catch (const cdmm::Error& e) {
    return record(e.code(), e.what());
  } catch (const std::bad_alloc&) {
    return record(cdmm::ErrorCode::too_large, "out of memory");
  } catch (const std::exception& e) {
    return record(cdmm::ErrorCode::invalid_argument, e.what());
  }
}

void need(const void* p, const char* what) {
  if (p == nullptr) cdmm::fail(cdmm::ErrorCode::invalid_argument, std::string(what) + " is null");
}

char* dup_string(const std::string& s) {
  char* out = new char[s.size() + 1];
  std::memcpy(out, s.c_str(), s.size() + 1);
  return out;
}

std::set<std::size_t> id_set(const size_t* ids, size_t count) {
  if (count != 0) need(ids, "id list");
  return {ids, ids + count};
}

}  // namespace

extern "C" {

const char* cdmm_status_name(int status) {
  if (status < 0 || status > static_cast<int>(cdmm::ErrorCode::field_mismatch)) return "unknown";
  return cdmm::to_string(static_cast<cdmm::ErrorCode>(status));
}

const char* cdmm_last_error(void) { return last_error.c_str(); }

void cdmm_string_free(char* s) { delete[] s; }

int cdmm_field_create(uint64_t modulus, cdmm_field** out) {
  return guarded([&] {
    need(out, "out");
    *out = new cdmm_field{cdmm::PrimeField(modulus)};
  });
}

int cdmm_field_for_orders(const uint64_t* orders, size_t count, uint64_t min_modulus, cdmm_field** out) {
  return guarded([&] {
    need(out, "out");
    if (count != 0) need(orders, "orders");
    const std::set<cdmm::u64> set(orders, orders + count);
    *out = new cdmm_field{cdmm::find_field_for_orders(set, min_modulus)};
  });
}

void cdmm_field_destroy(cdmm_field* f) { delete f; }

uint64_t cdmm_field_modulus(const cdmm_field* f) { return f ? f->field.modulus() : 0; }

int cdmm_field_root_of_unity(const cdmm_field* f, uint64_t order, uint64_t* out) {
  return guarded([&] {
    need(f, "field");
    need(out, "out");
    *out = cdmm::root_of_unity(f->field, order);
  });
}

int cdmm_field_mul(const cdmm_field* f, uint64_t a, uint64_t b, uint64_t* out) {
  return guarded([&] {
    need(f, "field");
    need(out, "out");
    if (a >= f->field.modulus() || b >= f->field.modulus())
      cdmm::fail(cdmm::ErrorCode::field_mismatch, "operand not reduced modulo p");
    *out = f->field.mul(a, b);
  });
}

int cdmm_field_inv(const cdmm_field* f, uint64_t a, uint64_t* out) {
  return guarded([&] {
    need(f, "field");
    need(out, "out");
    if (a >= f->field.modulus()) cdmm::fail(cdmm::ErrorCode::field_mismatch, "operand not reduced modulo p");
    *out = f->field.inv(a);
  });
}

int cdmm_matrix_create(size_t rows, size_t cols, cdmm_matrix** out) {
  return guarded([&] {
    need(out, "out");
    *out = new cdmm_matrix{cdmm::Matrix(rows, cols, 0)};
  });
}

int cdmm_matrix_from_data(size_t rows, size_t cols, const uint64_t* data, cdmm_matrix** out) {
  return guarded([&] {
    need(out, "out");
    if (rows * cols != 0) need(data, "data");
    cdmm::Matrix m(rows, cols, 0);
    std::copy(data, data + rows * cols, m.begin());
    *out = new cdmm_matrix{std::move(m)};
  });
}

int cdmm_matrix_random(const cdmm_field* f, size_t rows, size_t cols, uint64_t seed, cdmm_matrix** out) {
  return guarded([&] {
    need(f, "field");
    need(out, "out");
    cdmm::Rng rng(seed);
    *out = new cdmm_matrix{cdmm::random_matrix(f->field, rows, cols, rng)};
  });
}

void cdmm_matrix_destroy(cdmm_matrix* m) { delete m; }
size_t cdmm_matrix_rows(const cdmm_matrix* m) { return m ? m->matrix.rows() : 0; }
size_t cdmm_matrix_cols(const cdmm_matrix* m) { return m ? m->matrix.cols() : 0; }

int cdmm_matrix_get(const cdmm_matrix* m, size_t row, size_t col, uint64_t* out) {
  return guarded([&] {
    need(m, "matrix");
    need(out, "out");
    if (row >= m->matrix.rows() || col >= m->matrix.cols())
      cdmm::fail(cdmm::ErrorCode::invalid_argument, "index out of range");
    *out = m->matrix(row, col);
  });
}

int cdmm_matrix_set(cdmm_matrix* m, size_t row, size_t col, uint64_t value) {
  return guarded([&] {
    need(m, "matrix");
    if (row >= m->matrix.rows() || col >= m->matrix.cols())
      cdmm::fail(cdmm::ErrorCode::invalid_argument, "index out of range");
    m->matrix(row, col) = value;
  });
}

int cdmm_matrix_multiply(const cdmm_field* f, const cdmm_matrix* a, const cdmm_matrix* b, cdmm_matrix** out) {
  return guarded([&] {
    need(f, "field");
    need(a, "a");
    need(b, "b");
    need(out, "out");
    *out = new cdmm_matrix{cdmm::multiply(f->field, a->matrix, b->matrix)};
  });
}

int cdmm_matrix_read_file(const char* path, cdmm_matrix** out, uint64_t* modulus) {
  return guarded([&] {
    need(path, "path");
    need(out, "out");
    cdmm::u64 mod = 0;
    cdmm::Matrix m = cdmm::read_matrix_file(path, &mod);
    *out = new cdmm_matrix{std::move(m)};
    if (modulus) *modulus = mod;
  });
}

int cdmm_matrix_write_file(const char* path, const cdmm_matrix* m, uint64_t modulus) {
  return guarded([&] {
    need(path, "path");
    need(m, "matrix");
    cdmm::write_matrix_file(path, m->matrix, modulus);
  });
}

int cdmm_matrix_equal(const cdmm_matrix* a, const cdmm_matrix* b, int* out) {
  return guarded([&] {
    need(a, "a");
    need(b, "b");
    need(out, "out");
    *out = a->matrix == b->matrix ? 1 : 0;
  });
}

int cdmm_scheme_create(const cdmm_scheme_params* params, cdmm_scheme** out) {
  return guarded([&] {
    need(params, "params");
    need(out, "out");
    need(params->kind, "kind");
    cdmm::SchemeParams p;
    p.kind = cdmm::parse_kind(params->kind);
    p.K1 = params->K1;
    p.K2 = params->K2;
    p.m = params->m;
    p.X = params->X;
    p.r = params->r;
    p.delta = params->delta;
    p.N = params->N;
    p.seed = params->seed;
    p.modulus = params->modulus;
    p.orientation = cdmm::parse_orientation(params->orientation ? params->orientation : "auto");
    cdmm::SchemeParams check = p;
    check.N = cdmm::worker_count(p);
    cdmm::validate_params(check);
    *out = new cdmm_scheme{p};
  });
}

int cdmm_scheme_from_config(const char* text, cdmm_scheme** out) {
  return guarded([&] {
    need(text, "text");
    need(out, "out");
    cdmm::SchemeParams p = cdmm::params_from_config(cdmm::Config::parse(text));
    cdmm::SchemeParams check = p;
    check.N = cdmm::worker_count(p);
    cdmm::validate_params(check);
    *out = new cdmm_scheme{p};
  });
}

void cdmm_scheme_destroy(cdmm_scheme* s) { delete s; }

int cdmm_scheme_thresholds(const cdmm_scheme* s, size_t* best, size_t* worst) {
  return guarded([&] {
    need(s, "scheme");
    need(best, "best");
    need(worst, "worst");
    const cdmm::Thresholds t = cdmm::theoretical_thresholds(s->params);
    *best = t.best;
    *worst = t.worst;
  });
}

int cdmm_scheme_worker_count(const cdmm_scheme* s, size_t* out) {
  return guarded([&] {
    need(s, "scheme");
    need(out, "out");
    *out = cdmm::worker_count(s->params);
  });
}

int cdmm_scheme_field(const cdmm_scheme* s, cdmm_field** out) {
  return guarded([&] {
    need(s, "scheme");
    need(out, "out");
    *out = new cdmm_field{cdmm::select_field(s->params, cdmm::worker_count(s->params))};
  });
}

int cdmm_scheme_measure(const cdmm_scheme* s, const char* mode, uint64_t seed, size_t* best, size_t* worst,
                        int* exact) {
  return guarded([&] {
    need(s, "scheme");
    need(best, "best");
    need(worst, "worst");
    const cdmm::ThresholdMeasurement m =
        cdmm::measure_thresholds(s->params, cdmm::parse_measure_mode(mode ? mode : "auto"), seed);
    *best = m.best;
    *worst = m.worst;
    if (exact) *exact = m.exact ? 1 : 0;
  });
}

int cdmm_run_job(const cdmm_scheme* s, const cdmm_matrix* a, const cdmm_matrix* b, const cdmm_sim_options* options,
                 cdmm_report** out) {
  return guarded([&] {
    need(s, "scheme");
    need(a, "a");
    need(b, "b");
    need(out, "out");
    cdmm::SimConfig sim;
    if (options) {
      sim.N = options->N;
      sim.stragglers = id_set(options->stragglers, options->straggler_count);
      sim.byzantine = id_set(options->byzantine, options->byzantine_count);
      sim.shuffle_arrivals = options->shuffle_arrivals != 0;
      sim.verify = options->verify != 0;
      sim.seed = options->seed;
    }
    *out = new cdmm_report{s->params, cdmm::run_job(s->params, a->matrix, b->matrix, sim)};
  });
}

void cdmm_report_destroy(cdmm_report* r) { delete r; }
int cdmm_report_status(const cdmm_report* r) { return r ? static_cast<int>(r->report.status) : CDMM_INVALID_ARGUMENT; }
size_t cdmm_report_responses_used(const cdmm_report* r) { return r ? r->report.responses_used : 0; }
size_t cdmm_report_flagged_count(const cdmm_report* r) { return r ? r->report.byzantine_flagged.size() : 0; }
const char* cdmm_report_path(const cdmm_report* r) {
  return r && r->report.success() ? cdmm::to_string(r->report.path) : "none";
}

int cdmm_report_decoded(const cdmm_report* r, cdmm_matrix** out) {
  return guarded([&] {
    need(r, "report");
    need(out, "out");
    if (!r->report.success()) cdmm::fail(cdmm::ErrorCode::undecodable, "the job did not decode");
    *out = new cdmm_matrix{r->report.decoded};
  });
}

int cdmm_report_csv(const cdmm_report* r, int include_timing, char** out) {
  return guarded([&] {
    need(r, "report");
    need(out, "out");
    *out = dup_string(cdmm::sim_report_csv(r->params, r->report, include_timing != 0));
  });
}

int cdmm_thresholds_table(const char* grid_config, const char* format, uint64_t seed, char** out, int* all_match) {
  return guarded([&] {
    need(grid_config, "grid config");
    need(out, "out");
    const std::string fmt = format ? format : "csv";
    if (fmt != "csv" && fmt != "table") cdmm::fail(cdmm::ErrorCode::config_parse_error, "format must be csv or table");
    const cdmm::Config cfg = cdmm::Config::parse(grid_config);
    const auto grid = cdmm::expand_grid(cfg);
    const cdmm::MeasureMode mode = cdmm::parse_measure_mode(cfg.get_or("mode", "auto"));
    const cdmm::u64 used_seed = seed != 0 ? seed : cfg.get_uint("seed", 1);
    const auto rows = cdmm::emit_comparison_table(grid, mode, used_seed);
    *out = dup_string(fmt == "csv" ? cdmm::comparison_csv(rows) : cdmm::comparison_text(rows));
    if (all_match) {
      *all_match = std::all_of(rows.begin(), rows.end(), [](const cdmm::ComparisonRow& r) { return r.matches(); });
    }
  });
}

int cdmm_verify_examples(uint64_t seed, int include_timing, char** out, int* all_passed) {
  return guarded([&] {
    need(out, "out");
    const auto checks = cdmm::run_worked_examples(seed);
    *out = dup_string(cdmm::worked_examples_csv(checks, include_timing != 0));
    if (all_passed) {
      *all_passed = std::all_of(checks.begin(), checks.end(), [](const cdmm::ExampleCheck& c) { return c.passed; });
    }
  });
}

int cdmm_security_audit(const cdmm_scheme* s, size_t n_workers, uint64_t modulus, uint64_t seed, char** out,
                        int* passed) {
  return guarded([&] {
    need(s, "scheme");
    need(out, "out");
    const cdmm::AuditReport report = cdmm::exhaustive_security_audit(s->params, n_workers, modulus, seed);
    *out = dup_string(cdmm::audit_csv(report));
    if (passed) *passed = report.passed() ? 1 : 0;
  });
}

int cdmm_glm_demo(const char* glm_config, const char* dataset_path, char** trace_csv, double* max_weight_diff,
                  size_t* flagged) {
  return guarded([&] {
    need(glm_config, "config");
    need(trace_csv, "out");
    const cdmm::Config cfg = cdmm::Config::parse(glm_config);
    const cdmm::GlmConfig gc = cdmm::glm_config_from(cfg);
    std::string path = dataset_path ? dataset_path : cfg.get_or("dataset", "");
    const cdmm::Dataset data =
        path.empty() ? cdmm::make_synthetic_dataset(cfg.get_uint("rows", 200), cfg.get_uint("cols", 10), gc.loss, gc.seed)
                     : cdmm::read_dataset_csv(path);
    const cdmm::GlmTrace coded = cdmm::glm_train(data, gc);
    const cdmm::GlmTrace reference = cdmm::glm_train_reference(data, gc);
    double diff = 0;
    for (std::size_t t = 0; t < coded.weights.size(); ++t)
      for (std::size_t j = 0; j < coded.weights[t].size(); ++j)
        diff = std::max(diff, std::fabs(coded.weights[t][j] - reference.weights[t][j]));
    *trace_csv = dup_string(cdmm::loss_trace_csv(coded, reference));
    if (max_weight_diff) *max_weight_diff = diff;
    if (flagged) *flagged = coded.flagged;
  });
}

}  // extern "C"
