#include "cubeforms/cubeforms.h"

#include "cubeforms/experiment.hpp"

#include <fstream>
#include <new>
#include <sstream>

using namespace cubeforms;

struct cf_space {
  FormSpace space;
};

struct cf_config {
  ExperimentConfig config;
  std::string text;
};

struct cf_report {
  RunRecord record;
  std::string table;
};

namespace {

thread_local std::string last_error;

cf_status fail(cf_status code, const std::string& message) {
  last_error = message;
  return code;
}

// Maps exceptions to status codes.
template <class F>
cf_status guarded(F&& body) {
  try {
    last_error.clear();
    return body();
  } catch (const ConfigError& e) {
    return fail(CF_INVALID_ARGUMENT, e.what());
  } catch (const NumericalError& e) {
    return fail(CF_NUMERICAL_ERROR, e.what());
  } catch (const std::domain_error& e) {
    return fail(CF_INVALID_ARGUMENT, e.what());
  } catch (const std::invalid_argument& e) {
    return fail(CF_INVALID_ARGUMENT, e.what());
  } catch (const std::bad_alloc&) {
    return fail(CF_INTERNAL_ERROR, "out of memory");
  } catch (const std::exception& e) {
    return fail(CF_INTERNAL_ERROR, e.what());
  }
}

}  // namespace

extern "C" {

const char* cf_version(void) { return kVersion; }

const char* cf_last_error(void) { return last_error.c_str(); }

cf_status cf_space_create(const char* kind, int r, int k, int n, const char* basis,
                          cf_space** out) {
  if (!kind || !out) return fail(CF_INVALID_ARGUMENT, "cf_space_create: null argument");
  return guarded([&] {
    SpaceSpec spec{kind, r, k, n, basis ? basis : ""};
    *out = new cf_space{make_space(spec)};
    return CF_OK;
  });
}

void cf_space_destroy(cf_space* space) { delete space; }

int cf_space_dim(const cf_space* space) { return space ? space->space.dim() : -1; }

const char* cf_space_label(const cf_space* space) {
  return space ? space->space.label.c_str() : "";
}

cf_status cf_space_predict_rates(const cf_space* space, int* s_affine, int* s_multilinear) {
  if (!space || !s_affine || !s_multilinear)
    return fail(CF_INVALID_ARGUMENT, "cf_space_predict_rates: null argument");
  return guarded([&] {
    const RatePrediction p = predict_rates(space->space);
    *s_affine = p.s_affine;
    *s_multilinear = p.s_multilinear;
    return CF_OK;
  });
}

cf_status cf_space_contains(const cf_space* outer, const cf_space* inner, int* result) {
  if (!outer || !inner || !result) return fail(CF_INVALID_ARGUMENT, "cf_space_contains: null argument");
  return guarded([&] {
    *result = contains(outer->space, inner->space) ? 1 : 0;
    return CF_OK;
  });
}

cf_status cf_check_run(int max_n, int max_r, unsigned flags, cf_check_callback callback,
                       void* user) {
  if (max_n < 1 || max_n > 4 || max_r < 0 || max_r > 4)
    return fail(CF_INVALID_ARGUMENT, "cf_check_run: need 1 <= max_n <= 4 and 0 <= max_r <= 4");
  return guarded([&] {
    CheckOptions opt;
    opt.max_n = max_n;
    opt.max_r = max_r;
    if (flags & CF_CHECK_CORRUPT_BASIS) opt.qminus = build_Qminus_corrupted;
    bool all = true;
    run_checks(opt, [&](const CheckResult& res) {
      all = all && res.passed;
      if (!callback) return;
      std::string detail;
      for (const auto& f : res.failures) detail += f + "\n";
      callback(res.name.c_str(), res.passed ? 1 : 0, res.cases, detail.c_str(), user);
    });
    if (!all) return fail(CF_VERIFICATION_FAILED, "one or more checks failed");
    return CF_OK;
  });
}

cf_status cf_config_load(const char* path, cf_config** out) {
  if (!path || !out) return fail(CF_INVALID_ARGUMENT, "cf_config_load: null argument");
  return guarded([&] {
    ExperimentConfig cfg = load_config(path);
    *out = new cf_config{cfg, serialize_config(cfg)};
    return CF_OK;
  });
}

cf_status cf_config_parse(const char* text, cf_config** out) {
  if (!text || !out) return fail(CF_INVALID_ARGUMENT, "cf_config_parse: null argument");
  return guarded([&] {
    ExperimentConfig cfg = parse_config(text);
    *out = new cf_config{cfg, serialize_config(cfg)};
    return CF_OK;
  });
}

void cf_config_destroy(cf_config* config) { delete config; }

cf_status cf_config_set_quadrature(cf_config* config, int order) {
  if (!config) return fail(CF_INVALID_ARGUMENT, "cf_config_set_quadrature: null config");
  if (order < 0 || order > 20) return fail(CF_INVALID_ARGUMENT, "quadrature order must be 0..20");
  config->config.quadrature_order = order;
  config->text = serialize_config(config->config);
  return CF_OK;
}

const char* cf_config_name(const cf_config* config) {
  return config ? config->config.name.c_str() : "";
}

const char* cf_config_text(const cf_config* config) { return config ? config->text.c_str() : ""; }

cf_status cf_converge(const cf_config* config, int threads, cf_report** out) {
  if (!config || !out) return fail(CF_INVALID_ARGUMENT, "cf_converge: null argument");
  if (threads < 1) return fail(CF_INVALID_ARGUMENT, "cf_converge: threads must be >= 1");
  return guarded([&] {
    auto* rep = new cf_report{run_experiment(config->config, threads), ""};
    rep->table = format_table(rep->record.report);
    *out = rep;
    return CF_OK;
  });
}

void cf_report_destroy(cf_report* report) { delete report; }

int cf_report_rows(const cf_report* report) {
  return report ? static_cast<int>(report->record.report.rows.size()) : 0;
}

cf_status cf_report_row(const cf_report* report, int index, cf_row* row) {
  if (!report || !row) return fail(CF_INVALID_ARGUMENT, "cf_report_row: null argument");
  const auto& rows = report->record.report.rows;
  if (index < 0 || index >= static_cast<int>(rows.size()))
    return fail(CF_INVALID_ARGUMENT, "cf_report_row: index out of range");
  const auto& r = rows[index];
  *row = cf_row{r.subdivisions, r.h, r.error, r.rate_pair.value_or(0.0), r.rate_lsq.value_or(0.0),
                r.rate_pair.has_value(), r.rate_lsq.has_value()};
  return CF_OK;
}

cf_status cf_report_prediction(const cf_report* report, int* s_affine, int* s_multilinear,
                               int* predicted) {
  if (!report) return fail(CF_INVALID_ARGUMENT, "cf_report_prediction: null report");
  const auto& rep = report->record.report;
  if (s_affine) *s_affine = rep.prediction.s_affine;
  if (s_multilinear) *s_multilinear = rep.prediction.s_multilinear;
  if (predicted) *predicted = rep.predicted_rate();
  return CF_OK;
}

const char* cf_report_table(const cf_report* report) {
  return report ? report->table.c_str() : "";
}

cf_status cf_report_write_csv(const cf_report* report, const char* path) {
  if (!report || !path) return fail(CF_INVALID_ARGUMENT, "cf_report_write_csv: null argument");
  return guarded([&] {
    std::ofstream out(path);
    if (!out) return fail(CF_INVALID_ARGUMENT, std::string("cannot write '") + path + "'");
    write_csv(report->record.report, out);
    return out ? CF_OK : fail(CF_INTERNAL_ERROR, std::string("write failed: ") + path);
  });
}

cf_status cf_report_write_record(const cf_report* report, const char* path) {
  if (!report || !path) return fail(CF_INVALID_ARGUMENT, "cf_report_write_record: null argument");
  return guarded([&] {
    std::ofstream out(path);
    if (!out) return fail(CF_INVALID_ARGUMENT, std::string("cannot write '") + path + "'");
    out << record_json(report->record) << "\n";
    return out ? CF_OK : fail(CF_INTERNAL_ERROR, std::string("write failed: ") + path);
  });
}

cf_status cf_report_assert_rates(const cf_report* report, double tol) {
  if (!report) return fail(CF_INVALID_ARGUMENT, "cf_report_assert_rates: null report");
  const auto& rep = report->record.report;
  if (rates_meet_prediction(rep, tol)) return CF_OK;
  std::ostringstream msg;
  msg << "measured rate " << rep.last_rate() << " below predicted " << rep.predicted_rate()
      << " - " << tol;
  return fail(CF_VERIFICATION_FAILED, msg.str());
}

}  // extern "C"
