// Exercises the shared library through its C interface only.
#include "cubeforms/cubeforms.h"

#include <doctest.h>

#include <cstdio>
#include <cstring>
#include <filesystem>
#include <fstream>
#include <string>
#include <vector>

namespace {

const char* kConfig =
    "[run]\nname = capi\n[space]\nkind = Qminus\nr = 1\nk = 0\nn = 2\n"
    "[mesh]\nfamily = uniform\nN = 2, 4, 8\n[target]\nid = trig\n";

struct Seen {
  std::vector<std::string> names;
  int failed = 0;
};

void collect(const char* check, int passed, int, const char*, void* user) {
  auto* s = static_cast<Seen*>(user);
  s->names.push_back(check);
  s->failed += !passed;
}

}  // namespace

TEST_CASE("version and error reporting") {
  CHECK(std::strlen(cf_version()) > 0);
  cf_space* s = nullptr;
  CHECK(cf_space_create("Qminus", 1, 5, 2, nullptr, &s) == CF_INVALID_ARGUMENT);
  CHECK(s == nullptr);
  CHECK(std::string(cf_last_error()).find("space.k") != std::string::npos);
  CHECK(cf_space_create(nullptr, 1, 0, 2, nullptr, &s) == CF_INVALID_ARGUMENT);
}

TEST_CASE("space handles") {
  cf_space* q = nullptr;
  cf_space* p = nullptr;
  REQUIRE(cf_space_create("Qminus", 2, 2, 2, nullptr, &q) == CF_OK);
  REQUIRE(cf_space_create("P", 1, 2, 2, nullptr, &p) == CF_OK);
  CHECK(cf_space_dim(q) == 4);
  CHECK(std::string(cf_space_label(q)) == "Qminus r=2 k=2 n=2");
  int sa = -1, sm = -1;
  CHECK(cf_space_predict_rates(q, &sa, &sm) == CF_OK);
  CHECK(sa == 2);
  CHECK(sm == 1);
  int inside = -1;
  CHECK(cf_space_contains(q, p, &inside) == CF_OK);
  CHECK(inside == 1);
  CHECK(cf_space_contains(p, q, &inside) == CF_OK);
  CHECK(inside == 0);
  cf_space* custom = nullptr;
  REQUIRE(cf_space_create("custom", 0, 0, 2, "1; x1; x2; x1*x2", &custom) == CF_OK);
  CHECK(cf_space_dim(custom) == 4);
  cf_space* zero = nullptr;
  REQUIRE(cf_space_create("Qminus", 0, 1, 2, nullptr, &zero) == CF_OK);
  CHECK(cf_space_predict_rates(zero, &sa, &sm) == CF_INVALID_ARGUMENT);
  cf_space_destroy(zero);
  cf_space_destroy(custom);
  cf_space_destroy(p);
  cf_space_destroy(q);
  cf_space_destroy(nullptr);
}

TEST_CASE("check suite through the C interface") {
  Seen ok;
  CHECK(cf_check_run(2, 1, 0, collect, &ok) == CF_OK);
  CHECK(ok.names.size() == 5);
  CHECK(ok.failed == 0);
  Seen bad;
  CHECK(cf_check_run(2, 1, CF_CHECK_CORRUPT_BASIS, collect, &bad) == CF_VERIFICATION_FAILED);
  CHECK(bad.failed > 0);
  CHECK(cf_check_run(9, 1, 0, nullptr, nullptr) == CF_INVALID_ARGUMENT);
}

TEST_CASE("configs and convergence reports") {
  cf_config* cfg = nullptr;
  REQUIRE(cf_config_parse(kConfig, &cfg) == CF_OK);
  CHECK(std::string(cf_config_name(cfg)) == "capi");
  cf_config* again = nullptr;
  REQUIRE(cf_config_parse(cf_config_text(cfg), &again) == CF_OK);
  CHECK(std::string(cf_config_text(again)) == cf_config_text(cfg));
  cf_config_destroy(again);
  CHECK(cf_config_set_quadrature(cfg, 30) == CF_INVALID_ARGUMENT);
  CHECK(cf_config_set_quadrature(cfg, 5) == CF_OK);

  cf_report* rep = nullptr;
  REQUIRE(cf_converge(cfg, 2, &rep) == CF_OK);
  REQUIRE(cf_report_rows(rep) == 3);
  cf_row row{};
  CHECK(cf_report_row(rep, 0, &row) == CF_OK);
  CHECK(row.subdivisions == 2);
  CHECK(row.has_rate_pair == 0);
  CHECK(cf_report_row(rep, 2, &row) == CF_OK);
  CHECK(row.has_rate_pair == 1);
  CHECK(row.rate_pair > 1.5);
  CHECK(cf_report_row(rep, 3, &row) == CF_INVALID_ARGUMENT);
  int sa = 0, sm = 0, pred = 0;
  CHECK(cf_report_prediction(rep, &sa, &sm, &pred) == CF_OK);
  CHECK(pred == 2);
  CHECK(std::string(cf_report_table(rep)).find("5-point Gauss") != std::string::npos);
  CHECK(cf_report_assert_rates(rep, 0.5) == CF_OK);
  CHECK(cf_report_assert_rates(rep, 0.0) == CF_VERIFICATION_FAILED);

  const auto dir = std::filesystem::temp_directory_path() / "cubeforms_capi_test";
  std::filesystem::create_directories(dir);
  const std::string csv = (dir / "capi.csv").string(), json = (dir / "capi.json").string();
  CHECK(cf_report_write_csv(rep, csv.c_str()) == CF_OK);
  CHECK(cf_report_write_record(rep, json.c_str()) == CF_OK);
  std::ifstream in(csv);
  std::string header;
  std::getline(in, header);
  CHECK(header == "family,n,k,r,space,N,h,error,rate_pair,rate_lsq,pred_affine,pred_multilinear");
  CHECK(cf_report_write_csv(rep, "/nonexistent/dir/x.csv") == CF_INVALID_ARGUMENT);
  cf_report_destroy(rep);
  cf_config_destroy(cfg);
}

TEST_CASE("config and numerical failures map to distinct codes") {
  cf_config* cfg = nullptr;
  CHECK(cf_config_parse("[space]\nkind = \n[bogus]\n", &cfg) == CF_INVALID_ARGUMENT);
  CHECK(cf_config_load("/nonexistent.cfg", &cfg) == CF_INVALID_ARGUMENT);
  REQUIRE(cf_config_parse("[space]\nkind = custom\nk = 0\nn = 2\nbasis = x1; 2*x1\n[mesh]\nN = 2\n",
                          &cfg) == CF_OK);
  cf_report* rep = nullptr;
  CHECK(cf_converge(cfg, 1, &rep) == CF_NUMERICAL_ERROR);
  CHECK(std::string(cf_last_error()).find("element 0") != std::string::npos);
  cf_config_destroy(cfg);
}
