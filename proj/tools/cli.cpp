// cubeforms command-line front end: exact checks, rate predictions and
// configuration-driven convergence runs. Uses only the C API.

#include "cubeforms/cubeforms.h"

#include <CLI11.hpp>

#include <cstdio>
#include <filesystem>
#include <iostream>
#include <string>
#include <vector>

namespace {

int report_error(cf_status status, const std::string& context) {
  std::cerr << "error: " << context << ": " << cf_last_error() << "\n";
  return static_cast<int>(status);
}

// "3" or "1..6"
bool parse_range(const std::string& text, int& lo, int& hi) {
  try {
    const auto dots = text.find("..");
    std::size_t pos = 0;
    if (dots == std::string::npos) {
      lo = hi = std::stoi(text, &pos);
      return pos == text.size();
    }
    const std::string a = text.substr(0, dots), b = text.substr(dots + 2);
    lo = std::stoi(a, &pos);
    if (pos != a.size()) return false;
    hi = std::stoi(b, &pos);
    return pos == b.size() && lo <= hi;
  } catch (const std::exception&) {
    return false;
  }
}

void print_check(const char* check, int passed, int cases, const char* detail, void*) {
  std::printf("%-12s %s (%d cases)\n", check, passed ? "PASS" : "FAIL", cases);
  if (!passed) {
    std::string d = detail;
    std::size_t start = 0;
    while (start < d.size()) {
      auto end = d.find('\n', start);
      if (end == std::string::npos) end = d.size();
      std::printf("    %s\n", d.substr(start, end - start).c_str());
      start = end + 1;
    }
  }
  std::fflush(stdout);
}

int cmd_check(int max_n, int max_r, bool corrupt) {
  const cf_status st =
      cf_check_run(max_n, max_r, corrupt ? CF_CHECK_CORRUPT_BASIS : 0u, print_check, nullptr);
  if (st == CF_VERIFICATION_FAILED) {
    std::printf("FAILED\n");
    return st;
  }
  if (st != CF_OK) return report_error(st, "check");
  std::printf("all checks passed\n");
  return 0;
}

int cmd_rates(const std::string& kind, const std::string& r_range, int k, int n,
              const std::string& basis) {
  int lo = 0, hi = 0;
  if (kind == "custom") {
    lo = hi = 0;
  } else if (!parse_range(r_range, lo, hi)) {
    std::cerr << "error: --r expects an integer or a range like 1..6\n";
    return CF_INVALID_ARGUMENT;
  }
  std::printf("%-32s %6s %12s %12s\n", "space", "dim", "affine", "multilinear");
  for (int r = lo; r <= hi; ++r) {
    cf_space* space = nullptr;
    cf_status st = cf_space_create(kind.c_str(), r, k, n, basis.empty() ? nullptr : basis.c_str(),
                                   &space);
    if (st != CF_OK) return report_error(st, "rates");
    int sa = 0, sm = 0;
    st = cf_space_predict_rates(space, &sa, &sm);
    if (st != CF_OK) {
      cf_space_destroy(space);
      return report_error(st, "rates");
    }
    std::printf("%-32s %6d %12d %12d\n", cf_space_label(space), cf_space_dim(space), sa, sm);
    cf_space_destroy(space);
  }
  return 0;
}

int cmd_converge(const std::string& path, int threads, double assert_tol, int quad,
                 std::string out_dir) {
  cf_config* cfg = nullptr;
  cf_status st = cf_config_load(path.c_str(), &cfg);
  if (st != CF_OK) return report_error(st, path);
  if (quad >= 0 && (st = cf_config_set_quadrature(cfg, quad)) != CF_OK) {
    cf_config_destroy(cfg);
    return report_error(st, "--quad");
  }
  if (out_dir.empty()) {
    // fall back to the [run] out key
    const std::string text = cf_config_text(cfg);
    const auto pos = text.find("\nout = ");
    out_dir = pos == std::string::npos ? "." : text.substr(pos + 7, text.find('\n', pos + 1) - pos - 7);
  }
  const std::string name = cf_config_name(cfg);

  cf_report* rep = nullptr;
  st = cf_converge(cfg, threads, &rep);
  cf_config_destroy(cfg);
  if (st != CF_OK) return report_error(st, "converge " + name);

  std::fputs(cf_report_table(rep), stdout);
  std::error_code ec;
  std::filesystem::create_directories(out_dir, ec);
  const std::string base = (std::filesystem::path(out_dir) / name).string();
  if ((st = cf_report_write_csv(rep, (base + ".csv").c_str())) != CF_OK ||
      (st = cf_report_write_record(rep, (base + ".json").c_str())) != CF_OK) {
    cf_report_destroy(rep);
    return report_error(st, "output");
  }
  std::printf("wrote %s.csv and %s.json\n", base.c_str(), base.c_str());

  int code = 0;
  if (assert_tol >= 0.0) {
    st = cf_report_assert_rates(rep, assert_tol);
    if (st == CF_OK) {
      std::printf("rate assertion passed (tol %.3g)\n", assert_tol);
    } else {
      std::printf("rate assertion FAILED: %s\n", cf_last_error());
      code = st;
    }
  }
  cf_report_destroy(rep);
  return code;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Finite element differential forms on cubical meshes"};
  app.require_subcommand(1);
  app.set_version_flag("--version", cf_version());

  int max_n = 3, max_r = 3;
  bool corrupt = false;
  auto* check = app.add_subcommand("check", "Run the exact verification suites");
  check->add_option("--max-n", max_n, "Largest dimension n")->check(CLI::Range(1, 4));
  check->add_option("--max-r", max_r, "Largest degree r")->check(CLI::Range(0, 4));
  check->add_flag("--corrupt-basis", corrupt)->group("");

  std::string kind, r_range = "1", basis;
  int k = 0, n = 2;
  auto* rates = app.add_subcommand("rates", "Predicted L2 rates on affine and multilinear meshes");
  rates->add_option("kind", kind, "P | Qminus | serendipity | SLambda1_2d | custom")->required();
  rates->add_option("--r", r_range, "Degree or range, e.g. 1..6");
  rates->add_option("--k", k, "Form degree");
  rates->add_option("--n", n, "Dimension");
  rates->add_option("--basis", basis, "Custom basis, forms separated by ';'");

  std::string config, out_dir;
  int threads = 1, quad = -1;
  double assert_tol = -1.0;
  auto* converge = app.add_subcommand("converge", "Run an h-refinement convergence study");
  converge->add_option("config", config, "Experiment config file")->required();
  converge->add_option("--threads", threads, "Worker threads")->check(CLI::PositiveNumber);
  converge->add_option("--assert-rates", assert_tol, "Exit 1 unless last rate >= predicted - tol")
      ->check(CLI::NonNegativeNumber);
  converge->add_option("--quad", quad, "Gauss points per axis (overrides config)")
      ->check(CLI::Range(1, 20));
  converge->add_option("--out", out_dir, "Output directory for CSV and JSON");

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForVersion& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return CF_INVALID_ARGUMENT;
  }

  if (*check) return cmd_check(max_n, max_r, corrupt);
  if (*rates) return cmd_rates(kind, r_range, k, n, basis);
  return cmd_converge(config, threads, assert_tol, quad, out_dir);
}
