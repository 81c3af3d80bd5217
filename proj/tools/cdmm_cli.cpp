// Command-line driver over the C API.
#include <CLI11.hpp>

#include <cstdio>
#include <fstream>
#include <iomanip>
#include <iostream>
#include <sstream>
#include <string>
#include <vector>

#include "cdmm/cdmm.h"

namespace {

constexpr int kExitOk = 0;
constexpr int kExitFailed = 1;
constexpr int kExitConfig = 2;

struct CommonOptions {
  std::string config;
  std::string out;
  unsigned long long seed = 1;
  std::string format = "csv";
};

int exit_code_for(int status) {
  switch (status) {
    case CDMM_OK: return kExitOk;
    case CDMM_CONFIG_PARSE_ERROR:
    case CDMM_BAD_PARAMS:
    case CDMM_INVALID_ARGUMENT:
    case CDMM_IO_ERROR:
    case CDMM_FIELD_MISMATCH:
    case CDMM_TOO_LARGE:
      return kExitConfig;
    default: return kExitFailed;
  }
}

int report_error(int status) {
  std::cerr << "error: " << cdmm_last_error() << '\n';
  return exit_code_for(status);
}

bool read_text(const std::string& path, std::string& text) {
  std::ifstream in(path);
  if (!in) {
    std::cerr << "error: cannot read " << path << '\n';
    return false;
  }
  std::ostringstream buf;
  buf << in.rdbuf();
  text = buf.str();
  return true;
}

// Owns a string returned by the C API.
struct ApiString {
  char* p = nullptr;
  ~ApiString() { cdmm_string_free(p); }
  std::string str() const { return p ? p : ""; }
};

std::vector<std::vector<std::string>> split_csv(const std::string& csv) {
  std::vector<std::vector<std::string>> rows;
  std::istringstream lines(csv);
  std::string line;
  while (std::getline(lines, line)) {
    std::vector<std::string> cells;
    std::istringstream cols(line);
    std::string cell;
    while (std::getline(cols, cell, ',')) cells.push_back(cell);
    rows.push_back(std::move(cells));
  }
  return rows;
}

std::string as_table(const std::string& csv) {
  const auto rows = split_csv(csv);
  std::vector<std::size_t> width;
  for (const auto& r : rows)
    for (std::size_t i = 0; i < r.size(); ++i) {
      if (width.size() <= i) width.push_back(0);
      width[i] = std::max(width[i], r[i].size());
    }
  std::ostringstream out;
  for (const auto& r : rows) {
    for (std::size_t i = 0; i < r.size(); ++i) out << (i ? "  " : "") << std::left << std::setw(static_cast<int>(width[i])) << r[i];
    out << '\n';
  }
  return out.str();
}

int emit(const CommonOptions& opt, const std::string& csv) {
  const std::string text = opt.format == "table" ? as_table(csv) : csv;
  if (opt.out.empty()) {
    std::cout << text;
    return kExitOk;
  }
  std::ofstream out(opt.out, std::ios::binary);
  if (!out || !(out << text)) {
    std::cerr << "error: cannot write " << opt.out << '\n';
    return kExitConfig;
  }
  return kExitOk;
}

int cmd_thresholds(const CommonOptions& opt, const std::string& preset) {
  std::string grid;
  if (!opt.config.empty() && !read_text(opt.config, grid)) return kExitConfig;
  if (!preset.empty()) grid += "\npreset=" + preset + "\n";
  ApiString table;
  int all_match = 0;
  const int status = cdmm_thresholds_table(grid.c_str(), opt.format.c_str(), opt.seed, &table.p, &all_match);
  if (status != CDMM_OK) return report_error(status);
  // The library already renders the table format.
  CommonOptions raw = opt;
  raw.format = "csv";
  if (const int rc = emit(raw, table.str()); rc != kExitOk) return rc;
  if (!all_match) {
    std::cerr << "measured thresholds differ from the closed forms\n";
    return kExitFailed;
  }
  return kExitOk;
}

std::vector<size_t> parse_ids(const std::string& text) {
  std::vector<size_t> ids;
  std::istringstream in(text);
  std::string item;
  while (std::getline(in, item, ',')) {
    if (item.empty()) continue;
    ids.push_back(static_cast<size_t>(std::stoull(item)));
  }
  return ids;
}

struct SimulateOptions {
  std::string a_path, b_path, product_out;
  std::size_t rows = 4, inner = 4, cols = 4, workers = 0;
  std::string stragglers, byzantine;
  bool verify = false, shuffle = false;
};

int cmd_simulate(const CommonOptions& opt, const SimulateOptions& so) {
  std::string text;
  if (opt.config.empty()) {
    std::cerr << "error: simulate needs --config with scheme parameters\n";
    return kExitConfig;
  }
  if (!read_text(opt.config, text)) return kExitConfig;
  cdmm_scheme* scheme = nullptr;
  int status = cdmm_scheme_from_config(text.c_str(), &scheme);
  if (status != CDMM_OK) return report_error(status);
  cdmm_field* field = nullptr;
  cdmm_matrix *a = nullptr, *b = nullptr, *direct = nullptr, *decoded = nullptr;
  cdmm_report* report = nullptr;
  std::vector<size_t> stragglers, byzantine;
  int rc = kExitOk;
  auto run = [&]() -> int {
    try {
      stragglers = parse_ids(so.stragglers);
      byzantine = parse_ids(so.byzantine);
    } catch (const std::exception&) {
      std::cerr << "error: worker ids must be comma-separated integers\n";
      return kExitConfig;
    }
    if ((status = cdmm_scheme_field(scheme, &field)) != CDMM_OK) return report_error(status);
    const uint64_t p = cdmm_field_modulus(field);
    if (!so.a_path.empty() || !so.b_path.empty()) {
      uint64_t pa = 0, pb = 0;
      if ((status = cdmm_matrix_read_file(so.a_path.c_str(), &a, &pa)) != CDMM_OK) return report_error(status);
      if ((status = cdmm_matrix_read_file(so.b_path.c_str(), &b, &pb)) != CDMM_OK) return report_error(status);
      if (pa != p || pb != p) {
        std::cerr << "error: matrix files must use modulus " << p << '\n';
        return kExitConfig;
      }
    } else {
      if ((status = cdmm_matrix_random(field, so.rows, so.inner, opt.seed * 2 + 1, &a)) != CDMM_OK) return report_error(status);
      if ((status = cdmm_matrix_random(field, so.inner, so.cols, opt.seed * 2 + 2, &b)) != CDMM_OK) return report_error(status);
    }
    cdmm_sim_options sim{};
    sim.N = so.workers;
    sim.stragglers = stragglers.data();
    sim.straggler_count = stragglers.size();
    sim.byzantine = byzantine.data();
    sim.byzantine_count = byzantine.size();
    sim.shuffle_arrivals = so.shuffle ? 1 : 0;
    sim.verify = so.verify ? 1 : 0;
    sim.seed = opt.seed;
    if ((status = cdmm_run_job(scheme, a, b, &sim, &report)) != CDMM_OK) return report_error(status);
    ApiString csv;
    if ((status = cdmm_report_csv(report, 0, &csv.p)) != CDMM_OK) return report_error(status);
    std::string body = csv.str();
    int matches = 0;
    if (cdmm_report_status(report) == CDMM_OK) {
      if ((status = cdmm_matrix_multiply(field, a, b, &direct)) != CDMM_OK) return report_error(status);
      if ((status = cdmm_report_decoded(report, &decoded)) != CDMM_OK) return report_error(status);
      cdmm_matrix_equal(direct, decoded, &matches);
      if (!so.product_out.empty() &&
          (status = cdmm_matrix_write_file(so.product_out.c_str(), decoded, p)) != CDMM_OK)
        return report_error(status);
    }
    body += std::string("matches_direct,") + (matches ? "true" : "false") + "\n";
    if (const int e = emit(opt, body); e != kExitOk) return e;
    return matches ? kExitOk : kExitFailed;
  };
  rc = run();
  cdmm_report_destroy(report);
  cdmm_matrix_destroy(decoded);
  cdmm_matrix_destroy(direct);
  cdmm_matrix_destroy(b);
  cdmm_matrix_destroy(a);
  cdmm_field_destroy(field);
  cdmm_scheme_destroy(scheme);
  return rc;
}

int cmd_verify_examples(const CommonOptions& opt) {
  ApiString csv;
  int passed = 0;
  const int status = cdmm_verify_examples(opt.seed, 0, &csv.p, &passed);
  if (status != CDMM_OK) return report_error(status);
  if (const int rc = emit(opt, csv.str()); rc != kExitOk) return rc;
  return passed ? kExitOk : kExitFailed;
}

int cmd_audit(const CommonOptions& opt, std::size_t workers, unsigned long long modulus) {
  std::string text;
  if (opt.config.empty()) {
    std::cerr << "error: audit-security needs --config with scheme parameters\n";
    return kExitConfig;
  }
  if (!read_text(opt.config, text)) return kExitConfig;
  cdmm_scheme* scheme = nullptr;
  int status = cdmm_scheme_from_config(text.c_str(), &scheme);
  if (status != CDMM_OK) return report_error(status);
  if (workers == 0) cdmm_scheme_worker_count(scheme, &workers);
  ApiString csv;
  int passed = 0;
  status = cdmm_security_audit(scheme, workers, modulus, opt.seed, &csv.p, &passed);
  cdmm_scheme_destroy(scheme);
  if (status != CDMM_OK) return report_error(status);
  if (const int rc = emit(opt, csv.str()); rc != kExitOk) return rc;
  return passed ? kExitOk : kExitFailed;
}

int cmd_glm(const CommonOptions& opt, const std::string& dataset, double tolerance) {
  std::string text;
  if (!opt.config.empty() && !read_text(opt.config, text)) return kExitConfig;
  // --seed applies unless the config pins one.
  if (text.find("seed") == std::string::npos) text += "\nseed=" + std::to_string(opt.seed) + "\n";
  ApiString trace;
  double diff = 0;
  size_t flagged = 0;
  const int status = cdmm_glm_demo(text.c_str(), dataset.empty() ? nullptr : dataset.c_str(), &trace.p, &diff, &flagged);
  if (status != CDMM_OK) return report_error(status);
  if (const int rc = emit(opt, trace.str()); rc != kExitOk) return rc;
  char summary[160];
  std::snprintf(summary, sizeof summary, "max weight deviation %.3e (tolerance %.3e), flagged responses %zu\n", diff,
                tolerance, flagged);
  std::cerr << summary;
  return diff <= tolerance ? kExitOk : kExitFailed;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Coded distributed matrix multiplication simulator"};
  app.require_subcommand(1);
  CommonOptions opt;
  auto add_common = [&](CLI::App* sub) {
    sub->add_option("--config", opt.config, "Config file (key=value lines)");
    sub->add_option("--out", opt.out, "Output path (default: stdout)");
    sub->add_option("--seed", opt.seed, "Random seed")->capture_default_str();
    sub->add_option("--format", opt.format, "Output format")->check(CLI::IsMember({"csv", "table"}))->capture_default_str();
  };

  std::string preset;
  auto* thresholds = app.add_subcommand("thresholds", "Closed-form versus measured recovery thresholds");
  add_common(thresholds);
  thresholds->add_option("--preset", preset, "Grid preset")->check(CLI::IsMember({"table1", "table2", "acceptance"}));

  SimulateOptions so;
  auto* simulate = app.add_subcommand("simulate", "Run one coded job with stragglers and Byzantine workers");
  add_common(simulate);
  simulate->add_option("--a", so.a_path, "Matrix file for A");
  simulate->add_option("--b", so.b_path, "Matrix file for B");
  simulate->add_option("--rows", so.rows, "Rows of random A")->capture_default_str();
  simulate->add_option("--inner", so.inner, "Columns of A / rows of B")->capture_default_str();
  simulate->add_option("--cols", so.cols, "Columns of random B")->capture_default_str();
  simulate->add_option("--workers", so.workers, "Worker count (default: scheme default)");
  simulate->add_option("--stragglers", so.stragglers, "Comma-separated straggler ids");
  simulate->add_option("--byzantine", so.byzantine, "Comma-separated Byzantine ids");
  simulate->add_flag("--verify", so.verify, "Freivalds-check every response");
  simulate->add_flag("--shuffle", so.shuffle, "Seeded random arrival order");
  simulate->add_option("--product-out", so.product_out, "Write the decoded product here");

  auto* verify = app.add_subcommand("verify-examples", "Run the four worked examples end to end");
  add_common(verify);

  std::size_t audit_workers = 0;
  unsigned long long audit_modulus = 31;
  auto* audit = app.add_subcommand("audit-security", "Exact share-distribution audit at small p");
  add_common(audit);
  audit->add_option("--workers", audit_workers, "Worker count (default: scheme default)");
  audit->add_option("--modulus", audit_modulus, "Prime modulus, at most 31")->capture_default_str();

  std::string dataset;
  double tolerance = 1.0 / 16384.0;
  auto* glm = app.add_subcommand("glm-demo", "Coded gradient descent against a float reference");
  add_common(glm);
  glm->add_option("--dataset", dataset, "CSV with features then label per row");
  glm->add_option("--tolerance", tolerance, "Allowed per-coordinate weight deviation")->capture_default_str();

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int rc = app.exit(e);
    return rc == 0 ? kExitOk : kExitConfig;
  }

  if (*thresholds) return cmd_thresholds(opt, preset);
  if (*simulate) return cmd_simulate(opt, so);
  if (*verify) return cmd_verify_examples(opt);
  if (*audit) return cmd_audit(opt, audit_workers, audit_modulus);
  return cmd_glm(opt, dataset, tolerance);
}
