#pragma once

#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "raise/builder.hpp"
#include "raise/dot.hpp"
#include "raise/exchange.hpp"
#include "raise/fixture.hpp"
#include "raise/hara_io.hpp"
#include "raise/pattern_dsl.hpp"
#include "raise/report.hpp"

namespace raise::cli {

/// Process exit codes: 0 success, 1 validation/coverage failure, 2 usage or
/// I/O error. Diagnostics go to stderr, artifacts to files or stdout.
enum ExitCode : int { kOk = 0, kFailed = 1, kUsage = 2 };

namespace cli_detail {

inline void print_diags(const std::vector<Diagnostic>& diags) {
  for (const auto& d : diags) std::cerr << format_diagnostic(d) << "\n";
}

inline std::optional<std::string> read_file(const std::filesystem::path& p) {
  std::ifstream in(p, std::ios::binary);
  if (!in) return std::nullopt;
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

inline bool write_file(const std::filesystem::path& p, std::string_view content) {
  std::ofstream out(p, std::ios::binary);
  if (!out) return false;
  out << content;
  return out.good();
}

struct BuildArgs {
  std::string hara_dir;
  std::string config_path;
  std::string patterns_dir;
  std::string threshold;
  std::string out_dir = ".";
  std::string format = "all";
};

inline int apply_threshold_flag(const std::string& flag, build::BuildConfig& cfg) {
  if (flag.empty()) return kOk;
  auto r = hara::rating_from(flag);
  if (!r) {
    std::cerr << "error: --threshold must be one of QM, A, B, C, D\n";
    return kUsage;
  }
  cfg.priority_threshold = *r;
  return kOk;
}

/// Built-ins plus any *.pattern files from `dir` (which override built-ins
/// of the same name). Returns nullopt after printing diagnostics.
inline std::optional<dsl::PatternLibrary> load_patterns(const std::string& dir, int& rc) {
  dsl::PatternLibrary lib = dsl::builtin_library();
  if (dir.empty()) return lib;
  if (!std::filesystem::is_directory(dir)) {
    std::cerr << "error: --patterns " << dir << " is not a directory\n";
    rc = kUsage;
    return std::nullopt;
  }
  std::vector<std::filesystem::path> files;
  for (const auto& entry : std::filesystem::directory_iterator(dir))
    if (entry.is_regular_file() && entry.path().extension() == ".pattern")
      files.push_back(entry.path());
  std::sort(files.begin(), files.end());
  for (const auto& path : files) {
    auto text = read_file(path);
    if (!text) {
      std::cerr << "error: cannot read " << path << "\n";
      rc = kUsage;
      return std::nullopt;
    }
    auto parsed = dsl::parse_pattern(*text);
    if (!parsed) {
      for (const auto& d : parsed.diagnostics())
        std::cerr << path.string() << ":" << d.line << ":" << d.column << ": " << d.message
                  << "\n";
      rc = kFailed;
      return std::nullopt;
    }
    dsl::Pattern p = std::move(parsed).value();
    auto findings = dsl::validate_pattern(p);
    print_diags(findings);
    if (has_errors(findings)) {
      rc = kFailed;
      return std::nullopt;
    }
    lib.patterns[p.name] = std::move(p);
  }
  return lib;
}

inline std::optional<hara::HaraModel> load_hara(const std::string& dir, int& rc) {
  if (!std::filesystem::is_directory(dir)) {
    std::cerr << "error: " << dir << " is not a directory\n";
    rc = kUsage;
    return std::nullopt;
  }
  std::vector<Diagnostic> warnings;
  auto parsed = hara::parse_hara(dir, &warnings);
  print_diags(warnings);
  if (!parsed) {
    print_diags(parsed.diagnostics());
    rc = kFailed;
    return std::nullopt;
  }
  return std::move(parsed).value();
}

inline std::optional<build::BuildConfig> load_config_file(const std::string& path, int& rc) {
  build::BuildConfig cfg;
  if (path.empty()) return cfg;
  auto text = read_file(path);
  if (!text) {
    std::cerr << "error: cannot read config " << path << "\n";
    rc = kUsage;
    return std::nullopt;
  }
  auto parsed = build::load_config(*text);
  if (!parsed) {
    print_diags(parsed.diagnostics());
    rc = kUsage;
    return std::nullopt;
  }
  return std::move(parsed).value();
}

inline int do_init(const std::string& target) {
  auto result = fixture::scaffold(target);
  if (!result) {
    std::cerr << "error: " << result.error().to_string() << "\n";
    return kUsage;
  }
  std::cerr << "initialized " << target << "\n";
  return kOk;
}

inline int do_hara_check(const std::string& dir, const std::string& threshold) {
  int rc = kOk;
  build::BuildConfig cfg;
  if (int t = apply_threshold_flag(threshold, cfg); t != kOk) return t;
  auto model = load_hara(dir, rc);
  if (!model) return rc;
  auto findings = hara::validate_hara(*model, cfg.priority_threshold);
  print_diags(findings);
  return has_errors(findings) ? kFailed : kOk;
}

inline int do_pattern_lint(const std::vector<std::string>& paths, const std::string& dir) {
  int rc = kOk;
  if (!dir.empty()) {
    if (!load_patterns(dir, rc)) return rc;
  }
  for (const auto& path : paths) {
    auto text = read_file(path);
    if (!text) {
      std::cerr << "error: cannot read " << path << "\n";
      return kUsage;
    }
    auto parsed = dsl::parse_pattern(*text);
    if (!parsed) {
      for (const auto& d : parsed.diagnostics())
        std::cerr << path << ":" << d.line << ":" << d.column << ": " << d.message << "\n";
      rc = kFailed;
      continue;
    }
    auto findings = dsl::validate_pattern(parsed.value());
    print_diags(findings);
    if (has_errors(findings)) rc = kFailed;
  }
  if (paths.empty() && dir.empty()) {
    std::cerr << "error: nothing to lint; pass pattern files or --patterns <dir>\n";
    return kUsage;
  }
  return rc;
}

inline int do_build(const BuildArgs& args) {
  int rc = kOk;
  auto cfg = load_config_file(args.config_path, rc);
  if (!cfg) return rc;
  if (int t = apply_threshold_flag(args.threshold, *cfg); t != kOk) return t;
  auto model = load_hara(args.hara_dir, rc);
  if (!model) return rc;

  auto hara_findings = hara::validate_hara(*model, cfg->priority_threshold);
  print_diags(hara_findings);
  if (has_errors(hara_findings)) return kFailed;

  auto lib = load_patterns(args.patterns_dir, rc);
  if (!lib) return rc;

  auto built = build::build_safety_case(*cfg, *model, *lib);
  if (!built) {
    std::cerr << "error: " << built.error().to_string() << "\n";
    return kFailed;
  }
  const auto& output = built.value();

  const std::string system =
      cfg->system_name.empty() ? model->system_name : cfg->system_name;
  std::filesystem::path out_dir = args.out_dir;
  std::error_code ec;
  std::filesystem::create_directories(out_dir, ec);
  if (!std::filesystem::is_directory(out_dir)) {
    std::cerr << "error: cannot create output directory " << out_dir << "\n";
    return kUsage;
  }

  const bool all = args.format == "all";
  if (all || args.format == "json") {
    auto text = emit::emit_exchange(output.safety_case, system);
    if (!text) {
      std::cerr << "error: " << text.error().to_string() << "\n";
      return kFailed;
    }
    if (!write_file(out_dir / "case.gsn.json", text.value())) {
      std::cerr << "error: cannot write " << (out_dir / "case.gsn.json") << "\n";
      return kUsage;
    }
  }
  if (all || args.format == "dot") {
    if (!write_file(out_dir / "case.dot", emit::emit_dot(output.safety_case))) {
      std::cerr << "error: cannot write " << (out_dir / "case.dot") << "\n";
      return kUsage;
    }
  }
  if (all || args.format == "md") {
    if (!write_file(out_dir / "report.md",
                    emit::emit_report(output.safety_case, *model, output.coverage))) {
      std::cerr << "error: cannot write " << (out_dir / "report.md") << "\n";
      return kUsage;
    }
  }

  auto case_findings = gsn::validate_graph(output.safety_case);
  print_diags(case_findings);
  std::cerr << "coverage: " << (output.coverage.pass() ? "PASS" : "FAIL") << "\n";
  if (has_errors(case_findings) || !output.coverage.pass()) return kFailed;
  return kOk;
}

inline int do_coverage(const std::string& case_path, const std::string& hara_dir,
                       const std::string& config_path, const std::string& threshold) {
  int rc = kOk;
  auto cfg = load_config_file(config_path, rc);
  if (!cfg) return rc;
  if (int t = apply_threshold_flag(threshold, *cfg); t != kOk) return t;
  auto model = load_hara(hara_dir, rc);
  if (!model) return rc;
  auto text = read_file(case_path);
  if (!text) {
    std::cerr << "error: cannot read " << case_path << "\n";
    return kUsage;
  }
  auto loaded = emit::load_exchange(*text);
  if (!loaded) {
    print_diags(loaded.diagnostics());
    return kFailed;
  }
  auto coverage = build::coverage_check(loaded.value(), *model, *cfg);
  std::cout << emit::emit_report(loaded.value(), *model, coverage);
  return coverage.pass() ? kOk : kFailed;
}

inline int do_render(const std::string& case_path, const std::string& out_dir) {
  auto text = read_file(case_path);
  if (!text) {
    std::cerr << "error: cannot read " << case_path << "\n";
    return kUsage;
  }
  auto loaded = emit::load_exchange(*text);
  if (!loaded) {
    print_diags(loaded.diagnostics());
    return kFailed;
  }
  std::string dot = emit::emit_dot(loaded.value());
  if (out_dir.empty()) {
    std::cout << dot;
    return kOk;
  }
  std::error_code ec;
  std::filesystem::create_directories(out_dir, ec);
  if (!write_file(std::filesystem::path(out_dir) / "case.dot", dot)) {
    std::cerr << "error: cannot write " << (std::filesystem::path(out_dir) / "case.dot") << "\n";
    return kUsage;
  }
  return kOk;
}

inline int do_validate(const std::string& case_path) {
  auto text = read_file(case_path);
  if (!text) {
    std::cerr << "error: cannot read " << case_path << "\n";
    return kUsage;
  }
  auto loaded = emit::load_exchange_document(*text);
  if (!loaded) {
    print_diags(loaded.diagnostics());
    return kFailed;
  }
  auto findings = gsn::validate_graph(loaded.value().graph);
  print_diags(findings);
  return has_errors(findings) ? kFailed : kOk;
}

}  // namespace cli_detail

/// Dispatches one invocation; never throws. `args` excludes the program name.
inline int run(const std::vector<std::string>& args) {
  using namespace cli_detail;
  try {
    CLI::App app{"raise-forge: build and check GSN safety cases for "
                 "instruction-based driving systems from an extended HARA"};
    app.require_subcommand(1);

    auto* init_cmd = app.add_subcommand("init", "Write the SimLingo starter corpus");
    std::string init_target;
    init_cmd->add_option("target", init_target, "Directory to create")->required();

    auto* hara_cmd = app.add_subcommand("hara", "HARA model commands");
    hara_cmd->require_subcommand(1);
    auto* hara_check = hara_cmd->add_subcommand("check", "Parse and validate a HARA directory");
    std::string hara_check_dir, hara_check_threshold;
    hara_check->add_option("dir", hara_check_dir, "HARA directory")->required();
    hara_check->add_option("--threshold", hara_check_threshold,
                           "Priority threshold (QM, A, B, C, D); default C");

    auto* pattern_cmd = app.add_subcommand("pattern", "Pattern commands");
    pattern_cmd->require_subcommand(1);
    auto* pattern_lint = pattern_cmd->add_subcommand("lint", "Parse and validate pattern files");
    std::vector<std::string> lint_paths;
    std::string lint_dir;
    pattern_lint->add_option("files", lint_paths, "Pattern files");
    pattern_lint->add_option("--patterns", lint_dir, "Directory of .pattern files");

    auto* build_cmd = app.add_subcommand("build", "Build the safety case from a HARA directory");
    BuildArgs build_args;
    build_cmd->add_option("--hara", build_args.hara_dir, "HARA directory")->required();
    build_cmd->add_option("--config", build_args.config_path, "Build config (JSON)");
    build_cmd->add_option("--patterns", build_args.patterns_dir,
                          "Directory of .pattern files (defaults to built-ins)");
    build_cmd->add_option("--threshold", build_args.threshold,
                          "Priority threshold override (QM, A, B, C, D)");
    build_cmd->add_option("-o,--out", build_args.out_dir, "Output directory (default .)");
    build_cmd->add_option("--format", build_args.format, "json, dot, md or all (default all)")
        ->check(CLI::IsMember({"json", "dot", "md", "all"}));

    auto* coverage_cmd =
        app.add_subcommand("coverage", "Re-check an existing case against a HARA directory");
    std::string coverage_case, coverage_hara, coverage_config, coverage_threshold;
    coverage_cmd->add_option("case", coverage_case, "case.gsn.json file")->required();
    coverage_cmd->add_option("--hara", coverage_hara, "HARA directory")->required();
    coverage_cmd->add_option("--config", coverage_config, "Build config (JSON)");
    coverage_cmd->add_option("--threshold", coverage_threshold, "Priority threshold override");

    auto* render_cmd = app.add_subcommand("render", "Render a case to DOT");
    std::string render_case, render_out;
    render_cmd->add_option("case", render_case, "case.gsn.json file")->required();
    render_cmd->add_option("-o,--out", render_out, "Output directory (stdout when omitted)");

    auto* validate_cmd = app.add_subcommand("validate", "Check exchange well-formedness");
    std::string validate_case;
    validate_cmd->add_option("case", validate_case, "case.gsn.json file")->required();

    std::vector<const char*> argv;
    argv.push_back("raise-forge");
    for (const auto& a : args) argv.push_back(a.c_str());
    try {
      app.parse(static_cast<int>(argv.size()), argv.data());
    } catch (const CLI::CallForHelp& e) {
      return app.exit(e);
    } catch (const CLI::CallForAllHelp& e) {
      return app.exit(e);
    } catch (const CLI::ParseError& e) {
      app.exit(e);
      return kUsage;
    }

    if (app.got_subcommand(init_cmd)) return do_init(init_target);
    if (app.got_subcommand(hara_cmd) && hara_cmd->got_subcommand(hara_check))
      return do_hara_check(hara_check_dir, hara_check_threshold);
    if (app.got_subcommand(pattern_cmd) && pattern_cmd->got_subcommand(pattern_lint))
      return do_pattern_lint(lint_paths, lint_dir);
    if (app.got_subcommand(build_cmd)) return do_build(build_args);
    if (app.got_subcommand(coverage_cmd))
      return do_coverage(coverage_case, coverage_hara, coverage_config, coverage_threshold);
    if (app.got_subcommand(render_cmd)) return do_render(render_case, render_out);
    if (app.got_subcommand(validate_cmd)) return do_validate(validate_case);
    return kUsage;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kUsage;
  } catch (...) {
    std::cerr << "error: unexpected failure\n";
    return kUsage;
  }
}

}  // namespace raise::cli
