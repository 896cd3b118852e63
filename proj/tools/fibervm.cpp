#include <CLI11.hpp>

#include <algorithm>
#include <filesystem>
#include <iostream>
#include <map>

#include "fibervm/machine.hpp"
#include "fibervm/report.hpp"

#ifndef FIBERVM_CORPUS_DIR
#define FIBERVM_CORPUS_DIR "corpus"
#endif

namespace fs = std::filesystem;
using namespace fibervm;

namespace {

enum ExitCode { kDone = 0, kFatal = 1, kUsage = 2, kBudget = 3 };

struct CliOptions {
  std::string input;
  std::string mode_name = "oneshot";
  bool opt_exn = true;
  bool trace = false;
  bool metrics = false;
  bool metrics_json = false;
  bool backtrace_on_error = true;
  std::uint64_t max_steps = 10'000'000;
  std::int64_t stack_init = 16;
  std::int64_t red_zone = 16;
  std::size_t cache_cap = 64;
  std::int64_t io_batch = 1;
};

const std::map<std::string, bool> kOnOff = {{"on", true}, {"off", false}};

void add_run_flags(CLI::App* cmd, CliOptions& o) {
  cmd->add_option("file", o.input, "Program file")->required()->check(CLI::ExistingFile);
  cmd->add_option("--mode", o.mode_name, "Continuation mode")
      ->transform(CLI::detail::to_lower)
      ->check(CLI::IsMember({"oneshot", "multishot"}));
  cmd->add_option("--opt-exn", o.opt_exn, "Exception-handler fast path (on|off)")
      ->transform(CLI::CheckedTransformer(kOnOff, CLI::ignore_case));
  cmd->add_flag("--trace", o.trace, "Print one line per reduction step");
  cmd->add_flag("--metrics", o.metrics, "Print key=value metrics");
  cmd->add_flag("--metrics-json", o.metrics_json, "Print metrics as one JSON object");
  cmd->add_option("--backtrace-on-error", o.backtrace_on_error, "Print a backtrace on fatal errors (on|off)")
      ->transform(CLI::CheckedTransformer(kOnOff, CLI::ignore_case));
  cmd->add_option("--max-steps", o.max_steps, "Step budget")->check(CLI::PositiveNumber);
  cmd->add_option("--stack-init", o.stack_init, "Initial fiber stack words")->check(CLI::PositiveNumber);
  cmd->add_option("--red-zone", o.red_zone, "Red zone words")->check(CLI::NonNegativeNumber);
  cmd->add_option("--cache-cap", o.cache_cap, "Stack cache capacity");
  cmd->add_option("--io-batch", o.io_batch, "Reads completed per do_reads call (<= 0: all)");
}

int run_file(const CliOptions& o) {
  SourceProgram prog;
  try {
    prog = load_program(o.input);
  } catch (const ParseError& e) {
    std::cerr << o.input << ':' << e.what() << '\n';
    return kUsage;
  } catch (const std::exception& e) {
    std::cerr << e.what() << '\n';
    return kUsage;
  }

  RunOptions ro;
  ro.runtime.mode = o.mode_name == "multishot" ? runtime::Mode::MultiShot : runtime::Mode::OneShot;
  ro.runtime.initial_words = o.stack_init;
  ro.runtime.red_zone_words = o.red_zone;
  ro.runtime.cache_capacity = o.cache_cap;
  ro.opt_exn = o.opt_exn;
  ro.trace = o.trace;
  ro.max_steps = o.max_steps;
  ro.io_batch = o.io_batch;

  RunResult r = run(prog, ro);

  std::cout << format_report(r, ReportOptions{o.backtrace_on_error, o.metrics, o.metrics_json});

  switch (r.status) {
    case RunResult::Status::Done: return kDone;
    case RunResult::Status::Fatal: return kFatal;
    case RunResult::Status::StepBudgetExceeded: return kBudget;
  }
  return kFatal;
}

int list_examples(const std::string& dir) {
  std::vector<fs::path> files;
  std::error_code ec;
  for (fs::recursive_directory_iterator it(dir, ec), end; !ec && it != end; it.increment(ec))
    if (it->is_regular_file() && it->path().extension() == ".fib") files.push_back(it->path());
  if (ec) {
    std::cerr << dir << ": " << ec.message() << '\n';
    return kUsage;
  }
  std::sort(files.begin(), files.end());
  for (const auto& f : files) std::cout << fs::relative(f, dir).string() << '\n';
  return kDone;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Effect-handler abstract machine"};
  app.require_subcommand(1);

  CliOptions run_opts;
  auto* run_cmd = app.add_subcommand("run", "Run a program");
  add_run_flags(run_cmd, run_opts);

  CliOptions trace_opts;
  auto* trace_cmd = app.add_subcommand("trace", "Run a program with --trace");
  add_run_flags(trace_cmd, trace_opts);

  std::string corpus = FIBERVM_CORPUS_DIR;
  auto* ex_cmd = app.add_subcommand("examples", "List the example corpus");
  ex_cmd->add_option("--dir", corpus, "Corpus directory");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int rc = app.exit(e);
    return rc == 0 ? 0 : kUsage;
  }

  try {
    if (*run_cmd) return run_file(run_opts);
    if (*trace_cmd) {
      trace_opts.trace = true;
      return run_file(trace_opts);
    }
    return list_examples(corpus);
  } catch (const std::invalid_argument& e) {
    std::cerr << e.what() << '\n';
    return kUsage;
  }
}
