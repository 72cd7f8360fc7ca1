#pragma once

// Command-line front end. Exit codes: 0 ok, 2 validation, 3 degenerate
// math, 4 every simulation replicate failed. Errors print one line
// "error: <category>: <reason>" on the error stream.

#include <cstddef>
#include <cstdint>
#include <iosfwd>
#include <optional>
#include <string>

namespace flr::cli {

enum ExitCode : int { kOk = 0, kValidation = 2, kDegenerate = 3, kAllFailed = 4 };

struct FitCommand {
  std::string curves_path;
  std::string responses_path;
  std::string filter = "truncation";
  std::optional<double> alpha;
  int power = 1;
  std::string variant = "A";
  std::string cn;  // real, or "auto" for the n^(1/3) rank heuristic
  bool center = true;
  std::string out_path;
};

struct PredictCommand {
  std::string fit_path;
  std::string x_path;
  std::optional<double> level;
  std::string normalizer = "s_hat";
};

struct SimulateCommand {
  std::string subcommand;
  std::string config_path;
  std::string out_path;
  std::optional<std::uint64_t> seed;
  std::size_t threads = 1;
};

int cmd_fit(const FitCommand& cmd, std::ostream& out, std::ostream& err);
int cmd_predict(const PredictCommand& cmd, std::ostream& out, std::ostream& err);
int cmd_simulate(const SimulateCommand& cmd, std::ostream& out, std::ostream& err);

// CSV companion path for a report: "x.json" -> "x.csv", otherwise "+.csv".
std::string csv_path_for(const std::string& out_path);

int run(int argc, const char* const* argv, std::ostream& out, std::ostream& err);

}  // namespace flr::cli
