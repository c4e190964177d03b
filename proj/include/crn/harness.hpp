#pragma once

#include <cstdint>
#include <iosfwd>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include <json.hpp>

#include "crn/cgcast.hpp"
#include "crn/count.hpp"
#include "crn/games.hpp"
#include "crn/network.hpp"
#include "crn/seek.hpp"

namespace crn {

enum class Scenario { kCount, kCseek, kCkseek, kCgcast, kGameBipartite, kGameComplete, kGameReduction };

std::string to_string(Scenario s);
/// Throws ConfigurationFault for unknown names.
Scenario scenario_from_string(const std::string& name);
bool is_game(Scenario s);

/// Where a trial's instance comes from. Generators: two_node, star,
/// star_profile, tree, random, file. Unused fields are ignored.
struct InstanceSpec {
  std::string generator = "random";
  int n = 16;
  int pool = 0;  // 0: generator default
  int c = 4;
  int k = 1;
  int k_max = 0;  // 0: same as k (star) or c (random)
  int delta = 4;
  int depth = 2;
  double density = 0.3;
  std::vector<int> overlaps;
  std::string path;
  /// Fixed instance seed; when absent every trial draws its own instance.
  std::optional<std::uint64_t> seed;
};

struct ProtocolSpec {
  double a1 = 4.0;
  double a2 = 4.0;
  double log_base = 2.0;
  double count_delta = 0.5;
  int count_round_mult = 8;
  int k_hat = 0;
  std::optional<int> delta_khat;
  double phase_mult = 4.0;
  std::optional<int> rounds_per_step;
  NodeId source = 0;
  /// Stop seek runs once the ground truth says discovery is complete.
  bool early_stop = true;
};

struct CountSpec {
  int m = 1;
  int n = 64;
  int delta = 32;
};

struct GameSpec {
  int c = 32;
  int k = 1;
  std::string player = "uniform";  // uniform, fresh-pair, reduction
  std::int64_t max_rounds = 1'000'000;
};

struct ExperimentConfig {
  Scenario scenario = Scenario::kCseek;
  InstanceSpec instance;
  ProtocolSpec protocol;
  CountSpec count;
  GameSpec game;
  int trials = 10;
  std::uint64_t master_seed = 1;
  /// Trials whose slot budget exceeds the cap count as failures; count and
  /// seek trials over the cap are not simulated at all.
  std::optional<std::int64_t> slot_budget_cap;
  std::string output;
  std::string format = "csv";
  int threads = 1;
  /// Threshold checked by the CLI's --assert.
  std::optional<double> min_success_rate;

  /// Throws ConfigurationFault listing the first problem found.
  void validate() const;
  SeekConfig seek_config() const;
  CgcastConfig cgcast_config() const;
  CountConfig count_config() const;
};

/// Parses and validates; unknown keys are a ConfigurationFault.
ExperimentConfig config_from_json(const nlohmann::json& j);
/// Fully resolved config, defaults included.
nlohmann::json config_to_json(const ExperimentConfig& cfg);
ExperimentConfig load_config(const std::string& path);

/// One protocol trial. `slots` is the slot at which the scenario's success
/// condition was first met, absent on failure. `metrics` holds the
/// scenario's extra columns (see trial_metric_columns).
struct TrialRecord {
  std::int64_t trial = 0;
  std::uint64_t seed = 0;
  int n = 0;
  int c = 0;
  int k = 0;
  int k_max = 0;
  int delta = 0;
  int diam = 0;
  bool success = false;
  std::optional<std::int64_t> slots;
  std::int64_t budget = 0;
  std::map<std::string, std::int64_t> metrics;

  bool operator==(const TrialRecord&) const = default;
};

struct GameRecord {
  std::string game;
  int c = 0;
  int k = 0;
  std::string player;
  std::int64_t trial = 0;
  std::int64_t rounds = 0;
  bool won = false;

  bool operator==(const GameRecord&) const = default;
};

/// Failures count as +infinity in the order statistics; a quantile that
/// lands on a failure is absent.
struct SummaryStats {
  std::int64_t trials = 0;
  std::int64_t successes = 0;
  double success_rate = 0.0;
  std::optional<std::int64_t> median;
  std::optional<std::int64_t> p10;
  std::optional<std::int64_t> p90;

  nlohmann::json to_json() const;
};

SummaryStats summarize(const std::vector<TrialRecord>& records);
SummaryStats summarize(const std::vector<GameRecord>& records);

struct RunOutput {
  ExperimentConfig config;
  std::vector<TrialRecord> trials;
  std::vector<GameRecord> games;
  SummaryStats summary;
};

/// Extra CSV columns of a protocol scenario, in order.
std::vector<std::string> trial_metric_columns(Scenario s);

/// Runs every trial; trial i uses seed trial_seed(master_seed, i). Results
/// are ordered by trial index whatever the thread count.
RunOutput run(const ExperimentConfig& cfg);

struct SweepPoint {
  double value = 0.0;
  bool feasible = true;
  std::string note;
  SummaryStats summary;
};

struct SweepOutput {
  std::string axis;
  std::vector<SweepPoint> points;
  /// Least-squares slope of log(median) on log(value); absent when fewer
  /// than three points have a finite median.
  std::optional<double> slope;
  std::optional<double> intercept;
  /// Root mean square residual of the fit.
  std::optional<double> residual;
  std::string fit_note;

  nlohmann::json to_json() const;
};

/// Axis is one of n, c, k, k_hat, delta, diam. Values that yield no valid
/// instance are skipped and flagged.
SweepOutput sweep(const ExperimentConfig& cfg, const std::string& axis,
                  const std::vector<double>& values);

struct LogLogFit {
  std::optional<double> slope;
  std::optional<double> intercept;
  std::optional<double> residual;
};
LogLogFit fit_loglog(const std::vector<double>& x, const std::vector<double>& y);

/// CSV: a "# config: <json>" line, a header, one row per record.
void write_csv(std::ostream& os, const RunOutput& out);
/// JSON: {config, records, summary}.
nlohmann::json to_json(const RunOutput& out);
/// Writes csv or json to `path`. Throws Error naming the path on IO failure.
void emit(const RunOutput& out, const std::string& format, const std::string& path);

struct ParsedTrials {
  nlohmann::json config;
  std::vector<TrialRecord> records;
};
struct ParsedGames {
  nlohmann::json config;
  std::vector<GameRecord> records;
};
/// Inverse of write_csv. Throws ParseFault with the line number.
ParsedTrials parse_trial_csv(std::istream& is);
ParsedGames parse_game_csv(std::istream& is);

}  // namespace crn
