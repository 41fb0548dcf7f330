#pragma once

// Orchestration: configuration-driven sweeps that assemble NPO problems,
// relax them, solve the SDPs on a bounded worker pool, and emit CSV rows.

#include <functional>
#include <optional>
#include <string>
#include <vector>

#include "data_ingest.hpp"
#include "sdp.hpp"

namespace dicert {

struct BoundResult {
  double value = 0.0;  // bits (or the Bell value for max_bell)
  SolveStatus status = SolveStatus::SolverError;
  std::vector<double> per_node;  // per-node contributions in bits
  int matrix_size = 0;
  double wall_time_s = 0.0;
  std::string message;
};

struct EntropySetup {
  Scenario scenario;
  std::vector<BellFunctional> constraints;
  GridCoefficients grid;
  int level = 2;
  std::vector<ExtraPattern> extras = {{{Party::Alice, Party::Bob, Party::Eve}}};
  NodeMode mode = NodeMode::PerNode;
  int key_input = 0;
  std::optional<int> key_input_bob;  // set => two-sided
  int workers = 2;
  SolveOptions solver;
  MomentOptions moment;
};

// Certified lower bound on the conditional von Neumann entropy. In per-node
// mode the r+1 subproblems are solved concurrently and their certified
// optima summed; any failed node poisons the whole result.
BoundResult entropy_bound(const EntropySetup& setup);

// H_min = -log2(p_guess) from the guessing-probability relaxation.
BoundResult min_entropy_bound(const Scenario& scenario,
                              const std::vector<BellFunctional>& constraints,
                              int key_input, std::optional<int> key_input_bob,
                              int level, const std::vector<ExtraPattern>& extras,
                              const SolveOptions& solver = {},
                              const MomentOptions& moment = {});

// Upper bound on the quantum value of a Bell functional.
BoundResult max_bell(const BellFunctional& functional, int level,
                     const std::vector<ExtraPattern>& extras = {},
                     const SolveOptions& solver = {},
                     const MomentOptions& moment = {});

enum class TaskKind { OneSidedVn, TwoSidedVn, MinEntropy, MaxBell };

struct RunConfig {
  Scenario scenario;
  TaskKind task = TaskKind::OneSidedVn;

  enum class Source { InequalitySweep, DistributionFile, HonestModel };
  Source source = Source::InequalitySweep;

  // inequality sweep
  std::string functional_name = "chsh";  // chsh | cglmp3 | i3322 | inline
  std::vector<double> functional_table;  // inline coefficients, flat
  double functional_offset = 0.0;
  double sweep_lo = 2.0, sweep_hi = 2.8284271247461903;
  int sweep_steps = 5;

  // distribution file
  std::string distribution_path;
  TableFormat distribution_format = TableFormat::Csv;
  std::vector<std::pair<int, int>> settings_subset;  // empty = full table

  // honest model
  StateFamily state_family = StateFamily::Werner;
  double noise_lo = 1.0, noise_hi = 1.0;
  int noise_steps = 1;
  MeasurementAngleSet angles;

  GridSpec grid;
  int level = 2;
  std::vector<std::string> extras = {"MNP"};
  NodeMode mode = NodeMode::PerNode;
  int key_input = 0;
  std::optional<int> key_input_bob;
  bool real_moments = true;
  SolveOptions solver;
  int workers = 2;
  std::string output_path = "results.csv";

  static RunConfig from_json_text(const std::string& text);
  std::string to_json_text() const;
  // Collects every validation problem; empty means the config is usable.
  std::vector<std::string> validate() const;
};

struct RunOutcome {
  int exit_code = 0;  // 0 ok, 2 config, 3 solver failure, 4 infeasible
  std::string csv;
  std::string log;
};

// Executes the configured sweep. When export_dir is set the SDP instances
// are written as .dat-s files instead of being solved.
RunOutcome run(const RunConfig& config,
               const std::optional<std::string>& export_dir = std::nullopt);

std::vector<ExtraPattern> parse_extra_patterns(const std::vector<std::string>& names);

}  // namespace dicert
