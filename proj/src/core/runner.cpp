#include "runner.hpp"

#include <atomic>
#include <chrono>
#include <cstdio>
#include <sstream>
#include <thread>

#include <nlohmann/json.hpp>

namespace dicert {

namespace {

double now_seconds() {
  return std::chrono::duration<double>(
             std::chrono::steady_clock::now().time_since_epoch())
      .count();
}

void parallel_for(int tasks, int workers, const std::function<void(int)>& fn) {
  workers = std::max(1, std::min(workers, tasks));
  if (workers == 1) {
    for (int i = 0; i < tasks; ++i) fn(i);
    return;
  }
  std::atomic<int> next{0};
  std::vector<std::thread> pool;
  pool.reserve(workers);
  for (int w = 0; w < workers; ++w) {
    pool.emplace_back([&]() {
      for (int i = next.fetch_add(1); i < tasks; i = next.fetch_add(1)) fn(i);
    });
  }
  for (auto& t : pool) t.join();
}

SolveStatus worst_status(SolveStatus a, SolveStatus b) {
  auto rank = [](SolveStatus s) {
    switch (s) {
      case SolveStatus::Optimal: return 0;
      case SolveStatus::NearOptimal: return 1;
      case SolveStatus::Infeasible: return 2;
      case SolveStatus::SolverError: return 3;
    }
    return 3;
  };
  return rank(a) >= rank(b) ? a : b;
}

}  // namespace

BoundResult entropy_bound(const EntropySetup& setup) {
  double t0 = now_seconds();
  std::vector<NPOProblem> problems =
      setup.key_input_bob
          ? two_sided(setup.scenario, setup.constraints, setup.grid,
                      setup.key_input, *setup.key_input_bob, setup.mode)
          : one_sided(setup.scenario, setup.constraints, setup.grid,
                      setup.key_input, setup.mode);

  int labels = setup.key_input_bob
                   ? setup.scenario.alice_outcomes * setup.scenario.bob_outcomes
                   : setup.scenario.alice_outcomes;
  double offset = (labels - 1) / kLn2;

  BoundResult out;
  std::vector<SolveResult> results(problems.size());
  std::vector<int> sizes(problems.size(), 0);
  std::mutex err_mutex;
  std::string first_error;
  parallel_for(static_cast<int>(problems.size()), setup.workers, [&](int i) {
    try {
      MomentProblem mp =
          moment_matrix(problems[i], setup.level, setup.extras, setup.moment);
      sizes[i] = mp.matrix_size();
      results[i] = solve_sdp(to_sdp(mp), setup.solver);
    } catch (const std::exception& e) {
      std::lock_guard<std::mutex> lock(err_mutex);
      if (first_error.empty()) first_error = e.what();
      results[i].status = SolveStatus::SolverError;
      results[i].message = e.what();
    }
  });

  out.status = SolveStatus::Optimal;
  double total = setup.mode == NodeMode::PerNode ? offset : 0.0;
  for (size_t i = 0; i < results.size(); ++i) {
    out.status = worst_status(out.status, results[i].status);
    out.matrix_size = std::max(out.matrix_size, sizes[i]);
    if (results[i].status == SolveStatus::Optimal ||
        results[i].status == SolveStatus::NearOptimal) {
      // Certified side: the dual objective of each minimization.
      total += results[i].dual_objective;
      if (setup.mode == NodeMode::PerNode) {
        out.per_node.push_back(results[i].dual_objective);
      }
    }
    if (!results[i].message.empty() && out.message.empty()) {
      out.message = results[i].message;
    }
  }
  if (out.status == SolveStatus::Optimal || out.status == SolveStatus::NearOptimal) {
    out.value = total;
  } else {
    out.value = 0.0;   // no partial bounds
    out.per_node.clear();
  }
  if (!first_error.empty()) out.message = first_error;
  out.wall_time_s = now_seconds() - t0;
  return out;
}

BoundResult min_entropy_bound(const Scenario& scenario,
                              const std::vector<BellFunctional>& constraints,
                              int key_input, std::optional<int> key_input_bob,
                              int level, const std::vector<ExtraPattern>& extras,
                              const SolveOptions& solver,
                              const MomentOptions& moment) {
  double t0 = now_seconds();
  BoundResult out;
  try {
    NPOProblem p = key_input_bob
                       ? min_entropy_problem_two_sided(scenario, constraints,
                                                       key_input, *key_input_bob)
                       : min_entropy_problem(scenario, constraints, key_input);
    MomentProblem mp = moment_matrix(p, level, extras, moment);
    out.matrix_size = mp.matrix_size();
    SolveResult r = solve_sdp(to_sdp(mp), solver);
    out.status = r.status;
    out.message = r.message;
    if (r.status == SolveStatus::Optimal || r.status == SolveStatus::NearOptimal) {
      // r.dual_objective certifies p_guess from above, so the entropy is a
      // valid lower bound; clamp tiny overshoots above 1.
      double p_guess = std::min(1.0, r.dual_objective);
      out.value = -log2_safe(std::max(p_guess, 1e-300)) + 0.0;  // +0 normalizes -0
      if (out.value < 0.0 && out.value > -1e-12) out.value = 0.0;
    }
  } catch (const std::exception& e) {
    out.status = SolveStatus::SolverError;
    out.message = e.what();
  }
  out.wall_time_s = now_seconds() - t0;
  return out;
}

BoundResult max_bell(const BellFunctional& functional, int level,
                     const std::vector<ExtraPattern>& extras,
                     const SolveOptions& solver, const MomentOptions& moment) {
  double t0 = now_seconds();
  BoundResult out;
  try {
    NPOProblem p = max_bell_problem(functional);
    MomentProblem mp = moment_matrix(p, level, extras, moment);
    out.matrix_size = mp.matrix_size();
    SolveResult r = solve_sdp(to_sdp(mp), solver);
    out.status = r.status;
    out.message = r.message;
    if (r.status == SolveStatus::Optimal || r.status == SolveStatus::NearOptimal) {
      out.value = r.dual_objective;
    }
  } catch (const std::exception& e) {
    out.status = SolveStatus::SolverError;
    out.message = e.what();
  }
  out.wall_time_s = now_seconds() - t0;
  return out;
}

std::vector<ExtraPattern> parse_extra_patterns(const std::vector<std::string>& names) {
  std::vector<ExtraPattern> out;
  for (const std::string& name : names) {
    ExtraPattern p;
    for (char c : name) {
      switch (c) {
        case 'M': case 'A': case 'm': case 'a': p.parties.push_back(Party::Alice); break;
        case 'N': case 'B': case 'n': case 'b': p.parties.push_back(Party::Bob); break;
        case 'P': case 'E': case 'C': case 'p': case 'e': p.parties.push_back(Party::Eve); break;
        case '*': case '.': break;
        default:
          throw InvalidArgument("unknown extra-pattern letter '" + std::string(1, c) +
                                "' in '" + name + "'");
      }
    }
    if (!p.parties.empty()) out.push_back(std::move(p));
  }
  return out;
}

namespace {

BellFunctional functional_from_config(const RunConfig& cfg) {
  if (cfg.functional_name == "chsh") return chsh();
  if (cfg.functional_name == "cglmp3") return cglmp3();
  if (cfg.functional_name == "i3322") return i3322();
  if (cfg.functional_name == "inline") {
    BellFunctional f;
    f.scenario = cfg.scenario;
    size_t expect = static_cast<size_t>(cfg.scenario.alice_inputs) *
                    cfg.scenario.bob_inputs * cfg.scenario.alice_outcomes *
                    cfg.scenario.bob_outcomes;
    if (cfg.functional_table.size() != expect) {
      throw InvalidArgument("inline functional table has " +
                            std::to_string(cfg.functional_table.size()) +
                            " coefficients, scenario needs " +
                            std::to_string(expect));
    }
    f.coeffs = cfg.functional_table;
    f.offset = cfg.functional_offset;
    f.name = "inline";
    return f;
  }
  throw InvalidArgument("unknown functional '" + cfg.functional_name + "'");
}

std::string format_csv_row(double parameter, const BoundResult& r) {
  char buf[160];
  std::snprintf(buf, sizeof(buf), "%.9g,%.9g,%s,%d,%.3f\n", parameter, r.value,
                to_string(r.status), r.matrix_size, r.wall_time_s);
  return buf;
}

}  // namespace

std::vector<std::string> RunConfig::validate() const {
  std::vector<std::string> errors;
  if (scenario.alice_inputs < 1 || scenario.bob_inputs < 1 ||
      scenario.alice_outcomes < 2 || scenario.bob_outcomes < 2) {
    errors.push_back("scenario: need >=1 input per side and >=2 outcomes per side");
  }
  if (key_input < 0 || key_input >= scenario.alice_inputs) {
    errors.push_back("key_input outside Alice's input range");
  }
  if (key_input_bob && (*key_input_bob < 0 || *key_input_bob >= scenario.bob_inputs)) {
    errors.push_back("key_input_bob outside Bob's input range");
  }
  if (task == TaskKind::TwoSidedVn && !key_input_bob) {
    errors.push_back("two_sided_vn needs key_input_bob");
  }
  if (level < 1) errors.push_back("level must be >= 1");
  if (workers < 1) errors.push_back("workers must be >= 1");
  if (solver.tolerance <= 0) errors.push_back("solver.tolerance must be > 0");
  if (solver.max_iterations < 1) errors.push_back("solver.max_iterations must be >= 1");
  if (source == Source::InequalitySweep) {
    if (sweep_steps < 1) errors.push_back("sweep steps must be >= 1");
    if (sweep_hi < sweep_lo) errors.push_back("sweep range is reversed");
    try {
      BellFunctional f = functional_from_config(*this);
      if (!(f.scenario == scenario)) {
        errors.push_back("functional '" + functional_name + "' is for scenario " +
                         f.scenario.tag() + ", config says " + scenario.tag());
      }
      double algebraic = 0.0;
      for (double c : f.coeffs) algebraic += std::abs(c);
      if (sweep_hi > algebraic + std::abs(f.offset) + 1e-9) {
        errors.push_back("sweep upper end exceeds the functional's algebraic maximum");
      }
    } catch (const std::exception& e) {
      errors.push_back(e.what());
    }
  }
  if (source == Source::DistributionFile && distribution_path.empty()) {
    errors.push_back("distribution source needs a path");
  }
  if (source == Source::HonestModel) {
    if (noise_steps < 1) errors.push_back("noise steps must be >= 1");
    if (angles.alice_angles.empty() || angles.bob_angles.empty()) {
      errors.push_back("honest model needs alice/bob angles");
    }
    if (static_cast<int>(angles.alice_angles.size()) != scenario.alice_inputs ||
        static_cast<int>(angles.bob_angles.size()) != scenario.bob_inputs) {
      errors.push_back("angle counts must match scenario inputs");
    }
    if (scenario.alice_outcomes != 2 || scenario.bob_outcomes != 2) {
      errors.push_back("honest model is a two-qubit implementation (2 outcomes)");
    }
  }
  if (task != TaskKind::MaxBell) {
    try {
      if (grid.spacing != GridSpacing::Custom && grid.node_count < 2) {
        errors.push_back("grid needs at least 2 nodes");
      }
      make_grid(grid);
    } catch (const std::exception& e) {
      errors.push_back(std::string("grid: ") + e.what());
    }
  }
  try {
    parse_extra_patterns(extras);
  } catch (const std::exception& e) {
    errors.push_back(e.what());
  }
  return errors;
}

RunOutcome run(const RunConfig& cfg, const std::optional<std::string>& export_dir) {
  RunOutcome out;
  std::vector<std::string> errors = cfg.validate();
  if (!errors.empty()) {
    std::ostringstream log;
    log << "configuration errors:\n";
    for (const auto& e : errors) log << "  - " << e << "\n";
    out.log = log.str();
    out.exit_code = 2;
    return out;
  }

  std::ostringstream log;
  std::vector<ExtraPattern> extras = parse_extra_patterns(cfg.extras);
  MomentOptions moment;
  moment.real_mode = cfg.real_moments;

  // Sweep parameters and the constraint set per point.
  struct Point {
    double parameter;
    std::vector<BellFunctional> constraints;
  };
  std::vector<Point> points;

  if (cfg.source == RunConfig::Source::InequalitySweep) {
    BellFunctional f = functional_from_config(cfg);
    for (int i = 0; i < cfg.sweep_steps; ++i) {
      double v = cfg.sweep_steps == 1
                     ? cfg.sweep_lo
                     : cfg.sweep_lo + (cfg.sweep_hi - cfg.sweep_lo) * i /
                                          (cfg.sweep_steps - 1);
      BellFunctional row = f;
      row.sense = Sense::GreaterEqual;
      row.threshold = v;
      points.push_back({v, {row}});
    }
  } else if (cfg.source == RunConfig::Source::DistributionFile) {
    Distribution d = load_distribution(cfg.distribution_path, cfg.distribution_format);
    if (!(d.scenario == cfg.scenario)) {
      out.log = "distribution file declares scenario " + d.scenario.tag() +
                ", config says " + cfg.scenario.tag() + "\n";
      out.exit_code = 2;
      return out;
    }
    NonSignallingReport ns = is_nonsignalling(d, 1e-9);
    if (!ns.non_signalling) {
      ProjectionResult proj = project_nonsignalling(d);
      log << "input distribution signalling (max violation " << ns.max_violation
          << "); projected, |perturbation|_1 = " << proj.l1_perturbation << "\n";
      d = proj.projected;
    }
    points.push_back({0.0, distribution_constraints(d, cfg.settings_subset)});
  } else {
    for (int i = 0; i < cfg.noise_steps; ++i) {
      double v = cfg.noise_steps == 1
                     ? cfg.noise_lo
                     : cfg.noise_lo + (cfg.noise_hi - cfg.noise_lo) * i /
                                          (cfg.noise_steps - 1);
      StateSpec spec{cfg.state_family, v};
      Distribution d = honest_statistics(spec, cfg.angles);
      points.push_back({v, distribution_constraints(d, cfg.settings_subset)});
    }
  }

  GridCoefficients grid;
  if (cfg.task != TaskKind::MaxBell) grid = make_coefficients(cfg.grid);

  if (export_dir) {
    for (size_t i = 0; i < points.size(); ++i) {
      std::vector<NPOProblem> problems;
      if (cfg.task == TaskKind::OneSidedVn) {
        problems = one_sided(cfg.scenario, points[i].constraints, grid,
                             cfg.key_input, cfg.mode);
      } else if (cfg.task == TaskKind::TwoSidedVn) {
        problems = two_sided(cfg.scenario, points[i].constraints, grid,
                             cfg.key_input, *cfg.key_input_bob, cfg.mode);
      } else if (cfg.task == TaskKind::MinEntropy) {
        problems.push_back(cfg.key_input_bob
                               ? min_entropy_problem_two_sided(
                                     cfg.scenario, points[i].constraints,
                                     cfg.key_input, *cfg.key_input_bob)
                               : min_entropy_problem(cfg.scenario,
                                                     points[i].constraints,
                                                     cfg.key_input));
      } else {
        problems.push_back(max_bell_problem(functional_from_config(cfg)));
      }
      for (size_t k = 0; k < problems.size(); ++k) {
        MomentProblem mp = moment_matrix(problems[k], cfg.level, extras, moment);
        char name[96];
        std::snprintf(name, sizeof(name), "%s/point%03zu_node%02zu.dat-s",
                      export_dir->c_str(), i, k);
        export_sdpa(to_sdp(mp), name);
        log << "wrote " << name << " (matrix " << mp.matrix_size() << "x"
            << mp.matrix_size() << ")\n";
      }
    }
    out.log = log.str();
    out.exit_code = 0;
    return out;
  }

  std::vector<BoundResult> results(points.size());
  auto solve_point = [&](int i, int inner_workers) {
    const Point& pt = points[i];
    if (cfg.task == TaskKind::MaxBell) {
      results[i] = max_bell(functional_from_config(cfg), cfg.level, extras,
                            cfg.solver, moment);
    } else if (cfg.task == TaskKind::MinEntropy) {
      results[i] = min_entropy_bound(cfg.scenario, pt.constraints, cfg.key_input,
                                     cfg.key_input_bob, cfg.level, extras,
                                     cfg.solver, moment);
    } else {
      EntropySetup setup;
      setup.scenario = cfg.scenario;
      setup.constraints = pt.constraints;
      setup.grid = grid;
      setup.level = cfg.level;
      setup.extras = extras;
      setup.mode = cfg.mode;
      setup.key_input = cfg.key_input;
      if (cfg.task == TaskKind::TwoSidedVn) setup.key_input_bob = cfg.key_input_bob;
      setup.workers = inner_workers;
      setup.solver = cfg.solver;
      setup.moment = moment;
      results[i] = entropy_bound(setup);
    }
  };

  if (points.size() > 1) {
    parallel_for(static_cast<int>(points.size()), cfg.workers,
                 [&](int i) { solve_point(i, 1); });
  } else if (!points.empty()) {
    solve_point(0, cfg.workers);
  }

  std::ostringstream csv;
  csv << "parameter,bound,status,matrix_size,wall_time\n";
  SolveStatus worst = SolveStatus::Optimal;
  for (size_t i = 0; i < points.size(); ++i) {
    csv << format_csv_row(points[i].parameter, results[i]);
    worst = worst_status(worst, results[i].status);
    if (!results[i].message.empty()) {
      log << "point " << points[i].parameter << ": " << results[i].message << "\n";
    }
  }
  out.csv = csv.str();
  out.log = log.str();
  if (worst == SolveStatus::SolverError) out.exit_code = 3;
  else if (worst == SolveStatus::Infeasible) out.exit_code = 4;
  else out.exit_code = 0;

  if (!cfg.output_path.empty()) {
    FILE* f = std::fopen(cfg.output_path.c_str(), "w");
    if (!f) {
      out.log += "cannot open output '" + cfg.output_path + "'\n";
      out.exit_code = out.exit_code == 0 ? 3 : out.exit_code;
      return out;
    }
    std::fwrite(out.csv.data(), 1, out.csv.size(), f);
    std::fclose(f);
  }
  return out;
}

namespace {

nlohmann::json angles_to_json(const MeasurementAngleSet& a) {
  return {{"alice", a.alice_angles}, {"bob", a.bob_angles}};
}

}  // namespace

std::string RunConfig::to_json_text() const {
  nlohmann::json j;
  j["scenario"] = {{"alice_inputs", scenario.alice_inputs},
                   {"bob_inputs", scenario.bob_inputs},
                   {"alice_outcomes", scenario.alice_outcomes},
                   {"bob_outcomes", scenario.bob_outcomes}};
  switch (task) {
    case TaskKind::OneSidedVn: j["task"] = "one_sided_vn"; break;
    case TaskKind::TwoSidedVn: j["task"] = "two_sided_vn"; break;
    case TaskKind::MinEntropy: j["task"] = "min_entropy"; break;
    case TaskKind::MaxBell: j["task"] = "max_bell"; break;
  }
  nlohmann::json cs;
  if (source == Source::InequalitySweep) {
    cs["type"] = "inequality_sweep";
    cs["functional"] = functional_name;
    if (functional_name == "inline") {
      cs["coefficients"] = functional_table;
      cs["offset"] = functional_offset;
    }
    cs["lo"] = sweep_lo;
    cs["hi"] = sweep_hi;
    cs["steps"] = sweep_steps;
  } else if (source == Source::DistributionFile) {
    cs["type"] = "distribution_file";
    cs["path"] = distribution_path;
    cs["format"] = distribution_format == TableFormat::Csv ? "csv" : "json";
    if (!settings_subset.empty()) {
      nlohmann::json arr = nlohmann::json::array();
      for (auto [x, y] : settings_subset) arr.push_back({x, y});
      cs["settings"] = arr;
    }
  } else {
    cs["type"] = "honest_model";
    cs["state"] = state_family == StateFamily::Werner
                      ? "werner"
                      : (state_family == StateFamily::Dephased ? "dephased"
                                                               : "phi_plus");
    cs["noise_lo"] = noise_lo;
    cs["noise_hi"] = noise_hi;
    cs["steps"] = noise_steps;
    cs["angles"] = angles_to_json(angles);
  }
  j["constraints"] = cs;
  j["grid"] = {{"nodes", grid.node_count},
               {"t_min", grid.t_min},
               {"lambda", grid.lambda},
               {"spacing", grid.spacing == GridSpacing::Uniform
                               ? "uniform"
                               : (grid.spacing == GridSpacing::Logarithmic
                                      ? "logarithmic"
                                      : "custom")}};
  if (grid.spacing == GridSpacing::Custom) j["grid"]["custom"] = grid.custom_nodes;
  j["level"] = level;
  j["extras"] = extras;
  j["mode"] = mode == NodeMode::PerNode ? "per_node" : "joint";
  j["key_input"] = key_input;
  if (key_input_bob) j["key_input_bob"] = *key_input_bob;
  j["real_moments"] = real_moments;
  j["solver"] = {{"tolerance", solver.tolerance},
                 {"max_iterations", solver.max_iterations},
                 {"verbosity", solver.verbosity}};
  j["workers"] = workers;
  j["output"] = output_path;
  return j.dump(2) + "\n";
}

RunConfig RunConfig::from_json_text(const std::string& text) {
  nlohmann::json j;
  try {
    j = nlohmann::json::parse(text);
  } catch (const std::exception& e) {
    throw ParseError(std::string("config: JSON parse error: ") + e.what());
  }
  RunConfig cfg;
  try {
    if (j.contains("scenario")) {
      const auto& s = j["scenario"];
      cfg.scenario.alice_inputs = s.value("alice_inputs", 2);
      cfg.scenario.bob_inputs = s.value("bob_inputs", 2);
      cfg.scenario.alice_outcomes = s.value("alice_outcomes", 2);
      cfg.scenario.bob_outcomes = s.value("bob_outcomes", 2);
    }
    std::string task = j.value("task", "one_sided_vn");
    if (task == "one_sided_vn") cfg.task = TaskKind::OneSidedVn;
    else if (task == "two_sided_vn") cfg.task = TaskKind::TwoSidedVn;
    else if (task == "min_entropy") cfg.task = TaskKind::MinEntropy;
    else if (task == "max_bell") cfg.task = TaskKind::MaxBell;
    else throw ParseError("config: unknown task '" + task + "'");

    if (j.contains("constraints")) {
      const auto& cs = j["constraints"];
      std::string type = cs.value("type", "inequality_sweep");
      if (type == "inequality_sweep") {
        cfg.source = Source::InequalitySweep;
        cfg.functional_name = cs.value("functional", "chsh");
        if (cs.contains("coefficients")) {
          cfg.functional_table = cs["coefficients"].get<std::vector<double>>();
        }
        cfg.functional_offset = cs.value("offset", 0.0);
        cfg.sweep_lo = cs.value("lo", cfg.sweep_lo);
        cfg.sweep_hi = cs.value("hi", cfg.sweep_hi);
        cfg.sweep_steps = cs.value("steps", cfg.sweep_steps);
      } else if (type == "distribution_file") {
        cfg.source = Source::DistributionFile;
        cfg.distribution_path = cs.value("path", "");
        std::string fmt = cs.value("format", "csv");
        cfg.distribution_format =
            fmt == "json" ? TableFormat::JsonTable : TableFormat::Csv;
        if (cs.contains("settings")) {
          for (const auto& pair : cs["settings"]) {
            cfg.settings_subset.push_back({pair.at(0).get<int>(),
                                           pair.at(1).get<int>()});
          }
        }
      } else if (type == "honest_model") {
        cfg.source = Source::HonestModel;
        std::string st = cs.value("state", "werner");
        if (st == "werner") cfg.state_family = StateFamily::Werner;
        else if (st == "dephased") cfg.state_family = StateFamily::Dephased;
        else if (st == "phi_plus") cfg.state_family = StateFamily::PhiPlus;
        else throw ParseError("config: unknown state '" + st + "'");
        cfg.noise_lo = cs.value("noise_lo", 1.0);
        cfg.noise_hi = cs.value("noise_hi", cfg.noise_lo);
        cfg.noise_steps = cs.value("steps", 1);
        if (cs.contains("angles")) {
          cfg.angles.alice_angles =
              cs["angles"].value("alice", std::vector<double>{});
          cfg.angles.bob_angles = cs["angles"].value("bob", std::vector<double>{});
        }
      } else {
        throw ParseError("config: unknown constraint source '" + type + "'");
      }
    }
    if (j.contains("grid")) {
      const auto& g = j["grid"];
      cfg.grid.node_count = g.value("nodes", 8);
      cfg.grid.t_min = g.value("t_min", 0.0);
      cfg.grid.lambda = g.value("lambda", 1.0);
      std::string sp = g.value("spacing", "logarithmic");
      if (sp == "uniform") cfg.grid.spacing = GridSpacing::Uniform;
      else if (sp == "logarithmic") cfg.grid.spacing = GridSpacing::Logarithmic;
      else if (sp == "custom") cfg.grid.spacing = GridSpacing::Custom;
      else throw ParseError("config: unknown grid spacing '" + sp + "'");
      if (g.contains("custom")) {
        cfg.grid.custom_nodes = g["custom"].get<std::vector<double>>();
      }
    }
    cfg.level = j.value("level", 2);
    if (j.contains("extras")) cfg.extras = j["extras"].get<std::vector<std::string>>();
    std::string mode = j.value("mode", "per_node");
    if (mode == "per_node") cfg.mode = NodeMode::PerNode;
    else if (mode == "joint") cfg.mode = NodeMode::Joint;
    else throw ParseError("config: unknown mode '" + mode + "'");
    cfg.key_input = j.value("key_input", 0);
    if (j.contains("key_input_bob") && !j["key_input_bob"].is_null()) {
      cfg.key_input_bob = j["key_input_bob"].get<int>();
    }
    cfg.real_moments = j.value("real_moments", true);
    if (j.contains("solver")) {
      const auto& s = j["solver"];
      cfg.solver.tolerance = s.value("tolerance", 1e-8);
      cfg.solver.max_iterations = s.value("max_iterations", 100);
      cfg.solver.verbosity = s.value("verbosity", 0);
    }
    cfg.workers = j.value("workers", 2);
    cfg.output_path = j.value("output", "results.csv");
  } catch (const ParseError&) {
    throw;
  } catch (const std::exception& e) {
    throw ParseError(std::string("config: ") + e.what());
  }
  return cfg;
}

}  // namespace dicert
