#include "dicert.h"

#include <cstring>
#include <string>

#include "core/runner.hpp"

using namespace dicert;

namespace {

thread_local std::string g_last_error;

dc_status set_error(dc_status code, const std::string& msg) {
  g_last_error = msg;
  return code;
}

dc_status run_guarded(const std::function<dc_status()>& fn) {
  try {
    g_last_error.clear();
    return fn();
  } catch (const InvalidArgument& e) {
    return set_error(DC_ERR_INVALID_ARGUMENT, e.what());
  } catch (const ParseError& e) {
    return set_error(DC_ERR_PARSE, e.what());
  } catch (const IoError& e) {
    return set_error(DC_ERR_IO, e.what());
  } catch (const NumericFailure& e) {
    return set_error(DC_ERR_NUMERIC, e.what());
  } catch (const std::exception& e) {
    return set_error(DC_ERR_UNKNOWN, e.what());
  } catch (...) {
    return set_error(DC_ERR_UNKNOWN, "unknown error");
  }
}

char* dup_string(const std::string& s) {
  char* out = new char[s.size() + 1];
  std::memcpy(out, s.c_str(), s.size() + 1);
  return out;
}

BellFunctional functional_by_name(const char* name) {
  std::string n = name ? name : "";
  if (n == "chsh") return chsh();
  if (n == "cglmp3") return cglmp3();
  if (n == "i3322") return i3322();
  throw InvalidArgument("unknown functional '" + n + "'");
}

dc_status status_from_solve(SolveStatus s) {
  switch (s) {
    case SolveStatus::Optimal:
    case SolveStatus::NearOptimal: return DC_OK;
    case SolveStatus::Infeasible: return DC_ERR_INFEASIBLE;
    case SolveStatus::SolverError: return DC_ERR_SOLVER;
  }
  return DC_ERR_UNKNOWN;
}

}  // namespace

struct dc_distribution {
  Distribution d;
};

extern "C" {

const char* dc_version(void) { return "0.1.0"; }

const char* dc_error_message(void) { return g_last_error.c_str(); }

void dc_string_free(char* s) { delete[] s; }

dc_status dc_default_config(char** json_out) {
  return run_guarded([&]() {
    if (!json_out) return set_error(DC_ERR_INVALID_ARGUMENT, "null output");
    RunConfig cfg;
    *json_out = dup_string(cfg.to_json_text());
    return DC_OK;
  });
}

dc_status dc_run_config(const char* config_json, const char* export_dir,
                        int* exit_code, char** csv_out, char** log_out) {
  return run_guarded([&]() {
    if (!config_json || !exit_code) {
      return set_error(DC_ERR_INVALID_ARGUMENT, "null argument");
    }
    RunConfig cfg = RunConfig::from_json_text(config_json);
    std::optional<std::string> dir;
    if (export_dir) dir = std::string(export_dir);
    RunOutcome outcome = run(cfg, dir);
    *exit_code = outcome.exit_code;
    if (csv_out) *csv_out = dup_string(outcome.csv);
    if (log_out) *log_out = dup_string(outcome.log);
    if (outcome.exit_code == 2) return set_error(DC_ERR_PARSE, outcome.log);
    if (outcome.exit_code == 3) return set_error(DC_ERR_SOLVER, outcome.log);
    if (outcome.exit_code == 4) return set_error(DC_ERR_INFEASIBLE, outcome.log);
    return DC_OK;
  });
}

dc_status dc_distribution_load(const char* path, const char* format,
                               dc_distribution** out) {
  return run_guarded([&]() {
    if (!path || !out) return set_error(DC_ERR_INVALID_ARGUMENT, "null argument");
    std::string fmt = format ? format : "csv";
    TableFormat tf;
    if (fmt == "csv") tf = TableFormat::Csv;
    else if (fmt == "json") tf = TableFormat::JsonTable;
    else return set_error(DC_ERR_INVALID_ARGUMENT, "format must be csv or json");
    *out = new dc_distribution{load_distribution(path, tf)};
    return DC_OK;
  });
}

dc_status dc_distribution_from_table(int oa, int ob, int nx, int ny,
                                     const double* p, dc_distribution** out) {
  return run_guarded([&]() {
    if (!p || !out) return set_error(DC_ERR_INVALID_ARGUMENT, "null argument");
    Distribution d;
    d.scenario = Scenario{nx, ny, oa, ob};
    size_t size = static_cast<size_t>(oa) * ob * nx * ny;
    d.p.assign(p, p + size);
    d.validate();
    *out = new dc_distribution{std::move(d)};
    return DC_OK;
  });
}

dc_status dc_distribution_entry(const dc_distribution* d, int a, int b, int x,
                                int y, double* out) {
  return run_guarded([&]() {
    if (!d || !out) return set_error(DC_ERR_INVALID_ARGUMENT, "null argument");
    const Scenario& s = d->d.scenario;
    if (a < 0 || a >= s.alice_outcomes || b < 0 || b >= s.bob_outcomes ||
        x < 0 || x >= s.alice_inputs || y < 0 || y >= s.bob_inputs) {
      return set_error(DC_ERR_INVALID_ARGUMENT, "index out of range");
    }
    *out = d->d.at(a, b, x, y);
    return DC_OK;
  });
}

dc_status dc_distribution_is_nonsignalling(const dc_distribution* d, double tol,
                                           int* nonsignalling,
                                           double* max_violation) {
  return run_guarded([&]() {
    if (!d) return set_error(DC_ERR_INVALID_ARGUMENT, "null distribution");
    NonSignallingReport r = is_nonsignalling(d->d, tol);
    if (nonsignalling) *nonsignalling = r.non_signalling ? 1 : 0;
    if (max_violation) *max_violation = r.max_violation;
    return DC_OK;
  });
}

dc_status dc_distribution_project_nonsignalling(const dc_distribution* d,
                                                dc_distribution** projected,
                                                double* l1_perturbation) {
  return run_guarded([&]() {
    if (!d || !projected) return set_error(DC_ERR_INVALID_ARGUMENT, "null argument");
    ProjectionResult r = project_nonsignalling(d->d);
    *projected = new dc_distribution{std::move(r.projected)};
    if (l1_perturbation) *l1_perturbation = r.l1_perturbation;
    return DC_OK;
  });
}

void dc_distribution_free(dc_distribution* d) { delete d; }

dc_status dc_max_bell(const char* functional, int level, double* value) {
  return run_guarded([&]() {
    if (!value) return set_error(DC_ERR_INVALID_ARGUMENT, "null output");
    BoundResult r = dicert::max_bell(functional_by_name(functional), level);
    dc_status st = status_from_solve(r.status);
    if (st != DC_OK) return set_error(st, r.message);
    *value = r.value;
    return DC_OK;
  });
}

dc_status dc_entropy_bound(const char* functional, double threshold, int nodes,
                           double t_min, int level, int per_node, int key_x,
                           int key_y, int workers, double* value,
                           int* matrix_size) {
  return run_guarded([&]() {
    if (!value) return set_error(DC_ERR_INVALID_ARGUMENT, "null output");
    BellFunctional f = functional_by_name(functional);
    f.sense = Sense::GreaterEqual;
    f.threshold = threshold;
    EntropySetup setup;
    setup.scenario = f.scenario;
    setup.constraints = {f};
    GridSpec gs;
    gs.node_count = nodes;
    gs.t_min = t_min;
    setup.grid = make_coefficients(gs);
    setup.level = level;
    setup.mode = per_node ? NodeMode::PerNode : NodeMode::Joint;
    setup.key_input = key_x;
    if (key_y >= 0) setup.key_input_bob = key_y;
    setup.workers = workers > 0 ? workers : 1;
    BoundResult r = entropy_bound(setup);
    dc_status st = status_from_solve(r.status);
    if (st != DC_OK) return set_error(st, r.message);
    *value = r.value;
    if (matrix_size) *matrix_size = r.matrix_size;
    return DC_OK;
  });
}

dc_status dc_min_entropy(const char* functional, double threshold, int level,
                         int key_x, int key_y, double* value) {
  return run_guarded([&]() {
    if (!value) return set_error(DC_ERR_INVALID_ARGUMENT, "null output");
    BellFunctional f = functional_by_name(functional);
    f.sense = Sense::GreaterEqual;
    f.threshold = threshold;
    std::optional<int> kb;
    if (key_y >= 0) kb = key_y;
    BoundResult r = min_entropy_bound(
        f.scenario, {f}, key_x, kb, level,
        {{{Party::Alice, Party::Bob, Party::Eve}}});
    dc_status st = status_from_solve(r.status);
    if (st != DC_OK) return set_error(st, r.message);
    *value = r.value;
    return DC_OK;
  });
}

}  // extern "C"
