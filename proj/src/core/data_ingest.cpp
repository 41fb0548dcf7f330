#include "data_ingest.hpp"

#include <fstream>
#include <sstream>

#include <nlohmann/json.hpp>

namespace dicert {

Distribution RawCounts::normalize() const {
  Distribution d = Distribution::zero(scenario);
  for (int x = 0; x < scenario.alice_inputs; ++x) {
    for (int y = 0; y < scenario.bob_inputs; ++y) {
      long long total = 0;
      for (int a = 0; a < scenario.alice_outcomes; ++a) {
        for (int b = 0; b < scenario.bob_outcomes; ++b) {
          total += counts[BellFunctional::coeff_index(scenario, a, b, x, y)];
        }
      }
      if (total <= 0) {
        throw InvalidArgument("RawCounts: no trials for setting (" +
                              std::to_string(x) + "," + std::to_string(y) + ")");
      }
      for (int a = 0; a < scenario.alice_outcomes; ++a) {
        for (int b = 0; b < scenario.bob_outcomes; ++b) {
          d.at(a, b, x, y) =
              static_cast<double>(
                  counts[BellFunctional::coeff_index(scenario, a, b, x, y)]) /
              static_cast<double>(total);
        }
      }
    }
  }
  return d;
}

namespace {

struct Header {
  Scenario scenario;
  bool counts = false;
};

Header parse_csv_header(const std::string& line) {
  Header h;
  std::istringstream in(line);
  std::string field;
  int seen = 0;
  while (std::getline(in, field, ',')) {
    auto eq = field.find('=');
    if (eq == std::string::npos) {
      throw ParseError("load_distribution: malformed header field '" + field + "'");
    }
    std::string key = field.substr(0, eq);
    std::string val = field.substr(eq + 1);
    if (key == "na") h.scenario.alice_outcomes = std::stoi(val);
    else if (key == "nb") h.scenario.bob_outcomes = std::stoi(val);
    else if (key == "nx") h.scenario.alice_inputs = std::stoi(val);
    else if (key == "ny") h.scenario.bob_inputs = std::stoi(val);
    else if (key == "mode") {
      if (val == "counts") h.counts = true;
      else if (val == "probs") h.counts = false;
      else throw ParseError("load_distribution: unknown mode '" + val + "'");
    } else {
      throw ParseError("load_distribution: unknown header key '" + key + "'");
    }
    ++seen;
  }
  if (seen != 5) throw ParseError("load_distribution: header needs na,nb,nx,ny,mode");
  return h;
}

Distribution from_values(const Header& h, const std::vector<double>& values,
                         const std::vector<bool>& present) {
  const Scenario& s = h.scenario;
  for (size_t i = 0; i < present.size(); ++i) {
    if (!present[i]) {
      throw ParseError("load_distribution: table entry " + std::to_string(i) +
                       " missing");
    }
  }
  if (h.counts) {
    RawCounts rc;
    rc.scenario = s;
    rc.counts.resize(values.size());
    for (size_t i = 0; i < values.size(); ++i) {
      if (values[i] < 0 || values[i] != std::floor(values[i])) {
        throw ParseError("load_distribution: counts must be nonnegative integers");
      }
      rc.counts[i] = static_cast<long long>(values[i]);
    }
    return rc.normalize();
  }
  Distribution d;
  d.scenario = s;
  d.p = values;
  for (int x = 0; x < s.alice_inputs; ++x) {
    for (int y = 0; y < s.bob_inputs; ++y) {
      double sum = 0.0;
      for (int a = 0; a < s.alice_outcomes; ++a) {
        for (int b = 0; b < s.bob_outcomes; ++b) sum += d.at(a, b, x, y);
      }
      if (std::abs(sum - 1.0) > 1e-6) {
        throw ParseError("load_distribution: setting (" + std::to_string(x) + "," +
                         std::to_string(y) + ") sums to " + std::to_string(sum));
      }
    }
  }
  return d;
}

Distribution load_csv(const std::string& path) {
  std::ifstream f(path);
  if (!f) throw IoError("load_distribution: cannot open '" + path + "'");
  std::string line;
  if (!std::getline(f, line)) throw ParseError("load_distribution: empty file");
  Header h = parse_csv_header(line);
  const Scenario& s = h.scenario;
  if (s.alice_inputs < 1 || s.bob_inputs < 1 || s.alice_outcomes < 1 ||
      s.bob_outcomes < 1) {
    throw ParseError("load_distribution: nonpositive dimension in header");
  }
  size_t size = static_cast<size_t>(s.alice_inputs) * s.bob_inputs *
                s.alice_outcomes * s.bob_outcomes;
  std::vector<double> values(size, 0.0);
  std::vector<bool> present(size, false);
  int row = 1;
  while (std::getline(f, line)) {
    ++row;
    if (line.empty()) continue;
    std::istringstream in(line);
    std::string tok;
    int x, y, a, b;
    double v;
    try {
      std::getline(in, tok, ','); x = std::stoi(tok);
      std::getline(in, tok, ','); y = std::stoi(tok);
      std::getline(in, tok, ','); a = std::stoi(tok);
      std::getline(in, tok, ','); b = std::stoi(tok);
      if (!std::getline(in, tok, ',')) throw std::invalid_argument("short row");
      v = std::stod(tok);
    } catch (const std::exception&) {
      throw ParseError("load_distribution: malformed row " + std::to_string(row));
    }
    if (x < 0 || x >= s.alice_inputs || y < 0 || y >= s.bob_inputs || a < 0 ||
        a >= s.alice_outcomes || b < 0 || b >= s.bob_outcomes) {
      throw ParseError("load_distribution: row " + std::to_string(row) +
                       " indices outside declared dimensions (expected x<" +
                       std::to_string(s.alice_inputs) + ", y<" +
                       std::to_string(s.bob_inputs) + ", a<" +
                       std::to_string(s.alice_outcomes) + ", b<" +
                       std::to_string(s.bob_outcomes) + ")");
    }
    size_t idx = BellFunctional::coeff_index(s, a, b, x, y);
    values[idx] = v;
    present[idx] = true;
  }
  return from_values(h, values, present);
}

Distribution load_json(const std::string& path) {
  std::ifstream f(path);
  if (!f) throw IoError("load_distribution: cannot open '" + path + "'");
  nlohmann::json j;
  try {
    f >> j;
  } catch (const std::exception& e) {
    throw ParseError(std::string("load_distribution: JSON parse error: ") + e.what());
  }
  Header h;
  try {
    h.scenario.alice_outcomes = j.at("na").get<int>();
    h.scenario.bob_outcomes = j.at("nb").get<int>();
    h.scenario.alice_inputs = j.at("nx").get<int>();
    h.scenario.bob_inputs = j.at("ny").get<int>();
    std::string mode = j.at("mode").get<std::string>();
    if (mode == "counts") h.counts = true;
    else if (mode == "probs") h.counts = false;
    else throw ParseError("load_distribution: unknown mode '" + mode + "'");
    const auto& table = j.at("table");
    const Scenario& s = h.scenario;
    size_t size = static_cast<size_t>(s.alice_inputs) * s.bob_inputs *
                  s.alice_outcomes * s.bob_outcomes;
    std::vector<double> values(size, 0.0);
    std::vector<bool> present(size, false);
    if (static_cast<int>(table.size()) != s.alice_inputs) {
      throw ParseError("load_distribution: table has " + std::to_string(table.size()) +
                       " x-slices, expected " + std::to_string(s.alice_inputs));
    }
    for (int x = 0; x < s.alice_inputs; ++x) {
      for (int y = 0; y < s.bob_inputs; ++y) {
        for (int a = 0; a < s.alice_outcomes; ++a) {
          for (int b = 0; b < s.bob_outcomes; ++b) {
            size_t idx = BellFunctional::coeff_index(s, a, b, x, y);
            values[idx] = table.at(x).at(y).at(a).at(b).get<double>();
            present[idx] = true;
          }
        }
      }
    }
    return from_values(h, values, present);
  } catch (const ParseError&) {
    throw;
  } catch (const std::exception& e) {
    throw ParseError(std::string("load_distribution: ") + e.what());
  }
}

}  // namespace

Distribution load_distribution(const std::string& path, TableFormat format) {
  Distribution d = format == TableFormat::Csv ? load_csv(path) : load_json(path);
  for (double& v : d.p) {
    if (v < 0 && v >= -1e-12) v = 0.0;
  }
  d.validate();
  return d;
}

NonSignallingReport is_nonsignalling(const Distribution& d, double tol) {
  const Scenario& s = d.scenario;
  double worst = 0.0;
  for (int x = 0; x < s.alice_inputs; ++x) {
    for (int a = 0; a < s.alice_outcomes; ++a) {
      for (int y = 1; y < s.bob_inputs; ++y) {
        double m0 = 0.0, m1 = 0.0;
        for (int b = 0; b < s.bob_outcomes; ++b) {
          m0 += d.at(a, b, x, 0);
          m1 += d.at(a, b, x, y);
        }
        worst = std::max(worst, std::abs(m0 - m1));
      }
    }
  }
  for (int y = 0; y < s.bob_inputs; ++y) {
    for (int b = 0; b < s.bob_outcomes; ++b) {
      for (int x = 1; x < s.alice_inputs; ++x) {
        double m0 = 0.0, m1 = 0.0;
        for (int a = 0; a < s.alice_outcomes; ++a) {
          m0 += d.at(a, b, 0, y);
          m1 += d.at(a, b, x, y);
        }
        worst = std::max(worst, std::abs(m0 - m1));
      }
    }
  }
  return {worst <= tol, worst};
}

namespace {

// Rows of the normalization + non-signalling equality system C p = e.
void equality_system(const Scenario& s, RealMatrix& C, Vector& e) {
  int dim = s.alice_inputs * s.bob_inputs * s.alice_outcomes * s.bob_outcomes;
  int rows = s.alice_inputs * s.bob_inputs +
             s.alice_inputs * s.alice_outcomes * (s.bob_inputs - 1) +
             s.bob_inputs * s.bob_outcomes * (s.alice_inputs - 1);
  C = RealMatrix::Zero(rows, dim);
  e = Vector::Zero(rows);
  int r = 0;
  for (int x = 0; x < s.alice_inputs; ++x) {
    for (int y = 0; y < s.bob_inputs; ++y) {
      for (int a = 0; a < s.alice_outcomes; ++a) {
        for (int b = 0; b < s.bob_outcomes; ++b) {
          C(r, BellFunctional::coeff_index(s, a, b, x, y)) = 1.0;
        }
      }
      e(r) = 1.0;
      ++r;
    }
  }
  for (int x = 0; x < s.alice_inputs; ++x) {
    for (int a = 0; a < s.alice_outcomes; ++a) {
      for (int y = 1; y < s.bob_inputs; ++y) {
        for (int b = 0; b < s.bob_outcomes; ++b) {
          C(r, BellFunctional::coeff_index(s, a, b, x, 0)) += 1.0;
          C(r, BellFunctional::coeff_index(s, a, b, x, y)) -= 1.0;
        }
        ++r;
      }
    }
  }
  for (int y = 0; y < s.bob_inputs; ++y) {
    for (int b = 0; b < s.bob_outcomes; ++b) {
      for (int x = 1; x < s.alice_inputs; ++x) {
        for (int a = 0; a < s.alice_outcomes; ++a) {
          C(r, BellFunctional::coeff_index(s, a, b, 0, y)) += 1.0;
          C(r, BellFunctional::coeff_index(s, a, b, x, y)) -= 1.0;
        }
        ++r;
      }
    }
  }
}

Vector project_onto_affine(const RealMatrix& C, const Vector& e, const Vector& p) {
  // p - C^+ (C p - e); the system has redundant rows, so use a pseudoinverse.
  Vector residual = C * p - e;
  Eigen::CompleteOrthogonalDecomposition<RealMatrix> cod(C * C.transpose());
  return p - C.transpose() * cod.solve(residual);
}

}  // namespace

ProjectionResult project_nonsignalling(const Distribution& d) {
  const Scenario& s = d.scenario;
  RealMatrix C;
  Vector e;
  equality_system(s, C, e);

  Vector p0 = Eigen::Map<const Vector>(d.p.data(), d.p.size());
  Vector p = project_onto_affine(C, e, p0);

  ProjectionResult out;
  out.min_entry = p.minCoeff();
  if (out.min_entry < -1e-6) {
    throw NumericFailure(
        "project_nonsignalling: projection leaves entry " +
        std::to_string(out.min_entry) +
        "; the data needs an explicit nonnegativity-constrained QP");
  }
  if (out.min_entry < 0.0) {
    out.clipped = true;
    p = p.cwiseMax(0.0);
    p = project_onto_affine(C, e, p);
    if (p.minCoeff() < -1e-6) {
      throw NumericFailure(
          "project_nonsignalling: entries still negative after one "
          "clip-reproject pass; the data needs an explicit QP");
    }
  }

  out.projected.scenario = s;
  out.projected.p.assign(p.data(), p.data() + p.size());
  for (double& v : out.projected.p) {
    if (v < 0 && v >= -1e-9) v = 0.0;
  }
  out.l1_perturbation = (p - p0).lpNorm<1>();
  out.l2_perturbation = (p - p0).norm();
  return out;
}

}  // namespace dicert
