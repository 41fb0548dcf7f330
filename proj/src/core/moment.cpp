#include "moment.hpp"

#include <algorithm>
#include <cstdio>
#include <fstream>
#include <set>
#include <sstream>

namespace dicert {

namespace {

Word representative(const Word& w, const GeneratorSet& gens) {
  Word adj = adjoint_word(w, gens);
  return std::min(w, adj);
}

// Longest prefix of `w` already in the basis determines the shortest
// completing suffix.
Word shortest_completion(const Word& w, const std::set<Word>& have) {
  for (int cut = w.length() - 1; cut >= 1; --cut) {
    Word prefix, suffix;
    prefix.gens.assign(w.gens.begin(), w.gens.begin() + cut);
    suffix.gens.assign(w.gens.begin() + cut, w.gens.end());
    if (have.count(prefix)) return suffix;
  }
  return w;  // single letters are always present, so this is unreachable
}

}  // namespace

MomentProblem moment_matrix(const NPOProblem& problem, int level,
                            const std::vector<ExtraPattern>& extras,
                            const MomentOptions& opts) {
  if (level < 1) throw InvalidArgument("moment_matrix: level must be >= 1");
  const GeneratorSet& gens = problem.gens;

  std::vector<Word> words = basis(gens, level, extras);

  MomentProblem mp;
  mp.gens = gens;
  mp.real_mode = opts.real_mode;
  mp.objective_offset = problem.objective_offset;
  mp.maximize = problem.maximize;

  for (int attempt = 0;; ++attempt) {
    if (attempt > 64) {
      throw NumericFailure("moment_matrix: completion did not converge");
    }
    int n = static_cast<int>(words.size());
    mp.basis = words;
    mp.index.clear();
    mp.im_index.clear();
    mp.num_vars = 0;
    mp.num_im_vars = 0;
    mp.structure = Eigen::MatrixXi::Constant(n, n, -1);
    if (!opts.real_mode) {
      mp.im_structure = Eigen::MatrixXi::Constant(n, n, -1);
      mp.im_sign = Eigen::MatrixXi::Zero(n, n);
    }

    std::vector<Word> adjoints(n);
    for (int i = 0; i < n; ++i) adjoints[i] = adjoint_word(words[i], gens);

    for (int i = 0; i < n; ++i) {
      for (int j = i; j < n; ++j) {
        MaybeWord w = multiply(adjoints[i], words[j], gens);
        if (!w) continue;
        Word rep = representative(*w, gens);
        auto [it, inserted] = mp.index.try_emplace(rep, mp.num_vars);
        if (inserted) ++mp.num_vars;
        mp.structure(i, j) = it->second;
        mp.structure(j, i) = it->second;
        if (!opts.real_mode && !(*w == adjoint_word(*w, gens))) {
          auto [imit, im_inserted] = mp.im_index.try_emplace(rep, mp.num_im_vars);
          if (im_inserted) ++mp.num_im_vars;
          mp.im_structure(i, j) = imit->second;
          mp.im_sign(i, j) = (*w == rep) ? 1 : -1;
        }
      }
    }
    if (mp.index.empty() || mp.index.begin()->second != 0 ||
        !mp.index.begin()->first.identity()) {
      throw NumericFailure("moment_matrix: identity moment missing");
    }

    // Map objective and constraint polynomials onto moment ids; collect
    // words that the current span cannot express.
    std::set<Word> missing;
    auto map_poly = [&](const Polynomial& poly, SparseRow& row) {
      std::map<int, double> acc;
      for (const auto& [w, c] : poly) {
        Word rep = representative(w, gens);
        auto it = mp.index.find(rep);
        if (it == mp.index.end()) {
          missing.insert(rep);
          continue;
        }
        acc[it->second] += c;
      }
      row.terms.assign(acc.begin(), acc.end());
    };

    mp.objective = SparseRow{};
    map_poly(problem.objective, mp.objective);
    mp.equalities.clear();
    mp.inequalities.clear();
    for (const auto& c : problem.constraints) {
      SparseRow row;
      map_poly(c.poly, row);
      row.sense = c.sense;
      row.bound = c.bound;
      row.name = c.name;
      if (c.sense == Sense::Equal) {
        mp.equalities.push_back(std::move(row));
      } else {
        mp.inequalities.push_back(std::move(row));
      }
    }

    if (missing.empty()) break;
    if (!opts.auto_complete) {
      std::string list;
      for (const Word& w : missing) {
        if (!list.empty()) list += ", ";
        list += gens.word_name(w);
      }
      throw InvalidArgument(
          "moment_matrix: objective/constraint words outside the moment span: " +
          list + " (raise the level or add extra monomials)");
    }
    std::set<Word> have(words.begin(), words.end());
    std::set<Word> inserted;
    for (const Word& w : missing) {
      Word completion = shortest_completion(w, have);
      if (!have.count(completion)) inserted.insert(completion);
    }
    if (inserted.empty()) {
      throw NumericFailure("moment_matrix: completion failed to make progress");
    }
    for (const Word& w : inserted) words.push_back(w);
  }
  return mp;
}

SDPInstance to_sdp(const MomentProblem& mp) {
  SDPInstance sdp;
  int n = mp.matrix_size();
  bool complex_embed = !mp.real_mode && mp.num_im_vars > 0;
  sdp.psd_dim = mp.real_mode ? n : 2 * n;
  sdp.num_vars = mp.total_vars();
  sdp.pencil.assign(sdp.num_vars, {});
  sdp.maximize = mp.maximize;
  sdp.objective_offset = mp.objective_offset;
  sdp.bounded_vars = true;

  for (int i = 0; i < n; ++i) {
    for (int j = i; j < n; ++j) {
      int id = mp.structure(i, j);
      if (id < 0) continue;
      if (mp.real_mode) {
        sdp.pencil[id].push_back({i, j, 1.0});
      } else {
        // Real embedding [[A, -B], [B, A]] of the Hermitian matrix A + iB.
        sdp.pencil[id].push_back({i, j, 1.0});
        sdp.pencil[id].push_back({n + i, n + j, 1.0});
        int im = mp.im_structure(i, j);
        if (im >= 0) {
          double sign = mp.im_sign(i, j);
          sdp.pencil[mp.num_vars + im].push_back({i, n + j, -sign});
          sdp.pencil[mp.num_vars + im].push_back({j, n + i, sign});
        }
      }
    }
  }
  (void)complex_embed;

  // Normalization row, exactly once.
  SDPInstance::LinRow norm;
  norm.terms = {{0, 1.0}};
  norm.rhs = 1.0;
  sdp.eq_rows.push_back(norm);
  for (const auto& row : mp.equalities) {
    SDPInstance::LinRow r;
    r.terms = row.terms;
    r.rhs = row.bound;
    sdp.eq_rows.push_back(std::move(r));
  }
  for (const auto& row : mp.inequalities) {
    SDPInstance::LinRow r;
    double flip = row.sense == Sense::LessEqual ? -1.0 : 1.0;
    for (auto [v, c] : row.terms) r.terms.push_back({v, flip * c});
    r.rhs = flip * row.bound;
    sdp.lp_rows.push_back(std::move(r));
  }

  sdp.objective.assign(sdp.num_vars, 0.0);
  for (auto [v, c] : mp.objective.terms) sdp.objective[v] += c;
  return sdp;
}

SDPInstance SDPInstance::normalized() const {
  if (!maximize) return *this;
  SDPInstance out = *this;
  out.maximize = false;
  for (double& c : out.objective) c = -c;
  out.objective_offset = -objective_offset;
  return out;
}

namespace {

std::string format_value(double v) {
  char buf[40];
  std::snprintf(buf, sizeof(buf), "%.17g", v);
  return buf;
}

}  // namespace

std::string sdpa_string(const SDPInstance& inst) {
  SDPInstance p = inst.normalized();
  int n_diag = static_cast<int>(p.lp_rows.size() + 2 * p.eq_rows.size());
  std::ostringstream out;
  out << "\"objective_offset = " << format_value(p.objective_offset) << "\n";
  out << p.num_vars << "\n";
  int nblocks = (p.psd_dim > 0 ? 1 : 0) + (n_diag > 0 ? 1 : 0);
  out << nblocks << "\n";
  bool first = true;
  int psd_block = 0, diag_block = 0, next = 1;
  if (p.psd_dim > 0) psd_block = next++;
  if (n_diag > 0) diag_block = next++;
  if (p.psd_dim > 0) {
    out << p.psd_dim;
    first = false;
  }
  if (n_diag > 0) {
    if (!first) out << " ";
    out << -n_diag;
  }
  out << "\n";
  for (int k = 0; k < p.num_vars; ++k) {
    out << (k ? " " : "") << format_value(p.objective[k]);
  }
  out << "\n";

  auto entry = [&](int k, int b, int i, int j, double v) {
    if (v == 0.0) return;
    out << k << " " << b << " " << i + 1 << " " << j + 1 << " " << format_value(v)
        << "\n";
  };
  // F0 carries the constant parts with the SDPA sign convention
  // X = sum_k x_k F_k - F0 >= 0.
  int d = 0;
  for (const auto& row : p.lp_rows) {
    entry(0, diag_block, d, d, row.rhs);
    ++d;
  }
  for (const auto& row : p.eq_rows) {
    entry(0, diag_block, d, d, row.rhs);
    entry(0, diag_block, d + 1, d + 1, -row.rhs);
    d += 2;
  }
  for (int k = 0; k < p.num_vars; ++k) {
    for (const auto& e : p.pencil[k]) entry(k + 1, psd_block, e.i, e.j, e.c);
    d = 0;
    for (const auto& row : p.lp_rows) {
      for (auto [v, c] : row.terms) {
        if (v == k) entry(k + 1, diag_block, d, d, c);
      }
      ++d;
    }
    for (const auto& row : p.eq_rows) {
      for (auto [v, c] : row.terms) {
        if (v == k) {
          entry(k + 1, diag_block, d, d, c);
          entry(k + 1, diag_block, d + 1, d + 1, -c);
        }
      }
      d += 2;
    }
  }
  return out.str();
}

void export_sdpa(const SDPInstance& instance, const std::string& path) {
  std::ofstream f(path);
  if (!f) throw IoError("export_sdpa: cannot open '" + path + "' for writing");
  f << sdpa_string(instance);
  if (!f.good()) throw IoError("export_sdpa: write to '" + path + "' failed");
}

SDPInstance parse_sdpa(const std::string& path) {
  std::ifstream f(path);
  if (!f) throw IoError("parse_sdpa: cannot open '" + path + "'");
  double offset = 0.0;
  std::string line;
  std::vector<std::string> body;
  while (std::getline(f, line)) {
    if (!line.empty() && (line[0] == '"' || line[0] == '*')) {
      auto pos = line.find("objective_offset =");
      if (pos != std::string::npos) {
        offset = std::stod(line.substr(pos + 18));
      }
      continue;
    }
    if (!line.empty()) body.push_back(line);
  }
  if (body.size() < 4) throw ParseError("parse_sdpa: truncated file");

  auto split_ints = [](const std::string& s) {
    std::istringstream in(s);
    std::vector<double> vals;
    double v;
    while (in >> v) vals.push_back(v);
    return vals;
  };

  int num_vars = static_cast<int>(std::stod(body[0]));
  int nblocks = static_cast<int>(std::stod(body[1]));
  std::vector<double> sizes = split_ints(body[2]);
  if (static_cast<int>(sizes.size()) != nblocks) {
    throw ParseError("parse_sdpa: block count mismatch");
  }
  std::vector<double> c = split_ints(body[3]);
  if (static_cast<int>(c.size()) != num_vars) {
    throw ParseError("parse_sdpa: objective length mismatch");
  }

  SDPInstance out;
  out.num_vars = num_vars;
  out.objective = c;
  out.objective_offset = offset;
  int psd_block = 0, diag_block = 0, n_diag = 0;
  for (int b = 0; b < nblocks; ++b) {
    if (sizes[b] > 0) {
      psd_block = b + 1;
      out.psd_dim = static_cast<int>(sizes[b]);
    } else {
      diag_block = b + 1;
      n_diag = static_cast<int>(-sizes[b]);
    }
  }
  out.pencil.assign(num_vars, {});

  // Diagonal entries: (k, d) -> coefficient; recombined into rows below.
  std::vector<std::vector<std::pair<int, double>>> diag_terms(n_diag);
  std::vector<double> diag_rhs(n_diag, 0.0);

  for (size_t l = 4; l < body.size(); ++l) {
    std::istringstream in(body[l]);
    int k, b, i, j;
    double v;
    if (!(in >> k >> b >> i >> j >> v)) {
      throw ParseError("parse_sdpa: malformed entry at line " + std::to_string(l + 1));
    }
    if (b == psd_block) {
      if (k == 0) throw ParseError("parse_sdpa: constant PSD part unsupported");
      out.pencil[k - 1].push_back({i - 1, j - 1, v});
    } else if (b == diag_block) {
      if (i != j) throw ParseError("parse_sdpa: off-diagonal entry in diagonal block");
      if (k == 0) {
        diag_rhs[i - 1] = v;
      } else {
        diag_terms[i - 1].push_back({k - 1, v});
      }
    } else {
      throw ParseError("parse_sdpa: unknown block " + std::to_string(b));
    }
  }

  // Opposing adjacent pairs encode equality rows.
  auto negated = [](const std::vector<std::pair<int, double>>& a,
                    const std::vector<std::pair<int, double>>& b) {
    if (a.size() != b.size()) return false;
    for (size_t i = 0; i < a.size(); ++i) {
      if (a[i].first != b[i].first || a[i].second != -b[i].second) return false;
    }
    return true;
  };
  for (int d = 0; d < n_diag;) {
    if (d + 1 < n_diag && negated(diag_terms[d], diag_terms[d + 1]) &&
        diag_rhs[d] == -diag_rhs[d + 1] && !diag_terms[d].empty()) {
      out.eq_rows.push_back({diag_terms[d], diag_rhs[d]});
      d += 2;
    } else {
      out.lp_rows.push_back({diag_terms[d], diag_rhs[d]});
      d += 1;
    }
  }
  return out;
}

}  // namespace dicert
