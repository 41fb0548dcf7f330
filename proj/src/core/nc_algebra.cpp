#include "nc_algebra.hpp"

#include <algorithm>
#include <set>
#include <tuple>

namespace dicert {

void GeneratorSet::add_measurement(Party party, int input, int n_outcomes) {
  if (finalized_) throw InvalidArgument("GeneratorSet: already finalized");
  if (n_outcomes < 2) throw InvalidArgument("GeneratorSet: measurement needs >= 2 outcomes");
  int family = next_family_++;
  for (int a = 0; a + 1 < n_outcomes; ++a) {
    Generator g;
    g.party = party;
    g.input = input;
    g.outcome = a;
    g.family = family;
    g.orthogonal_family = true;
    char p = party == Party::Alice ? 'M' : (party == Party::Bob ? 'N' : 'E');
    g.name = std::string(1, p) + "(" + std::to_string(a) + "|" + std::to_string(input) + ")";
    gens_.push_back(g);
  }
  meas_outcomes_[{static_cast<int>(party), input}] = n_outcomes;
}

void GeneratorSet::add_node_projector(int node, int outcome_label) {
  if (finalized_) throw InvalidArgument("GeneratorSet: already finalized");
  Generator g;
  g.party = Party::Eve;
  g.input = 0;
  g.outcome = outcome_label;
  g.node = node;
  g.family = next_family_++;
  g.orthogonal_family = false;
  g.name = "P" + std::to_string(node) + "(" + std::to_string(outcome_label) + ")";
  gens_.push_back(g);
}

void GeneratorSet::add_eve_povm(int n_outcomes) {
  if (finalized_) throw InvalidArgument("GeneratorSet: already finalized");
  if (eve_povm_outcomes_ > 0) throw InvalidArgument("GeneratorSet: POVM already present");
  if (n_outcomes < 2) throw InvalidArgument("GeneratorSet: POVM needs >= 2 outcomes");
  int family = next_family_++;
  for (int a = 0; a + 1 < n_outcomes; ++a) {
    Generator g;
    g.party = Party::Eve;
    g.input = 0;
    g.outcome = a;
    g.family = family;
    g.orthogonal_family = true;
    g.name = "C(" + std::to_string(a) + ")";
    gens_.push_back(g);
  }
  eve_povm_outcomes_ = n_outcomes;
}

void GeneratorSet::finalize() {
  if (finalized_) return;
  if (gens_.size() > 255) {
    throw InvalidArgument("GeneratorSet: more than 255 generators");
  }
  std::stable_sort(gens_.begin(), gens_.end(), [](const Generator& a, const Generator& b) {
    return std::tuple(static_cast<int>(a.party), a.input, a.outcome, a.node) <
           std::tuple(static_cast<int>(b.party), b.input, b.outcome, b.node);
  });
  for (GenId id = 0; id < gens_.size(); ++id) {
    const Generator& g = gens_[id];
    if (g.node >= 0) {
      node_lookup_[{g.node, g.outcome}] = id;
    } else if (g.party == Party::Eve) {
      povm_lookup_[g.outcome] = id;
    } else {
      measurement_lookup_[{static_cast<int>(g.party), g.input, g.outcome}] = id;
    }
  }
  finalized_ = true;
}

GenId GeneratorSet::measurement_id(Party party, int input, int outcome) const {
  auto it = measurement_lookup_.find({static_cast<int>(party), input, outcome});
  if (it == measurement_lookup_.end()) {
    throw InvalidArgument("GeneratorSet: unknown measurement generator (" +
                          std::to_string(input) + "," + std::to_string(outcome) + ")");
  }
  return it->second;
}

GenId GeneratorSet::node_projector_id(int node, int outcome_label) const {
  auto it = node_lookup_.find({node, outcome_label});
  if (it == node_lookup_.end()) {
    throw InvalidArgument("GeneratorSet: unknown node projector");
  }
  return it->second;
}

GenId GeneratorSet::eve_povm_id(int outcome) const {
  auto it = povm_lookup_.find(outcome);
  if (it == povm_lookup_.end()) {
    throw InvalidArgument("GeneratorSet: unknown POVM generator");
  }
  return it->second;
}

int GeneratorSet::measurement_outcomes(Party party, int input) const {
  auto it = meas_outcomes_.find({static_cast<int>(party), input});
  if (it == meas_outcomes_.end()) {
    throw InvalidArgument("GeneratorSet: unknown measurement family");
  }
  return it->second;
}

int GeneratorSet::measurement_inputs(Party party) const {
  int n = 0;
  for (const auto& [key, cnt] : meas_outcomes_) {
    if (key.first == static_cast<int>(party)) ++n;
  }
  return n;
}

std::vector<GenId> GeneratorSet::ids_of_party(Party party) const {
  std::vector<GenId> out;
  for (GenId id = 0; id < gens_.size(); ++id) {
    if (gens_[id].party == party) out.push_back(id);
  }
  return out;
}

Polynomial GeneratorSet::measurement_polynomial(Party party, int input, int outcome) const {
  int n = measurement_outcomes(party, input);
  if (outcome < 0 || outcome >= n) {
    throw InvalidArgument("measurement_polynomial: outcome out of range");
  }
  Polynomial p;
  if (outcome + 1 < n) {
    p[Word{{measurement_id(party, input, outcome)}}] = 1.0;
    return p;
  }
  p[Word{}] = 1.0;
  for (int a = 0; a + 1 < n; ++a) {
    p[Word{{measurement_id(party, input, a)}}] -= 1.0;
  }
  return p;
}

Polynomial GeneratorSet::eve_povm_polynomial(int outcome) const {
  int n = eve_povm_outcomes_;
  if (n == 0) throw InvalidArgument("eve_povm_polynomial: no POVM registered");
  if (outcome < 0 || outcome >= n) {
    throw InvalidArgument("eve_povm_polynomial: outcome out of range");
  }
  Polynomial p;
  if (outcome + 1 < n) {
    p[Word{{eve_povm_id(outcome)}}] = 1.0;
    return p;
  }
  p[Word{}] = 1.0;
  for (int a = 0; a + 1 < n; ++a) p[Word{{eve_povm_id(a)}}] -= 1.0;
  return p;
}

std::string GeneratorSet::word_name(const Word& w) const {
  if (w.identity()) return "1";
  std::string out;
  for (GenId id : w.gens) {
    if (!out.empty()) out += ".";
    out += gens_[id].name;
  }
  return out;
}

MaybeWord canonicalize(const Word& w, const GeneratorSet& gens) {
  if (!gens.finalized()) throw InvalidArgument("canonicalize: generator set not finalized");
  for (GenId id : w.gens) {
    if (id >= gens.count()) throw InvalidArgument("canonicalize: unknown generator id");
  }
  // Cross-party letters commute, so the word splits into per-party
  // subsequences whose internal order is preserved.
  std::vector<GenId> blocks[3];
  for (GenId id : w.gens) {
    blocks[static_cast<int>(gens.gen(id).party)].push_back(id);
  }
  Word out;
  out.gens.reserve(w.gens.size());
  for (auto& block : blocks) {
    // Stack reduction: idempotence collapses equal neighbours, orthogonal
    // measurement projectors of one family annihilate the word.
    size_t base = out.gens.size();
    for (GenId id : block) {
      if (out.gens.size() > base) {
        GenId top = out.gens.back();
        if (top == id) continue;
        const Generator& a = gens.gen(top);
        const Generator& b = gens.gen(id);
        if (a.family == b.family && a.orthogonal_family && a.outcome != b.outcome) {
          return std::nullopt;
        }
      }
      out.gens.push_back(id);
    }
  }
  return out;
}

MaybeWord multiply(const Word& a, const Word& b, const GeneratorSet& gens) {
  Word prod;
  prod.gens.reserve(a.gens.size() + b.gens.size());
  prod.gens = a.gens;
  prod.gens.insert(prod.gens.end(), b.gens.begin(), b.gens.end());
  return canonicalize(prod, gens);
}

Word adjoint_word(const Word& w, const GeneratorSet& gens) {
  Word rev;
  rev.gens.assign(w.gens.rbegin(), w.gens.rend());
  MaybeWord c = canonicalize(rev, gens);
  if (!c) throw InvalidArgument("adjoint_word: adjoint of a canonical word annihilated");
  return *c;
}

Polynomial poly_identity() {
  Polynomial p;
  p[Word{}] = 1.0;
  return p;
}

Polynomial poly_word(const Word& w) {
  Polynomial p;
  p[w] = 1.0;
  return p;
}

Polynomial poly_scale(const Polynomial& p, double c) {
  Polynomial out;
  for (const auto& [w, v] : p) out[w] = v * c;
  return out;
}

void poly_add(Polynomial& into, const Polynomial& p, double c) {
  for (const auto& [w, v] : p) {
    into[w] += v * c;
    if (into[w] == 0.0) into.erase(w);
  }
}

Polynomial poly_mul(const Polynomial& a, const Polynomial& b,
                    const GeneratorSet& gens) {
  Polynomial out;
  for (const auto& [wa, va] : a) {
    for (const auto& [wb, vb] : b) {
      MaybeWord w = multiply(wa, wb, gens);
      if (!w) continue;
      out[*w] += va * vb;
      if (out[*w] == 0.0) out.erase(*w);
    }
  }
  return out;
}

std::vector<Word> basis(const GeneratorSet& gens, int level,
                        const std::vector<ExtraPattern>& extras) {
  if (level < 1) throw InvalidArgument("basis: level must be >= 1");
  std::set<Word> seen;
  std::vector<Word> out;
  out.push_back(Word{});
  seen.insert(Word{});

  // Every canonical word of length L extends a canonical word of length L-1
  // by one generator, so a breadth-first sweep is exhaustive.
  std::vector<Word> frontier = {Word{}};
  for (int len = 1; len <= level; ++len) {
    std::set<Word> next;
    for (const Word& w : frontier) {
      for (GenId g = 0; g < gens.count(); ++g) {
        MaybeWord c = multiply(w, Word{{g}}, gens);
        if (c && c->length() == len && !seen.count(*c)) next.insert(*c);
      }
    }
    for (const Word& w : next) {
      out.push_back(w);
      seen.insert(w);
    }
    frontier.assign(next.begin(), next.end());
  }

  for (const ExtraPattern& pattern : extras) {
    std::vector<std::vector<GenId>> pools;
    for (Party p : pattern.parties) pools.push_back(gens.ids_of_party(p));
    std::set<Word> added;
    std::vector<size_t> idx(pools.size(), 0);
    if (pools.empty()) continue;
    bool any_empty = false;
    for (auto& pool : pools) any_empty |= pool.empty();
    if (any_empty) continue;
    while (true) {
      Word w;
      for (size_t i = 0; i < pools.size(); ++i) w.gens.push_back(pools[i][idx[i]]);
      MaybeWord c = canonicalize(w, gens);
      if (c && !seen.count(*c)) added.insert(*c);
      size_t i = 0;
      for (; i < pools.size(); ++i) {
        if (++idx[i] < pools[i].size()) break;
        idx[i] = 0;
      }
      if (i == pools.size()) break;
    }
    for (const Word& w : added) {
      out.push_back(w);
      seen.insert(w);
    }
  }
  return out;
}

}  // namespace dicert
