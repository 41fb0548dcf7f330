#pragma once

// Free *-algebra over Hermitian projector generators with the rewrite
// relations of a Bell scenario: generators attached to different parties
// commute, every generator is idempotent, and projectors of one measurement
// family with different outcomes annihilate. Words are kept in a canonical
// form (Alice block, Bob block, Eve block; within a block the original
// non-commutative order) so that equal operators share one representation.

#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "common.hpp"

namespace dicert {

enum class Party : uint8_t { Alice = 0, Bob = 1, Eve = 2 };

using GenId = uint8_t;

struct Generator {
  Party party = Party::Alice;
  int input = 0;     // measurement setting; 0 for Eve-side families
  int outcome = 0;   // outcome label
  int node = -1;     // integration node for node projectors, -1 otherwise
  int family = 0;    // orthogonality class
  bool orthogonal_family = false;  // same family + different outcome => 0
  std::string name;
};

// Ordered, canonical generator sequence; the empty word is the identity.
struct Word {
  std::vector<GenId> gens;

  bool identity() const { return gens.empty(); }
  int length() const { return static_cast<int>(gens.size()); }
  bool operator==(const Word& o) const { return gens == o.gens; }
  bool operator<(const Word& o) const {
    if (gens.size() != o.gens.size()) return gens.size() < o.gens.size();
    return gens < o.gens;
  }
};

// nullopt encodes the Zero word (an annihilated product).
using MaybeWord = std::optional<Word>;

// Real-linear combination of canonical words; the identity word carries the
// scalar part.
using Polynomial = std::map<Word, double>;

class GeneratorSet {
 public:
  // Projective measurement with `n_outcomes` outcomes; the last outcome is
  // eliminated (it enters polynomials as identity minus the sum), so this
  // registers n_outcomes - 1 generators.
  void add_measurement(Party party, int input, int n_outcomes);

  // Free Eve-side projector (one per integration node and outcome label); no
  // orthogonality or completeness is assumed between them.
  void add_node_projector(int node, int outcome_label);

  // Eve-side projective POVM used for guessing-probability objectives:
  // orthogonal family summing to identity, last outcome eliminated.
  void add_eve_povm(int n_outcomes);

  // Sorts generators into the canonical id order (party, input, outcome,
  // node) and builds lookup tables. Must be called once after registration.
  void finalize();

  int count() const { return static_cast<int>(gens_.size()); }
  const Generator& gen(GenId id) const { return gens_[id]; }
  bool finalized() const { return finalized_; }

  // Retained-outcome lookup; throws InvalidArgument for eliminated or unknown
  // coordinates.
  GenId measurement_id(Party party, int input, int outcome) const;
  GenId node_projector_id(int node, int outcome_label) const;
  GenId eve_povm_id(int outcome) const;

  int measurement_outcomes(Party party, int input) const;
  int measurement_inputs(Party party) const;
  int eve_povm_outcomes() const { return eve_povm_outcomes_; }

  std::vector<GenId> ids_of_party(Party party) const;

  // Operator of outcome `outcome` of measurement (party, input) as a
  // polynomial, expanding the eliminated last outcome.
  Polynomial measurement_polynomial(Party party, int input, int outcome) const;
  Polynomial eve_povm_polynomial(int outcome) const;

  std::string word_name(const Word& w) const;

 private:
  struct Registration {
    Generator gen;
  };
  std::vector<Generator> gens_;
  std::map<std::tuple<int, int, int>, GenId> measurement_lookup_;  // party,input,outcome
  std::map<std::pair<int, int>, GenId> node_lookup_;               // node,outcome
  std::map<int, GenId> povm_lookup_;                               // outcome
  std::map<std::pair<int, int>, int> meas_outcomes_;               // party,input -> count
  int eve_povm_outcomes_ = 0;
  int next_family_ = 0;
  bool finalized_ = false;
};

// Fixed point of the rewriting rules; deterministic. Throws InvalidArgument
// if the word references a generator outside the set.
MaybeWord canonicalize(const Word& w, const GeneratorSet& gens);

// canonicalize(a * b)
MaybeWord multiply(const Word& a, const Word& b, const GeneratorSet& gens);

// Reversal followed by canonicalization (all generators are Hermitian).
// Never annihilates a canonical nonzero word.
Word adjoint_word(const Word& w, const GeneratorSet& gens);

Polynomial poly_identity();
Polynomial poly_word(const Word& w);
Polynomial poly_scale(const Polynomial& p, double c);
void poly_add(Polynomial& into, const Polynomial& p, double c = 1.0);
Polynomial poly_mul(const Polynomial& a, const Polynomial& b,
                    const GeneratorSet& gens);

// Basis-extension pattern: one retained generator per listed party, in order.
// {Alice, Bob, Eve} is the M*N*P extension.
struct ExtraPattern {
  std::vector<Party> parties;
};

// All distinct canonical nonzero words of length <= level, identity first,
// in deterministic (length, lexicographic) order, followed by the canonical
// instances of each extra pattern that are not already present.
std::vector<Word> basis(const GeneratorSet& gens, int level,
                        const std::vector<ExtraPattern>& extras = {});

}  // namespace dicert
