#pragma once

#include "dimkit/combinatorics.hpp"
#include "dimkit/core.hpp"
#include "dimkit/psi.hpp"
#include "dimkit/witness.hpp"

#include <map>
#include <string>
#include <vector>

namespace dimkit {

/// All functions [0, window] -> {y1, y2} for a pair (y1, y2) no member of the
/// family separates, with witnesses that map psi to b xor 1 where psi sends
/// {y1, y2} into {b, *}.
struct FailingPsi {
  Label y1 = 0;
  Label y2 = 0;
  HypothesisClass cls;
  /// One point per input (order 0).
  Witness point_witness;
  /// Two points per input (order 1), the rule applied coordinatewise.
  Witness pair_witness;
};

/// Precondition error if the family is a distinguisher.
FailingPsi failing_psi_class(const PsiFamily& family, Point window);

enum class DsVerdict { Refuted, NotRefuted, Vacuous };
std::string_view to_string(DsVerdict v);

struct DsRefutationEntry {
  PsiFunction psi1;
  PsiFunction psi2;
  /// Every 4-element subclass with DS dimension 1 that (psi1, psi2) shatters.
  std::vector<std::vector<Pattern>> subclasses;
};

struct DsRefutation {
  DsVerdict verdict = DsVerdict::Vacuous;
  std::uint64_t pairs_examined = 0;
  std::uint64_t shattering_pairs = 0;
  /// One entry per shattering pair, in lexicographic pair order.
  std::vector<DsRefutationEntry> entries;
  /// For each qualifying subclass, the number of shattering pairs listing it.
  std::map<std::vector<Pattern>, std::uint64_t> subclass_counts;
  /// First shattering pair without any qualifying subclass.
  std::optional<std::pair<PsiFunction, PsiFunction>> unrefuted_pair;
};

/// Exhausts all pairs of psi functions over the class alphabet. H must be an
/// explicit class on 2 points with DS dimension 2.
DsRefutation refute_ds_expressibility(const HypothesisClass& H, SearchOptions options = {});

}  // namespace dimkit
