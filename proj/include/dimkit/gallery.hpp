#pragma once

#include "dimkit/core.hpp"
#include "dimkit/psi.hpp"
#include "dimkit/witness.hpp"

#include <map>
#include <optional>
#include <string>
#include <vector>

namespace dimkit {

struct ExpectedDimension {
  std::string kind;  // vc, natarajan, graph, ds
  std::size_t value = 0;
  /// "construction" when the value follows from how the class is built,
  /// "search" when it was found by exhaustive search.
  std::string source;
};

struct GalleryEntry {
  std::string name;
  std::string description;
  HypothesisClass cls;
  std::vector<ExpectedDimension> expected;
  std::optional<Witness> witness;
  std::map<std::string, long long> params;
};

/// Y^[n] with q labels.
HypothesisClass full_class(std::size_t n, std::size_t q);
GalleryEntry full_entry(std::size_t n, std::size_t q);

/// {h_A : A subset of [m]} with h_A(x) = code(A) on A and * elsewhere. Label
/// code(A) is the bitmask of A and * is 2^m, so q = 2^m + 1. Natarajan
/// dimension 1, graph dimension m; bundles an order-1 Natarajan witness.
GalleryEntry gap_class(std::size_t m);
/// Label of the * symbol in gap_class(m).
inline Label gap_star(std::size_t m) { return static_cast<Label>(1U << m); }

/// The 6-cycle {12,32,34,54,56,16} with labels shifted down by one.
GalleryEntry six_cycle();
/// {(0,1),(1,0),(2,2)} on [2].
GalleryEntry three_pattern();
/// The same three hypotheses as finite-support functions over N.
GalleryEntry three_pattern_nat();
/// {h = 0} over N with two labels.
GalleryEntry singleton_zero();
/// failing_psi_class(family, window) with its order-1 witness.
GalleryEntry failing_psi_entry(const PsiFamily& family, Point window);

/// Names accepted by gallery_lookup.
std::vector<std::string> gallery_names();
/// Builds an entry by name. Params: full {n, labels}, gap {m}, failing_psi
/// {window} (family defaults to the indicator of label 0 over 3 labels).
GalleryEntry gallery_lookup(const std::string& name, const std::map<std::string, long long>& params,
                            const std::optional<PsiFamily>& family = std::nullopt);

}  // namespace dimkit
