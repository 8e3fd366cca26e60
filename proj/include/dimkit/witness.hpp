#pragma once

#include "dimkit/combinatorics.hpp"
#include "dimkit/core.hpp"
#include "dimkit/dimensions.hpp"
#include "dimkit/nfl.hpp"
#include "dimkit/psi.hpp"

#include <functional>
#include <optional>
#include <string>
#include <vector>

namespace dimkit {

enum class Provenance { Canonical, FromLearner, FromCounting, GapConstruction, FailingPsi, User };

std::string_view to_string(Provenance p);

/// An order-k certificate that no (k+1)-point set is shattered: for every
/// input it names an output the class does not realize.
///
/// Rules see inputs with points sorted ascending (labels permuted to match);
/// the exclude_* entry points do the sorting and map outputs back.
class Witness {
 public:
  using NatarajanRule =
      std::function<IndexSet(std::span<const Point> X, std::span<const Label> g1, std::span<const Label> g2)>;
  using GraphRule = std::function<IndexSet(std::span<const Point> X, std::span<const Label> f)>;
  /// `members` index into the family.
  using PsiRule = std::function<BinaryPattern(std::span<const Point> X, std::span<const std::size_t> members)>;

  static Witness natarajan(std::size_t order, Alphabet alphabet, NatarajanRule rule, Provenance provenance);
  static Witness graph(std::size_t order, Alphabet alphabet, GraphRule rule, Provenance provenance);
  static Witness psi(std::size_t order, PsiFamily family, PsiRule rule, Provenance provenance);

  /// Natarajan, Graph or Psi(family).
  const DimensionKind& kind() const noexcept { return kind_; }
  std::size_t order() const noexcept { return order_; }
  std::size_t arity() const noexcept { return order_ + 1; }
  const Alphabet& alphabet() const noexcept { return alphabet_; }
  Provenance provenance() const noexcept { return provenance_; }

  /// I such that f_{I,g1,g2} is claimed absent from H|_X.
  IndexSet exclude_natarajan(std::span<const Point> X, std::span<const Label> g1, std::span<const Label> g2) const;
  /// I such that no hypothesis agrees with f exactly on I.
  IndexSet exclude_graph(std::span<const Point> X, std::span<const Label> f) const;
  /// Binary pattern claimed absent from psi-bar(H|_X).
  BinaryPattern exclude_psi(std::span<const Point> X, std::span<const std::size_t> members) const;

 private:
  Witness(DimensionKind kind, std::size_t order, Alphabet alphabet, Provenance provenance)
      : kind_(std::move(kind)), order_(order), alphabet_(alphabet), provenance_(provenance) {}

  DimensionKind kind_;
  std::size_t order_;
  Alphabet alphabet_;
  Provenance provenance_;
  NatarajanRule natarajan_;
  GraphRule graph_;
  PsiRule psi_;
};

struct Violation {
  PointTuple points;
  /// Human-readable input, e.g. "g1=(0,0) g2=(1,1)".
  std::string input;
  std::string output;
  /// A realized pattern on `points` that matches the claimed exclusion, if any.
  std::optional<Pattern> realized;
  std::string message;
};

struct WitnessReport {
  std::uint64_t checked_inputs = 0;
  std::uint64_t violation_count = 0;
  /// First violations in input order (at most kMaxReportedViolations).
  std::vector<Violation> violations;
  bool valid() const noexcept { return violation_count == 0; }
};

inline constexpr std::size_t kMaxReportedViolations = 100;

/// Checks the exclusion property on every valid input with points in [0, window].
/// Shattered and WitnessViolation errors raised by the evaluator count as violations.
WitnessReport validate_witness(const Witness& w, const HypothesisClass& H, Point window, SearchOptions options = {});

/// First missing output in lexicographic order: mixtures f_I ordered by the
/// labeling they induce, graph index sets by bitmask, psi patterns with
/// coordinate 0 most significant. Raises Shattered on a shattered input.
Witness canonical_witness(const HypothesisClass& H, const DimensionKind& kind, std::size_t order);

/// Order 2m-1 Natarajan witness: runs the NFL adversary on (X, g1, g2) and
/// returns the adversary's I. With `check`, an output realized by the class
/// raises WitnessViolation.
Witness witness_from_learner(const Learner& A, std::size_t m, Alphabet alphabet,
                             std::optional<HypothesisClass> check = std::nullopt, SearchOptions options = {});

struct PacCheck {
  bool learns = true;
  std::uint64_t targets_checked = 0;
  /// First realizable target whose tail Pr[risk >= 1/8] reaches 1/7.
  std::optional<Labeling> counterexample;
  Rational counterexample_tail;
};

/// Whether A has Pr[risk >= 1/8] < 1/7 from m samples for every distribution
/// uniform on the graph of some h in H restricted to 2m points of [0, window].
PacCheck pac_check_on_graphs(const Learner& A, const HypothesisClass& H, std::size_t m, Point window);

}  // namespace dimkit
