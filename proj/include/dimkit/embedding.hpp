#pragma once

#include "dimkit/combinatorics.hpp"
#include "dimkit/core.hpp"
#include "dimkit/nfl.hpp"
#include "dimkit/witness.hpp"

#include <memory>
#include <optional>
#include <vector>

namespace dimkit {

/// Good functions: finite-support g such that on every (k+1)-set U below M(g),
/// g|_U avoids every output the witness excludes on U.
struct GoodFunctionSpec {
  /// Natarajan or psi flavor.
  Witness witness;
  /// c(n): on the window [0, n] labels are drawn from {0, ..., c(n)}. Nondecreasing.
  std::optional<std::vector<Label>> label_bound;
};

struct GoodPatterns {
  /// v(T).
  BehaviorSet behaviors;
  /// max(T).
  Point window_top = 0;
  /// Labels considered on [0, window_top].
  std::size_t label_count = 0;
  /// label_count^(window_top + 1).
  BigInt candidate_space;
  /// Good functions g with M(g) <= window_top (the zero function included).
  std::size_t good_functions = 0;
};

struct ErmResult {
  Hypothesis hypothesis;
  Rational risk;
};

/// H' = H u G viewed through its good functions, with memoized enumeration.
/// Copies share the cache; safe for concurrent use.
class AugmentedClass {
 public:
  explicit AugmentedClass(GoodFunctionSpec spec, SearchOptions options = {});

  const GoodFunctionSpec& spec() const noexcept;
  /// Labels considered on the window [0, M].
  std::size_t label_count(Point M) const;
  /// Good functions with M(g) <= M as patterns on [0, M], ascending.
  std::shared_ptr<const std::vector<Pattern>> good_functions(Point M) const;
  GoodPatterns behaviors(std::span<const Point> T) const;
  /// Minimum empirical risk over good functions on [0, max point of S]. Ties go
  /// to the smallest pattern on the sample points, then the smallest function.
  ErmResult erm(const LabeledSample& S) const;
  /// Oracle class over N whose behaviors are v(T).
  HypothesisClass as_class() const;

 private:
  struct State;
  std::shared_ptr<State> state_;
};

GoodPatterns good_patterns(const GoodFunctionSpec& spec, std::span<const Point> T, SearchOptions options = {});
/// good_patterns for a spec with a label-bound table; the table must cover max(T).
GoodPatterns bounded_label_patterns(const GoodFunctionSpec& spec, std::span<const Point> T,
                                    SearchOptions options = {});
ErmResult erm_augmented(const GoodFunctionSpec& spec, const LabeledSample& S);
/// S -> erm_augmented(spec, S).hypothesis, with a shared good-function cache.
Learner agnostic_learner(const GoodFunctionSpec& spec);
HypothesisClass augmented_class(const GoodFunctionSpec& spec);

/// First enumerated hypothesis with zero empirical risk on S. Throws Budget
/// after `budget` candidates, Precondition if the stream ends first.
Hypothesis realizable_enumeration_erm(const HypothesisClass::Enumerator& enumerator, const LabeledSample& S,
                                      std::size_t budget);

/// (points)^(order+1) q^(2(order+1)): the cap on |v(T)| for a window of `points` points.
BigInt behavior_bound(std::size_t points, std::size_t order, std::size_t q);

/// Smallest m with m >= 2 ln(2N/delta) / eps^2: uniform convergence to eps/2
/// over N behaviors with probability 1 - delta, so ERM is eps-optimal.
std::size_t uniform_convergence_sample_size(const BigInt& behaviors, double eps, double delta);

}  // namespace dimkit
