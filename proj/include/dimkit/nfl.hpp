#pragma once

#include "dimkit/combinatorics.hpp"
#include "dimkit/core.hpp"

#include <functional>
#include <string>
#include <vector>

namespace dimkit {

/// A deterministic learner: the same sample always yields the same hypothesis.
struct Learner {
  std::string name;
  std::function<Hypothesis(const LabeledSample&)> fit;

  Hypothesis operator()(const LabeledSample& S) const { return fit(S); }
};

Learner constant_learner(Label value);
/// Predicts the first label seen for a sample point, `fallback` elsewhere.
Learner memorizing_learner(Label fallback);
/// ERM over an explicit class; ties go to the first minimizer in canonical order.
Learner erm_learner(HypothesisClass H);

struct ExpectedRisk {
  Rational expected;
  /// Risk of A(S_j) for every one of the (2m)^m sequences, in lexicographic order.
  std::vector<Rational> per_sample;
  /// Fraction of sequences whose risk is at least 1/8.
  Rational tail;
};

/// Exact E_{S ~ D^m}[R_D(A(S))] for D uniform on the graph of f over X.
ExpectedRisk exact_expected_risk(const Learner& A, std::span<const Point> X, const Pattern& f, std::size_t m);

struct AdversaryReport {
  Labeling f;
  IndexSet I;  // coordinates where f follows g1
  FiniteDistribution D;
  Rational expected_risk;
  Rational tail_probability;
  std::size_t mixtures_examined = 0;
  /// Set if the exact tail is below 1/7 although the expectation reached 1/4.
  bool tail_below_markov = false;
};

/// Scans the mixtures f_I of (g1, g2) over X (|X| = 2m) with I in increasing
/// bitmask order and returns the first whose expected risk reaches 1/4.
/// Throws NflFailure if none does.
AdversaryReport nfl_adversary(const Learner& A, std::span<const Point> X, const Pattern& g1, const Pattern& g2,
                              SearchOptions options = {});

}  // namespace dimkit
