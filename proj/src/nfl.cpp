#include "dimkit/nfl.hpp"

#include <algorithm>
#include <mutex>
#include <set>

namespace dimkit {

Learner constant_learner(Label value) {
  return Learner{"const:" + std::to_string(value),
                 [value](const LabeledSample&) { return Hypothesis::patched_constant(value, {}); }};
}

Learner memorizing_learner(Label fallback) {
  return Learner{"memorize:" + std::to_string(fallback), [fallback](const LabeledSample& S) {
                   Hypothesis::Support seen;
                   for (const auto& e : S) seen.emplace(e.x, e.y);  // first label wins
                   return Hypothesis::patched_constant(fallback, std::move(seen));
                 }};
}

Learner erm_learner(HypothesisClass H) {
  if (H.hypotheses().empty()) throw Error(ErrorCode::Precondition, "ERM over an empty class");
  return Learner{"erm", [H](const LabeledSample& S) {
                   const auto& hs = H.hypotheses();
                   std::size_t best = 0;
                   std::size_t best_mistakes = S.size() + 1;
                   for (std::size_t i = 0; i < hs.size(); ++i) {
                     std::size_t mistakes = 0;
                     for (const auto& e : S)
                       if (hs[i](e.x) != e.y) ++mistakes;
                     if (mistakes < best_mistakes) {
                       best = i;
                       best_mistakes = mistakes;
                       if (mistakes == 0) break;
                     }
                   }
                   return hs[best];
                 }};
}

namespace {

constexpr std::size_t kMaxSequences = 10'000'000;

void check_points(std::span<const Point> X) {
  std::set<Point> seen(X.begin(), X.end());
  if (seen.size() != X.size()) throw Error(ErrorCode::Precondition, "points must be distinct");
}

}  // namespace

ExpectedRisk exact_expected_risk(const Learner& A, std::span<const Point> X, const Pattern& f, std::size_t m) {
  if (m == 0) throw Error(ErrorCode::Precondition, "sample size must be positive");
  if (X.size() != 2 * m) throw Error(ErrorCode::Arity, "need exactly 2m points");
  if (f.size() != X.size()) throw Error(ErrorCode::Arity, "labeling arity differs from point count");
  check_points(X);
  const std::size_t n = X.size();
  BigInt total_sequences = pow(BigInt(n), m);
  if (total_sequences > kMaxSequences)
    throw Error(ErrorCode::Budget, "(2m)^m = " + total_sequences.str() + " sample sequences is too many");

  ExpectedRisk out;
  std::vector<std::size_t> radices(m, n);
  std::size_t mistakes_sum = 0;
  std::size_t in_tail = 0;
  std::size_t count = 0;
  LabeledSample S(m);
  for_each_tuple(radices, [&](std::span<const std::size_t> idx) {
    for (std::size_t j = 0; j < m; ++j) S[j] = Example{X[idx[j]], f[idx[j]]};
    const Hypothesis h = A(S);
    std::size_t mistakes = 0;
    for (std::size_t i = 0; i < n; ++i) {
      Label y;
      try {
        y = h(X[i]);
      } catch (const Error& e) {
        if (e.code() != ErrorCode::Domain) throw;
        throw Error(ErrorCode::LearnerContract,
                    "learner " + A.name + " output cannot be evaluated at point " + std::to_string(X[i]));
      }
      if (y != f[i]) ++mistakes;
    }
    mistakes_sum += mistakes;
    if (8 * mistakes >= n) ++in_tail;  // risk mistakes/n >= 1/8
    out.per_sample.emplace_back(BigInt(mistakes), BigInt(n));
    ++count;
    return true;
  });
  out.expected = Rational(BigInt(mistakes_sum), BigInt(n) * count);
  out.tail = Rational(BigInt(in_tail), BigInt(count));
  return out;
}

AdversaryReport nfl_adversary(const Learner& A, std::span<const Point> X, const Pattern& g1, const Pattern& g2,
                              SearchOptions options) {
  if (X.empty() || X.size() % 2 != 0) throw Error(ErrorCode::Arity, "adversary needs 2m points with m >= 1");
  if (g1.size() != X.size() || g2.size() != X.size())
    throw Error(ErrorCode::Arity, "labelings must match the point count");
  if (X.size() > kMaxArity) throw Error(ErrorCode::Budget, "too many points for mixture enumeration");
  for (std::size_t i = 0; i < X.size(); ++i)
    if (g1[i] == g2[i])
      throw Error(ErrorCode::Precondition, "g1 and g2 agree at coordinate " + std::to_string(i));
  check_points(X);

  const std::size_t n = X.size();
  const std::size_t m = n / 2;
  const std::size_t mixtures = std::size_t{1} << n;
  const Rational quarter = make_rational(1, 4);

  std::mutex mu;
  std::vector<std::pair<std::size_t, ExpectedRisk>> hits;
  auto hit = parallel_find_first(mixtures, options.threads, [&](std::size_t mask) {
    const IndexSet I{mask, n};
    ExpectedRisk r = exact_expected_risk(A, X, mixture(I, g1, g2), m);
    if (r.expected < quarter) return false;
    std::lock_guard lock(mu);
    hits.emplace_back(mask, std::move(r));
    return true;
  });
  if (!hit)
    throw Error(ErrorCode::NflFailure, "no mixture reaches expected risk 1/4 against learner " + A.name);

  auto it = std::find_if(hits.begin(), hits.end(), [&](const auto& p) { return p.first == *hit; });
  const IndexSet I{*hit, n};
  Labeling f{PointTuple(X.begin(), X.end()), mixture(I, g1, g2)};
  std::vector<Example> graph;
  for (std::size_t i = 0; i < n; ++i) graph.push_back(Example{X[i], f.values[i]});

  AdversaryReport report{f, I, FiniteDistribution::uniform(graph), it->second.expected, it->second.tail,
                         *hit + 1, false};
  report.tail_below_markov = report.tail_probability < make_rational(1, 7);
  return report;
}

}  // namespace dimkit
