#include "dimkit/counting.hpp"
#include "dimkit/embedding.hpp"
#include "dimkit/gallery.hpp"
#include "oracles.hpp"

#include <doctest.h>

#include <cmath>

using namespace dimkit;

namespace {

Rational R(long long n, long long d) { return make_rational(n, d); }

PointTuple window_points(Point M) {
  PointTuple T;
  for (Point x = 0; x <= M; ++x) T.push_back(x);
  return T;
}

GoodFunctionSpec canonical_spec(const HypothesisClass& H, std::size_t order) {
  return GoodFunctionSpec{canonical_witness(H, DimensionKind::natarajan(), order), std::nullopt};
}

/// Good-function test done literally: every (k+1)-subset U of [0, M(g)] and
/// every witness input on U.
bool brute_is_good(const Witness& w, const Pattern& g, std::size_t q) {
  std::optional<Point> top;
  for (std::size_t x = 0; x < g.size(); ++x)
    if (g[x] != 0) top = x;
  if (!top) return true;
  const std::size_t k1 = w.arity();
  const std::size_t n = *top + 1;
  for (std::uint64_t s = 0; s < (1ULL << n); ++s) {
    if (static_cast<std::size_t>(std::popcount(s)) != k1) continue;
    PointTuple U;
    Pattern gu;
    for (std::size_t i = 0; i < n; ++i)
      if ((s >> i) & 1U) {
        U.push_back(i);
        gu.push_back(g[i]);
      }
    for (const auto& a : oracle::all_patterns(k1, q))
      for (const auto& b : oracle::all_patterns(k1, q)) {
        bool distinct = true;
        for (std::size_t i = 0; i < k1; ++i) distinct = distinct && a[i] != b[i];
        if (distinct && oracle::mix(w.exclude_natarajan(U, a, b).mask, a, b) == gu) return false;
      }
  }
  return true;
}

}  // namespace

TEST_CASE("only the zero function is good for the zero class") {
  const auto H = singleton_zero().cls;
  const auto spec = canonical_spec(H, 0);
  const PointTuple T{0, 1};
  const auto v = good_patterns(spec, T);
  CHECK(v.behaviors.patterns == std::vector<Pattern>{{0, 0}});
  CHECK(v.good_functions == 1);
}

TEST_CASE("v(T) for the padded three-pattern class") {
  const auto H = three_pattern_nat().cls;
  const auto spec = canonical_spec(H, 1);
  const PointTuple T{0, 1};
  const auto v = good_patterns(spec, T);
  for (const auto& p : restrict(H, T).patterns) CHECK(v.behaviors.contains(p));
  CHECK(BigInt(v.behaviors.size()) <= behavior_bound(2, 1, 3));
  CHECK(behavior_bound(2, 1, 3) == 4 * 81);
  CHECK(v.candidate_space == 9);
}

TEST_CASE("augmented ERM") {
  const auto H = three_pattern_nat().cls;
  const auto spec = canonical_spec(H, 1);
  auto r = erm_augmented(spec, {{0, 2}, {1, 2}});
  CHECK(r.risk == 0);
  CHECK(r.hypothesis(0) == 2);
  CHECK(r.hypothesis(1) == 2);
  r = erm_augmented(spec, {{0, 0}, {1, 0}});
  CHECK(r.risk <= R(1, 2));
  const PointTuple T{0, 1};
  const auto v = good_patterns(spec, T);
  CHECK(v.behaviors.contains(r.hypothesis.restrict_to(T)));
  CHECK_THROWS_AS(erm_augmented(spec, {}), Error);

  const auto zero = canonical_spec(singleton_zero().cls, 0);
  r = erm_augmented(zero, {{0, 1}, {3, 0}, {2, 1}});
  CHECK(r.hypothesis == Hypothesis::zero());
  CHECK(r.risk == R(2, 3));
}

TEST_CASE("the agnostic learner is improper and deterministic") {
  const auto H = three_pattern_nat().cls;
  const Learner A = agnostic_learner(canonical_spec(H, 1));
  // No base hypothesis is zero on both points; the zero function is good.
  const LabeledSample S{{0, 0}, {1, 0}};
  const auto h = A(S);
  CHECK(h == A(S));
  CHECK(h == Hypothesis::zero());
  CHECK(empirical_risk(h, S) == 0);
  bool in_base = false;
  for (const auto& b : H.hypotheses()) in_base = in_base || b == h;
  CHECK(!in_base);
}

TEST_CASE("label-bound tables") {
  const auto H = three_pattern_nat().cls;
  auto spec = canonical_spec(H, 1);
  const PointTuple T{0, 2};
  auto bounded = spec;
  bounded.label_bound = std::vector<Label>{2, 2, 2};
  CHECK(bounded_label_patterns(bounded, T).behaviors == good_patterns(spec, T).behaviors);
  bounded.label_bound = std::vector<Label>{1, 1, 1};
  for (const auto& p : bounded_label_patterns(bounded, T).behaviors.patterns)
    for (Label y : p) CHECK(y <= 1);
  bounded.label_bound = std::vector<Label>{0, 1, 2, 2};
  for (Point M = 0; M <= 3; ++M) {
    const PointTuple top{M};
    const auto v = bounded_label_patterns(bounded, top);
    CHECK(v.candidate_space == pow(BigInt((*bounded.label_bound)[M] + 1), M + 1));
  }
  bounded.label_bound = std::vector<Label>{2};
  CHECK_THROWS_AS(bounded_label_patterns(bounded, T), Error);
  bounded.label_bound = std::vector<Label>{2, 1, 2};
  CHECK_THROWS_AS(bounded_label_patterns(bounded, T), Error);
}

TEST_CASE("unbounded alphabets need a label bound") {
  const auto w = Witness::natarajan(
      0, Alphabet::unbounded(), [](auto, auto, auto) { return IndexSet{0, 1}; }, Provenance::User);
  const PointTuple T{0};
  CHECK_THROWS_AS(good_patterns(GoodFunctionSpec{w, std::nullopt}, T), Error);
}

TEST_CASE("realizable enumeration ERM") {
  const auto H = oracle::table_class(3, {{0, 1}, {1, 0}, {2, 2}});
  CHECK(realizable_enumeration_erm(H.enumerator(), {{0, 2}, {1, 2}}, 10) == Hypothesis::table({2, 2}));
  CHECK(realizable_enumeration_erm(H.enumerator(), {{0, 0}}, 10) == Hypothesis::table({0, 1}));
  try {
    realizable_enumeration_erm(H.enumerator(), {{0, 0}, {1, 0}}, 2);
    FAIL("expected Budget");
  } catch (const Error& e) {
    CHECK(e.code() == ErrorCode::Budget);
  }
}

TEST_CASE("property: augmented behaviors on random bases") {
  oracle::ClassGen gen(61);
  int bases = 0;
  while (bases < 12) {
    const std::size_t q = gen.uniform(2, 3);
    const std::size_t n = gen.uniform(2, 4);
    std::vector<Hypothesis> hs;
    for (const auto& t : gen.tables(n, q, 6)) {
      Hypothesis::Support s;
      for (std::size_t x = 0; x < n; ++x)
        if (t(x)) s[x] = t(x);
      hs.push_back(Hypothesis::finite_support(s));
    }
    std::sort(hs.begin(), hs.end());
    hs.erase(std::unique(hs.begin(), hs.end()), hs.end());
    const auto H = HypothesisClass::explicit_class(Alphabet::bounded(q), std::nullopt, hs);
    const std::size_t k = exact_dimension(H, DimensionKind::natarajan(), n - 1).dimension;
    if (k == 0 || k > 2) continue;
    ++bases;
    const auto spec = canonical_spec(H, k);
    const AugmentedClass aug(spec);
    const Point M = 4;
    const auto good = aug.good_functions(M);
    // Every reported good function passes the literal definition.
    for (const auto& g : *good) CHECK(brute_is_good(spec.witness, g, q));
    // And every candidate that passes it is reported.
    std::size_t literal = 0;
    for (const auto& g : oracle::all_patterns(M + 1, q)) literal += brute_is_good(spec.witness, g, q);
    CHECK(literal == good->size());

    const auto all = window_points(M);
    const auto v = aug.behaviors(all);
    const auto vH = HypothesisClass::explicit_class(Alphabet::bounded(q), M + 1, [&] {
      std::vector<Hypothesis> out;
      for (const auto& p : v.behaviors.patterns) out.push_back(Hypothesis::table(p));
      return out;
    }());
    CHECK(exact_dimension(vH, DimensionKind::natarajan()).dimension <= k + 1);
    CHECK(BigInt(v.behaviors.size()) <= behavior_bound(M + 1, k, q));
    for (const auto& p : restrict(H, all).patterns) CHECK(v.behaviors.contains(p));

    // Truncation closure.
    for (const auto& p : v.behaviors.patterns)
      for (Point Mp = 0; Mp < M; ++Mp) {
        Pattern t = p;
        std::fill(t.begin() + static_cast<std::ptrdiff_t>(Mp) + 1, t.end(), 0);
        CHECK(v.behaviors.contains(t));
        const auto smaller = aug.behaviors(window_points(Mp));
        CHECK(smaller.behaviors.contains(Pattern(p.begin(), p.begin() + static_cast<std::ptrdiff_t>(Mp) + 1)));
      }

    // ERM optimality against a direct minimum over v(T).
    for (int s = 0; s < 10; ++s) {
      LabeledSample S;
      const std::size_t len = gen.uniform(1, 5);
      for (std::size_t i = 0; i < len; ++i)
        S.push_back({gen.uniform(0, M), static_cast<Label>(gen.uniform(0, q - 1))});
      const PointTuple T = sample_points(S);
      const auto vT = aug.behaviors(T);
      Rational best = 1;
      for (const auto& p : vT.behaviors.patterns) {
        long long wrong = 0;
        for (const auto& e : S) {
          const auto idx = std::find(T.begin(), T.end(), e.x) - T.begin();
          wrong += p[static_cast<std::size_t>(idx)] != e.y;
        }
        best = std::min(best, R(wrong, static_cast<long long>(S.size())));
      }
      const auto r = aug.erm(S);
      CHECK(r.risk == best);
      CHECK(empirical_risk(r.hypothesis, S) == r.risk);
    }
  }
}

TEST_CASE("property: psi-flavored augmentation stays below order + 1") {
  const auto H = three_pattern_nat().cls;
  for (const auto& family : {make_psi_N(3), make_psi_G(3)}) {
    const auto kind = DimensionKind::psi(family);
    const std::size_t k = exact_dimension(H, kind).dimension;
    const GoodFunctionSpec spec{canonical_witness(H, kind, k), std::nullopt};
    const AugmentedClass aug(spec);
    const auto all = window_points(4);
    const auto v = aug.behaviors(all);
    std::vector<Hypothesis> hs;
    for (const auto& p : v.behaviors.patterns) hs.push_back(Hypothesis::table(p));
    const auto vH = HypothesisClass::explicit_class(Alphabet::bounded(3), 5, hs);
    CHECK(exact_dimension(vH, kind).dimension <= k + 1);
    for (const auto& p : restrict(H, all).patterns) CHECK(v.behaviors.contains(p));
  }
}

TEST_CASE("min_kb") {
  CHECK(min_kb(1, 3) == 14);
  CHECK(min_kb(0, 2) == 5);
  CHECK_THROWS_AS(min_kb(0, 1), Error);
  for (std::size_t q = 2; q <= 4; ++q)
    for (std::size_t k = 0; k < 3; ++k) CHECK(min_kb(k + 1, q) >= min_kb(k, q));
}

TEST_CASE("counting inequality holds at the witness order") {
  for (std::size_t kN = 0; kN <= 2; ++kN)
    for (std::size_t q = 2; q <= 4; ++q) {
      const auto c = counting_inequality(kN, q);
      CHECK(c.holds);
      CHECK(c.order + 1 == c.k_B);
      if (c.order > 0) {
        const double d = static_cast<double>(c.order);
        CHECK(d / (std::log2(d) + 2 * std::log2(static_cast<double>(q))) <= static_cast<double>(kN + 1) + 1e-12);
      }
    }
}

TEST_CASE("psi witness from the zero class") {
  const auto H = singleton_zero().cls;
  const auto wN = canonical_witness(H, DimensionKind::natarajan(), 0);
  const auto w = psi_witness_from_natarajan(wN, make_psi_G(2));
  CHECK(w.order() == 4);
  CHECK(w.provenance() == Provenance::FromCounting);
  const PointTuple T{0, 1, 2, 3, 4};
  const std::vector<std::size_t> members(5, 0);
  // psi_0 maps the zero labels to 1, so the first absent pattern is 00000.
  CHECK(w.exclude_psi(T, members).bits == 0);
  const auto rep = validate_witness(w, H, 5);
  CHECK(rep.valid());
  CHECK(rep.checked_inputs == 6 * 32);
}
