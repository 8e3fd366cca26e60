#include "dimkit/gallery.hpp"

#include "dimkit/psi_constructions.hpp"

#include <set>

namespace dimkit {

namespace {

constexpr std::size_t kMaxExplicit = std::size_t{1} << 20;

HypothesisClass table_class(std::size_t q, std::size_t n, const std::vector<Pattern>& rows) {
  std::vector<Hypothesis> hs;
  for (const auto& r : rows) hs.push_back(Hypothesis::table(r));
  return HypothesisClass::explicit_class(Alphabet::bounded(q), n, std::move(hs));
}

}  // namespace

HypothesisClass full_class(std::size_t n, std::size_t q) {
  if (q == 0) throw Error(ErrorCode::Precondition, "need at least one label");
  BigInt size = pow(BigInt(q), n);
  if (size > kMaxExplicit) throw Error(ErrorCode::Budget, "full class would have " + size.str() + " hypotheses");
  std::vector<Pattern> rows;
  for_each_tuple(std::vector<std::size_t>(n, q), [&](std::span<const std::size_t> t) {
    rows.emplace_back(t.begin(), t.end());
    return true;
  });
  return table_class(q, n, rows);
}

GalleryEntry full_entry(std::size_t n, std::size_t q) {
  const std::size_t d = q >= 2 ? n : 0;
  GalleryEntry e{"full", "every function from [n] to q labels", full_class(n, q), {}, std::nullopt,
                 {{"n", static_cast<long long>(n)}, {"labels", static_cast<long long>(q)}}};
  e.expected = {{"natarajan", d, "construction"}, {"graph", d, "construction"}, {"ds", d, "construction"}};
  if (q == 2) e.expected.push_back({"vc", d, "construction"});
  return e;
}

GalleryEntry gap_class(std::size_t m) {
  if (m == 0 || m > 10) throw Error(ErrorCode::Budget, "gap class needs 1 <= m <= 10");
  const Label star = gap_star(m);
  std::vector<Pattern> rows;
  for (Label A = 0; A < star; ++A) {
    Pattern h(m);
    for (std::size_t x = 0; x < m; ++x) h[x] = ((A >> x) & 1U) ? A : star;
    rows.push_back(std::move(h));
  }
  auto rule = [star](std::span<const Point> X, std::span<const Label> y, std::span<const Label> yp) {
    std::set<Label> named;
    for (Label v : {y[0], y[1], yp[0], yp[1]})
      if (v != star) named.insert(v);
    Pattern target;
    if (named.size() > 1) {
      // Two different sets on the two points: no h_C carries both.
      for (Label u : {y[0], yp[0]})
        for (Label v : {y[1], yp[1]})
          if (target.empty() && u != star && v != star && u != v) target = {u, v};
    } else {
      // Each coordinate offers {A, *}. (*, A) needs x1 outside A, (A, *) needs x1 inside.
      const Label A = *named.begin();
      const bool x1_in_A = (A >> X[0]) & 1U;
      target = x1_in_A ? Pattern{star, A} : Pattern{A, star};
    }
    std::uint64_t mask = 0;
    for (std::size_t i = 0; i < 2; ++i)
      if (target[i] == y[i]) mask |= std::uint64_t{1} << i;
    return IndexSet{mask, 2};
  };
  GalleryEntry e{"gap",
                 "h_A(x) = code(A) on A, * elsewhere, over all A in [m]",
                 table_class(static_cast<std::size_t>(star) + 1, m, rows),
                 {{"natarajan", 1, "construction"}, {"graph", m, "construction"}},
                 Witness::natarajan(1, Alphabet::bounded(static_cast<std::size_t>(star) + 1), rule,
                                    Provenance::GapConstruction),
                 {{"m", static_cast<long long>(m)}}};
  return e;
}

GalleryEntry six_cycle() {
  const std::vector<Pattern> rows{{0, 1}, {2, 1}, {2, 3}, {4, 3}, {4, 5}, {0, 5}};
  return GalleryEntry{"six_cycle",
                      "6-cycle pseudo-cube on 2 points, labels 0..5",
                      table_class(6, 2, rows),
                      {{"ds", 2, "search"}, {"natarajan", 1, "search"}, {"graph", 2, "search"}},
                      std::nullopt,
                      {}};
}

GalleryEntry three_pattern() {
  return GalleryEntry{"three_pattern",
                      "{(0,1),(1,0),(2,2)} on 2 points",
                      table_class(3, 2, {{0, 1}, {1, 0}, {2, 2}}),
                      {{"natarajan", 1, "search"}, {"graph", 1, "search"}, {"ds", 1, "search"}},
                      std::nullopt,
                      {}};
}

GalleryEntry three_pattern_nat() {
  std::vector<Hypothesis> hs{Hypothesis::finite_support({{1, 1}}), Hypothesis::finite_support({{0, 1}}),
                             Hypothesis::finite_support({{0, 2}, {1, 2}})};
  return GalleryEntry{"three_pattern_nat",
                      "{(0,1),(1,0),(2,2)} extended by 0 over N",
                      HypothesisClass::explicit_class(Alphabet::bounded(3), std::nullopt, std::move(hs)),
                      {{"natarajan", 1, "search"}, {"graph", 1, "search"}, {"ds", 1, "search"}},
                      std::nullopt,
                      {}};
}

GalleryEntry singleton_zero() {
  return GalleryEntry{"singleton_zero",
                      "the zero function over N, two labels",
                      HypothesisClass::explicit_class(Alphabet::bounded(2), std::nullopt, {Hypothesis::zero()}),
                      {{"natarajan", 0, "construction"}, {"graph", 0, "construction"}, {"ds", 0, "construction"},
                       {"vc", 0, "construction"}},
                      std::nullopt,
                      {}};
}

GalleryEntry failing_psi_entry(const PsiFamily& family, Point window) {
  FailingPsi f = failing_psi_class(family, window);
  const std::size_t d = static_cast<std::size_t>(window) + 1;
  return GalleryEntry{"failing_psi",
                      "all functions into a pair of labels the family cannot separate",
                      f.cls,
                      {{"graph", d, "construction"}, {"natarajan", d, "construction"}},
                      f.pair_witness,
                      {{"window", static_cast<long long>(window)}}};
}

std::vector<std::string> gallery_names() {
  return {"failing_psi", "full", "gap", "singleton_zero", "six_cycle", "three_pattern", "three_pattern_nat"};
}

GalleryEntry gallery_lookup(const std::string& name, const std::map<std::string, long long>& params,
                            const std::optional<PsiFamily>& family) {
  auto param = [&](const std::string& key, long long fallback) {
    auto it = params.find(key);
    const long long v = it == params.end() ? fallback : it->second;
    if (v < 0) throw Error(ErrorCode::Schema, "gallery parameter " + key + " must be nonnegative");
    return static_cast<std::size_t>(v);
  };
  if (name == "full") return full_entry(param("n", 2), param("labels", 2));
  if (name == "gap") return gap_class(param("m", 3));
  if (name == "six_cycle") return six_cycle();
  if (name == "three_pattern") return three_pattern();
  if (name == "three_pattern_nat") return three_pattern_nat();
  if (name == "singleton_zero") return singleton_zero();
  if (name == "failing_psi") {
    const PsiFamily fam = family ? *family : PsiFamily(3, {PsiFunction::parse("100")});
    return failing_psi_entry(fam, param("window", 1));
  }
  throw Error(ErrorCode::Schema, "unknown gallery entry '" + name + "'");
}

}  // namespace dimkit
