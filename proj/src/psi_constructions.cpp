#include "dimkit/psi_constructions.hpp"

#include "dimkit/dimensions.hpp"

#include <algorithm>

namespace dimkit {

namespace {

Label flip_of(const PsiFunction& psi, Label y1, Label y2) {
  // No member separates y1 from y2, so their non-star images agree.
  PsiValue b = psi(y1);
  if (b == PsiValue::Star) b = psi(y2);
  return b == PsiValue::One ? 0 : 1;
}

}  // namespace

FailingPsi failing_psi_class(const PsiFamily& family, Point window) {
  const DistinguisherCheck check = check_distinguisher(family);
  if (check.is_distinguisher || !check.failing_pair)
    throw Error(ErrorCode::Precondition, "family is a distinguisher");
  if (window >= 24) throw Error(ErrorCode::Budget, "window too large for an explicit class");
  const auto [y1, y2] = *check.failing_pair;
  const std::size_t n = static_cast<std::size_t>(window) + 1;
  std::vector<Hypothesis> hs;
  for (std::uint64_t mask = 0; mask < (std::uint64_t{1} << n); ++mask) {
    Pattern t(n);
    for (std::size_t i = 0; i < n; ++i) t[i] = ((mask >> i) & 1U) ? y2 : y1;
    hs.push_back(Hypothesis::table(std::move(t)));
  }
  auto cls = HypothesisClass::explicit_class(Alphabet::bounded(family.label_count()), n, std::move(hs));
  auto rule = [family, y1 = y1, y2 = y2](std::span<const Point> X, std::span<const std::size_t> members) {
    std::uint64_t bits = 0;
    for (std::size_t i = 0; i < X.size(); ++i)
      bits |= std::uint64_t{flip_of(family[members[i]], y1, y2)} << i;
    return BinaryPattern{bits, X.size()};
  };
  return FailingPsi{y1, y2, std::move(cls), Witness::psi(0, family, rule, Provenance::FailingPsi),
                    Witness::psi(1, family, rule, Provenance::FailingPsi)};
}

std::string_view to_string(DsVerdict v) {
  switch (v) {
    case DsVerdict::Refuted: return "refuted";
    case DsVerdict::NotRefuted: return "not_refuted";
    case DsVerdict::Vacuous: return "vacuous";
  }
  return "unknown";
}

namespace {

/// 2-bit image code of a pattern under (psi1, psi2), or -1 if a coordinate hits *.
int image_code(const PsiFunction& a, const PsiFunction& b, const Pattern& p) {
  const PsiValue u = a(p[0]);
  const PsiValue v = b(p[1]);
  if (u == PsiValue::Star || v == PsiValue::Star) return -1;
  return static_cast<int>(u) | (static_cast<int>(v) << 1);
}

bool covers(const PsiFunction& a, const PsiFunction& b, const std::vector<Pattern>& patterns) {
  unsigned seen = 0;
  for (const auto& p : patterns)
    if (int c = image_code(a, b, p); c >= 0) seen |= 1U << c;
  return seen == 0xF;
}

}  // namespace

DsRefutation refute_ds_expressibility(const HypothesisClass& H, SearchOptions options) {
  if (!H.is_explicit() || H.domain_size() != std::optional<std::size_t>(2))
    throw Error(ErrorCode::Precondition, "refutation needs an explicit class on 2 points");
  const DimensionResult ds = exact_dimension(H, DimensionKind::ds());
  if (ds.dimension != 2)
    throw Error(ErrorCode::Precondition, "class has DS dimension " + std::to_string(ds.dimension) + ", not 2");
  const std::size_t q = H.alphabet().size();
  const PointTuple X{0, 1};
  const BehaviorSet B = restrict(H, X);

  // 4-element subclasses of dimension 1, in lexicographic order.
  std::vector<std::vector<Pattern>> candidates;
  for_each_k_subset(B.size(), 4, [&](std::span<const std::size_t> idx) {
    std::vector<Pattern> sub;
    std::vector<Hypothesis> hs;
    for (std::size_t i : idx) {
      sub.push_back(B.patterns[i]);
      hs.push_back(Hypothesis::table(B.patterns[i]));
    }
    const auto cls = HypothesisClass::explicit_class(H.alphabet(), 2, std::move(hs));
    if (exact_dimension(cls, DimensionKind::ds()).dimension == 1) candidates.push_back(std::move(sub));
    return true;
  });

  const auto fns = all_psi_functions(q);
  const std::size_t N = fns.size();
  std::vector<std::vector<DsRefutationEntry>> rows(N);
  parallel_for(N, options.threads, [&](std::size_t a) {
    for (std::size_t b = 0; b < N; ++b) {
      if (!covers(fns[a], fns[b], B.patterns)) continue;
      DsRefutationEntry e{fns[a], fns[b], {}};
      for (const auto& c : candidates)
        if (covers(fns[a], fns[b], c)) e.subclasses.push_back(c);
      rows[a].push_back(std::move(e));
    }
  });

  DsRefutation out;
  out.pairs_examined = static_cast<std::uint64_t>(N) * N;
  for (auto& row : rows)
    for (auto& e : row) {
      ++out.shattering_pairs;
      for (const auto& c : e.subclasses) ++out.subclass_counts[c];
      if (e.subclasses.empty() && !out.unrefuted_pair) out.unrefuted_pair = std::make_pair(e.psi1, e.psi2);
      out.entries.push_back(std::move(e));
    }
  if (out.shattering_pairs == 0)
    out.verdict = DsVerdict::Vacuous;
  else
    out.verdict = out.unrefuted_pair ? DsVerdict::NotRefuted : DsVerdict::Refuted;
  return out;
}

}  // namespace dimkit
