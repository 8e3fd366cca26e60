#include "dimkit/dimensions.hpp"

#include <algorithm>
#include <map>

namespace dimkit {

namespace {

bool too_many_for(std::size_t k, std::size_t available) {
  return k >= kMaxArity || (std::uint64_t{1} << k) > available;
}

std::vector<std::vector<Label>> realized_values(const BehaviorSet& B) {
  std::vector<std::vector<Label>> values(B.points.size());
  for (const auto& p : B.patterns)
    for (std::size_t i = 0; i < p.size(); ++i) values[i].push_back(p[i]);
  for (auto& v : values) {
    std::sort(v.begin(), v.end());
    v.erase(std::unique(v.begin(), v.end()), v.end());
  }
  return values;
}

std::uint64_t agreement_mask(const Pattern& p, const Pattern& f) {
  std::uint64_t m = 0;
  for (std::size_t i = 0; i < p.size(); ++i)
    if (p[i] == f[i]) m |= std::uint64_t{1} << i;
  return m;
}

bool all_mixtures_realized(const BehaviorSet& B, const Pattern& g1, const Pattern& g2) {
  const std::size_t k = g1.size();
  Pattern f(k);
  for (std::uint64_t mask = 0; mask < (std::uint64_t{1} << k); ++mask) {
    for (std::size_t i = 0; i < k; ++i) f[i] = ((mask >> i) & 1U) ? g1[i] : g2[i];
    if (!B.contains(f)) return false;
  }
  return true;
}

bool covers_all_masks(const std::vector<std::uint64_t>& masks, std::size_t k) {
  std::vector<bool> seen(std::size_t{1} << k, false);
  std::size_t count = 0;
  for (std::uint64_t m : masks)
    if (!seen[m]) {
      seen[m] = true;
      ++count;
    }
  return count == seen.size();
}

std::vector<std::uint64_t> psi_images(const BehaviorSet& B, const PsiFamily& family,
                                      std::span<const std::size_t> members) {
  std::vector<std::uint64_t> out;
  for (const auto& p : B.patterns)
    if (auto img = apply_psi(family, members, p)) out.push_back(img->bits);
  return out;
}

}  // namespace

const PsiFamily& DimensionKind::family() const {
  if (!family_) throw Error(ErrorCode::Precondition, "dimension kind carries no psi family");
  return *family_;
}

std::string DimensionKind::name() const {
  switch (tag_) {
    case Tag::VC: return "vc";
    case Tag::Natarajan: return "natarajan";
    case Tag::Graph: return "graph";
    case Tag::DS: return "ds";
    case Tag::Psi: return "psi";
  }
  return "unknown";
}

// ---------------------------------------------------------------- predicates on behavior sets

std::optional<VcEvidence> vc_shatters(const BehaviorSet& B) {
  const std::size_t k = B.points.size();
  if (too_many_for(k, B.size())) return std::nullopt;
  std::vector<std::uint64_t> masks;
  for (const auto& p : B.patterns) {
    if (std::any_of(p.begin(), p.end(), [](Label y) { return y > 1; })) continue;
    std::uint64_t m = 0;
    for (std::size_t i = 0; i < k; ++i) m |= std::uint64_t{p[i]} << i;
    masks.push_back(m);
  }
  if (!covers_all_masks(masks, k)) return std::nullopt;
  return VcEvidence{};
}

std::optional<NatarajanEvidence> natarajan_shatters(const BehaviorSet& B) {
  const std::size_t k = B.points.size();
  if (too_many_for(k, B.size())) return std::nullopt;
  if (k == 0) return NatarajanEvidence{};
  for (const auto& v : realized_values(B))
    if (v.size() < 2) return std::nullopt;
  // Swapping g1(i) and g2(i) preserves the mixture set, so g1 < g2 componentwise
  // without loss of generality, and then both are themselves mixtures.
  for (std::size_t a = 0; a < B.size(); ++a) {
    const Pattern& g1 = B.patterns[a];
    for (std::size_t b = a + 1; b < B.size(); ++b) {
      const Pattern& g2 = B.patterns[b];
      bool above = true;
      for (std::size_t i = 0; i < k && above; ++i) above = g2[i] > g1[i];
      if (above && all_mixtures_realized(B, g1, g2)) return NatarajanEvidence{g1, g2};
    }
  }
  return std::nullopt;
}

std::optional<GraphEvidence> graph_shatters(const BehaviorSet& B) {
  const std::size_t k = B.points.size();
  if (too_many_for(k, B.size())) return std::nullopt;
  // The full index set requires f itself to be realized.
  for (const auto& f : B.patterns) {
    std::vector<std::uint64_t> masks;
    masks.reserve(B.size());
    for (const auto& p : B.patterns) masks.push_back(agreement_mask(p, f));
    if (covers_all_masks(masks, k)) return GraphEvidence{f};
  }
  return std::nullopt;
}

std::vector<Pattern> pseudo_cube_core(std::vector<Pattern> B) {
  std::sort(B.begin(), B.end());
  B.erase(std::unique(B.begin(), B.end()), B.end());
  if (B.empty()) return B;
  const std::size_t d = B.front().size();
  constexpr Label kHole = ~Label{0};
  bool changed = true;
  while (changed && !B.empty()) {
    changed = false;
    std::map<Pattern, std::size_t> line_count;
    for (const auto& p : B) {
      for (std::size_t i = 0; i < d; ++i) {
        Pattern key = p;
        key[i] = kHole;
        key.push_back(static_cast<Label>(i));
        ++line_count[key];
      }
    }
    std::vector<Pattern> kept;
    kept.reserve(B.size());
    for (auto& p : B) {
      bool ok = true;
      for (std::size_t i = 0; i < d && ok; ++i) {
        Pattern key = p;
        key[i] = kHole;
        key.push_back(static_cast<Label>(i));
        ok = line_count[key] >= 2;
      }
      if (ok)
        kept.push_back(std::move(p));
      else
        changed = true;
    }
    B = std::move(kept);
  }
  return B;
}

bool is_pseudo_cube(const std::vector<Pattern>& B) {
  if (B.empty()) return false;
  const std::size_t d = B.front().size();
  for (const auto& p : B)
    if (p.size() != d) throw Error(ErrorCode::Arity, "pseudo-cube candidate has mixed arity");
  std::vector<Pattern> unique = B;
  std::sort(unique.begin(), unique.end());
  unique.erase(std::unique(unique.begin(), unique.end()), unique.end());
  for (const auto& h : unique) {
    for (std::size_t i = 0; i < d; ++i) {
      const bool has_neighbor = std::any_of(unique.begin(), unique.end(), [&](const Pattern& g) {
        for (std::size_t j = 0; j < d; ++j)
          if ((h[j] == g[j]) != (j != i)) return false;
        return true;
      });
      if (!has_neighbor) return false;
    }
  }
  return true;
}

std::optional<DsEvidence> ds_shatters(const BehaviorSet& B) {
  if (B.size() == 0) return std::nullopt;
  auto core = pseudo_cube_core(B.patterns);
  if (core.empty()) return std::nullopt;
  return DsEvidence{std::move(core)};
}

std::optional<PsiEvidence> psi_shatters(const BehaviorSet& B, const PsiFamily& family) {
  const std::size_t k = B.points.size();
  if (family.label_count() < 1) return std::nullopt;
  if (too_many_for(k, B.size())) return std::nullopt;
  for (const auto& p : B.patterns)
    for (Label y : p)
      if (y >= family.label_count())
        throw Error(ErrorCode::Precondition, "psi family alphabet does not cover label " + std::to_string(y));
  if (k == 0) return PsiEvidence{};
  // A coordinate's member must send some realized value to 0 and another to 1.
  const auto values = realized_values(B);
  std::vector<std::vector<std::size_t>> candidates(k);
  for (std::size_t i = 0; i < k; ++i) {
    for (std::size_t m = 0; m < family.size(); ++m) {
      bool zero = false, one = false;
      for (Label y : values[i]) {
        zero |= family[m](y) == PsiValue::Zero;
        one |= family[m](y) == PsiValue::One;
      }
      if (zero && one) candidates[i].push_back(m);
    }
    if (candidates[i].empty()) return std::nullopt;
  }
  std::vector<std::size_t> radices;
  for (const auto& c : candidates) radices.push_back(c.size());
  std::optional<PsiEvidence> found;
  std::vector<std::size_t> members(k);
  for_each_tuple(radices, [&](std::span<const std::size_t> t) {
    for (std::size_t i = 0; i < k; ++i) members[i] = candidates[i][t[i]];
    if (covers_all_masks(psi_images(B, family, members), k)) {
      found = PsiEvidence{members};
      return false;
    }
    return true;
  });
  return found;
}

// ---------------------------------------------------------------- class-level predicates

namespace {

template <class Evidence>
std::optional<ShatterCertificate> wrap(std::span<const Point> X, std::optional<Evidence> e) {
  if (!e) return std::nullopt;
  return ShatterCertificate{PointTuple(X.begin(), X.end()), std::move(*e)};
}

void require_binary(const HypothesisClass& H) {
  if (!H.alphabet().is_bounded() || H.alphabet().size() != 2)
    throw Error(ErrorCode::Precondition, "VC dimension is defined only for binary label alphabets");
}

}  // namespace

std::optional<ShatterCertificate> is_vc_shattered(const HypothesisClass& H, std::span<const Point> X) {
  require_binary(H);
  return wrap(X, vc_shatters(restrict(H, X)));
}

std::optional<ShatterCertificate> is_n_shattered(const HypothesisClass& H, std::span<const Point> X) {
  return wrap(X, natarajan_shatters(restrict(H, X)));
}

std::optional<ShatterCertificate> is_g_shattered(const HypothesisClass& H, std::span<const Point> X) {
  return wrap(X, graph_shatters(restrict(H, X)));
}

std::optional<ShatterCertificate> is_ds_shattered(const HypothesisClass& H, std::span<const Point> X) {
  return wrap(X, ds_shatters(restrict(H, X)));
}

std::optional<ShatterCertificate> is_psi_shattered(const HypothesisClass& H, std::span<const Point> X,
                                                   const PsiFamily& family) {
  if (H.alphabet().is_bounded() && H.alphabet().size() != family.label_count())
    throw Error(ErrorCode::Precondition, "psi family covers " + std::to_string(family.label_count()) +
                                             " labels but the class has " + std::to_string(H.alphabet().size()));
  return wrap(X, psi_shatters(restrict(H, X), family));
}

std::optional<ShatterCertificate> is_shattered(const HypothesisClass& H, std::span<const Point> X,
                                               const DimensionKind& kind) {
  switch (kind.tag()) {
    case DimensionKind::Tag::VC: return is_vc_shattered(H, X);
    case DimensionKind::Tag::Natarajan: return is_n_shattered(H, X);
    case DimensionKind::Tag::Graph: return is_g_shattered(H, X);
    case DimensionKind::Tag::DS: return is_ds_shattered(H, X);
    case DimensionKind::Tag::Psi: return is_psi_shattered(H, X, kind.family());
  }
  return std::nullopt;
}

bool verify_certificate(const HypothesisClass& H, const DimensionKind& kind, const ShatterCertificate& cert) {
  const BehaviorSet B = restrict(H, cert.points);
  const std::size_t k = cert.points.size();
  if (k >= kMaxArity) return false;
  const std::uint64_t full = std::uint64_t{1} << k;
  switch (kind.tag()) {
    case DimensionKind::Tag::VC: {
      if (!std::holds_alternative<VcEvidence>(cert.evidence)) return false;
      for (std::uint64_t m = 0; m < full; ++m) {
        Pattern p(k);
        for (std::size_t i = 0; i < k; ++i) p[i] = (m >> i) & 1U;
        if (!B.contains(p)) return false;
      }
      return true;
    }
    case DimensionKind::Tag::Natarajan: {
      const auto* e = std::get_if<NatarajanEvidence>(&cert.evidence);
      if (!e || e->g1.size() != k || e->g2.size() != k) return false;
      for (std::size_t i = 0; i < k; ++i)
        if (e->g1[i] == e->g2[i]) return false;
      return all_mixtures_realized(B, e->g1, e->g2);
    }
    case DimensionKind::Tag::Graph: {
      const auto* e = std::get_if<GraphEvidence>(&cert.evidence);
      if (!e || e->f.size() != k) return false;
      for (std::uint64_t m = 0; m < full; ++m) {
        const bool realized = std::any_of(B.patterns.begin(), B.patterns.end(),
                                          [&](const Pattern& p) { return agreement_mask(p, e->f) == m; });
        if (!realized) return false;
      }
      return true;
    }
    case DimensionKind::Tag::DS: {
      const auto* e = std::get_if<DsEvidence>(&cert.evidence);
      if (!e || e->cube.empty()) return false;
      for (const auto& p : e->cube)
        if (p.size() != k || !B.contains(p)) return false;
      return is_pseudo_cube(e->cube);
    }
    case DimensionKind::Tag::Psi: {
      const auto* e = std::get_if<PsiEvidence>(&cert.evidence);
      const PsiFamily& family = kind.family();
      if (!e || e->members.size() != k) return false;
      for (std::size_t m : e->members)
        if (m >= family.size()) return false;
      std::vector<bool> seen(full, false);
      for (const auto& p : B.patterns)
        if (auto img = apply_psi(family, e->members, p)) seen[img->bits] = true;
      return std::all_of(seen.begin(), seen.end(), [](bool b) { return b; });
    }
  }
  return false;
}

// ---------------------------------------------------------------- exact dimension

DimensionResult exact_dimension(const HypothesisClass& H, const DimensionKind& kind, std::optional<Point> window,
                                SearchOptions options) {
  if (kind.tag() == DimensionKind::Tag::VC) require_binary(H);
  DimensionResult result;
  std::optional<Point> top;
  if (auto n = H.domain_size()) {
    if (*n == 0) return result;
    top = static_cast<Point>(*n - 1);
    if (window) top = std::min(*top, *window);
  } else if (H.is_explicit()) {
    // Beyond every support the class is constantly 0, so no shattered set reaches there.
    const auto support_top = H.max_support();
    if (window) {
      top = *window;
      if (support_top && *window < *support_top)
        result.warnings.push_back("window " + std::to_string(*window) + " excludes support up to point " +
                                  std::to_string(*support_top) + "; result is a lower bound");
    } else {
      top = support_top;
    }
    if (!top) {
      result.warnings.push_back("every hypothesis is the zero function");
      return result;
    }
  } else {
    if (!window) throw Error(ErrorCode::Precondition, "oracle classes over N need an explicit window");
    top = *window;
  }
  result.window = *top;

  // Points with a single behavior cannot appear in any shattered set.
  PointTuple candidates;
  for (Point x = 0; x <= *top; ++x) {
    const Point single[1] = {x};
    if (restrict(H, single).size() >= 2) candidates.push_back(x);
  }

  for (std::size_t d = 1; d <= candidates.size(); ++d) {
    const auto subsets = k_subsets(candidates.size(), d);
    auto tuple_of = [&](std::size_t s) {
      PointTuple X;
      for (std::size_t i : subsets[s]) X.push_back(candidates[i]);
      return X;
    };
    const auto hit = parallel_find_first(subsets.size(), options.threads, [&](std::size_t s) {
      const PointTuple X = tuple_of(s);
      return is_shattered(H, X, kind).has_value();
    });
    if (!hit) break;
    const PointTuple X = tuple_of(*hit);
    result.dimension = d;
    result.certificate = is_shattered(H, X, kind);
  }
  return result;
}

SauerReport sauer_natarajan_check(const HypothesisClass& H, std::span<const Point> T, std::size_t d) {
  SauerReport r;
  r.count = restrict(H, T).size();
  const BigInt q = H.alphabet().size();
  r.bound = pow(BigInt(T.size()), d) * pow(q, 2 * d);
  r.holds = r.count <= r.bound;
  return r;
}

}  // namespace dimkit
