#include "dimkit/witness.hpp"

#include <algorithm>
#include <map>
#include <mutex>
#include <numeric>
#include <set>

namespace dimkit {

std::string_view to_string(Provenance p) {
  switch (p) {
    case Provenance::Canonical: return "canonical";
    case Provenance::FromLearner: return "from_learner";
    case Provenance::FromCounting: return "from_counting";
    case Provenance::GapConstruction: return "gap_construction";
    case Provenance::FailingPsi: return "failing_psi";
    case Provenance::User: return "user";
  }
  return "unknown";
}

namespace {

/// Ascending order of X, rejecting repeats. perm[j] is the caller index of sorted slot j.
std::vector<std::size_t> sorting_permutation(std::span<const Point> X) {
  std::vector<std::size_t> perm(X.size());
  std::iota(perm.begin(), perm.end(), 0);
  std::sort(perm.begin(), perm.end(), [&](std::size_t a, std::size_t b) { return X[a] < X[b]; });
  for (std::size_t j = 1; j < perm.size(); ++j)
    if (X[perm[j]] == X[perm[j - 1]])
      throw Error(ErrorCode::Precondition, "witness input repeats point " + std::to_string(X[perm[j]]));
  return perm;
}

template <class T>
std::vector<T> permuted(std::span<const T> v, const std::vector<std::size_t>& perm) {
  std::vector<T> out(perm.size());
  for (std::size_t j = 0; j < perm.size(); ++j) out[j] = v[perm[j]];
  return out;
}

std::uint64_t unpermute_mask(std::uint64_t sorted_mask, const std::vector<std::size_t>& perm) {
  std::uint64_t out = 0;
  for (std::size_t j = 0; j < perm.size(); ++j)
    if ((sorted_mask >> j) & 1U) out |= std::uint64_t{1} << perm[j];
  return out;
}

void check_output(std::uint64_t mask, std::size_t out_arity, std::size_t arity) {
  if (out_arity != arity || (arity < 64 && (mask >> arity) != 0))
    throw Error(ErrorCode::Arity, "witness output has arity " + std::to_string(out_arity) + ", expected " +
                                      std::to_string(arity));
}

void check_labels(const Alphabet& a, std::span<const Label> y) {
  for (Label v : y)
    if (!a.contains(v)) throw Error(ErrorCode::Precondition, "label " + std::to_string(v) + " outside alphabet");
}

std::uint64_t agreement(const Pattern& p, std::span<const Label> f) {
  std::uint64_t m = 0;
  for (std::size_t i = 0; i < p.size(); ++i)
    if (p[i] == f[i]) m |= std::uint64_t{1} << i;
  return m;
}

std::string mask_string(std::uint64_t mask, std::size_t arity) {
  std::string s = "{";
  bool first = true;
  for (std::size_t i = 0; i < arity; ++i)
    if ((mask >> i) & 1U) {
      s += (first ? "" : ",") + std::to_string(i);
      first = false;
    }
  return s + "}";
}

std::string bits_string(const BinaryPattern& b) {
  std::string s;
  for (std::size_t i = 0; i < b.arity; ++i) s += static_cast<char>('0' + b.at(i));
  return s;
}

std::string members_string(const PsiFamily& family, std::span<const std::size_t> members) {
  std::string s = "(";
  for (std::size_t i = 0; i < members.size(); ++i) s += (i ? "," : "") + family[members[i]].to_string();
  return s + ")";
}

}  // namespace

Witness Witness::natarajan(std::size_t order, Alphabet alphabet, NatarajanRule rule, Provenance provenance) {
  Witness w(DimensionKind::natarajan(), order, alphabet, provenance);
  w.natarajan_ = std::move(rule);
  return w;
}

Witness Witness::graph(std::size_t order, Alphabet alphabet, GraphRule rule, Provenance provenance) {
  Witness w(DimensionKind::graph(), order, alphabet, provenance);
  w.graph_ = std::move(rule);
  return w;
}

Witness Witness::psi(std::size_t order, PsiFamily family, PsiRule rule, Provenance provenance) {
  const Alphabet a = Alphabet::bounded(family.label_count());
  Witness w(DimensionKind::psi(std::move(family)), order, a, provenance);
  w.psi_ = std::move(rule);
  return w;
}

IndexSet Witness::exclude_natarajan(std::span<const Point> X, std::span<const Label> g1,
                                    std::span<const Label> g2) const {
  if (!natarajan_) throw Error(ErrorCode::Precondition, "not a Natarajan witness");
  if (X.size() != arity() || g1.size() != arity() || g2.size() != arity())
    throw Error(ErrorCode::Arity, "order-" + std::to_string(order_) + " witness takes " + std::to_string(arity()) +
                                      " points and labels");
  check_labels(alphabet_, g1);
  check_labels(alphabet_, g2);
  for (std::size_t i = 0; i < g1.size(); ++i)
    if (g1[i] == g2[i])
      throw Error(ErrorCode::Precondition, "g1 and g2 agree at coordinate " + std::to_string(i));
  const auto perm = sorting_permutation(X);
  const auto sx = permuted(X, perm);
  const IndexSet I = natarajan_(sx, permuted(g1, perm), permuted(g2, perm));
  check_output(I.mask, I.arity, arity());
  return IndexSet{unpermute_mask(I.mask, perm), arity()};
}

IndexSet Witness::exclude_graph(std::span<const Point> X, std::span<const Label> f) const {
  if (!graph_) throw Error(ErrorCode::Precondition, "not a graph witness");
  if (X.size() != arity() || f.size() != arity())
    throw Error(ErrorCode::Arity, "order-" + std::to_string(order_) + " witness takes " + std::to_string(arity()) +
                                      " points and labels");
  check_labels(alphabet_, f);
  const auto perm = sorting_permutation(X);
  const IndexSet I = graph_(permuted(X, perm), permuted(f, perm));
  check_output(I.mask, I.arity, arity());
  return IndexSet{unpermute_mask(I.mask, perm), arity()};
}

BinaryPattern Witness::exclude_psi(std::span<const Point> X, std::span<const std::size_t> members) const {
  if (!psi_) throw Error(ErrorCode::Precondition, "not a psi witness");
  if (X.size() != arity() || members.size() != arity())
    throw Error(ErrorCode::Arity, "order-" + std::to_string(order_) + " witness takes " + std::to_string(arity()) +
                                      " points and family members");
  for (std::size_t m : members)
    if (m >= kind_.family().size())
      throw Error(ErrorCode::Precondition, "family member index " + std::to_string(m) + " out of range");
  const auto perm = sorting_permutation(X);
  const BinaryPattern b = psi_(permuted(X, perm), permuted(members, perm));
  check_output(b.bits, b.arity, arity());
  return BinaryPattern{unpermute_mask(b.bits, perm), arity()};
}

// ---------------------------------------------------------------- validation

namespace {

struct Tally {
  std::uint64_t checked = 0;
  std::uint64_t violation_count = 0;
  std::vector<Violation> violations;

  void add(Violation v) {
    ++violation_count;
    if (violations.size() < kMaxReportedViolations) violations.push_back(std::move(v));
  }
};

bool recordable(const Error& e) {
  return e.code() == ErrorCode::Shattered || e.code() == ErrorCode::WitnessViolation;
}

std::size_t witness_label_count(const Witness& w, const HypothesisClass& H) {
  if (w.alphabet().is_bounded()) return w.alphabet().size();
  if (H.alphabet().is_bounded()) return H.alphabet().size();
  throw Error(ErrorCode::Unsupported, "validation needs a finite label alphabet");
}

void validate_natarajan(const Witness& w, const BehaviorSet& B, std::size_t q, Tally& t) {
  const std::size_t n = B.points.size();
  if (q < 2) return;
  std::vector<std::size_t> radices(2 * n);
  std::fill(radices.begin(), radices.begin() + n, q);
  std::fill(radices.begin() + n, radices.end(), q - 1);
  Pattern g1(n), g2(n);
  for_each_tuple(radices, [&](std::span<const std::size_t> c) {
    for (std::size_t i = 0; i < n; ++i) {
      g1[i] = static_cast<Label>(c[i]);
      g2[i] = static_cast<Label>(c[n + i] < c[i] ? c[n + i] : c[n + i] + 1);
    }
    ++t.checked;
    const std::string input = "g1=" + to_string(g1) + " g2=" + to_string(g2);
    try {
      const IndexSet I = w.exclude_natarajan(B.points, g1, g2);
      Pattern f = mixture(I, g1, g2);
      if (B.contains(f))
        t.add(Violation{B.points, input, mask_string(I.mask, n), f, "excluded mixture is realized"});
    } catch (const Error& e) {
      if (!recordable(e)) throw;
      t.add(Violation{B.points, input, "", std::nullopt, e.what()});
    }
    return true;
  });
}

void validate_graph(const Witness& w, const BehaviorSet& B, std::size_t q, Tally& t) {
  const std::size_t n = B.points.size();
  std::vector<std::size_t> radices(n, q);
  Pattern f(n);
  for_each_tuple(radices, [&](std::span<const std::size_t> c) {
    for (std::size_t i = 0; i < n; ++i) f[i] = static_cast<Label>(c[i]);
    ++t.checked;
    const std::string input = "f=" + to_string(f);
    try {
      const IndexSet I = w.exclude_graph(B.points, f);
      for (const auto& p : B.patterns)
        if (agreement(p, f) == I.mask) {
          t.add(Violation{B.points, input, mask_string(I.mask, n), p, "a hypothesis agrees with f exactly on I"});
          break;
        }
    } catch (const Error& e) {
      if (!recordable(e)) throw;
      t.add(Violation{B.points, input, "", std::nullopt, e.what()});
    }
    return true;
  });
}

void validate_psi(const Witness& w, const BehaviorSet& B, Tally& t) {
  const PsiFamily& family = w.kind().family();
  const std::size_t n = B.points.size();
  std::vector<std::size_t> radices(n, family.size());
  for_each_tuple(radices, [&](std::span<const std::size_t> members) {
    ++t.checked;
    const std::string input = "psi=" + members_string(family, members);
    try {
      const BinaryPattern out = w.exclude_psi(B.points, members);
      for (const auto& p : B.patterns) {
        auto img = apply_psi(family, members, p);
        if (img && img->bits == out.bits) {
          t.add(Violation{B.points, input, bits_string(out), p, "excluded pattern is in psi(H|X)"});
          break;
        }
      }
    } catch (const Error& e) {
      if (!recordable(e)) throw;
      t.add(Violation{B.points, input, "", std::nullopt, e.what()});
    }
    return true;
  });
}

}  // namespace

WitnessReport validate_witness(const Witness& w, const HypothesisClass& H, Point window, SearchOptions options) {
  std::size_t q = 0;
  if (w.kind().tag() == DimensionKind::Tag::Psi) {
    if (H.alphabet().is_bounded() && H.alphabet().size() != w.kind().family().label_count())
      throw Error(ErrorCode::Precondition, "psi family alphabet differs from the class alphabet");
  } else {
    q = witness_label_count(w, H);
  }
  std::size_t points = static_cast<std::size_t>(window) + 1;
  if (auto n = H.domain_size()) points = std::min(points, *n);
  const std::size_t n = w.arity();
  WitnessReport report;
  if (n > points) return report;

  const auto subsets = k_subsets(points, n);
  std::vector<Tally> tallies(subsets.size());
  parallel_for(subsets.size(), options.threads, [&](std::size_t s) {
    PointTuple X(subsets[s].begin(), subsets[s].end());
    const BehaviorSet B = restrict(H, X);
    switch (w.kind().tag()) {
      case DimensionKind::Tag::Natarajan: validate_natarajan(w, B, q, tallies[s]); break;
      case DimensionKind::Tag::Graph: validate_graph(w, B, q, tallies[s]); break;
      case DimensionKind::Tag::Psi: validate_psi(w, B, tallies[s]); break;
      default: throw Error(ErrorCode::Precondition, "witnesses exist for Natarajan, graph and psi flavors only");
    }
  });
  for (auto& t : tallies) {
    report.checked_inputs += t.checked;
    report.violation_count += t.violation_count;
    for (auto& v : t.violations)
      if (report.violations.size() < kMaxReportedViolations) report.violations.push_back(std::move(v));
  }
  return report;
}

// ---------------------------------------------------------------- canonical witness

namespace {

/// Memoized H|_X shared by copies of one canonical witness.
class BehaviorCache {
 public:
  explicit BehaviorCache(HypothesisClass H) : H_(std::move(H)) {}

  BehaviorSet get(std::span<const Point> X) {
    PointTuple key(X.begin(), X.end());
    {
      std::lock_guard lock(mu_);
      if (auto it = cache_.find(key); it != cache_.end()) return it->second;
    }
    BehaviorSet B = restrict(H_, X);
    std::lock_guard lock(mu_);
    return cache_.emplace(std::move(key), std::move(B)).first->second;
  }

 private:
  HypothesisClass H_;
  std::mutex mu_;
  std::map<PointTuple, BehaviorSet> cache_;
};

}  // namespace

Witness canonical_witness(const HypothesisClass& H, const DimensionKind& kind, std::size_t order) {
  if (order + 1 >= kMaxArity) throw Error(ErrorCode::Unsupported, "witness order too large");
  auto cache = std::make_shared<BehaviorCache>(H);
  switch (kind.tag()) {
    case DimensionKind::Tag::Natarajan:
      return Witness::natarajan(
          order, H.alphabet(),
          [cache](std::span<const Point> X, std::span<const Label> g1, std::span<const Label> g2) {
            const BehaviorSet B = cache->get(X);
            const std::size_t n = X.size();
            Pattern f(n);
            for (std::uint64_t t = 0; t < (std::uint64_t{1} << n); ++t) {
              for (std::size_t i = 0; i < n; ++i) {
                const bool high = (t >> (n - 1 - i)) & 1U;
                f[i] = high ? std::max(g1[i], g2[i]) : std::min(g1[i], g2[i]);
              }
              if (!B.contains(f)) {
                std::uint64_t mask = 0;
                for (std::size_t i = 0; i < n; ++i)
                  if (f[i] == g1[i]) mask |= std::uint64_t{1} << i;
                return IndexSet{mask, n};
              }
            }
            throw Error(ErrorCode::Shattered, "points " + to_string(PointTuple(X.begin(), X.end())) +
                                                  " are N-shattered with g1=" + to_string(Pattern(g1.begin(), g1.end())) +
                                                  " g2=" + to_string(Pattern(g2.begin(), g2.end())));
          },
          Provenance::Canonical);
    case DimensionKind::Tag::Graph:
      return Witness::graph(
          order, H.alphabet(),
          [cache](std::span<const Point> X, std::span<const Label> f) {
            const BehaviorSet B = cache->get(X);
            const std::size_t n = X.size();
            std::vector<bool> seen(std::size_t{1} << n, false);
            for (const auto& p : B.patterns) seen[agreement(p, f)] = true;
            for (std::uint64_t mask = 0; mask < seen.size(); ++mask)
              if (!seen[mask]) return IndexSet{mask, n};
            throw Error(ErrorCode::Shattered, "points " + to_string(PointTuple(X.begin(), X.end())) +
                                                  " are G-shattered with f=" + to_string(Pattern(f.begin(), f.end())));
          },
          Provenance::Canonical);
    case DimensionKind::Tag::Psi: {
      const PsiFamily family = kind.family();
      return Witness::psi(
          order, family,
          [cache, family](std::span<const Point> X, std::span<const std::size_t> members) {
            const BehaviorSet B = cache->get(X);
            const std::size_t n = X.size();
            std::vector<bool> seen(std::size_t{1} << n, false);
            for (const auto& p : B.patterns)
              if (auto img = apply_psi(family, members, p)) seen[img->bits] = true;
            for (std::uint64_t t = 0; t < seen.size(); ++t) {
              std::uint64_t bits = 0;
              for (std::size_t i = 0; i < n; ++i)
                if ((t >> (n - 1 - i)) & 1U) bits |= std::uint64_t{1} << i;
              if (!seen[bits]) return BinaryPattern{bits, n};
            }
            throw Error(ErrorCode::Shattered, "points " + to_string(PointTuple(X.begin(), X.end())) +
                                                  " are psi-shattered by " + members_string(family, members));
          },
          Provenance::Canonical);
    }
    default: throw Error(ErrorCode::Precondition, "witnesses exist for Natarajan, graph and psi flavors only");
  }
}

// ---------------------------------------------------------------- learner witness

Witness witness_from_learner(const Learner& A, std::size_t m, Alphabet alphabet, std::optional<HypothesisClass> check,
                             SearchOptions options) {
  if (m == 0) throw Error(ErrorCode::Precondition, "sample size must be positive");
  return Witness::natarajan(
      2 * m - 1, alphabet,
      [A, check, options](std::span<const Point> X, std::span<const Label> g1, std::span<const Label> g2) {
        const AdversaryReport r =
            nfl_adversary(A, X, Pattern(g1.begin(), g1.end()), Pattern(g2.begin(), g2.end()), options);
        if (check && restrict(*check, X).contains(r.f.values))
          throw Error(ErrorCode::WitnessViolation,
                      "adversary labeling " + to_string(r.f.values) + " is realized by the class");
        return r.I;
      },
      Provenance::FromLearner);
}

PacCheck pac_check_on_graphs(const Learner& A, const HypothesisClass& H, std::size_t m, Point window) {
  PacCheck out;
  std::size_t points = static_cast<std::size_t>(window) + 1;
  if (auto n = H.domain_size()) points = std::min(points, *n);
  if (2 * m > points) return out;
  const Rational threshold = make_rational(1, 7);
  for_each_k_subset(points, 2 * m, [&](std::span<const std::size_t> idx) {
    PointTuple X(idx.begin(), idx.end());
    for (const auto& f : restrict(H, X).patterns) {
      ++out.targets_checked;
      const ExpectedRisk r = exact_expected_risk(A, X, f, m);
      if (r.tail >= threshold) {
        out.learns = false;
        out.counterexample = Labeling{X, f};
        out.counterexample_tail = r.tail;
        return false;
      }
    }
    return true;
  });
  return out;
}

}  // namespace dimkit
