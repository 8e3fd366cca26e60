#include "dimkit/embedding.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <mutex>
#include <set>

namespace dimkit {

struct AugmentedClass::State {
  State(GoodFunctionSpec s, SearchOptions o) : spec(std::move(s)), options(o) {}

  GoodFunctionSpec spec;
  SearchOptions options;
  std::mutex mu;
  /// clean[L][j]: label sequences on [0, j] over L labels whose restriction to
  /// every (k+1)-set U avoids the witness-excluded patterns on U.
  std::map<std::size_t, std::vector<std::vector<Pattern>>> clean;
  std::map<Point, std::shared_ptr<const std::vector<Pattern>>> good;
  std::map<std::pair<std::size_t, PointTuple>, std::set<Pattern>> excluded;

  std::size_t label_count(Point M) const;
  const std::set<Pattern>& excluded_on(std::size_t L, const PointTuple& U);
  void extend(std::size_t L, Point M);
};

namespace {

bool is_psi(const Witness& w) { return w.kind().tag() == DimensionKind::Tag::Psi; }

}  // namespace

std::size_t AugmentedClass::State::label_count(Point M) const {
  const Witness& w = spec.witness;
  const std::size_t cap = is_psi(w) ? w.kind().family().label_count()
                                    : (w.alphabet().is_bounded() ? w.alphabet().size() : 0);
  if (spec.label_bound) {
    const auto& c = *spec.label_bound;
    if (M >= c.size())
      throw Error(ErrorCode::Precondition, "label bound table covers [0," + std::to_string(c.size()) +
                                               ") but the window reaches " + std::to_string(M));
    const std::size_t L = static_cast<std::size_t>(c[M]) + 1;
    if (cap && L > cap)
      throw Error(ErrorCode::Precondition, "label bound " + std::to_string(c[M]) + " exceeds the witness alphabet");
    return L;
  }
  if (!cap) throw Error(ErrorCode::Unsupported, "unbounded alphabet needs a label-bound table");
  return cap;
}

const std::set<Pattern>& AugmentedClass::State::excluded_on(std::size_t L, const PointTuple& U) {
  auto key = std::make_pair(L, U);
  if (auto it = excluded.find(key); it != excluded.end()) return it->second;
  std::set<Pattern> out;
  const Witness& w = spec.witness;
  const std::size_t n = U.size();
  if (is_psi(w)) {
    const PsiFamily& family = w.kind().family();
    std::vector<std::size_t> member_radices(n, family.size());
    std::vector<std::size_t> label_radices(n, L);
    for_each_tuple(member_radices, [&](std::span<const std::size_t> members) {
      const BinaryPattern b = w.exclude_psi(U, members);
      for_each_tuple(label_radices, [&](std::span<const std::size_t> u) {
        Pattern p(u.begin(), u.end());
        auto img = apply_psi(family, members, p);
        if (img && img->bits == b.bits) out.insert(std::move(p));
        return true;
      });
      return true;
    });
  } else if (L >= 2) {
    std::vector<std::size_t> radices(2 * n);
    std::fill(radices.begin(), radices.begin() + n, L);
    std::fill(radices.begin() + n, radices.end(), L - 1);
    Pattern y(n), yp(n);
    for_each_tuple(radices, [&](std::span<const std::size_t> c) {
      for (std::size_t i = 0; i < n; ++i) {
        y[i] = static_cast<Label>(c[i]);
        yp[i] = static_cast<Label>(c[n + i] < c[i] ? c[n + i] : c[n + i] + 1);
      }
      out.insert(mixture(w.exclude_natarajan(U, y, yp), y, yp));
      return true;
    });
  }
  return excluded.emplace(std::move(key), std::move(out)).first->second;
}

void AugmentedClass::State::extend(std::size_t L, Point M) {
  auto& layers = clean[L];
  const std::size_t n = spec.witness.arity();
  while (layers.size() <= M) {
    const std::size_t j = layers.size();
    // Constraints introduced at j: every U = S u {j} with S an (n-1)-subset of [0, j).
    std::vector<std::vector<std::size_t>> tails;
    std::vector<const std::set<Pattern>*> forbidden;
    if (n - 1 <= j) {
      for (auto& s : k_subsets(j, n - 1)) {
        PointTuple U(s.begin(), s.end());
        U.push_back(j);
        forbidden.push_back(&excluded_on(L, U));
        s.push_back(j);
        tails.push_back(std::move(s));
      }
    }
    const std::vector<Pattern> base = j == 0 ? std::vector<Pattern>{Pattern{}} : layers[j - 1];
    std::vector<std::vector<Pattern>> chunks(base.size());
    parallel_for(base.size(), options.threads, [&](std::size_t b) {
      Pattern c = base[b];
      c.push_back(0);
      Pattern restricted(n);
      for (std::size_t y = 0; y < L; ++y) {
        c.back() = static_cast<Label>(y);
        bool ok = true;
        for (std::size_t t = 0; t < tails.size() && ok; ++t) {
          for (std::size_t i = 0; i < n; ++i) restricted[i] = c[tails[t][i]];
          ok = !forbidden[t]->count(restricted);
        }
        if (ok) chunks[b].push_back(c);
      }
    });
    std::vector<Pattern> next;
    for (auto& ch : chunks) std::move(ch.begin(), ch.end(), std::back_inserter(next));
    layers.push_back(std::move(next));
  }
}

AugmentedClass::AugmentedClass(GoodFunctionSpec spec, SearchOptions options) {
  const auto tag = spec.witness.kind().tag();
  if (tag != DimensionKind::Tag::Natarajan && tag != DimensionKind::Tag::Psi)
    throw Error(ErrorCode::Precondition, "good functions need a Natarajan or psi witness");
  if (spec.label_bound && !std::is_sorted(spec.label_bound->begin(), spec.label_bound->end()))
    throw Error(ErrorCode::Precondition, "label bound table must be nondecreasing");
  state_ = std::make_shared<State>(std::move(spec), options);
}

const GoodFunctionSpec& AugmentedClass::spec() const noexcept { return state_->spec; }

std::size_t AugmentedClass::label_count(Point M) const { return state_->label_count(M); }

std::shared_ptr<const std::vector<Pattern>> AugmentedClass::good_functions(Point M) const {
  std::lock_guard lock(state_->mu);
  if (auto it = state_->good.find(M); it != state_->good.end()) return it->second;
  const std::size_t L = state_->label_count(M);
  state_->extend(L, M);
  const auto& layers = state_->clean[L];
  const std::size_t width = static_cast<std::size_t>(M) + 1;
  std::vector<Pattern> out{Pattern(width, 0)};
  for (std::size_t j = 0; j <= M; ++j)
    for (const auto& c : layers[j])
      if (c.back() != 0) {
        Pattern p = c;
        p.resize(width, 0);
        out.push_back(std::move(p));
      }
  std::sort(out.begin(), out.end());
  auto shared = std::make_shared<const std::vector<Pattern>>(std::move(out));
  state_->good.emplace(M, shared);
  return shared;
}

GoodPatterns AugmentedClass::behaviors(std::span<const Point> T) const {
  if (T.empty()) throw Error(ErrorCode::Precondition, "v(T) needs at least one point");
  if (std::set<Point>(T.begin(), T.end()).size() != T.size())
    throw Error(ErrorCode::Precondition, "points must be distinct");
  GoodPatterns out;
  out.window_top = *std::max_element(T.begin(), T.end());
  out.label_count = label_count(out.window_top);
  out.candidate_space = pow(BigInt(out.label_count), static_cast<std::size_t>(out.window_top) + 1);
  const auto good = good_functions(out.window_top);
  out.good_functions = good->size();
  std::vector<Pattern> projected;
  projected.reserve(good->size());
  for (const auto& g : *good) {
    Pattern p;
    for (Point x : T) p.push_back(g[x]);
    projected.push_back(std::move(p));
  }
  out.behaviors = make_behavior_set(PointTuple(T.begin(), T.end()), std::move(projected));
  return out;
}

ErmResult AugmentedClass::erm(const LabeledSample& S) const {
  if (S.empty()) throw Error(ErrorCode::Precondition, "ERM needs a nonempty sample");
  const PointTuple T = sample_points(S);
  const auto good = good_functions(T.back());
  const Pattern* best = nullptr;
  std::size_t best_mistakes = 0;
  Pattern best_on_T;
  for (const auto& g : *good) {
    std::size_t mistakes = 0;
    for (const auto& e : S)
      if (g[e.x] != e.y) ++mistakes;
    Pattern on_T;
    for (Point x : T) on_T.push_back(g[x]);
    // Functions are visited in ascending order, so the first of equal keys is the smallest.
    if (!best || mistakes < best_mistakes || (mistakes == best_mistakes && on_T < best_on_T)) {
      best = &g;
      best_mistakes = mistakes;
      best_on_T = std::move(on_T);
    }
  }
  Hypothesis::Support support;
  for (std::size_t x = 0; x < best->size(); ++x)
    if ((*best)[x] != 0) support.emplace(x, (*best)[x]);
  return ErmResult{Hypothesis::finite_support(std::move(support)), Rational(BigInt(best_mistakes), BigInt(S.size()))};
}

HypothesisClass AugmentedClass::as_class() const {
  const Alphabet alphabet =
      spec().label_bound ? Alphabet::unbounded() : Alphabet::bounded(label_count(0));
  AugmentedClass self = *this;
  return HypothesisClass::from_oracle(alphabet, std::nullopt, [self](std::span<const Point> T) {
    if (T.empty()) return std::vector<Pattern>{Pattern{}};
    return self.behaviors(T).behaviors.patterns;
  });
}

GoodPatterns good_patterns(const GoodFunctionSpec& spec, std::span<const Point> T, SearchOptions options) {
  return AugmentedClass(spec, options).behaviors(T);
}

GoodPatterns bounded_label_patterns(const GoodFunctionSpec& spec, std::span<const Point> T, SearchOptions options) {
  if (!spec.label_bound) throw Error(ErrorCode::Precondition, "spec has no label-bound table");
  if (!T.empty() && *std::max_element(T.begin(), T.end()) >= spec.label_bound->size())
    throw Error(ErrorCode::Precondition, "label bound table too short for the window");
  return good_patterns(spec, T, options);
}

ErmResult erm_augmented(const GoodFunctionSpec& spec, const LabeledSample& S) { return AugmentedClass(spec).erm(S); }

Learner agnostic_learner(const GoodFunctionSpec& spec) {
  AugmentedClass aug(spec);
  return Learner{"embed", [aug](const LabeledSample& S) { return aug.erm(S).hypothesis; }};
}

HypothesisClass augmented_class(const GoodFunctionSpec& spec) { return AugmentedClass(spec).as_class(); }

Hypothesis realizable_enumeration_erm(const HypothesisClass::Enumerator& enumerator, const LabeledSample& S,
                                      std::size_t budget) {
  if (!enumerator) throw Error(ErrorCode::Precondition, "class has no hypothesis enumerator");
  if (S.empty()) throw Error(ErrorCode::Precondition, "ERM needs a nonempty sample");
  for (std::size_t i = 0; i < budget; ++i) {
    auto h = enumerator(i);
    if (!h) throw Error(ErrorCode::Precondition, "enumeration ended without a consistent hypothesis");
    if (empirical_risk(*h, S) == 0) return *h;
  }
  throw Error(ErrorCode::Budget, "no consistent hypothesis among the first " + std::to_string(budget));
}

BigInt behavior_bound(std::size_t points, std::size_t order, std::size_t q) {
  return pow(BigInt(points), order + 1) * pow(BigInt(q), 2 * (order + 1));
}

std::size_t uniform_convergence_sample_size(const BigInt& behaviors, double eps, double delta) {
  if (eps <= 0 || delta <= 0 || delta >= 1) throw Error(ErrorCode::Precondition, "need eps > 0 and 0 < delta < 1");
  const double n = behaviors.convert_to<double>();
  return static_cast<std::size_t>(std::ceil(2.0 * std::log(2.0 * n / delta) / (eps * eps)));
}

}  // namespace dimkit
