#include "dimkit/core.hpp"

#include <algorithm>
#include <numeric>
#include <set>
#include <sstream>

namespace dimkit {

std::string_view to_string(ErrorCode code) {
  switch (code) {
    case ErrorCode::Domain: return "DOMAIN";
    case ErrorCode::Representation: return "REPRESENTATION";
    case ErrorCode::Arity: return "ARITY";
    case ErrorCode::Precondition: return "PRECONDITION";
    case ErrorCode::Shattered: return "SHATTERED";
    case ErrorCode::WitnessViolation: return "WITNESS_VIOLATION";
    case ErrorCode::NflFailure: return "NFL_FAILURE";
    case ErrorCode::Budget: return "BUDGET";
    case ErrorCode::InternalConsistency: return "INTERNAL_CONSISTENCY";
    case ErrorCode::Unsupported: return "UNSUPPORTED";
    case ErrorCode::LearnerContract: return "LEARNER_CONTRACT";
    case ErrorCode::Schema: return "SCHEMA";
  }
  return "UNKNOWN";
}

// ---------------------------------------------------------------- Alphabet

Alphabet Alphabet::bounded(std::size_t count) {
  if (count == 0) throw Error(ErrorCode::Precondition, "alphabet must contain label 0");
  Alphabet a;
  a.count_ = count;
  return a;
}

std::size_t Alphabet::size() const {
  if (!count_) throw Error(ErrorCode::Unsupported, "unbounded label alphabet has no finite size");
  return *count_;
}

// ---------------------------------------------------------------- bit tuples

IndexSet IndexSet::full(std::size_t arity) {
  return IndexSet{arity == 64 ? ~std::uint64_t{0} : ((std::uint64_t{1} << arity) - 1), arity};
}

std::vector<std::size_t> IndexSet::indices() const {
  std::vector<std::size_t> out;
  for (std::size_t i = 0; i < arity; ++i)
    if (contains(i)) out.push_back(i);
  return out;
}

Pattern BinaryPattern::to_pattern() const {
  Pattern p(arity);
  for (std::size_t i = 0; i < arity; ++i) p[i] = at(i);
  return p;
}

// ---------------------------------------------------------------- Hypothesis

Hypothesis Hypothesis::table(Pattern values) { return Hypothesis(std::move(values)); }

Hypothesis Hypothesis::finite_support(Support support) { return patched_constant(0, std::move(support)); }

Hypothesis Hypothesis::patched_constant(Label fallback, Support overrides) {
  std::erase_if(overrides, [fallback](const auto& kv) { return kv.second == fallback; });
  return Hypothesis(Sparse{std::move(overrides), fallback});
}

Label Hypothesis::fallback() const noexcept {
  if (const auto* s = std::get_if<Sparse>(&repr_)) return s->fallback;
  return 0;
}

std::optional<std::size_t> Hypothesis::domain_size() const {
  if (is_table()) return std::get<Pattern>(repr_).size();
  return std::nullopt;
}

const Pattern& Hypothesis::table_values() const {
  if (!is_table()) throw Error(ErrorCode::Representation, "hypothesis is not a table");
  return std::get<Pattern>(repr_);
}

const Hypothesis::Support& Hypothesis::support() const {
  if (is_table()) throw Error(ErrorCode::Representation, "hypothesis is not finite-support");
  return std::get<Sparse>(repr_).support;
}

Label Hypothesis::operator()(Point x) const {
  if (const auto* t = std::get_if<Pattern>(&repr_)) {
    if (x >= t->size())
      throw Error(ErrorCode::Domain,
                  "point " + std::to_string(x) + " outside table domain of size " + std::to_string(t->size()));
    return (*t)[x];
  }
  const auto& s = std::get<Sparse>(repr_);
  auto it = s.support.find(x);
  return it == s.support.end() ? s.fallback : it->second;
}

Pattern Hypothesis::restrict_to(std::span<const Point> points) const {
  Pattern out;
  out.reserve(points.size());
  for (Point x : points) out.push_back((*this)(x));
  return out;
}

std::size_t Hypothesis::extent() const {
  if (const auto* t = std::get_if<Pattern>(&repr_)) return t->size();
  const auto& s = std::get<Sparse>(repr_).support;
  return s.empty() ? 0 : static_cast<std::size_t>(s.rbegin()->first) + 1;
}

Pattern Hypothesis::dense(std::size_t extent) const {
  Pattern out(extent, fallback());
  if (const auto* t = std::get_if<Pattern>(&repr_)) {
    std::copy_n(t->begin(), std::min(extent, t->size()), out.begin());
  } else {
    for (const auto& [x, y] : std::get<Sparse>(repr_).support) {
      if (x >= extent) break;
      out[x] = y;
    }
  }
  return out;
}

std::strong_ordering operator<=>(const Hypothesis& a, const Hypothesis& b) {
  const std::size_t n = std::max(a.extent(), b.extent());
  const Pattern da = a.dense(n);
  const Pattern db = b.dense(n);
  if (auto c = da <=> db; c != 0) return c;
  if (auto c = a.fallback() <=> b.fallback(); c != 0) return c;
  if (auto c = a.extent() <=> b.extent(); c != 0) return c;
  return a.repr_.index() <=> b.repr_.index();
}

std::optional<Point> max_support(const Hypothesis& h) {
  if (h.is_table()) {
    const auto& t = h.table_values();
    for (std::size_t i = t.size(); i-- > 0;)
      if (t[i] != 0) return static_cast<Point>(i);
    return std::nullopt;
  }
  if (h.fallback() != 0) throw Error(ErrorCode::Unsupported, "hypothesis is nonzero on infinitely many points");
  const auto& s = h.support();
  if (s.empty()) return std::nullopt;
  return s.rbegin()->first;
}

Hypothesis truncate(const Hypothesis& h, Point M) {
  Hypothesis::Support out;
  if (h.is_table()) {
    const auto& t = h.table_values();
    for (std::size_t i = 0; i < t.size() && i <= M; ++i)
      if (t[i] != 0) out.emplace(i, t[i]);
  } else if (h.fallback() == 0) {
    for (const auto& [x, y] : h.support()) {
      if (x > M) break;
      out.emplace(x, y);
    }
  } else {
    for (Point x = 0; x <= M; ++x)
      if (Label y = h(x); y != 0) out.emplace(x, y);
  }
  return Hypothesis::finite_support(std::move(out));
}

// ---------------------------------------------------------------- BehaviorSet

bool BehaviorSet::contains(const Pattern& p) const {
  return std::binary_search(patterns.begin(), patterns.end(), p);
}

BehaviorSet BehaviorSet::project(std::span<const std::size_t> coordinates) const {
  PointTuple pts;
  for (std::size_t c : coordinates) {
    if (c >= points.size()) throw Error(ErrorCode::Arity, "projection coordinate out of range");
    pts.push_back(points[c]);
  }
  std::vector<Pattern> out;
  out.reserve(patterns.size());
  for (const auto& p : patterns) {
    Pattern q;
    for (std::size_t c : coordinates) q.push_back(p[c]);
    out.push_back(std::move(q));
  }
  return make_behavior_set(std::move(pts), std::move(out));
}

BehaviorSet make_behavior_set(PointTuple points, std::vector<Pattern> patterns) {
  for (const auto& p : patterns)
    if (p.size() != points.size())
      throw Error(ErrorCode::Representation, "pattern arity " + std::to_string(p.size()) +
                                                 " does not match " + std::to_string(points.size()) + " points");
  std::sort(patterns.begin(), patterns.end());
  patterns.erase(std::unique(patterns.begin(), patterns.end()), patterns.end());
  return BehaviorSet{std::move(points), std::move(patterns)};
}

// ---------------------------------------------------------------- HypothesisClass

struct HypothesisClass::Impl {
  Alphabet alphabet = Alphabet::unbounded();
  std::optional<std::size_t> domain;
  std::optional<std::vector<Hypothesis>> hypotheses;
  Oracle oracle;
  Enumerator enumerator;
};

std::vector<std::size_t> duplicate_indices(const std::vector<Hypothesis>& hypotheses) {
  std::vector<std::size_t> order(hypotheses.size());
  std::iota(order.begin(), order.end(), 0);
  std::stable_sort(order.begin(), order.end(),
                   [&](std::size_t a, std::size_t b) { return hypotheses[a] < hypotheses[b]; });
  std::vector<std::size_t> dups;
  for (std::size_t i = 1; i < order.size(); ++i)
    if (hypotheses[order[i]] == hypotheses[order[i - 1]]) dups.push_back(order[i]);
  std::sort(dups.begin(), dups.end());
  return dups;
}

HypothesisClass HypothesisClass::explicit_class(Alphabet alphabet, std::optional<std::size_t> domain,
                                                std::vector<Hypothesis> hypotheses) {
  for (std::size_t i = 0; i < hypotheses.size(); ++i) {
    const auto& h = hypotheses[i];
    const std::string where = "hypothesis " + std::to_string(i);
    if (h.is_table()) {
      if (!domain)
        throw Error(ErrorCode::Representation, where + ": table hypotheses need a finite domain");
      if (h.table_values().size() != *domain)
        throw Error(ErrorCode::Representation, where + ": table length " + std::to_string(h.table_values().size()) +
                                                   " != domain size " + std::to_string(*domain));
      for (Label y : h.table_values())
        if (!alphabet.contains(y))
          throw Error(ErrorCode::Representation, where + ": label " + std::to_string(y) + " outside alphabet");
    } else {
      if (h.fallback() != 0)
        throw Error(ErrorCode::Representation, where + ": class members must have finite support");
      for (const auto& [x, y] : h.support()) {
        if (domain && x >= *domain)
          throw Error(ErrorCode::Representation, where + ": support point " + std::to_string(x) + " outside domain");
        if (!alphabet.contains(y))
          throw Error(ErrorCode::Representation, where + ": label " + std::to_string(y) + " outside alphabet");
      }
    }
  }
  if (auto dups = duplicate_indices(hypotheses); !dups.empty()) {
    std::string list;
    for (std::size_t d : dups) list += (list.empty() ? "" : ",") + std::to_string(d);
    throw Error(ErrorCode::Representation, "duplicate hypotheses at indices " + list);
  }
  std::sort(hypotheses.begin(), hypotheses.end());
  auto impl = std::make_shared<Impl>();
  impl->alphabet = alphabet;
  impl->domain = domain;
  impl->hypotheses = std::move(hypotheses);
  return HypothesisClass(std::move(impl));
}

HypothesisClass HypothesisClass::from_oracle(Alphabet alphabet, std::optional<std::size_t> domain, Oracle oracle,
                                             Enumerator enumerator) {
  if (!oracle) throw Error(ErrorCode::Representation, "oracle class needs a behavior oracle");
  auto impl = std::make_shared<Impl>();
  impl->alphabet = alphabet;
  impl->domain = domain;
  impl->oracle = std::move(oracle);
  impl->enumerator = std::move(enumerator);
  return HypothesisClass(std::move(impl));
}

bool HypothesisClass::is_explicit() const noexcept { return impl_->hypotheses.has_value(); }
const Alphabet& HypothesisClass::alphabet() const noexcept { return impl_->alphabet; }
std::optional<std::size_t> HypothesisClass::domain_size() const noexcept { return impl_->domain; }

const std::vector<Hypothesis>& HypothesisClass::hypotheses() const {
  if (!impl_->hypotheses) throw Error(ErrorCode::Representation, "oracle class has no explicit hypothesis list");
  return *impl_->hypotheses;
}

std::optional<Point> HypothesisClass::max_support() const {
  std::optional<Point> best;
  for (const auto& h : hypotheses())
    if (auto m = dimkit::max_support(h); m && (!best || *m > *best)) best = m;
  return best;
}

HypothesisClass::Enumerator HypothesisClass::enumerator() const {
  if (impl_->hypotheses) {
    auto impl = impl_;
    return [impl](std::size_t i) -> std::optional<Hypothesis> {
      if (i >= impl->hypotheses->size()) return std::nullopt;
      return (*impl->hypotheses)[i];
    };
  }
  return impl_->enumerator;
}

BehaviorSet HypothesisClass::behaviors(std::span<const Point> points) const {
  PointTuple pts(points.begin(), points.end());
  if (impl_->hypotheses) {
    std::vector<Pattern> out;
    out.reserve(impl_->hypotheses->size());
    for (const auto& h : *impl_->hypotheses) out.push_back(h.restrict_to(points));
    return make_behavior_set(std::move(pts), std::move(out));
  }
  std::vector<Pattern> out = impl_->oracle(points);
  for (const auto& p : out)
    if (p.size() != points.size())
      throw Error(ErrorCode::Representation, "oracle returned a pattern of arity " + std::to_string(p.size()) +
                                                 " for " + std::to_string(points.size()) + " points");
  return make_behavior_set(std::move(pts), std::move(out));
}

BehaviorSet restrict(const HypothesisClass& H, std::span<const Point> X) {
  std::set<Point> seen;
  for (Point x : X) {
    if (auto n = H.domain_size(); n && x >= *n)
      throw Error(ErrorCode::Domain, "point " + std::to_string(x) + " outside domain [0," + std::to_string(*n) + ")");
    if (!seen.insert(x).second)
      throw Error(ErrorCode::Precondition, "point " + std::to_string(x) + " repeated in tuple");
  }
  return H.behaviors(X);
}

// ---------------------------------------------------------------- samples and risks

PointTuple sample_points(const LabeledSample& S) {
  PointTuple pts;
  for (const auto& e : S) pts.push_back(e.x);
  std::sort(pts.begin(), pts.end());
  pts.erase(std::unique(pts.begin(), pts.end()), pts.end());
  return pts;
}

FiniteDistribution::FiniteDistribution(std::vector<Atom> atoms) : atoms_(std::move(atoms)) {
  if (atoms_.empty()) throw Error(ErrorCode::Precondition, "distribution needs at least one atom");
  Rational total = 0;
  std::set<Example> keys;
  for (const auto& a : atoms_) {
    if (a.weight <= 0) throw Error(ErrorCode::Precondition, "atom weights must be positive");
    if (!keys.insert(a.example).second) throw Error(ErrorCode::Precondition, "duplicate atom in distribution");
    total += a.weight;
  }
  if (total != 1) throw Error(ErrorCode::Precondition, "weights sum to " + to_string(total) + ", not 1");
}

FiniteDistribution FiniteDistribution::uniform(const std::vector<Example>& support) {
  std::vector<Atom> atoms;
  const Rational w = support.empty() ? Rational(0) : Rational(BigInt(1), BigInt(support.size()));
  for (const auto& e : support) atoms.push_back({e, w});
  return FiniteDistribution(std::move(atoms));
}

Rational empirical_risk(const Hypothesis& h, const LabeledSample& S) {
  if (S.empty()) throw Error(ErrorCode::Precondition, "empirical risk of an empty sample");
  std::size_t mistakes = 0;
  for (const auto& e : S)
    if (h(e.x) != e.y) ++mistakes;
  return Rational(BigInt(mistakes), BigInt(S.size()));
}

Rational true_risk(const Hypothesis& h, const FiniteDistribution& D) {
  Rational r = 0;
  for (const auto& a : D.atoms())
    if (h(a.example.x) != a.example.y) r += a.weight;
  return r;
}

Pattern mixture(const IndexSet& I, std::span<const Label> y, std::span<const Label> y_prime) {
  if (y.size() != y_prime.size() || I.arity != y.size())
    throw Error(ErrorCode::Arity, "mixture needs labelings and index set of equal arity");
  Pattern out(y.size());
  for (std::size_t i = 0; i < y.size(); ++i) out[i] = I.contains(i) ? y[i] : y_prime[i];
  return out;
}

std::string to_string(const Pattern& p) {
  std::ostringstream os;
  os << '(';
  for (std::size_t i = 0; i < p.size(); ++i) os << (i ? "," : "") << p[i];
  os << ')';
  return os.str();
}

std::string to_string(const PointTuple& p) {
  std::ostringstream os;
  os << '(';
  for (std::size_t i = 0; i < p.size(); ++i) os << (i ? "," : "") << p[i];
  os << ')';
  return os.str();
}

}  // namespace dimkit
