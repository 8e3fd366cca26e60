#pragma once

#include "dimkit/error.hpp"
#include "dimkit/rational.hpp"

#include <compare>
#include <cstdint>
#include <functional>
#include <map>
#include <memory>
#include <optional>
#include <span>
#include <string>
#include <variant>
#include <vector>

namespace dimkit {

using Label = std::uint32_t;
using Point = std::uint64_t;
using Pattern = std::vector<Label>;
using PointTuple = std::vector<Point>;

/// Finite label set {0, ..., size-1}, or the unbounded alphabet N.
class Alphabet {
 public:
  static Alphabet bounded(std::size_t count);
  static Alphabet unbounded() { return Alphabet{}; }

  bool is_bounded() const noexcept { return count_.has_value(); }
  /// Number of labels. Throws Unsupported for the unbounded alphabet.
  std::size_t size() const;
  bool contains(Label y) const noexcept { return !count_ || y < *count_; }

  friend bool operator==(const Alphabet&, const Alphabet&) = default;

 private:
  Alphabet() = default;
  std::optional<std::size_t> count_;
};

/// Subset of the coordinates {0, ..., arity-1}, bit i set iff i is a member.
struct IndexSet {
  std::uint64_t mask = 0;
  std::size_t arity = 0;

  static IndexSet full(std::size_t arity);
  bool contains(std::size_t i) const noexcept { return (mask >> i) & 1U; }
  std::vector<std::size_t> indices() const;

  friend bool operator==(const IndexSet&, const IndexSet&) = default;
};

/// Element of {0,1}^arity, coordinate i stored in bit i.
struct BinaryPattern {
  std::uint64_t bits = 0;
  std::size_t arity = 0;

  Label at(std::size_t i) const noexcept { return static_cast<Label>((bits >> i) & 1U); }
  Pattern to_pattern() const;

  friend bool operator==(const BinaryPattern&, const BinaryPattern&) = default;
};

inline constexpr std::size_t kMaxArity = 62;

/// A total labeling of a finite domain [n] (table) or of N with finitely
/// many nonzero values (finite support). Immutable value type.
///
/// Learners may also output functions that are constant off finitely many
/// points; those are sparse hypotheses with a nonzero fallback label.
class Hypothesis {
 public:
  using Support = std::map<Point, Label>;

  static Hypothesis table(Pattern values);
  /// Zero entries are dropped so the support map holds only nonzero labels.
  static Hypothesis finite_support(Support support);
  /// `fallback` everywhere except the listed points.
  static Hypothesis patched_constant(Label fallback, Support overrides);
  static Hypothesis zero() { return finite_support({}); }

  bool is_table() const noexcept { return std::holds_alternative<Pattern>(repr_); }
  /// Label off the support (0 for finite-support and table hypotheses).
  Label fallback() const noexcept;
  /// Table length, or nullopt for finite-support hypotheses over N.
  std::optional<std::size_t> domain_size() const;
  const Pattern& table_values() const;
  const Support& support() const;

  Label operator()(Point x) const;
  Pattern restrict_to(std::span<const Point> points) const;
  /// Values on [0, extent).
  Pattern dense(std::size_t extent) const;
  /// One past the largest point that must be listed to describe the function.
  std::size_t extent() const;

  friend bool operator==(const Hypothesis&, const Hypothesis&) = default;
  friend std::strong_ordering operator<=>(const Hypothesis& a, const Hypothesis& b);

 private:
  struct Sparse {
    Support support;
    Label fallback = 0;
    friend bool operator==(const Sparse&, const Sparse&) = default;
  };
  explicit Hypothesis(std::variant<Pattern, Sparse> repr) : repr_(std::move(repr)) {}
  std::variant<Pattern, Sparse> repr_;
};

/// M(h): the largest point with a nonzero label, nullopt for the zero function.
/// Unsupported for hypotheses with a nonzero fallback (M(h) is infinite).
std::optional<Point> max_support(const Hypothesis& h);

/// h_M: agrees with h on [0, M], zero beyond. Always finite-support.
Hypothesis truncate(const Hypothesis& h, Point M);

/// H|_X: lexicographically sorted, duplicate-free patterns on an ordered point tuple.
struct BehaviorSet {
  PointTuple points;
  std::vector<Pattern> patterns;

  std::size_t size() const noexcept { return patterns.size(); }
  bool contains(const Pattern& p) const;
  /// Restriction to the coordinates listed in `coordinates` (indices into points).
  BehaviorSet project(std::span<const std::size_t> coordinates) const;

  friend bool operator==(const BehaviorSet&, const BehaviorSet&) = default;
};

/// Sorts and deduplicates; validates uniform arity.
BehaviorSet make_behavior_set(PointTuple points, std::vector<Pattern> patterns);

class HypothesisClass {
 public:
  /// Returns H|_T for a duplicate-free tuple T.
  using Oracle = std::function<std::vector<Pattern>(std::span<const Point>)>;
  /// Enumerates hypotheses by index; nullopt marks the end of the stream.
  using Enumerator = std::function<std::optional<Hypothesis>(std::size_t)>;

  /// Hypotheses are sorted canonically; duplicates are a Representation error.
  static HypothesisClass explicit_class(Alphabet alphabet, std::optional<std::size_t> domain,
                                        std::vector<Hypothesis> hypotheses);
  static HypothesisClass from_oracle(Alphabet alphabet, std::optional<std::size_t> domain,
                                     Oracle oracle, Enumerator enumerator = {});

  bool is_explicit() const noexcept;
  const Alphabet& alphabet() const noexcept;
  /// nullopt when the domain is N.
  std::optional<std::size_t> domain_size() const noexcept;
  const std::vector<Hypothesis>& hypotheses() const;
  std::size_t size() const { return hypotheses().size(); }
  /// Largest nonzero point over all hypotheses of an explicit class.
  std::optional<Point> max_support() const;
  /// Stream over the class: explicit classes enumerate in canonical order.
  Enumerator enumerator() const;

  BehaviorSet behaviors(std::span<const Point> points) const;

 private:
  struct Impl;
  explicit HypothesisClass(std::shared_ptr<const Impl> impl) : impl_(std::move(impl)) {}
  std::shared_ptr<const Impl> impl_;
};

/// Duplicate indices (later copies) in a hypothesis list, for diagnostics.
std::vector<std::size_t> duplicate_indices(const std::vector<Hypothesis>& hypotheses);

/// H|_X, with domain checks. Errors: Domain, Representation, Precondition on repeated points.
BehaviorSet restrict(const HypothesisClass& H, std::span<const Point> X);

struct Example {
  Point x = 0;
  Label y = 0;
  friend auto operator<=>(const Example&, const Example&) = default;
};

using LabeledSample = std::vector<Example>;

/// Distinct points of a sample, ascending.
PointTuple sample_points(const LabeledSample& S);

class FiniteDistribution {
 public:
  struct Atom {
    Example example;
    Rational weight;
  };

  /// Weights must be positive and sum to one; keys must be distinct.
  explicit FiniteDistribution(std::vector<Atom> atoms);
  static FiniteDistribution uniform(const std::vector<Example>& support);

  const std::vector<Atom>& atoms() const noexcept { return atoms_; }

 private:
  std::vector<Atom> atoms_;
};

/// Points paired with their labels (g1, g2, f, y, y' of the shattering definitions).
struct Labeling {
  PointTuple points;
  Pattern values;
  friend bool operator==(const Labeling&, const Labeling&) = default;
};

Rational empirical_risk(const Hypothesis& h, const LabeledSample& S);
Rational true_risk(const Hypothesis& h, const FiniteDistribution& D);

/// f_{I,y,y'}: y at coordinates in I, y' elsewhere.
Pattern mixture(const IndexSet& I, std::span<const Label> y, std::span<const Label> y_prime);

std::string to_string(const Pattern& p);
std::string to_string(const PointTuple& p);

}  // namespace dimkit
