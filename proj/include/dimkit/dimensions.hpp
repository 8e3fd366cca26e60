#pragma once

#include "dimkit/combinatorics.hpp"
#include "dimkit/core.hpp"
#include "dimkit/psi.hpp"

#include <optional>
#include <string>
#include <variant>
#include <vector>

namespace dimkit {

class DimensionKind {
 public:
  enum class Tag { VC, Natarajan, Graph, DS, Psi };

  static DimensionKind vc() { return DimensionKind(Tag::VC, std::nullopt); }
  static DimensionKind natarajan() { return DimensionKind(Tag::Natarajan, std::nullopt); }
  static DimensionKind graph() { return DimensionKind(Tag::Graph, std::nullopt); }
  static DimensionKind ds() { return DimensionKind(Tag::DS, std::nullopt); }
  static DimensionKind psi(PsiFamily family) { return DimensionKind(Tag::Psi, std::move(family)); }

  Tag tag() const noexcept { return tag_; }
  const PsiFamily& family() const;
  std::string name() const;

 private:
  DimensionKind(Tag tag, std::optional<PsiFamily> family) : tag_(tag), family_(std::move(family)) {}
  Tag tag_;
  std::optional<PsiFamily> family_;
};

struct NatarajanEvidence {
  Pattern g1, g2;
};
struct GraphEvidence {
  Pattern f;
};
struct DsEvidence {
  std::vector<Pattern> cube;
};
struct PsiEvidence {
  std::vector<std::size_t> members;
};
struct VcEvidence {};

using ShatterEvidence = std::variant<VcEvidence, NatarajanEvidence, GraphEvidence, DsEvidence, PsiEvidence>;

struct ShatterCertificate {
  PointTuple points;
  ShatterEvidence evidence;
};

// Shattering predicates on a behavior set B = H|_X. Each returns evidence or nullopt.
std::optional<VcEvidence> vc_shatters(const BehaviorSet& B);
/// Candidates are realized patterns g1 < g2 componentwise; the result is the
/// lexicographically smallest valid (g1, g2).
std::optional<NatarajanEvidence> natarajan_shatters(const BehaviorSet& B);
std::optional<GraphEvidence> graph_shatters(const BehaviorSet& B);
std::optional<DsEvidence> ds_shatters(const BehaviorSet& B);
/// Star outputs never count toward coverage.
std::optional<PsiEvidence> psi_shatters(const BehaviorSet& B, const PsiFamily& family);

/// Every pattern has, for each coordinate, a neighbor differing exactly there.
bool is_pseudo_cube(const std::vector<Pattern>& B);
/// Largest subset closed under the neighbor requirement (union of all
/// pseudo-cubes inside B); empty iff B contains no pseudo-cube.
std::vector<Pattern> pseudo_cube_core(std::vector<Pattern> B);

std::optional<ShatterCertificate> is_vc_shattered(const HypothesisClass& H, std::span<const Point> X);
std::optional<ShatterCertificate> is_n_shattered(const HypothesisClass& H, std::span<const Point> X);
std::optional<ShatterCertificate> is_g_shattered(const HypothesisClass& H, std::span<const Point> X);
std::optional<ShatterCertificate> is_ds_shattered(const HypothesisClass& H, std::span<const Point> X);
std::optional<ShatterCertificate> is_psi_shattered(const HypothesisClass& H, std::span<const Point> X,
                                                   const PsiFamily& family);
std::optional<ShatterCertificate> is_shattered(const HypothesisClass& H, std::span<const Point> X,
                                               const DimensionKind& kind);

/// Re-checks a certificate against the class from scratch.
bool verify_certificate(const HypothesisClass& H, const DimensionKind& kind, const ShatterCertificate& cert);

struct DimensionResult {
  std::size_t dimension = 0;
  std::optional<ShatterCertificate> certificate;
  Point window = 0;
  std::vector<std::string> warnings;
};

/// Largest shattered subset of the window [0, window]. Explicit classes over a
/// finite domain default to the domain, explicit finite-support classes to their
/// largest support point; oracle classes over N need an explicit window.
DimensionResult exact_dimension(const HypothesisClass& H, const DimensionKind& kind,
                                std::optional<Point> window = std::nullopt, SearchOptions options = {});

struct SauerReport {
  BigInt count;
  BigInt bound;
  bool holds = false;
};

/// |H|_T| against |T|^d (q)^{2d}.
SauerReport sauer_natarajan_check(const HypothesisClass& H, std::span<const Point> T, std::size_t d);

}  // namespace dimkit
