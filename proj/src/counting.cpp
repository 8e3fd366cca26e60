#include "dimkit/counting.hpp"

#include "dimkit/embedding.hpp"

#include <map>
#include <mutex>

namespace dimkit {

std::size_t min_kb(std::size_t k_N, std::size_t q) {
  if (q < 2) throw Error(ErrorCode::Precondition, "alphabet must have at least two labels");
  const BigInt q_part = pow(BigInt(q), 2 * (k_N + 1));
  BigInt two_pow = 2;
  for (std::size_t k = 1;; ++k, two_pow *= 2)
    if (pow(BigInt(k), k_N + 1) * q_part < two_pow) return k;
}

CountingInequality counting_inequality(std::size_t k_N, std::size_t q) {
  CountingInequality c;
  c.k_N = k_N;
  c.q = q;
  c.k_B = min_kb(k_N, q);
  c.order = c.k_B - 1;
  c.lhs = pow(BigInt(2), c.order);
  c.rhs = pow(BigInt(c.order) * q * q, k_N + 1);
  // d = 0 makes the left side 0 / (-inf), which holds trivially.
  c.holds = c.order == 0 || c.lhs <= c.rhs;
  return c;
}

namespace {

struct BehaviorMemo {
  explicit BehaviorMemo(AugmentedClass aug) : aug(std::move(aug)) {}
  AugmentedClass aug;
  std::mutex mu;
  std::map<PointTuple, std::shared_ptr<const BehaviorSet>> cache;

  std::shared_ptr<const BehaviorSet> get(std::span<const Point> T) {
    PointTuple key(T.begin(), T.end());
    {
      std::lock_guard lock(mu);
      if (auto it = cache.find(key); it != cache.end()) return it->second;
    }
    auto v = std::make_shared<const BehaviorSet>(aug.behaviors(T).behaviors);
    std::lock_guard lock(mu);
    return cache.emplace(std::move(key), std::move(v)).first->second;
  }
};

}  // namespace

Witness psi_witness_from_natarajan(const Witness& natarajan, const PsiFamily& family, SearchOptions options) {
  if (natarajan.kind().tag() != DimensionKind::Tag::Natarajan)
    throw Error(ErrorCode::Precondition, "expected a Natarajan witness");
  if (!natarajan.alphabet().is_bounded()) throw Error(ErrorCode::Unsupported, "needs a finite label alphabet");
  const std::size_t q = natarajan.alphabet().size();
  if (family.label_count() != q)
    throw Error(ErrorCode::Precondition, "psi family alphabet differs from the witness alphabet");
  const std::size_t k_N = natarajan.order();
  const std::size_t k_B = min_kb(k_N, q);
  const BigInt bound = pow(BigInt(k_B), k_N + 1) * pow(BigInt(q), 2 * (k_N + 1));
  auto memo = std::make_shared<BehaviorMemo>(AugmentedClass(GoodFunctionSpec{natarajan, std::nullopt}, options));
  return Witness::psi(
      k_B - 1, family,
      [memo, family, bound](std::span<const Point> T, std::span<const std::size_t> members) {
        const auto v = memo->get(T);
        if (BigInt(v->size()) > bound)
          throw Error(ErrorCode::InternalConsistency, "|v(T)| = " + std::to_string(v->size()) +
                                                          " exceeds the counting bound " + bound.str());
        const std::size_t n = T.size();
        std::vector<bool> seen(std::size_t{1} << n, false);
        for (const auto& p : v->patterns)
          if (auto img = apply_psi(family, members, p)) seen[img->bits] = true;
        for (std::uint64_t t = 0; t < seen.size(); ++t) {
          std::uint64_t bits = 0;
          for (std::size_t i = 0; i < n; ++i)
            if ((t >> (n - 1 - i)) & 1U) bits |= std::uint64_t{1} << i;
          if (!seen[bits]) return BinaryPattern{bits, n};
        }
        throw Error(ErrorCode::InternalConsistency, "psi(v(T)) covers every binary pattern");
      },
      Provenance::FromCounting);
}

}  // namespace dimkit
