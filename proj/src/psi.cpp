#include "dimkit/psi.hpp"

#include <algorithm>
#include <set>

namespace dimkit {

char to_char(PsiValue v) {
  switch (v) {
    case PsiValue::Zero: return '0';
    case PsiValue::One: return '1';
    case PsiValue::Star: return '*';
  }
  return '?';
}

PsiFunction::PsiFunction(std::vector<PsiValue> values) : values_(std::move(values)) {
  if (values_.empty()) throw Error(ErrorCode::Precondition, "psi function needs at least one label");
}

PsiFunction PsiFunction::parse(const std::string& text) {
  std::vector<PsiValue> values;
  for (char c : text) {
    switch (c) {
      case '0': values.push_back(PsiValue::Zero); break;
      case '1': values.push_back(PsiValue::One); break;
      case '*': values.push_back(PsiValue::Star); break;
      default: throw Error(ErrorCode::Schema, std::string("psi symbol must be 0, 1 or *, got '") + c + "'");
    }
  }
  return PsiFunction(std::move(values));
}

PsiValue PsiFunction::operator()(Label y) const {
  if (y >= values_.size())
    throw Error(ErrorCode::Domain, "label " + std::to_string(y) + " outside psi alphabet");
  return values_[y];
}

std::string PsiFunction::to_string() const {
  std::string s;
  for (PsiValue v : values_) s.push_back(to_char(v));
  return s;
}

PsiFamily::PsiFamily(std::size_t label_count, std::vector<PsiFunction> members)
    : label_count_(label_count), members_(std::move(members)) {
  if (members_.empty()) throw Error(ErrorCode::Precondition, "psi family must be nonempty");
  std::set<PsiFunction> seen;
  for (const auto& m : members_) {
    if (m.label_count() != label_count_)
      throw Error(ErrorCode::Arity, "psi member " + m.to_string() + " does not cover " +
                                        std::to_string(label_count_) + " labels");
    if (!seen.insert(m).second) throw Error(ErrorCode::Representation, "duplicate psi member " + m.to_string());
  }
}

PsiFamily make_psi_G(std::size_t label_count) {
  if (label_count < 2) throw Error(ErrorCode::Precondition, "psi_G needs at least two labels");
  std::vector<PsiFunction> members;
  for (std::size_t k = 0; k < label_count; ++k) {
    std::vector<PsiValue> v(label_count, PsiValue::Zero);
    v[k] = PsiValue::One;
    members.emplace_back(std::move(v));
  }
  return PsiFamily(label_count, std::move(members));
}

PsiFamily make_psi_N(std::size_t label_count) {
  if (label_count < 2) throw Error(ErrorCode::Precondition, "psi_N needs at least two labels");
  std::vector<PsiFunction> members;
  for (std::size_t k = 0; k < label_count; ++k) {
    for (std::size_t k2 = 0; k2 < label_count; ++k2) {
      if (k == k2) continue;
      std::vector<PsiValue> v(label_count, PsiValue::Star);
      v[k] = PsiValue::One;
      v[k2] = PsiValue::Zero;
      members.emplace_back(std::move(v));
    }
  }
  return PsiFamily(label_count, std::move(members));
}

DistinguisherCheck check_distinguisher(const PsiFamily& family) {
  const std::size_t q = family.label_count();
  for (Label a = 0; a < q; ++a) {
    for (Label b = a + 1; b < q; ++b) {
      const bool separated = std::any_of(family.members().begin(), family.members().end(), [&](const PsiFunction& f) {
        const PsiValue va = f(a), vb = f(b);
        return va != PsiValue::Star && vb != PsiValue::Star && va != vb;
      });
      if (!separated) return {false, std::make_pair(a, b)};
    }
  }
  return {true, std::nullopt};
}

std::optional<BinaryPattern> apply_psi(const PsiFamily& family, std::span<const std::size_t> members,
                                       std::span<const Label> labels) {
  if (members.size() != labels.size()) throw Error(ErrorCode::Arity, "psi tuple and label tuple differ in length");
  BinaryPattern out{0, labels.size()};
  for (std::size_t i = 0; i < labels.size(); ++i) {
    const PsiValue v = family[members[i]](labels[i]);
    if (v == PsiValue::Star) return std::nullopt;
    if (v == PsiValue::One) out.bits |= std::uint64_t{1} << i;
  }
  return out;
}

std::vector<PsiFunction> all_psi_functions(std::size_t label_count) {
  std::vector<PsiFunction> out;
  std::vector<std::size_t> digits(label_count, 0);
  while (true) {
    std::vector<PsiValue> v;
    for (std::size_t d : digits) v.push_back(static_cast<PsiValue>(d));
    out.emplace_back(std::move(v));
    std::size_t i = label_count;
    while (i > 0 && digits[i - 1] == 2) digits[--i] = 0;
    if (i == 0) break;
    ++digits[i - 1];
  }
  return out;
}

}  // namespace dimkit
