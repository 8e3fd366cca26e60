#pragma once

#include "dimkit/core.hpp"

#include <optional>
#include <string>
#include <utility>
#include <vector>

namespace dimkit {

enum class PsiValue : std::uint8_t { Zero = 0, One = 1, Star = 2 };

char to_char(PsiValue v);

/// A total map from labels {0, ..., q-1} to {0, 1, *}.
class PsiFunction {
 public:
  explicit PsiFunction(std::vector<PsiValue> values);
  /// Parses a string over "01*", one character per label.
  static PsiFunction parse(const std::string& text);

  std::size_t label_count() const noexcept { return values_.size(); }
  PsiValue operator()(Label y) const;
  const std::vector<PsiValue>& values() const noexcept { return values_; }
  std::string to_string() const;

  friend auto operator<=>(const PsiFunction&, const PsiFunction&) = default;

 private:
  std::vector<PsiValue> values_;
};

/// Nonempty, duplicate-free family of Psi functions over a shared alphabet.
/// Members keep their construction order; certificates refer to member indices.
class PsiFamily {
 public:
  PsiFamily(std::size_t label_count, std::vector<PsiFunction> members);

  std::size_t label_count() const noexcept { return label_count_; }
  std::size_t size() const noexcept { return members_.size(); }
  const PsiFunction& operator[](std::size_t i) const { return members_.at(i); }
  const std::vector<PsiFunction>& members() const noexcept { return members_; }

  friend bool operator==(const PsiFamily&, const PsiFamily&) = default;

 private:
  std::size_t label_count_;
  std::vector<PsiFunction> members_;
};

/// Psi_G: the indicator of each label. Size q.
PsiFamily make_psi_G(std::size_t label_count);
/// Psi_N: psi_{k,k'} maps k to 1, k' to 0 and everything else to *. Size q(q-1).
PsiFamily make_psi_N(std::size_t label_count);

struct DistinguisherCheck {
  bool is_distinguisher = false;
  /// Lexicographically first pair of labels no member separates.
  std::optional<std::pair<Label, Label>> failing_pair;
};

DistinguisherCheck check_distinguisher(const PsiFamily& family);

/// psi-bar applied coordinatewise; nullopt if any coordinate maps to *.
std::optional<BinaryPattern> apply_psi(const PsiFamily& family, std::span<const std::size_t> members,
                                       std::span<const Label> labels);

/// Every function from q labels to {0,1,*}, in lexicographic order (0 < 1 < *).
std::vector<PsiFunction> all_psi_functions(std::size_t label_count);

}  // namespace dimkit
