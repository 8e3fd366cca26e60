#pragma once

#include "dimkit/core.hpp"
#include "dimkit/dimensions.hpp"
#include "dimkit/gallery.hpp"
#include "dimkit/psi.hpp"
#include "dimkit/witness.hpp"

#include <json.hpp>

#include <optional>
#include <string>
#include <vector>

namespace dimkit {

using Json = nlohmann::json;

/// Parses a file; syntax errors become Schema errors with line and column.
Json read_json_file(const std::string& path);

struct ParsedClass {
  HypothesisClass cls;
  std::vector<std::string> warnings;
  /// Set when the document named a gallery entry.
  std::optional<GalleryEntry> entry;
};

/// {"labels": q, "domain": n | "nat", "hypotheses": [[...], ...] | [{"support": {"x": y}}, ...]}
/// or {"gallery": name, "params": {...}}. Duplicate hypotheses are dropped
/// with a warning naming their indices.
ParsedClass parse_class_json(const Json& doc, const std::optional<PsiFamily>& family = std::nullopt);
/// Canonical class document for explicit classes; parse_class_json inverts it.
Json class_to_json(const HypothesisClass& H);

/// {"labels": q, "family": ["01*", ...]} (rows may also be arrays of "0"/"1"/"*")
/// or {"builtin": "psi_N" | "psi_G", "labels": q}.
PsiFamily parse_psi_json(const Json& doc);
Json psi_to_json(const PsiFamily& family);

/// {"num": n, "den": d}; integers beyond 64 bits are written as decimal strings.
Json rational_json(const Rational& r);
Json bigint_json(const BigInt& v);
Json hypothesis_json(const Hypothesis& h);
Json certificate_json(const ShatterCertificate& cert);
Json witness_report_json(const WitnessReport& report);

/// Comma-separated nonnegative integers, e.g. "0,1,2".
std::vector<std::uint64_t> parse_uint_list(const std::string& text);
/// "x:y,x:y,..." inline, or a JSON file holding [[x, y], ...].
LabeledSample parse_sample(const std::string& text_or_path);
Json sample_json(const LabeledSample& S);

/// Witness documents:
///   {"canonical": {"flavor": "natarajan" | "graph" | "psi", "order": k}}
///   {"gallery": name, "params": {...}}              (the entry's bundled witness)
///   {"flavor": ..., "order": k, "labels": q, "family": psi-doc?, "entries": [...]}
/// Tabulated entries hold "points" plus "g1"/"g2"/"I", "f"/"I" or "psi"/"pattern".
Witness parse_witness_json(const Json& doc, const HypothesisClass& base,
                           const std::optional<PsiFamily>& family = std::nullopt);

/// Tabulates a witness on every input with points in [0, window] (domain-capped).
Json tabulate_witness(const Witness& w, std::size_t label_count, std::size_t points);

std::string sha256_hex(const std::string& data);

/// {"command", "inputs_digest", "result", "certificates", "warnings"}.
Json make_report(const std::string& command, const Json& inputs, Json result, Json certificates,
                 const std::vector<std::string>& warnings);

}  // namespace dimkit
