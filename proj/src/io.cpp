#include "dimkit/io.hpp"

#include <openssl/evp.h>

#include <algorithm>
#include <filesystem>
#include <fstream>
#include <map>
#include <numeric>
#include <sstream>

namespace dimkit {

namespace {

[[noreturn]] void schema(const std::string& msg) { throw Error(ErrorCode::Schema, msg); }

std::uint64_t as_uint(const Json& j, const std::string& where) {
  if (!j.is_number_integer() || j.get<long long>() < 0) schema(where + ": expected a nonnegative integer");
  return j.get<std::uint64_t>();
}

std::uint64_t parse_uint(const std::string& s, const std::string& where) {
  if (s.empty() || !std::all_of(s.begin(), s.end(), [](unsigned char c) { return std::isdigit(c); }))
    schema(where + ": '" + s + "' is not a nonnegative integer");
  try {
    return std::stoull(s);
  } catch (const std::exception&) {
    schema(where + ": '" + s + "' is out of range");
  }
}

Pattern as_pattern(const Json& j, const std::string& where) {
  if (!j.is_array()) schema(where + ": expected an array of labels");
  Pattern p;
  for (std::size_t i = 0; i < j.size(); ++i)
    p.push_back(static_cast<Label>(as_uint(j[i], where + "[" + std::to_string(i) + "]")));
  return p;
}

PointTuple as_points(const Json& j, const std::string& where) {
  if (!j.is_array()) schema(where + ": expected an array of points");
  PointTuple p;
  for (std::size_t i = 0; i < j.size(); ++i) p.push_back(as_uint(j[i], where + "[" + std::to_string(i) + "]"));
  return p;
}

std::string join(const std::vector<std::size_t>& v) {
  std::string s;
  for (std::size_t x : v) s += (s.empty() ? "" : ",") + std::to_string(x);
  return s;
}

}  // namespace

Json read_json_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) schema("cannot open '" + path + "'");
  try {
    return Json::parse(in);
  } catch (const Json::parse_error& e) {
    schema(path + ": " + e.what());
  }
}

// ---------------------------------------------------------------- classes

ParsedClass parse_class_json(const Json& doc, const std::optional<PsiFamily>& family) {
  if (!doc.is_object()) schema("class document must be a JSON object");
  if (doc.contains("gallery")) {
    if (!doc["gallery"].is_string()) schema("gallery: expected a name");
    std::map<std::string, long long> params;
    if (doc.contains("params")) {
      if (!doc["params"].is_object()) schema("params: expected an object");
      for (const auto& [k, v] : doc["params"].items()) {
        if (!v.is_number_integer()) schema("params." + k + ": expected an integer");
        params[k] = v.get<long long>();
      }
    }
    GalleryEntry e = gallery_lookup(doc["gallery"].get<std::string>(), params, family);
    return ParsedClass{e.cls, {}, e};
  }
  if (!doc.contains("labels")) schema("labels: required");
  const std::uint64_t q = as_uint(doc["labels"], "labels");
  if (q == 0) schema("labels: must be at least 1");
  std::optional<std::size_t> domain;
  if (doc.contains("domain")) {
    const Json& d = doc["domain"];
    if (d.is_string()) {
      if (d.get<std::string>() != "nat") schema("domain: expected an integer or \"nat\"");
    } else {
      domain = as_uint(d, "domain");
    }
  }
  if (!doc.contains("hypotheses") || !doc["hypotheses"].is_array()) schema("hypotheses: required array");
  std::vector<Hypothesis> hs;
  const Json& rows = doc["hypotheses"];
  for (std::size_t i = 0; i < rows.size(); ++i) {
    const std::string where = "hypotheses[" + std::to_string(i) + "]";
    const Json& row = rows[i];
    if (row.is_array()) {
      if (!domain) schema(where + ": table rows need a finite domain");
      Pattern p = as_pattern(row, where);
      if (p.size() != *domain)
        schema(where + ": length " + std::to_string(p.size()) + " != domain " + std::to_string(*domain));
      for (std::size_t j = 0; j < p.size(); ++j)
        if (p[j] >= q)
          schema(where + "[" + std::to_string(j) + "]: label " + std::to_string(p[j]) + " >= labels " +
                 std::to_string(q));
      hs.push_back(Hypothesis::table(std::move(p)));
    } else if (row.is_object() && row.contains("support") && row["support"].is_object()) {
      Hypothesis::Support s;
      for (const auto& [k, v] : row["support"].items()) {
        const std::string at = where + ".support." + k;
        const Point x = parse_uint(k, at);
        const std::uint64_t y = as_uint(v, at);
        if (y >= q) schema(at + ": label " + std::to_string(y) + " >= labels " + std::to_string(q));
        if (domain && x >= *domain) schema(at + ": point outside domain " + std::to_string(*domain));
        s[x] = static_cast<Label>(y);
      }
      hs.push_back(Hypothesis::finite_support(std::move(s)));
    } else {
      schema(where + ": expected a label array or {\"support\": {...}}");
    }
  }
  ParsedClass out{HypothesisClass::explicit_class(Alphabet::bounded(q), domain, {}), {}, std::nullopt};
  if (auto dups = duplicate_indices(hs); !dups.empty()) {
    out.warnings.push_back("dropped duplicate hypotheses at indices " + join(dups));
    for (auto it = dups.rbegin(); it != dups.rend(); ++it) hs.erase(hs.begin() + static_cast<std::ptrdiff_t>(*it));
  }
  out.cls = HypothesisClass::explicit_class(Alphabet::bounded(q), domain, std::move(hs));
  return out;
}

Json class_to_json(const HypothesisClass& H) {
  Json doc;
  doc["labels"] = H.alphabet().size();
  if (auto n = H.domain_size())
    doc["domain"] = *n;
  else
    doc["domain"] = "nat";
  Json rows = Json::array();
  for (const auto& h : H.hypotheses()) {
    if (h.is_table()) {
      rows.push_back(h.table_values());
    } else {
      Json s = Json::object();
      for (const auto& [x, y] : h.support()) s[std::to_string(x)] = y;
      rows.push_back(Json{{"support", s}});
    }
  }
  doc["hypotheses"] = rows;
  return doc;
}

// ---------------------------------------------------------------- psi families

PsiFamily parse_psi_json(const Json& doc) {
  if (!doc.is_object()) schema("psi document must be a JSON object");
  if (!doc.contains("labels")) schema("labels: required");
  const std::size_t q = as_uint(doc["labels"], "labels");
  if (q < 2) schema("labels: a psi family needs at least 2 labels");
  if (doc.contains("builtin")) {
    const std::string b = doc["builtin"].is_string() ? doc["builtin"].get<std::string>() : "";
    if (b == "psi_N") return make_psi_N(q);
    if (b == "psi_G") return make_psi_G(q);
    schema("builtin: expected \"psi_N\" or \"psi_G\"");
  }
  if (!doc.contains("family") || !doc["family"].is_array()) schema("family: required array");
  std::vector<PsiFunction> members;
  const Json& fam = doc["family"];
  for (std::size_t i = 0; i < fam.size(); ++i) {
    const std::string where = "family[" + std::to_string(i) + "]";
    std::string row;
    if (fam[i].is_string()) {
      row = fam[i].get<std::string>();
    } else if (fam[i].is_array()) {
      for (const auto& c : fam[i]) {
        if (!c.is_string() || c.get<std::string>().size() != 1) schema(where + ": entries must be \"0\", \"1\" or \"*\"");
        row += c.get<std::string>();
      }
    } else {
      schema(where + ": expected a string or array");
    }
    if (row.size() != q) schema(where + ": length " + std::to_string(row.size()) + " != labels " + std::to_string(q));
    if (row.find_first_not_of("01*") != std::string::npos) schema(where + ": symbols must be 0, 1 or *");
    members.push_back(PsiFunction::parse(row));
  }
  try {
    return PsiFamily(q, std::move(members));
  } catch (const Error& e) {
    schema(std::string("family: ") + e.what());
  }
}

Json psi_to_json(const PsiFamily& family) {
  Json rows = Json::array();
  for (const auto& m : family.members()) rows.push_back(m.to_string());
  return Json{{"labels", family.label_count()}, {"family", rows}};
}

// ---------------------------------------------------------------- values

Json bigint_json(const BigInt& v) {
  if (v >= std::numeric_limits<long long>::min() && v <= std::numeric_limits<long long>::max())
    return v.convert_to<long long>();
  return v.str();
}

Json rational_json(const Rational& r) {
  return Json{{"num", bigint_json(numerator_of(r))}, {"den", bigint_json(denominator_of(r))}};
}

Json hypothesis_json(const Hypothesis& h) {
  if (h.is_table()) return Json{{"table", h.table_values()}};
  Json s = Json::object();
  for (const auto& [x, y] : h.support()) s[std::to_string(x)] = y;
  Json out{{"support", s}};
  if (h.fallback() != 0) out["fallback"] = h.fallback();
  return out;
}

Json certificate_json(const ShatterCertificate& cert) {
  Json ev = std::visit(
      [](const auto& e) -> Json {
        using E = std::decay_t<decltype(e)>;
        if constexpr (std::is_same_v<E, NatarajanEvidence>) return Json{{"g1", e.g1}, {"g2", e.g2}};
        if constexpr (std::is_same_v<E, GraphEvidence>) return Json{{"f", e.f}};
        if constexpr (std::is_same_v<E, DsEvidence>) return Json{{"cube", e.cube}};
        if constexpr (std::is_same_v<E, PsiEvidence>) return Json{{"members", e.members}};
        return Json::object();
      },
      cert.evidence);
  return Json{{"points", cert.points}, {"evidence", ev}};
}

Json witness_report_json(const WitnessReport& report) {
  Json vs = Json::array();
  for (const auto& v : report.violations) {
    Json j{{"points", v.points}, {"input", v.input}, {"output", v.output}, {"message", v.message}};
    j["realized"] = v.realized ? Json(*v.realized) : Json(nullptr);
    vs.push_back(std::move(j));
  }
  return Json{{"valid", report.valid()},
              {"checked_inputs", report.checked_inputs},
              {"violation_count", report.violation_count},
              {"violations", vs}};
}

// ---------------------------------------------------------------- samples and lists

std::vector<std::uint64_t> parse_uint_list(const std::string& text) {
  std::vector<std::uint64_t> out;
  if (text.empty()) return out;
  std::stringstream ss(text);
  std::string item;
  while (std::getline(ss, item, ',')) out.push_back(parse_uint(item, "list"));
  return out;
}

LabeledSample parse_sample(const std::string& text_or_path) {
  LabeledSample S;
  auto from_json = [&](const Json& doc) {
    if (!doc.is_array()) schema("sample: expected [[x, y], ...]");
    for (std::size_t i = 0; i < doc.size(); ++i) {
      const std::string where = "sample[" + std::to_string(i) + "]";
      if (!doc[i].is_array() || doc[i].size() != 2) schema(where + ": expected [x, y]");
      S.push_back(Example{as_uint(doc[i][0], where), static_cast<Label>(as_uint(doc[i][1], where))});
    }
  };
  if (std::filesystem::is_regular_file(text_or_path)) {
    from_json(read_json_file(text_or_path));
  } else if (!text_or_path.empty() && text_or_path.front() == '[') {
    try {
      from_json(Json::parse(text_or_path));
    } catch (const Json::parse_error& e) {
      schema(std::string("sample: ") + e.what());
    }
  } else {
    std::stringstream ss(text_or_path);
    std::string item;
    while (std::getline(ss, item, ',')) {
      const auto colon = item.find(':');
      if (colon == std::string::npos) schema("sample: expected x:y, got '" + item + "'");
      S.push_back(Example{parse_uint(item.substr(0, colon), "sample"),
                          static_cast<Label>(parse_uint(item.substr(colon + 1), "sample"))});
    }
  }
  if (S.empty()) schema("sample: empty");
  return S;
}

Json sample_json(const LabeledSample& S) {
  Json out = Json::array();
  for (const auto& e : S) out.push_back(Json::array({e.x, e.y}));
  return out;
}

// ---------------------------------------------------------------- witnesses

namespace {

DimensionKind flavor_kind(const std::string& flavor, const std::optional<PsiFamily>& family) {
  if (flavor == "natarajan") return DimensionKind::natarajan();
  if (flavor == "graph") return DimensionKind::graph();
  if (flavor == "psi") {
    if (!family) schema("psi witnesses need a psi family");
    return DimensionKind::psi(*family);
  }
  schema("flavor: expected natarajan, graph or psi");
}

std::vector<std::size_t> sort_perm(const PointTuple& X) {
  std::vector<std::size_t> perm(X.size());
  std::iota(perm.begin(), perm.end(), 0);
  std::sort(perm.begin(), perm.end(), [&](std::size_t a, std::size_t b) { return X[a] < X[b]; });
  return perm;
}

template <class T>
std::vector<T> apply_perm(const std::vector<T>& v, const std::vector<std::size_t>& perm) {
  std::vector<T> out;
  for (std::size_t j : perm) out.push_back(v.at(j));
  return out;
}

std::uint64_t sorted_mask(const std::vector<std::size_t>& members, const std::vector<std::size_t>& perm) {
  std::uint64_t m = 0;
  for (std::size_t j = 0; j < perm.size(); ++j)
    if (std::find(members.begin(), members.end(), perm[j]) != members.end()) m |= std::uint64_t{1} << j;
  return m;
}

std::string key_of(std::span<const Point> X, const Json& rest) {
  return Json::array({PointTuple(X.begin(), X.end()), rest}).dump();
}

[[noreturn]] void missing(std::span<const Point> X) {
  throw Error(ErrorCode::WitnessViolation,
              "tabulated witness has no entry for points " + to_string(PointTuple(X.begin(), X.end())));
}

Witness tabulated_witness(const Json& doc, std::optional<PsiFamily> family) {
  const std::string flavor = doc.value("flavor", "");
  if (!doc.contains("order")) schema("order: required");
  const std::size_t order = as_uint(doc["order"], "order");
  const std::size_t n = order + 1;
  if (doc.contains("family")) family = parse_psi_json(doc["family"]);
  if (!doc.contains("entries") || !doc["entries"].is_array()) schema("entries: required array");
  const Json& entries = doc["entries"];
  auto table = std::make_shared<std::map<std::string, std::uint64_t>>();
  for (std::size_t i = 0; i < entries.size(); ++i) {
    const std::string where = "entries[" + std::to_string(i) + "]";
    const Json& e = entries[i];
    if (!e.is_object()) schema(where + ": expected an object");
    const PointTuple X = as_points(e.value("points", Json()), where + ".points");
    if (X.size() != n) schema(where + ".points: expected " + std::to_string(n) + " points");
    const auto perm = sort_perm(X);
    const PointTuple sx = apply_perm(X, perm);
    std::string key;
    std::uint64_t value = 0;
    if (flavor == "psi") {
      std::vector<std::size_t> members;
      for (auto m : as_points(e.value("psi", Json()), where + ".psi")) members.push_back(m);
      const std::string pat = e.value("pattern", "");
      if (members.size() != n || pat.size() != n || pat.find_first_not_of("01") != std::string::npos)
        schema(where + ": psi entries need " + std::to_string(n) + " members and a 0/1 pattern");
      key = key_of(sx, apply_perm(members, perm));
      for (std::size_t j = 0; j < n; ++j)
        if (pat[perm[j]] == '1') value |= std::uint64_t{1} << j;
    } else {
      std::vector<std::size_t> I;
      for (auto m : as_points(e.value("I", Json()), where + ".I")) {
        if (m >= n) schema(where + ".I: index " + std::to_string(m) + " out of range");
        I.push_back(m);
      }
      if (flavor == "natarajan") {
        const Pattern g1 = as_pattern(e.value("g1", Json()), where + ".g1");
        const Pattern g2 = as_pattern(e.value("g2", Json()), where + ".g2");
        if (g1.size() != n || g2.size() != n) schema(where + ": g1 and g2 need " + std::to_string(n) + " labels");
        key = key_of(sx, Json::array({apply_perm(g1, perm), apply_perm(g2, perm)}));
      } else if (flavor == "graph") {
        const Pattern f = as_pattern(e.value("f", Json()), where + ".f");
        if (f.size() != n) schema(where + ": f needs " + std::to_string(n) + " labels");
        key = key_of(sx, apply_perm(f, perm));
      } else {
        schema("flavor: expected natarajan, graph or psi");
      }
      value = sorted_mask(I, perm);
    }
    (*table)[key] = value;
  }
  const Alphabet alphabet =
      doc.contains("labels") ? Alphabet::bounded(as_uint(doc["labels"], "labels")) : Alphabet::unbounded();
  if (flavor == "natarajan")
    return Witness::natarajan(
        order, alphabet,
        [table](std::span<const Point> X, std::span<const Label> g1, std::span<const Label> g2) {
          auto it = table->find(key_of(X, Json::array({Pattern(g1.begin(), g1.end()), Pattern(g2.begin(), g2.end())})));
          if (it == table->end()) missing(X);
          return IndexSet{it->second, X.size()};
        },
        Provenance::User);
  if (flavor == "graph")
    return Witness::graph(
        order, alphabet,
        [table](std::span<const Point> X, std::span<const Label> f) {
          auto it = table->find(key_of(X, Pattern(f.begin(), f.end())));
          if (it == table->end()) missing(X);
          return IndexSet{it->second, X.size()};
        },
        Provenance::User);
  if (!family) schema("psi witnesses need a psi family");
  return Witness::psi(
      order, *family,
      [table](std::span<const Point> X, std::span<const std::size_t> members) {
        auto it = table->find(key_of(X, std::vector<std::size_t>(members.begin(), members.end())));
        if (it == table->end()) missing(X);
        return BinaryPattern{it->second, X.size()};
      },
      Provenance::User);
}

}  // namespace

Witness parse_witness_json(const Json& doc, const HypothesisClass& base, const std::optional<PsiFamily>& family) {
  if (!doc.is_object()) schema("witness document must be a JSON object");
  if (doc.contains("canonical")) {
    const Json& c = doc["canonical"];
    if (!c.is_object() || !c.contains("flavor") || !c["flavor"].is_string() || !c.contains("order"))
      schema("canonical: expected {\"flavor\": ..., \"order\": k}");
    std::optional<PsiFamily> fam = family;
    if (c.contains("family")) fam = parse_psi_json(c["family"]);
    return canonical_witness(base, flavor_kind(c["flavor"].get<std::string>(), fam), as_uint(c["order"], "order"));
  }
  if (doc.contains("gallery")) {
    ParsedClass p = parse_class_json(doc, family);
    if (!p.entry || !p.entry->witness) schema("gallery entry has no bundled witness");
    return *p.entry->witness;
  }
  return tabulated_witness(doc, family);
}

Json tabulate_witness(const Witness& w, std::size_t q, std::size_t points) {
  Json doc;
  const std::size_t n = w.arity();
  doc["order"] = w.order();
  Json entries = Json::array();
  switch (w.kind().tag()) {
    case DimensionKind::Tag::Natarajan: doc["flavor"] = "natarajan"; doc["labels"] = q; break;
    case DimensionKind::Tag::Graph: doc["flavor"] = "graph"; doc["labels"] = q; break;
    case DimensionKind::Tag::Psi: doc["flavor"] = "psi"; doc["family"] = psi_to_json(w.kind().family()); break;
    default: throw Error(ErrorCode::Precondition, "not a witness flavor");
  }
  if (n <= points) {
    for (const auto& s : k_subsets(points, n)) {
      const PointTuple X(s.begin(), s.end());
      auto mask_list = [n](std::uint64_t mask) {
        std::vector<std::size_t> I;
        for (std::size_t i = 0; i < n; ++i)
          if ((mask >> i) & 1U) I.push_back(i);
        return I;
      };
      if (w.kind().tag() == DimensionKind::Tag::Psi) {
        for_each_tuple(std::vector<std::size_t>(n, w.kind().family().size()), [&](std::span<const std::size_t> m) {
          const BinaryPattern b = w.exclude_psi(X, m);
          std::string pat;
          for (std::size_t i = 0; i < n; ++i) pat += static_cast<char>('0' + b.at(i));
          entries.push_back(Json{{"points", X}, {"psi", std::vector<std::size_t>(m.begin(), m.end())}, {"pattern", pat}});
          return true;
        });
      } else if (w.kind().tag() == DimensionKind::Tag::Graph) {
        for_each_tuple(std::vector<std::size_t>(n, q), [&](std::span<const std::size_t> t) {
          const Pattern f(t.begin(), t.end());
          entries.push_back(Json{{"points", X}, {"f", f}, {"I", mask_list(w.exclude_graph(X, f).mask)}});
          return true;
        });
      } else if (q >= 2) {
        std::vector<std::size_t> radices(2 * n, q);
        std::fill(radices.begin() + n, radices.end(), q - 1);
        Pattern g1(n), g2(n);
        for_each_tuple(radices, [&](std::span<const std::size_t> c) {
          for (std::size_t i = 0; i < n; ++i) {
            g1[i] = static_cast<Label>(c[i]);
            g2[i] = static_cast<Label>(c[n + i] < c[i] ? c[n + i] : c[n + i] + 1);
          }
          entries.push_back(
              Json{{"points", X}, {"g1", g1}, {"g2", g2}, {"I", mask_list(w.exclude_natarajan(X, g1, g2).mask)}});
          return true;
        });
      }
    }
  }
  doc["entries"] = entries;
  return doc;
}

// ---------------------------------------------------------------- reports

std::string sha256_hex(const std::string& data) {
  unsigned char digest[EVP_MAX_MD_SIZE];
  unsigned int len = 0;
  if (EVP_Digest(data.data(), data.size(), digest, &len, EVP_sha256(), nullptr) != 1)
    throw Error(ErrorCode::InternalConsistency, "SHA-256 failed");
  static const char* hex = "0123456789abcdef";
  std::string out;
  for (unsigned int i = 0; i < len; ++i) {
    out += hex[digest[i] >> 4];
    out += hex[digest[i] & 0xF];
  }
  return out;
}

Json make_report(const std::string& command, const Json& inputs, Json result, Json certificates,
                 const std::vector<std::string>& warnings) {
  Json r;
  r["command"] = command;
  r["inputs_digest"] = sha256_hex(inputs.dump());
  r["result"] = std::move(result);
  r["certificates"] = certificates.is_null() ? Json::array() : std::move(certificates);
  r["warnings"] = warnings;
  return r;
}

}  // namespace dimkit
