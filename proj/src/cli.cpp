#include "dimkit/cli.hpp"

#include "dimkit/counting.hpp"
#include "dimkit/embedding.hpp"
#include "dimkit/io.hpp"
#include "dimkit/nfl.hpp"
#include "dimkit/psi_constructions.hpp"

#include <CLI11.hpp>

#include <algorithm>
#include <chrono>
#include <cstdlib>
#include <iostream>

namespace dimkit {

namespace {

struct Outcome {
  Json result;
  Json certificates = Json::array();
  int exit = 0;
};

struct Context {
  SearchOptions options;
  Json inputs = Json::object();
  std::vector<std::string> warnings;
};

[[noreturn]] void usage(const std::string& msg) { throw Error(ErrorCode::Schema, msg); }

PsiFamily load_psi(Context& ctx, const std::string& path) {
  Json doc = read_json_file(path);
  ctx.inputs["psi"] = doc;
  return parse_psi_json(doc);
}

std::optional<PsiFamily> maybe_psi(Context& ctx, const std::string& path) {
  if (path.empty()) return std::nullopt;
  return load_psi(ctx, path);
}

ParsedClass load_class(Context& ctx, const std::string& path, const std::optional<PsiFamily>& family,
                       const std::string& key = "class") {
  if (path.empty()) usage("--" + key + " is required");
  Json doc = read_json_file(path);
  ctx.inputs[key] = doc;
  ParsedClass p = parse_class_json(doc, family);
  for (auto& w : p.warnings) ctx.warnings.push_back(key + ": " + w);
  return p;
}

Witness load_witness(Context& ctx, const std::string& path, const HypothesisClass& base,
                     const std::optional<PsiFamily>& family, const std::string& key = "witness") {
  Json doc = read_json_file(path);
  ctx.inputs[key] = doc;
  return parse_witness_json(doc, base, family);
}

Point default_window(const HypothesisClass& H, const std::optional<Point>& window) {
  if (window) return *window;
  if (auto n = H.domain_size()) {
    if (*n == 0) usage("class domain is empty");
    return static_cast<Point>(*n - 1);
  }
  if (H.is_explicit()) return H.max_support().value_or(0);
  usage("--window is required for this class");
}

std::size_t points_in(const HypothesisClass& H, Point window) {
  std::size_t p = static_cast<std::size_t>(window) + 1;
  if (auto n = H.domain_size()) p = std::min(p, *n);
  return p;
}

DimensionKind parse_kind(const std::string& kind, const std::optional<PsiFamily>& family) {
  if (kind == "vc") return DimensionKind::vc();
  if (kind == "natarajan") return DimensionKind::natarajan();
  if (kind == "graph") return DimensionKind::graph();
  if (kind == "ds") return DimensionKind::ds();
  if (kind == "psi") {
    if (!family) usage("--kind psi needs --psi");
    return DimensionKind::psi(*family);
  }
  usage("unknown kind '" + kind + "'");
}

std::string flavor_name(const Witness& w) { return w.kind().name(); }

Json witness_summary(const Witness& w) {
  return Json{{"flavor", flavor_name(w)}, {"order", w.order()}, {"provenance", std::string(to_string(w.provenance()))}};
}

std::size_t label_count_of(const Witness& w, const HypothesisClass& H) {
  if (w.alphabet().is_bounded()) return w.alphabet().size();
  return H.alphabet().size();
}

Learner parse_learner(Context& ctx, const std::string& spec, std::size_t* labels_hint) {
  const auto colon = spec.find(':');
  const std::string kind = spec.substr(0, colon);
  const std::string arg = colon == std::string::npos ? "" : spec.substr(colon + 1);
  ctx.inputs["learner"] = kind;
  if (kind == "const" || kind == "memorize") {
    const auto v = parse_uint_list(arg);
    if (v.size() != 1) usage("--learner " + kind + ":V needs one label");
    ctx.inputs["learner_label"] = v[0];
    return kind == "const" ? constant_learner(static_cast<Label>(v[0])) : memorizing_learner(static_cast<Label>(v[0]));
  }
  if (kind == "erm") {
    ParsedClass p = load_class(ctx, arg, std::nullopt, "learner_class");
    if (labels_hint && !*labels_hint) *labels_hint = p.cls.alphabet().size();
    return erm_learner(p.cls);
  }
  if (kind == "embed") {
    const auto comma = arg.find(',');
    if (comma == std::string::npos) usage("--learner embed:CLASS,WITNESS");
    ParsedClass p = load_class(ctx, arg.substr(0, comma), std::nullopt, "learner_class");
    Witness w = load_witness(ctx, arg.substr(comma + 1), p.cls, std::nullopt, "learner_witness");
    if (labels_hint && !*labels_hint) *labels_hint = label_count_of(w, p.cls);
    return agnostic_learner(GoodFunctionSpec{w, std::nullopt});
  }
  usage("unknown learner '" + spec + "' (const:V, memorize:V, erm:FILE, embed:CLASS,WITNESS)");
}

Pattern as_labels(const std::vector<std::uint64_t>& v) {
  Pattern p;
  for (auto x : v) p.push_back(static_cast<Label>(x));
  return p;
}

Json adversary_json(const AdversaryReport& r, const std::string& learner) {
  Json atoms = Json::array();
  for (const auto& a : r.D.atoms())
    atoms.push_back(Json{{"x", a.example.x}, {"y", a.example.y}, {"weight", rational_json(a.weight)}});
  return Json{{"learner", learner},
              {"f", Json{{"points", r.f.points}, {"values", r.f.values}}},
              {"I", r.I.indices()},
              {"distribution", atoms},
              {"expected_risk", rational_json(r.expected_risk)},
              {"tail_probability", rational_json(r.tail_probability)},
              {"mixtures_examined", r.mixtures_examined},
              {"tail_below_markov", r.tail_below_markov}};
}

}  // namespace

int dispatch(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  CLI::App app{"Exact learnability dimensions, witnesses and constructions", "dimkit"};
  app.require_subcommand(1);
  unsigned threads = 1;
  if (const char* env = std::getenv("DIMKIT_THREADS")) {
    try {
      threads = static_cast<unsigned>(std::max(1, std::stoi(env)));
    } catch (const std::exception&) {
      err << "ignoring DIMKIT_THREADS=" << env << "\n";
    }
  }
  bool timing = false;
  app.add_option("--threads", threads, "Worker threads for internal searches")->check(CLI::PositiveNumber);
  app.add_flag("--timing", timing, "Add runtime_ms to the report");

  // Shared option storage.
  std::string class_path, psi_path, witness_path, kind, flavor, learner, sample, points, g1, g2, eval, bound;
  std::optional<Point> window;
  std::size_t order = 0, m = 1, d = 0, labels = 0, kn = 0, q = 0;
  bool all_entries = false;
  std::vector<std::string> params;
  std::string gallery_name;

  auto* dim = app.add_subcommand("dim", "Exact dimension of a class");
  dim->add_option("--class", class_path, "Class file")->required();
  dim->add_option("--kind", kind, "vc, natarajan, graph, ds or psi")->required();
  dim->add_option("--psi", psi_path, "Psi family file");
  dim->add_option("--window", window, "Largest point searched");

  auto* witness = app.add_subcommand("witness", "Witness construction and validation");
  witness->require_subcommand(1);
  auto* wmake = witness->add_subcommand("make", "Build and validate the canonical witness");
  auto* wcheck = witness->add_subcommand("check", "Validate a witness exhaustively");
  for (auto* c : {wmake, wcheck}) {
    c->add_option("--class", class_path, "Class file")->required();
    c->add_option("--flavor", flavor, "natarajan, graph or psi");
    c->add_option("--order", order, "Witness order k");
    c->add_option("--psi", psi_path, "Psi family file");
    c->add_option("--window", window, "Largest point checked");
  }
  wcheck->add_option("--witness", witness_path, "Witness file");
  auto* wlearn = witness->add_subcommand("from-learner", "Witness extracted from a learner");
  wlearn->add_option("--learner", learner, "const:V, memorize:V, erm:FILE or embed:CLASS,WITNESS")->required();
  wlearn->add_option("--m", m, "Sample size")->required();
  wlearn->add_option("--labels", labels, "Label count (defaults to the class)");
  wlearn->add_option("--class", class_path, "Class to validate against");
  wlearn->add_option("--window", window, "Largest point checked");
  wlearn->add_option("--points", points, "Evaluate on these 2m points");
  wlearn->add_option("--g1", g1, "First labeling");
  wlearn->add_option("--g2", g2, "Second labeling");

  auto* nfl = app.add_subcommand("nfl", "No-free-lunch adversary against a learner");
  nfl->add_option("--learner", learner, "const:V, memorize:V, erm:FILE or embed:CLASS,WITNESS")->required();
  nfl->add_option("--points", points, "2m points")->required();
  nfl->add_option("--g1", g1, "First labeling")->required();
  nfl->add_option("--g2", g2, "Second labeling")->required();

  auto* embed = app.add_subcommand("embed", "Good-function augmentation of a class");
  embed->require_subcommand(1);
  auto* ebeh = embed->add_subcommand("behaviors", "v(T) for a point tuple");
  auto* eerm = embed->add_subcommand("erm", "ERM over the augmented class");
  auto* elearn = embed->add_subcommand("learn", "Run the augmented ERM learner and predict");
  for (auto* c : {ebeh, eerm, elearn}) {
    c->add_option("--class", class_path, "Base class file")->required();
    c->add_option("--witness", witness_path, "Witness file")->required();
    c->add_option("--psi", psi_path, "Psi family file");
    c->add_option("--label-bound", bound, "Label bound table c(0),c(1),...");
  }
  ebeh->add_option("--points", points, "Point tuple T")->required();
  eerm->add_option("--sample", sample, "x:y,... or a JSON file")->required();
  elearn->add_option("--sample", sample, "x:y,... or a JSON file")->required();
  elearn->add_option("--eval", eval, "Points to predict")->required();

  auto* dist = app.add_subcommand("distinguisher", "Check whether a psi family is a distinguisher");
  dist->add_option("--psi", psi_path, "Psi family file")->required();

  auto* refute = app.add_subcommand("refute-ds", "Exhaust psi pairs against a 2-point DS-2 class");
  refute->add_option("--class", class_path, "Class file")->required();
  refute->add_flag("--all-entries", all_entries, "List every shattering pair");

  auto* sauer = app.add_subcommand("sauer", "Natarajan-Sauer count check");
  sauer->add_option("--class", class_path, "Class file")->required();
  sauer->add_option("--points", points, "Point tuple T")->required();
  sauer->add_option("--d", d, "Natarajan dimension bound")->required();

  auto* minkb = app.add_subcommand("min-kb", "Order of the counting psi witness");
  minkb->add_option("--kn", kn, "Natarajan witness order")->required();
  minkb->add_option("--q", q, "Label count")->required();

  auto* gallery = app.add_subcommand("gallery", "Built-in classes");
  gallery->require_subcommand(1);
  auto* glist = gallery->add_subcommand("list", "List entries");
  auto* gemit = gallery->add_subcommand("emit", "Emit an entry as a class file");
  gemit->add_option("name", gallery_name, "Entry name")->required();
  gemit->add_option("--param", params, "key=value (repeatable)");
  gemit->add_option("--psi", psi_path, "Psi family file (failing_psi)");

  try {
    std::vector<std::string> reversed(args.rbegin(), args.rend());
    app.parse(reversed);
  } catch (const CLI::CallForHelp&) {
    out << app.help();
    return 0;
  } catch (const CLI::ParseError& e) {
    err << e.what() << "\n" << app.help();
    return 2;
  }

  Context ctx;
  ctx.options.threads = threads;
  std::string command;
  const auto start = std::chrono::steady_clock::now();
  try {
    Outcome o;
    if (dim->parsed()) {
      command = "dim";
      auto family = maybe_psi(ctx, psi_path);
      ParsedClass p = load_class(ctx, class_path, family);
      const DimensionKind k = parse_kind(kind, family);
      ctx.inputs["kind"] = kind;
      if (window) ctx.inputs["window"] = *window;
      DimensionResult r = exact_dimension(p.cls, k, window, ctx.options);
      o.result = Json{{"kind", kind}, {"dimension", r.dimension}, {"window", r.window}};
      if (r.certificate) o.certificates.push_back(certificate_json(*r.certificate));
      for (auto& w : r.warnings) ctx.warnings.push_back(w);
    } else if (wmake->parsed() || wcheck->parsed()) {
      command = wmake->parsed() ? "witness make" : "witness check";
      auto family = maybe_psi(ctx, psi_path);
      ParsedClass p = load_class(ctx, class_path, family);
      std::optional<Witness> w;
      if (!witness_path.empty()) {
        w = load_witness(ctx, witness_path, p.cls, family);
      } else {
        if (flavor.empty()) usage("--flavor and --order (or --witness) are required");
        const DimensionKind k = parse_kind(flavor, family);
        if (k.tag() == DimensionKind::Tag::VC || k.tag() == DimensionKind::Tag::DS)
          usage("witness flavors are natarajan, graph and psi");
        ctx.inputs["flavor"] = flavor;
        ctx.inputs["order"] = order;
        w = canonical_witness(p.cls, k, order);
      }
      const Point win = default_window(p.cls, window);
      ctx.inputs["window"] = win;
      const WitnessReport report = validate_witness(*w, p.cls, win, ctx.options);
      o.result = witness_summary(*w);
      o.result["window"] = win;
      o.result["validation"] = witness_report_json(report);
      if (wmake->parsed() && report.valid())
        o.result["witness"] = tabulate_witness(*w, label_count_of(*w, p.cls), points_in(p.cls, win));
      o.exit = report.valid() ? 0 : 1;
    } else if (wlearn->parsed()) {
      command = "witness from-learner";
      std::optional<ParsedClass> check;
      if (!class_path.empty()) check = load_class(ctx, class_path, std::nullopt);
      std::size_t q_labels = labels;
      if (!q_labels && check) q_labels = check->cls.alphabet().size();
      Learner A = parse_learner(ctx, learner, &q_labels);
      if (!q_labels) usage("--labels is required without a class");
      ctx.inputs["m"] = m;
      ctx.inputs["labels"] = q_labels;
      const Witness w = witness_from_learner(A, m, Alphabet::bounded(q_labels),
                                             check ? std::optional<HypothesisClass>(check->cls) : std::nullopt,
                                             ctx.options);
      o.result = witness_summary(w);
      if (!points.empty()) {
        const auto X = parse_uint_list(points);
        const Pattern a = as_labels(parse_uint_list(g1)), b = as_labels(parse_uint_list(g2));
        ctx.inputs["points"] = X;
        ctx.inputs["g1"] = a;
        ctx.inputs["g2"] = b;
        o.result["I"] = w.exclude_natarajan(X, a, b).indices();
      }
      if (check) {
        const Point win = default_window(check->cls, window);
        ctx.inputs["window"] = win;
        const PacCheck pac = pac_check_on_graphs(A, check->cls, m, win);
        o.result["learns"] = pac.learns;
        o.result["targets_checked"] = pac.targets_checked;
        if (pac.counterexample)
          o.result["counterexample"] = Json{{"points", pac.counterexample->points},
                                            {"values", pac.counterexample->values},
                                            {"tail", rational_json(pac.counterexample_tail)}};
        const WitnessReport report = validate_witness(w, check->cls, win, ctx.options);
        o.result["window"] = win;
        o.result["validation"] = witness_report_json(report);
        o.exit = report.valid() ? 0 : 1;
      }
    } else if (nfl->parsed()) {
      command = "nfl";
      Learner A = parse_learner(ctx, learner, nullptr);
      const auto X = parse_uint_list(points);
      const Pattern a = as_labels(parse_uint_list(g1)), b = as_labels(parse_uint_list(g2));
      ctx.inputs["points"] = X;
      ctx.inputs["g1"] = a;
      ctx.inputs["g2"] = b;
      o.result = adversary_json(nfl_adversary(A, X, a, b, ctx.options), A.name);
    } else if (ebeh->parsed() || eerm->parsed() || elearn->parsed()) {
      command = ebeh->parsed() ? "embed behaviors" : eerm->parsed() ? "embed erm" : "embed learn";
      auto family = maybe_psi(ctx, psi_path);
      ParsedClass p = load_class(ctx, class_path, family);
      Witness w = load_witness(ctx, witness_path, p.cls, family);
      GoodFunctionSpec spec{w, std::nullopt};
      if (!bound.empty()) {
        std::vector<Label> c;
        for (auto v : parse_uint_list(bound)) c.push_back(static_cast<Label>(v));
        spec.label_bound = c;
        ctx.inputs["label_bound"] = c;
      }
      AugmentedClass aug(spec, ctx.options);
      if (ebeh->parsed()) {
        const auto T = parse_uint_list(points);
        ctx.inputs["points"] = T;
        const GoodPatterns v = aug.behaviors(T);
        const BehaviorSet base = restrict(p.cls, T);
        const bool contained = std::all_of(base.patterns.begin(), base.patterns.end(),
                                           [&](const Pattern& x) { return v.behaviors.contains(x); });
        const BigInt cap = behavior_bound(static_cast<std::size_t>(v.window_top) + 1, w.order(), v.label_count);
        o.result = Json{{"points", T},
                        {"patterns", v.behaviors.patterns},
                        {"size", v.behaviors.size()},
                        {"bound", bigint_json(cap)},
                        {"within_bound", BigInt(v.behaviors.size()) <= cap},
                        {"base_contained", contained},
                        {"label_count", v.label_count},
                        {"candidate_space", bigint_json(v.candidate_space)},
                        {"good_functions", v.good_functions}};
        o.exit = contained && BigInt(v.behaviors.size()) <= cap ? 0 : 1;
      } else {
        const LabeledSample S = parse_sample(sample);
        ctx.inputs["sample"] = sample_json(S);
        const ErmResult r = aug.erm(S);
        o.result = Json{{"hypothesis", hypothesis_json(r.hypothesis)}, {"risk", rational_json(r.risk)}};
        if (elearn->parsed()) {
          const auto X = parse_uint_list(eval);
          ctx.inputs["eval"] = X;
          Pattern predictions;
          for (Point x : X) predictions.push_back(r.hypothesis(x));
          o.result["eval"] = X;
          o.result["predictions"] = predictions;
        }
      }
    } else if (dist->parsed()) {
      command = "distinguisher";
      const PsiFamily family = load_psi(ctx, psi_path);
      const DistinguisherCheck c = check_distinguisher(family);
      o.result = Json{{"is_distinguisher", c.is_distinguisher}, {"size", family.size()}};
      o.result["failing_pair"] =
          c.failing_pair ? Json::array({c.failing_pair->first, c.failing_pair->second}) : Json(nullptr);
      o.exit = c.is_distinguisher ? 0 : 1;
    } else if (refute->parsed()) {
      command = "refute-ds";
      ParsedClass p = load_class(ctx, class_path, std::nullopt);
      const DsRefutation r = refute_ds_expressibility(p.cls, ctx.options);
      Json subs = Json::array();
      for (const auto& [patterns, count] : r.subclass_counts)
        subs.push_back(Json{{"patterns", patterns}, {"pairs", count}});
      o.result = Json{{"verdict", std::string(to_string(r.verdict))},
                      {"pairs_examined", r.pairs_examined},
                      {"shattering_pairs", r.shattering_pairs},
                      {"subclasses", subs}};
      o.result["unrefuted_pair"] = r.unrefuted_pair ? Json::array({r.unrefuted_pair->first.to_string(),
                                                                   r.unrefuted_pair->second.to_string()})
                                                    : Json(nullptr);
      if (all_entries) {
        Json entries = Json::array();
        for (const auto& e : r.entries)
          entries.push_back(Json{{"psi", Json::array({e.psi1.to_string(), e.psi2.to_string()})},
                                 {"subclasses", e.subclasses}});
        o.result["entries"] = entries;
      }
      o.exit = r.verdict == DsVerdict::Refuted ? 0 : 1;
    } else if (sauer->parsed()) {
      command = "sauer";
      ParsedClass p = load_class(ctx, class_path, std::nullopt);
      const auto T = parse_uint_list(points);
      ctx.inputs["points"] = T;
      ctx.inputs["d"] = d;
      const SauerReport r = sauer_natarajan_check(p.cls, T, d);
      o.result = Json{{"count", bigint_json(r.count)}, {"bound", bigint_json(r.bound)}, {"holds", r.holds}};
      o.exit = r.holds ? 0 : 1;
    } else if (minkb->parsed()) {
      command = "min-kb";
      ctx.inputs["kn"] = kn;
      ctx.inputs["q"] = q;
      const CountingInequality c = counting_inequality(kn, q);
      o.result = Json{{"k_B", c.k_B},
                      {"order", c.order},
                      {"two_pow_order", bigint_json(c.lhs)},
                      {"sauer_side", bigint_json(c.rhs)},
                      {"inequality_holds", c.holds}};
      o.exit = c.holds ? 0 : 1;
    } else if (glist->parsed()) {
      command = "gallery list";
      o.result = Json::array();
      for (const auto& name : gallery_names()) {
        const GalleryEntry e = gallery_lookup(name, {});
        o.result.push_back(Json{{"name", name}, {"description", e.description}});
      }
    } else if (gemit->parsed()) {
      command = "gallery emit";
      auto family = maybe_psi(ctx, psi_path);
      std::map<std::string, long long> pm;
      for (const auto& kv : params) {
        const auto eq = kv.find('=');
        if (eq == std::string::npos) usage("--param expects key=value");
        const auto v = parse_uint_list(kv.substr(eq + 1));
        if (v.size() != 1) usage("--param " + kv + ": expected one integer");
        pm[kv.substr(0, eq)] = static_cast<long long>(v[0]);
      }
      ctx.inputs["name"] = gallery_name;
      ctx.inputs["params"] = pm;
      const GalleryEntry e = gallery_lookup(gallery_name, pm, family);
      Json expected = Json::array();
      for (const auto& x : e.expected)
        expected.push_back(Json{{"kind", x.kind}, {"value", x.value}, {"source", x.source}});
      o.result = Json{{"name", e.name},
                      {"description", e.description},
                      {"class", class_to_json(e.cls)},
                      {"expected", expected},
                      {"params", e.params}};
      o.result["witness"] = e.witness ? witness_summary(*e.witness) : Json(nullptr);
    } else {
      usage("unknown command");
    }
    Json report = make_report(command, ctx.inputs, std::move(o.result), std::move(o.certificates), ctx.warnings);
    if (timing)
      report["runtime_ms"] = std::chrono::duration_cast<std::chrono::milliseconds>(
                                 std::chrono::steady_clock::now() - start)
                                 .count();
    out << report.dump(2) << "\n";
    return o.exit;
  } catch (const Error& e) {
    Json report;
    report["command"] = command;
    report["error"] = Json{{"code", std::string(to_string(e.code()))}, {"message", e.what()}};
    out << report.dump(2) << "\n";
    err << "error [" << to_string(e.code()) << "]: " << e.what() << "\n";
    return 2;
  }
}

}  // namespace dimkit
