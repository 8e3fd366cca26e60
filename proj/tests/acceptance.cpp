// Acceptance run: one PASS/FAIL line per criterion, exit status 1 if any fails.
#include "dimkit/counting.hpp"
#include "dimkit/embedding.hpp"
#include "dimkit/gallery.hpp"
#include "dimkit/psi_constructions.hpp"
#include "oracles.hpp"

#include <chrono>
#include <cmath>
#include <cstdio>
#include <functional>
#include <iostream>
#include <sstream>

using namespace dimkit;

namespace {

struct Verdict {
  bool pass = true;
  std::ostringstream detail;

  void require(bool ok, const std::string& what) {
    if (!ok && pass) detail << "first failure: " << what << "; ";
    pass = pass && ok;
  }
};

Rational R(long long n, long long d) { return make_rational(n, d); }

std::vector<PointTuple> nonempty_subsets(std::size_t n) {
  std::vector<PointTuple> out;
  for (std::uint64_t s = 1; s < (1ULL << n); ++s) {
    PointTuple X;
    for (std::size_t i = 0; i < n; ++i)
      if ((s >> i) & 1U) X.push_back(i);
    out.push_back(X);
  }
  return out;
}

PointTuple window_points(Point M) {
  PointTuple T;
  for (Point x = 0; x <= M; ++x) T.push_back(x);
  return T;
}

HypothesisClass patterns_as_class(const std::vector<Pattern>& rows, std::size_t q) {
  std::vector<Hypothesis> hs;
  for (const auto& p : rows) hs.push_back(Hypothesis::table(p));
  return HypothesisClass::explicit_class(Alphabet::bounded(q), rows.front().size(), hs);
}

struct Corpus {
  std::vector<HypothesisClass> classes;
  std::vector<std::vector<Hypothesis>> tables;
  std::vector<std::size_t> domain, labels;
};

Corpus corpus(std::uint64_t seed, std::size_t count, std::size_t q_lo, std::size_t q_hi, std::size_t max_size) {
  oracle::ClassGen gen(seed);
  Corpus c;
  for (std::size_t i = 0; i < count; ++i) {
    const std::size_t n = gen.uniform(1, 4), q = gen.uniform(q_lo, q_hi);
    auto hs = gen.tables(n, q, max_size);
    c.classes.push_back(HypothesisClass::explicit_class(Alphabet::bounded(q), n, hs));
    c.tables.push_back(std::move(hs));
    c.domain.push_back(n);
    c.labels.push_back(q);
  }
  return c;
}

void binary_coincidence(Verdict& v) {
  const auto c = corpus(1001, 200, 2, 2, 16);
  std::size_t max_dim = 0;
  for (std::size_t i = 0; i < c.classes.size(); ++i) {
    const auto& H = c.classes[i];
    const std::size_t vc = exact_dimension(H, DimensionKind::vc()).dimension;
    const std::size_t n = exact_dimension(H, DimensionKind::natarajan()).dimension;
    const std::size_t g = exact_dimension(H, DimensionKind::graph()).dimension;
    const std::size_t ds = exact_dimension(H, DimensionKind::ds()).dimension;
    const std::size_t ref = oracle::dimension(c.tables[i], c.domain[i], 2, oracle::Kind::VC);
    v.require(vc == n && n == g && g == ds, "class " + std::to_string(i) + " dims disagree");
    v.require(vc == ref, "class " + std::to_string(i) + " VC differs from brute force");
    max_dim = std::max(max_dim, vc);
  }
  v.detail << "200 binary classes, dimensions up to " << max_dim;
}

void dimension_order(Verdict& v) {
  const auto c = corpus(1002, 200, 2, 4, 20);
  std::size_t strict_g = 0, strict_ds = 0;
  for (std::size_t i = 0; i < c.classes.size(); ++i) {
    const auto& H = c.classes[i];
    const std::size_t q = c.labels[i];
    const std::size_t n = exact_dimension(H, DimensionKind::natarajan()).dimension;
    const std::size_t g = exact_dimension(H, DimensionKind::graph()).dimension;
    const std::size_t ds = exact_dimension(H, DimensionKind::ds()).dimension;
    const std::size_t pn = exact_dimension(H, DimensionKind::psi(make_psi_N(q))).dimension;
    const std::size_t pg = exact_dimension(H, DimensionKind::psi(make_psi_G(q))).dimension;
    const std::string tag = "class " + std::to_string(i);
    v.require(n <= g, tag + " N > G");
    v.require(n <= ds, tag + " N > DS");
    v.require(pn == n, tag + " PSI(psi_N) != N");
    v.require(pg == g, tag + " PSI(psi_G) != G");
    v.require(n == oracle::dimension(c.tables[i], c.domain[i], q, oracle::Kind::Natarajan), tag + " N oracle");
    v.require(g == oracle::dimension(c.tables[i], c.domain[i], q, oracle::Kind::Graph), tag + " G oracle");
    v.require(ds == oracle::dimension(c.tables[i], c.domain[i], q, oracle::Kind::DS), tag + " DS oracle");
    strict_g += n < g;
    strict_ds += n < ds;
  }
  v.detail << "200 classes; N < G in " << strict_g << ", N < DS in " << strict_ds;
}

void sauer(Verdict& v) {
  const auto c = corpus(1002, 200, 2, 4, 20);
  std::size_t checks = 0;
  for (std::size_t i = 0; i < c.classes.size(); ++i) {
    const auto& H = c.classes[i];
    const std::size_t d = exact_dimension(H, DimensionKind::natarajan()).dimension;
    for (const auto& T : nonempty_subsets(c.domain[i])) {
      const auto r = sauer_natarajan_check(H, T, d);
      const BigInt bound = pow(BigInt(T.size()), d) * pow(BigInt(c.labels[i]), 2 * d);
      v.require(r.bound == bound && r.holds && r.count <= bound, "class " + std::to_string(i));
      ++checks;
    }
  }
  v.detail << checks << " (class, T) checks, 0 violations";
}

void gap_family(Verdict& v) {
  for (std::size_t m = 1; m <= 4; ++m) {
    const auto e = gap_class(m);
    const std::size_t n = exact_dimension(e.cls, DimensionKind::natarajan()).dimension;
    const std::size_t g = exact_dimension(e.cls, DimensionKind::graph()).dimension;
    const auto rep = validate_witness(*e.witness, e.cls, static_cast<Point>(m - 1));
    v.require(n == 1, "m=" + std::to_string(m) + " N-dim " + std::to_string(n));
    v.require(g == m, "m=" + std::to_string(m) + " G-dim " + std::to_string(g));
    v.require(rep.valid(), "m=" + std::to_string(m) + " witness invalid");
    v.detail << "m=" << m << ": N=" << n << " G=" << g << " witness " << rep.checked_inputs << " inputs ok; ";
  }
}

void nfl_constants(Verdict& v) {
  const auto base = three_pattern_nat().cls;
  const GoodFunctionSpec spec{canonical_witness(base, DimensionKind::natarajan(), 1), std::nullopt};
  double m2_seconds = 0;
  std::size_t runs = 0;
  for (std::size_t m = 1; m <= 2; ++m) {
    const auto start = std::chrono::steady_clock::now();
    std::vector<Learner> learners{constant_learner(0), constant_learner(1), memorizing_learner(0),
                                  memorizing_learner(2), erm_learner(full_class(2 * m, 3)), agnostic_learner(spec)};
    // The two-point class is only defined on [0, 2).
    if (m == 1) learners.push_back(erm_learner(three_pattern().cls));
    const PointTuple X = window_points(2 * m - 1);
    for (const auto& [a, b] : std::vector<std::pair<Label, Label>>{{0, 1}, {1, 2}, {2, 0}}) {
      Pattern g1(2 * m, a), g2(2 * m, b);
      g1[0] = b;
      g2[0] = a;
      for (const auto& A : learners) {
        const auto rep = nfl_adversary(A, X, g1, g2);
        v.require(rep.expected_risk >= R(1, 4), A.name + " expected risk below 1/4");
        v.require(rep.tail_probability >= R(1, 7), A.name + " tail below 1/7");
        v.require(true_risk(Hypothesis::table(rep.f.values), rep.D) == 0, "R_D(f) != 0");
        ++runs;
      }
    }
    if (m == 2)
      m2_seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
  }
  v.require(m2_seconds < 20, "m=2 too slow");
  v.detail << runs << " adversary runs; m=2 took " << m2_seconds << " s";
}

void learner_witness(Verdict& v) {
  oracle::ClassGen gen(1006);
  std::size_t learnable = 0, inputs = 0;
  for (int t = 0; t < 50; ++t) {
    const std::size_t q = gen.uniform(2, 3);
    const auto H = gen.cls(2, q, 4);
    const Learner A = erm_learner(H);
    if (!pac_check_on_graphs(A, H, 1, 1).learns) continue;
    ++learnable;
    const auto w = witness_from_learner(A, 1, Alphabet::bounded(q), H);
    v.require(w.order() == 1, "order");
    const auto rep = validate_witness(w, H, 1);
    v.require(rep.valid(), "class " + std::to_string(t) + " witness invalid");
    inputs += rep.checked_inputs;
  }
  v.require(learnable > 0, "no learnable class in the corpus");
  v.detail << learnable << " of 50 classes learned by ERM at m=1; " << inputs << " witness inputs, 0 violations";
}

void counting(Verdict& v) {
  v.require(min_kb(1, 3) == 14, "min_kb(1,3)");
  for (std::size_t kN = 0; kN <= 2; ++kN)
    for (std::size_t q = 2; q <= 4; ++q) {
      std::size_t brute = 0;
      for (std::size_t k = 1; k <= 200 && !brute; ++k)
        if (pow(BigInt(k), kN + 1) * pow(BigInt(q), 2 * (kN + 1)) < pow(BigInt(2), k)) brute = k;
      v.require(min_kb(kN, q) == brute, "min_kb brute force");
      const auto c = counting_inequality(kN, q);
      v.require(c.holds, "integer inequality");
      const double d = static_cast<double>(c.order);
      if (c.order > 0)
        v.require(d / (std::log2(d) + 2 * std::log2(static_cast<double>(q))) <= static_cast<double>(kN + 1),
                  "log-form inequality");
    }
  v.require(min_kb(0, 2) == 5, "min_kb(0,2)");

  std::uint64_t checked = 0;
  const auto zero = singleton_zero().cls;
  const auto wz = canonical_witness(zero, DimensionKind::natarajan(), 0);
  for (const auto& F : {make_psi_G(2), make_psi_N(2)}) {
    const auto w = psi_witness_from_natarajan(wz, F);
    for (Point M = 0; M <= 5; ++M) {
      const auto rep = validate_witness(w, zero, M);
      v.require(rep.valid(), "zero class window " + std::to_string(M));
      checked += rep.checked_inputs;
    }
  }
  const auto three = three_pattern_nat().cls;
  const auto w3 = canonical_witness(three, DimensionKind::natarajan(), 1);
  v.require(validate_witness(w3, three, 5).valid(), "three-pattern Natarajan witness");
  const auto wpsi = psi_witness_from_natarajan(w3, make_psi_G(3));
  std::uint64_t vacuous = 0;
  for (Point M = 0; M <= 5; ++M) {
    const auto rep = validate_witness(wpsi, three, M);
    v.require(rep.valid(), "three-pattern window " + std::to_string(M));
    vacuous += rep.checked_inputs == 0;
  }
  // Order 13 needs 14 points, beyond the M <= 5 windows; spot-check on [0, 13].
  oracle::ClassGen gen(1007);
  const PointTuple T = window_points(13);
  const auto HT = restrict(three, T);
  const auto F = make_psi_G(3);
  for (int s = 0; s < 20; ++s) {
    std::vector<std::size_t> members(14);
    for (auto& m : members) m = gen.uniform(0, 2);
    const BinaryPattern out = wpsi.exclude_psi(T, members);
    for (const auto& p : HT.patterns) {
      const auto img = apply_psi(F, members, p);
      v.require(!img || img->bits != out.bits, "order-13 spot check");
    }
    ++checked;
  }
  v.detail << "min_kb(1,3)=14; zero class " << checked - 20 << " inputs valid; three-pattern order "
           << wpsi.order() << " (" << vacuous << " of 6 windows have no inputs, 20 spot checks on [0,13])";
}

void embedding(Verdict& v) {
  oracle::ClassGen gen(1008);
  std::size_t bases = 0, subsets = 0, samples = 0;
  while (bases < 30) {
    const std::size_t q = gen.uniform(2, 3), n = gen.uniform(2, 4);
    std::vector<Hypothesis> hs;
    for (const auto& t : gen.tables(n, q, 6)) {
      Hypothesis::Support s;
      for (std::size_t x = 0; x < n; ++x) s[x] = t(x);
      hs.push_back(Hypothesis::finite_support(s));
    }
    std::sort(hs.begin(), hs.end());
    hs.erase(std::unique(hs.begin(), hs.end()), hs.end());
    const auto H = HypothesisClass::explicit_class(Alphabet::bounded(q), std::nullopt, hs);
    const std::size_t k = exact_dimension(H, DimensionKind::natarajan(), 5).dimension;
    const auto w = canonical_witness(H, DimensionKind::natarajan(), k);
    if (!validate_witness(w, H, 5).valid()) continue;
    ++bases;
    const AugmentedClass aug(GoodFunctionSpec{w, std::nullopt});
    const std::string tag = "base " + std::to_string(bases);
    for (const auto& T : nonempty_subsets(6)) {
      const auto vT = aug.behaviors(T);
      for (const auto& p : restrict(H, T).patterns) v.require(vT.behaviors.contains(p), tag + " (a)");
      v.require(BigInt(vT.behaviors.size()) <= behavior_bound(T.back() + 1, k, q), tag + " (b)");
      ++subsets;
    }
    for (Point M = 0; M <= 5; ++M) {
      const auto vM = aug.behaviors(window_points(M));
      const auto cls = patterns_as_class(vM.behaviors.patterns, q);
      v.require(exact_dimension(cls, DimensionKind::natarajan()).dimension <= k + 1, tag + " (c)");
    }
    for (int s = 0; s < 100; ++s) {
      LabeledSample S;
      const std::size_t len = gen.uniform(1, 6);
      for (std::size_t i = 0; i < len; ++i) S.push_back({gen.uniform(0, 5), static_cast<Label>(gen.uniform(0, q - 1))});
      const PointTuple T = sample_points(S);
      Rational best = 1;
      for (const auto& p : aug.behaviors(T).behaviors.patterns) {
        long long wrong = 0;
        for (const auto& e : S)
          wrong += p[static_cast<std::size_t>(std::find(T.begin(), T.end(), e.x) - T.begin())] != e.y;
        best = std::min(best, R(wrong, static_cast<long long>(S.size())));
      }
      const auto r = aug.erm(S);
      v.require(r.risk == best && empirical_risk(r.hypothesis, S) == best, tag + " (d)");
      ++samples;
    }
  }
  v.detail << bases << " bases, " << subsets << " windows T, " << samples << " ERM samples";
}

void end_to_end(Verdict& v) {
  const auto base = three_pattern_nat().cls;
  const GoodFunctionSpec spec{canonical_witness(base, DimensionKind::natarajan(), 1), std::nullopt};
  const Learner A = agnostic_learner(spec);
  const FiniteDistribution D({{{0, 0}, R(3, 10)},
                              {{0, 2}, R(1, 10)},
                              {{1, 1}, R(1, 4)},
                              {{1, 2}, R(1, 10)},
                              {{2, 0}, R(3, 20)},
                              {{2, 1}, R(1, 10)}});
  Rational r_star = 1;
  for (const auto& h : base.hypotheses()) r_star = std::min(r_star, true_risk(h, D));
  const PointTuple support{0, 1, 2};
  const auto vT = good_patterns(spec, support);
  const std::size_t m = uniform_convergence_sample_size(BigInt(vT.behaviors.size()), 0.25, 0.2);

  std::vector<double> weights;
  for (const auto& a : D.atoms()) weights.push_back(a.weight.convert_to<double>());
  std::mt19937_64 rng(1009);
  std::discrete_distribution<std::size_t> pick(weights.begin(), weights.end());
  const Rational eps = R(1, 4);
  std::size_t failures = 0;
  const std::size_t trials = 400;
  for (std::size_t t = 0; t < trials; ++t) {
    LabeledSample S;
    for (std::size_t i = 0; i < m; ++i) S.push_back(D.atoms()[pick(rng)].example);
    failures += true_risk(A(S), D) > r_star + eps;
  }
  const double rate = static_cast<double>(failures) / trials;
  v.require(rate <= 0.25, "failure rate " + std::to_string(rate));
  v.detail << "r*=" << to_string(r_star) << ", |v(T)|=" << vT.behaviors.size() << ", m=" << m << ", failures "
           << failures << "/" << trials;
}

void ds_refutation(Verdict& v) {
  const auto H = six_cycle().cls;
  const auto start = std::chrono::steady_clock::now();
  const auto r = refute_ds_expressibility(H, SearchOptions{1});
  const double seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
  v.require(r.pairs_examined == 531441, "pairs examined");
  v.require(r.verdict == DsVerdict::Refuted, "verdict");
  v.require(seconds < 60, "too slow");
  std::size_t verified = 0;
  for (const auto& e : r.entries)
    for (const auto& sub : e.subclasses) {
      v.require(exact_dimension(patterns_as_class(sub, 6), DimensionKind::ds()).dimension == 1, "DS(H*) != 1");
      std::set<std::uint64_t> image;
      for (const auto& p : sub) {
        const auto a = e.psi1(p[0]), b = e.psi2(p[1]);
        if (a != PsiValue::Star && b != PsiValue::Star)
          image.insert(static_cast<std::uint64_t>(a) | static_cast<std::uint64_t>(b) << 1);
      }
      v.require(image.size() == 4, "pair does not shatter H*");
      ++verified;
    }
  // {12,32,56,16} and {12,16,56,54}, one-based digits.
  v.require(r.subclass_counts.count({{0, 1}, {0, 5}, {2, 1}, {4, 5}}) > 0, "{12,32,56,16} missing");
  v.require(r.subclass_counts.count({{0, 1}, {0, 5}, {4, 3}, {4, 5}}) > 0, "{12,16,56,54} missing");
  v.detail << r.shattering_pairs << " shattering pairs, " << verified << " H_* re-verified, "
           << r.subclass_counts.size() << " distinct H_*, " << seconds << " s single-threaded";
}

void failing_psi(Verdict& v) {
  oracle::ClassGen gen(1011);
  std::size_t families = 0;
  std::uint64_t inputs = 0;
  while (families < 20) {
    const std::size_t q = gen.uniform(2, 5), size = gen.uniform(1, 4);
    std::set<std::string> rows;
    while (rows.size() < size) {
      std::string r;
      for (std::size_t i = 0; i < q; ++i) r.push_back("01*"[gen.uniform(0, 2)]);
      rows.insert(r);
    }
    std::vector<PsiFunction> members;
    for (const auto& r : rows) members.push_back(PsiFunction::parse(r));
    const PsiFamily F(q, members);
    if (check_distinguisher(F).is_distinguisher) continue;
    ++families;
    for (Point M = 0; M <= 4; ++M) {
      const auto fp = failing_psi_class(F, M);
      v.require(fp.pair_witness.order() == 1, "order");
      const auto rep = validate_witness(fp.pair_witness, fp.cls, M);
      v.require(rep.valid(), "family " + std::to_string(families) + " window " + std::to_string(M));
      inputs += rep.checked_inputs;
    }
  }
  v.detail << "20 families x windows 0..4, " << inputs << " inputs, 0 violations";
}

}  // namespace

int main() {
  struct Criterion {
    const char* name;
    double limit;
    std::function<void(Verdict&)> run;
  };
  const std::vector<Criterion> criteria{{"binary coincidence", 10, binary_coincidence},
                                        {"dimension order and psi instantiation", 60, dimension_order},
                                        {"Sauer check", 0, sauer},
                                        {"gap family", 30, gap_family},
                                        {"NFL exact constants", 0, nfl_constants},
                                        {"learner to witness", 0, learner_witness},
                                        {"counting construction", 0, counting},
                                        {"embedding", 120, embedding},
                                        {"end-to-end learning", 60, end_to_end},
                                        {"DS refutation", 60, ds_refutation},
                                        {"failing psi", 0, failing_psi}};
  bool all = true;
  for (std::size_t i = 0; i < criteria.size(); ++i) {
    Verdict v;
    const auto start = std::chrono::steady_clock::now();
    try {
      criteria[i].run(v);
    } catch (const std::exception& e) {
      v.require(false, std::string("exception: ") + e.what());
    }
    const double seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    if (criteria[i].limit > 0) v.require(seconds < criteria[i].limit, "time limit exceeded");
    all = all && v.pass;
    std::printf("%s %2zu %s (%.2f s): %s\n", v.pass ? "PASS" : "FAIL", i + 1, criteria[i].name, seconds,
                v.detail.str().c_str());
    std::fflush(stdout);
  }
  return all ? 0 : 1;
}
