// Acceptance gate: one line per criterion, nonzero exit if any fails.

#include "support.hpp"

#include <chrono>
#include <cstdio>
#include <functional>
#include <iostream>
#include <sys/wait.h>

using namespace precourant;
using namespace testing_support;

namespace {

struct Outcome {
  bool ok = true;
  std::string detail;

  void require(bool cond, const std::string& what) {
    if (!cond && ok) {
      ok = false;
      detail = what;
    }
  }
  void require(const Report& r, const std::string& what) {
    if (!r.passed() && ok) {
      ok = false;
      const auto* c = r.first_failure();
      detail = what + ": " + (c ? c->name + " at " + c->witness->where : std::string("skipped"));
    }
  }
};

SampleConfig trials(std::size_t n) {
  SampleConfig cfg;
  cfg.trials = n;
  return cfg;
}

bool all_frame_triples_zero(const PreCourantAlgebroid& p) {
  const auto& b = p.bundle();
  for (std::size_t i = 0; i < b.rank(); ++i)
    for (std::size_t j = 0; j < b.rank(); ++j)
      for (std::size_t k = 0; k < b.rank(); ++k)
        if (!p.jacobiator(b.frame(i), b.frame(j), b.frame(k)).is_zero()) return false;
  return true;
}

bool seeded_triples_zero(const PreCourantAlgebroid& p, std::uint64_t seed, std::size_t n) {
  Sampler s(seed);
  const auto& b = p.bundle();
  for (std::size_t t = 0; t < n; ++t) {
    Section x = s.section(b, 2), y = s.section(b, 2), z = s.section(b, 2);
    if (!p.jacobiator(x, y, z).is_zero()) return false;
  }
  return true;
}

std::vector<Section> lift_of(const Model& m) { return m.lift ? *m.lift : std::vector<Section>{}; }

Outcome c1() {
  Outcome o;
  auto m = golden("standard_r3");
  const auto& p = *m.algebroid;
  o.require(p.rank() == 6, "rank 6");
  o.require(verify_axioms(p, trials(16)), "axioms");
  o.require(verify_derived_identities(p, trials(16)), "derived identities");
  o.require(all_frame_triples_zero(p), "J on frame triples");
  o.require(seeded_triples_zero(p, 1, 16), "J on 16 seeded triples");
  return o;
}

Outcome c2() {
  Outcome o;
  auto m = golden("twisted_r4");
  const auto& p = *m.algebroid;
  o.require(p.rank() == 8, "rank 8");
  auto rep = verify_jacobiator_theorem(p, trials(16));
  o.require(rep, "jacobiator theorem");
  for (const char* c : {"skew-symmetric", "flat-alternating", "function-linear", "values-in-kernel", "vanishes-on-image-of-D", "partial-J-zero", "D-J-flat-zero"})
    o.require(rep.find(c) && rep.find(c)->cases > 0, std::string("check ran: ") + c);
  o.require(!jacobiator_flat(p).is_zero(), "J nonzero");
  return o;
}

Outcome c3() {
  Outcome o;
  auto m = golden("twisted_r4");
  const auto& p = *m.algebroid;
  auto l = lift_of(m);
  auto rep = verify_leibniz2(build_leibniz2(p, kernel_generators(p.bundle(), &l)), trials(16));
  o.require(rep, "leibniz2");
  for (const char* c : {"a1", "a2", "a3", "b1", "b2", "b3", "b4", "c"}) o.require(rep.find(c)->cases == 16, std::string("16 cases of ") + c);
  return o;
}

Outcome c4() {
  Outcome o;
  auto m = golden("twisted_r4");
  const auto& p = *m.algebroid;
  auto l = lift_of(m);
  auto rep = verify_lie2(build_lie2(p, kernel_generators(p.bundle(), &l)), trials(8));
  o.require(rep, "lie2");
  o.require(rep.find("homotopy-jacobi")->cases == 8, "8 quadruples");
  o.require(rep.find("l3-skew")->cases == 48, "l3 under all permutations");
  return o;
}

Outcome c5() {
  Outcome o;
  auto m = golden("standard_r3");
  const auto& p = *m.algebroid;
  const auto& w = *m.omega;
  auto rep = verify_deformation_identity(p, w, trials(16));
  o.require(rep, "deformation identity and morphism");
  o.require(rep.find("morphism-coherence") && rep.find("morphism-coherence")->cases > 0, "morphism checked");
  o.require(std::find(rep.notes.begin(), rep.notes.end(), "omega^2 vanishes on all tested triples: yes") != rep.notes.end(), "omega^2 = 0");
  o.require(!w.is_zero(), "omega nonzero");
  return o;
}

Outcome c6() {
  Outcome o;
  auto m = golden("standard_r3");
  const auto& p = *m.algebroid;
  const auto& b = p.bundle();
  KForm beta = F("x1*dx1&dx2", m.chart);
  auto rep = bfield_verify(p, beta, trials(16));
  o.require(rep, "beta = x1 dx1^dx2");
  for (const char* c : {"conjugated-bracket", "metric-preserved", "anchor-preserved", "jacobiator-invariant"})
    o.require(rep.find(c) && rep.find(c)->cases > 0, std::string("check ran: ") + c);
  // a non-closed field exercises the twisted conjugation
  o.require(bfield_verify(p, F("x3*dx1&dx2", m.chart), trials(16)), "beta = x3 dx1^dx2");
  KForm closed = F("dx1&dx2", m.chart);
  o.require(bfield_verify(p, closed, trials(16)), "beta = dx1^dx2");
  KForm minus = -closed;
  for (std::size_t i = 0; i < b.rank(); ++i)
    for (std::size_t j = 0; j < b.rank(); ++j) {
      Section conj = b_transform(b, minus, p.bracket(b_transform(b, closed, b.frame(i)), b_transform(b, closed, b.frame(j))));
      o.require(conj == p.entry(i, j), "closed field leaves the table unchanged");
    }
  return o;
}

Outcome c7() {
  Outcome o;
  auto m = golden("twisted_r4");
  const auto& p = *m.algebroid;
  const auto& b = p.bundle();
  auto l = lift_of(m);
  auto k = kernel_generators(b, &l);
  Sampler s(7);
  std::vector<Cochain> samples;
  for (int tries = 0; samples.size() < 8 && tries < 64; ++tries) {
    auto c = random_member(b, s, 2, k, 2);
    if (!c.is_zero()) samples.push_back(std::move(c));
  }
  o.require(samples.size() == 8, "8 nonzero samples");
  for (const auto& c : samples) o.require(is_in_CkD(b, c), "sample in C^2_D");
  o.require(verify_comm_lemma(p, samples), "D psi = (partial psi#)b");
  return o;
}

Outcome c8() {
  Outcome o;
  auto m = golden("twisted_r4");
  const auto& p = *m.algebroid;
  KForm h = F("x4*dx1&dx2&dx3", m.chart);
  auto res = pontryagin_representative(p, *m.lift);
  o.require(res.report, "representative");
  o.require(res.H.has_value() && res.H->to_string(m.chart) == ext_d(h).to_string(m.chart), "H equals dh");
  o.require(res.H.has_value() && ext_d(*res.H).is_zero(), "dH = 0");
  auto v = pontryagin_vanishing_check(p, h);
  o.require(v, "vanishing check");
  o.require(v.find("deformed-jacobiator-vanishes") && v.find("deformed-jacobiator-vanishes")->cases > 0, "deformed J checked");
  return o;
}

Outcome c9() {
  Outcome o;
  auto m = golden("twisted_r4");
  const auto& p = *m.algebroid;
  const auto& b = p.bundle();
  auto l = lift_of(m);
  auto k = kernel_generators(b, &l);
  Sampler s(9);
  std::vector<Cochain> samples;
  for (int i = 0; i < 8; ++i) samples.push_back(random_member(b, s, 1 + i % 2, k, 2));
  auto rep = naive_cohomology_check(p, samples, &l);
  o.require(rep, "naive cohomology");
  o.require(rep.find("D-squared-zero")->cases == 8 && rep.find("partial-squared-zero")->cases == 8, "8 samples each");
  return o;
}

/// (R ^ R)(d1..d4) = 1/4 sum over S4 of sgn * (R(s1,s2), R(s3,s4)), by inversion counting.
Poly brute_rr(const DissectionData& dd) {
  std::array<std::size_t, 4> s{0, 1, 2, 3};
  Poly sum;
  do {
    int inv = 0;
    for (int i = 0; i < 4; ++i)
      for (int j = i + 1; j < 4; ++j) inv += s[i] > s[j];
    Poly v = dd.pair(dd.curvature(s[0], s[1]), dd.curvature(s[2], s[3]));
    sum += inv % 2 ? -v : v;
  } while (std::next_permutation(s.begin(), s.end()));
  return Rational(1, 4) * sum;
}

Outcome c10() {
  Outcome o;
  auto m = golden("dissection_rank2");
  const auto& dd = *m.dissection;
  o.require(dd.rank() == 2 && dd.psi().is_zero(), "rank 2, Psi = 0");
  o.require(dissection_jacobiator_check(dd), "closed-form components");
  auto pd = dissection_pontryagin(dd);
  o.require(pd.conditions_hold, "flatness equalities");
  o.require(pd.report, "pontryagin checks");
  KForm want(4, 4);
  want.set({0, 1, 2, 3}, Rational(1, 2) * brute_rr(dd));
  o.require(!want.is_zero(), "nonzero R^R");
  o.require(pd.H == want, "H = 1/2 (R^R) by brute force");
  return o;
}

Outcome c11() {
  Outcome o;
  auto a = golden("action_abelian");
  o.require(a.algebroid.has_value(), "action_abelian builds");
  if (!o.ok) return o;
  o.require(all_frame_triples_zero(*a.algebroid) && seeded_triples_zero(*a.algebroid, 11, 16), "J = 0");
  auto t = golden("twisted_action_synthetic");
  o.require(t.construction.has_value() && t.construction->passed(), "validate_twisted_action");
  o.require(t.algebroid.has_value(), "synthetic builds");
  if (!o.ok) return o;
  o.require(verify_jacobiator_theorem(*t.algebroid, trials(16)), "synthetic theorem suite");
  o.require(!jacobiator_flat(*t.algebroid).is_zero(), "synthetic J nonzero");
  auto d = golden("double_nonabelian");
  o.require(d.construction.has_value() && d.construction->passed(), "double_nonabelian construction");
  // brute force over basis triples of the double of [a,b] = b
  std::vector<Rational> c(8, Rational(0));
  c[(0 * 2 + 1) * 2 + 1] = 1;
  c[(1 * 2 + 0) * 2 + 1] = -1;
  auto g = lie_double(QuadraticLieAlgebra({"a", "b"}, c, RationalMatrix::identity(2)));
  o.require(validate_quadratic_lie(g), "double validates");
  const std::size_t n = g.dim();
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = 0; j < n; ++j)
      for (std::size_t k = 0; k < n; ++k) {
        auto x = g.basis(i), y = g.basis(j), z = g.basis(k);
        auto j1 = g.bracket(x, g.bracket(y, z)), j2 = g.bracket(y, g.bracket(z, x)), j3 = g.bracket(z, g.bracket(x, y));
        for (std::size_t q = 0; q < n; ++q) o.require(j1[q] + j2[q] + j3[q] == 0, "Jacobi brute force");
        o.require(g.pair(g.bracket(x, y), z) + g.pair(y, g.bracket(x, z)) == 0, "invariance brute force");
      }
  return o;
}

std::pair<int, std::string> run_cli(const std::string& args) {
  std::string cmd = std::string(PRECOURANT_CLI) + " " + args + " 2>&1";
  std::string out;
  FILE* f = popen(cmd.c_str(), "r");
  if (!f) return {-1, ""};
  char buf[4096];
  std::size_t n;
  while ((n = fread(buf, 1, sizeof buf, f)) > 0) out.append(buf, n);
  int st = pclose(f);
  return {WIFEXITED(st) ? WEXITSTATUS(st) : -1, out};
}

Outcome c12() {
  Outcome o;
  for (const char* name : {"standard_r3", "twisted_r4", "dissection_rank2", "action_abelian", "twisted_action_synthetic", "double_nonabelian"}) {
    auto a = run_cli("--json --seed 3 --manifest " + manifest_path(name));
    auto b = run_cli("--json --seed 3 --manifest " + manifest_path(name));
    o.require(a.first == 0, std::string(name) + " exits 0");
    o.require(!a.second.empty() && a.second == b.second, std::string(name) + " byte-identical");
  }
  return o;
}

struct Criterion {
  int id;
  const char* title;
  double budget;  // seconds
  std::function<Outcome()> run;
};

}  // namespace

int main() {
  const std::vector<Criterion> cs = {
      {1, "standard Courant algebroid: axioms, identities, J = 0", 5, c1},
      {2, "twisted exact example: Jacobiator theorem suite", 30, c2},
      {3, "Leibniz 2-algebra axioms on twisted_r4", 30, c3},
      {4, "Lie 2-algebra suite on twisted_r4", 60, c4},
      {5, "deformation identity and (id, id, omega) morphism", 30, c5},
      {6, "B-field transformations", 10, c6},
      {7, "D psi = (partial psi#)b on 8 samples", 20, c7},
      {8, "Pontryagin representative equals dh; vanishing deformation", 20, c8},
      {9, "naive cohomology: D^2 = 0 and partial^2 = 0", 20, c9},
      {10, "dissection components and H = 1/2 (R^R)", 30, c10},
      {11, "constructions: actions, twisted action, double", 20, c11},
      {12, "determinism of reports", 0, c12},
  };
  int failed = 0;
  for (const auto& c : cs) {
    auto start = std::chrono::steady_clock::now();
    Outcome o;
    try {
      o = c.run();
    } catch (const std::exception& e) {
      o.ok = false;
      o.detail = std::string("exception: ") + e.what();
    }
    double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    char t[64];
    std::snprintf(t, sizeof t, "%.2f s", secs);
    std::string line = std::string(o.ok ? "PASS" : "FAIL") + "  criterion " + std::to_string(c.id) + ": " + c.title + " (" + t;
    if (c.budget > 0) {
      char bud[32];
      std::snprintf(bud, sizeof bud, ", budget %.0f s", c.budget);
      line += bud;
    }
    line += ")";
    if (!o.ok) {
      line += " -- " + o.detail;
      ++failed;
    }
    std::cout << line << std::endl;
  }
  std::cout << (failed ? std::to_string(failed) + " criteria failed" : std::string("all 12 criteria pass")) << std::endl;
  return failed ? 1 : 0;
}
