#pragma once

// Shared fixtures and independent oracles for the test suites.

#include "precourant/precourant.hpp"

#include <fstream>
#include <sstream>

namespace testing_support {

using namespace precourant;

inline std::string read_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot read " + path);
  std::ostringstream os;
  os << in.rdbuf();
  return os.str();
}

inline std::string manifest_path(const std::string& name) { return std::string(PRECOURANT_MANIFEST_DIR) + "/" + name + ".manifest"; }

inline Model golden(const std::string& name) { return load_model(read_file(manifest_path(name)), name); }

inline Chart chart(std::size_t n) { return Chart::standard(n); }

inline Poly P(const std::string& s, const Chart& c) { return parse_poly(s, c); }

inline KForm F(const std::string& s, const Chart& c, std::optional<std::size_t> deg = std::nullopt) { return parse_form(s, c, deg); }

/// Vector field from per-coordinate literals.
inline VectorField V(const std::vector<std::string>& cs, const Chart& c) {
  VectorField x(c.dim());
  for (std::size_t i = 0; i < cs.size(); ++i) x[i] = P(cs[i], c);
  return x;
}

/// The h-twisted exact algebroid on the standard bundle.
inline PreCourantAlgebroid twisted_exact(const Chart& c, const KForm& h) {
  auto b = CourantBundle::standard(c);
  return apply_deformation(PreCourantAlgebroid::with_zero_table(b), twist_deformation(b, h));
}

inline PreCourantAlgebroid standard(const Chart& c) { return PreCourantAlgebroid::with_zero_table(CourantBundle::standard(c)); }

// Dorfman oracle on TM + T*M, written directly in terms of vector fields and
// forms: [X,Y] + L_X eta - i_Y d xi + h(X,Y,.).

inline VectorField tangent_part(const Section& s, std::size_t n) {
  VectorField x(n);
  for (std::size_t i = 0; i < n; ++i) x[i] = s[i];
  return x;
}

inline KForm cotangent_part(const Section& s, std::size_t n) {
  KForm a(n, 1);
  for (std::size_t i = 0; i < n; ++i) a.set({static_cast<std::uint8_t>(i)}, s[n + i]);
  return a;
}

inline Section assemble(const VectorField& x, const KForm& a) {
  const std::size_t n = x.dim();
  Section s(2 * n);
  for (std::size_t i = 0; i < n; ++i) {
    s[i] = x[i];
    s[n + i] = a.coefficient({static_cast<std::uint8_t>(i)});
  }
  return s;
}

inline Section dorfman(const Section& e1, const Section& e2, std::size_t n, const KForm* h = nullptr) {
  VectorField x = tangent_part(e1, n), y = tangent_part(e2, n);
  KForm xi = cotangent_part(e1, n), eta = cotangent_part(e2, n);
  KForm form = lie_derivative(x, eta) - contract(y, ext_d(xi));
  if (h) form = form + contract(y, contract(x, *h));
  return assemble(vf_bracket(x, y), form);
}

inline Section dorfman_jacobiator(const Section& a, const Section& b, const Section& c, std::size_t n, const KForm* h = nullptr) {
  return dorfman(a, dorfman(b, c, n, h), n, h) - dorfman(dorfman(a, b, n, h), c, n, h) - dorfman(b, dorfman(a, c, n, h), n, h);
}

inline std::vector<Section> random_sections(const CourantBundle& b, std::uint64_t seed, std::size_t count, unsigned deg = 2) {
  Sampler s(seed);
  std::vector<Section> out;
  for (std::size_t i = 0; i < count; ++i) out.push_back(s.section(b, deg));
  return out;
}

inline std::string failures(const Report& r) {
  std::string s;
  for (const auto& c : r.checks)
    if (!c.passed) s += c.name + " at " + c.witness->where + ": " + c.witness->lhs + " vs " + c.witness->rhs + "\n";
  return s;
}

}  // namespace testing_support
