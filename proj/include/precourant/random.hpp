#pragma once

// Seeded generators for polynomials and sections. Reduction is done by hand
// so that sequences are identical across standard libraries.

#include "bundle.hpp"

#include <random>

namespace precourant {

struct SampleConfig {
  std::uint64_t seed = 0;
  std::size_t trials = 16;
  unsigned max_degree = 2;
};

class Sampler {
public:
  explicit Sampler(std::uint64_t seed) : rng_(seed) {}

  /// Uniform integer in [0, n).
  std::size_t below(std::size_t n) { return static_cast<std::size_t>(rng_() % n); }

  /// Non-zero integer in [-3, 3].
  Rational coefficient() {
    long v = static_cast<long>(below(6)) - 3;
    return Rational(v >= 0 ? v + 1 : v);
  }

  /// Up to three terms of degree at most max_degree.
  Poly poly(std::size_t dim, unsigned max_degree, std::size_t max_terms = 3) {
    Poly p;
    std::size_t n = below(max_terms + 1);
    for (std::size_t t = 0; t < n; ++t) p += term(dim, max_degree);
    return p;
  }

  /// Like poly() but never zero.
  Poly nonzero_poly(std::size_t dim, unsigned max_degree) {
    for (;;) {
      Poly p = poly(dim, max_degree);
      if (!p.is_zero()) return p;
    }
  }

  Poly term(std::size_t dim, unsigned max_degree) {
    unsigned deg = static_cast<unsigned>(below(max_degree + 1));
    Monomial m;
    for (unsigned k = 0; k < deg; ++k) {
      std::size_t v = below(dim);
      ++m.e[v];
      ++m.deg;
    }
    return Poly::monomial(m, coefficient());
  }

  /// Section with independent random coefficients, each with at most two terms.
  Section section(const CourantBundle& b, unsigned max_degree) {
    Section s(b.rank());
    for (std::size_t i = 0; i < b.rank(); ++i) s[i] = poly(b.dim(), max_degree, 2);
    return s;
  }

  /// Random function combination of the given generators.
  Section combination(const CourantBundle& b, const std::vector<Section>& gens, unsigned max_degree) {
    Section s = b.zero();
    for (const auto& g : gens) s += poly(b.dim(), max_degree, 2) * g;
    return s;
  }

  std::vector<Rational> point(std::size_t dim) {
    std::vector<Rational> p(dim);
    for (auto& x : p) x = Rational(static_cast<long>(below(7)) - 3);
    return p;
  }

private:
  std::mt19937_64 rng_;
};

}  // namespace precourant
