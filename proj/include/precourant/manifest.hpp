#pragma once

// Manifest files: `[section]` headers, `key = value` entries, `#` comments.
// Parsing checks the syntax and the section/key schema; build_model turns a
// manifest into a pre-Courant algebroid plus the data blocks tasks consume.

#include "construct.hpp"

#include <charconv>
#include <sstream>

namespace precourant {

/// Error at a 1-based line and column of the manifest text.
class manifest_error : public std::runtime_error {
public:
  manifest_error(std::size_t line, std::size_t column, std::string expected, const std::string& message)
      : std::runtime_error("line " + std::to_string(line) + ", column " + std::to_string(column) + ": " + message +
                           (expected.empty() ? "" : " (expected " + expected + ")")),
        line_(line), column_(column), expected_(std::move(expected)) {}
  std::size_t line() const { return line_; }
  std::size_t column() const { return column_; }
  const std::string& expected() const { return expected_; }

private:
  std::size_t line_, column_;
  std::string expected_;
};

struct ManifestEntry {
  std::string key;                // words joined by one space
  std::vector<std::string> words;
  std::string value;
  std::size_t line = 0;
  std::size_t key_column = 0;
  std::size_t value_column = 0;
};

struct ManifestSection {
  std::string name;
  std::size_t line = 0;
  std::vector<ManifestEntry> entries;

  const ManifestEntry* find(std::string_view key) const {
    for (const auto& e : entries)
      if (e.key == key) return &e;
    return nullptr;
  }
};

struct Manifest {
  std::vector<ManifestSection> sections;

  const ManifestSection* section(std::string_view name) const {
    for (const auto& s : sections)
      if (s.name == name) return &s;
    return nullptr;
  }
};

namespace detail {

enum class KeyShape { fixed, coordinate, pair, pair_or_twist };

struct SectionSchema {
  std::string_view name;
  KeyShape shape;
  std::vector<std::string_view> keys;  // fixed keys
};

inline const std::vector<SectionSchema>& manifest_schema() {
  static const std::vector<SectionSchema> s = {
      {"chart", KeyShape::fixed, {"vars"}},
      {"bundle", KeyShape::fixed, {"frames", "metric", "anchor"}},
      {"bracket", KeyShape::pair, {}},
      {"builder", KeyShape::fixed, {"kind", "h"}},
      {"connection", KeyShape::coordinate, {}},
      {"beta", KeyShape::pair_or_twist, {}},
      {"algebra", KeyShape::fixed, {"names", "pairing", "double"}},
      {"algebra.bracket", KeyShape::pair, {}},
      {"action", KeyShape::fixed, {"rho"}},
      {"action.k", KeyShape::pair, {}},
      {"dissection", KeyShape::fixed, {"names", "pairing", "psi"}},
      {"dissection.gamma", KeyShape::coordinate, {}},
      {"dissection.R", KeyShape::pair, {}},
      {"dissection.bracket", KeyShape::pair, {}},
      {"omega", KeyShape::pair_or_twist, {}},
      {"bfield", KeyShape::fixed, {"beta"}},
      {"vanishing", KeyShape::fixed, {"h"}},
      {"lift", KeyShape::coordinate, {}},
      {"complement", KeyShape::fixed, {"sections"}},
      {"run", KeyShape::fixed, {"tasks", "seed", "trials", "max_degree", "points"}},
  };
  return s;
}

inline std::string join(const std::vector<std::string_view>& xs, std::string_view sep) {
  std::string out;
  for (std::size_t i = 0; i < xs.size(); ++i) out += (i ? std::string(sep) : "") + std::string(xs[i]);
  return out;
}

inline bool is_space(char c) { return c == ' ' || c == '\t' || c == '\r'; }

/// Trimmed pieces of `s` split at `sep`, with their offsets into `s`.
inline std::vector<std::pair<std::size_t, std::string_view>> split_offsets(std::string_view s, char sep) {
  std::vector<std::pair<std::size_t, std::string_view>> out;
  std::size_t start = 0;
  while (true) {
    std::size_t end = s.find(sep, start);
    if (end == std::string_view::npos) end = s.size();
    std::size_t a = start, b = end;
    while (a < b && is_space(s[a])) ++a;
    while (b > a && is_space(s[b - 1])) --b;
    out.emplace_back(a, s.substr(a, b - a));
    if (end == s.size()) break;
    start = end + 1;
  }
  return out;
}

}  // namespace detail

/// Syntax and schema: known sections and keys, no duplicates, every entry
/// inside a section, non-empty values.
inline Manifest parse_manifest(std::string_view text) {
  Manifest m;
  std::size_t line_no = 0, pos = 0;
  while (pos <= text.size()) {
    std::size_t end = text.find('\n', pos);
    if (end == std::string_view::npos) end = text.size();
    std::string_view line = text.substr(pos, end - pos);
    ++line_no;
    pos = end + 1;
    std::size_t a = 0;
    while (a < line.size() && detail::is_space(line[a])) ++a;
    std::size_t b = line.size();
    while (b > a && detail::is_space(line[b - 1])) --b;
    if (a == b || line[a] == '#') {
      if (end == text.size()) break;
      continue;
    }
    const std::size_t col = a + 1;
    if (line[a] == '[') {
      if (line[b - 1] != ']') throw manifest_error(line_no, b + 1, "']'", "unterminated section header");
      std::string name(line.substr(a + 1, b - a - 2));
      const auto& schema = detail::manifest_schema();
      auto it = std::find_if(schema.begin(), schema.end(), [&](const auto& s) { return s.name == name; });
      if (it == schema.end()) {
        std::vector<std::string_view> names;
        for (const auto& s : schema) names.push_back(s.name);
        throw manifest_error(line_no, col + 1, "one of " + detail::join(names, ", "), "unknown section '" + name + "'");
      }
      if (m.section(name)) throw manifest_error(line_no, col, "", "duplicate section [" + name + "]");
      m.sections.push_back(ManifestSection{name, line_no, {}});
    } else {
      if (m.sections.empty()) throw manifest_error(line_no, col, "a [section] header", "entry outside any section");
      std::size_t eq = line.find('=', a);
      if (eq == std::string_view::npos || eq >= b) throw manifest_error(line_no, b + 1, "'='", "entry without a value");
      ManifestEntry e;
      e.line = line_no;
      e.key_column = col;
      std::string_view key = line.substr(a, eq - a);
      std::size_t k = 0;
      while (k < key.size()) {
        while (k < key.size() && detail::is_space(key[k])) ++k;
        std::size_t s = k;
        while (k < key.size() && !detail::is_space(key[k])) ++k;
        if (k > s) {
          std::string w(key.substr(s, k - s));
          if (!is_identifier(w))
            throw manifest_error(line_no, a + s + 1, "an identifier", "malformed key '" + w + "'");
          e.words.push_back(std::move(w));
        }
      }
      if (e.words.empty()) throw manifest_error(line_no, col, "a key", "entry without a key");
      for (std::size_t i = 0; i < e.words.size(); ++i) e.key += (i ? " " : "") + e.words[i];
      std::size_t v = eq + 1;
      while (v < b && detail::is_space(line[v])) ++v;
      if (v >= b) throw manifest_error(line_no, eq + 2, "a value", "empty value for '" + e.key + "'");
      e.value = std::string(line.substr(v, b - v));
      e.value_column = v + 1;

      auto& sec = m.sections.back();
      const auto& schema = *std::find_if(detail::manifest_schema().begin(), detail::manifest_schema().end(),
                                         [&](const auto& s) { return s.name == sec.name; });
      bool ok = false;
      std::string expected;
      switch (schema.shape) {
        case detail::KeyShape::fixed:
          ok = e.words.size() == 1 && std::find(schema.keys.begin(), schema.keys.end(), e.words[0]) != schema.keys.end();
          expected = "one of " + detail::join(schema.keys, ", ");
          break;
        case detail::KeyShape::coordinate:
          ok = e.words.size() == 1;
          expected = "a coordinate name";
          break;
        case detail::KeyShape::pair:
          ok = e.words.size() == 2;
          expected = "two names separated by a space";
          break;
        case detail::KeyShape::pair_or_twist:
          ok = e.words.size() == 2 || (e.words.size() == 1 && e.words[0] == "twist");
          expected = "two names or 'twist'";
          break;
      }
      if (!ok) throw manifest_error(line_no, col, expected, "unknown key '" + e.key + "' in [" + sec.name + "]");
      if (sec.find(e.key)) throw manifest_error(line_no, col, "", "duplicate key '" + e.key + "' in [" + sec.name + "]");
      sec.entries.push_back(std::move(e));
    }
    if (end == text.size()) break;
  }
  return m;
}

/// Canonical task order.
inline const std::vector<std::string>& canonical_tasks() {
  static const std::vector<std::string> t = {"validate-construction", "validate-bundle", "verify-axioms", "verify-identities",
                                             "jacobiator-theorem", "comm-lemma", "leibniz2", "lie2", "deform", "bfield",
                                             "pontryagin", "pontryagin-vanishing", "naive-cohomology", "quotient-jacobi",
                                             "dissection"};
  return t;
}

/// A manifest turned into objects. `algebroid` is empty when the builder's
/// preconditions fail; `construction` then holds the failing report.
struct Model {
  std::string name;
  std::string builder;
  Chart chart;
  std::optional<PreCourantAlgebroid> algebroid;
  std::optional<Report> construction;
  std::optional<std::vector<Section>> lift;
  std::optional<std::vector<Section>> complement;
  std::optional<Deformation> omega;
  std::vector<KForm> betas;
  std::optional<KForm> vanishing;
  std::optional<DissectionData> dissection;
  std::vector<std::vector<Rational>> points;
  std::vector<std::string> tasks;
  SampleConfig cfg;
};

namespace detail {

class ModelBuilder {
public:
  explicit ModelBuilder(const Manifest& m) : m_(m) {}

  Model build(std::string name) {
    Model out;
    out.name = std::move(name);
    const auto* chart = require_section("chart");
    out.chart = parse_chart(*chart);
    chart_ = &out.chart;
    run_block(out);
    if (out.points.empty()) out.points = default_points(out.chart.dim(), out.cfg.seed);

    const bool has_bracket = m_.section("bracket"), has_builder = m_.section("builder");
    if (has_bracket == has_builder) {
      const auto* s = m_.section("bracket") ? m_.section("bracket") : m_.section("chart");
      throw manifest_error(s->line, 1, "exactly one of [bracket] or [builder]", has_bracket ? "both [bracket] and [builder] present" : "no [bracket] or [builder] block");
    }
    if (has_bracket) {
      out.builder = "table";
      auto b = bundle_block();
      out.algebroid = wrap(*m_.section("bracket"), [&] { return PreCourantAlgebroid(b, sparse_table(*m_.section("bracket"), b, false)); });
    } else {
      build_from_builder(out);
    }
    data_blocks(out);
    return out;
  }

private:
  const Manifest& m_;
  const Chart* chart_ = nullptr;

  const ManifestSection* require_section(std::string_view name, std::string_view why = {}) const {
    if (const auto* s = m_.section(name)) return s;
    std::size_t line = m_.sections.empty() ? 1 : m_.sections.back().line;
    throw manifest_error(line, 1, "a [" + std::string(name) + "] block", "missing block [" + std::string(name) + "]" + (why.empty() ? "" : " " + std::string(why)));
  }

  static const ManifestEntry& require_key(const ManifestSection& s, std::string_view key) {
    if (const auto* e = s.find(key)) return *e;
    throw manifest_error(s.line, 1, "key '" + std::string(key) + "'", "[" + s.name + "] lacks '" + std::string(key) + "'");
  }

  template <class F>
  static auto at_entry(const ManifestEntry& e, std::size_t offset, F&& f) -> decltype(f()) {
    try {
      return f();
    } catch (const parse_error& err) {
      throw manifest_error(e.line, e.value_column + offset + err.position(), err.expected(), "[" + e.key + "] " + err.what());
    } catch (const manifest_error&) {
      throw;
    } catch (const std::exception& err) {
      throw manifest_error(e.line, e.value_column + offset, "", std::string("'") + e.key + "': " + err.what());
    }
  }

  template <class F>
  static auto wrap(const ManifestSection& s, F&& f) -> decltype(f()) {
    try {
      return f();
    } catch (const manifest_error&) {
      throw;
    } catch (const construction_error&) {
      throw;
    } catch (const std::exception& err) {
      throw manifest_error(s.line, 1, "", "[" + s.name + "] " + err.what());
    }
  }

  static std::vector<std::string> names_list(const ManifestEntry& e) {
    std::vector<std::string> out;
    for (const auto& [off, piece] : split_offsets(e.value, ',')) {
      if (!is_identifier(piece)) throw manifest_error(e.line, e.value_column + off, "an identifier", "malformed name '" + std::string(piece) + "'");
      out.emplace_back(piece);
    }
    return out;
  }

  Chart parse_chart(const ManifestSection& s) const {
    const auto& e = require_key(s, "vars");
    auto vars = names_list(e);
    return at_entry(e, 0, [&] { return Chart(vars); });
  }

  static std::uint64_t parse_uint(const ManifestEntry& e, std::string_view text, std::size_t offset) {
    std::uint64_t v = 0;
    auto [p, ec] = std::from_chars(text.data(), text.data() + text.size(), v);
    if (ec != std::errc() || p != text.data() + text.size() || text.empty())
      throw manifest_error(e.line, e.value_column + offset, "a non-negative integer", "malformed number '" + std::string(text) + "'");
    return v;
  }

  void run_block(Model& out) const {
    const auto* r = m_.section("run");
    if (!r) return;
    if (const auto* e = r->find("tasks")) {
      for (const auto& [off, t] : split_offsets(e->value, ',')) {
        const auto& known = canonical_tasks();
        if (std::find(known.begin(), known.end(), t) == known.end())
          throw manifest_error(e->line, e->value_column + off, "a task name", "unknown task '" + std::string(t) + "'");
        out.tasks.emplace_back(t);
      }
    }
    if (const auto* e = r->find("seed")) out.cfg.seed = parse_uint(*e, e->value, 0);
    if (const auto* e = r->find("trials")) out.cfg.trials = parse_uint(*e, e->value, 0);
    if (const auto* e = r->find("max_degree")) out.cfg.max_degree = static_cast<unsigned>(parse_uint(*e, e->value, 0));
    if (const auto* e = r->find("points")) {
      for (const auto& [roff, row] : split_offsets(e->value, ';')) {
        std::vector<Rational> p;
        for (const auto& [coff, cell] : split_offsets(row, ',')) p.push_back(rational_at(*e, roff + coff, cell));
        if (p.size() != chart_->dim())
          throw manifest_error(e->line, e->value_column + roff, std::to_string(chart_->dim()) + " coordinates", "sample point of the wrong length");
        out.points.push_back(std::move(p));
      }
    }
  }

  Rational rational_at(const ManifestEntry& e, std::size_t offset, std::string_view cell) const {
    Poly p = at_entry(e, offset, [&] { return parse_poly(cell, *chart_); });
    if (!p.is_constant()) throw manifest_error(e.line, e.value_column + offset, "a rational number", "non-constant entry '" + std::string(cell) + "'");
    return p.constant_value();
  }

  /// Rows separated by ';', entries by ','.
  template <class T, class Cell>
  Matrix<T> matrix(const ManifestEntry& e, Cell&& cell, std::optional<std::size_t> rows, std::optional<std::size_t> cols, const std::string& what) const {
    std::vector<std::vector<T>> data;
    std::vector<std::size_t> row_off;
    for (const auto& [roff, row] : split_offsets(e.value, ';')) {
      std::vector<T> r;
      for (const auto& [coff, c] : split_offsets(row, ',')) r.push_back(cell(roff + coff, c));
      data.push_back(std::move(r));
      row_off.push_back(roff);
    }
    if (rows && data.size() != *rows)
      throw manifest_error(e.line, e.value_column, std::to_string(*rows) + " rows",
                           what + " has " + std::to_string(data.size()) + " rows, expected " + std::to_string(*rows));
    const std::size_t c = cols ? *cols : data.front().size();
    for (std::size_t i = 0; i < data.size(); ++i)
      if (data[i].size() != c)
        throw manifest_error(e.line, e.value_column + row_off[i], std::to_string(c) + " entries",
                             what + " row " + std::to_string(i + 1) + " has " + std::to_string(data[i].size()) + " entries, expected " + std::to_string(c));
    Matrix<T> m(data.size(), c);
    for (std::size_t i = 0; i < data.size(); ++i)
      for (std::size_t j = 0; j < c; ++j) m(i, j) = data[i][j];
    return m;
  }

  RationalMatrix rational_matrix(const ManifestEntry& e, std::optional<std::size_t> n, const std::string& what) const {
    return matrix<Rational>(e, [&](std::size_t off, std::string_view c) { return rational_at(e, off, c); }, n, n, what);
  }

  PolyMatrix poly_matrix(const ManifestEntry& e, std::size_t rows, std::size_t cols, const std::string& what) const {
    return matrix<Poly>(e, [&](std::size_t off, std::string_view c) { return at_entry(e, off, [&] { return parse_poly(c, *chart_); }); }, rows, cols, what);
  }

  CourantBundle bundle_block() const {
    const auto* s = m_.section("bundle");
    if (!s) return CourantBundle::standard(*chart_);
    const auto& me = require_key(*s, "metric");
    RationalMatrix g = rational_matrix(me, std::nullopt, "[bundle] metric");
    if (g.rows() != g.cols())
      throw manifest_error(me.line, me.value_column, "a square matrix", "[bundle] metric is " + std::to_string(g.rows()) + "x" + std::to_string(g.cols()));
    const std::size_t r = g.rows();
    PolyMatrix a = poly_matrix(require_key(*s, "anchor"), r, chart_->dim(), "[bundle] anchor (rank " + std::to_string(r) + ")");
    std::vector<std::string> names;
    if (const auto* f = s->find("frames")) {
      names = names_list(*f);
      if (names.size() != r)
        throw manifest_error(f->line, f->value_column, std::to_string(r) + " names", "[bundle] frames lists " + std::to_string(names.size()) + " names, rank is " + std::to_string(r));
    }
    return wrap(*s, [&] { return CourantBundle(*chart_, g, a, names); });
  }

  static std::size_t name_index(const ManifestEntry& e, const std::vector<std::string>& names, std::size_t word) {
    auto it = std::find(names.begin(), names.end(), e.words[word]);
    if (it == names.end()) throw manifest_error(e.line, e.key_column, "a known name", "unknown name '" + e.words[word] + "'");
    return static_cast<std::size_t>(it - names.begin());
  }

  /// Linear combination of named basis elements with polynomial coefficients.
  std::vector<Poly> combination(const ManifestEntry& e, std::string_view text, std::size_t offset, const std::vector<std::string>& names) const {
    return at_entry(e, offset, [&] {
      Symbols sym{chart_, BasisMode::linear, [&names](std::string_view id) -> std::optional<std::size_t> {
                    auto it = std::find(names.begin(), names.end(), id);
                    if (it == names.end()) return std::nullopt;
                    return static_cast<std::size_t>(it - names.begin());
                  }};
      auto g = LiteralParser(text, sym).parse();
      std::vector<Poly> v(names.size());
      for (const auto& [k, c] : g) {
        if (k.empty()) throw parse_error(0, "a basis name in every term", "term without a basis element");
        v[k[0]] = c;
      }
      return v;
    });
  }

  /// Sparse table over frame pairs; `alternate` fills unlisted reverse pairs with the negative.
  std::vector<Section> sparse_table(const ManifestSection& s, const CourantBundle& b, bool alternate) const {
    const std::size_t r = b.rank();
    std::vector<Section> t(r * r, b.zero());
    std::vector<bool> given(r * r, false);
    for (const auto& e : s.entries) {
      if (e.words.size() != 2) continue;
      std::size_t i = name_index(e, b.frame_names(), 0), j = name_index(e, b.frame_names(), 1);
      t[i * r + j] = at_entry(e, 0, [&] { return b.parse_section(e.value); });
      given[i * r + j] = true;
    }
    if (alternate)
      for (std::size_t i = 0; i < r; ++i)
        for (std::size_t j = 0; j < r; ++j)
          if (given[i * r + j] && !given[j * r + i]) t[j * r + i] = -t[i * r + j];
    return t;
  }

  KForm form(const ManifestEntry& e, std::size_t degree) const {
    return at_entry(e, 0, [&] { return parse_form(e.value, *chart_, degree); });
  }

  void build_from_builder(Model& out) {
    const auto& sec = *m_.section("builder");
    const auto& kind = require_key(sec, "kind");
    out.builder = kind.value;
    auto forbid_bundle = [&] {
      if (const auto* b = m_.section("bundle"))
        throw manifest_error(b->line, 1, "", "[bundle] is determined by the " + kind.value + " builder");
    };
    if (kind.value == "standard") {
      auto b = bundle_block();
      out.algebroid = PreCourantAlgebroid::with_zero_table(b);
    } else if (kind.value == "twisted_exact") {
      forbid_bundle();
      auto b = CourantBundle::standard(*chart_);
      KForm h = form(require_key(sec, "h"), 3);
      out.algebroid = apply_deformation(PreCourantAlgebroid::with_zero_table(b), twist_deformation(b, h));
    } else if (kind.value == "connection_beta") {
      auto b = bundle_block();
      Connection c;
      if (const auto* cs = m_.section("connection")) {
        c.gamma.assign(b.dim(), PolyMatrix(b.rank(), b.rank()));
        for (const auto& e : cs->entries) {
          auto m = name_index(e, chart_->vars(), 0);
          c.gamma[m] = poly_matrix(e, b.rank(), b.rank(), "[connection] " + e.key);
        }
      }
      std::vector<Section> beta(b.rank() * b.rank(), b.zero());
      if (const auto* bs = m_.section("beta")) {
        beta = sparse_table(*bs, b, true);
        if (const auto* tw = bs->find("twist")) {
          auto w = twist_deformation(b, form(*tw, 3));
          for (std::size_t k = 0; k < beta.size(); ++k) beta[k] += w.table()[k];
        }
      }
      Report rep = validate_connection_beta(b, c, beta);
      out.construction = rep;
      if (rep.passed()) out.algebroid = from_connection_beta(b, c, beta);
    } else if (kind.value == "twisted_action") {
      forbid_bundle();
      TwistedAction ta{algebra_block(), *chart_, {}, {}};
      const std::size_t m = ta.algebra.dim();
      const auto& act = *require_section("action", "for the twisted_action builder");
      ta.rho = poly_matrix(require_key(act, "rho"), m, chart_->dim(), "[action] rho (algebra dimension " + std::to_string(m) + ")");
      ta.k.assign(m * m, Section(m));
      if (const auto* ks = m_.section("action.k")) {
        std::vector<bool> given(m * m, false);
        for (const auto& e : ks->entries) {
          std::size_t i = name_index(e, ta.algebra.names(), 0), j = name_index(e, ta.algebra.names(), 1);
          auto v = combination(e, e.value, 0, ta.algebra.names());
          Section s(m);
          for (std::size_t t = 0; t < m; ++t) s[t] = v[t];
          ta.k[i * m + j] = s;
          given[i * m + j] = true;
        }
        for (std::size_t i = 0; i < m; ++i)
          for (std::size_t j = 0; j < m; ++j)
            if (given[i * m + j] && !given[j * m + i]) ta.k[j * m + i] = -ta.k[i * m + j];
      }
      Report rep = validate_twisted_action(ta, out.points, out.cfg);
      out.construction = rep;
      if (rep.passed()) out.algebroid = from_twisted_action(ta, out.points, out.cfg);
    } else if (kind.value == "dissection") {
      forbid_bundle();
      out.dissection = dissection_block();
      Report rep = validate_dissection(*out.dissection);
      out.construction = rep;
      if (rep.passed()) out.algebroid = from_dissection(*out.dissection);
    } else {
      throw manifest_error(kind.line, kind.value_column, "standard, twisted_exact, connection_beta, twisted_action or dissection",
                           "unknown builder '" + kind.value + "'");
    }
    if (out.builder != "dissection" && m_.section("dissection"))
      throw manifest_error(m_.section("dissection")->line, 1, "", "[dissection] requires kind = dissection");
  }

  QuadraticLieAlgebra algebra_block() const {
    const auto& s = *require_section("algebra", "for the twisted_action builder");
    auto names = names_list(require_key(s, "names"));
    const std::size_t m = names.size();
    const auto* dbl = s.find("double");
    const bool doubled = dbl && dbl->value == "true";
    if (dbl && !doubled && dbl->value != "false") throw manifest_error(dbl->line, dbl->value_column, "true or false", "malformed flag");
    // the double carries its own pairing, so the input pairing is optional there
    RationalMatrix g(m, m);
    if (!doubled || s.find("pairing")) g = rational_matrix(require_key(s, "pairing"), m, "[algebra] pairing");
    std::vector<Rational> c(m * m * m, Rational(0));
    if (const auto* bs = m_.section("algebra.bracket")) {
      std::vector<bool> given(m * m, false);
      for (const auto& e : bs->entries) {
        std::size_t i = name_index(e, names, 0), j = name_index(e, names, 1);
        auto v = combination(e, e.value, 0, names);
        for (std::size_t k = 0; k < m; ++k) {
          if (!v[k].is_constant()) throw manifest_error(e.line, e.value_column, "rational structure constants", "non-constant structure constant");
          c[(i * m + j) * m + k] = v[k].constant_value();
        }
        given[i * m + j] = true;
      }
      for (std::size_t i = 0; i < m; ++i)
        for (std::size_t j = 0; j < m; ++j)
          if (given[i * m + j] && !given[j * m + i])
            for (std::size_t k = 0; k < m; ++k) c[(j * m + i) * m + k] = -c[(i * m + j) * m + k];
    }
    QuadraticLieAlgebra alg = wrap(s, [&] { return QuadraticLieAlgebra(names, c, g); });
    if (doubled) alg = wrap(s, [&] { return lie_double(alg); });
    return alg;
  }

  DissectionData dissection_block() const {
    const auto& s = *require_section("dissection", "for the dissection builder");
    std::vector<std::string> names;
    if (const auto* e = s.find("names")) names = names_list(*e);
    const std::size_t q = names.size();
    RationalMatrix g(q, q);
    if (q) g = rational_matrix(require_key(s, "pairing"), q, "[dissection] pairing");
    DissectionData dd = wrap(s, [&] { return DissectionData(*chart_, names, g); });
    (void)wrap(s, [&] { return dd.bundle(); });
    if (const auto* e = s.find("psi")) dd.set_psi(form(*e, 3));
    if (const auto* gs = m_.section("dissection.gamma"))
      for (const auto& e : gs->entries) dd.set_gamma(name_index(e, chart_->vars(), 0), poly_matrix(e, q, q, "[dissection.gamma] " + e.key));
    if (const auto* rs = m_.section("dissection.R"))
      for (const auto& e : rs->entries) {
        std::size_t i = name_index(e, chart_->vars(), 0), j = name_index(e, chart_->vars(), 1);
        auto v = combination(e, e.value, 0, names);
        at_entry(e, 0, [&] {
          dd.set_curvature(i, j, v);
          return 0;
        });
      }
    if (const auto* bs = m_.section("dissection.bracket"))
      for (const auto& e : bs->entries) {
        std::size_t a = name_index(e, names, 0), b = name_index(e, names, 1);
        auto v = combination(e, e.value, 0, names);
        at_entry(e, 0, [&] {
          dd.set_fiber_bracket(a, b, v);
          return 0;
        });
      }
    return dd;
  }

  std::vector<Section> section_list(const ManifestEntry& e, const CourantBundle& b) const {
    std::vector<Section> out;
    for (const auto& [off, piece] : split_offsets(e.value, ';')) out.push_back(at_entry(e, off, [&] { return b.parse_section(piece); }));
    return out;
  }

  void data_blocks(Model& out) const {
    CourantBundle b = out.algebroid ? out.algebroid->bundle() : bundle_for_data(out);
    if (const auto* s = m_.section("lift")) {
      std::vector<std::optional<Section>> l(b.dim());
      for (const auto& e : s->entries) l[name_index(e, chart_->vars(), 0)] = at_entry(e, 0, [&] { return b.parse_section(e.value); });
      std::vector<Section> lift;
      for (std::size_t m = 0; m < b.dim(); ++m) {
        if (!l[m]) throw manifest_error(s->line, 1, "an entry for " + chart_->var(m), "[lift] misses coordinate " + chart_->var(m));
        lift.push_back(*l[m]);
      }
      out.lift = lift;
    } else if (out.builder == "standard" || out.builder == "twisted_exact" || out.builder == "dissection") {
      std::vector<Section> lift;
      for (std::size_t m = 0; m < b.dim(); ++m) lift.push_back(b.frame(m));
      out.lift = lift;
    }
    if (const auto* s = m_.section("complement")) out.complement = section_list(require_key(*s, "sections"), b);
    if (const auto* s = m_.section("omega")) {
      auto t = sparse_table(*s, b, true);
      Deformation w(b.rank(), t);
      if (const auto* tw = s->find("twist")) w = w + twist_deformation(b, form(*tw, 3));
      out.omega = w;
    }
    if (const auto* s = m_.section("bfield")) {
      const auto& e = require_key(*s, "beta");
      for (const auto& [off, piece] : split_offsets(e.value, ';'))
        out.betas.push_back(at_entry(e, off, [&] { return parse_form(piece, *chart_, 2); }));
    }
    if (const auto* s = m_.section("vanishing")) out.vanishing = form(require_key(*s, "h"), 3);
  }

  CourantBundle bundle_for_data(const Model& out) const {
    if (out.dissection) return out.dissection->bundle();
    if (out.builder == "twisted_action") {
      auto alg = algebra_block();
      return CourantBundle(*chart_, alg.pairing(), poly_matrix(require_key(*m_.section("action"), "rho"), alg.dim(), chart_->dim(), "[action] rho"),
                           alg.names());
    }
    return bundle_block();
  }
};

}  // namespace detail

inline Model build_model(const Manifest& m, std::string name = "manifest") { return detail::ModelBuilder(m).build(std::move(name)); }

inline Model load_model(std::string_view text, std::string name = "manifest") { return build_model(parse_manifest(text), std::move(name)); }

}  // namespace precourant
