#pragma once

// Verification reports: named checks with a case count and the first
// counterexample found.

#include <algorithm>
#include <deque>
#include <optional>
#include <string>
#include <vector>

namespace precourant {

/// Input description plus both sides of a failed equality, canonically printed.
struct Witness {
  std::string where;
  std::string lhs;
  std::string rhs;
  bool operator==(const Witness&) const = default;
};

struct Check {
  std::string name;
  bool passed = true;
  std::size_t cases = 0;
  std::optional<Witness> witness;

  /// Records one case; `make` builds the witness only for the first failure.
  template <class F>
  bool expect(bool ok, F&& make) {
    ++cases;
    if (!ok && passed) {
      passed = false;
      witness = make();
    }
    return ok;
  }

  void fail(Witness w) {
    ++cases;
    if (passed) {
      passed = false;
      witness = std::move(w);
    }
  }
};

enum class Status { pass, fail, skipped_precondition };

inline const char* to_string(Status s) {
  switch (s) {
    case Status::pass: return "pass";
    case Status::fail: return "fail";
    case Status::skipped_precondition: return "skipped-precondition";
  }
  return "?";
}

struct Report {
  std::string name;
  std::deque<Check> checks;  // stable references across check()
  std::vector<std::string> notes;
  bool skipped = false;

  explicit Report(std::string n = {}) : name(std::move(n)) {}

  Check& check(const std::string& check_name) {
    for (auto& c : checks)
      if (c.name == check_name) return c;
    checks.push_back(Check{check_name, true, 0, std::nullopt});
    return checks.back();
  }

  const Check* find(const std::string& check_name) const {
    for (const auto& c : checks)
      if (c.name == check_name) return &c;
    return nullptr;
  }

  bool passed() const {
    return !skipped && std::all_of(checks.begin(), checks.end(), [](const Check& c) { return c.passed; });
  }

  Status status() const {
    if (skipped) return Status::skipped_precondition;
    return passed() ? Status::pass : Status::fail;
  }

  void note(std::string s) { notes.push_back(std::move(s)); }

  /// Appends all checks of `other`, prefixing their names.
  void merge(const Report& other, const std::string& prefix = {}) {
    for (auto c : other.checks) {
      c.name = prefix + c.name;
      checks.push_back(std::move(c));
    }
    for (const auto& n : other.notes) notes.push_back(prefix + n);
    skipped = skipped || other.skipped;
  }

  /// First failing check, if any.
  const Check* first_failure() const {
    for (const auto& c : checks)
      if (!c.passed) return &c;
    return nullptr;
  }
};

}  // namespace precourant
