#pragma once

// Task orchestration over a built model, gating on failed preconditions, and
// deterministic report serialization.

#include "manifest.hpp"

#include <chrono>
#include <nlohmann/json.hpp>

namespace precourant {

inline constexpr const char* kVersion = "0.1.0";

/// Unknown task or a task whose data block is missing.
class usage_error : public std::runtime_error {
public:
  using std::runtime_error::runtime_error;
};

struct RunOptions {
  std::vector<std::string> tasks;  // empty: the manifest's list
  std::optional<std::uint64_t> seed;
  std::optional<std::size_t> trials;
  std::optional<unsigned> max_degree;
  bool timing = false;
};

struct TaskResult {
  std::string task;
  Report report;
  std::optional<double> seconds;
};

struct RunResult {
  std::string manifest;
  std::string builder;
  SampleConfig cfg;
  std::vector<TaskResult> tasks;

  bool passed() const {
    return std::all_of(tasks.begin(), tasks.end(), [](const TaskResult& t) { return t.report.status() == Status::pass; });
  }
};

namespace detail {

inline const std::vector<std::string>& default_tasks() {
  static const std::vector<std::string> t = {"validate-bundle", "verify-axioms", "verify-identities", "jacobiator-theorem"};
  return t;
}

/// Tasks whose failure skips everything after them.
inline bool gating(const std::string& task) {
  return task == "validate-construction" || task == "validate-bundle" || task == "verify-axioms";
}

inline std::vector<std::string> plan(const Model& m, const RunOptions& o) {
  std::vector<std::string> req = !o.tasks.empty() ? o.tasks : !m.tasks.empty() ? m.tasks : default_tasks();
  const auto& order = canonical_tasks();
  for (const auto& t : req)
    if (std::find(order.begin(), order.end(), t) == order.end()) throw usage_error("unknown task '" + t + "'");
  std::vector<std::string> out;
  for (const auto& t : order)
    if (std::find(req.begin(), req.end(), t) != req.end()) out.push_back(t);
  for (const auto& t : out) {
    auto need = [&](bool ok, const std::string& block) {
      if (!ok) throw usage_error("task '" + t + "' needs a " + block + " block");
    };
    if (t == "deform") need(m.omega.has_value(), "[omega]");
    if (t == "bfield") need(!m.betas.empty(), "[bfield]");
    if (t == "pontryagin") need(m.lift.has_value(), "[lift]");
    if (t == "pontryagin-vanishing") need(m.vanishing.has_value(), "[vanishing]");
    if (t == "quotient-jacobi") need(m.complement.has_value() || m.lift.has_value(), "[complement] or [lift]");
    if (t == "dissection") need(m.dissection.has_value(), "[dissection]");
  }
  return out;
}

inline std::vector<Cochain> cochain_samples(const CourantBundle& b, const std::vector<Section>& kernel, const SampleConfig& cfg,
                                            std::uint64_t salt, std::vector<std::size_t> degrees) {
  Sampler s(cfg.seed ^ salt);
  std::vector<Cochain> out;
  for (auto d : degrees) out.push_back(random_member(b, s, d, kernel, cfg.max_degree));
  return out;
}

inline Report run_task(const std::string& task, const Model& m, const SampleConfig& cfg) {
  if (task == "validate-construction") {
    if (m.construction) {
      Report r = *m.construction;
      r.name = task;
      return r;
    }
    Report r(task);
    r.note("builder '" + m.builder + "' has no construction preconditions");
    return r;
  }
  const auto& p = *m.algebroid;
  const auto& b = p.bundle();
  const std::vector<Section>* lift = m.lift ? &*m.lift : nullptr;
  auto kernel = [&] { return kernel_generators(b, lift); };

  if (task == "validate-bundle") {
    Report r = validate_bundle(b);
    r.name = task;
    r.merge(kernel_coisotropy_check(b, m.points));
    return r;
  }
  if (task == "verify-axioms") return verify_axioms(p, cfg);
  if (task == "verify-identities") return verify_derived_identities(p, cfg);
  if (task == "jacobiator-theorem") {
    Report r = verify_jacobiator_theorem(p, cfg);
    Sampler s(cfg.seed ^ 0x6a09e667f3bcc908ULL);
    std::size_t zero = 0;
    for (std::size_t t = 0; t < cfg.trials; ++t) {
      Section x = s.section(b, cfg.max_degree), y = s.section(b, cfg.max_degree), z = s.section(b, cfg.max_degree);
      if (p.jacobiator(x, y, z).is_zero()) ++zero;
    }
    r.note("J vanishes on " + std::to_string(zero) + " of " + std::to_string(cfg.trials) + " seeded section triples");
    return r;
  }
  if (task == "comm-lemma") return verify_comm_lemma(p, cochain_samples(b, kernel(), cfg, 0xbb67ae8584caa73bULL, {2, 2, 2, 2, 2, 2, 2, 2}));
  if (task == "leibniz2") return verify_leibniz2(build_leibniz2(p, kernel()), cfg);
  if (task == "lie2") {
    Report r = verify_lie2(build_lie2(p, kernel()), cfg);
    r.merge(verify_lie2_components(p, cfg), "components-");
    return r;
  }
  if (task == "deform") return verify_deformation_identity(p, *m.omega, cfg, lift);
  if (task == "bfield") {
    if (m.betas.size() == 1) return bfield_verify(p, m.betas[0], cfg);
    Report r(task);
    for (std::size_t k = 0; k < m.betas.size(); ++k) r.merge(bfield_verify(p, m.betas[k], cfg), "beta" + std::to_string(k + 1) + "-");
    return r;
  }
  if (task == "pontryagin") {
    auto res = pontryagin_representative(p, *m.lift);
    if (res.H && m.vanishing) res.report.note(std::string("H equals dh: ") + (*res.H == ext_d(*m.vanishing) ? "yes" : "no"));
    return res.report;
  }
  if (task == "pontryagin-vanishing") return pontryagin_vanishing_check(p, *m.vanishing);
  if (task == "naive-cohomology")
    return naive_cohomology_check(p, cochain_samples(b, kernel(), cfg, 0x3c6ef372fe94f82bULL, {1, 2, 1, 2, 1, 2, 1, 2}), lift);
  if (task == "quotient-jacobi") return quotient_jacobi_check(p, m.complement ? *m.complement : *m.lift, lift, cfg);
  if (task == "dissection") {
    Report r = dissection_jacobiator_check(*m.dissection);
    auto pd = dissection_pontryagin(*m.dissection);
    r.merge(pd.report, "pontryagin-");
    return r;
  }
  throw usage_error("unknown task '" + task + "'");
}

}  // namespace detail

/// Runs the requested tasks in canonical order. After a failed gating task,
/// or when the builder's preconditions failed, later tasks are reported as
/// skipped-precondition.
inline RunResult run(const Model& m, const RunOptions& o = {}) {
  RunResult res;
  res.manifest = m.name;
  res.builder = m.builder;
  res.cfg = m.cfg;
  if (o.seed) res.cfg.seed = *o.seed;
  if (o.trials) res.cfg.trials = *o.trials;
  if (o.max_degree) res.cfg.max_degree = *o.max_degree;
  std::optional<std::string> blocked = m.algebroid ? std::nullopt : std::optional<std::string>("construction preconditions failed");
  for (const auto& t : detail::plan(m, o)) {
    TaskResult tr{t, Report(t), std::nullopt};
    if (blocked && t != "validate-construction") {
      tr.report.skipped = true;
      tr.report.note("skipped: " + *blocked);
    } else {
      auto start = std::chrono::steady_clock::now();
      try {
        tr.report = detail::run_task(t, m, res.cfg);
      } catch (const usage_error&) {
        throw;
      } catch (const std::exception& e) {
        tr.report = Report(t);
        tr.report.check("completed").fail(Witness{t, e.what(), "no error"});
      }
      tr.report.name = t;
      if (o.timing) tr.seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
      if (detail::gating(t) && tr.report.status() == Status::fail && !blocked) blocked = t + " failed";
    }
    res.tasks.push_back(std::move(tr));
  }
  return res;
}

inline nlohmann::json to_json(const Report& r) {
  nlohmann::json checks = nlohmann::json::array();
  for (const auto& c : r.checks) {
    nlohmann::json j = {{"name", c.name}, {"status", c.passed ? "pass" : "fail"}, {"cases", c.cases}};
    if (c.witness) j["witness"] = {{"input", c.witness->where}, {"lhs", c.witness->lhs}, {"rhs", c.witness->rhs}};
    checks.push_back(std::move(j));
  }
  return {{"status", to_string(r.status())}, {"checks", checks}, {"notes", r.notes}};
}

/// Single document; object keys are sorted, so output is canonical.
inline nlohmann::json to_json(const RunResult& res) {
  nlohmann::json tasks = nlohmann::json::array();
  for (const auto& t : res.tasks) {
    nlohmann::json j = to_json(t.report);
    j["task"] = t.task;
    if (t.seconds) j["seconds"] = *t.seconds;
    tasks.push_back(std::move(j));
  }
  return {{"tool", "precourant"},
          {"version", kVersion},
          {"manifest", res.manifest},
          {"builder", res.builder},
          {"seed", res.cfg.seed},
          {"trials", res.cfg.trials},
          {"max_degree", res.cfg.max_degree},
          {"status", res.passed() ? "pass" : "fail"},
          {"tasks", tasks}};
}

inline std::string to_text(const RunResult& res) {
  std::ostringstream os;
  os << "precourant " << kVersion << "  manifest " << res.manifest << "  builder " << res.builder << "  seed " << res.cfg.seed << "  trials "
     << res.cfg.trials << "  max_degree " << res.cfg.max_degree << "\n";
  for (const auto& t : res.tasks) {
    os << t.task << ": " << to_string(t.report.status());
    if (t.seconds) os << " (" << *t.seconds << " s)";
    os << "\n";
    for (const auto& c : t.report.checks) {
      if (c.passed) continue;
      os << "  " << c.name << ": fail at " << c.witness->where << "\n    lhs: " << c.witness->lhs << "\n    rhs: " << c.witness->rhs << "\n";
    }
    for (const auto& n : t.report.notes) os << "  note: " << n << "\n";
  }
  os << "overall: " << (res.passed() ? "pass" : "fail") << "\n";
  return os.str();
}

}  // namespace precourant
