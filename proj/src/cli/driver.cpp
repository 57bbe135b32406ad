#include "lfm2/driver.h"

#include <fstream>
#include <sstream>

#include "lfm2/lp.h"
#include "lfm2/m2io.h"
#include "lfm2/proofgen.h"

namespace lfm2 {

namespace {

std::string error_kind(const std::exception& e) {
  if (auto* t = dynamic_cast<const TotalityError*>(&e)) return t->kind;
  if (auto* s = dynamic_cast<const SyntaxError*>(&e)) return s->kind;
  if (auto* l = dynamic_cast<const LpError*>(&e)) return l->kind;
  if (auto* p = dynamic_cast<const ProofGenError*>(&e)) return p->kind;
  if (auto* m = dynamic_cast<const M2Error*>(&e)) return m->kind;
  return "Error";
}

// The message without its leading "Kind: ".
std::string error_message(const std::exception& e, const std::string& kind) {
  std::string w = e.what();
  if (w.rfind(kind + ": ", 0) == 0) return w.substr(kind.size() + 2);
  return w;
}

const ModeSpec* mode_for(const SourceFile& src, const std::string& family) {
  const ModeSpec* found = nullptr;
  for (auto& m : src.modes)
    if (m.family == family) found = &m;
  return found;
}

TotalityResult check_total(const SourceFile& src, const TotalSpec& t, NameSupply& supply) {
  const ModeSpec* ms = mode_for(src, t.family);
  if (!ms) throw TotalityError("MissingMode", "no %mode declaration for " + t.family);
  ModedFamily mf = elaborate_mode(t.family, src.sig, ms->params);
  TerminationOrder order = resolve_order(t, mf);
  return check_totality(mf, order, src.sig, supply);
}

bool has_total(const SourceFile& src, const std::string& family) {
  for (auto& t : src.totals)
    if (t.family == family) return true;
  return false;
}

}  // namespace

std::string read_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot read " + path);
  std::stringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

void write_file(const std::string& path, const std::string& text) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw IoError("cannot write " + path);
  out << text;
}

bool CheckReport::ok() const {
  for (auto& f : families)
    if (!f.ok()) return false;
  return true;
}

std::string CheckReport::render() const {
  std::string out;
  size_t failed = 0;
  for (auto& f : families) {
    out += (f.total ? "total " : "mode ") + f.family + ": ";
    if (f.ok()) {
      out += f.total ? "mode, termination, input coverage, output coverage ok\n" : "mode ok\n";
    } else {
      ++failed;
      out += f.error_kind + ": " + f.message + "\n";
    }
  }
  if (failed == 0)
    out += "all checks passed\n";
  else
    out += std::to_string(failed) + " of " + std::to_string(families.size()) + " declarations failed\n";
  return out;
}

CheckReport check_source(const SourceFile& src, NameSupply& supply) {
  CheckReport rep;
  std::set<std::string> seen;
  for (auto& m : src.modes) {
    if (has_total(src, m.family) || !seen.insert(m.family).second) continue;
    FamilyCheck fc;
    fc.family = m.family;
    try {
      ModedFamily mf = elaborate_mode(m.family, src.sig, mode_for(src, m.family)->params);
      for (auto& cl : family_clauses(src.sig, mf)) check_mode_consistency(cl, mf);
    } catch (const std::exception& e) {
      fc.error_kind = error_kind(e);
      fc.message = error_message(e, fc.error_kind);
    }
    rep.families.push_back(std::move(fc));
  }
  for (auto& t : src.totals) {
    FamilyCheck fc;
    fc.family = t.family;
    fc.total = true;
    try {
      fc.result = check_total(src, t, supply);
    } catch (const std::exception& e) {
      fc.error_kind = error_kind(e);
      fc.message = error_message(e, fc.error_kind);
    }
    rep.families.push_back(std::move(fc));
  }
  return rep;
}

std::string prove_source(const SourceFile& src) {
  NameSupply supply = seeded_supply(src.sig);
  Certificate cert;
  for (auto& t : src.totals) {
    TotalityResult r = check_total(src, t, supply);
    cert.theorems.push_back({t.family, generate(r, src.sig, supply)});
  }
  return print_certificate(cert);
}

std::string trace_source(const SourceFile& src) {
  NameSupply supply = seeded_supply(src.sig);
  std::vector<TotalityResult> rs;
  for (auto& t : src.totals) rs.push_back(check_total(src, t, supply));
  std::vector<const TotalityResult*> ps;
  for (auto& r : rs) ps.push_back(&r);
  return print_traces(ps);
}

SolveOutcome solve_text(const SourceFile& src, const std::string& goal, unsigned long budget) {
  ElaboratedGoal g = elaborate_goal(goal, src.sig);
  Goal q{g.vars, g.target, budget};
  std::optional<Solution> s = solve_first(q, src.sig);
  SolveOutcome out;
  if (!s) {
    out.text = "no solution\n";
    return out;
  }
  out.found = true;
  out.text = (g.proof_name.empty() ? std::string("proof") : g.proof_name) + " = " + show(s->proof) + "\n";
  for (auto& e : g.vars.entries) {
    const TermP* v = s->answer.lookup(e.name);
    if (v) out.text += e.name + " = " + show(*v) + "\n";
  }
  if (!s->residual.empty()) out.text += "unconstrained " + print_context(s->residual) + "\n";
  return out;
}

}  // namespace lfm2
