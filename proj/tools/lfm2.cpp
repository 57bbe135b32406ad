#include <iostream>

#include "CLI11.hpp"
#include "lfm2/driver.h"
#include "lfm2/lp.h"
#include "lfm2/m2io.h"

using namespace lfm2;

namespace {

constexpr int kPass = 0;
constexpr int kFailed = 1;
constexpr int kUsage = 2;

int report(const std::exception& e) {
  std::cerr << "error: " << e.what() << "\n";
  if (auto* s = dynamic_cast<const SyntaxError*>(&e)) return s->kind == "IllTyped" ? kFailed : kUsage;
  if (auto* m = dynamic_cast<const M2Error*>(&e))
    return m->kind == "MalformedCertificate" || m->kind == "VersionMismatch" ? kUsage : kFailed;
  if (auto* t = dynamic_cast<const TotalityError*>(&e))
    return t->kind == "MalformedTrace" || t->kind == "VersionMismatch" ? kUsage : kFailed;
  if (dynamic_cast<const IoError*>(&e)) return kUsage;
  return kFailed;
}

SourceFile load(const std::string& path) { return parse_source(read_file(path)); }

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Mode, termination and coverage checking with M2 proof certificates for LF signatures"};
  app.require_subcommand(1);

  std::string file, goal, cert_out, cert_in;
  unsigned long depth = 10000;
  bool coverage = false;

  auto* check = app.add_subcommand("check", "Type-check a signature and run the totality checks");
  check->add_option("FILE", file, "signature file")->required();

  auto* solve = app.add_subcommand("solve", "Search for a proof of a goal");
  solve->add_option("FILE", file, "signature file")->required();
  solve->add_option("GOAL", goal, "goal, optionally `D : A`")->required();
  solve->add_option("--depth", depth, "backchaining budget")->capture_default_str();

  auto* prove = app.add_subcommand("prove", "Emit an m2proof/1 certificate for every %total");
  prove->add_option("FILE", file, "signature file")->required();
  prove->add_option("-o", cert_out, "certificate output file (default stdout)");

  auto* verify = app.add_subcommand("verify", "Check a certificate against a signature");
  verify->add_option("FILE", file, "signature file")->required();
  verify->add_option("CERT", cert_in, "certificate file")->required();

  auto* trace = app.add_subcommand("trace", "Dump the splitting traces");
  trace->add_option("FILE", file, "signature file")->required();
  trace->add_flag("--coverage", coverage, "coverage splitting traces")->required();
  trace->add_option("-o", cert_out, "trace output file (default stdout)");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    int code = app.exit(e);
    return code == 0 ? kPass : kUsage;
  }

  try {
    if (*check) {
      SourceFile src = load(file);
      NameSupply supply = seeded_supply(src.sig);
      CheckReport rep = check_source(src, supply);
      std::cout << rep.render();
      return rep.ok() ? kPass : kFailed;
    }
    if (*solve) {
      SolveOutcome out = solve_text(load(file), goal, depth);
      std::cout << out.text;
      return out.found ? kPass : kFailed;
    }
    if (*prove) {
      std::string text = prove_source(load(file));
      if (cert_out.empty())
        std::cout << text;
      else
        write_file(cert_out, text);
      return kPass;
    }
    if (*verify) {
      SourceFile src = load(file);
      verify_certificate(src, read_certificate(read_file(cert_in), src.sig));
      std::cout << "certificate accepted\n";
      return kPass;
    }
    if (*trace) {
      std::string text = trace_source(load(file));
      if (cert_out.empty())
        std::cout << text;
      else
        write_file(cert_out, text);
      return kPass;
    }
  } catch (const std::exception& e) {
    return report(e);
  }
  return kUsage;
}
