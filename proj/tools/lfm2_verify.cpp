// Standalone certificate checker. Links only the LF kernel, unification, the
// surface syntax and the proof checker.
#include <fstream>
#include <iostream>
#include <sstream>

#include "lfm2/m2io.h"

using namespace lfm2;

namespace {

bool slurp(const std::string& path, std::string& out) {
  std::ifstream in(path, std::ios::binary);
  if (!in) return false;
  std::stringstream ss;
  ss << in.rdbuf();
  out = ss.str();
  return true;
}

}  // namespace

int main(int argc, char** argv) {
  if (argc != 3) {
    std::cerr << "usage: lfm2-verify FILE CERT\n";
    return 2;
  }
  std::string sig_text, cert_text;
  if (!slurp(argv[1], sig_text) || !slurp(argv[2], cert_text)) {
    std::cerr << "error: cannot read input files\n";
    return 2;
  }
  try {
    SourceFile src = parse_source(sig_text);
    verify_certificate(src, read_certificate(cert_text, src.sig));
  } catch (const SyntaxError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return e.kind == "IllTyped" ? 1 : 2;
  } catch (const M2Error& e) {
    std::cerr << "error: " << e.what() << "\n";
    return e.kind == "MalformedCertificate" || e.kind == "VersionMismatch" ? 2 : 1;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
  std::cout << "certificate accepted\n";
  return 0;
}
