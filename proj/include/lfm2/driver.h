#pragma once

#include "lfm2/elab.h"
#include "lfm2/totality.h"

namespace lfm2 {

// Unreadable input files.
struct IoError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

std::string read_file(const std::string& path);
void write_file(const std::string& path, const std::string& text);

// Outcome of checking one %mode or %total declaration.
struct FamilyCheck {
  std::string family;
  bool total = false;      // from a %total (otherwise a %mode without one)
  std::string error_kind;  // empty when the checks passed
  std::string message;
  std::optional<TotalityResult> result;  // %total only, when it passed
  bool ok() const { return error_kind.empty(); }
};

struct CheckReport {
  std::vector<FamilyCheck> families;
  bool ok() const;
  std::string render() const;
};

// %mode declarations without a %total: mode elaboration and mode consistency.
// %total declarations: all totality checks.
CheckReport check_source(const SourceFile& src, NameSupply& supply);

// Totality-checks every %total, then prints one certificate holding a theorem
// per %total. Throws TotalityError on the first failing family.
std::string prove_source(const SourceFile& src);

// covtrace/1 text for every %total. Throws TotalityError.
std::string trace_source(const SourceFile& src);

// First solution of a goal, rendered as the proof object then the answer.
struct SolveOutcome {
  bool found = false;
  std::string text;
};
SolveOutcome solve_text(const SourceFile& src, const std::string& goal, unsigned long budget);

}  // namespace lfm2
