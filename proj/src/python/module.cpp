#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include "lfm2/driver.h"
#include "lfm2/lp.h"
#include "lfm2/m2io.h"
#include "lfm2/proofgen.h"

namespace py = pybind11;
using namespace lfm2;

namespace {

PyObject* error_type = nullptr;

// Raises lfm2.Error with `kind` and `category` attributes.
[[noreturn]] void raise(const std::string& category, const std::string& kind, const char* what) {
  py::object type = py::reinterpret_borrow<py::object>(error_type);
  py::object err = type(what);
  err.attr("kind") = kind;
  err.attr("category") = category;
  PyErr_SetObject(error_type, err.ptr());
  throw py::error_already_set();
}

void translate(std::exception_ptr p) {
  try {
    if (p) std::rethrow_exception(p);
  } catch (const SyntaxError& e) {
    raise("syntax", e.kind, e.what());
  } catch (const TotalityError& e) {
    raise("totality", e.kind, e.what());
  } catch (const M2Error& e) {
    raise("m2", e.kind, e.what());
  } catch (const LpError& e) {
    raise("lp", e.kind, e.what());
  } catch (const ProofGenError& e) {
    raise("proofgen", e.kind, e.what());
  } catch (const LfError& e) {
    raise("lf", e.rule, e.what());
  } catch (const IoError& e) {
    raise("io", "IoError", e.what());
  }
}

py::list check(const std::string& text) {
  SourceFile src = parse_source(text);
  NameSupply supply = seeded_supply(src.sig);
  CheckReport rep = check_source(src, supply);
  py::list out;
  for (auto& f : rep.families) {
    py::dict d;
    d["family"] = f.family;
    d["total"] = f.total;
    d["ok"] = f.ok();
    d["error_kind"] = f.error_kind;
    d["message"] = f.message;
    out.append(d);
  }
  return out;
}

}  // namespace

PYBIND11_MODULE(_lfm2, m) {
  m.doc() = "LF signatures: mode, termination and coverage checking with proof certificates";
  error_type = PyErr_NewException("lfm2.Error", PyExc_Exception, nullptr);
  m.attr("Error") = py::handle(error_type);
  py::register_exception_translator(translate);

  m.def("check", &check, py::arg("text"),
        "Type-check a signature and run the checks for every %mode and %total; one dict per declaration.");
  m.def(
      "solve",
      [](const std::string& text, const std::string& goal, unsigned long depth) {
        SolveOutcome out = solve_text(parse_source(text), goal, depth);
        return py::make_tuple(out.found, out.text);
      },
      py::arg("text"), py::arg("goal"), py::arg("depth") = 10000,
      "First solution of a goal as (found, rendered text).");
  m.def("prove", [](const std::string& text) { return prove_source(parse_source(text)); }, py::arg("text"),
        "Certificate text for every %total.");
  m.def(
      "verify",
      [](const std::string& text, const std::string& cert) {
        SourceFile src = parse_source(text);
        verify_certificate(src, read_certificate(cert, src.sig));
      },
      py::arg("text"), py::arg("certificate"), "Check a certificate; raises lfm2.Error when it is rejected.");
  m.def("trace", [](const std::string& text) { return trace_source(parse_source(text)); }, py::arg("text"),
        "Coverage traces for every %total.");
  m.def("print_signature", [](const std::string& text) { return print_signature(parse_source(text).sig); },
        py::arg("text"), "The elaborated signature with implicit arguments made explicit.");
}
