#include <functional>
#include <sstream>

#include "lfm2/term.h"

namespace lfm2 {

namespace {

bool uses_bound(const TermP& t, int depth) {
  switch (t->node) {
    case Node::Type:
      return false;
    case Node::Pi:
    case Node::Lam:
      return (t->dom && uses_bound(t->dom, depth)) || uses_bound(t->body, depth + 1);
    case Node::App:
      if (t->head.kind == HeadKind::Bound && t->head.index == depth) return true;
      if (t->head.kind == HeadKind::Redex && uses_bound(t->head.term, depth)) return true;
      for (auto& a : t->args)
        if (uses_bound(a, depth)) return true;
      return false;
  }
  return false;
}

std::string printable(const std::string& name) {
  if (is_temp_name(name)) return "_" + name.substr(1);
  return name;
}

struct Printer {
  std::vector<std::string> scope;
  std::ostringstream out;

  std::string pick(const TermP& binder) {
    std::string base = binder->hint.empty() ? "x" : binder->hint;
    if (is_temp_name(base)) base = "x";
    std::set<std::string> avoid(scope.begin(), scope.end());
    std::vector<std::string> fv;
    std::set<std::string> seen;
    collect_free_vars(binder->body, fv, seen);
    avoid.insert(fv.begin(), fv.end());
    collect_consts(binder->body, avoid);
    if (!avoid.count(base)) return base;
    for (int k = 1;; ++k) {
      std::string cand = base + std::to_string(k);
      if (!avoid.count(cand)) return cand;
    }
  }

  // prec 0: anything; 1: operand of an arrow; 2: application argument.
  void print(const TermP& t, int prec) {
    switch (t->node) {
      case Node::Type:
        out << "type";
        return;
      case Node::Pi: {
        if (prec > 0) out << "(";
        if (!uses_bound(t->body, 0)) {
          print(t->dom, 1);
          out << " -> ";
          scope.push_back("");
          print(t->body, 0);
          scope.pop_back();
        } else {
          std::string n = pick(t);
          out << "{" << n << ":";
          print(t->dom, 0);
          out << "} ";
          scope.push_back(n);
          print(t->body, 0);
          scope.pop_back();
        }
        if (prec > 0) out << ")";
        return;
      }
      case Node::Lam: {
        if (prec > 0) out << "(";
        std::string n = pick(t);
        out << "[" << n;
        if (t->dom) {
          out << ":";
          print(t->dom, 0);
        }
        out << "] ";
        scope.push_back(n);
        print(t->body, 0);
        scope.pop_back();
        if (prec > 0) out << ")";
        return;
      }
      case Node::App: {
        bool parens = prec >= 2 && !t->args.empty();
        if (parens) out << "(";
        switch (t->head.kind) {
          case HeadKind::Const:
          case HeadKind::Free:
            out << printable(t->head.name);
            break;
          case HeadKind::Bound: {
            int i = t->head.index;
            if (i < static_cast<int>(scope.size()))
              out << scope[scope.size() - 1 - static_cast<size_t>(i)];
            else
              out << "!" << i;
            break;
          }
          case HeadKind::Redex:
            print(t->head.term, 2);
            break;
        }
        for (auto& a : t->args) {
          out << " ";
          print(a, 2);
        }
        if (parens) out << ")";
        return;
      }
    }
  }
};

}  // namespace

std::string show(const TermP& t) {
  if (!t) return "<null>";
  Printer p;
  p.print(t, 0);
  return p.out.str();
}

}  // namespace lfm2
