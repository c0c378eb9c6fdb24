// text.hpp -- the .bpa textual format: line-based parser with positioned
// errors, and the canonical printer (declarations sorted, rules in input
// order). parse(print(S)) == S on the canonical form.
#pragma once

#include <cctype>
#include <sstream>
#include <string>
#include <variant>
#include <vector>

#include "bpa/system.hpp"

namespace bpa {

struct ParseError {
  enum class Kind {
    SyntaxError,
    UndeclaredVariable,
    UndeclaredLabel,
    DuplicateDeclaration,
    // .hor specific
    NotPowerOfTwo,
    MissingOutgoingRule,
    UnknownState,
    // .qsat specific
    IndexOutOfRange,
    EmptyClauseList,
  };
  Kind kind = Kind::SyntaxError;
  int line = 0;  // 1-based; 0 = whole input
  int col = 0;   // 1-based; 0 = whole line
  std::string message;

  std::string str() const {
    std::ostringstream os;
    os << "line " << line << ":" << col << ": " << kindName(kind) << ": "
       << message;
    return os.str();
  }
  static const char* kindName(Kind k) {
    switch (k) {
      case Kind::SyntaxError: return "syntax error";
      case Kind::UndeclaredVariable: return "undeclared variable";
      case Kind::UndeclaredLabel: return "undeclared label";
      case Kind::DuplicateDeclaration: return "duplicate declaration";
      case Kind::NotPowerOfTwo: return "label not zero or a power of two";
      case Kind::MissingOutgoingRule: return "state has no outgoing rule";
      case Kind::UnknownState: return "unknown state";
      case Kind::IndexOutOfRange: return "literal index out of range";
      case Kind::EmptyClauseList: return "no clauses";
    }
    return "error";
  }
};

template <class T>
class Parsed {
 public:
  Parsed(T v) : value_(std::move(v)) {}        // NOLINT implicit
  Parsed(ParseError e) : value_(std::move(e)) {}  // NOLINT implicit

  bool ok() const { return std::holds_alternative<T>(value_); }
  const T& value() const { return std::get<T>(value_); }
  T take() { return std::move(std::get<T>(value_)); }
  const ParseError& error() const { return std::get<ParseError>(value_); }

 private:
  std::variant<T, ParseError> value_;
};

namespace detail {

struct Token {
  std::string text;
  int col;  // 1-based
};

inline std::vector<Token> tokenize(const std::string& line) {
  std::vector<Token> out;
  std::size_t i = 0;
  while (i < line.size()) {
    if (std::isspace(static_cast<unsigned char>(line[i]))) {
      ++i;
      continue;
    }
    if (line[i] == '#') break;  // comment to end of line
    std::size_t j = i;
    while (j < line.size() &&
           !std::isspace(static_cast<unsigned char>(line[j])) &&
           line[j] != '#')
      ++j;
    out.push_back(Token{line.substr(i, j - i), static_cast<int>(i + 1)});
    i = j;
  }
  return out;
}

inline bool isIdentifier(const std::string& s) {
  if (s.empty()) return false;
  for (char c : s)
    if (!std::isalnum(static_cast<unsigned char>(c)) && c != '_')
      return false;
  return true;
}

// Splits a rule arrow token "-label->" into its label, if well formed.
inline bool splitArrow(const std::string& tok, std::string* label) {
  if (tok.size() < 4) return false;
  if (tok.front() != '-' || tok.substr(tok.size() - 2) != "->") return false;
  *label = tok.substr(1, tok.size() - 3);
  return isIdentifier(*label);
}

}  // namespace detail

inline Parsed<BpaSystem> parse_system(const std::string& text) {
  using detail::Token;
  BpaSystem sys;
  bool sawTauDecl = false;
  std::istringstream in(text);
  std::string line;
  int lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    auto toks = detail::tokenize(line);
    if (toks.empty()) continue;
    const Token& head = toks[0];
    if (head.text == "vars:" || head.text == "acts:") {
      const bool isVars = head.text == "vars:";
      for (std::size_t i = 1; i < toks.size(); ++i) {
        const Token& t = toks[i];
        if (!detail::isIdentifier(t.text))
          return ParseError{ParseError::Kind::SyntaxError, lineno, t.col,
                            "bad identifier '" + t.text + "'"};
        if (isVars) {
          if (sys.findVar(t.text))
            return ParseError{ParseError::Kind::DuplicateDeclaration, lineno,
                              t.col, "variable '" + t.text + "'"};
          if (t.text == kTauName)
            return ParseError{ParseError::Kind::SyntaxError, lineno, t.col,
                              "'tau' is reserved for the silent action"};
          sys.addVar(t.text);
        } else {
          if (t.text == kTauName) {
            if (sawTauDecl)
              return ParseError{ParseError::Kind::DuplicateDeclaration,
                                lineno, t.col, "action 'tau'"};
            sawTauDecl = true;
            continue;  // implicitly present
          }
          if (sys.findAct(t.text))
            return ParseError{ParseError::Kind::DuplicateDeclaration, lineno,
                              t.col, "action '" + t.text + "'"};
          sys.addAct(t.text);
        }
      }
      continue;
    }
    // Rule line: HEAD -label-> [BODY...]
    if (toks.size() < 2)
      return ParseError{ParseError::Kind::SyntaxError, lineno, head.col,
                        "expected a rule 'X -l-> ...'"};
    auto hv = sys.findVar(head.text);
    if (!hv)
      return ParseError{ParseError::Kind::UndeclaredVariable, lineno,
                        head.col, "'" + head.text + "'"};
    std::string label;
    if (!detail::splitArrow(toks[1].text, &label))
      return ParseError{ParseError::Kind::SyntaxError, lineno, toks[1].col,
                        "expected '-label->', got '" + toks[1].text + "'"};
    auto act = sys.findAct(label);
    if (!act)
      return ParseError{ParseError::Kind::UndeclaredLabel, lineno, toks[1].col,
                        "'" + label + "'"};
    Process body;
    for (std::size_t i = 2; i < toks.size(); ++i) {
      auto bv = sys.findVar(toks[i].text);
      if (!bv)
        return ParseError{ParseError::Kind::UndeclaredVariable, lineno,
                          toks[i].col, "'" + toks[i].text + "'"};
      body.word.push_back(*bv);
    }
    sys.addRule(*hv, *act, std::move(body));
  }
  return sys;
}

// Nil is rendered as "eps" in reports; in rule bodies it is the empty
// right-hand side.
inline std::string print_process(const BpaSystem& sys, const Process& p) {
  if (p.empty()) return "eps";
  std::string out;
  for (std::size_t i = 0; i < p.word.size(); ++i) {
    if (i) out += ' ';
    out += sys.varName(p.word[i]);
  }
  return out;
}

inline std::string print_system(const BpaSystem& sys) {
  std::vector<std::string> vars, acts;
  for (VarId v = 0; v < static_cast<VarId>(sys.numVars()); ++v)
    vars.push_back(sys.varName(v));
  for (ActId a = 0; a < static_cast<ActId>(sys.numActs()); ++a)
    acts.push_back(sys.actName(a));
  std::sort(vars.begin(), vars.end());
  std::sort(acts.begin(), acts.end());
  std::ostringstream os;
  os << "vars:";
  for (const auto& v : vars) os << ' ' << v;
  os << "\nacts:";
  for (const auto& a : acts) os << ' ' << a;
  os << '\n';
  for (const Rule& r : sys.rules()) {
    os << sys.varName(r.head) << " -" << sys.actName(r.act) << "->";
    for (VarId v : r.body.word) os << ' ' << sys.varName(v);
    os << '\n';
  }
  return os.str();
}

// Parses a space-separated variable word; the empty string is nil.
inline Parsed<Process> parse_process(const BpaSystem& sys,
                                     const std::string& text) {
  Process p;
  for (const auto& tok : detail::tokenize(text)) {
    auto v = sys.findVar(tok.text);
    if (!v)
      return ParseError{ParseError::Kind::UndeclaredVariable, 1, tok.col,
                        "'" + tok.text + "'"};
    p.word.push_back(*v);
  }
  return p;
}

}  // namespace bpa
