#ifndef TWOSTEP_SEXPR_H_
#define TWOSTEP_SEXPR_H_

#include <cstddef>
#include <string>
#include <string_view>
#include <vector>

namespace twostep {

// A Lisp-style s-expression node. Atoms are lower-cased on read.
struct SExpr {
  bool is_list = false;
  std::string atom;
  std::vector<SExpr> items;
  std::size_t line = 1;
  std::size_t column = 1;

  bool IsAtom() const { return !is_list; }
  bool IsAtom(std::string_view text) const { return !is_list && atom == text; }
  bool IsList() const { return is_list; }
  // True for a list whose first element is the atom `head`.
  bool HeadIs(std::string_view head) const;
  std::string ToString() const;
};

struct ReadOptions {
  // Closes lists still open at end of input instead of failing. Used for
  // model completions, which occasionally drop trailing parentheses.
  bool close_unbalanced = false;
};

// Reads every top-level expression in `text`. `;` starts a line comment.
std::vector<SExpr> ReadAll(std::string_view text, const ReadOptions& options = {});

// Reads exactly one top-level expression.
SExpr ReadOne(std::string_view text, const ReadOptions& options = {});

}  // namespace twostep

#endif  // TWOSTEP_SEXPR_H_
