#include "twostep/sexpr.h"

#include <cctype>

#include "twostep/errors.h"

namespace twostep {

bool SExpr::HeadIs(std::string_view head) const {
  return is_list && !items.empty() && items.front().IsAtom(head);
}

std::string SExpr::ToString() const {
  if (!is_list) return atom;
  std::string out = "(";
  for (std::size_t i = 0; i < items.size(); ++i) {
    if (i > 0) out += ' ';
    out += items[i].ToString();
  }
  out += ')';
  return out;
}

namespace {

class Reader {
 public:
  Reader(std::string_view text, const ReadOptions& options)
      : text_(text), options_(options) {}

  std::vector<SExpr> ReadAll() {
    std::vector<SExpr> out;
    SkipSpace();
    while (pos_ < text_.size()) {
      out.push_back(ReadExpr());
      SkipSpace();
    }
    return out;
  }

 private:
  SExpr ReadExpr() {
    SkipSpace();
    if (pos_ >= text_.size()) {
      throw SyntaxError("unexpected end of input, expected expression", line_,
                        column_);
    }
    const char c = text_[pos_];
    if (c == ')') {
      throw SyntaxError("unexpected ')'", line_, column_);
    }
    SExpr node;
    node.line = line_;
    node.column = column_;
    if (c == '(') {
      node.is_list = true;
      Advance();
      while (true) {
        SkipSpace();
        if (pos_ >= text_.size()) {
          if (options_.close_unbalanced) return node;
          throw SyntaxError("unexpected end of input, expected ')'", line_,
                            column_);
        }
        if (text_[pos_] == ')') {
          Advance();
          return node;
        }
        node.items.push_back(ReadExpr());
      }
    }
    while (pos_ < text_.size()) {
      const char d = text_[pos_];
      if (std::isspace(static_cast<unsigned char>(d)) || d == '(' || d == ')' ||
          d == ';') {
        break;
      }
      node.atom += static_cast<char>(std::tolower(static_cast<unsigned char>(d)));
      Advance();
    }
    return node;
  }

  void SkipSpace() {
    while (pos_ < text_.size()) {
      const char c = text_[pos_];
      if (c == ';') {
        while (pos_ < text_.size() && text_[pos_] != '\n') Advance();
      } else if (std::isspace(static_cast<unsigned char>(c))) {
        Advance();
      } else {
        break;
      }
    }
  }

  void Advance() {
    if (text_[pos_] == '\n') {
      ++line_;
      column_ = 1;
    } else {
      ++column_;
    }
    ++pos_;
  }

  std::string_view text_;
  ReadOptions options_;
  std::size_t pos_ = 0;
  std::size_t line_ = 1;
  std::size_t column_ = 1;
};

}  // namespace

std::vector<SExpr> ReadAll(std::string_view text, const ReadOptions& options) {
  return Reader(text, options).ReadAll();
}

SExpr ReadOne(std::string_view text, const ReadOptions& options) {
  auto all = ReadAll(text, options);
  if (all.empty()) throw SyntaxError("empty input, expected '('", 1, 1);
  if (all.size() > 1) {
    throw SyntaxError("trailing content after expression", all[1].line,
                      all[1].column);
  }
  return std::move(all.front());
}

}  // namespace twostep
