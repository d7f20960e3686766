#include <cctype>

#include "evd/filter.hpp"

namespace evd {

namespace {

bool is_digit(char c) { return c >= '0' && c <= '9'; }
bool is_ident_start(char c) { return (c >= 'a' && c <= 'z') || (c >= 'A' && c <= 'Z') || c == '_'; }
bool is_ident_char(char c) { return is_ident_start(c) || is_digit(c); }

std::size_t skip_digits(std::string_view s, std::size_t i) {
  while (i < s.size() && is_digit(s[i])) ++i;
  return i;
}

// Length of the longest decimal number starting at `start`, 0 if none.
std::size_t number_length(std::string_view s, std::size_t start) {
  std::size_t i = skip_digits(s, start);
  const bool int_digits = i > start;
  if (i < s.size() && s[i] == '.') {
    const std::size_t frac_end = skip_digits(s, i + 1);
    if (!int_digits && frac_end == i + 1) return 0;  // lone '.'
    i = frac_end;
  } else if (!int_digits) {
    return 0;
  }
  if (i < s.size() && (s[i] == 'e' || s[i] == 'E')) {
    std::size_t j = i + 1;
    if (j < s.size() && (s[j] == '+' || s[j] == '-')) ++j;
    const std::size_t exp_end = skip_digits(s, j);
    if (exp_end > j) i = exp_end;
  }
  return i - start;
}

}  // namespace

std::vector<Token> tokenize(std::string_view src) {
  static constexpr std::string_view two_char_ops[] = {"||", "&&", "==", "!=", "<=", ">="};
  static constexpr std::string_view one_char_ops = "<>+-*/!";

  std::vector<Token> out;
  std::size_t i = 0;
  while (i < src.size()) {
    const char c = src[i];
    if (std::isspace(static_cast<unsigned char>(c))) {
      ++i;
      continue;
    }
    if (const std::size_t len = number_length(src, i); len > 0) {
      out.push_back({TokenKind::number, std::string(src.substr(i, len)), i});
      i += len;
      continue;
    }
    if (is_ident_start(c)) {
      std::size_t j = i + 1;
      while (j < src.size() && is_ident_char(src[j])) ++j;
      out.push_back({TokenKind::ident, std::string(src.substr(i, j - i)), i});
      i = j;
      continue;
    }
    bool matched = false;
    for (std::string_view op : two_char_ops) {
      if (src.substr(i, 2) == op) {
        out.push_back({TokenKind::op, std::string(op), i});
        i += 2;
        matched = true;
        break;
      }
    }
    if (matched) continue;
    if (one_char_ops.find(c) != std::string_view::npos) {
      out.push_back({TokenKind::op, std::string(1, c), i});
      ++i;
      continue;
    }
    switch (c) {
      case '(': out.push_back({TokenKind::lparen, "(", i}); break;
      case ')': out.push_back({TokenKind::rparen, ")", i}); break;
      case ',': out.push_back({TokenKind::comma, ",", i}); break;
      default: throw DslError(i, std::string("illegal character '") + c + "'");
    }
    ++i;
  }
  out.push_back({TokenKind::end, "", src.size()});
  return out;
}

}  // namespace evd
