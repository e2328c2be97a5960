#include "ltlab/core.hpp"

#include <cctype>
#include <charconv>
#include <cstdio>

namespace ltlab {

namespace {

double parse_real(std::string_view s, std::string_view whole) {
  if (s.empty() || s == "+") return 1.0;
  if (s == "-") return -1.0;
  if (s.front() == '+') s.remove_prefix(1);
  double value = 0.0;
  const auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), value);
  if (ec != std::errc{} || ptr != s.data() + s.size()) {
    throw InputError("malformed complex number '" + std::string(whole) + "'");
  }
  return value;
}

}  // namespace

Complex parse_complex_token(std::string_view token) {
  while (!token.empty() && std::isspace(static_cast<unsigned char>(token.front()))) token.remove_prefix(1);
  while (!token.empty() && std::isspace(static_cast<unsigned char>(token.back()))) token.remove_suffix(1);
  if (token.empty()) throw InputError("empty complex number");

  if (token.back() != 'i' && token.back() != 'j') {
    return {parse_real(token, token), 0.0};
  }
  const std::string_view body = token.substr(0, token.size() - 1);
  // The split point is the last sign that is not the exponent sign of a float
  // and not the leading sign.
  std::size_t split = std::string_view::npos;
  for (std::size_t k = body.size(); k-- > 1;) {
    if ((body[k] == '+' || body[k] == '-') && body[k - 1] != 'e' && body[k - 1] != 'E') {
      split = k;
      break;
    }
  }
  if (split == std::string_view::npos) {
    return {0.0, parse_real(body, token)};
  }
  const std::string_view re_part = body.substr(0, split);
  if (re_part.empty()) throw InputError("malformed complex number '" + std::string(token) + "'");
  return {parse_real(re_part, token), parse_real(body.substr(split), token)};
}

std::string format_double(double x) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.17g", x);
  return buf;
}

std::string format_complex_token(Complex z) {
  std::string out = format_double(z.real());
  if (!std::signbit(z.imag())) out += '+';
  out += format_double(z.imag());
  out += 'i';
  return out;
}

}  // namespace ltlab
