#include "socialoam/time.hpp"

#include <cctype>
#include <charconv>

#include <fmt/chrono.h>
#include <fmt/format.h>

#include "socialoam/errors.hpp"

namespace socialoam {
namespace {

class Cursor {
 public:
  explicit Cursor(std::string_view s) : s_(s) {}

  int digits(std::size_t n) {
    if (pos_ + n > s_.size()) fail();
    int value = 0;
    const auto* first = s_.data() + pos_;
    auto [ptr, ec] = std::from_chars(first, first + n, value);
    if (ec != std::errc{} || ptr != first + n) fail();
    pos_ += n;
    return value;
  }

  bool eat(char c) {
    if (pos_ < s_.size() && s_[pos_] == c) {
      ++pos_;
      return true;
    }
    return false;
  }

  void expect(char c) {
    if (!eat(c)) fail();
  }

  [[nodiscard]] bool done() const { return pos_ == s_.size(); }
  [[nodiscard]] char peek() const { return pos_ < s_.size() ? s_[pos_] : '\0'; }
  [[nodiscard]] std::string_view rest() const { return s_.substr(pos_); }
  void skip() { ++pos_; }

  [[noreturn]] void fail() const { throw UnparseableTimestamp("unparseable timestamp '" + std::string(s_) + "'"); }

 private:
  std::string_view s_;
  std::size_t pos_ = 0;
};

std::string_view trim(std::string_view s) {
  while (!s.empty() && std::isspace(static_cast<unsigned char>(s.front()))) s.remove_prefix(1);
  while (!s.empty() && std::isspace(static_cast<unsigned char>(s.back()))) s.remove_suffix(1);
  return s;
}

}  // namespace

std::chrono::minutes parse_utc_offset(std::string_view text) {
  text = trim(text);
  if (text == "Z" || text == "z" || text == "UTC" || text == "utc" || text.empty()) return {};
  Cursor c(text);
  int sign = 0;
  if (c.eat('+')) {
    sign = 1;
  } else if (c.eat('-')) {
    sign = -1;
  } else {
    c.fail();
  }
  const int hh = c.digits(2);
  c.eat(':');
  const int mm = c.digits(2);
  if (!c.done() || hh > 23 || mm > 59) c.fail();
  return std::chrono::minutes(sign * (hh * 60 + mm));
}

Timestamp parse_rfc3339(std::string_view text, std::chrono::minutes default_offset) {
  using namespace std::chrono;
  text = trim(text);
  Cursor c(text);
  const int y = c.digits(4);
  c.expect('-');
  const int mo = c.digits(2);
  c.expect('-');
  const int d = c.digits(2);
  const year_month_day ymd{year{y}, month{static_cast<unsigned>(mo)}, day{static_cast<unsigned>(d)}};
  if (!ymd.ok()) c.fail();

  int hh = 0;
  int mi = 0;
  int ss = 0;
  if (!c.done()) {
    if (!c.eat('T') && !c.eat('t') && !c.eat(' ')) c.fail();
    hh = c.digits(2);
    c.expect(':');
    mi = c.digits(2);
    if (c.eat(':')) {
      ss = c.digits(2);
      if (c.eat('.')) {
        if (!std::isdigit(static_cast<unsigned char>(c.peek()))) c.fail();
        while (std::isdigit(static_cast<unsigned char>(c.peek()))) c.skip();
      }
    }
  }
  if (hh > 23 || mi > 59 || ss > 60) c.fail();

  minutes offset = default_offset;
  if (!c.done()) offset = parse_utc_offset(c.rest());

  const auto local = sys_days{ymd} + hours{hh} + minutes{mi} + seconds{ss};
  return time_point_cast<seconds>(local - offset);
}

std::string format_rfc3339(Timestamp t) { return fmt::format("{:%Y-%m-%dT%H:%M:%SZ}", t); }

}  // namespace socialoam
