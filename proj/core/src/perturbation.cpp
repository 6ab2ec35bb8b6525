#include <cctype>
#include <cmath>
#include <sstream>

#include "imet/domains.hpp"

namespace imet {

namespace {

struct Cursor {
  const std::string& s;
  std::size_t i = 0;

  void skip() {
    while (i < s.size() && std::isspace(static_cast<unsigned char>(s[i]))) ++i;
  }
  bool done() {
    skip();
    return i >= s.size();
  }
  char peek() {
    skip();
    return i < s.size() ? s[i] : '\0';
  }
  [[noreturn]] void fail(const std::string& what) const {
    throw Error("cannot parse polynomial '" + s + "' at offset " + std::to_string(i) + ": " + what);
  }
  double number() {
    skip();
    std::size_t used = 0;
    double v = 0.0;
    try {
      v = std::stod(s.substr(i), &used);
    } catch (const std::exception&) {
      fail("expected number");
    }
    i += used;
    return v;
  }
  int integer() {
    skip();
    std::size_t start = i;
    while (i < s.size() && std::isdigit(static_cast<unsigned char>(s[i]))) ++i;
    if (start == i) fail("expected integer");
    return std::stoi(s.substr(start, i - start));
  }
};

}  // namespace

Perturbation Perturbation::parse(const std::string& text, int n) {
  Perturbation p;
  p.n = n;
  Cursor c{text};
  if (c.done()) return p;
  bool first = true;
  while (!c.done()) {
    double sign = 1.0;
    char ch = c.peek();
    if (ch == '+' || ch == '-') {
      sign = ch == '-' ? -1.0 : 1.0;
      ++c.i;
    } else if (!first) {
      c.fail("expected + or -");
    }
    first = false;
    Term term;
    term.powers.assign(2 * n, 0);
    term.coefficient = sign;
    bool need_factor = true;
    while (need_factor) {
      ch = c.peek();
      if (std::isdigit(static_cast<unsigned char>(ch)) || ch == '.') {
        term.coefficient *= c.number();
      } else if (ch == 'x' || ch == 'y') {
        ++c.i;
        const int j = c.integer();
        if (j < 1 || j > n) c.fail("coordinate index out of range");
        int power = 1;
        if (c.peek() == '^') {
          ++c.i;
          power = c.integer();
        }
        term.powers[2 * (j - 1) + (ch == 'y' ? 1 : 0)] += power;
      } else {
        c.fail("expected factor");
      }
      if (c.peek() == '*') {
        ++c.i;
      } else {
        need_factor = false;
      }
    }
    p.terms.push_back(term);
  }
  return p;
}

std::string Perturbation::to_string() const {
  std::ostringstream os;
  os.precision(17);
  bool first = true;
  for (const auto& t : terms) {
    double c = t.coefficient;
    if (!first) {
      os << (c < 0 ? " - " : " + ");
      c = std::abs(c);
    }
    first = false;
    os << c;
    for (int k = 0; k < 2 * n; ++k) {
      if (t.powers[k] == 0) continue;
      os << '*' << (k % 2 == 0 ? 'x' : 'y') << (k / 2 + 1);
      if (t.powers[k] != 1) os << '^' << t.powers[k];
    }
  }
  return os.str();
}

}  // namespace imet
