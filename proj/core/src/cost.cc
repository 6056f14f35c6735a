// Copyright 2026 The phishcost Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#include "phishcost/cost.h"

#include <charconv>
#include <cstdlib>
#include <limits>
#include <numeric>
#include <string>
#include <tuple>
#include <utility>

#include "phishcost/error.h"

namespace phishcost {
namespace {

__extension__ typedef __int128 Wide;

std::int64_t Narrow(Wide v) {
  if (v > INT64_MAX || v < INT64_MIN) {
    throw std::overflow_error("rational arithmetic overflow");
  }
  return static_cast<std::int64_t>(v);
}

std::pair<std::int64_t, std::int64_t> Reduce(Wide num, Wide den) {
  if (den == 0) throw std::domain_error("rational with zero denominator");
  if (den < 0) {
    num = -num;
    den = -den;
  }
  Wide a = num < 0 ? -num : num;
  Wide b = den;
  while (b != 0) {
    Wide t = a % b;
    a = b;
    b = t;
  }
  if (a > 1) {
    num /= a;
    den /= a;
  }
  return {Narrow(num), Narrow(den)};
}

std::int64_t ParseInt(std::string_view text) {
  std::int64_t v = 0;
  auto [ptr, ec] = std::from_chars(text.data(), text.data() + text.size(), v);
  if (ec != std::errc() || ptr != text.data() + text.size() || text.empty()) {
    throw Error(ErrorCode::kParseError,
                "not an integer: '" + std::string(text) + "'");
  }
  return v;
}

std::string_view Trim(std::string_view s) {
  while (!s.empty() && (s.front() == ' ' || s.front() == '\t')) s.remove_prefix(1);
  while (!s.empty() && (s.back() == ' ' || s.back() == '\t')) s.remove_suffix(1);
  return s;
}

}  // namespace

Rational::Rational(std::int64_t num, std::int64_t den) {
  std::tie(num_, den_) = Reduce(num, den);
}

std::int64_t Rational::Floor() const {
  std::int64_t q = num_ / den_;
  if (num_ % den_ != 0 && num_ < 0) --q;
  return q;
}

std::int64_t Rational::Ceil() const {
  std::int64_t q = num_ / den_;
  if (num_ % den_ != 0 && num_ > 0) ++q;
  return q;
}

std::string Rational::ToString() const {
  if (den_ == 1) return std::to_string(num_);
  return std::to_string(num_) + "/" + std::to_string(den_);
}

Rational Rational::Parse(std::string_view text) {
  text = Trim(text);
  if (auto slash = text.find('/'); slash != std::string_view::npos) {
    return Rational(ParseInt(Trim(text.substr(0, slash))),
                    ParseInt(Trim(text.substr(slash + 1))));
  }
  if (auto dot = text.find('.'); dot != std::string_view::npos) {
    std::string_view whole = text.substr(0, dot);
    std::string_view frac = text.substr(dot + 1);
    bool negative = !whole.empty() && whole.front() == '-';
    if (negative) whole.remove_prefix(1);
    if (frac.empty() || frac.size() > 12) {
      throw Error(ErrorCode::kParseError,
                  "bad decimal: '" + std::string(text) + "'");
    }
    std::int64_t scale = 1;
    for (std::size_t i = 0; i < frac.size(); ++i) scale *= 10;
    std::int64_t w = whole.empty() ? 0 : ParseInt(whole);
    std::int64_t f = ParseInt(frac);
    if (w < 0 || f < 0) {
      throw Error(ErrorCode::kParseError,
                  "bad decimal: '" + std::string(text) + "'");
    }
    Rational r(w * scale + f, scale);
    return negative ? Rational(0) - r : r;
  }
  return Rational(ParseInt(text));
}

Rational operator+(const Rational& a, const Rational& b) {
  Rational r;
  std::tie(r.num_, r.den_) = Reduce(Wide(a.num_) * b.den_ + Wide(b.num_) * a.den_,
              Wide(a.den_) * b.den_);
  return r;
}

Rational operator-(const Rational& a, const Rational& b) {
  Rational r;
  std::tie(r.num_, r.den_) = Reduce(Wide(a.num_) * b.den_ - Wide(b.num_) * a.den_,
              Wide(a.den_) * b.den_);
  return r;
}

Rational operator*(const Rational& a, const Rational& b) {
  Rational r;
  std::tie(r.num_, r.den_) = Reduce(Wide(a.num_) * b.num_, Wide(a.den_) * b.den_);
  return r;
}

Rational operator/(const Rational& a, const Rational& b) {
  Rational r;
  std::tie(r.num_, r.den_) = Reduce(Wide(a.num_) * b.den_, Wide(a.den_) * b.num_);
  return r;
}

std::strong_ordering operator<=>(const Rational& a, const Rational& b) {
  Wide lhs = Wide(a.num_) * b.den_;
  Wide rhs = Wide(b.num_) * a.den_;
  if (lhs < rhs) return std::strong_ordering::less;
  if (lhs > rhs) return std::strong_ordering::greater;
  return std::strong_ordering::equal;
}

std::ostream& operator<<(std::ostream& os, const Rational& r) {
  return os << r.ToString();
}

Cost::Cost(Rational value) : value_(value) {
  if (value < Rational(0)) {
    throw Error(ErrorCode::kConfigError,
                "negative cost " + value.ToString());
  }
}

const Rational& Cost::value() const {
  if (infinite_) throw std::logic_error("value() on an infinite cost");
  return value_;
}

double Cost::ToDouble() const {
  return infinite_ ? std::numeric_limits<double>::infinity()
                   : value_.ToDouble();
}

std::string Cost::ToString() const {
  return infinite_ ? "inf" : value_.ToString();
}

Cost Cost::Parse(std::string_view text) {
  text = Trim(text);
  if (text == "inf" || text == "Inf" || text == "INF" || text == "infinity") {
    return Infinite();
  }
  return Cost(Rational::Parse(text));
}

Cost operator+(const Cost& a, const Cost& b) {
  if (a.infinite_ || b.infinite_) return Cost::Infinite();
  return Cost(a.value_ + b.value_);
}

Cost operator*(const Cost& a, const Rational& factor) {
  if (a.infinite_) return a;
  return Cost(a.value_ * factor);
}

bool operator==(const Cost& a, const Cost& b) {
  if (a.infinite_ || b.infinite_) return a.infinite_ == b.infinite_;
  return a.value_ == b.value_;
}

std::strong_ordering operator<=>(const Cost& a, const Cost& b) {
  if (a.infinite_ || b.infinite_) {
    if (a.infinite_ == b.infinite_) return std::strong_ordering::equal;
    return a.infinite_ ? std::strong_ordering::greater
                       : std::strong_ordering::less;
  }
  return a.value_ <=> b.value_;
}

std::ostream& operator<<(std::ostream& os, const Cost& c) {
  return os << c.ToString();
}

}  // namespace phishcost
