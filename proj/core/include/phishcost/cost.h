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

#ifndef PHISHCOST_COST_H_
#define PHISHCOST_COST_H_

#include <compare>
#include <cstdint>
#include <ostream>
#include <string>
#include <string_view>

namespace phishcost {

// Exact nonnegative-or-signed rational with a positive, reduced denominator.
// Costs stay exact so that priority ordering and tie detection never depend
// on floating-point rounding.
class Rational {
 public:
  constexpr Rational() = default;
  constexpr Rational(std::int64_t value) : num_(value), den_(1) {}  // NOLINT
  Rational(std::int64_t num, std::int64_t den);

  std::int64_t num() const { return num_; }
  std::int64_t den() const { return den_; }

  bool is_integer() const { return den_ == 1; }
  double ToDouble() const { return static_cast<double>(num_) / den_; }
  // Smallest integer >= this value.
  std::int64_t Ceil() const;
  std::int64_t Floor() const;
  // "3", "3/2", "-1/4".
  std::string ToString() const;

  // Accepts "3", "-2", "3/2" and decimals such as "1.25".
  static Rational Parse(std::string_view text);

  friend Rational operator+(const Rational& a, const Rational& b);
  friend Rational operator-(const Rational& a, const Rational& b);
  friend Rational operator*(const Rational& a, const Rational& b);
  friend Rational operator/(const Rational& a, const Rational& b);
  Rational& operator+=(const Rational& other) { return *this = *this + other; }

  friend bool operator==(const Rational& a, const Rational& b) = default;
  friend std::strong_ordering operator<=>(const Rational& a,
                                          const Rational& b);

 private:
  std::int64_t num_ = 0;
  std::int64_t den_ = 1;
};

std::ostream& operator<<(std::ostream& os, const Rational& r);

// A transition or path cost: a finite nonnegative rational, or Infinite.
// Infinite absorbs addition and compares above every finite value.
class Cost {
 public:
  constexpr Cost() = default;
  Cost(Rational value);  // NOLINT
  Cost(std::int64_t value) : Cost(Rational(value)) {}  // NOLINT
  Cost(int value) : Cost(Rational(value)) {}  // NOLINT

  static constexpr Cost Infinite() {
    Cost c;
    c.infinite_ = true;
    return c;
  }

  bool is_infinite() const { return infinite_; }
  bool is_finite() const { return !infinite_; }
  // Precondition: is_finite().
  const Rational& value() const;

  double ToDouble() const;
  // "inf" or the rational's text form.
  std::string ToString() const;
  static Cost Parse(std::string_view text);

  friend Cost operator+(const Cost& a, const Cost& b);
  Cost& operator+=(const Cost& other) { return *this = *this + other; }
  // Scales a finite cost; Infinite stays Infinite.
  friend Cost operator*(const Cost& a, const Rational& factor);

  friend bool operator==(const Cost& a, const Cost& b);
  friend std::strong_ordering operator<=>(const Cost& a, const Cost& b);

 private:
  bool infinite_ = false;
  Rational value_;
};

std::ostream& operator<<(std::ostream& os, const Cost& c);

}  // namespace phishcost

#endif  // PHISHCOST_COST_H_
