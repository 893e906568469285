#pragma once

#include <cstdint>
#include <functional>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "robustsum/extended_real.hpp"

namespace robustsum {

// Facts about the tail i > N of a countable family. Enclosures are for
// Σ_{i>N} a_i^+, Σ_{i>N} a_i^- and (optionally) sup_{i>N} a_i. A declared
// divergence flag overrides the corresponding enclosure.
struct TailCertificate {
  std::function<Bracket(std::uint64_t)> pos_tail;
  std::function<Bracket(std::uint64_t)> neg_tail;
  std::function<Bracket(std::uint64_t)> tail_sup;
  bool pos_divergent = false;
  bool neg_divergent = false;
};

class ScalarFamily {
 public:
  using Generator = std::function<ExtendedReal(std::uint64_t)>;

  static ScalarFamily finite(std::vector<ExtendedReal> terms);
  static ScalarFamily finite(const std::vector<double>& terms);
  static ScalarFamily countable(Generator term, std::optional<TailCertificate> tail,
                                std::string name = {});

  bool is_finite() const { return finite_; }
  std::size_t size() const { return terms_.size(); }
  const std::vector<ExtendedReal>& terms() const { return terms_; }
  // Indices start at 1.
  ExtendedReal term(std::uint64_t i) const;
  const std::optional<TailCertificate>& tail() const { return tail_; }
  const std::string& name() const { return name_; }

 private:
  bool finite_ = true;
  std::vector<ExtendedReal> terms_;
  Generator generator_;
  std::optional<TailCertificate> tail_;
  std::string name_;
};

// Named countable families, indexed from i = 1:
//   example1              1/i^2 for even i, -1/i for odd i
//   alternating           (-1)^i
//   alternating_harmonic  (-1)^i / i
//   geometric(r)          r^i
//   shifted_harmonic      -1 - 1/i
//   negative_harmonic     -1/i
ScalarFamily builtin_scalar_family(std::string_view formula, bool with_tail = true);
std::optional<TailCertificate> builtin_tail(std::string_view formula);
bool is_builtin_scalar(std::string_view formula);
std::vector<std::string> builtin_scalar_names();

}  // namespace robustsum
