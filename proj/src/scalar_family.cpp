#include "robustsum/scalar_family.hpp"

#include <cmath>
#include <cstdlib>

#include "robustsum/errors.hpp"

namespace robustsum {

ScalarFamily ScalarFamily::finite(std::vector<ExtendedReal> terms) {
  for (std::size_t k = 0; k < terms.size(); ++k) {
    const double v = terms[k].value();
    if (std::isnan(v) || v == -kInf) {
      fail(ErrorCode::InvalidFamily, "term " + std::to_string(k + 1) + " is not in R ∪ {+inf}");
    }
  }
  ScalarFamily f;
  f.terms_ = std::move(terms);
  return f;
}

ScalarFamily ScalarFamily::finite(const std::vector<double>& terms) {
  return finite(std::vector<ExtendedReal>(terms.begin(), terms.end()));
}

ScalarFamily ScalarFamily::countable(Generator term, std::optional<TailCertificate> tail,
                                     std::string name) {
  ScalarFamily f;
  f.finite_ = false;
  f.generator_ = std::move(term);
  f.tail_ = std::move(tail);
  f.name_ = std::move(name);
  return f;
}

ExtendedReal ScalarFamily::term(std::uint64_t i) const {
  if (i == 0) fail(ErrorCode::InvalidFamily, "family indices start at 1");
  ExtendedReal v;
  if (finite_) {
    if (i > terms_.size()) fail(ErrorCode::InvalidFamily, "index beyond finite family");
    v = terms_[i - 1];
  } else {
    v = generator_(i);
  }
  if (std::isnan(v.value()) || v.is_minus_infinity()) {
    fail(ErrorCode::InvalidFamily, "term " + std::to_string(i) + " is not in R ∪ {+inf}");
  }
  return v;
}

namespace {

struct Parsed {
  std::string name;
  std::optional<double> arg;
};

Parsed parse_formula(std::string_view formula) {
  Parsed p;
  const auto open = formula.find('(');
  if (open == std::string_view::npos) {
    p.name = std::string(formula);
    return p;
  }
  if (formula.back() != ')') fail(ErrorCode::InvalidFamily, "malformed formula: " + std::string(formula));
  p.name = std::string(formula.substr(0, open));
  const std::string arg(formula.substr(open + 1, formula.size() - open - 2));
  char* end = nullptr;
  const double v = std::strtod(arg.c_str(), &end);
  if (arg.empty() || end != arg.c_str() + arg.size() || !std::isfinite(v)) {
    fail(ErrorCode::InvalidFamily, "malformed argument in formula: " + std::string(formula));
  }
  p.arg = v;
  return p;
}

double first_even_after(std::uint64_t n) { return static_cast<double>(n % 2 == 0 ? n + 2 : n + 1); }
double first_odd_after(std::uint64_t n) { return static_cast<double>(n % 2 == 0 ? n + 1 : n + 2); }

// Enclosure of Σ_{k>m} 1/k^2.
Bracket inverse_square_tail(std::uint64_t m) {
  if (m == 0) return widen(Bracket::exact(M_PI * M_PI / 6.0), 4);
  const double x = static_cast<double>(m);
  const double base = 1.0 / x - 1.0 / (2.0 * x * x);
  return widen(Bracket{base, base + 1.0 / (6.0 * x * x * x)}, 4);
}

Bracket zero_bracket(std::uint64_t) { return Bracket::exact(0.0); }

struct Builtin {
  ScalarFamily::Generator term;
  TailCertificate tail;
};

Builtin make_builtin(const Parsed& p) {
  Builtin b;
  const auto& name = p.name;
  auto require_no_arg = [&] {
    if (p.arg) fail(ErrorCode::InvalidFamily, name + " takes no parameter");
  };
  if (name == "example1") {
    require_no_arg();
    b.term = [](std::uint64_t i) {
      const double x = static_cast<double>(i);
      return ExtendedReal(i % 2 == 0 ? 1.0 / (x * x) : -1.0 / x);
    };
    b.tail.pos_tail = [](std::uint64_t n) {
      const Bracket s = inverse_square_tail(n / 2);
      return Bracket{s.lo / 4.0, s.hi / 4.0};
    };
    b.tail.neg_divergent = true;
    b.tail.tail_sup = [](std::uint64_t n) {
      const double e = first_even_after(n);
      return Bracket::exact(1.0 / (e * e));
    };
  } else if (name == "alternating") {
    require_no_arg();
    b.term = [](std::uint64_t i) { return ExtendedReal(i % 2 == 0 ? 1.0 : -1.0); };
    b.tail.pos_divergent = true;
    b.tail.neg_divergent = true;
    b.tail.tail_sup = [](std::uint64_t) { return Bracket::exact(1.0); };
  } else if (name == "alternating_harmonic") {
    require_no_arg();
    b.term = [](std::uint64_t i) {
      const double x = static_cast<double>(i);
      return ExtendedReal(i % 2 == 0 ? 1.0 / x : -1.0 / x);
    };
    b.tail.pos_divergent = true;
    b.tail.neg_divergent = true;
    b.tail.tail_sup = [](std::uint64_t n) { return Bracket::exact(1.0 / first_even_after(n)); };
  } else if (name == "shifted_harmonic") {
    require_no_arg();
    b.term = [](std::uint64_t i) { return ExtendedReal(-1.0 - 1.0 / static_cast<double>(i)); };
    b.tail.pos_tail = zero_bracket;
    b.tail.neg_divergent = true;
    b.tail.tail_sup = [](std::uint64_t) { return Bracket::exact(-1.0); };
  } else if (name == "negative_harmonic") {
    require_no_arg();
    b.term = [](std::uint64_t i) { return ExtendedReal(-1.0 / static_cast<double>(i)); };
    b.tail.pos_tail = zero_bracket;
    b.tail.neg_divergent = true;
    b.tail.tail_sup = [](std::uint64_t) { return Bracket::exact(0.0); };
  } else if (name == "geometric") {
    if (!p.arg) fail(ErrorCode::InvalidFamily, "geometric requires a ratio, e.g. geometric(0.5)");
    const double r = *p.arg;
    b.term = [r](std::uint64_t i) { return ExtendedReal(std::pow(r, static_cast<double>(i))); };
    if (r >= 0.0 && r < 1.0) {
      b.tail.pos_tail = [r](std::uint64_t n) {
        const double v = std::pow(r, static_cast<double>(n + 1)) / (1.0 - r);
        return widen(Bracket::exact(v), 4);
      };
      b.tail.neg_tail = zero_bracket;
      b.tail.tail_sup = [r](std::uint64_t n) {
        return widen(Bracket::exact(std::pow(r, static_cast<double>(n + 1))), 2);
      };
    } else if (r > -1.0 && r < 0.0) {
      const double a = -r;
      b.tail.pos_tail = [a](std::uint64_t n) {
        return widen(Bracket::exact(std::pow(a, first_even_after(n)) / (1.0 - a * a)), 4);
      };
      b.tail.neg_tail = [a](std::uint64_t n) {
        return widen(Bracket::exact(std::pow(a, first_odd_after(n)) / (1.0 - a * a)), 4);
      };
      b.tail.tail_sup = [a](std::uint64_t n) {
        return widen(Bracket::exact(std::pow(a, first_even_after(n))), 2);
      };
    } else if (r >= 1.0) {
      b.tail.pos_divergent = true;
      b.tail.neg_tail = zero_bracket;
      b.tail.tail_sup = [r](std::uint64_t n) {
        if (r == 1.0) return Bracket::exact(1.0);
        return Bracket{std::pow(r, static_cast<double>(n + 1)), kInf};
      };
    } else {
      b.tail.pos_divergent = true;
      b.tail.neg_divergent = true;
      b.tail.tail_sup = [r](std::uint64_t) {
        if (r == -1.0) return Bracket::exact(1.0);
        return Bracket{1.0, kInf};
      };
    }
  } else {
    fail(ErrorCode::InvalidFamily, "unknown scalar builtin: " + name);
  }
  return b;
}

}  // namespace

ScalarFamily builtin_scalar_family(std::string_view formula, bool with_tail) {
  Builtin b = make_builtin(parse_formula(formula));
  std::optional<TailCertificate> tail;
  if (with_tail) tail = std::move(b.tail);
  return ScalarFamily::countable(std::move(b.term), std::move(tail), std::string(formula));
}

std::optional<TailCertificate> builtin_tail(std::string_view formula) {
  return make_builtin(parse_formula(formula)).tail;
}

bool is_builtin_scalar(std::string_view formula) {
  try {
    (void)make_builtin(parse_formula(formula));
    return true;
  } catch (const Error&) {
    return false;
  }
}

std::vector<std::string> builtin_scalar_names() {
  return {"example1", "alternating", "alternating_harmonic", "geometric(r)", "shifted_harmonic",
          "negative_harmonic"};
}

}  // namespace robustsum
