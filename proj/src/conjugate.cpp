#include "robustsum/conjugate.hpp"

#include <sstream>

#include "robustsum/errors.hpp"

namespace robustsum {

std::string ConjugateDescriptor::describe() const {
  const FunctionAtom& a = atom_;
  std::ostringstream os;
  auto vec = [&](const Vector& v) {
    os << '[';
    for (std::size_t k = 0; k < v.size(); ++k) os << (k ? "," : "") << format_double(v[k]);
    os << ']';
  };
  switch (a.kind()) {
    case AtomKind::Affine:
      os << "indicator_at(";
      vec(a.slope());
      os << ") + " << format_double(a.offset());
      break;
    case AtomKind::Constant:
      os << "indicator_at(0) - " << format_double(a.offset());
      break;
    case AtomKind::DiagonalQuadratic:
      os << "sum_k (y_k - a_k)^2 / (4 q_k) + t";
      break;
    case AtomKind::PowerResidual:
      if (a.power() == 1.0) {
        os << "lambda*b on y = lambda*a, |lambda| <= 1";
      } else {
        os << "lambda*b + (p-1)(|lambda|/p)^(p/(p-1)) on y = lambda*a";
      }
      break;
    case AtomKind::HingeResidual:
      if (a.power() == 1.0) {
        os << "lambda*b on y = lambda*a, 0 <= lambda <= 1";
      } else {
        os << "lambda*b + (p-1)(lambda/p)^(p/(p-1)) on y = lambda*a, lambda >= 0";
      }
      break;
  }
  return os.str();
}

ConjugateDescriptor conjugate_atom(const FunctionAtom& atom, double tol_eq) {
  return ConjugateDescriptor(atom, tol_eq);
}

ConjugateEstimate conjugate_numeric(const RobustSumFunction& f, std::span<const double> y,
                                    const ConjugateOptions& opts) {
  const std::size_t n = f.family().dimension();
  if (y.size() != n) fail(ErrorCode::DimensionMismatch, "dual point has wrong dimension");
  const Vector yv(y.begin(), y.end());
  const ConcaveFn g = [&f, yv](std::span<const double> x) {
    const Bracket fx = f.eval(x);
    if (fx.is_plus_infinity()) return Bracket{-kInf, -kInf};
    const double lin = affine_value(yv, x, 0.0);
    Bracket r{lin - fx.hi, lin - fx.lo};
    if (!fx.is_exact()) r = widen(r, 1);
    return r;
  };
  const ConcaveMaxResult m = maximize_concave(g, n, opts.search);
  ConjugateEstimate e;
  e.value = m.value;
  e.status = m.status;
  e.argmax = m.argmax;
  e.lower = m.lower;
  e.mode = "numeric";
  return e;
}

}  // namespace robustsum
