#include "robustsum/inf_convolution.hpp"

#include <algorithm>
#include <cmath>

#include "robustsum/errors.hpp"

namespace robustsum {

bool sums_to(std::span<const Vector> parts, std::span<const double> y, double tol_eq) {
  for (std::size_t k = 0; k < y.size(); ++k) {
    ExactAccumulator acc;
    for (const auto& p : parts) acc.add(p[k]);
    if (std::fabs(acc.value() - y[k]) > tol_eq * std::max(1.0, std::fabs(y[k]))) return false;
  }
  return true;
}

namespace {

double conj_sum(std::span<const FunctionAtom> atoms, const std::vector<Vector>& parts, double tol_eq) {
  ExactAccumulator acc;
  for (std::size_t i = 0; i < atoms.size(); ++i) {
    const double c = atoms[i].conjugate(parts[i], tol_eq);
    if (c == kInf) return kInf;
    acc.add(c);
  }
  return acc.value();
}

SubsetValue from_parts(std::span<const FunctionAtom> atoms, std::vector<Vector> parts, double tol_eq) {
  SubsetValue v;
  const double s = conj_sum(atoms, parts, tol_eq);
  v.exact = true;
  if (s == kInf) {
    v.value = Bracket::plus_infinity();
    return v;
  }
  v.value = Bracket::exact(s);
  v.parts = std::move(parts);
  return v;
}

// One free atom: its part is whatever the forced atoms leave over.
SubsetValue single_free(std::span<const FunctionAtom> atoms, std::size_t free, std::span<const double> y,
                        double tol_eq) {
  std::vector<Vector> parts(atoms.size());
  for (std::size_t i = 0; i < atoms.size(); ++i) {
    if (i != free) parts[i] = atoms[i].forced_point();
  }
  Vector rest(y.size());
  for (std::size_t k = 0; k < y.size(); ++k) {
    ExactAccumulator acc;
    acc.add(y[k]);
    for (std::size_t i = 0; i < atoms.size(); ++i) {
      if (i != free) acc.add(-parts[i][k]);
    }
    rest[k] = acc.value();
  }
  parts[free] = std::move(rest);
  return from_parts(atoms, std::move(parts), tol_eq);
}

struct Slopes {
  double lo;
  double hi;
};

Slopes derivative_sum(std::span<const FunctionAtom> atoms, double x) {
  ExactAccumulator lo;
  ExactAccumulator hi;
  for (const auto& a : atoms) {
    const Bracket d = a.derivative_range(x);
    lo.add(d.lo);
    hi.add(d.hi);
  }
  return {lo.value(), hi.value()};
}

double primal_value(std::span<const FunctionAtom> atoms, double y, double x) {
  ExactAccumulator acc;
  const double p = y * x;
  acc.add(p);
  acc.add(std::fma(y, x, -p));
  const double xs[1] = {x};
  for (const auto& a : atoms) acc.add(-a.eval(xs));
  return acc.value();
}

SubsetValue one_dimensional(std::span<const FunctionAtom> atoms, double y, double tol_eq) {
  ExactAccumulator lim_lo;
  ExactAccumulator lim_hi;
  std::vector<double> kinks;
  for (const auto& a : atoms) {
    const Bracket s = a.slope_limits();
    lim_lo.add(s.lo == -kInf ? -1e300 : s.lo);
    lim_hi.add(s.hi == kInf ? 1e300 : s.hi);
    if (auto k = a.kink()) kinks.push_back(*k);
  }
  const double lo_lim = lim_lo.value();
  const double hi_lim = lim_hi.value();
  const double slack = tol_eq * std::max(1.0, std::fabs(y));
  if (y < lo_lim - slack || y > hi_lim + slack) {
    SubsetValue v;
    v.value = Bracket::plus_infinity();
    v.exact = true;
    return v;
  }
  const double target = std::clamp(y, lo_lim, hi_lim);
  const double eps = 1e-12 * std::max(1.0, std::fabs(target));
  // -1: slope sum below target, +1: above, 0: target inside the subdifferential.
  auto side = [&](double x) {
    const Slopes d = derivative_sum(atoms, x);
    if (d.hi < target - eps) return -1;
    if (d.lo > target + eps) return 1;
    return 0;
  };
  std::sort(kinks.begin(), kinks.end());
  std::optional<double> hit;
  for (double k : kinks) {
    if (side(k) == 0) {
      hit = k;
      break;
    }
  }
  double xl = 0;
  double xr = 0;
  if (!hit) {
    const double left0 = kinks.empty() ? 0.0 : kinks.front();
    const double right0 = kinks.empty() ? 0.0 : kinks.back();
    bool found_l = false;
    bool found_r = false;
    for (double step = 1.0; step < 1e18 && !(found_l && found_r); step *= 2) {
      if (!found_l) {
        xl = left0 - step;
        const int s = side(xl);
        if (s == 0) {
          hit = xl;
          break;
        }
        found_l = s < 0;
      }
      if (!found_r) {
        xr = right0 + step;
        const int s = side(xr);
        if (s == 0) {
          hit = xr;
          break;
        }
        found_r = s > 0;
      }
    }
    if (!hit && !(found_l && found_r)) {
      SubsetValue v;
      v.value = Bracket{-kInf, kInf};
      return v;
    }
  }
  double xhat = 0;
  if (hit) {
    xhat = *hit;
  } else {
    for (int it = 0; it < 200; ++it) {
      const double mid = xl + (xr - xl) / 2;
      if (!(mid > xl && mid < xr)) break;
      const int s = side(mid);
      if (s == 0) {
        hit = mid;
        break;
      }
      (s < 0 ? xl : xr) = mid;
    }
    xhat = hit ? *hit : xl + (xr - xl) / 2;
  }
  // Split the target over the atoms' subdifferentials at xhat.
  std::vector<double> lo(atoms.size());
  std::vector<double> width(atoms.size());
  ExactAccumulator base;
  for (std::size_t i = 0; i < atoms.size(); ++i) {
    const Bracket d = atoms[i].derivative_range(xhat);
    lo[i] = d.lo;
    width[i] = d.hi - d.lo;
    base.add(d.lo);
  }
  double deficit = target - base.value();
  std::vector<double> part = lo;
  for (std::size_t i = 0; i < atoms.size() && deficit > 0; ++i) {
    const double give = std::min(deficit, width[i]);
    part[i] += give;
    deficit -= give;
  }
  if (deficit != 0) {
    // Leftover from a smooth crossing: hand it to an atom whose slope range has room.
    std::size_t absorb = atoms.size() - 1;
    for (std::size_t i = 0; i < atoms.size(); ++i) {
      const Bracket s = atoms[i].slope_limits();
      const double want = part[i] + deficit;
      if (want > s.lo && want < s.hi) {
        absorb = i;
        break;
      }
    }
    part[absorb] += deficit;
  }
  std::vector<Vector> parts;
  for (double p : part) parts.push_back({p});
  SubsetValue v;
  const double upper = conj_sum(atoms, parts, tol_eq);
  const double lower = primal_value(atoms, target, xhat);
  if (upper == kInf) {
    v.value = Bracket{lower, kInf};
    return v;
  }
  v.value = Bracket{std::min(lower, upper), upper};
  v.parts = std::move(parts);
  v.exact = v.value.is_exact();
  return v;
}

SubsetValue by_primal(std::span<const FunctionAtom> atoms, std::span<const double> y,
                      const std::vector<std::size_t>& free, const InfConvOptions& opts) {
  const Vector yv(y.begin(), y.end());
  const ConcaveFn h = [&atoms, yv](std::span<const double> x) {
    ExactAccumulator acc;
    acc.add(affine_value(yv, x, 0.0));
    for (const auto& a : atoms) acc.add(-a.eval(x));
    return Bracket::exact(acc.value());
  };
  const ConcaveMaxResult m = maximize_concave(h, y.size(), opts.search);
  SubsetValue v;
  if (m.status == SupStatus::Escape) {
    v.value = Bracket::plus_infinity();
    return v;
  }
  std::vector<Vector> parts(atoms.size());
  for (std::size_t i = 0; i < atoms.size(); ++i) {
    parts[i] = atoms[i].forced_conjugate() ? atoms[i].forced_point() : atoms[i].subgradient(m.argmax);
  }
  const std::size_t last = free.back();
  for (std::size_t k = 0; k < y.size(); ++k) {
    ExactAccumulator acc;
    acc.add(y[k]);
    for (std::size_t i = 0; i < atoms.size(); ++i) {
      if (i != last) acc.add(-parts[i][k]);
    }
    parts[last][k] = acc.value();
  }
  const double upper = conj_sum(atoms, parts, opts.tol_eq);
  double hi = upper;
  if (m.status == SupStatus::Interior) hi = std::min(hi, m.value.hi);
  if (hi == kInf && m.status == SupStatus::Plateau) hi = m.value.hi;
  v.value = Bracket{m.value.lo, std::max(m.value.lo, hi)};
  if (upper < kInf) v.parts = std::move(parts);
  return v;
}

}  // namespace

SubsetValue inf_convolution(std::span<const FunctionAtom> atoms, std::span<const double> y,
                            const InfConvOptions& opts) {
  if (atoms.empty()) fail(ErrorCode::InvalidFamily, "empty subset");
  for (const auto& a : atoms) {
    if (a.dimension() != y.size()) fail(ErrorCode::DimensionMismatch, "dual point has wrong dimension");
  }
  std::vector<std::size_t> free;
  for (std::size_t i = 0; i < atoms.size(); ++i) {
    if (!atoms[i].forced_conjugate()) free.push_back(i);
  }
  if (free.empty()) {
    std::vector<Vector> parts;
    for (const auto& a : atoms) parts.push_back(a.forced_point());
    if (!sums_to(parts, y, opts.tol_eq)) {
      SubsetValue v;
      v.value = Bracket::plus_infinity();
      v.exact = true;
      return v;
    }
    return from_parts(atoms, std::move(parts), opts.tol_eq);
  }
  if (free.size() == 1) return single_free(atoms, free.front(), y, opts.tol_eq);
  if (y.size() == 1) return one_dimensional(atoms, y[0], opts.tol_eq);
  return by_primal(atoms, y, free, opts);
}

}  // namespace robustsum
