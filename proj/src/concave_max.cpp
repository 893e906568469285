#include "robustsum/concave_max.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <queue>

#include "robustsum/errors.hpp"

namespace robustsum {

std::string_view to_string(SupStatus s) {
  switch (s) {
    case SupStatus::Interior: return "interior";
    case SupStatus::Plateau: return "plateau";
    case SupStatus::Escape: return "escape";
  }
  return "?";
}

namespace {

struct Box {
  Vector lo;
  Vector hi;
  double bound = kInf;
};

struct BoxOrder {
  bool operator()(const Box& a, const Box& b) const { return a.bound < b.bound; }
};

class Solver {
 public:
  Solver(const ConcaveFn& g, std::size_t n) : g_(g), n_(n) {}

  Bracket value(const Vector& x) {
    auto it = cache_.find(x);
    if (it != cache_.end()) return it->second;
    ++evals_;
    const Bracket v = g_(x);
    if (v.lo > best_ || (best_x_.empty() && v.lo > -kInf)) {
      if (v.lo > best_) best_ = v.lo;
      best_x_ = x;
    }
    cache_.emplace(x, v);
    return v;
  }

  double bound(const Box& b) {
    Vector c(n_);
    for (std::size_t k = 0; k < n_; ++k) c[k] = b.lo[k] + (b.hi[k] - b.lo[k]) / 2;
    const Bracket gc = value(c);
    double min_v = kInf;
    std::vector<std::size_t> free;
    for (std::size_t k = 0; k < n_; ++k) {
      if (b.hi[k] > b.lo[k]) free.push_back(k);
    }
    const std::size_t corners = std::size_t{1} << free.size();
    for (std::size_t m = 0; m < corners; ++m) {
      Vector v = b.lo;
      for (std::size_t j = 0; j < free.size(); ++j) {
        if (m & (std::size_t{1} << j)) v[free[j]] = b.hi[free[j]];
      }
      min_v = std::min(min_v, value(v).lo);
    }
    if (min_v == -kInf) return gc.hi == -kInf && free.empty() ? -kInf : kInf;
    if (gc.hi == -kInf) return kInf;
    const double slack = 1e-14 * (1.0 + std::fabs(gc.hi) + std::fabs(min_v));
    return 2 * gc.hi - min_v + slack;
  }

  // Returns an upper bound for max over the box. Stops early once every open
  // box is below `threshold` or within tol of the incumbent.
  double solve(Box root, double tol, double threshold, std::size_t budget) {
    const std::size_t start = evals_;
    std::priority_queue<Box, std::vector<Box>, BoxOrder> open;
    root.bound = bound(root);
    open.push(std::move(root));
    double stuck = -kInf;
    while (!open.empty()) {
      const Box& top = open.top();
      if (top.bound <= best_ + tol || top.bound <= threshold) break;
      if (evals_ - start >= budget) break;
      Box b = top;
      open.pop();
      std::size_t dim = 0;
      double width = -1;
      for (std::size_t k = 0; k < n_; ++k) {
        if (b.hi[k] - b.lo[k] > width) {
          width = b.hi[k] - b.lo[k];
          dim = k;
        }
      }
      const double mid = b.lo[dim] + width / 2;
      if (!(mid > b.lo[dim] && mid < b.hi[dim])) {
        stuck = std::max(stuck, b.bound);
        continue;
      }
      Box left = b;
      Box right = b;
      left.hi[dim] = mid;
      right.lo[dim] = mid;
      left.bound = bound(left);
      right.bound = bound(right);
      open.push(std::move(left));
      open.push(std::move(right));
    }
    const double ub = open.empty() ? -kInf : open.top().bound;
    return std::max(ub, stuck);
  }

  double best() const { return best_; }
  const Vector& best_x() const { return best_x_; }
  std::size_t evals() const { return evals_; }

 private:
  const ConcaveFn& g_;
  std::size_t n_;
  std::map<Vector, Bracket> cache_;
  double best_ = -kInf;
  Vector best_x_;
  std::size_t evals_ = 0;
};

}  // namespace

ConcaveMaxResult maximize_concave(const ConcaveFn& g, std::size_t n, const ConcaveMaxOptions& opts) {
  if (n == 0) fail(ErrorCode::DimensionMismatch, "maximize_concave needs n >= 1");
  Vector center = opts.center.empty() ? Vector(n, 0.0) : opts.center;
  if (center.size() != n) fail(ErrorCode::DimensionMismatch, "center has wrong dimension");
  Solver s(g, n);
  double radius = opts.radius;
  std::vector<double> lowers;
  std::vector<double> radii;
  int rising = 0;
  double prev_gain = 0;
  ConcaveMaxResult r;
  for (int k = 0; k <= opts.max_doublings; ++k) {
    Box box;
    box.lo = center;
    box.hi = center;
    for (std::size_t d = 0; d < n; ++d) {
      box.lo[d] -= radius;
      box.hi[d] += radius;
    }
    const double ub = s.solve(box, opts.tol, -kInf, opts.max_evals);
    const double lb = s.best();
    r.evals = s.evals();
    r.radius = radius;
    r.lower = lb;
    r.argmax = s.best_x();
    if (lb > -kInf) {
      // The maximum over R^n lies in the box when every face stays strictly below the incumbent.
      const double face_tol = 1e-12 * (1.0 + std::fabs(lb));
      bool faces_ok = true;
      for (std::size_t d = 0; d < n && faces_ok; ++d) {
        for (int side = 0; side < 2 && faces_ok; ++side) {
          Box face = box;
          const double v = side == 0 ? box.lo[d] : box.hi[d];
          face.lo[d] = v;
          face.hi[d] = v;
          const double fub = s.solve(face, face_tol, lb - face_tol, opts.face_evals);
          if (fub > lb - face_tol) faces_ok = false;
        }
      }
      if (s.best() > lb) faces_ok = false;  // a face improved the incumbent
      r.evals = s.evals();
      if (faces_ok) {
        r.value = Bracket{lb, std::max(lb, ub)};
        r.status = SupStatus::Interior;
        return r;
      }
    }
    const double cur = s.best();
    if (!lowers.empty() && cur > -kInf && lowers.back() > -kInf) {
      const double gain = cur - lowers.back();
      const double slope = gain / (radius - radii.back());
      if (gain <= std::max(opts.tol, 1e-12 * std::fabs(cur))) {
        r.value = Bracket{cur, std::max(cur, ub)};
        r.lower = cur;
        r.argmax = s.best_x();
        r.status = SupStatus::Plateau;
        return r;
      }
      // A concave function whose gains keep doubling with the radius grows linearly.
      const bool linear = prev_gain > 0 && gain >= 1.5 * prev_gain;
      rising = (slope >= opts.escape_slope || linear) ? rising + 1 : 0;
      prev_gain = gain;
      if (rising >= opts.escape_confirmations) {
        r.value = Bracket::plus_infinity();
        r.lower = cur;
        r.argmax = s.best_x();
        r.status = SupStatus::Escape;
        return r;
      }
    }
    lowers.push_back(cur);
    radii.push_back(radius);
    radius *= 2;
  }
  fail(ErrorCode::InconclusiveGrowth, "concave maximization neither stabilized nor escaped");
}

}  // namespace robustsum
