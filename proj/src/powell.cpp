#include "popda/powell.hpp"

#include <cmath>
#include <limits>
#include <stdexcept>

namespace popda {

namespace {

constexpr double kGold = 1.618034;
constexpr double kInvGold = 0.618034;  // 1 / kGold
constexpr double kTiny = 1e-25;
constexpr double kLineAbsTol = 1e-12;
constexpr int kMaxBracketSteps = 120;
constexpr int kMaxGoldenSteps = 300;

class Evaluator {
 public:
  Evaluator(const ObjectiveFn& f, std::size_t n) : f_(f), buf_(n) {}

  double operator()(std::span<const double> x) {
    ++count_;
    const double v = f_(x);
    return std::isnan(v) ? std::numeric_limits<double>::infinity() : v;
  }

  /// f(x + t d)
  double along(const std::vector<double>& x, const std::vector<double>& d,
               double t) {
    for (std::size_t i = 0; i < x.size(); ++i) buf_[i] = x[i] + t * d[i];
    return (*this)(buf_);
  }

  long count() const { return count_; }

 private:
  const ObjectiveFn& f_;
  std::vector<double> buf_;
  long count_ = 0;
};

// Minimizes f(x + t d) over t, moving x only on strict improvement.
// Returns the step taken (0 when no improvement was found).
double line_minimize(Evaluator& eval, std::vector<double>& x, double& fx,
                     const std::vector<double>& d, double step,
                     double line_tol) {
  double a = 0.0;
  double fa = fx;
  double b = step;
  double fb = eval.along(x, d, b);
  if (fb > fa) {
    std::swap(a, b);
    std::swap(fa, fb);
  }
  // Walk downhill from a through b until the value rises again at c.
  double c = b + kGold * (b - a);
  double fc = eval.along(x, d, c);
  for (int k = 0; fb > fc && k < kMaxBracketSteps; ++k) {
    a = b;
    fa = fb;
    b = c;
    fb = fc;
    c = b + kGold * (b - a);
    fc = eval.along(x, d, c);
  }

  double best_t = b;
  double best_f = fb;
  if (fb <= fc) {
    // Golden-section search on the bracket (a, b, c).
    double x0 = a;
    double x3 = c;
    double x1 = 0.0;
    double x2 = 0.0;
    if (std::abs(c - b) > std::abs(b - a)) {
      x1 = b;
      x2 = b + (1.0 - kInvGold) * (c - b);
    } else {
      x2 = b;
      x1 = b - (1.0 - kInvGold) * (b - a);
    }
    double f1 = (x1 == b) ? fb : eval.along(x, d, x1);
    double f2 = (x2 == b) ? fb : eval.along(x, d, x2);
    for (int k = 0; k < kMaxGoldenSteps &&
                    std::abs(x3 - x0) >
                        line_tol * (std::abs(x1) + std::abs(x2)) + kLineAbsTol;
         ++k) {
      if (f2 < f1) {
        x0 = x1;
        x1 = x2;
        x2 = kInvGold * x2 + (1.0 - kInvGold) * x3;
        f1 = f2;
        f2 = eval.along(x, d, x2);
      } else {
        x3 = x2;
        x2 = x1;
        x1 = kInvGold * x1 + (1.0 - kInvGold) * x0;
        f2 = f1;
        f1 = eval.along(x, d, x1);
      }
    }
    if (f1 < f2) {
      best_t = x1;
      best_f = f1;
    } else {
      best_t = x2;
      best_f = f2;
    }
  } else if (fc < fb) {
    // Bracketing ran out of steps while still descending.
    best_t = c;
    best_f = fc;
  }

  if (!(best_f < fx)) return 0.0;
  for (std::size_t i = 0; i < x.size(); ++i) x[i] += best_t * d[i];
  fx = best_f;
  return best_t;
}

bool is_zero(const std::vector<double>& v) {
  for (double e : v) {
    if (e != 0.0) return false;
  }
  return true;
}

}  // namespace

PowellResult powell_minimize(const ObjectiveFn& f, std::vector<double> x0,
                             const PowellOptions& opts) {
  const std::size_t n = x0.size();
  Evaluator eval(f, n);
  PowellResult res;
  res.x = std::move(x0);
  res.fx = eval(res.x);
  if (!std::isfinite(res.fx)) {
    throw std::invalid_argument("powell_minimize: f(x0) is not finite");
  }
  res.cycle_values.push_back(res.fx);
  if (n == 0) {
    res.converged = true;
    return res;
  }

  const double line_tol = opts.tol / 10.0;
  auto identity = [&] {
    std::vector<std::vector<double>> dirs(n, std::vector<double>(n, 0.0));
    for (std::size_t i = 0; i < n; ++i) dirs[i][i] = opts.initial_step;
    return dirs;
  };
  std::vector<std::vector<double>> dirs = identity();
  std::vector<double> cycle_start;
  std::vector<double> extrap(n);
  std::vector<double> shift(n);

  for (int iter = 1; iter <= opts.max_iter; ++iter) {
    res.iterations = iter;
    cycle_start = res.x;
    const double f_start = res.fx;
    std::size_t biggest = 0;
    double biggest_drop = 0.0;

    for (std::size_t i = 0; i < n; ++i) {
      if (is_zero(dirs[i])) continue;
      const double before = res.fx;
      const double t = line_minimize(eval, res.x, res.fx, dirs[i], 1.0, line_tol);
      if (t != 0.0) {
        for (double& e : dirs[i]) e *= t;
      }
      if (before - res.fx > biggest_drop) {
        biggest_drop = before - res.fx;
        biggest = i;
      }
    }
    res.cycle_values.push_back(res.fx);

    if (2.0 * (f_start - res.fx) <=
        opts.tol * (std::abs(f_start) + std::abs(res.fx)) + kTiny) {
      res.converged = true;
      break;
    }

    for (std::size_t i = 0; i < n; ++i) {
      extrap[i] = 2.0 * res.x[i] - cycle_start[i];
      shift[i] = res.x[i] - cycle_start[i];
    }

    if (static_cast<std::size_t>(iter) % n == 0) {
      dirs = identity();
      continue;
    }

    const double f_extrap = eval(extrap);
    if (f_extrap < f_start) {
      const double a = f_start - res.fx - biggest_drop;
      const double b = f_start - f_extrap;
      const double t = 2.0 * (f_start - 2.0 * res.fx + f_extrap) * a * a -
                       biggest_drop * b * b;
      if (t < 0.0 && !is_zero(shift)) {
        const double step =
            line_minimize(eval, res.x, res.fx, shift, 1.0, line_tol);
        if (step != 0.0) {
          for (double& e : shift) e *= step;
        }
        dirs[biggest] = dirs[n - 1];
        dirs[n - 1] = shift;
        // The extra line search can lower f further; keep the cycle record
        // aligned with the point we continue from.
        res.cycle_values.back() = res.fx;
      }
    }
  }
  res.evaluations = eval.count();
  return res;
}

}  // namespace popda
