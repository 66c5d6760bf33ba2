#include "dssf/quadrature.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <memory>
#include <mutex>
#include <numbers>
#include <sstream>

#include <boost/math/tools/minima.hpp>

#include "dssf/common.hpp"

namespace dssf {

namespace {

GaussRule compute_gauss_legendre(int n) {
  GaussRule r;
  r.nodes.resize(n);
  r.weights.resize(n);
  for (int i = 0; i < (n + 1) / 2; ++i) {
    double x = std::cos(std::numbers::pi * (i + 0.75) / (n + 0.5));
    double dp = 0.0;
    for (int it = 0; it < 100; ++it) {
      double p0 = 1.0, p1 = x;
      for (int k = 2; k <= n; ++k) {
        const double p2 = ((2.0 * k - 1.0) * x * p1 - (k - 1.0) * p0) / k;
        p0 = p1;
        p1 = p2;
      }
      if (n == 1) p0 = 1.0;
      dp = n * (x * p1 - p0) / (x * x - 1.0);
      const double dx = p1 / dp;
      x -= dx;
      if (std::abs(dx) < 1e-16) break;
    }
    // Recompute the derivative at the converged node.
    double p0 = 1.0, p1 = x;
    for (int k = 2; k <= n; ++k) {
      const double p2 = ((2.0 * k - 1.0) * x * p1 - (k - 1.0) * p0) / k;
      p0 = p1;
      p1 = p2;
    }
    dp = n * (x * p1 - p0) / (x * x - 1.0);
    const double w = 2.0 / ((1.0 - x * x) * dp * dp);
    r.nodes[i] = -x;
    r.nodes[n - 1 - i] = x;
    r.weights[i] = w;
    r.weights[n - 1 - i] = w;
  }
  if (n % 2 == 1) r.nodes[n / 2] = 0.0;
  return r;
}

}  // namespace

const GaussRule& gauss_legendre(int n) {
  static std::mutex mu;
  static std::map<int, std::unique_ptr<GaussRule>> cache;
  std::lock_guard<std::mutex> lock(mu);
  auto& slot = cache[n];
  if (!slot) slot = std::make_unique<GaussRule>(compute_gauss_legendre(n));
  return *slot;
}

double log_add(double a, double b) {
  if (a < b) std::swap(a, b);
  if (b == -std::numeric_limits<double>::infinity()) return a;
  return a + std::log1p(std::exp(b - a));
}

double log_sum_exp(const std::vector<double>& terms) {
  double mx = -std::numeric_limits<double>::infinity();
  for (double t : terms) mx = std::max(mx, t);
  if (!std::isfinite(mx)) return mx;
  double acc = 0.0;
  for (double t : terms) acc += std::exp(t - mx);
  return mx + std::log(acc);
}

Peak find_peak(const std::function<double(double)>& log_f, double lo, double hi, int samples) {
  Peak best;
  const double dx = (hi - lo) / samples;
  int ibest = -1;
  for (int i = 0; i <= samples; ++i) {
    const double x = lo + i * dx;
    const double v = log_f(x);
    if (v > best.value) {
      best = {x, v};
      ibest = i;
    }
  }
  if (ibest < 0) return best;
  const double a = std::max(lo, best.x - dx);
  const double b = std::min(hi, best.x + dx);
  auto neg = [&](double x) {
    const double v = log_f(x);
    return std::isfinite(v) ? -v : std::numeric_limits<double>::max();
  };
  const auto res = boost::math::tools::brent_find_minima(neg, a, b, 40);
  if (-res.second > best.value) best = {res.first, -res.second};
  return best;
}

Window peaked_window(const std::function<double(double)>& log_f, double lo, double hi,
                     double drop, int samples) {
  Window w;
  w.peak = find_peak(log_f, lo, hi, samples);
  w.a = lo;
  w.b = hi;
  if (!std::isfinite(w.peak.value)) return w;
  const double level = w.peak.value - drop;

  // Outermost coarse samples above the level, then bisect toward the crossing.
  const double dx = (hi - lo) / samples;
  double first = w.peak.x, last = w.peak.x;
  for (int i = 0; i <= samples; ++i) {
    const double x = lo + i * dx;
    if (log_f(x) > level) {
      first = std::min(first, x);
      last = std::max(last, x);
    }
  }
  auto crossing = [&](double below, double above) {
    for (int it = 0; it < 200 && std::abs(above - below) > 1e-14 * std::max(1.0, std::abs(above));
         ++it) {
      const double mid = 0.5 * (below + above);
      if (log_f(mid) > level) above = mid;
      else below = mid;
    }
    return below;
  };
  w.a = (log_f(lo) > level) ? lo : crossing(std::max(lo, first - dx), first);
  w.b = (log_f(hi) > level) ? hi : crossing(std::min(hi, last + dx), last);
  return w;
}

LogIntegral log_integrate_peaked(const std::function<double(double)>& log_f, double lo,
                                 double hi, const PeakedOptions& opt) {
  LogIntegral out;
  const Window win = peaked_window(log_f, lo, hi, opt.drop, opt.samples);
  if (!std::isfinite(win.peak.value)) {
    out.lo = lo;
    out.hi = hi;
    return out;
  }
  const double a = win.a, b = win.b;
  out.lo = a;
  out.hi = b;
  out.nodes_per_panel = opt.gauss_points;

  const GaussRule& rule = gauss_legendre(opt.gauss_points);
  auto composite = [&](int panels) {
    std::vector<double> terms;
    terms.reserve(static_cast<std::size_t>(panels) * rule.nodes.size());
    const double width = (b - a) / panels;
    for (int p = 0; p < panels; ++p) {
      const double c = a + (p + 0.5) * width;
      for (std::size_t q = 0; q < rule.nodes.size(); ++q) {
        const double v = log_f(c + 0.5 * width * rule.nodes[q]);
        if (v > -std::numeric_limits<double>::infinity())
          terms.push_back(v + std::log(0.5 * width * rule.weights[q]));
      }
    }
    return log_sum_exp(terms);
  };

  int panels = opt.initial_panels;
  double prev = composite(panels);
  for (int d = 0; d < opt.max_doublings; ++d) {
    panels *= 2;
    const double cur = composite(panels);
    out.last_change = std::abs(cur - prev);
    out.log_value = cur;
    out.panels = panels;
    // The log itself carries roundoff of a few ulps of |cur| (large for high k).
    const double floor = 64.0 * std::numeric_limits<double>::epsilon() * std::abs(cur);
    if (out.last_change <= std::max(opt.rel_tol, floor)) return out;
    prev = cur;
  }
  std::ostringstream msg;
  msg << "log_integrate_peaked: no stabilisation on [" << a << ", " << b << "] after "
      << panels << " panels x " << opt.gauss_points << " nodes; last relative change "
      << out.last_change;
  throw ConvergenceError(msg.str());
}

}  // namespace dssf
