#include "sppqm/quadrature.hpp"

#include <algorithm>
#include <boost/math/quadrature/gauss.hpp>
#include <boost/math/quadrature/gauss_kronrod.hpp>
#include <cmath>
#include <limits>
#include <queue>
#include <sstream>

#include "sppqm/errors.hpp"

namespace sppqm {

namespace {

using cplx = std::complex<double>;

struct Panel {
  double a;
  double b;
  cplx value;
  double error;
  double l1;
  bool operator<(const Panel& o) const { return error < o.error; }
};

// One Gauss-Kronrod 7/15 evaluation on [a, b]. The node tables come from
// Boost; the error estimate is the Kronrod-Gauss difference on the panel's
// own scale.
Panel evaluate(const std::function<cplx(double)>& f, double a, double b) {
  using kronrod = boost::math::quadrature::gauss_kronrod<double, 15>;
  using gauss = boost::math::quadrature::gauss<double, 7>;
  const auto& xk = kronrod::abscissa();
  const auto& wk = kronrod::weights();
  const auto& wg = gauss::weights();

  const double mid = 0.5 * (a + b);
  const double half = 0.5 * (b - a);
  // Kronrod nodes: xk[0] = 0, odd indices are Kronrod-only, even are shared
  // with the 7-point Gauss rule (gauss weights indexed by i / 2).
  const cplx f0 = f(mid);
  cplx k = f0 * wk[0];
  cplx g = f0 * wg[0];
  double l1 = std::abs(f0) * wk[0];
  for (std::size_t i = 1; i < xk.size(); ++i) {
    const cplx fp = f(mid + half * xk[i]);
    const cplx fm = f(mid - half * xk[i]);
    k += (fp + fm) * wk[i];
    l1 += (std::abs(fp) + std::abs(fm)) * wk[i];
    if (i % 2 == 0) g += (fp + fm) * wg[i / 2];
  }
  const double scale = std::abs(half);
  Panel p{a, b, k * half, std::abs(k - g) * scale, l1 * scale};
  p.error = std::max(p.error, 50.0 * std::numeric_limits<double>::epsilon() * p.l1);
  return p;
}

}  // namespace

QuadratureResult integrate_complex(const std::function<cplx(double)>& f, double a, double b,
                                   const std::vector<double>& breakpoints, double rel_tol,
                                   const char* context, std::size_t max_panels) {
  if (a == b) return {{0.0, 0.0}, 0.0, 0};

  std::vector<double> knots{a, b};
  for (double p : breakpoints) {
    if (p > std::min(a, b) && p < std::max(a, b)) knots.push_back(p);
  }
  std::sort(knots.begin(), knots.end());
  if (a > b) std::reverse(knots.begin(), knots.end());

  std::priority_queue<Panel> heap;
  cplx total{0.0, 0.0};
  double total_err = 0.0;
  double total_l1 = 0.0;
  for (std::size_t k = 0; k + 1 < knots.size(); ++k) {
    if (knots[k] == knots[k + 1]) continue;
    Panel p = evaluate(f, knots[k], knots[k + 1]);
    total += p.value;
    total_err += p.error;
    total_l1 += p.l1;
    heap.push(p);
  }

  auto converged = [&] {
    return total_err <= std::max(rel_tol * std::abs(total), 1e-15 * total_l1);
  };

  while (!converged() && heap.size() < max_panels) {
    const Panel worst = heap.top();
    heap.pop();
    const double mid = 0.5 * (worst.a + worst.b);
    if (mid == worst.a || mid == worst.b) {
      heap.push(worst);
      break;  // cannot bisect further in double precision
    }
    const Panel left = evaluate(f, worst.a, mid);
    const Panel right = evaluate(f, mid, worst.b);
    total += left.value + right.value - worst.value;
    total_err += left.error + right.error - worst.error;
    total_l1 += left.l1 + right.l1 - worst.l1;
    heap.push(left);
    heap.push(right);
  }

  // Re-sum from the panels to shed the drift of the running updates.
  total = {0.0, 0.0};
  total_err = 0.0;
  total_l1 = 0.0;
  const std::size_t panels = heap.size();
  while (!heap.empty()) {
    total += heap.top().value;
    total_err += heap.top().error;
    total_l1 += heap.top().l1;
    heap.pop();
  }

  if (!std::isfinite(total.real()) || !std::isfinite(total.imag())) {
    std::ostringstream msg;
    msg << context << ": integrand produced a non-finite value on [" << a << ", " << b << "]";
    throw NumericError(msg.str());
  }
  if (!converged()) {
    std::ostringstream msg;
    msg << context << ": quadrature did not converge (error estimate " << total_err << ", |I| "
        << std::abs(total) << ", " << panels << " panels)";
    throw NumericError(msg.str());
  }
  return {total, total_err, panels};
}

}  // namespace sppqm
