#include "risfso/quadrature.hpp"

#include <cmath>
#include <queue>
#include <vector>

namespace risfso::quadrature {

namespace {

// Gauss-Kronrod 15-point rule (7-point Gauss embedded).
constexpr double kXgk[8] = {
    0.991455371120813, 0.949107912342759, 0.864864423359769,
    0.741531185599394, 0.586087235467691, 0.405845151377397,
    0.207784955007898, 0.0};
constexpr double kWgk[8] = {
    0.022935322010529, 0.063092092629979, 0.104790010322250,
    0.140653259715525, 0.169004726639267, 0.190350578064785,
    0.204432940075298, 0.209482141084728};
constexpr double kWg[4] = {0.129484966168870, 0.279705391489277,
                           0.381830050505119, 0.417959183673469};

struct Panel {
  double a, b, value, err;
  bool operator<(const Panel& o) const { return err < o.err; }
};

Panel eval_panel(const std::function<double(double)>& f, double a, double b) {
  const double c = 0.5 * (a + b), h = 0.5 * (b - a);
  double fc = f(c);
  double resk = kWgk[7] * fc;
  double resg = kWg[3] * fc;
  for (int j = 0; j < 7; ++j) {
    double x = h * kXgk[j];
    double fsum = f(c - x) + f(c + x);
    resk += kWgk[j] * fsum;
    if (j % 2 == 1) resg += kWg[j / 2] * fsum;
  }
  Panel p;
  p.a = a;
  p.b = b;
  p.value = resk * h;
  p.err = std::abs((resk - resg) * h);
  return p;
}

}  // namespace

QuadResult integrate(const std::function<double(double)>& f, double a, double b,
                     double abs_tol, double rel_tol, int max_subdiv) {
  QuadResult r;
  if (a == b) {
    r.converged = true;
    return r;
  }
  std::priority_queue<Panel> heap;
  Panel first = eval_panel(f, a, b);
  double total = first.value, err = first.err;
  heap.push(first);
  int subdiv = 0;
  while (err > abs_tol && err > rel_tol * std::abs(total) &&
         subdiv < max_subdiv) {
    Panel worst = heap.top();
    heap.pop();
    double mid = 0.5 * (worst.a + worst.b);
    Panel l = eval_panel(f, worst.a, mid);
    Panel rr = eval_panel(f, mid, worst.b);
    total += l.value + rr.value - worst.value;
    err += l.err + rr.err - worst.err;
    heap.push(l);
    heap.push(rr);
    ++subdiv;
  }
  r.value = total;
  r.abs_err = err;
  r.converged = err <= abs_tol || err <= rel_tol * std::abs(total);
  return r;
}

}  // namespace risfso::quadrature
