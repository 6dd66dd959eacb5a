#include "risfso/specfun.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <optional>

namespace risfso::specfun {

namespace {

constexpr double kNegInf = -std::numeric_limits<double>::infinity();

bool near_nonpositive_integer(double x, double tol = 1e-9) {
  return x < tol && std::abs(x - std::round(x)) < tol;
}

bool near_integer(double x, double tol = 1e-9) {
  return std::abs(x - std::round(x)) < tol;
}

// Result of one expansion strategy: value with an honest error estimate.
struct CoreResult {
  bool ok = false;
  double value = 0.0;
  double abs_err = std::numeric_limits<double>::infinity();
  std::string why;
};

double sign_of_gamma(double x) {
  if (x > 0.0) return 1.0;
  long long f = static_cast<long long>(std::floor(x));
  return (f % 2 != 0) ? -1.0 : 1.0;
}

// Cohen-Rodriguez Villegas-Zagier acceleration for sum_k (-1)^k c_k, c_k > 0.
double cvz_alternating(const std::vector<double>& c) {
  const int n = static_cast<int>(c.size());
  double d = std::pow(3.0 + std::sqrt(8.0), n);
  d = 0.5 * (d + 1.0 / d);
  double b = -1.0, cc = -d, s = 0.0;
  for (int k = 0; k < n; ++k) {
    cc = b - cc;
    s += cc * c[k];
    b = (k + n) * (k - n) * b / ((k + 0.5) * (k + 1.0));
  }
  return s / d;
}

// One left-pole family of the Slater expansion, summed in scaled log space.
// In asymptotic mode the (possibly divergent) series is truncated at its
// smallest term and that term enters the error estimate.
struct FamilySum {
  bool ok = false;
  double scale_log = 0.0;  // family value = sum * e^scale_log
  double sum = 0.0;
  double peak = 0.0;       // largest |term| (same scaling)
  double err = 0.0;        // truncation error (same scaling)
  std::string why;
};

struct TermEval {
  bool zero = false;
  bool bad = false;  // numerator pole: collision that should have been perturbed
  double lg = 0.0;
  double sg = 1.0;
};

TermEval slater_term(const MeijerGSpec& sp, int h, int k, double lz) {
  TermEval t;
  const double bh = sp.b[h];
  t.lg = (bh + k) * lz - std::lgamma(static_cast<double>(k) + 1.0);
  t.sg = (k % 2 == 0) ? 1.0 : -1.0;
  for (int j = 0; j < sp.m; ++j) {
    if (j == h) continue;
    double x = sp.b[j] - bh - k;
    if (near_nonpositive_integer(x)) { t.bad = true; return t; }
    t.lg += std::lgamma(x);
    t.sg *= sign_of_gamma(x);
  }
  for (int i = 0; i < sp.n; ++i) {
    double x = 1.0 - sp.a[i] + bh + k;
    if (near_nonpositive_integer(x)) { t.bad = true; return t; }
    t.lg += std::lgamma(x);
    t.sg *= sign_of_gamma(x);
  }
  for (int j = sp.m; j < sp.q(); ++j) {
    double x = 1.0 - sp.b[j] + bh + k;
    if (near_nonpositive_integer(x)) { t.zero = true; return t; }
    t.lg -= std::lgamma(x);
    t.sg *= sign_of_gamma(x);
  }
  for (int i = sp.n; i < sp.p(); ++i) {
    double x = sp.a[i] - bh - k;
    if (near_nonpositive_integer(x)) { t.zero = true; return t; }
    t.lg -= std::lgamma(x);
    t.sg *= sign_of_gamma(x);
  }
  return t;
}

FamilySum sum_family(const MeijerGSpec& sp, int h, double z, bool asymptotic,
                     int k_max) {
  FamilySum fs;
  const double lz = std::log(z);
  const bool balanced = (sp.p() == sp.q());
  bool have_scale = false;
  int consec_small = 0, consec_zero = 0;
  double prev_abs = 0.0;
  bool have_prev = false;
  // Ring buffers for slow-tail detection.
  std::vector<double> recent_ratio;
  std::vector<double> recent_sign;
  for (int k = 0; k <= k_max; ++k) {
    TermEval te = slater_term(sp, h, k, lz);
    if (te.bad) { fs.why = "unresolved pole collision"; return fs; }
    if (te.zero) {
      if (++consec_zero >= 50) { fs.ok = true; return fs; }  // terminated
      continue;
    }
    consec_zero = 0;
    if (!have_scale) { fs.scale_log = te.lg; have_scale = true; }
    if (te.lg > fs.scale_log + 300.0) {
      double f = std::exp(fs.scale_log - te.lg);
      fs.sum *= f; fs.peak *= f; fs.err *= f;
      prev_abs *= f;
      fs.scale_log = te.lg;
    }
    double t = te.sg * std::exp(te.lg - fs.scale_log);
    double at = std::abs(t);
    if (asymptotic && have_prev && at > prev_abs) {
      fs.err += at;  // first omitted term of the asymptotic series
      fs.ok = true;
      return fs;
    }
    fs.sum += t;
    fs.peak = std::max(fs.peak, at);
    if (at < 1e-17 * fs.peak) {
      if (++consec_small >= 3 && k >= 8) { fs.ok = true; return fs; }
    } else {
      consec_small = 0;
    }
    if (balanced && !asymptotic && have_prev && prev_abs > 0.0) {
      double r = at / prev_abs;
      recent_ratio.push_back(r);
      recent_sign.push_back(t > 0 ? 1.0 : -1.0);
      if (recent_ratio.size() > 10) {
        recent_ratio.erase(recent_ratio.begin());
        recent_sign.erase(recent_sign.begin());
      }
      if (k >= 40 && recent_ratio.size() == 10) {
        bool slow = std::all_of(recent_ratio.begin(), recent_ratio.end(),
                                [](double x) { return x > 0.90 && x < 1.001; });
        if (slow) {
          bool alt = true;
          for (size_t i = 1; i < recent_sign.size(); ++i)
            if (recent_sign[i] == recent_sign[i - 1]) { alt = false; break; }
          if (alt) {
            // Accelerate the alternating tail with CVZ.
            const int n_cvz = 64;
            std::vector<double> c;
            c.reserve(n_cvz);
            double first_sign = 0.0;
            int kk = k + 1;
            while (static_cast<int>(c.size()) < n_cvz && kk <= k_max + n_cvz + 8) {
              TermEval u = slater_term(sp, h, kk, lz);
              ++kk;
              if (u.bad) { fs.why = "unresolved pole collision"; return fs; }
              if (u.zero) { fs.why = "zero inside alternating tail"; return fs; }
              double v = u.sg * std::exp(u.lg - fs.scale_log);
              if (c.empty()) first_sign = (v > 0 ? 1.0 : -1.0);
              c.push_back(std::abs(v));
            }
            double tail = first_sign * cvz_alternating(c);
            fs.sum += tail;
            fs.err += std::abs(tail) * 1e-13 + c.front() * 1e-14;
            fs.ok = true;
            return fs;
          }
          // Same-sign slow decay: geometric tail bound if clearly < 1.
          double rmax = *std::max_element(recent_ratio.begin(),
                                          recent_ratio.end());
          if (rmax < 0.995) {
            // keep summing; the loop will reach the 1e-17 floor eventually
          } else {
            fs.why = "non-alternating series with ratio ~ 1 (divergent or "
                     "conditionally non-summable)";
            return fs;
          }
        }
      }
    }
    prev_abs = at;
    have_prev = true;
  }
  if (asymptotic) {  // ran out of budget while still decreasing
    fs.err += prev_abs;
    fs.ok = true;
    return fs;
  }
  fs.why = "series did not converge within term budget";
  return fs;
}

MeijerGSpec swapped(const MeijerGSpec& sp) {
  MeijerGSpec sw;
  sw.m = sp.n;
  sw.n = sp.m;
  sw.a.reserve(sp.q());
  for (double x : sp.b) sw.a.push_back(1.0 - x);
  sw.b.reserve(sp.p());
  for (double x : sp.a) sw.b.push_back(1.0 - x);
  return sw;
}

// Combine per-family results into a plain double with error estimate.
CoreResult combine_families(const std::vector<FamilySum>& fams) {
  CoreResult r;
  double lmax = kNegInf;
  for (const auto& f : fams)
    if (f.sum != 0.0 || f.peak != 0.0)
      lmax = std::max(lmax, f.scale_log);
  if (lmax == kNegInf) {  // all families empty/terminated at zero
    r.ok = true;
    r.value = 0.0;
    r.abs_err = 0.0;
    return r;
  }
  double val = 0.0, err = 0.0, peak = 0.0;
  for (const auto& f : fams) {
    double s = std::exp(f.scale_log - lmax);
    val += f.sum * s;
    err += f.err * s;
    peak = std::max(peak, f.peak * s);
  }
  double scale = std::exp(lmax);
  if (!std::isfinite(scale)) {
    // Represent huge results via log arithmetic; overflow only if the final
    // value itself overflows.
    double lv = lmax + std::log(std::abs(val) + 1e-300);
    if (lv > 709.0) { r.why = "result overflows double"; return r; }
    scale = std::exp(lmax - 600.0);
    val *= scale * std::exp(600.0);
    err = err * scale * std::exp(600.0) + peak * scale * std::exp(600.0) * 1e-15;
    r.ok = true;
    r.value = val;
    r.abs_err = err;
    return r;
  }
  r.ok = true;
  r.value = val * scale;
  r.abs_err = (err + peak * 1e-15) * scale;
  return r;
}

CoreResult slater_left(const MeijerGSpec& sp, double z, int k_max) {
  if (sp.m == 0) {
    CoreResult r;
    r.why = "no left poles";
    return r;
  }
  std::vector<FamilySum> fams;
  fams.reserve(sp.m);
  for (int h = 0; h < sp.m; ++h) {
    FamilySum f = sum_family(sp, h, z, /*asymptotic=*/false, k_max);
    if (!f.ok) {
      CoreResult r;
      r.why = "family " + std::to_string(h) + ": " + f.why;
      return r;
    }
    fams.push_back(std::move(f));
  }
  return combine_families(fams);
}

// Large-z expansion: left machinery on the swapped spec at 1/z with optimal
// truncation (the swapped series has p' > q' and is asymptotic).
CoreResult slater_right_asymptotic(const MeijerGSpec& sp, double z) {
  MeijerGSpec sw = swapped(sp);
  if (sw.m == 0) {
    CoreResult r;
    r.why = "no right poles";
    return r;
  }
  std::vector<FamilySum> fams;
  fams.reserve(sw.m);
  for (int h = 0; h < sw.m; ++h) {
    FamilySum f = sum_family(sw, h, 1.0 / z, /*asymptotic=*/true, 400);
    if (!f.ok) {
      CoreResult r;
      r.why = "asymptotic family " + std::to_string(h) + ": " + f.why;
      return r;
    }
    fams.push_back(std::move(f));
  }
  CoreResult r = combine_families(fams);
  if (r.ok) {
    // The algebraic expansion omits the exponential-type remnant
    // ~ z^theta exp(sigma z^{1/sigma} cos(pi/sigma)). For sigma >= 3 that
    // decays exponentially, but for sigma = 2 it only oscillates with
    // algebraic decay, so it must enter the error estimate or a truncated
    // constant gets accepted as exact.
    const double sigma = sp.q() - sp.p();
    double sb = 0.0, sa = 0.0;
    for (double x : sp.b) sb += x;
    for (double x : sp.a) sa += x;
    const double theta = (sb - sa + 0.5 * (sp.p() - sp.q() + 1.0)) / sigma;
    const double la = 0.5 * (sigma - 1.0) * std::log(2.0 * std::numbers::pi) -
                      0.5 * std::log(sigma);
    double lrem = la + theta * std::log(z) +
                  sigma * std::pow(z, 1.0 / sigma) *
                      std::cos(std::numbers::pi / sigma);
    r.abs_err += std::exp(std::min(lrem, 700.0));
  }
  return r;
}

// Leading-order exponential asymptotic for G^{q,0}_{p,q}(z), z large:
// A z^theta exp(-sigma z^{1/sigma}), sigma = q - p.
CoreResult exp_asymptotic(const MeijerGSpec& sp, double z) {
  CoreResult r;
  if (sp.n != 0 || sp.m != sp.q() || sp.p() >= sp.q()) {
    r.why = "exp asymptotic needs m = q, n = 0, p < q";
    return r;
  }
  const double sigma = sp.q() - sp.p();
  const double zr = std::pow(z, 1.0 / sigma);
  if (zr < 4.0) {
    r.why = "argument too small for exponential asymptotic";
    return r;
  }
  double sb = 0.0, sa = 0.0;
  for (double x : sp.b) sb += x;
  for (double x : sp.a) sa += x;
  const double theta = (sb - sa + 0.5 * (sp.p() - sp.q() + 1.0)) / sigma;
  const double la = 0.5 * (sigma - 1.0) * std::log(2.0 * std::numbers::pi) -
                    0.5 * std::log(sigma);
  double lv = la + theta * std::log(z) - sigma * zr;
  r.ok = true;
  r.value = std::exp(lv);
  r.abs_err = r.value * std::min(1.0, 4.0 / zr);  // leading order only
  return r;
}

// Mellin-Barnes contour quadrature on a vertical line separating pole groups.
CoreResult mellin_barnes(const MeijerGSpec& sp, double z) {
  CoreResult r;
  const double decay = 0.5 * std::numbers::pi *
                       (2.0 * (sp.m + sp.n) - sp.p() - sp.q());
  if (decay < 0.3) {
    r.why = "Mellin-Barnes contour lacks exponential decay";
    return r;
  }
  double lmax = kNegInf, rmin = std::numeric_limits<double>::infinity();
  for (int j = 0; j < sp.m; ++j) lmax = std::max(lmax, -sp.b[j]);
  for (int i = 0; i < sp.n; ++i) rmin = std::min(rmin, 1.0 - sp.a[i]);
  double sigma0;
  if (sp.m > 0 && sp.n > 0) {
    if (rmin - lmax < 1e-8) {
      r.why = "pole groups not separable by a vertical contour";
      return r;
    }
    sigma0 = 0.5 * (lmax + rmin);
  } else if (sp.m > 0) {
    sigma0 = lmax + 0.5;
    // With no right poles the contour may sit anywhere right of the b-poles;
    // park it at the large-z saddle (s ~ z^{1/(q-p)}) so the integrand peak
    // matches the result scale instead of cancelling to it.
    const int sig = sp.q() - sp.p();
    if (sig > 0) sigma0 = std::max(sigma0, std::pow(z, 1.0 / sig));
  } else if (sp.n > 0) {
    sigma0 = rmin - 0.5;
  } else {
    r.why = "no numerator gammas";
    return r;
  }
  // Nudge the abscissa off any denominator-gamma pole on the real axis.
  auto on_pole = [&](double s0) {
    for (int j = sp.m; j < sp.q(); ++j)
      if (near_nonpositive_integer(1.0 - sp.b[j] - s0, 1e-6)) return true;
    for (int i = sp.n; i < sp.p(); ++i)
      if (near_nonpositive_integer(sp.a[i] + s0, 1e-6)) return true;
    return false;
  };
  for (int tries = 0; tries < 20 && on_pole(sigma0); ++tries) sigma0 += 3e-4;

  const double lnz = std::log(z);
  auto log_phi = [&](std::complex<double> s) {
    std::complex<double> acc = -s * lnz;
    for (int j = 0; j < sp.m; ++j) acc += ln_gamma_complex(sp.b[j] + s);
    for (int i = 0; i < sp.n; ++i) acc += ln_gamma_complex(1.0 - sp.a[i] - s);
    for (int j = sp.m; j < sp.q(); ++j)
      acc -= ln_gamma_complex(1.0 - sp.b[j] - s);
    for (int i = sp.n; i < sp.p(); ++i) acc -= ln_gamma_complex(sp.a[i] + s);
    return acc;
  };
  const double lp0 = log_phi(std::complex<double>(sigma0, 1e-9)).real();
  // Truncation point: magnitude 1e-18 of the peak.
  double T = 2.0;
  for (; T < 400.0; T += 2.0) {
    double lm = log_phi(std::complex<double>(sigma0, T)).real();
    if (lm < lp0 - 42.0) break;
  }
  // 64-node Gauss-Legendre per panel; integrand scaled by e^{-lp0}.
  static const int GN = 32;  // symmetric half of a 64-point rule
  static double gx[GN], gw[GN];
  static bool init = false;
  if (!init) {
    // Newton iteration for Legendre nodes on [-1, 1].
    for (int i = 0; i < GN; ++i) {
      int k = i + 1;
      double x = std::cos(std::numbers::pi * (k - 0.25) / (2 * GN + 0.5));
      for (int it = 0; it < 100; ++it) {
        double p0 = 1.0, p1 = x;
        for (int j = 2; j <= 2 * GN; ++j) {
          double p2 = ((2.0 * j - 1.0) * x * p1 - (j - 1.0) * p0) / j;
          p0 = p1;
          p1 = p2;
        }
        double dp = 2 * GN * (x * p1 - p0) / (x * x - 1.0);
        double dx = p1 / dp;
        x -= dx;
        if (std::abs(dx) < 1e-15) {
          gw[i] = 2.0 / ((1.0 - x * x) * dp * dp);
          break;
        }
      }
      gx[i] = x;
    }
    init = true;
  }
  auto f = [&](double t) {
    std::complex<double> w = log_phi(std::complex<double>(sigma0, t));
    return std::exp(w - std::complex<double>(lp0, 0.0)).real();
  };
  auto integrate = [&](int panels) {
    double total = 0.0;
    double h = T / panels;
    for (int pnl = 0; pnl < panels; ++pnl) {
      double c = (pnl + 0.5) * h, hw = 0.5 * h;
      double acc = 0.0;
      for (int i = 0; i < GN; ++i)
        acc += gw[i] * (f(c + hw * gx[i]) + f(c - hw * gx[i]));
      total += acc * hw;
    }
    return total;
  };
  int panels = std::max(8, static_cast<int>(std::ceil(T / 2.0)));
  double prev = integrate(panels);
  double cur = prev, delta = std::numeric_limits<double>::infinity();
  for (int d = 0; d < 4; ++d) {
    panels *= 2;
    cur = integrate(panels);
    delta = std::abs(cur - prev);
    prev = cur;
    if (delta <= 1e-12 * std::max(std::abs(cur), 1e-6)) break;
  }
  const double scale = std::exp(lp0) / std::numbers::pi;
  r.ok = true;
  r.value = cur * scale;
  r.abs_err = delta * scale + std::exp(lp0) * T * 1e-16;
  return r;
}

// ---- collision detection / perturbation --------------------------------

std::vector<std::vector<int>> integer_groups(const std::vector<double>& v,
                                             int count) {
  std::vector<std::vector<int>> groups;
  std::vector<int> assigned(count, -1);
  for (int i = 0; i < count; ++i) {
    if (assigned[i] >= 0) continue;
    std::vector<int> g{i};
    assigned[i] = static_cast<int>(groups.size());
    for (int j = i + 1; j < count; ++j) {
      if (assigned[j] >= 0) continue;
      if (near_integer(v[i] - v[j])) {
        g.push_back(j);
        assigned[j] = assigned[i];
      }
    }
    if (g.size() > 1) groups.push_back(std::move(g));
  }
  return groups;
}

bool has_collisions(const MeijerGSpec& sp) {
  return !integer_groups(sp.b, sp.m).empty() ||
         !integer_groups(sp.a, sp.n).empty();
}

MeijerGSpec perturbed(const MeijerGSpec& sp, double eps) {
  MeijerGSpec out = sp;
  for (auto& g : integer_groups(sp.b, sp.m)) {
    std::sort(g.begin(), g.end(),
              [&](int i, int j) { return sp.b[i] < sp.b[j]; });
    for (size_t r = 1; r < g.size(); ++r)
      out.b[g[r]] += eps * static_cast<double>(r);
  }
  for (auto& g : integer_groups(sp.a, sp.n)) {
    std::sort(g.begin(), g.end(),
              [&](int i, int j) { return sp.a[i] < sp.a[j]; });
    for (size_t r = 1; r < g.size(); ++r)
      out.a[g[r]] += eps * static_cast<double>(r);
  }
  return out;
}

struct Attempt {
  CoreResult res;
  GMethod method = GMethod::slater;
};

// Evaluate an oriented (p <= q; z <= 1 when p == q), collision-free spec.
Attempt eval_core(const MeijerGSpec& sp, double z) {
  const int sigma = sp.q() - sp.p();
  std::vector<Attempt> tries;
  bool left_hopeless = false;
  if (sigma > 0) {
    double cancel_log = sigma * std::pow(z, 1.0 / sigma);
    left_hopeless = cancel_log > 90.0;
  }
  if (!left_hopeless) {
    int k_max = 1200;
    if (sigma > 0)
      k_max = std::max(k_max, static_cast<int>(
                                  4.0 * sigma * std::pow(z, 1.0 / sigma)) +
                                  300);
    Attempt a{slater_left(sp, z, std::min(k_max, 20000)), GMethod::slater};
    tries.push_back(a);
  }
  auto best_err = [&]() {
    double e = std::numeric_limits<double>::infinity();
    for (auto& t : tries)
      if (t.res.ok) e = std::min(e, t.res.abs_err);
    return e;
  };
  auto good_enough = [&](const CoreResult& c) {
    return c.ok && c.abs_err <= std::max(1e-10 * std::abs(c.value), 1e-280);
  };
  bool have_good = !tries.empty() && good_enough(tries.front().res);
  if (sigma > 0 && !have_good) {
    if (sp.n >= 1)
      tries.push_back({slater_right_asymptotic(sp, z), GMethod::slater});
    else if (sp.m == sp.q())
      tries.push_back({exp_asymptotic(sp, z), GMethod::slater});
  }
  bool any_good = std::any_of(tries.begin(), tries.end(), [&](const Attempt& t) {
    return good_enough(t.res);
  });
  if (!any_good) tries.push_back({mellin_barnes(sp, z), GMethod::mellin_barnes});

  Attempt best;
  best.res.abs_err = std::numeric_limits<double>::infinity();
  std::string whys;
  for (auto& t : tries) {
    if (t.res.ok && t.res.abs_err < best.res.abs_err) best = t;
    if (!t.res.ok && !t.res.why.empty()) whys += t.res.why + "; ";
  }
  if (!best.res.ok ||
      best.res.abs_err > std::max(1e-6 * std::abs(best.res.value), 1e-200)) {
    throw EvalFailure("meijer_g: no strategy converged (" + whys + ")");
  }
  (void)best_err;
  return best;
}

}  // namespace

void MeijerGSpec::validate() const {
  if (m < 0 || m > q() || n < 0 || n > p())
    throw std::invalid_argument(
        "MeijerGSpec: need 0 <= m <= q and 0 <= n <= p");
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < m; ++j) {
      double d = a[i] - b[j];
      if (d >= 1.0 - 1e-9 && near_integer(d))
        throw std::invalid_argument(
            "MeijerGSpec: degenerate parameters, a[" + std::to_string(i) +
            "] - b[" + std::to_string(j) +
            "] is a positive integer (no admissible contour)");
    }
}

EvalReport meijer_g(const MeijerGSpec& spec, double z, GMethod force) {
  spec.validate();
  if (!(z > 0.0)) throw std::domain_error("meijer_g: z must be > 0");
  MeijerGSpec sp = spec;
  double zz = z;
  if (sp.p() > sp.q() || (sp.p() == sp.q() && z > 1.0)) {
    sp = swapped(sp);
    zz = 1.0 / z;
  }
  if (has_collisions(sp))
    throw EvalFailure("meijer_g(forced): collision handling not supported");
  CoreResult res = force == GMethod::slater ? slater_left(sp, zz, 20000)
                                            : mellin_barnes(sp, zz);
  if (!res.ok)
    throw EvalFailure("meijer_g(forced): " +
                      (res.why.empty() ? std::string("no convergence")
                                       : res.why));
  EvalReport rep;
  rep.value = res.value;
  rep.abs_err_estimate = res.abs_err;
  rep.method = force;
  rep.perturbation_applied = false;
  return rep;
}

EvalReport meijer_g(const MeijerGSpec& spec, double z) {
  spec.validate();
  if (!(z > 0.0)) throw std::domain_error("meijer_g: z must be > 0");

  MeijerGSpec sp = spec;
  double zz = z;
  if (sp.p() > sp.q() || (sp.p() == sp.q() && z > 1.0)) {
    sp = swapped(sp);
    zz = 1.0 / z;
  }

  EvalReport rep;
  if (!has_collisions(sp)) {
    Attempt a = eval_core(sp, zz);
    rep.value = a.res.value;
    rep.abs_err_estimate = a.res.abs_err;
    rep.method = a.method;
    rep.perturbation_applied = false;
    return rep;
  }
  // Symmetric eps-perturbation: the O(eps) error term cancels in the average.
  const double eps = 1e-5;
  Attempt ap = eval_core(perturbed(sp, +eps), zz);
  Attempt am = eval_core(perturbed(sp, -eps), zz);
  rep.value = 0.5 * (ap.res.value + am.res.value);
  rep.abs_err_estimate = ap.res.abs_err + am.res.abs_err +
                         std::abs(rep.value) * 1e-16 / eps +
                         std::abs(ap.res.value - am.res.value) * eps;
  rep.method = (ap.method == GMethod::mellin_barnes ||
                am.method == GMethod::mellin_barnes)
                   ? GMethod::mellin_barnes
                   : GMethod::slater;
  rep.perturbation_applied = true;
  return rep;
}

}  // namespace risfso::specfun
