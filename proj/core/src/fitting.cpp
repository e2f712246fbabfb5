#include "ctspin/fitting.hpp"

#include <Eigen/Dense>
#include <algorithm>
#include <cmath>
#include <complex>
#include <limits>
#include <numbers>
#include <sstream>

#include "ctspin/errors.hpp"

namespace ctspin::fitting {

namespace {

struct Window {
  std::vector<double> t;
  std::vector<double> y;
};

Window make_window(const std::vector<double>& two_tau,
                   const std::vector<double>& values,
                   std::optional<double> fit_max) {
  if (two_tau.size() != values.size())
    throw ConfigError("time and value arrays differ in length");
  Window w;
  for (std::size_t i = 0; i < two_tau.size(); ++i) {
    if (fit_max && two_tau[i] > *fit_max) continue;
    w.t.push_back(two_tau[i]);
    w.y.push_back(values[i]);
  }
  return w;
}

double stretched_model(double t, double t2, double beta) {
  if (t <= 0.0) return 1.0;
  return std::exp(-std::pow(t / t2, beta));
}

double stretched_sse(const Window& w, double t2, double beta) {
  double sse = 0.0;
  for (std::size_t i = 0; i < w.t.size(); ++i) {
    const double r = stretched_model(w.t[i], t2, beta) - w.y[i];
    sse += r * r;
  }
  return sse;
}

// LM step in (log T2, beta).  Returns false when the normal equations
// cannot improve the fit further.
struct LmState {
  double lt2, beta, sse;
  int iterations = 0;
  bool converged = false;
};

LmState refine_stretched(const Window& w, double t2_0, double beta_0) {
  LmState s{std::log(t2_0), beta_0, 0.0};
  s.sse = stretched_sse(w, t2_0, beta_0);
  double lambda = 1e-3;

  for (int iter = 0; iter < 200; ++iter) {
    s.iterations = iter + 1;
    const double t2 = std::exp(s.lt2);
    Eigen::Matrix2d a = Eigen::Matrix2d::Zero();
    Eigen::Vector2d g = Eigen::Vector2d::Zero();
    for (std::size_t i = 0; i < w.t.size(); ++i) {
      const double t = w.t[i];
      double m = 1.0, d_lt2 = 0.0, d_beta = 0.0;
      if (t > 0.0) {
        const double u = t / t2;
        const double ub = std::pow(u, s.beta);
        m = std::exp(-ub);
        d_lt2 = m * s.beta * ub;
        d_beta = -m * ub * std::log(u);
      }
      const double r = m - w.y[i];
      a(0, 0) += d_lt2 * d_lt2;
      a(0, 1) += d_lt2 * d_beta;
      a(1, 1) += d_beta * d_beta;
      g[0] += d_lt2 * r;
      g[1] += d_beta * r;
    }
    a(1, 0) = a(0, 1);

    bool stepped = false;
    for (int attempt = 0; attempt < 24; ++attempt) {
      Eigen::Matrix2d damped = a;
      damped(0, 0) += lambda * std::max(a(0, 0), 1e-12);
      damped(1, 1) += lambda * std::max(a(1, 1), 1e-12);
      const Eigen::Vector2d delta = damped.ldlt().solve(-g);
      if (!delta.allFinite()) {
        lambda *= 4.0;
        continue;
      }
      const double lt2_new = s.lt2 + delta[0];
      const double beta_new =
          std::clamp(s.beta + delta[1], beta_min, beta_max);
      const double sse_new = stretched_sse(w, std::exp(lt2_new), beta_new);
      if (sse_new <= s.sse) {
        const double rel = std::max(std::abs(delta[0]) /
                                        std::max(1.0, std::abs(s.lt2)),
                                    std::abs(beta_new - s.beta) /
                                        std::max(1.0, std::abs(s.beta)));
        s.lt2 = lt2_new;
        s.beta = beta_new;
        s.sse = sse_new;
        lambda = std::max(lambda / 3.0, 1e-12);
        stepped = true;
        if (rel < 1e-8) s.converged = true;
        break;
      }
      lambda *= 4.0;
    }
    if (!stepped) {
      // local minimum to the precision of the damping schedule
      s.converged = true;
      break;
    }
    if (s.converged) break;
  }
  return s;
}

}  // namespace

FitResult fit_stretched_exponential(const std::vector<double>& two_tau,
                                    const std::vector<double>& values,
                                    std::optional<double> fit_max_2tau) {
  const Window w = make_window(two_tau, values, fit_max_2tau);
  if (w.t.size() < 10)
    throw ConfigError("stretched-exponential fit needs at least 10 points");

  const double y_min = *std::min_element(w.y.begin(), w.y.end());
  const double t_max = *std::max_element(w.t.begin(), w.t.end());
  if (y_min > 0.95) {
    std::ostringstream os;
    os << "no decay within the fit window: L stays above 0.95, so T2 > "
       << t_max << " us";
    throw EngineError(os.str());
  }
  if (!(t_max > 0.0))
    throw ConfigError("fit window contains no positive times");

  FitResult best;
  best.sse = std::numeric_limits<double>::infinity();
  for (double scale : {1e-3, 1e-2, 1e-1, 1.0, 10.0}) {
    for (double beta_0 : {0.3, 0.975, 1.65, 2.325, 3.0}) {
      const LmState s = refine_stretched(w, scale * t_max, beta_0);
      if (s.sse < best.sse) {
        best.t2 = std::exp(s.lt2);
        best.beta = s.beta;
        best.sse = s.sse;
        best.converged = s.converged;
        best.iterations = s.iterations;
      }
    }
  }
  return best;
}

CosineFit fit_cosine_offset(const std::vector<double>& two_tau,
                            const std::vector<double>& values) {
  const Window w = make_window(two_tau, values, std::nullopt);
  const std::size_t n = w.t.size();
  if (n < 8) throw ConfigError("cosine fit needs at least 8 points");

  double mean = 0.0;
  for (double y : w.y) mean += y;
  mean /= static_cast<double>(n);

  // Spectrum of the mean-subtracted signal on the actual time grid.
  const double span = w.t.back() - w.t.front();
  if (!(span > 0.0)) throw ConfigError("cosine fit needs a spanning grid");
  double best_mag = 0.0, omega0 = 0.0;
  for (std::size_t k = 1; k <= n / 2; ++k) {
    const double omega =
        2.0 * std::numbers::pi * static_cast<double>(k) / span;
    std::complex<double> acc{0.0, 0.0};
    for (std::size_t i = 0; i < n; ++i)
      acc += (w.y[i] - mean) *
             std::exp(std::complex<double>(0.0, -omega * w.t[i]));
    const double mag = 2.0 * std::abs(acc) / static_cast<double>(n);
    if (mag > best_mag) {
      best_mag = mag;
      omega0 = omega;
    }
  }
  if (best_mag < 1e-6)
    throw EngineError(
        "flat signal: no spectral peak above the noise floor to seed a "
        "cosine fit");

  double a = best_mag, omega = omega0, b = mean;
  auto sse_of = [&](double aa, double ww, double bb) {
    double sse = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
      const double r = aa * std::cos(ww * w.t[i]) + bb - w.y[i];
      sse += r * r;
    }
    return sse;
  };
  double sse = sse_of(a, omega, b);
  double lambda = 1e-3;
  CosineFit fit;

  for (int iter = 0; iter < 200; ++iter) {
    fit.iterations = iter + 1;
    Eigen::Matrix3d m = Eigen::Matrix3d::Zero();
    Eigen::Vector3d g = Eigen::Vector3d::Zero();
    for (std::size_t i = 0; i < n; ++i) {
      const double c = std::cos(omega * w.t[i]);
      const double s = std::sin(omega * w.t[i]);
      const Eigen::Vector3d jrow(c, -a * w.t[i] * s, 1.0);
      const double r = a * c + b - w.y[i];
      m += jrow * jrow.transpose();
      g += jrow * r;
    }

    bool stepped = false;
    for (int attempt = 0; attempt < 24; ++attempt) {
      Eigen::Matrix3d damped = m;
      for (int d = 0; d < 3; ++d)
        damped(d, d) += lambda * std::max(m(d, d), 1e-12);
      const Eigen::Vector3d delta = damped.ldlt().solve(-g);
      if (!delta.allFinite()) {
        lambda *= 4.0;
        continue;
      }
      const double a_new = a + delta[0];
      const double omega_new = omega + delta[1];
      const double b_new = b + delta[2];
      // amplitude and frequency stay in their physical half-spaces
      if (a_new < 0.0 || omega_new <= 0.0) {
        lambda *= 4.0;
        continue;
      }
      const double sse_new = sse_of(a_new, omega_new, b_new);
      if (sse_new <= sse) {
        const double rel = delta.cwiseAbs().maxCoeff() /
                           std::max({1.0, std::abs(a), std::abs(omega)});
        a = a_new;
        omega = omega_new;
        b = b_new;
        sse = sse_new;
        lambda = std::max(lambda / 3.0, 1e-12);
        stepped = true;
        if (rel < 1e-8) fit.converged = true;
        break;
      }
      lambda *= 4.0;
    }
    if (!stepped) {
      fit.converged = true;
      break;
    }
    if (fit.converged) break;
  }

  fit.amplitude = a;
  fit.omega = omega;
  fit.offset = b;
  fit.sse = sse;
  return fit;
}

LinearFit fit_linear(const std::vector<double>& x,
                     const std::vector<double>& y) {
  if (x.size() != y.size() || x.size() < 2)
    throw ConfigError("linear fit needs at least 2 matched points");
  const auto n = static_cast<double>(x.size());
  double sx = 0.0, sy = 0.0, sxx = 0.0, sxy = 0.0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    sx += x[i];
    sy += y[i];
    sxx += x[i] * x[i];
    sxy += x[i] * y[i];
  }
  const double denom = n * sxx - sx * sx;
  if (denom == 0.0) throw ConfigError("linear fit is degenerate");

  LinearFit fit;
  fit.slope = (n * sxy - sx * sy) / denom;
  fit.intercept = (sy - fit.slope * sx) / n;

  double ss_res = 0.0, ss_tot = 0.0;
  const double ybar = sy / n;
  for (std::size_t i = 0; i < x.size(); ++i) {
    const double r = y[i] - (fit.slope * x[i] + fit.intercept);
    ss_res += r * r;
    ss_tot += (y[i] - ybar) * (y[i] - ybar);
  }
  fit.r2 = ss_tot == 0.0 ? 1.0 : 1.0 - ss_res / ss_tot;
  return fit;
}

}  // namespace ctspin::fitting
