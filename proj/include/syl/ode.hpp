#ifndef SYL_ODE_HPP
#define SYL_ODE_HPP

#include <array>
#include <cmath>
#include <functional>
#include <stdexcept>

// Embedded Dormand-Prince 5(4) integrator for small fixed-size systems.
// Step control on the embedded error estimate; callers can attach sign-change
// events (resolved by in-step bisection) and a per-step observer.

namespace syl {

template <int N>
struct OdeState {
  double t = 0.0;
  std::array<double, N> y{};
};

struct OdeOptions {
  double abs_tol = 1e-10;
  double rel_tol = 1e-10;
  double h_init = 1e-3;
  double h_min = 1e-14;
  double h_max = 0.1;
  long max_steps = 2000000;
};

enum class OdeStop { ReachedEnd, Event, StepUnderflow, MaxSteps };

template <int N>
class DormandPrince {
 public:
  using Rhs = std::function<std::array<double, N>(double, const std::array<double, N>&)>;
  using Event = std::function<double(double, const std::array<double, N>&)>;

  explicit DormandPrince(Rhs rhs) : rhs_(std::move(rhs)) {}

  void add_event(Event e) { events_.push_back(std::move(e)); }

  // Integrates from state.t to t_end (t_end > t). On an event sign change the
  // crossing is bisected to ~1e-13 relative in t; `event_index` reports which
  // event fired. The observer, when set, sees every accepted step.
  OdeStop integrate(OdeState<N>& state, double t_end, const OdeOptions& opt,
                    int* event_index = nullptr,
                    const std::function<void(const OdeState<N>&)>& observer = nullptr) {
    double h = std::min(opt.h_init, opt.h_max);
    std::array<double, N> y = state.y;
    double t = state.t;
    std::vector<double> ev_prev(events_.size());
    for (size_t i = 0; i < events_.size(); ++i) ev_prev[i] = events_[i](t, y);

    for (long step = 0; step < opt.max_steps; ++step) {
      if (t >= t_end) {
        state.t = t;
        state.y = y;
        return OdeStop::ReachedEnd;
      }
      h = std::min(h, t_end - t);
      std::array<double, N> y_new;
      double err;
      if (!try_step(t, y, h, y_new, err)) {
        // NaN in the step; shrink
        h *= 0.25;
        if (h < opt.h_min) {
          state.t = t;
          state.y = y;
          return OdeStop::StepUnderflow;
        }
        continue;
      }
      double tol = opt.abs_tol + opt.rel_tol * norm_inf(y);
      if (err <= tol) {
        double t_new = t + h;
        // event check on the accepted interval
        for (size_t i = 0; i < events_.size(); ++i) {
          double e_new = events_[i](t_new, y_new);
          if (ev_prev[i] != 0.0 && e_new != 0.0 && std::signbit(e_new) != std::signbit(ev_prev[i])) {
            // bisect [t, t_new] by re-integration from (t, y)
            double lo = 0.0, hi = h;
            std::array<double, N> y_lo = y, y_hi = y_new;
            for (int it = 0; it < 60 && (hi - lo) > 1e-13 * std::max(1.0, std::abs(t_new)); ++it) {
              double mid = 0.5 * (lo + hi);
              std::array<double, N> y_mid;
              double e2;
              sub_integrate(t, y, mid, y_mid);
              double em = events_[i](t + mid, y_mid);
              (void)e2;
              if (em == 0.0 || std::signbit(em) != std::signbit(ev_prev[i])) {
                hi = mid;
                y_hi = y_mid;
              } else {
                lo = mid;
                y_lo = y_mid;
              }
            }
            state.t = t + hi;
            state.y = y_hi;
            if (event_index) *event_index = static_cast<int>(i);
            return OdeStop::Event;
          }
          ev_prev[i] = e_new;
        }
        t = t_new;
        y = y_new;
        if (observer) {
          OdeState<N> s;
          s.t = t;
          s.y = y;
          observer(s);
        }
      }
      // PI-free classic step update
      double fac = err > 0.0 ? 0.9 * std::pow(tol / err, 0.2) : 5.0;
      fac = std::min(5.0, std::max(0.2, fac));
      h *= fac;
      h = std::min(h, opt.h_max);
      if (h < opt.h_min) {
        state.t = t;
        state.y = y;
        return OdeStop::StepUnderflow;
      }
    }
    state.t = t;
    state.y = y;
    return OdeStop::MaxSteps;
  }

 private:
  Rhs rhs_;
  std::vector<Event> events_;

  static double norm_inf(const std::array<double, N>& y) {
    double m = 0.0;
    for (double v : y) m = std::max(m, std::abs(v));
    return m;
  }

  // single RK45 step; returns false on non-finite values
  bool try_step(double t, const std::array<double, N>& y, double h, std::array<double, N>& y5,
                double& err) const {
    static constexpr double c2 = 1.0 / 5, c3 = 3.0 / 10, c4 = 4.0 / 5, c5 = 8.0 / 9;
    static constexpr double a21 = 1.0 / 5;
    static constexpr double a31 = 3.0 / 40, a32 = 9.0 / 40;
    static constexpr double a41 = 44.0 / 45, a42 = -56.0 / 15, a43 = 32.0 / 9;
    static constexpr double a51 = 19372.0 / 6561, a52 = -25360.0 / 2187, a53 = 64448.0 / 6561,
                            a54 = -212.0 / 729;
    static constexpr double a61 = 9017.0 / 3168, a62 = -355.0 / 33, a63 = 46732.0 / 5247,
                            a64 = 49.0 / 176, a65 = -5103.0 / 18656;
    static constexpr double b1 = 35.0 / 384, b3 = 500.0 / 1113, b4 = 125.0 / 192,
                            b5 = -2187.0 / 6784, b6 = 11.0 / 84;
    static constexpr double e1 = 71.0 / 57600, e3 = -71.0 / 16695, e4 = 71.0 / 1920,
                            e5 = -17253.0 / 339200, e6 = 22.0 / 525, e7 = -1.0 / 40;

    auto axpy = [](const std::array<double, N>& base, std::initializer_list<std::pair<double, const std::array<double, N>*>> terms,
                   double h) {
      std::array<double, N> r = base;
      for (auto& [c, k] : terms)
        for (int i = 0; i < N; ++i) r[i] += h * c * (*k)[i];
      return r;
    };

    auto k1 = rhs_(t, y);
    auto k2 = rhs_(t + c2 * h, axpy(y, {{a21, &k1}}, h));
    auto k3 = rhs_(t + c3 * h, axpy(y, {{a31, &k1}, {a32, &k2}}, h));
    auto k4 = rhs_(t + c4 * h, axpy(y, {{a41, &k1}, {a42, &k2}, {a43, &k3}}, h));
    auto k5 = rhs_(t + c5 * h, axpy(y, {{a51, &k1}, {a52, &k2}, {a53, &k3}, {a54, &k4}}, h));
    auto k6 = rhs_(t + h, axpy(y, {{a61, &k1}, {a62, &k2}, {a63, &k3}, {a64, &k4}, {a65, &k5}}, h));
    y5 = axpy(y, {{b1, &k1}, {b3, &k3}, {b4, &k4}, {b5, &k5}, {b6, &k6}}, h);
    auto k7 = rhs_(t + h, y5);

    err = 0.0;
    for (int i = 0; i < N; ++i) {
      double e = h * (e1 * k1[i] + e3 * k3[i] + e4 * k4[i] + e5 * k5[i] + e6 * k6[i] + e7 * k7[i]);
      if (!std::isfinite(e) || !std::isfinite(y5[i])) return false;
      err = std::max(err, std::abs(e));
    }
    return true;
  }

  // integrate over [t, t+dt] with error-controlled internal steps (for event bisection)
  void sub_integrate(double t, std::array<double, N> y, double dt, std::array<double, N>& out) const {
    double h = dt / 8.0;
    double tau = 0.0;
    while (tau < dt) {
      h = std::min(h, dt - tau);
      std::array<double, N> y2;
      double err;
      if (!try_step(t + tau, y, h, y2, err)) {
        h *= 0.5;
        if (h < 1e-15 * dt) break;
        continue;
      }
      if (err <= 1e-12 + 1e-12 * norm_inf(y)) {
        tau += h;
        y = y2;
        h *= 1.5;
      } else {
        h *= 0.5;
      }
    }
    out = y;
  }
};

}  // namespace syl

#endif
