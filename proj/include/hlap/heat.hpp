#ifndef HLAP_HEAT_HPP
#define HLAP_HEAT_HPP

#include <cmath>
#include <map>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include "hlap/catalog.hpp"
#include "hlap/dgroup.hpp"
#include "hlap/heisenberg.hpp"
#include "hlap/quadrature.hpp"

namespace hlap::heat {

enum class TraceMode { FullTrace, LowestBand };

struct HeatTraceConfig {
    std::vector<double> t_grid;       // strictly increasing
    double quad_rel_tol = 1e-10;
    double eps_tail = 1e-6;           // relative shell-tail tolerance
    int max_shells = 4096;
    TraceMode mode = TraceMode::LowestBand;

    void validate() const {
        if (!(eps_tail <= 1e-6)) throw std::invalid_argument("HeatTraceConfig: eps_tail must be <= 1e-6");
        for (std::size_t i = 1; i < t_grid.size(); ++i)
            if (!(t_grid[i] > t_grid[i - 1]))
                throw std::invalid_argument("HeatTraceConfig: t_grid must be strictly increasing");
    }

    static std::vector<double> log_grid(double t_lo, double t_hi, int points) {
        std::vector<double> out;
        for (int i = 0; i < points; ++i)
            out.push_back(t_lo * std::pow(t_hi / t_lo, double(i) / (points - 1)));
        return out;
    }
};

inline double gamma_factorial(int m) {  // Gamma(m+1)
    double out = 1.0;
    for (int i = 2; i <= m; ++i) out *= i;
    return out;
}

/// Upper integration limit: the point where t * lambda_min(k) is deep in the
/// exponential tail.
inline double k_cutoff(int n, int p, double t) {
    const double a = (p <= n) ? (n - p) : (p - n - 1);
    const double target = 760.0 / t;
    return 1.1 * (0.5 * (-a + std::sqrt(a * a + 4.0 * target))) + 1e-8;
}

/// Heat trace over the Plancherel measure for H^{2n+1}:
///   theta_p(t) = 2 int_0^inf tr_k e^{-t Delta_p(k)} k^n dk.
/// FullTrace evaluates the absolutely convergent double sum shell-first:
/// each |gamma|-shell is integrated over k (a smooth, exponentially localized
/// integrand), shells are added until their contribution falls under the
/// eps_tail policy, and the remainder is extrapolated with a rational tail
/// a/s^2 + b/s^3 + c/s^4 fitted to the last shells (shell integrals decay
/// polynomially).  LowestBand integrates the bottom band
/// C(n,p) e^{-t(k^2+(n-p)k)} only.
class HeisenbergHeatTracer {
public:
    HeisenbergHeatTracer(int n, int p, HeatTraceConfig config = {})
        : n_(n), p_orig_(p), p_(p <= n ? p : 2 * n + 1 - p), config_(std::move(config)) {
        if (n < 1) throw std::invalid_argument("HeisenbergHeatTracer: n >= 1 required");
        if (p < 0 || p > 2 * n + 1)
            throw std::invalid_argument("HeisenbergHeatTracer: p out of range");
        config_.validate();
    }

    double trace_at(double t, int shell_bonus = 0) const {
        if (!(t > 0)) throw std::invalid_argument("trace_at: t must be > 0");
        if (config_.mode == TraceMode::LowestBand) {
            AdaptiveQuadrature quad(config_.quad_rel_tol, 0.0);
            const double kmax = k_cutoff(n_, p_, t);
            const double mult = double(catalog::binomial(n_, p_));
            return quad.integrate(
                [&](double k) {
                    return 2.0 * mult * std::exp(-t * (k * k + (n_ - p_) * k)) * std::pow(k, n_);
                },
                0.0, kmax);
        }

        double total = 0.0;
        std::vector<double> s_vals, i_vals;  // trailing shells for the tail fit
        double tail3 = 0.0;
        int s = -p_;
        for (; s <= config_.max_shells; ++s) {
            const double is = shell_integral(s, t);
            total += is;
            if (s >= 1) {
                s_vals.push_back(double(s));
                i_vals.push_back(is);
                if (s_vals.size() > 3) {
                    s_vals.erase(s_vals.begin());
                    i_vals.erase(i_vals.begin());
                }
            }
            if (s_vals.size() == 3 && i_vals.back() < config_.eps_tail * total) {
                tail3 = fitted_tail(s_vals, i_vals, 3);
                const double tail2 = fitted_tail(s_vals, i_vals, 2);
                // stop when the tail-model uncertainty is inside the budget
                if (std::abs(tail3 - tail2) < 0.5 * config_.eps_tail * (total + tail3) &&
                    shell_bonus-- <= 0)
                    break;
            }
        }
        return 2.0 * (total + tail3);
    }

    /// One shell's k-integral: sum over the spectra of all |gamma| = s blocks.
    double shell_integral(int s, double t) const {
        const auto& gammas = shell_gammas(s);
        if (gammas.empty()) return 0.0;
        AdaptiveQuadrature quad(config_.quad_rel_tol, 0.0);
        const double kmax = k_cutoff(n_, p_, t);
        return quad.integrate(
            [&](double k) {
                if (k <= 0.0) return 0.0;
                heisenberg::HeisenbergContext ctx(n_, k, p_);
                double sum = 0.0;
                for (const auto& gamma : gammas) {
                    try {
                        for (double lambda : heisenberg::block_spectrum(ctx, gamma).raw)
                            sum += std::exp(-t * lambda);
                    } catch (const std::domain_error&) {
                    }
                }
                return sum * std::pow(k, n_);
            },
            0.0, kmax);
    }

    int n() const { return n_; }
    int p_reflected() const { return p_; }

private:
    /// Tail of sum_{s > S} fitted by a rational model through the last
    /// `order` shells (powers s^-2, s^-3, s^-4), summed to convergence.
    static double fitted_tail(const std::vector<double>& s_vals, const std::vector<double>& i_vals,
                              int order) {
        const int base = 3 - order;
        Eigen::MatrixXd a(order, order);
        Eigen::VectorXd rhs(order);
        for (int r = 0; r < order; ++r) {
            const double sv = s_vals[static_cast<std::size_t>(base + r)];
            for (int c = 0; c < order; ++c) a(r, c) = std::pow(sv, -(2.0 + c));
            rhs[r] = i_vals[static_cast<std::size_t>(base + r)];
        }
        Eigen::VectorXd coef = a.fullPivLu().solve(rhs);
        const double s_last = s_vals.back();
        double tail = 0.0;
        for (int s = static_cast<int>(s_last) + 1;; ++s) {
            double term = 0.0;
            for (int c = 0; c < order; ++c) term += coef[c] * std::pow(double(s), -(2.0 + c));
            tail += term;
            if (std::abs(term) < 1e-16 * (std::abs(tail) + 1e-300) || s > 3000000) break;
        }
        return std::max(tail, 0.0);
    }

    /// gamma with entries >= -1, at most p of them -1, and sum = s.
    const std::vector<MultiIndex>& shell_gammas(int s) const {
        auto it = gamma_cache_.find(s);
        if (it != gamma_cache_.end()) return it->second;
        std::vector<MultiIndex> out;
        MultiIndex gamma(static_cast<std::size_t>(n_));
        std::function<void(int, int, int)> rec = [&](int pos, int sum, int minus) {
            if (minus > p_) return;
            if (pos == n_) {
                if (sum == s) out.push_back(gamma);
                return;
            }
            for (int v = -1; sum + v <= s + (n_ - pos - 1); ++v) {
                gamma[static_cast<std::size_t>(pos)] = v;
                rec(pos + 1, sum + v, minus + (v == -1 ? 1 : 0));
            }
        };
        rec(0, 0, 0);
        return gamma_cache_.emplace(s, std::move(out)).first->second;
    }

    int n_;
    int p_orig_;
    int p_;
    HeatTraceConfig config_;
    mutable std::map<int, std::vector<MultiIndex>> gamma_cache_;
};

/// Ratio table for int_0^inf k^m e^{-T(ak+k^2)} dk.  `ratio` is against the
/// leading asymptotic Gamma(m+1)/(aT)^{m+1} and tends to 1 from below;
/// `ratio_corrected` divides out the first correction term
/// (1 - (m+1)(m+2)/(a^2 T)) as well, so it sits within O(T^-2) of 1 already
/// at moderate T.
struct LaplaceCheck {
    double T;
    double integral;
    double ratio;
    double ratio_corrected;
};

inline std::vector<LaplaceCheck> laplace_asymptotics_check(int m, double a,
                                                           const std::vector<double>& T_list) {
    if (!(a > 0)) throw std::invalid_argument("laplace_asymptotics_check: a must be > 0");
    AdaptiveQuadrature quad(1e-12, 0.0);
    std::vector<LaplaceCheck> out;
    for (double T : T_list) {
        const double kmax = 1.1 * (760.0 / (a * T) + std::sqrt(760.0 / T));
        const double integral =
            quad.integrate([&](double k) { return std::pow(k, m) * std::exp(-T * (a * k + k * k)); },
                           0.0, kmax);
        const double ratio = integral * std::pow(a * T, m + 1) / gamma_factorial(m);
        const double correction = 1.0 - (m + 1.0) * (m + 2.0) / (a * a * T);
        out.push_back({T, integral, ratio, ratio / correction});
    }
    return out;
}

/// Quadratic case: int k^m e^{-T(k^2+k^3)} decays like T^{-(m+1)/2}; returns
/// the fitted log-log slope.
inline double laplace_quadratic_slope(int m, const std::vector<double>& T_list) {
    AdaptiveQuadrature quad(1e-12, 0.0);
    std::vector<double> logT, logI;
    for (double T : T_list) {
        const double kmax = 1.1 * std::sqrt(760.0 / T) + 1.0 / T;
        const double integral = quad.integrate(
            [&](double k) { return std::pow(k, m) * std::exp(-T * (k * k + k * k * k)); }, 0.0,
            kmax);
        logT.push_back(std::log(T));
        logI.push_back(std::log(integral));
    }
    // least squares slope
    double st = 0, si = 0, stt = 0, sti = 0;
    const double N = double(logT.size());
    for (std::size_t i = 0; i < logT.size(); ++i) {
        st += logT[i];
        si += logI[i];
        stt += logT[i] * logT[i];
        sti += logT[i] * logI[i];
    }
    return (N * sti - st * si) / (N * stt - st * st);
}

struct NSEstimate {
    double alpha_hat = 0.0;
    double stderr_ = 0.0;       // spread of the extrapolated slope
    double alpha_closed = 0.0;  // closed-form reference (0 when not applicable)
    std::vector<double> t_used;
    std::vector<double> local_slopes;
    bool window_ok = false;     // slope variation < 2% per step inside the window
};

/// Local slope s(t) = -dlog(theta)/dlog(t) by central differences on the log
/// grid, Richardson-extrapolated in 1/t over the tail of the window.
inline NSEstimate fit_alpha(const std::vector<double>& t, const std::vector<double>& theta) {
    if (t.size() != theta.size() || t.size() < 8)
        throw std::invalid_argument("fit_alpha: need >= 8 samples");
    for (std::size_t i = 1; i < theta.size(); ++i)
        if (!(theta[i] > 0.0) || theta[i] >= theta[i - 1] * (1 + 1e-12))
            throw std::invalid_argument("fit_alpha: theta must be positive and decreasing");

    NSEstimate est;
    std::vector<double> ts, slopes;
    for (std::size_t i = 1; i + 1 < t.size(); ++i) {
        const double slope = -(std::log(theta[i + 1]) - std::log(theta[i - 1])) /
                             (std::log(t[i + 1]) - std::log(t[i - 1]));
        ts.push_back(t[i]);
        slopes.push_back(slope);
    }
    est.t_used = ts;
    est.local_slopes = slopes;

    // asymptotic window: local slope varies by < 2% per step over the tail
    std::size_t start = ts.size() >= 4 ? ts.size() - 4 : 0;
    est.window_ok = true;
    for (std::size_t i = start + 1; i < ts.size(); ++i)
        if (std::abs(slopes[i] - slopes[i - 1]) > 0.02 * std::abs(slopes[i - 1]) + 1e-12)
            est.window_ok = false;

    // Richardson in 1/t on consecutive tail pairs: s(t) = alpha - c/t
    std::vector<double> extrapolated;
    for (std::size_t i = start; i + 1 < ts.size(); ++i) {
        const double a =
            (slopes[i + 1] * ts[i + 1] - slopes[i] * ts[i]) / (ts[i + 1] - ts[i]);
        extrapolated.push_back(a);
    }
    if (extrapolated.empty()) extrapolated.push_back(slopes.back());
    est.alpha_hat = extrapolated.back();
    double lo = extrapolated[0], hi = extrapolated[0];
    for (double v : extrapolated) {
        lo = std::min(lo, v);
        hi = std::max(hi, v);
    }
    est.stderr_ = 0.5 * (hi - lo);
    return est;
}

enum class Group { Heisenberg, DGroup };

/// Closed-form Novikov-Shubin invariants: n+1 off the middle degrees,
/// (n+1)/2 at p = n, n+1 (Hodge symmetric), and 2n+2 for the double
/// Heisenberg group at p <= 1.
inline double alpha_closed_form(Group group, int n, int p) {
    if (group == Group::Heisenberg) {
        if (p < 0 || p > 2 * n + 1) throw std::invalid_argument("alpha_closed_form: p out of range");
        return (p == n || p == n + 1) ? 0.5 * (n + 1) : double(n + 1);
    }
    if (p != 0 && p != 1)
        throw std::invalid_argument("alpha_closed_form: D-group supports p in {0, 1}");
    return double(2 * n + 2);
}

/// Lowest-band heat trace for D^{4n+2}: the polar-form Plancherel integral
///   2 pi int_0^inf e^{-t(c r + r^2)} r^{2n+1} dr
/// with c the linear coefficient of the lowest eigenvalue; the bracket
/// endpoints bound c, and the decay exponent is c-independent.
enum class DGroupCoefficient { BracketLower, BracketMidpoint, BracketUpper };

inline double dgroup_trace_at(int n, double t, DGroupCoefficient which,
                              double quad_rel_tol = 1e-10) {
    if (!(t > 0)) throw std::invalid_argument("dgroup_trace_at: t must be > 0");
    const auto br = dgroup::lowest_bracket(n, 1.0);
    double c = 0.0;
    switch (which) {
        case DGroupCoefficient::BracketLower: c = br.linear_coefficient; break;
        case DGroupCoefficient::BracketMidpoint:
            c = 0.5 * (br.linear_coefficient + (2.0 * n - 1.0));
            break;
        case DGroupCoefficient::BracketUpper: c = 2.0 * n - 1.0; break;
    }
    AdaptiveQuadrature quad(quad_rel_tol, 0.0);
    const double rmax = 1.1 * (760.0 / (c * t) + std::sqrt(760.0 / t));
    const double pi = 3.14159265358979323846;
    return 2.0 * pi *
           quad.integrate(
               [&](double r) { return std::exp(-t * (c * r + r * r)) * std::pow(r, 2 * n + 1); },
               0.0, rmax);
}

/// End-to-end pipeline: heat trace over the grid, then the slope fit.
inline NSEstimate heisenberg_ns(int n, int p, const HeatTraceConfig& config) {
    HeisenbergHeatTracer tracer(n, p, config);
    std::vector<double> theta;
    for (double t : config.t_grid) theta.push_back(tracer.trace_at(t));
    NSEstimate est = fit_alpha(config.t_grid, theta);
    est.alpha_closed = alpha_closed_form(Group::Heisenberg, n, p);
    return est;
}

inline NSEstimate dgroup_ns(int n, const HeatTraceConfig& config, DGroupCoefficient which) {
    std::vector<double> theta;
    for (double t : config.t_grid) theta.push_back(dgroup_trace_at(n, t, which, config.quad_rel_tol));
    NSEstimate est = fit_alpha(config.t_grid, theta);
    est.alpha_closed = alpha_closed_form(Group::DGroup, n, 1);
    return est;
}

}  // namespace hlap::heat

#endif  // HLAP_HEAT_HPP
