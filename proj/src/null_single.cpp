#include "peca/null_single.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <limits>
#include <numbers>
#include <numeric>
#include <string>

#include "peca/binomial.hpp"
#include "peca/error.hpp"

namespace peca {

namespace {

constexpr double inf = std::numeric_limits<double>::infinity();
constexpr double euler_gamma = 0.57721566490153286061;

bool is_gumbel(const GevParams& theta) { return std::abs(theta.shape) < gumbel_shape_cutoff; }

// Returns -log G(z), i.e. [1 + xi s]^(-1/xi) or exp(-s); +inf below the
// support and 0 above it.
double neg_log_cdf(double z, const GevParams& theta) {
    const double s = (z - theta.location) / theta.scale;
    if (is_gumbel(theta)) return std::exp(-s);
    const double arg = theta.shape * s;
    if (arg <= -1.0) return theta.shape > 0.0 ? inf : 0.0;
    return std::exp(-std::log1p(arg) / theta.shape);
}

}  // namespace

void GevParams::validate() const {
    if (!std::isfinite(shape) || !std::isfinite(location) || !std::isfinite(scale)) {
        throw_invalid("GEV parameters must be finite");
    }
    if (!(scale > 0.0)) throw_invalid("GEV scale must be positive");
}

double gev_cdf(double z, const GevParams& theta) {
    theta.validate();
    return std::exp(-neg_log_cdf(z, theta));
}

double gev_exceedance(double z, const GevParams& theta) {
    theta.validate();
    return -std::expm1(-neg_log_cdf(z, theta));
}

double gev_quantile(double p, const GevParams& theta) {
    theta.validate();
    if (!(p > 0.0 && p < 1.0)) throw_invalid("GEV quantile level must lie in (0, 1)");
    const double y = -std::log(-std::log(p));  // Gumbel-reduced variate
    if (is_gumbel(theta)) return theta.location + theta.scale * y;
    return theta.location + theta.scale * std::expm1(theta.shape * y) / theta.shape;
}

double gev_nll(std::span<const double> sample, const GevParams& theta) {
    if (!(theta.scale > 0.0)) return inf;
    const double n = static_cast<double>(sample.size());
    double acc = n * std::log(theta.scale);
    if (is_gumbel(theta)) {
        for (double z : sample) {
            const double s = (z - theta.location) / theta.scale;
            acc += s + std::exp(-s);
        }
        return acc;
    }
    const double xi = theta.shape;
    for (double z : sample) {
        const double arg = xi * (z - theta.location) / theta.scale;
        if (arg <= -1.0) return inf;
        const double log_y = std::log1p(arg);
        acc += (1.0 + 1.0 / xi) * log_y + std::exp(-log_y / xi);
    }
    return std::isnan(acc) ? inf : acc;
}

std::vector<double> block_maxima(const TimeSeries& x, std::size_t delta) {
    const std::size_t block = delta + 1;
    const auto v = x.values();
    if (v.size() < block) {
        throw_invalid("series of length " + std::to_string(v.size()) +
                      " is shorter than one block of size " + std::to_string(block));
    }
    std::vector<double> maxima;
    maxima.reserve(v.size() / block);
    for (std::size_t start = 0; start + block <= v.size(); start += block) {
        const auto first = v.begin() + static_cast<std::ptrdiff_t>(start);
        maxima.push_back(*std::max_element(first, first + static_cast<std::ptrdiff_t>(block)));
    }
    return maxima;
}

GevParams gev_initial_estimate(std::span<const double> sample) {
    const std::size_t n = sample.size();
    if (n < 3) throw Error(ErrorCategory::numerical, "at least three samples are needed for a GEV estimate");
    std::vector<double> sorted(sample.begin(), sample.end());
    std::sort(sorted.begin(), sorted.end());

    const double nn = static_cast<double>(n);
    const double mean = std::accumulate(sorted.begin(), sorted.end(), 0.0) / nn;
    double var = 0.0;
    for (double z : sorted) var += (z - mean) * (z - mean);
    var /= nn - 1.0;

    GevParams gumbel;
    gumbel.shape = 0.0;
    gumbel.scale = std::sqrt(6.0 * var) / std::numbers::pi;
    gumbel.location = mean - euler_gamma * gumbel.scale;

    double b1 = 0.0, b2 = 0.0;
    for (std::size_t j = 0; j < n; ++j) {
        const double jj = static_cast<double>(j);
        b1 += jj / (nn - 1.0) * sorted[j];
        b2 += jj * (jj - 1.0) / ((nn - 1.0) * (nn - 2.0)) * sorted[j];
    }
    b1 /= nn;
    b2 /= nn;
    const double b0 = mean;

    const double c = (2.0 * b1 - b0) / (3.0 * b2 - b0) - std::log(2.0) / std::log(3.0);
    const double k = 7.8590 * c + 2.9554 * c * c;  // k = -xi in Hosking's parameterisation

    GevParams pwm;
    if (std::abs(k) < 1e-6) {
        pwm.shape = 0.0;
        pwm.scale = (2.0 * b1 - b0) / std::log(2.0);
        pwm.location = b0 - euler_gamma * pwm.scale;
    } else {
        const double g = std::tgamma(1.0 + k);
        pwm.shape = -k;
        pwm.scale = (2.0 * b1 - b0) * k / (g * (1.0 - std::pow(2.0, -k)));
        pwm.location = b0 + pwm.scale * (g - 1.0) / k;
    }
    const bool usable = std::isfinite(pwm.shape) && std::isfinite(pwm.location) &&
                        std::isfinite(pwm.scale) && pwm.scale > 0.0 &&
                        std::isfinite(gev_nll(sample, pwm));
    return usable ? pwm : gumbel;
}

namespace {

using Point = std::array<double, 3>;  // (mu, log sigma, xi)

GevParams to_params(const Point& p) { return GevParams{p[2], p[0], std::exp(p[1])}; }

struct SimplexResult {
    Point best;
    double value;
    bool tolerance_met;
};

// Plain Nelder-Mead with standard coefficients; stops when the spread of
// objective values across the simplex falls under the tolerance.
template <class Objective>
SimplexResult nelder_mead(Objective&& f, const Point& start, const Point& step, double rel_tol,
                          std::size_t& budget) {
    constexpr std::size_t dim = 3;
    std::array<Point, dim + 1> vertex;
    std::array<double, dim + 1> value;
    vertex[0] = start;
    for (std::size_t i = 0; i < dim; ++i) {
        vertex[i + 1] = start;
        vertex[i + 1][i] += step[i];
    }
    for (std::size_t i = 0; i <= dim; ++i) {
        value[i] = f(vertex[i]);
        if (budget > 0) --budget;
    }

    auto eval = [&](const Point& p) {
        if (budget > 0) --budget;
        return f(p);
    };
    auto combine = [](const Point& a, const Point& b, double t) {
        Point out;
        for (std::size_t i = 0; i < dim; ++i) out[i] = a[i] + t * (b[i] - a[i]);
        return out;
    };

    while (true) {
        std::array<std::size_t, dim + 1> order;
        std::iota(order.begin(), order.end(), 0);
        std::sort(order.begin(), order.end(), [&](auto a, auto b) { return value[a] < value[b]; });
        const std::size_t best = order[0], worst = order[dim], second = order[dim - 1];

        const double spread = value[worst] - value[best];
        if (std::isfinite(spread) && spread <= rel_tol * std::max(1.0, std::abs(value[best]))) {
            return {vertex[best], value[best], true};
        }
        if (budget == 0) return {vertex[best], value[best], false};

        Point centroid{0.0, 0.0, 0.0};
        for (std::size_t i = 0; i <= dim; ++i) {
            if (i == worst) continue;
            for (std::size_t d = 0; d < dim; ++d) centroid[d] += vertex[i][d] / dim;
        }

        const Point reflected = combine(centroid, vertex[worst], -1.0);
        const double f_reflected = eval(reflected);
        if (f_reflected < value[best]) {
            const Point expanded = combine(centroid, vertex[worst], -2.0);
            const double f_expanded = eval(expanded);
            if (f_expanded < f_reflected) {
                vertex[worst] = expanded;
                value[worst] = f_expanded;
            } else {
                vertex[worst] = reflected;
                value[worst] = f_reflected;
            }
            continue;
        }
        if (f_reflected < value[second]) {
            vertex[worst] = reflected;
            value[worst] = f_reflected;
            continue;
        }
        const bool outside = f_reflected < value[worst];
        const Point contracted = outside ? combine(centroid, reflected, 0.5)
                                         : combine(centroid, vertex[worst], 0.5);
        const double f_contracted = eval(contracted);
        if (f_contracted < std::min(f_reflected, value[worst])) {
            vertex[worst] = contracted;
            value[worst] = f_contracted;
            continue;
        }
        for (std::size_t i = 0; i <= dim; ++i) {
            if (i == best) continue;
            vertex[i] = combine(vertex[best], vertex[i], 0.5);
            value[i] = eval(vertex[i]);
        }
    }
}

}  // namespace

GevFit fit_gev_mle(std::span<const double> sample, const GevFitOptions& options) {
    if (sample.size() < std::max<std::size_t>(options.min_samples, 3)) {
        throw Error(ErrorCategory::numerical,
                    "GEV fit needs at least " + std::to_string(options.min_samples) +
                        " block maxima, got " + std::to_string(sample.size()));
    }
    for (double z : sample) {
        if (!std::isfinite(z)) throw Error(ErrorCategory::numerical, "non-finite block maximum");
    }
    const auto [lo, hi] = std::minmax_element(sample.begin(), sample.end());
    if (*lo == *hi) throw Error(ErrorCategory::numerical, "degenerate sample: all block maxima are equal");

    GevFit fit;
    fit.initial = gev_initial_estimate(sample);
    fit.initial.shape = std::clamp(fit.initial.shape, options.min_shape + 0.05, options.max_shape - 0.05);
    if (!std::isfinite(gev_nll(sample, fit.initial))) {
        // Clamping the shape can move the support; restart from the Gumbel
        // limit, whose support is the whole real line.
        fit.initial.shape = 0.0;
    }
    fit.initial_nll = gev_nll(sample, fit.initial);

    auto objective = [&](const Point& p) {
        if (!(p[2] >= options.min_shape && p[2] <= options.max_shape)) return inf;
        if (!std::isfinite(p[1])) return inf;
        return gev_nll(sample, to_params(p));
    };

    Point current{fit.initial.location, std::log(fit.initial.scale), fit.initial.shape};
    double current_value = fit.initial_nll;
    std::size_t budget = options.max_evaluations;
    constexpr std::size_t max_restarts = 50;
    for (std::size_t restart = 0; restart < max_restarts; ++restart) {
        const double scale = std::exp(current[1]);
        const Point step{0.1 * scale, 0.1, current[2] + 0.1 <= options.max_shape ? 0.1 : -0.1};
        const SimplexResult run = nelder_mead(objective, current, step, options.relative_tolerance, budget);
        const double improvement = current_value - run.value;
        if (run.value <= current_value) {
            current = run.best;
            current_value = run.value;
        }
        fit.restarts = restart;
        if (run.tolerance_met &&
            improvement <= options.relative_tolerance * std::max(1.0, std::abs(current_value))) {
            fit.converged = true;
            break;
        }
        if (budget == 0) break;
    }
    fit.evaluations = options.max_evaluations - budget;
    fit.params = to_params(current);
    fit.nll = current_value;
    if (!fit.converged || !std::isfinite(fit.nll)) {
        throw Error(ErrorCategory::numerical, "GEV maximum likelihood search did not converge");
    }
    return fit;
}

PointwiseTestResult bernoulli_null_pvalue(std::size_t k, std::size_t n_b, double p_a,
                                          std::size_t delta) {
    if (k > n_b) throw_invalid("observed coincidences exceed the number of events");
    if (!(p_a >= 0.0 && p_a <= 1.0)) throw_invalid("event probability must lie in [0, 1]");
    PointwiseTestResult r;
    r.k_observed = k;
    r.n_events = n_b;
    // 1 - (1 - p)^(delta + 1)
    r.success_prob = p_a == 1.0 ? 1.0 : -std::expm1(static_cast<double>(delta + 1) * std::log1p(-p_a));
    r.p_value = binomial::upper_tail(k, n_b, r.success_prob);
    return r;
}

PointwiseTestResult gev_null_pvalue(std::size_t k, std::size_t n_e, double tau,
                                    const GevParams& theta) {
    if (k > n_e) throw_invalid("observed coincidences exceed the number of events");
    if (std::isnan(tau)) throw_invalid("threshold must not be NaN");
    PointwiseTestResult r;
    r.k_observed = k;
    r.n_events = n_e;
    r.success_prob = std::clamp(gev_exceedance(tau, theta), 0.0, 1.0);
    r.p_value = binomial::upper_tail(k, n_e, r.success_prob);
    return r;
}

double estimate_event_rate(const EventSeries& e) {
    if (e.length() == 0) throw_invalid("event series has zero length");
    return static_cast<double>(e.count()) / static_cast<double>(e.length());
}

}  // namespace peca
