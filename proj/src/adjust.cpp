#include "peca/adjust.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <string>

#include "peca/error.hpp"

namespace peca {

namespace {

// 1 - (1 - p)^m without cancellation for small p.
double sidak_term(double p, double m) {
    if (p >= 1.0) return 1.0;
    return -std::expm1(m * std::log1p(-p));
}

}  // namespace

std::string_view to_string(AdjustMethod method) {
    switch (method) {
        case AdjustMethod::bonferroni: return "bonferroni";
        case AdjustMethod::sidak: return "sidak";
        case AdjustMethod::holm: return "holm";
        case AdjustMethod::holm_sidak: return "holm-sidak";
    }
    return "unknown";
}

AdjustMethod parse_adjust_method(std::string_view name) {
    if (name == "bonferroni") return AdjustMethod::bonferroni;
    if (name == "sidak") return AdjustMethod::sidak;
    if (name == "holm") return AdjustMethod::holm;
    if (name == "holm-sidak") return AdjustMethod::holm_sidak;
    throw_invalid("unknown adjustment method '" + std::string(name) +
                  "' (expected bonferroni, sidak, holm or holm-sidak)");
}

AdjustedPValues adjust(std::span<const double> pvals, AdjustMethod method) {
    if (pvals.empty()) throw_invalid("at least one p-value is required");
    for (double p : pvals) {
        if (!(p >= 0.0 && p <= 1.0)) throw_invalid("p-values must lie in [0, 1]");
    }
    const std::size_t m = pvals.size();
    const double mm = static_cast<double>(m);

    AdjustedPValues out;
    out.method = method;
    out.raw.assign(pvals.begin(), pvals.end());
    out.adjusted.resize(m);

    switch (method) {
        case AdjustMethod::bonferroni:
            for (std::size_t i = 0; i < m; ++i) out.adjusted[i] = std::min(1.0, mm * pvals[i]);
            return out;
        case AdjustMethod::sidak:
            for (std::size_t i = 0; i < m; ++i) out.adjusted[i] = sidak_term(pvals[i], mm);
            return out;
        case AdjustMethod::holm:
        case AdjustMethod::holm_sidak:
            break;
    }

    std::vector<std::size_t> order(m);
    std::iota(order.begin(), order.end(), 0);
    std::stable_sort(order.begin(), order.end(), [&](auto a, auto b) { return pvals[a] < pvals[b]; });

    double running = 0.0;
    for (std::size_t j = 0; j < m; ++j) {
        const double p = pvals[order[j]];
        const double remaining = static_cast<double>(m - j);
        const double step = method == AdjustMethod::holm ? std::min(1.0, remaining * p)
                                                         : sidak_term(p, remaining);
        running = std::max(running, step);
        out.adjusted[order[j]] = running;
    }
    return out;
}

std::vector<bool> reject_set(const AdjustedPValues& adjusted, double alpha) {
    if (!(alpha > 0.0 && alpha < 1.0)) throw_invalid("significance level must lie in (0, 1)");
    std::vector<bool> out(adjusted.adjusted.size());
    for (std::size_t i = 0; i < out.size(); ++i) out[i] = adjusted.adjusted[i] < alpha;
    return out;
}

}  // namespace peca
