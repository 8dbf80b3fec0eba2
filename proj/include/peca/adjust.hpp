#pragma once

#include <span>
#include <string_view>
#include <vector>

namespace peca {

/// Family-wise error rate adjustments.
enum class AdjustMethod { bonferroni, sidak, holm, holm_sidak };

std::string_view to_string(AdjustMethod method);

/// Accepts "bonferroni", "sidak", "holm" and "holm-sidak".
AdjustMethod parse_adjust_method(std::string_view name);

struct AdjustedPValues {
    AdjustMethod method = AdjustMethod::holm;
    std::vector<double> raw;
    std::vector<double> adjusted;  // same order as raw
};

/// Adjusts raw p-values for the given method. Step-down methods walk the
/// p-values in ascending order (ties broken by input position), take the
/// running maximum and map results back to input order.
AdjustedPValues adjust(std::span<const double> pvals, AdjustMethod method);

/// adjusted < alpha, elementwise.
std::vector<bool> reject_set(const AdjustedPValues& adjusted, double alpha);

}  // namespace peca
