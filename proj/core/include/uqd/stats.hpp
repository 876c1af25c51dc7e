#pragma once

#include <vector>

namespace uqd {

// Two-sided Wilcoxon signed-rank p-value for paired samples. Zero
// differences are dropped; ties take mid-ranks. Exact distribution (full
// sign enumeration) for up to 20 non-zero differences, tie-corrected normal
// approximation above. All differences zero -> p = 1.
double wilcoxon_signed_rank(const std::vector<double>& a, const std::vector<double>& b);

// Holm-Bonferroni step-down adjustment; returns adjusted p-values in the
// input order.
std::vector<double> holm_bonferroni(const std::vector<double>& pvalues);

}  // namespace uqd
