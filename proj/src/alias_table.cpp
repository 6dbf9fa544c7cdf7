#include "neural_brane/alias_table.hpp"

#include "neural_brane/errors.hpp"

#include <cmath>

namespace neural_brane {

AliasTable::AliasTable(std::span<const double> weights) {
    const std::size_t n = weights.size();
    if (n == 0) throw InputError("alias table needs at least one outcome");
    double total = 0.0;
    for (double w : weights) {
        if (!(w >= 0.0) || !std::isfinite(w))
            throw InputError("alias table weights must be finite and non-negative");
        total += w;
    }
    if (!(total > 0.0)) throw InputError("alias table weights sum to zero");

    prob_.resize(n);
    alias_.resize(n);
    std::vector<double> scaled(n);
    std::vector<std::size_t> small, large;
    for (std::size_t k = 0; k < n; ++k) {
        scaled[k] = weights[k] * static_cast<double>(n) / total;
        alias_[k] = k;
        (scaled[k] < 1.0 ? small : large).push_back(k);
    }
    while (!small.empty() && !large.empty()) {
        std::size_t s = small.back();
        small.pop_back();
        std::size_t l = large.back();
        prob_[s] = scaled[s];
        alias_[s] = l;
        scaled[l] = (scaled[l] + scaled[s]) - 1.0;
        if (scaled[l] < 1.0) {
            large.pop_back();
            small.push_back(l);
        }
    }
    // Leftovers are 1 up to rounding.
    for (std::size_t k : large) prob_[k] = 1.0;
    for (std::size_t k : small) prob_[k] = 1.0;
}

double AliasTable::mass(std::size_t k) const {
    const double n = static_cast<double>(prob_.size());
    double m = prob_[k] / n;
    for (std::size_t c = 0; c < prob_.size(); ++c)
        if (alias_[c] == k && c != k) m += (1.0 - prob_[c]) / n;
    return m;
}

} // namespace neural_brane
