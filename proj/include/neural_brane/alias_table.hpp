#ifndef NEURAL_BRANE_ALIAS_TABLE_HPP
#define NEURAL_BRANE_ALIAS_TABLE_HPP

#include <cstddef>
#include <random>
#include <span>
#include <vector>

namespace neural_brane {

/// Walker/Vose alias table: O(size) construction, O(1) draws from an
/// arbitrary discrete distribution given by non-negative weights.
class AliasTable {
public:
    AliasTable() = default;
    /// Throws InputError if weights is empty, contains a negative or
    /// non-finite entry, or sums to zero.
    explicit AliasTable(std::span<const double> weights);

    std::size_t size() const noexcept { return prob_.size(); }
    std::span<const double> probabilities() const noexcept { return prob_; }
    std::span<const std::size_t> aliases() const noexcept { return alias_; }

    /// Probability mass the table assigns to outcome k (reconstructed from
    /// the columns; used to check construction accuracy).
    double mass(std::size_t k) const;

    template <typename Rng>
    std::size_t sample(Rng& rng) const {
        std::uniform_int_distribution<std::size_t> column(0, prob_.size() - 1);
        std::uniform_real_distribution<double> coin(0.0, 1.0);
        std::size_t k = column(rng);
        return coin(rng) < prob_[k] ? k : alias_[k];
    }

private:
    std::vector<double> prob_;
    std::vector<std::size_t> alias_;
};

} // namespace neural_brane

#endif // NEURAL_BRANE_ALIAS_TABLE_HPP
