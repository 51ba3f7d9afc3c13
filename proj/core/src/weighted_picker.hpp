#pragma once

#include <cstddef>
#include <vector>

namespace exforce::detail {

/// Fenwick tree over nonnegative per-index weights with prefix-sum sampling.
class WeightedPicker {
public:
    explicit WeightedPicker(std::size_t n) : size_(n), tree_(n + 1, 0.0), weight_(n, 0.0) {
        top_ = 1;
        while ((top_ << 1) <= size_) top_ <<= 1;
    }

    void add(std::size_t i, double delta) {
        weight_[i] += delta;
        for (std::size_t k = i + 1; k <= size_; k += k & (~k + 1)) tree_[k] += delta;
    }

    void set(std::size_t i, double w) { add(i, w - weight_[i]); }

    double weight(std::size_t i) const { return weight_[i]; }

    double total() const {
        double s = 0.0;
        for (std::size_t k = size_; k != 0; k -= k & (~k + 1)) s += tree_[k];
        return s;
    }

    /// Index whose cumulative weight interval contains `target` in
    /// [0, total()). Zero-weight entries are never selected.
    std::size_t sample(double target) const {
        std::size_t idx = 0;
        for (std::size_t mask = top_; mask != 0; mask >>= 1) {
            const std::size_t next = idx + mask;
            if (next <= size_ && tree_[next] < target) {
                target -= tree_[next];
                idx = next;
            }
        }
        // guard against fp drift landing on a zero-weight slot
        while (idx < size_ && weight_[idx] <= 0.0) ++idx;
        if (idx >= size_) {
            idx = size_ - 1;
            while (idx > 0 && weight_[idx] <= 0.0) --idx;
        }
        return idx;
    }

private:
    std::size_t size_;
    std::size_t top_ = 1;
    std::vector<double> tree_;
    std::vector<double> weight_;
};

}  // namespace exforce::detail
