#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <map>
#include <random>
#include <set>
#include <stdexcept>
#include <string>
#include <vector>

#include "seqlid/model.hpp"

namespace seqlid {

// Synthetic corpora: each category draws tokens i.i.d. from a Zipf-shaped
// distribution over a partially shared vocabulary. similarity is the
// probability a draw comes from the pool shared by all categories; the rest
// comes from the category's private pool. 1 makes all categories identical,
// 0 makes them fully disjoint.
struct SyntheticSpec {
    std::size_t n_categories = 2;
    std::size_t vocab_size = 1000;
    std::size_t tokens_per_category = 4000;
    double similarity = 0.5;
    double zipf_exponent = 1.0;

    void validate() const {
        if (n_categories < 2) throw std::invalid_argument("synthetic: need at least 2 categories");
        if (vocab_size < 10) throw std::invalid_argument("synthetic: vocab_size must be >= 10");
        if (tokens_per_category < 1)
            throw std::invalid_argument("synthetic: tokens_per_category must be >= 1");
        if (!(similarity >= 0.0 && similarity <= 1.0))
            throw std::invalid_argument("synthetic: similarity must be in [0,1]");
        if (!(zipf_exponent >= 0.0))
            throw std::invalid_argument("synthetic: zipf_exponent must be >= 0");
        if (similarity < 1.0 && vocab_size < 2 * n_categories)
            throw std::invalid_argument("synthetic: vocab_size too small for private pools");
    }
};

namespace detail {

// All randomness below draws raw engine output so corpora are byte-identical
// across standard libraries; std::shuffle and the distribution classes leave
// their algorithms implementation-defined.
inline double unit_double(std::mt19937_64& rng) {
    return static_cast<double>(rng() >> 11) * 0x1.0p-53;
}

inline std::size_t bounded(std::mt19937_64& rng, std::size_t n) {
    return static_cast<std::size_t>(rng() % n);
}

template <typename T>
inline void deterministic_shuffle(std::vector<T>& items, std::mt19937_64& rng) {
    for (std::size_t i = items.size(); i > 1; --i)
        std::swap(items[i - 1], items[bounded(rng, i)]);
}

// Zipf sampler over ranks 0..size-1 via the inverse of the cumulative weights.
class ZipfPool {
public:
    ZipfPool() = default;
    ZipfPool(std::vector<std::size_t> members, double exponent) : members_(std::move(members)) {
        cumulative_.reserve(members_.size());
        double total = 0.0;
        for (std::size_t rank = 0; rank < members_.size(); ++rank) {
            total += std::pow(static_cast<double>(rank + 1), -exponent);
            cumulative_.push_back(total);
        }
    }

    bool empty() const { return members_.empty(); }

    std::size_t draw(std::mt19937_64& rng) const {
        const double u = unit_double(rng) * cumulative_.back();
        const auto it = std::upper_bound(cumulative_.begin(), cumulative_.end(), u);
        const std::size_t rank = std::min<std::size_t>(it - cumulative_.begin(), members_.size() - 1);
        return members_[rank];
    }

private:
    std::vector<std::size_t> members_;  // vocabulary indices, rank order
    std::vector<double> cumulative_;
};

inline std::vector<Token> make_vocabulary(std::size_t size, std::mt19937_64& rng) {
    std::set<Token> seen;
    std::vector<Token> vocab;
    vocab.reserve(size);
    while (vocab.size() < size) {
        const std::size_t length = 3 + bounded(rng, 7);
        Token word;
        for (std::size_t k = 0; k < length; ++k)
            word.push_back(static_cast<char>('a' + bounded(rng, 26)));
        if (seen.insert(word).second) vocab.push_back(std::move(word));
    }
    return vocab;
}

inline std::string category_name(std::size_t index, std::size_t n_categories) {
    std::size_t width = 1;
    for (std::size_t v = n_categories; v >= 10; v /= 10) ++width;
    std::string digits = std::to_string(index + 1);
    return "cat" + std::string(width - digits.size(), '0') + digits;
}

}  // namespace detail

inline Corpora generate_synthetic_corpora(const SyntheticSpec& spec, std::uint64_t seed) {
    spec.validate();
    std::mt19937_64 rng(seed);

    const std::vector<Token> vocab = detail::make_vocabulary(spec.vocab_size, rng);
    std::vector<std::size_t> order(spec.vocab_size);
    for (std::size_t i = 0; i < order.size(); ++i) order[i] = i;
    detail::deterministic_shuffle(order, rng);

    std::size_t shared_count;
    if (spec.similarity >= 1.0) {
        shared_count = spec.vocab_size;
    } else {
        shared_count = static_cast<std::size_t>(
            std::llround(spec.similarity * static_cast<double>(spec.vocab_size)));
        shared_count = std::min(shared_count, spec.vocab_size - spec.n_categories);
        if (spec.similarity > 0.0) shared_count = std::max<std::size_t>(shared_count, 1);
    }

    const detail::ZipfPool shared(
        std::vector<std::size_t>(order.begin(), order.begin() + shared_count), spec.zipf_exponent);
    std::vector<detail::ZipfPool> privates(spec.n_categories);
    {
        std::vector<std::vector<std::size_t>> chunks(spec.n_categories);
        for (std::size_t k = shared_count; k < order.size(); ++k)
            chunks[(k - shared_count) % spec.n_categories].push_back(order[k]);
        for (std::size_t c = 0; c < spec.n_categories; ++c)
            privates[c] = detail::ZipfPool(std::move(chunks[c]), spec.zipf_exponent);
    }

    Corpora corpora;
    for (std::size_t c = 0; c < spec.n_categories; ++c) {
        std::vector<Token> tokens;
        tokens.reserve(spec.tokens_per_category);
        for (std::size_t t = 0; t < spec.tokens_per_category; ++t) {
            const bool from_shared =
                privates[c].empty() ||
                (!shared.empty() && detail::unit_double(rng) < spec.similarity);
            const detail::ZipfPool& pool = from_shared ? shared : privates[c];
            tokens.push_back(vocab[pool.draw(rng)]);
        }
        corpora.emplace(detail::category_name(c, spec.n_categories), std::move(tokens));
    }
    return corpora;
}

}  // namespace seqlid
