#pragma once

#include <cstdint>
#include <map>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

#include "seqlid/estimator.hpp"
#include "seqlid/tokenizer.hpp"

namespace seqlid {

inline constexpr int kModelFormatVersion = 1;

using Corpora = std::map<std::string, std::vector<Token>>;

struct UnknownCategoryError : std::invalid_argument {
    explicit UnknownCategoryError(const std::string& id)
        : std::invalid_argument("unknown category: " + id) {}
};

// Raw token counts: per-category tables plus the pooled table.
struct CountTable {
    struct Category {
        std::map<Token, Count> token_counts;
        Count total = 0;
    };
    std::map<std::string, Category> categories;
    std::map<Token, Count> global_counts;
    Count grand_total = 0;
};

inline CountTable count(const Corpora& corpora) {
    if (corpora.size() < 2) throw std::invalid_argument("count: need at least 2 categories");
    CountTable table;
    for (const auto& [id, tokens] : corpora) {
        if (tokens.empty())
            throw std::invalid_argument("count: category '" + id + "' has no tokens");
        auto& cat = table.categories[id];
        for (const Token& token : tokens) {
            if (token.empty())
                throw std::invalid_argument("count: empty token in category '" + id + "'");
            if (token.find('\t') != Token::npos || token.find('\n') != Token::npos ||
                token.find('\r') != Token::npos)
                throw std::invalid_argument("count: token with tab or newline in category '" + id + "'");
            ++cat.token_counts[token];
            ++table.global_counts[token];
        }
        cat.total = tokens.size();
        table.grand_total += cat.total;
    }
    return table;
}

struct CategoryModel {
    std::string id;
    std::map<Token, ProbabilityTriple> token_probs;
    double zero_prob = 0.0;    // uniform triple for tokens unseen in this category
    Count training_tokens = 0; // f(l)
};

struct LookupResult {
    ProbabilityTriple triple;
    double prior = 0.0;
};

struct GlobalModel {
    std::vector<CategoryModel> categories; // stable order, unique ids
    std::map<Token, double> priors;        // p(t) for every token seen anywhere
    double unseen_prior = 0.0;             // p(t) fallback for globally unseen tokens
    TokenizerMode mode = TokenizerMode::word;
    EstimatorConfig estimator;
    int format_version = kModelFormatVersion;

    const CategoryModel* find(std::string_view id) const {
        for (const auto& cat : categories)
            if (cat.id == id) return &cat;
        return nullptr;
    }

    LookupResult lookup(std::size_t category_index, const Token& token) const {
        const CategoryModel& cat = categories.at(category_index);
        LookupResult result;
        const auto it = cat.token_probs.find(token);
        if (it != cat.token_probs.end())
            result.triple = it->second;
        else
            result.triple = {cat.zero_prob, cat.zero_prob, cat.zero_prob};
        const auto pit = priors.find(token);
        result.prior = pit != priors.end() ? pit->second : unseen_prior;
        return result;
    }

    LookupResult lookup(std::string_view category_id, const Token& token) const {
        for (std::size_t i = 0; i < categories.size(); ++i)
            if (categories[i].id == category_id) return lookup(i, token);
        throw UnknownCategoryError(std::string(category_id));
    }
};

// Equality over everything the model file records. The large-count base
// cutoff only steers training-time regime dispatch and is not persisted.
inline bool operator==(const GlobalModel& a, const GlobalModel& b) {
    if (a.format_version != b.format_version || a.mode != b.mode) return false;
    if (a.estimator.deviations != b.estimator.deviations ||
        a.estimator.small_count_cutoff != b.estimator.small_count_cutoff ||
        a.estimator.zero_target != b.estimator.zero_target)
        return false;
    if (a.priors != b.priors || a.unseen_prior != b.unseen_prior) return false;
    if (a.categories.size() != b.categories.size()) return false;
    for (std::size_t i = 0; i < a.categories.size(); ++i) {
        const auto& ca = a.categories[i];
        const auto& cb = b.categories[i];
        if (ca.id != cb.id || ca.zero_prob != cb.zero_prob ||
            ca.training_tokens != cb.training_tokens || ca.token_probs != cb.token_probs)
            return false;
    }
    return true;
}

// Trains one model from labelled token corpora. Pure function of the
// multiset of (category, token) pairs; reordering tokens changes nothing.
inline GlobalModel train(const Corpora& corpora, const EstimatorConfig& config = {},
                         TokenizerMode mode = TokenizerMode::word) {
    config.validate();
    const CountTable table = count(corpora);

    GlobalModel model;
    model.mode = mode;
    model.estimator = config;
    model.categories.reserve(table.categories.size());
    for (const auto& [id, counts] : table.categories) {
        CategoryModel cat;
        cat.id = id;
        cat.training_tokens = counts.total;
        cat.zero_prob = zero_probability(counts.total, config.zero_target);
        for (const auto& [token, m] : counts.token_counts)
            cat.token_probs.emplace(token, estimate(m, counts.total, config));
        model.categories.push_back(std::move(cat));
    }
    for (const auto& [token, m] : table.global_counts)
        model.priors.emplace(token, prior_probability(m, table.grand_total, config));
    model.unseen_prior = zero_probability(table.grand_total, config.zero_target);
    return model;
}

}  // namespace seqlid
