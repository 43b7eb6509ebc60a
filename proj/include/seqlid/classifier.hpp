#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <limits>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include "seqlid/model.hpp"

namespace seqlid {

enum class EndPolicy { best, candidate_set };

struct ClassifierConfig {
    double activation_threshold = 0.0;
    EndPolicy end_policy = EndPolicy::best;

    void validate() const {
        if (!(activation_threshold >= 0.0))
            throw std::invalid_argument("classifier: activation threshold must be >= 0");
    }
};

struct Decision {
    enum class Status { running, decided, exhausted_best, exhausted_set };

    Status status = Status::running;
    std::string category;                 // winner, or highest-base category
    std::size_t tokens_consumed = 0;
    std::vector<std::string> candidates;  // exhausted_set only: ranked by base score

    bool definitive() const { return status == Status::decided; }
};

// Per-category log-evidence sums.
struct Accumulator {
    double low = 0.0;
    double base = 0.0;
    double high = 0.0;
};

// One classification pass over a token stream. Evidence for each category is
// the log ratio ln(p(t|l)/p(t)) accumulated as a (low, base, high) triple.
// After every token two tests run: the leading base sum must exceed the
// activation threshold, and the leader's low sum must exceed every rival's
// high sum. Both passing ends the stream with a definitive decision.
//
// Sessions are single-writer; distinct sessions may share one model freely.
class Session {
public:
    Session(const GlobalModel& model, const ClassifierConfig& config)
        : model_(&model), config_(config), acc_(model.categories.size()) {
        config_.validate();
        if (model.categories.size() < 2)
            throw std::invalid_argument("classifier: need at least 2 categories");
    }

    Decision step(const Token& token) {
        if (decided_) throw std::logic_error("classifier: step after a decision was made");
        for (std::size_t i = 0; i < acc_.size(); ++i) {
            const LookupResult found = model_->lookup(i, token);
            // A clamped low of 0 would contribute ln 0; floor it at the
            // category's zero probability to keep the bound finite.
            const double low = found.triple.low > 0.0 ? found.triple.low
                                                      : model_->categories[i].zero_prob;
            acc_[i].low += std::log(low / found.prior);
            acc_[i].base += std::log(found.triple.base / found.prior);
            acc_[i].high += std::log(found.triple.high / found.prior);
        }
        ++tokens_seen_;

        const std::size_t best = best_index();
        if (acc_[best].base > config_.activation_threshold) {
            double rival_high = -std::numeric_limits<double>::infinity();
            for (std::size_t i = 0; i < acc_.size(); ++i)
                if (i != best) rival_high = std::max(rival_high, acc_[i].high);
            if (acc_[best].low > rival_high) {
                decided_ = best;
                Decision d;
                d.status = Decision::Status::decided;
                d.category = model_->categories[best].id;
                d.tokens_consumed = tokens_seen_;
                return d;
            }
        }
        Decision d;
        d.status = Decision::Status::running;
        d.tokens_consumed = tokens_seen_;
        return d;
    }

    // End-of-input policies: report the highest-base category alone, or the
    // ranked set of categories not yet statistically excluded.
    Decision finish() const {
        if (decided_) throw std::logic_error("classifier: finish after a decision was made");
        const std::size_t best = best_index();
        Decision d;
        d.category = model_->categories[best].id;
        d.tokens_consumed = tokens_seen_;
        if (config_.end_policy == EndPolicy::best) {
            d.status = Decision::Status::exhausted_best;
        } else {
            d.status = Decision::Status::exhausted_set;
            d.candidates = remaining_set();
        }
        return d;
    }

    // Categories still possible: the leader plus every category whose high
    // sum has not fallen strictly below the leader's low sum, ranked by base
    // sum. Ties stay in, so a fresh session keeps every category.
    std::vector<std::string> remaining_set() const {
        const std::size_t best = decided_ ? *decided_ : best_index();
        std::vector<std::size_t> kept;
        kept.push_back(best);
        for (std::size_t i = 0; i < acc_.size(); ++i)
            if (i != best && acc_[i].high >= acc_[best].low) kept.push_back(i);
        std::sort(kept.begin(), kept.end(), [&](std::size_t a, std::size_t b) {
            if (acc_[a].base != acc_[b].base) return acc_[a].base > acc_[b].base;
            return a < b;
        });
        std::vector<std::string> ids;
        ids.reserve(kept.size());
        for (const std::size_t i : kept) ids.push_back(model_->categories[i].id);
        return ids;
    }

    const std::vector<Accumulator>& accumulators() const { return acc_; }
    std::size_t tokens_seen() const { return tokens_seen_; }
    bool decided() const { return decided_.has_value(); }
    const GlobalModel& model() const { return *model_; }

private:
    // First index attaining the maximum base sum; ties break by category order.
    std::size_t best_index() const {
        std::size_t best = 0;
        for (std::size_t i = 1; i < acc_.size(); ++i)
            if (acc_[i].base > acc_[best].base) best = i;
        return best;
    }

    const GlobalModel* model_;
    ClassifierConfig config_;
    std::vector<Accumulator> acc_;
    std::size_t tokens_seen_ = 0;
    std::optional<std::size_t> decided_;
};

// Steps through the whole stream, halting early on a definitive decision.
template <typename TokenRange>
Decision classify_stream(const TokenRange& tokens, const GlobalModel& model,
                         const ClassifierConfig& config) {
    Session session(model, config);
    for (const Token& token : tokens) {
        const Decision d = session.step(token);
        if (d.definitive()) return d;
    }
    return session.finish();
}

}  // namespace seqlid
