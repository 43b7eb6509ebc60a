#pragma once

#include <array>
#include <cstdint>
#include <map>
#include <numeric>
#include <optional>
#include <random>
#include <stdexcept>
#include <string>
#include <vector>

#include "seqlid/classifier.hpp"
#include "seqlid/model.hpp"
#include "seqlid/synthetic.hpp"
#include "seqlid/tokenizer.hpp"

namespace seqlid {

struct InsufficientDataError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

// How one category's token stream is carved into training and test files.
struct SplitSpec {
    std::vector<std::size_t> train_sizes{2000, 200};
    std::vector<std::size_t> test_file_sizes{1, 5, 10, 20};
    std::size_t files_per_size = 25;
    bool shuffle = false;  // permute slice order instead of carving in listed order

    std::size_t total_demand() const {
        std::size_t demand = 0;
        for (const std::size_t s : train_sizes) demand += s;
        for (const std::size_t s : test_file_sizes) demand += s * files_per_size;
        return demand;
    }

    void validate() const {
        if (train_sizes.empty()) throw std::invalid_argument("split: need at least one training size");
        if (test_file_sizes.empty()) throw std::invalid_argument("split: need at least one test size");
        if (files_per_size < 1) throw std::invalid_argument("split: files_per_size must be >= 1");
        for (const std::size_t s : train_sizes)
            if (s < 1) throw std::invalid_argument("split: training sizes must be >= 1");
        for (const std::size_t s : test_file_sizes)
            if (s < 1) throw std::invalid_argument("split: test sizes must be >= 1");
    }
};

struct TestFile {
    std::size_t size_class = 0;
    std::vector<Token> tokens;
};

struct CorpusSplit {
    std::vector<std::vector<Token>> train_files;  // parallel to SplitSpec::train_sizes
    std::vector<TestFile> test_files;             // grouped by size class, in spec order
};

// Carves pairwise-disjoint slices out of one token stream: training slices
// first, then files_per_size test files per size class. Slices are contiguous
// and taken in listed order; shuffle mode permutes the carving order with the
// seeded generator instead.
inline CorpusSplit split_corpus(const std::vector<Token>& tokens, const SplitSpec& spec,
                                std::uint64_t seed) {
    spec.validate();
    const std::size_t demand = spec.total_demand();
    if (tokens.size() < demand)
        throw InsufficientDataError("split needs " + std::to_string(demand) + " tokens but corpus has " +
                                    std::to_string(tokens.size()) + " (short by " +
                                    std::to_string(demand - tokens.size()) + ")");

    std::vector<std::size_t> lengths;
    for (const std::size_t s : spec.train_sizes) lengths.push_back(s);
    for (const std::size_t s : spec.test_file_sizes)
        for (std::size_t f = 0; f < spec.files_per_size; ++f) lengths.push_back(s);

    // slice indices in the order they are cut from the stream
    std::vector<std::size_t> carve_order(lengths.size());
    std::iota(carve_order.begin(), carve_order.end(), std::size_t{0});
    if (spec.shuffle) {
        std::mt19937_64 rng(seed);
        detail::deterministic_shuffle(carve_order, rng);
    }
    std::vector<std::size_t> starts(lengths.size());
    std::size_t offset = 0;
    for (const std::size_t k : carve_order) {
        starts[k] = offset;
        offset += lengths[k];
    }

    CorpusSplit split;
    std::size_t slice = 0;
    for (std::size_t i = 0; i < spec.train_sizes.size(); ++i, ++slice)
        split.train_files.emplace_back(tokens.begin() + starts[slice],
                                       tokens.begin() + starts[slice] + lengths[slice]);
    for (const std::size_t size : spec.test_file_sizes)
        for (std::size_t f = 0; f < spec.files_per_size; ++f, ++slice)
            split.test_files.push_back(
                {size, {tokens.begin() + starts[slice], tokens.begin() + starts[slice] + lengths[slice]}});
    return split;
}

enum class OutcomeKind {
    definitive_correct,
    nodecision_correct,
    nodecision_incorrect,
    definitive_incorrect,
};

inline bool outcome_correct(OutcomeKind kind) {
    return kind == OutcomeKind::definitive_correct || kind == OutcomeKind::nodecision_correct;
}

inline bool outcome_definitive(OutcomeKind kind) {
    return kind == OutcomeKind::definitive_correct || kind == OutcomeKind::definitive_incorrect;
}

struct Outcome {
    OutcomeKind kind;
    std::string predicted;  // decided category, or highest-base category
    std::string actual;
    std::size_t tokens_consumed = 0;
    std::size_t remaining = 1;  // categories still possible when the file ended
    std::size_t test_size = 0;
};

inline Outcome classify_outcome(const Decision& decision, const std::string& actual,
                                std::size_t remaining = 1) {
    if (decision.status == Decision::Status::running)
        throw std::invalid_argument("classify_outcome: stream is still running");
    Outcome outcome;
    outcome.predicted = decision.category;
    outcome.actual = actual;
    outcome.tokens_consumed = decision.tokens_consumed;
    outcome.remaining = remaining;
    const bool correct = decision.category == actual;
    if (decision.definitive())
        outcome.kind = correct ? OutcomeKind::definitive_correct : OutcomeKind::definitive_incorrect;
    else
        outcome.kind = correct ? OutcomeKind::nodecision_correct : OutcomeKind::nodecision_incorrect;
    return outcome;
}

struct OutcomeCounts {
    std::size_t definitive_correct = 0;
    std::size_t nodecision_correct = 0;
    std::size_t nodecision_incorrect = 0;
    std::size_t definitive_incorrect = 0;

    void add(OutcomeKind kind) {
        switch (kind) {
            case OutcomeKind::definitive_correct: ++definitive_correct; break;
            case OutcomeKind::nodecision_correct: ++nodecision_correct; break;
            case OutcomeKind::nodecision_incorrect: ++nodecision_incorrect; break;
            case OutcomeKind::definitive_incorrect: ++definitive_incorrect; break;
        }
    }

    std::size_t total() const {
        return definitive_correct + nodecision_correct + nodecision_incorrect + definitive_incorrect;
    }

    double accuracy() const {
        const std::size_t n = total();
        return n == 0 ? 0.0 : static_cast<double>(definitive_correct + nodecision_correct) / n;
    }

    double decisiveness() const {
        const std::size_t n = total();
        return n == 0 ? 0.0 : static_cast<double>(definitive_correct + definitive_incorrect) / n;
    }
};

// Mean tokens read before a definitive decision, split by correctness.
// Cells with no definitive outcomes stay empty.
struct ConvergenceStats {
    std::optional<double> correct_mean;
    std::optional<double> incorrect_mean;
    std::optional<double> all_mean;
    std::size_t max_tokens = 0;
};

inline ConvergenceStats convergence_stats(const std::vector<Outcome>& outcomes) {
    std::size_t n_correct = 0, n_incorrect = 0;
    double sum_correct = 0.0, sum_incorrect = 0.0;
    ConvergenceStats stats;
    for (const Outcome& o : outcomes) {
        if (!outcome_definitive(o.kind)) continue;
        if (outcome_correct(o.kind)) {
            ++n_correct;
            sum_correct += static_cast<double>(o.tokens_consumed);
        } else {
            ++n_incorrect;
            sum_incorrect += static_cast<double>(o.tokens_consumed);
        }
        stats.max_tokens = std::max(stats.max_tokens, o.tokens_consumed);
    }
    if (n_correct > 0) stats.correct_mean = sum_correct / n_correct;
    if (n_incorrect > 0) stats.incorrect_mean = sum_incorrect / n_incorrect;
    if (n_correct + n_incorrect > 0)
        stats.all_mean = (sum_correct + sum_incorrect) / (n_correct + n_incorrect);
    return stats;
}

// Histogram of remaining-set sizes; decided outcomes count as size 1.
struct RemainingDistribution {
    std::map<std::size_t, std::array<std::size_t, 3>> histogram;  // [correct, incorrect, all]
    std::optional<double> mean_all;
};

inline RemainingDistribution remaining_distribution(const std::vector<Outcome>& outcomes) {
    RemainingDistribution dist;
    double sum = 0.0;
    for (const Outcome& o : outcomes) {
        auto& row = dist.histogram[o.remaining];
        if (outcome_correct(o.kind))
            ++row[0];
        else
            ++row[1];
        ++row[2];
        sum += static_cast<double>(o.remaining);
    }
    if (!outcomes.empty()) dist.mean_all = sum / static_cast<double>(outcomes.size());
    return dist;
}

struct ExperimentConfig {
    SplitSpec split;
    std::vector<double> thresholds{0.0};
    TokenizerMode mode = TokenizerMode::word;
    EstimatorConfig estimator;
    std::uint64_t seed = 0;
    bool keep_outcomes = false;
};

// Results for one (training size, threshold) pair.
struct ThresholdSweep {
    std::size_t train_size = 0;
    double threshold = 0.0;
    std::map<std::size_t, OutcomeCounts> by_test_size;
    OutcomeCounts overall;
    ConvergenceStats convergence;
    RemainingDistribution remaining;
    std::vector<std::vector<std::size_t>> confusion;  // [actual][assigned], category order
    std::vector<Outcome> outcomes;                    // filled only when keep_outcomes is set
};

struct ExperimentReport {
    std::vector<std::string> categories;
    TokenizerMode mode = TokenizerMode::word;
    SplitSpec split;
    std::vector<double> thresholds;
    std::uint64_t seed = 0;
    std::vector<ThresholdSweep> sweeps;  // train-size major, threshold minor

    const ThresholdSweep* find_sweep(std::size_t train_size, double threshold) const {
        for (const auto& sweep : sweeps)
            if (sweep.train_size == train_size && sweep.threshold == threshold) return &sweep;
        return nullptr;
    }
};

// Runs the full protocol on pre-tokenized corpora: split each category,
// train one model per training size, sweep the activation thresholds, and
// classify every test file.
inline ExperimentReport run_experiment(const Corpora& corpora, const ExperimentConfig& config) {
    config.split.validate();
    config.estimator.validate();
    if (corpora.size() < 2) throw std::invalid_argument("experiment: need at least 2 categories");
    if (config.thresholds.empty()) throw std::invalid_argument("experiment: need at least one threshold");

    ExperimentReport report;
    report.mode = config.mode;
    report.split = config.split;
    report.thresholds = config.thresholds;
    report.seed = config.seed;

    std::map<std::string, CorpusSplit> splits;
    for (const auto& [id, tokens] : corpora) {
        try {
            splits.emplace(id, split_corpus(tokens, config.split, config.seed));
        } catch (const InsufficientDataError& e) {
            throw InsufficientDataError("category '" + id + "': " + e.what());
        }
        report.categories.push_back(id);
    }

    std::map<std::string, std::size_t> category_index;
    for (std::size_t i = 0; i < report.categories.size(); ++i)
        category_index.emplace(report.categories[i], i);

    for (std::size_t t = 0; t < config.split.train_sizes.size(); ++t) {
        Corpora training;
        for (const auto& [id, split] : splits) training.emplace(id, split.train_files[t]);
        const GlobalModel model = train(training, config.estimator, config.mode);

        for (const double threshold : config.thresholds) {
            ThresholdSweep sweep;
            sweep.train_size = config.split.train_sizes[t];
            sweep.threshold = threshold;
            sweep.confusion.assign(report.categories.size(),
                                   std::vector<std::size_t>(report.categories.size(), 0));
            std::vector<Outcome> outcomes;

            const ClassifierConfig classifier_config{threshold, EndPolicy::best};
            for (const auto& [actual, split] : splits) {
                for (const TestFile& file : split.test_files) {
                    Session session(model, classifier_config);
                    Decision decision;
                    for (const Token& token : file.tokens) {
                        decision = session.step(token);
                        if (decision.definitive()) break;
                    }
                    if (!decision.definitive()) decision = session.finish();

                    Outcome outcome =
                        classify_outcome(decision, actual, session.remaining_set().size());
                    outcome.test_size = file.size_class;
                    sweep.by_test_size[file.size_class].add(outcome.kind);
                    sweep.overall.add(outcome.kind);
                    sweep.confusion[category_index.at(actual)][category_index.at(outcome.predicted)]++;
                    outcomes.push_back(std::move(outcome));
                }
            }
            sweep.convergence = convergence_stats(outcomes);
            sweep.remaining = remaining_distribution(outcomes);
            if (config.keep_outcomes) sweep.outcomes = std::move(outcomes);
            report.sweeps.push_back(std::move(sweep));
        }
    }
    return report;
}

// Convenience entry point over raw text, tokenized per the configured mode.
inline ExperimentReport run_experiment(const std::map<std::string, std::string>& texts,
                                       const ExperimentConfig& config) {
    Corpora corpora;
    for (const auto& [id, text] : texts) corpora.emplace(id, tokenize(text, config.mode));
    return run_experiment(corpora, config);
}

}  // namespace seqlid
