// Acceptance suite: end-to-end checks of the estimator, classifier, harness
// and model store at desk scale. Prints one PASS/FAIL line per criterion and
// exits non-zero if any fail.

#include <chrono>
#include <cmath>
#include <cstdio>
#include <random>
#include <set>
#include <string>
#include <vector>

#include "seqlid/classifier.hpp"
#include "seqlid/harness.hpp"
#include "seqlid/model_io.hpp"
#include "seqlid/synthetic.hpp"
#include "seqlid/tokenizer.hpp"
#include "test_oracles.hpp"

using namespace seqlid;

namespace {

// pinned desk-scale experiment: 18 categories over a half-shared vocabulary
constexpr std::uint64_t kExperimentSeed = 404;
constexpr double kTunedThreshold = 10.0;
const std::vector<double> kThresholds = {0.0, 5.0, 10.0, 14.0, 22.0};

int failures = 0;

void report(int id, const char* name, bool pass, const std::string& detail) {
    std::printf("criterion %d %s  %-34s %s\n", id, pass ? "PASS" : "FAIL", name, detail.c_str());
    if (!pass) ++failures;
}

bool close(double a, double b, double tol) { return std::abs(a - b) <= tol; }

double unit_double(std::mt19937_64& rng) {
    return static_cast<double>(rng() >> 11) * 0x1.0p-53;
}

SyntheticSpec experiment_spec() {
    SyntheticSpec spec;
    spec.n_categories = 18;
    spec.vocab_size = 5000;
    spec.tokens_per_category = 3100;
    spec.similarity = 0.5;
    spec.zipf_exponent = 1.0;
    return spec;
}

ExperimentConfig experiment_config() {
    ExperimentConfig config;   // default split: train 2000+200, 25 x 1/5/10/20
    config.thresholds = kThresholds;
    config.seed = kExperimentSeed;
    config.keep_outcomes = true;
    return config;
}

void criterion_1_estimator_exactness() {
    bool pass = true;
    std::string detail;

    const long double oracle = -expm1l(logl(0.95L) / 1000.0L);
    const double zero = zero_probability(1000, 0.95);
    pass = pass && close(zero, static_cast<double>(oracle), 1e-12);

    // agreement to 6 significant figures: one unit in the 6th digit
    const auto refined = refined_interval(100, 10000, 2.0);
    pass = pass && close(refined.low, 0.00819003, 1e-8);
    pass = pass && refined.base == 0.01;
    pass = pass && close(refined.high, 0.01221000, 5e-8);

    const auto normal = normal_interval(5000, 10000, 2.0);
    pass = pass && normal.low == 0.49 && normal.base == 0.5 && normal.high == 0.51;

    char buf[128];
    std::snprintf(buf, sizeof(buf), "zero=%.6e refined_low=%.8f normal_low=%.2f", zero,
                  refined.low, normal.low);
    report(1, "estimator exactness", pass, buf);
}

void criterion_2_small_count_oracle() {
    const auto start = std::chrono::steady_clock::now();
    bool pass = true;
    double worst = 0.0;
    for (Count m = 1; m <= 9; ++m) {
        for (const Count n : {Count{10}, Count{50}, Count{200}, Count{1000}}) {
            const auto got = exact_small_count_interval(m, n, 0.05);
            const double low_gap = std::abs(got.low - test_oracles::clopper_pearson_low(m, n, 0.05));
            const double high_gap =
                std::abs(got.high - test_oracles::clopper_pearson_high(m, n, 0.05));
            worst = std::max({worst, low_gap, high_gap});
            pass = pass && low_gap < 1e-6 && high_gap < 1e-6;
        }
    }
    const double seconds =
        std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    pass = pass && seconds < 5.0;
    char buf[96];
    std::snprintf(buf, sizeof(buf), "max |gap|=%.3e in %.2fs", worst, seconds);
    report(2, "small-count oracle equivalence", pass, buf);
}

void criterion_3_ordering_fuzz() {
    const auto start = std::chrono::steady_clock::now();
    std::mt19937_64 rng(1234);
    bool pass = true;
    int refined_cases = 0;
    for (int i = 0; i < 10000; ++i) {
        const Count n = 1 + rng() % 1000000;
        Count m = rng() % (n + 1);
        if (i % 4 == 0) m = rng() % std::min<Count>(n + 1, 12);
        EstimatorConfig config;
        config.deviations = 0.25 + 3.75 * unit_double(rng);
        const auto triple = estimate(m, n, config);
        pass = pass && triple.ordered();

        const double base = static_cast<double>(m) / static_cast<double>(n);
        if (m >= config.small_count_cutoff && base <= config.large_count_base_cutoff) {
            ++refined_cases;
            const double nd = static_cast<double>(n);
            const double md = static_cast<double>(m);
            const double d = config.deviations;
            const double tol = 1e-9 * std::max(1.0, md);
            pass = pass && std::abs(nd * triple.low - (md - d * std::sqrt(nd * triple.low))) < tol;
            if (triple.high < 1.0)
                pass = pass &&
                       std::abs(nd * triple.high - (md + d * std::sqrt(nd * triple.high))) < tol;
        }
    }
    const double seconds =
        std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    pass = pass && seconds < 5.0;
    char buf[96];
    std::snprintf(buf, sizeof(buf), "10000 triples, %d refined-regime, %.2fs", refined_cases,
                  seconds);
    report(3, "ordering invariant fuzz", pass, buf);
}

void criterion_4_classifier_soundness() {
    SyntheticSpec spec;
    spec.n_categories = 6;
    spec.vocab_size = 1500;
    spec.tokens_per_category = 1500;
    spec.similarity = 0.4;
    const Corpora corpora = generate_synthetic_corpora(spec, 77);
    const GlobalModel model = train(corpora);

    std::vector<std::vector<Token>> pools;
    for (const auto& [id, tokens] : corpora) pools.push_back(tokens);
    const std::vector<double> thresholds = {0.0, 2.0, 5.0, 9.0, 14.0};

    std::mt19937_64 rng(555);
    bool pass = true;
    int decided = 0;
    for (int round = 0; round < 1000; ++round) {
        const auto& pool = pools[rng() % pools.size()];
        const std::size_t length = 1 + rng() % 60;
        std::vector<Token> stream;
        for (std::size_t i = 0; i < length; ++i) {
            if (rng() % 12 == 0)
                stream.push_back("never-trained-" + std::to_string(rng() % 7));
            else
                stream.push_back(pool[rng() % pool.size()]);
        }
        const double threshold = thresholds[rng() % thresholds.size()];

        Session session(model, {threshold, EndPolicy::best});
        std::vector<Accumulator> oracle(model.categories.size());
        Decision decision;
        for (const Token& token : stream) {
            decision = session.step(token);
            for (std::size_t i = 0; i < oracle.size(); ++i) {
                const LookupResult found = model.lookup(i, token);
                const double low =
                    found.triple.low > 0.0 ? found.triple.low : model.categories[i].zero_prob;
                oracle[i].low += std::log(low / found.prior);
                oracle[i].base += std::log(found.triple.base / found.prior);
                oracle[i].high += std::log(found.triple.high / found.prior);
            }
            if (decision.definitive()) break;
        }

        const auto& acc = session.accumulators();
        for (std::size_t i = 0; i < acc.size(); ++i) {
            pass = pass && close(acc[i].low, oracle[i].low, 1e-12 * std::max(1.0, std::abs(oracle[i].low)));
            pass = pass && close(acc[i].base, oracle[i].base, 1e-12 * std::max(1.0, std::abs(oracle[i].base)));
            pass = pass && close(acc[i].high, oracle[i].high, 1e-12 * std::max(1.0, std::abs(oracle[i].high)));
        }
        if (decision.definitive()) {
            ++decided;
            std::size_t winner = acc.size();
            for (std::size_t i = 0; i < model.categories.size(); ++i)
                if (model.categories[i].id == decision.category) winner = i;
            pass = pass && winner < acc.size() && acc[winner].base > threshold;
            for (std::size_t i = 0; i < acc.size(); ++i)
                if (i != winner) pass = pass && acc[winner].low > acc[i].high;
        }
    }
    pass = pass && decided > 100;
    char buf[96];
    std::snprintf(buf, sizeof(buf), "1000 streams, %d decided, accumulators match oracle", decided);
    report(4, "classifier soundness", pass, buf);
}

void criterion_5_decisiveness_monotone(const ExperimentReport& report_data) {
    bool pass = true;
    std::string detail;
    for (const std::size_t train_size : report_data.split.train_sizes) {
        double previous = 1.0 + 1e-9;
        for (const double threshold : kThresholds) {
            const ThresholdSweep* sweep = report_data.find_sweep(train_size, threshold);
            pass = pass && sweep != nullptr;
            if (!sweep) continue;
            const double dec = sweep->overall.decisiveness();
            pass = pass && dec <= previous;
            previous = dec;
            if (train_size == 2000) {
                char buf[16];
                std::snprintf(buf, sizeof(buf), "%.3f ", dec);
                detail += buf;
            }
        }
    }
    report(5, "decisiveness monotone in threshold", pass, "train2000: " + detail);
}

void criterion_6_desk_scale(const ExperimentReport& report_data, double seconds) {
    const ThresholdSweep* sweep = report_data.find_sweep(2000, kTunedThreshold);
    bool pass = sweep != nullptr;
    double acc20 = 0.0, mean = 0.0;
    if (sweep) {
        acc20 = sweep->by_test_size.at(20).accuracy();
        pass = pass && acc20 >= 0.95;
        pass = pass && sweep->convergence.all_mean.has_value();
        if (sweep->convergence.all_mean) {
            mean = *sweep->convergence.all_mean;
            pass = pass && mean <= 15.0;
        }
    }
    pass = pass && seconds < 60.0;
    char buf[128];
    std::snprintf(buf, sizeof(buf),
                  "threshold=%.0f acc(20)=%.1f%% mean-convergence=%.2f runtime=%.1fs",
                  kTunedThreshold, 100.0 * acc20, mean, seconds);
    report(6, "desk-scale reproduction", pass, buf);
}

void criterion_7_remaining_sets(const ExperimentReport& report_data, const Corpora& corpora) {
    const double top_threshold = kThresholds.back();
    const ThresholdSweep* sweep = report_data.find_sweep(2000, top_threshold);
    bool pass = sweep != nullptr;

    double mean = 0.0;
    if (sweep) {
        for (const Outcome& outcome : sweep->outcomes)
            if (outcome_definitive(outcome.kind)) pass = pass && outcome.remaining == 1;
        pass = pass && sweep->remaining.mean_all.has_value();
        if (sweep->remaining.mean_all) {
            mean = *sweep->remaining.mean_all;
            pass = pass && mean < static_cast<double>(report_data.categories.size()) / 2.0;
        }
    }

    // membership: the leader is always part of its own remaining set
    Corpora training;
    std::map<std::string, CorpusSplit> splits;
    for (const auto& [id, tokens] : corpora) {
        splits.emplace(id, split_corpus(tokens, report_data.split, report_data.seed));
        training.emplace(id, splits.at(id).train_files[0]);
    }
    const GlobalModel model = train(training);
    std::size_t checked = 0;
    for (const auto& [id, split] : splits) {
        for (const TestFile& file : split.test_files) {
            Session session(model, {top_threshold, EndPolicy::best});
            Decision decision;
            for (const Token& token : file.tokens) {
                decision = session.step(token);
                if (decision.definitive()) break;
            }
            const std::vector<std::string> remaining = session.remaining_set();
            const std::string top =
                decision.definitive() ? decision.category : session.finish().category;
            bool contains = false;
            for (const std::string& cat : remaining) contains = contains || cat == top;
            pass = pass && contains;
            if (decision.definitive())
                pass = pass && remaining.size() == 1 && remaining.front() == decision.category;
            ++checked;
        }
    }
    char buf[128];
    std::snprintf(buf, sizeof(buf), "threshold=%.0f mean-remaining=%.2f of %zu, %zu files checked",
                  top_threshold, mean, report_data.categories.size(), checked);
    report(7, "remaining-set behavior", pass, buf);
}

void criterion_8_round_trip(const ExperimentReport& report_data, const Corpora& corpora) {
    Corpora training;
    std::map<std::string, CorpusSplit> splits;
    for (const auto& [id, tokens] : corpora) {
        splits.emplace(id, split_corpus(tokens, report_data.split, report_data.seed));
        training.emplace(id, splits.at(id).train_files[0]);
    }
    const GlobalModel model = train(training);
    const std::string text = serialize(model);
    const GlobalModel reloaded = deserialize(text);

    bool pass = reloaded == model;
    pass = pass && serialize(reloaded) == text;

    std::size_t files = 0;
    for (const auto& [id, split] : splits) {
        for (const TestFile& file : split.test_files) {
            Session a(model, {kTunedThreshold, EndPolicy::best});
            Session b(reloaded, {kTunedThreshold, EndPolicy::best});
            Decision da, db;
            for (const Token& token : file.tokens) {
                da = a.step(token);
                db = b.step(token);
                if (da.definitive() || db.definitive()) break;
            }
            if (!da.definitive()) da = a.finish();
            if (!db.definitive()) db = b.finish();
            pass = pass && da.status == db.status && da.category == db.category &&
                   da.tokens_consumed == db.tokens_consumed;
            const auto& acc_a = a.accumulators();
            const auto& acc_b = b.accumulators();
            for (std::size_t i = 0; i < acc_a.size(); ++i)
                pass = pass && acc_a[i].low == acc_b[i].low && acc_a[i].base == acc_b[i].base &&
                       acc_a[i].high == acc_b[i].high;
            ++files;
        }
    }
    char buf[96];
    std::snprintf(buf, sizeof(buf), "model %zu bytes, %zu files bit-identical", text.size(), files);
    report(8, "model round trip", pass, buf);
}

void criterion_9_tokenizer_contract() {
    const std::string pool =
        "abcdefghijklmnopqrstuvwxyzABCDEFGHIJKLMNOPQRSTUVWXYZ0123456789.,;:!?()[]{}'\"-/\\&%$#@";
    const std::vector<std::string> extras = {"\xC3\xA9", "\xC3\xA8", "\xC3\xB1", "\xC3\x9F",
                                             "\xC3\x85", "\xC5\x82", "\xC5\xBE", "\xC8\x9B",
                                             "\xE2\x82\xAC", "\xD0\xB6", "\xE4\xB8\xAD"};
    std::mt19937_64 rng(909);
    std::string text;
    std::vector<std::size_t> expected_lengths;
    for (int i = 0; i < 10000; ++i) {
        std::string word;
        std::size_t length = 0;
        const std::size_t chars = 1 + rng() % 12;
        for (std::size_t k = 0; k < chars; ++k) {
            if (rng() % 6 == 0)
                word += extras[rng() % extras.size()];
            else
                word += pool[rng() % pool.size()];
            ++length;
        }
        expected_lengths.push_back(length);
        if (!text.empty()) text += (rng() % 5 == 0) ? "\t" : (rng() % 7 == 0 ? "\n" : " ");
        text += word;
    }

    const auto words = word_tokenize(text);
    const auto shapes = shape_encode(text);
    bool pass = words.size() == 10000 && shapes.size() == 10000;
    const std::set<char> alphabet = {'A', 'a', 'x', 'g', 'i', '0', '.'};
    for (std::size_t i = 0; pass && i < shapes.size(); ++i) {
        pass = pass && shapes[i].size() == expected_lengths[i];
        for (const char c : shapes[i]) pass = pass && alphabet.count(c) == 1;
    }
    char buf[96];
    std::snprintf(buf, sizeof(buf), "10000 words, alphabet closed, lengths preserved");
    report(9, "tokenizer contract", pass, buf);
}

}  // namespace

int main() {
    criterion_1_estimator_exactness();
    criterion_2_small_count_oracle();
    criterion_3_ordering_fuzz();
    criterion_4_classifier_soundness();

    const Corpora corpora = generate_synthetic_corpora(experiment_spec(), kExperimentSeed);
    const auto start = std::chrono::steady_clock::now();
    const ExperimentReport report_data = run_experiment(corpora, experiment_config());
    const double seconds =
        std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();

    criterion_5_decisiveness_monotone(report_data);
    criterion_6_desk_scale(report_data, seconds);
    criterion_7_remaining_sets(report_data, corpora);
    criterion_8_round_trip(report_data, corpora);
    criterion_9_tokenizer_contract();

    if (failures == 0)
        std::printf("all 9 acceptance criteria passed\n");
    else
        std::printf("%d acceptance criteria FAILED\n", failures);
    return failures == 0 ? 0 : 1;
}
