#pragma once

#include <cstdio>
#include <sstream>
#include <string>

#include "json.hpp"
#include "seqlid/harness.hpp"

namespace seqlid {

namespace detail {

inline std::string fixed1(double value) {
    char buf[32];
    std::snprintf(buf, sizeof(buf), "%.1f", value);
    return buf;
}

inline std::string fixed2(double value) {
    char buf[32];
    std::snprintf(buf, sizeof(buf), "%.2f", value);
    return buf;
}

inline std::string pad_left(const std::string& text, std::size_t width) {
    return text.size() >= width ? text : std::string(width - text.size(), ' ') + text;
}

inline std::string threshold_label(double threshold) {
    std::string label = fixed1(threshold);
    if (label.size() > 2 && label.substr(label.size() - 2) == ".0")
        label.resize(label.size() - 2);
    return label;
}

}  // namespace detail

inline std::string render_text(const ExperimentReport& report) {
    using detail::fixed2;
    using detail::pad_left;
    using detail::threshold_label;
    constexpr std::size_t w = 8;

    std::ostringstream out;
    out << "categories: " << report.categories.size() << " | mode: " << to_string(report.mode)
        << " | seed: " << report.seed << "\n";
    out << "split: train";
    for (const std::size_t s : report.split.train_sizes) out << ' ' << s;
    out << "; test";
    for (const std::size_t s : report.split.test_file_sizes) out << ' ' << s;
    out << " x" << report.split.files_per_size << (report.split.shuffle ? " (shuffled)" : "") << "\n";

    for (const std::size_t train_size : report.split.train_sizes) {
        out << "\n=== training size " << train_size << " ===\n";

        out << "\nAccuracy (%) and decisiveness (%) by tokens of test data\n";
        out << pad_left("threshold", 10);
        for (const std::size_t s : report.split.test_file_sizes)
            out << pad_left("acc " + std::to_string(s), w);
        out << pad_left("acc all", w) << " |";
        for (const std::size_t s : report.split.test_file_sizes)
            out << pad_left("dec " + std::to_string(s), w);
        out << pad_left("dec all", w) << "\n";
        for (const double threshold : report.thresholds) {
            const ThresholdSweep* sweep = report.find_sweep(train_size, threshold);
            if (!sweep) continue;
            out << pad_left(threshold_label(threshold), 10);
            for (const std::size_t s : report.split.test_file_sizes) {
                const auto it = sweep->by_test_size.find(s);
                out << pad_left(it == sweep->by_test_size.end()
                                    ? "-"
                                    : detail::fixed1(100.0 * it->second.accuracy()),
                                w);
            }
            out << pad_left(detail::fixed1(100.0 * sweep->overall.accuracy()), w) << " |";
            for (const std::size_t s : report.split.test_file_sizes) {
                const auto it = sweep->by_test_size.find(s);
                out << pad_left(it == sweep->by_test_size.end()
                                    ? "-"
                                    : detail::fixed1(100.0 * it->second.decisiveness()),
                                w);
            }
            out << pad_left(detail::fixed1(100.0 * sweep->overall.decisiveness()), w) << "\n";
        }

        out << "\nTokens read before convergence (definitive decisions)\n";
        out << pad_left("threshold", 10) << pad_left("correct", w) << pad_left("incorrect", 10)
            << pad_left("all", w) << pad_left("max", w) << "\n";
        for (const double threshold : report.thresholds) {
            const ThresholdSweep* sweep = report.find_sweep(train_size, threshold);
            if (!sweep) continue;
            const ConvergenceStats& c = sweep->convergence;
            out << pad_left(threshold_label(threshold), 10)
                << pad_left(c.correct_mean ? fixed2(*c.correct_mean) : "-", w)
                << pad_left(c.incorrect_mean ? fixed2(*c.incorrect_mean) : "-", 10)
                << pad_left(c.all_mean ? fixed2(*c.all_mean) : "-", w)
                << pad_left(c.all_mean ? std::to_string(c.max_tokens) : "-", w) << "\n";
        }

        // Remaining-set and confusion detail for the strictest threshold.
        const double top_threshold = *std::max_element(report.thresholds.begin(), report.thresholds.end());
        const ThresholdSweep* sweep = report.find_sweep(train_size, top_threshold);
        if (!sweep) continue;

        out << "\nCategories remaining at end of input (threshold "
            << threshold_label(top_threshold) << ")\n";
        out << pad_left("remaining", 10) << pad_left("correct", w) << pad_left("incorrect", 10)
            << pad_left("all", w) << "\n";
        for (const auto& [size, row] : sweep->remaining.histogram)
            out << pad_left(std::to_string(size), 10) << pad_left(std::to_string(row[0]), w)
                << pad_left(std::to_string(row[1]), 10) << pad_left(std::to_string(row[2]), w) << "\n";
        if (sweep->remaining.mean_all)
            out << "mean remaining: " << fixed2(*sweep->remaining.mean_all) << "\n";

        out << "\nConfusion matrix (threshold " << threshold_label(top_threshold)
            << "; rows = actual, columns = assigned)\n";
        for (std::size_t i = 0; i < report.categories.size(); ++i)
            out << pad_left("[" + std::to_string(i + 1) + "]", 5) << " " << report.categories[i] << "\n";
        out << pad_left("", 12);
        for (std::size_t i = 0; i < report.categories.size(); ++i)
            out << pad_left("[" + std::to_string(i + 1) + "]", 6);
        out << "\n";
        for (std::size_t i = 0; i < report.categories.size(); ++i) {
            out << pad_left(report.categories[i], 12);
            for (std::size_t j = 0; j < report.categories.size(); ++j) {
                const std::size_t n = sweep->confusion[i][j];
                out << pad_left(n == 0 ? "." : std::to_string(n), 6);
            }
            out << "\n";
        }
    }
    return out.str();
}

inline nlohmann::json to_json(const OutcomeCounts& counts) {
    return {
        {"definitive_correct", counts.definitive_correct},
        {"nodecision_correct", counts.nodecision_correct},
        {"nodecision_incorrect", counts.nodecision_incorrect},
        {"definitive_incorrect", counts.definitive_incorrect},
        {"total", counts.total()},
        {"accuracy", counts.accuracy()},
        {"decisiveness", counts.decisiveness()},
    };
}

inline nlohmann::json to_json(const ExperimentReport& report) {
    nlohmann::json j;
    j["categories"] = report.categories;
    j["mode"] = to_string(report.mode);
    j["split"] = {
        {"train_sizes", report.split.train_sizes},
        {"test_file_sizes", report.split.test_file_sizes},
        {"files_per_size", report.split.files_per_size},
        {"shuffle", report.split.shuffle},
    };
    j["thresholds"] = report.thresholds;
    j["seed"] = report.seed;
    j["sweeps"] = nlohmann::json::array();
    for (const ThresholdSweep& sweep : report.sweeps) {
        nlohmann::json s;
        s["train_size"] = sweep.train_size;
        s["threshold"] = sweep.threshold;
        s["by_test_size"] = nlohmann::json::object();
        for (const auto& [size, counts] : sweep.by_test_size)
            s["by_test_size"][std::to_string(size)] = to_json(counts);
        s["overall"] = to_json(sweep.overall);
        s["convergence"] = {
            {"correct_mean",
             sweep.convergence.correct_mean ? nlohmann::json(*sweep.convergence.correct_mean)
                                            : nlohmann::json(nullptr)},
            {"incorrect_mean",
             sweep.convergence.incorrect_mean ? nlohmann::json(*sweep.convergence.incorrect_mean)
                                              : nlohmann::json(nullptr)},
            {"all_mean", sweep.convergence.all_mean ? nlohmann::json(*sweep.convergence.all_mean)
                                                    : nlohmann::json(nullptr)},
            {"max_tokens", sweep.convergence.max_tokens},
        };
        nlohmann::json histogram = nlohmann::json::object();
        for (const auto& [size, row] : sweep.remaining.histogram)
            histogram[std::to_string(size)] = {
                {"correct", row[0]}, {"incorrect", row[1]}, {"all", row[2]}};
        s["remaining"] = {
            {"histogram", histogram},
            {"mean_all", sweep.remaining.mean_all ? nlohmann::json(*sweep.remaining.mean_all)
                                                  : nlohmann::json(nullptr)},
        };
        s["confusion"] = sweep.confusion;
        j["sweeps"].push_back(std::move(s));
    }
    return j;
}

}  // namespace seqlid
