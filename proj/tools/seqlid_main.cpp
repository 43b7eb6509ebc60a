// seqlid - sequential text-stream classifier with per-category confidence
// intervals. Subcommands: train, classify, eval, tokenize, split.

#include <algorithm>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <map>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "seqlid/classifier.hpp"
#include "seqlid/harness.hpp"
#include "seqlid/model.hpp"
#include "seqlid/model_io.hpp"
#include "seqlid/report_io.hpp"
#include "seqlid/tokenizer.hpp"
#include "seqlid/version.hpp"

namespace fs = std::filesystem;

namespace {

constexpr int kExitOk = 0;
constexpr int kExitUsage = 1;
constexpr int kExitData = 2;

struct UsageError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

std::string read_stream(std::istream& in) {
    std::ostringstream buffer;
    buffer << in.rdbuf();
    return buffer.str();
}

std::string read_file(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw std::runtime_error("cannot open '" + path + "'");
    return read_stream(in);
}

std::string read_input(const std::string& path) {
    return path.empty() || path == "-" ? read_stream(std::cin) : read_file(path);
}

// One UTF-8 text file per category; the filename stem is the category id.
std::map<std::string, std::string> read_corpus_dir(const std::string& dir) {
    if (!fs::is_directory(dir)) throw std::runtime_error("'" + dir + "' is not a directory");
    std::vector<fs::path> paths;
    for (const auto& entry : fs::directory_iterator(dir)) {
        if (!entry.is_regular_file()) continue;
        if (entry.path().filename().string().front() == '.') continue;
        paths.push_back(entry.path());
    }
    std::sort(paths.begin(), paths.end());
    std::map<std::string, std::string> corpora;
    for (const auto& path : paths) {
        const std::string id = path.stem().string();
        if (id.empty()) continue;
        if (!corpora.emplace(id, read_file(path.string())).second)
            throw std::runtime_error("duplicate category id '" + id + "' in " + dir);
    }
    if (corpora.size() < 2)
        throw std::runtime_error("corpus dir '" + dir + "' must hold at least 2 category files");
    return corpora;
}

seqlid::TokenizerMode parse_mode_or_throw(const std::string& name) {
    const auto mode = seqlid::parse_tokenizer_mode(name);
    if (!mode) throw UsageError("mode must be 'word' or 'shape', got '" + name + "'");
    return *mode;
}

seqlid::EndPolicy parse_end_policy_or_throw(const std::string& name) {
    if (name == "best") return seqlid::EndPolicy::best;
    if (name == "set") return seqlid::EndPolicy::candidate_set;
    throw UsageError("end policy must be 'best' or 'set', got '" + name + "'");
}

// Optional line-oriented key=value defaults, overridden by flags.
struct ConfigFile {
    std::map<std::string, std::string> values;

    static ConfigFile load(const std::string& path) {
        std::ifstream in(path);
        if (!in) throw UsageError("cannot open config file '" + path + "'");
        ConfigFile config;
        std::string line;
        std::size_t line_number = 0;
        while (std::getline(in, line)) {
            ++line_number;
            if (!line.empty() && line.back() == '\r') line.pop_back();
            const std::size_t first = line.find_first_not_of(" \t");
            if (first == std::string::npos || line[first] == '#') continue;
            const std::size_t eq = line.find('=', first);
            if (eq == std::string::npos)
                throw UsageError("config line " + std::to_string(line_number) + ": expected key=value");
            auto trim = [](std::string s) {
                const auto b = s.find_first_not_of(" \t");
                const auto e = s.find_last_not_of(" \t");
                return b == std::string::npos ? std::string() : s.substr(b, e - b + 1);
            };
            const std::string key = trim(line.substr(first, eq - first));
            if (key.empty())
                throw UsageError("config line " + std::to_string(line_number) + ": empty key");
            config.values[key] = trim(line.substr(eq + 1));
        }
        return config;
    }

    // Applies the configured value unless the flag was given on the command line.
    void apply_string(const CLI::App& cmd, const std::string& flag, const std::string& key,
                      std::string& target) const {
        const auto it = values.find(key);
        if (it == values.end()) return;
        if (cmd.get_option(flag)->count() > 0) return;
        target = it->second;
    }

    template <typename T>
    void apply_number(const CLI::App& cmd, const std::string& flag, const std::string& key,
                      T& target) const {
        const auto it = values.find(key);
        if (it == values.end()) return;
        if (cmd.get_option(flag)->count() > 0) return;
        std::istringstream in(it->second);
        T value{};
        if (!(in >> value) || !in.eof())
            throw UsageError("config key '" + key + "': bad value '" + it->second + "'");
        target = value;
    }
};

void write_tokens_file(const fs::path& path, const std::vector<seqlid::Token>& tokens) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw std::runtime_error("cannot open '" + path.string() + "' for writing");
    for (std::size_t i = 0; i < tokens.size(); ++i) {
        if (i > 0) out << ' ';
        out << tokens[i];
    }
    out << '\n';
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"sequential text-stream classifier with per-category confidence intervals"};
    app.require_subcommand(1);
    app.set_version_flag("--version", std::string("seqlid ") + seqlid::kVersion +
                                          " (model format version " +
                                          std::to_string(seqlid::kModelFormatVersion) + ")");
    std::string config_path;
    app.add_option("--config", config_path, "key=value defaults file (flags win)");

    // shared option values with built-in defaults
    std::string mode_name = "word";
    std::string end_policy_name = "best";
    std::string report_format = "text";
    double deviations = 2.0;
    std::size_t small_count_cutoff = 10;
    double zero_target = 0.95;
    double threshold = 0.0;

    auto* tokenize_cmd = app.add_subcommand("tokenize", "emit one token per line");
    std::string tokenize_input;
    tokenize_cmd->add_option("--mode", mode_name, "word or shape")->capture_default_str();
    tokenize_cmd->add_option("--input", tokenize_input, "input file (default: stdin)");

    auto* train_cmd = app.add_subcommand("train", "train a model from a corpus directory");
    std::string train_dir, train_out;
    train_cmd->add_option("--corpus-dir", train_dir, "directory with one text file per category")
        ->required();
    train_cmd->add_option("--out", train_out, "model file to write")->required();
    train_cmd->add_option("--mode", mode_name, "word or shape")->capture_default_str();
    train_cmd->add_option("--d", deviations, "confidence width in standard deviations")
        ->check(CLI::PositiveNumber)
        ->capture_default_str();
    train_cmd->add_option("--cutoff", small_count_cutoff, "exact-interval count cutoff")
        ->check(CLI::PositiveNumber)
        ->capture_default_str();
    train_cmd->add_option("--zero-target", zero_target, "zero-probability confidence target")
        ->check(CLI::Range(1e-9, 1.0 - 1e-9))
        ->capture_default_str();

    auto* classify_cmd = app.add_subcommand("classify", "classify a token stream");
    std::string classify_model, classify_input;
    bool trace = false;
    classify_cmd->add_option("--model", classify_model, "model file")->required();
    classify_cmd->add_option("--threshold", threshold, "activation threshold")
        ->check(CLI::NonNegativeNumber)
        ->capture_default_str();
    classify_cmd->add_option("--end-policy", end_policy_name, "best or set")->capture_default_str();
    classify_cmd->add_option("--input", classify_input, "input file (default: stdin)");
    classify_cmd->add_flag("--trace", trace, "emit per-token accumulator triples");

    auto* split_cmd = app.add_subcommand("split", "carve a corpus into train/test files");
    std::string split_input, split_out_dir;
    std::vector<std::size_t> train_sizes{2000, 200};
    std::vector<std::size_t> test_sizes{1, 5, 10, 20};
    std::size_t files_per_size = 25;
    std::uint64_t seed = 0;
    bool shuffle = false;
    split_cmd->add_option("--input", split_input, "corpus text file")->required();
    split_cmd->add_option("--out-dir", split_out_dir, "directory for the slice files")->required();
    split_cmd->add_option("--mode", mode_name, "word or shape")->capture_default_str();
    split_cmd->add_option("--train-sizes", train_sizes, "training slice sizes")
        ->delimiter(',')
        ->capture_default_str();
    split_cmd->add_option("--test-sizes", test_sizes, "test file sizes")
        ->delimiter(',')
        ->capture_default_str();
    split_cmd->add_option("--files-per-size", files_per_size, "test files per size")
        ->capture_default_str();
    split_cmd->add_option("--seed", seed, "shuffle seed")->capture_default_str();
    split_cmd->add_flag("--shuffle", shuffle, "permute slice order");

    auto* eval_cmd = app.add_subcommand("eval", "run the full train/sweep/classify protocol");
    std::string eval_dir;
    std::vector<double> thresholds{0.0};
    eval_cmd->add_option("--corpus-dir", eval_dir, "directory with one text file per category")
        ->required();
    eval_cmd->add_option("--mode", mode_name, "word or shape")->capture_default_str();
    eval_cmd->add_option("--thresholds", thresholds, "activation thresholds to sweep")
        ->delimiter(',')
        ->check(CLI::NonNegativeNumber)
        ->capture_default_str();
    eval_cmd->add_option("--train-sizes", train_sizes, "training slice sizes")
        ->delimiter(',')
        ->capture_default_str();
    eval_cmd->add_option("--test-sizes", test_sizes, "test file sizes")
        ->delimiter(',')
        ->capture_default_str();
    eval_cmd->add_option("--files-per-size", files_per_size, "test files per size")
        ->capture_default_str();
    eval_cmd->add_option("--seed", seed, "split shuffle seed")->capture_default_str();
    eval_cmd->add_option("--report", report_format, "text or json")->capture_default_str();
    eval_cmd->add_option("--d", deviations, "confidence width in standard deviations")
        ->check(CLI::PositiveNumber)
        ->capture_default_str();
    eval_cmd->add_option("--cutoff", small_count_cutoff, "exact-interval count cutoff")
        ->check(CLI::PositiveNumber)
        ->capture_default_str();
    eval_cmd->add_option("--zero-target", zero_target, "zero-probability confidence target")
        ->check(CLI::Range(1e-9, 1.0 - 1e-9))
        ->capture_default_str();
    eval_cmd->add_flag("--shuffle", shuffle, "permute slice order");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        return app.exit(e) == 0 ? kExitOk : kExitUsage;
    }

    try {
        if (!config_path.empty()) {
            const ConfigFile config = ConfigFile::load(config_path);
            CLI::App* active = app.get_subcommands().front();
            auto has = [&](const std::string& flag) { return active->get_option_no_throw(flag); };
            if (has("--mode")) config.apply_string(*active, "--mode", "mode", mode_name);
            if (has("--d")) config.apply_number(*active, "--d", "d", deviations);
            if (has("--cutoff"))
                config.apply_number(*active, "--cutoff", "small_count_cutoff", small_count_cutoff);
            if (has("--zero-target"))
                config.apply_number(*active, "--zero-target", "zero_target", zero_target);
            if (has("--threshold")) config.apply_number(*active, "--threshold", "threshold", threshold);
            if (has("--end-policy"))
                config.apply_string(*active, "--end-policy", "end_policy", end_policy_name);
            if (has("--report")) config.apply_string(*active, "--report", "report", report_format);
        }

        if (*tokenize_cmd) {
            const auto mode = parse_mode_or_throw(mode_name);
            for (const seqlid::Token& token : seqlid::tokenize(read_input(tokenize_input), mode))
                std::cout << token << '\n';
            return kExitOk;
        }

        if (*train_cmd) {
            const auto mode = parse_mode_or_throw(mode_name);
            seqlid::EstimatorConfig estimator;
            estimator.deviations = deviations;
            estimator.small_count_cutoff = small_count_cutoff;
            estimator.zero_target = zero_target;
            seqlid::Corpora corpora;
            for (const auto& [id, text] : read_corpus_dir(train_dir))
                corpora.emplace(id, seqlid::tokenize(text, mode));
            const seqlid::GlobalModel model = seqlid::train(corpora, estimator, mode);
            seqlid::save_model(model, train_out);
            std::cerr << "trained " << model.categories.size() << " categories, wrote " << train_out
                      << "\n";
            return kExitOk;
        }

        if (*classify_cmd) {
            const seqlid::GlobalModel model = seqlid::load_model(classify_model);
            const seqlid::ClassifierConfig config{threshold, parse_end_policy_or_throw(end_policy_name)};
            const std::vector<seqlid::Token> tokens =
                seqlid::tokenize(read_input(classify_input), model.mode);

            seqlid::Session session(model, config);
            seqlid::Decision decision;
            for (const seqlid::Token& token : tokens) {
                decision = session.step(token);
                if (trace) {
                    const auto& acc = session.accumulators();
                    for (std::size_t i = 0; i < acc.size(); ++i) {
                        char nums[96];
                        std::snprintf(nums, sizeof(nums), "%.10g\t%.10g\t%.10g", acc[i].low,
                                      acc[i].base, acc[i].high);
                        std::cout << session.tokens_seen() << '\t' << token << '\t'
                                  << model.categories[i].id << '\t' << nums << '\n';
                    }
                }
                if (decision.definitive()) break;
            }
            if (!decision.definitive()) decision = session.finish();

            if (decision.definitive()) {
                std::cout << "DECIDED " << decision.category << ' ' << decision.tokens_consumed << '\n';
            } else if (decision.status == seqlid::Decision::Status::exhausted_best) {
                std::cout << "EXHAUSTED " << decision.category << '\n';
            } else {
                std::cout << "EXHAUSTED";
                for (const std::string& id : decision.candidates) std::cout << ' ' << id;
                std::cout << '\n';
            }
            return kExitOk;
        }

        if (*split_cmd) {
            const auto mode = parse_mode_or_throw(mode_name);
            seqlid::SplitSpec spec;
            spec.train_sizes = train_sizes;
            spec.test_file_sizes = test_sizes;
            spec.files_per_size = files_per_size;
            spec.shuffle = shuffle;
            const auto tokens = seqlid::tokenize(read_file(split_input), mode);
            const seqlid::CorpusSplit split = seqlid::split_corpus(tokens, spec, seed);

            fs::create_directories(split_out_dir);
            const fs::path dir(split_out_dir);
            for (std::size_t i = 0; i < split.train_files.size(); ++i) {
                const fs::path path =
                    dir / ("train_" + std::to_string(i + 1) + "_" +
                           std::to_string(spec.train_sizes[i]) + ".txt");
                write_tokens_file(path, split.train_files[i]);
                std::cout << path.string() << '\n';
            }
            std::map<std::size_t, std::size_t> ordinal;
            for (const seqlid::TestFile& file : split.test_files) {
                const std::size_t n = ++ordinal[file.size_class];
                const fs::path path = dir / ("test_" + std::to_string(file.size_class) + "_" +
                                             std::to_string(n) + ".txt");
                write_tokens_file(path, file.tokens);
                std::cout << path.string() << '\n';
            }
            return kExitOk;
        }

        if (*eval_cmd) {
            seqlid::ExperimentConfig config;
            config.mode = parse_mode_or_throw(mode_name);
            config.split.train_sizes = train_sizes;
            config.split.test_file_sizes = test_sizes;
            config.split.files_per_size = files_per_size;
            config.split.shuffle = shuffle;
            config.thresholds = thresholds;
            config.seed = seed;
            config.estimator.deviations = deviations;
            config.estimator.small_count_cutoff = small_count_cutoff;
            config.estimator.zero_target = zero_target;
            if (report_format != "text" && report_format != "json")
                throw UsageError("report format must be 'text' or 'json', got '" + report_format + "'");

            const seqlid::ExperimentReport report =
                seqlid::run_experiment(read_corpus_dir(eval_dir), config);
            if (report_format == "json")
                std::cout << seqlid::to_json(report).dump(2) << '\n';
            else
                std::cout << seqlid::render_text(report);
            return kExitOk;
        }
    } catch (const UsageError& e) {
        std::cerr << "error: " << e.what() << '\n';
        return kExitUsage;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << '\n';
        return kExitData;
    }
    return kExitUsage;
}
