#pragma once

#include <cerrno>
#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <istream>
#include <ostream>
#include <sstream>
#include <string>
#include <string_view>
#include <vector>

#include "seqlid/model.hpp"

namespace seqlid {

struct ModelFormatError : std::runtime_error {
    std::size_t line;
    ModelFormatError(std::size_t line_number, const std::string& what)
        : std::runtime_error("model file line " + std::to_string(line_number) + ": " + what),
          line(line_number) {}
};

namespace detail {

// 17 significant digits round-trip IEEE doubles exactly through decimal text.
inline std::string format_double(double value) {
    char buf[32];
    std::snprintf(buf, sizeof(buf), "%.17g", value);
    return buf;
}

inline double parse_double(std::string_view field, std::size_t line, const char* what) {
    const std::string text(field);
    errno = 0;
    char* end = nullptr;
    const double value = std::strtod(text.c_str(), &end);
    if (end != text.c_str() + text.size() || text.empty() || errno == ERANGE)
        throw ModelFormatError(line, std::string("bad ") + what + " value '" + text + "'");
    return value;
}

inline Count parse_count(std::string_view field, std::size_t line, const char* what) {
    const std::string text(field);
    // strtoull silently wraps negative input, so require a leading digit
    if (text.empty() || text[0] < '0' || text[0] > '9')
        throw ModelFormatError(line, std::string("bad ") + what + " value '" + text + "'");
    errno = 0;
    char* end = nullptr;
    const unsigned long long value = std::strtoull(text.c_str(), &end, 10);
    if (end != text.c_str() + text.size() || errno == ERANGE)
        throw ModelFormatError(line, std::string("bad ") + what + " value '" + text + "'");
    return value;
}

inline std::vector<std::string_view> split_tabs(std::string_view line) {
    std::vector<std::string_view> fields;
    std::size_t start = 0;
    while (true) {
        const std::size_t tab = line.find('\t', start);
        if (tab == std::string_view::npos) {
            fields.push_back(line.substr(start));
            return fields;
        }
        fields.push_back(line.substr(start, tab - start));
        start = tab + 1;
    }
}

// Strips "name=" and returns the value part, or throws.
inline std::string_view keyed_value(std::string_view field, std::string_view key, std::size_t line) {
    if (field.size() > key.size() && field.substr(0, key.size()) == key && field[key.size()] == '=')
        return field.substr(key.size() + 1);
    throw ModelFormatError(line, "expected '" + std::string(key) + "=...', got '" + std::string(field) + "'");
}

}  // namespace detail

inline void serialize(const GlobalModel& model, std::ostream& out) {
    using detail::format_double;
    out << "SEQLID\tversion=" << model.format_version << "\tmode=" << to_string(model.mode)
        << "\td=" << format_double(model.estimator.deviations)
        << "\tcutoff=" << model.estimator.small_count_cutoff
        << "\tzero_target=" << format_double(model.estimator.zero_target) << '\n';
    for (const auto& [token, prior] : model.priors)
        out << "PRIOR\t" << token << '\t' << format_double(prior) << '\n';
    out << "UNSEEN_PRIOR\t" << format_double(model.unseen_prior) << '\n';
    for (const auto& cat : model.categories) {
        out << "CATEGORY\t" << cat.id << "\tzero=" << format_double(cat.zero_prob)
            << "\ttokens=" << cat.training_tokens << '\n';
        for (const auto& [token, triple] : cat.token_probs)
            out << "T\t" << token << '\t' << format_double(triple.low) << '\t'
                << format_double(triple.base) << '\t' << format_double(triple.high) << '\n';
    }
}

inline std::string serialize(const GlobalModel& model) {
    std::ostringstream out;
    serialize(model, out);
    return out.str();
}

inline GlobalModel deserialize(std::istream& in) {
    GlobalModel model;
    std::string line;
    std::size_t line_number = 0;

    if (!std::getline(in, line)) throw ModelFormatError(1, "empty model file");
    ++line_number;
    {
        const auto fields = detail::split_tabs(line);
        if (fields.size() != 6 || fields[0] != "SEQLID")
            throw ModelFormatError(line_number, "bad header, expected SEQLID with 5 fields");
        const auto version_field = detail::keyed_value(fields[1], "version", line_number);
        const Count version = detail::parse_count(version_field, line_number, "version");
        if (version != static_cast<Count>(kModelFormatVersion))
            throw ModelFormatError(line_number, "unsupported format version " + std::string(version_field));
        model.format_version = static_cast<int>(version);
        const auto mode = parse_tokenizer_mode(detail::keyed_value(fields[2], "mode", line_number));
        if (!mode) throw ModelFormatError(line_number, "mode must be 'word' or 'shape'");
        model.mode = *mode;
        model.estimator.deviations =
            detail::parse_double(detail::keyed_value(fields[3], "d", line_number), line_number, "d");
        model.estimator.small_count_cutoff =
            detail::parse_count(detail::keyed_value(fields[4], "cutoff", line_number), line_number, "cutoff");
        model.estimator.zero_target = detail::parse_double(
            detail::keyed_value(fields[5], "zero_target", line_number), line_number, "zero_target");
        try {
            model.estimator.validate();
        } catch (const std::invalid_argument& e) {
            throw ModelFormatError(line_number, e.what());
        }
    }

    bool seen_unseen_prior = false;
    CategoryModel* current = nullptr;
    while (std::getline(in, line)) {
        ++line_number;
        const auto fields = detail::split_tabs(line);
        const std::string_view tag = fields[0];
        if (tag == "PRIOR") {
            if (seen_unseen_prior || current)
                throw ModelFormatError(line_number, "PRIOR after the prior section ended");
            if (fields.size() != 3) throw ModelFormatError(line_number, "PRIOR needs 2 fields");
            if (fields[1].empty()) throw ModelFormatError(line_number, "empty token");
            const Token token(fields[1]);
            const double p = detail::parse_double(fields[2], line_number, "prior");
            if (!(p > 0.0 && p <= 1.0)) throw ModelFormatError(line_number, "prior out of range");
            if (!model.priors.emplace(token, p).second)
                throw ModelFormatError(line_number, "duplicate prior for token '" + token + "'");
        } else if (tag == "UNSEEN_PRIOR") {
            if (seen_unseen_prior || current)
                throw ModelFormatError(line_number, "unexpected UNSEEN_PRIOR");
            if (fields.size() != 2) throw ModelFormatError(line_number, "UNSEEN_PRIOR needs 1 field");
            model.unseen_prior = detail::parse_double(fields[1], line_number, "unseen prior");
            if (!(model.unseen_prior > 0.0 && model.unseen_prior <= 1.0))
                throw ModelFormatError(line_number, "unseen prior out of range");
            seen_unseen_prior = true;
        } else if (tag == "CATEGORY") {
            if (!seen_unseen_prior)
                throw ModelFormatError(line_number, "CATEGORY before UNSEEN_PRIOR");
            if (fields.size() != 4) throw ModelFormatError(line_number, "CATEGORY needs 3 fields");
            CategoryModel cat;
            cat.id = std::string(fields[1]);
            if (cat.id.empty()) throw ModelFormatError(line_number, "empty category id");
            if (model.find(cat.id))
                throw ModelFormatError(line_number, "duplicate category '" + cat.id + "'");
            cat.zero_prob = detail::parse_double(detail::keyed_value(fields[2], "zero", line_number),
                                                 line_number, "zero probability");
            if (!(cat.zero_prob > 0.0 && cat.zero_prob <= 1.0))
                throw ModelFormatError(line_number, "zero probability out of range");
            cat.training_tokens = detail::parse_count(
                detail::keyed_value(fields[3], "tokens", line_number), line_number, "token count");
            if (cat.training_tokens == 0)
                throw ModelFormatError(line_number, "category with zero training tokens");
            model.categories.push_back(std::move(cat));
            current = &model.categories.back();
        } else if (tag == "T") {
            if (!current) throw ModelFormatError(line_number, "T line outside a category");
            if (fields.size() != 5) throw ModelFormatError(line_number, "T needs 4 fields");
            if (fields[1].empty()) throw ModelFormatError(line_number, "empty token");
            const Token token(fields[1]);
            ProbabilityTriple triple;
            triple.low = detail::parse_double(fields[2], line_number, "low");
            triple.base = detail::parse_double(fields[3], line_number, "base");
            triple.high = detail::parse_double(fields[4], line_number, "high");
            if (!triple.ordered())
                throw ModelFormatError(line_number, "triple violates low <= base <= high");
            if (!current->token_probs.emplace(token, triple).second)
                throw ModelFormatError(line_number, "duplicate token '" + token + "' in category '" +
                                                        current->id + "'");
        } else {
            throw ModelFormatError(line_number, "unknown line tag '" + std::string(tag) + "'");
        }
    }
    if (!seen_unseen_prior)
        throw ModelFormatError(line_number + 1, "truncated file: missing UNSEEN_PRIOR");
    if (model.categories.empty())
        throw ModelFormatError(line_number + 1, "truncated file: no categories");
    return model;
}

inline GlobalModel deserialize(const std::string& text) {
    std::istringstream in(text);
    return deserialize(in);
}

inline void save_model(const GlobalModel& model, const std::string& path) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw std::runtime_error("cannot open '" + path + "' for writing");
    serialize(model, out);
    out.flush();
    if (!out) throw std::runtime_error("write failed for '" + path + "'");
}

inline GlobalModel load_model(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw std::runtime_error("cannot open model file '" + path + "'");
    return deserialize(in);
}

}  // namespace seqlid
