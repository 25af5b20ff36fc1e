// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <teamlab/domain.hpp>
#include <teamlab/json_io.hpp>

#include <cstdint>
#include <filesystem>
#include <span>
#include <string>
#include <vector>

namespace teamlab
{

struct Sampling
{
    enum class Mode
    {
        Full,
        PerClass,
        Fraction,
    };

    Mode mode = Mode::Full;
    int per_class = 0;
    double fraction = 0.15;

    static Sampling full() { return {}; }
    static Sampling classes(int n) { return { Mode::PerClass, n, 0.15 }; }
    static Sampling share(double p) { return { Mode::Fraction, 0, p }; }

    bool operator==(const Sampling&) const = default;
};

inline constexpr double kDefaultFraction = 0.15;

/// "full", "per_class:N" or "fraction:P" ("fraction" alone means 0.15).
[[nodiscard]] Sampling sampling_from_string(std::string_view text);
[[nodiscard]] std::string to_string(const Sampling& s);

/// Throws ValidationError for p outside (0,1] or n < 1.
void validate(const Sampling& s);

struct DatasetSpec
{
    DatasetId dataset = DatasetId::CS;
    std::string split;
    std::filesystem::path path;
    Sampling sampling;
    std::uint64_t seed = 0;
};

/// Maps one raw record to a validated Question. Records carrying "gold"
/// are taken as already normalized. `line` is 1-based, for errors.
[[nodiscard]] Question adapt_record(DatasetId dataset, const Json& record, std::size_t line);

/// Every record of a JSONL file, in file order.
[[nodiscard]] std::vector<Question> load_questions(DatasetId dataset, const std::filesystem::path& path);

/// load_questions followed by subsample.
[[nodiscard]] std::vector<Question> load(const DatasetSpec& spec);

/// Seeded selection that keeps the input order. Per-class mode draws
/// exactly n items for each gold label present and throws
/// DatasetError(ClassTooSmall) if any class has fewer.
[[nodiscard]] std::vector<Question> subsample(std::span<const Question> qs, const Sampling& sampling, std::uint64_t seed);

/// Normalized JSONL: id, text, options, gold, dataset.
void save_questions(const std::filesystem::path& path, std::span<const Question> qs);

} // namespace teamlab
