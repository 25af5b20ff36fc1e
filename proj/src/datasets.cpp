// SPDX-License-Identifier: Apache-2.0
#include <teamlab/datasets.hpp>
#include <teamlab/rng.hpp>

#include <algorithm>
#include <cmath>
#include <map>

namespace teamlab
{

namespace
{

[[noreturn]] void malformed(std::size_t line, const std::string& detail)
{
    throw DatasetError(DatasetError::Kind::MalformedRecord, line, detail);
}

std::string text_field(const Json& j, const char* key, std::size_t line)
{
    if (!j.contains(key) || !j[key].is_string())
        malformed(line, std::string("missing string field '") + key + "'");
    return j[key].get<std::string>();
}

std::string id_field(const Json& j, std::initializer_list<const char*> keys, const std::string& fallback)
{
    for (auto key: keys)
        if (j.contains(key))
        {
            const auto& v = j[key];
            return v.is_string() ? v.get<std::string>() : v.dump();
        }
    return fallback;
}

Question adapt_cs(const Json& j, std::size_t line)
{
    Question q;
    q.dataset = DatasetId::CS;
    q.id = id_field(j, { "id" }, "CS-" + std::to_string(line));
    if (!j.contains("question") || !j["question"].is_object())
        malformed(line, "missing object field 'question'");
    const auto& question = j["question"];
    q.text = text_field(question, "stem", line);
    if (!question.contains("choices") || !question["choices"].is_array())
        malformed(line, "missing array field 'question.choices'");
    for (const auto& c: question["choices"])
    {
        auto const label = text_field(c, "label", line);
        if (label.size() != 1)
            throw DatasetError(DatasetError::Kind::UnknownLabel, line, "choice label '" + label + "'");
        q.options.push_back(Option { label[0], text_field(c, "text", line) });
    }
    auto const key = text_field(j, "answerKey", line);
    if (key.size() != 1)
        throw DatasetError(DatasetError::Kind::UnknownLabel, line, "answerKey '" + key + "'");
    q.gold = key[0];
    return q;
}

Question adapt_st(const Json& j, std::size_t line)
{
    Question q;
    q.dataset = DatasetId::ST;
    q.id = id_field(j, { "qid", "id" }, "ST-" + std::to_string(line));
    q.text = text_field(j, "question", line);
    q.options = { { 'A', "yes" }, { 'B', "no" } };
    if (!j.contains("answer") || !j["answer"].is_boolean())
        throw DatasetError(DatasetError::Kind::UnknownLabel, line, "'answer' must be true or false");
    q.gold = j["answer"].get<bool>() ? 'A' : 'B';
    return q;
}

Question adapt_sqa(const Json& j, std::size_t line)
{
    Question q;
    q.dataset = DatasetId::SQA;
    q.id = id_field(j, { "id" }, "SQA-" + std::to_string(line));
    q.text = text_field(j, "context", line) + "\n" + text_field(j, "question", line);
    q.options = {
        { 'A', text_field(j, "answerA", line) },
        { 'B', text_field(j, "answerB", line) },
        { 'C', text_field(j, "answerC", line) },
    };
    if (!j.contains("label"))
        malformed(line, "missing field 'label'");
    auto const label = j["label"].is_string() ? trim(j["label"].get<std::string>()) : j["label"].dump();
    if (label != "1" && label != "2" && label != "3")
        throw DatasetError(DatasetError::Kind::UnknownLabel, line, "label '" + label + "'");
    q.gold = static_cast<Label>('A' + (label[0] - '1'));
    return q;
}

Question adapt_ih(const Json& j, std::size_t line)
{
    Question q;
    q.dataset = DatasetId::IH;
    q.id = id_field(j, { "id", "ID" }, "IH-" + std::to_string(line));
    q.text = "Which category best describes the following post?\nPost: " + text_field(j, "post", line);
    q.options = { { 'A', "implicit hate" }, { 'B', "explicit hate" }, { 'C', "non-hate" } };
    auto const cls = text_field(j, "class", line);
    if (cls == "implicit_hate")
        q.gold = 'A';
    else if (cls == "explicit_hate")
        q.gold = 'B';
    else if (cls == "not_hate")
        q.gold = 'C';
    else
        throw DatasetError(DatasetError::Kind::UnknownLabel, line, "class '" + cls + "'");
    return q;
}

} // namespace

Sampling sampling_from_string(std::string_view text)
{
    auto fail = [&] {
        throw ValidationError(ValidationError::Kind::InvalidConfig, "sample", "unrecognized sampling '" + std::string(text) + "'");
    };
    if (text == "full")
        return Sampling::full();
    if (text == "fraction")
        return Sampling::share(kDefaultFraction);
    auto const colon = text.find(':');
    if (colon == std::string_view::npos)
        fail();
    auto const head = text.substr(0, colon);
    auto const value = std::string(text.substr(colon + 1));
    Sampling s;
    try
    {
        std::size_t used = 0;
        if (head == "per_class")
        {
            s = Sampling::classes(std::stoi(value, &used));
        }
        else if (head == "fraction")
            s = Sampling::share(std::stod(value, &used));
        else
            fail();
        if (used != value.size())
            fail();
    }
    catch (const std::logic_error&)
    {
        fail();
    }
    validate(s);
    return s;
}

std::string to_string(const Sampling& s)
{
    switch (s.mode)
    {
        case Sampling::Mode::Full:
            return "full";
        case Sampling::Mode::PerClass:
            return "per_class:" + std::to_string(s.per_class);
        case Sampling::Mode::Fraction:
        {
            auto text = Json(s.fraction).dump();
            return "fraction:" + text;
        }
    }
    return "full";
}

void validate(const Sampling& s)
{
    if (s.mode == Sampling::Mode::PerClass && s.per_class < 1)
        throw ValidationError(ValidationError::Kind::InvalidConfig, "sample", "per_class n must be at least 1");
    if (s.mode == Sampling::Mode::Fraction && !(s.fraction > 0.0 && s.fraction <= 1.0))
        throw ValidationError(ValidationError::Kind::InvalidConfig, "sample", "fraction must lie in (0,1]");
}

Question adapt_record(DatasetId dataset, const Json& record, std::size_t line)
{
    if (!record.is_object())
        malformed(line, "record is not an object");
    Question q;
    try
    {
        if (record.contains("gold"))
        {
            auto copy = record;
            if (!copy.contains("dataset"))
                copy["dataset"] = to_string(dataset);
            q = question_from_json(copy);
        }
        else
        {
            switch (dataset)
            {
                case DatasetId::CS:
                    q = adapt_cs(record, line);
                    break;
                case DatasetId::ST:
                    q = adapt_st(record, line);
                    break;
                case DatasetId::SQA:
                    q = adapt_sqa(record, line);
                    break;
                case DatasetId::IH:
                    q = adapt_ih(record, line);
                    break;
            }
        }
        normalize_labels(q);
        validate_question(q);
    }
    catch (const DatasetError&)
    {
        throw;
    }
    catch (const ValidationError& e)
    {
        auto const kind = e.kind() == ValidationError::Kind::GoldNotInOptions ? DatasetError::Kind::UnknownLabel
                                                                            : DatasetError::Kind::MalformedRecord;
        throw DatasetError(kind, line, e.what());
    }
    catch (const Json::exception& e)
    {
        malformed(line, e.what());
    }
    return q;
}

std::vector<Question> load_questions(DatasetId dataset, const std::filesystem::path& path)
{
    if (!std::filesystem::exists(path))
        throw DatasetError(DatasetError::Kind::Io, 0, "no such file: " + path.string());
    auto const text = read_file(path);
    std::vector<Question> out;
    std::size_t line = 0;
    std::size_t pos = 0;
    while (pos < text.size())
    {
        auto end = text.find('\n', pos);
        if (end == std::string::npos)
            end = text.size();
        ++line;
        auto const raw = std::string_view(text).substr(pos, end - pos);
        pos = end + 1;
        if (trim(raw).empty())
            continue;
        Json record;
        try
        {
            record = Json::parse(raw);
        }
        catch (const Json::exception& e)
        {
            malformed(line, e.what());
        }
        out.push_back(adapt_record(dataset, record, line));
    }
    return out;
}

std::vector<Question> load(const DatasetSpec& spec)
{
    auto const all = load_questions(spec.dataset, spec.path);
    return subsample(all, spec.sampling, spec.seed);
}

std::vector<Question> subsample(std::span<const Question> qs, const Sampling& sampling, std::uint64_t seed)
{
    validate(sampling);
    std::vector<bool> keep(qs.size(), false);
    switch (sampling.mode)
    {
        case Sampling::Mode::Full:
            return { qs.begin(), qs.end() };
        case Sampling::Mode::PerClass:
        {
            std::map<Label, std::vector<std::size_t>> by_class;
            for (std::size_t i = 0; i < qs.size(); ++i)
                by_class[qs[i].gold].push_back(i);
            auto const n = static_cast<std::size_t>(sampling.per_class);
            for (const auto& [label, members]: by_class)
            {
                if (members.size() < n)
                    throw DatasetError(DatasetError::Kind::ClassTooSmall,
                                       0,
                                       "class " + std::string(1, label) + " has " + std::to_string(members.size())
                                           + " items, fewer than " + std::to_string(n));
                Rng rng(derive_seed(seed, std::string("per_class:") + label));
                for (auto idx: rng.sample_indices(members.size(), n))
                    keep[members[idx]] = true;
            }
            break;
        }
        case Sampling::Mode::Fraction:
        {
            auto k = static_cast<std::size_t>(std::llround(sampling.fraction * static_cast<double>(qs.size())));
            if (k == 0 && !qs.empty())
                k = 1;
            Rng rng(derive_seed(seed, "fraction"));
            for (auto idx: rng.sample_indices(qs.size(), k))
                keep[idx] = true;
            break;
        }
    }
    std::vector<Question> out;
    for (std::size_t i = 0; i < qs.size(); ++i)
        if (keep[i])
            out.push_back(qs[i]);
    return out;
}

void save_questions(const std::filesystem::path& path, std::span<const Question> qs)
{
    std::vector<Json> rows;
    rows.reserve(qs.size());
    for (const auto& q: qs)
        rows.push_back(to_json(q));
    write_jsonl(path, rows);
}

} // namespace teamlab
