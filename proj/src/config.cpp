// SPDX-License-Identifier: Apache-2.0
#include <teamlab/config.hpp>
#include <teamlab/flat_debate.hpp>

#include <algorithm>
#include <cctype>
#include <set>

namespace teamlab
{

namespace
{

class TomlParser
{
  public:
    explicit TomlParser(std::string_view text): _text(text) {}

    Json parse()
    {
        Json root = Json::object();
        Json* table = &root;
        std::size_t pos = 0;
        while (pos <= _text.size())
        {
            auto end = _text.find('\n', pos);
            if (end == std::string_view::npos)
                end = _text.size();
            _line_text = _text.substr(pos, end - pos);
            ++_line;
            _i = 0;
            pos = end + 1;

            skip_space();
            if (at_end_of_content())
                continue;
            if (peek() == '[')
                table = &header(root);
            else
                key_value(*table);
            skip_space();
            if (!at_end_of_content())
                fail("unexpected trailing characters");
        }
        return root;
    }

  private:
    [[noreturn]] void fail(const std::string& what) const
    {
        throw ConfigError("config line " + std::to_string(_line) + ": " + what);
    }

    char peek() const { return _i < _line_text.size() ? _line_text[_i] : '\0'; }

    void skip_space()
    {
        while (_i < _line_text.size() && (_line_text[_i] == ' ' || _line_text[_i] == '\t' || _line_text[_i] == '\r'))
            ++_i;
    }

    bool at_end_of_content() const { return _i >= _line_text.size() || _line_text[_i] == '#'; }

    std::string bare_key()
    {
        auto const start = _i;
        while (_i < _line_text.size()
               && (std::isalnum(static_cast<unsigned char>(_line_text[_i])) || _line_text[_i] == '_' || _line_text[_i] == '-'))
            ++_i;
        if (_i == start)
            fail("expected a key");
        return std::string(_line_text.substr(start, _i - start));
    }

    std::vector<std::string> dotted_key()
    {
        std::vector<std::string> parts { bare_key() };
        skip_space();
        while (peek() == '.')
        {
            ++_i;
            skip_space();
            parts.push_back(bare_key());
            skip_space();
        }
        return parts;
    }

    static std::string join(const std::vector<std::string>& parts)
    {
        std::string out;
        for (const auto& p: parts)
            out += (out.empty() ? "" : ".") + p;
        return out;
    }

    Json& header(Json& root)
    {
        ++_i;
        bool const array = peek() == '[';
        if (array)
            ++_i;
        skip_space();
        auto const parts = dotted_key();
        if (peek() != ']')
            fail("expected ']'");
        ++_i;
        if (array)
        {
            if (peek() != ']')
                fail("expected ']]'");
            ++_i;
        }

        Json* node = &root;
        for (std::size_t p = 0; p + 1 < parts.size(); ++p)
        {
            auto& next = (*node)[parts[p]];
            if (next.is_null())
                next = Json::object();
            if (next.is_array() && !next.empty())
                node = &next.back();
            else if (next.is_object())
                node = &next;
            else
                fail("'" + parts[p] + "' is not a table");
        }
        auto& leaf = (*node)[parts.back()];
        if (array)
        {
            if (leaf.is_null())
                leaf = Json::array();
            if (!leaf.is_array())
                fail("'" + parts.back() + "' is not an array of tables");
            leaf.push_back(Json::object());
            return leaf.back();
        }
        if (leaf.is_null())
            leaf = Json::object();
        if (!leaf.is_object() || !_defined.insert(join(parts)).second)
            fail("table '" + parts.back() + "' defined twice");
        return leaf;
    }

    void key_value(Json& table)
    {
        auto const key = bare_key();
        skip_space();
        if (peek() != '=')
            fail("expected '=' after key '" + key + "'");
        ++_i;
        skip_space();
        if (table.contains(key))
            fail("duplicate key '" + key + "'");
        table[key] = value();
    }

    Json value()
    {
        auto const c = peek();
        if (c == '"')
            return string_value();
        if (c == '[')
            return array_value();
        if (_line_text.substr(_i).starts_with("true"))
        {
            _i += 4;
            return true;
        }
        if (_line_text.substr(_i).starts_with("false"))
        {
            _i += 5;
            return false;
        }
        return number_value();
    }

    Json string_value()
    {
        ++_i;
        std::string out;
        while (true)
        {
            if (_i >= _line_text.size())
                fail("unterminated string");
            auto const c = _line_text[_i++];
            if (c == '"')
                return out;
            if (c != '\\')
            {
                out += c;
                continue;
            }
            if (_i >= _line_text.size())
                fail("unterminated escape");
            switch (_line_text[_i++])
            {
                case 'n':
                    out += '\n';
                    break;
                case 't':
                    out += '\t';
                    break;
                case '"':
                    out += '"';
                    break;
                case '\\':
                    out += '\\';
                    break;
                default:
                    fail("unsupported escape");
            }
        }
    }

    Json array_value()
    {
        ++_i;
        Json out = Json::array();
        skip_space();
        if (peek() == ']')
        {
            ++_i;
            return out;
        }
        while (true)
        {
            skip_space();
            out.push_back(value());
            skip_space();
            if (peek() == ',')
            {
                ++_i;
                skip_space();
                if (peek() == ']')
                {
                    ++_i;
                    return out;
                }
                continue;
            }
            if (peek() == ']')
            {
                ++_i;
                return out;
            }
            fail("expected ',' or ']' in array");
        }
    }

    Json number_value()
    {
        auto const start = _i;
        while (_i < _line_text.size()
               && (std::isalnum(static_cast<unsigned char>(_line_text[_i])) || _line_text[_i] == '.' || _line_text[_i] == '-'
                   || _line_text[_i] == '+' || _line_text[_i] == '_'))
            ++_i;
        std::string token;
        for (auto c: _line_text.substr(start, _i - start))
            if (c != '_')
                token += c;
        if (token.empty())
            fail("expected a value");
        try
        {
            std::size_t used = 0;
            if (token.find_first_of(".eE") == std::string::npos)
            {
                auto const v = std::stoll(token, &used);
                if (used == token.size())
                    return v;
            }
            else
            {
                auto const v = std::stod(token, &used);
                if (used == token.size())
                    return v;
            }
        }
        catch (const std::logic_error&)
        {
        }
        fail("invalid value '" + token + "'");
    }

    std::string_view _text;
    std::string_view _line_text;
    std::size_t _line = 0;
    std::size_t _i = 0;
    std::set<std::string> _defined;
};

// Typed accessors that name the key in every error.
class Table
{
  public:
    Table(const Json& j, std::string name): _j(j), _name(std::move(name))
    {
        if (!_j.is_object())
            throw ConfigError("'" + _name + "' must be a table");
    }

    void allow(std::initializer_list<std::string_view> keys) const
    {
        for (const auto& [key, value]: _j.items())
            if (std::find(keys.begin(), keys.end(), key) == keys.end())
                throw ConfigError("unknown key '" + qualified(key) + "'");
    }

    bool has(const char* key) const { return _j.contains(key); }

    std::string str(const char* key) const
    {
        auto const& v = at(key);
        if (!v.is_string())
            throw ConfigError("'" + qualified(key) + "' must be a string");
        return v.get<std::string>();
    }

    std::int64_t integer(const char* key) const
    {
        auto const& v = at(key);
        if (!v.is_number_integer())
            throw ConfigError("'" + qualified(key) + "' must be an integer");
        return v.get<std::int64_t>();
    }

    double number(const char* key) const
    {
        auto const& v = at(key);
        if (!v.is_number())
            throw ConfigError("'" + qualified(key) + "' must be a number");
        return v.get<double>();
    }

    bool boolean(const char* key) const
    {
        auto const& v = at(key);
        if (!v.is_boolean())
            throw ConfigError("'" + qualified(key) + "' must be true or false");
        return v.get<bool>();
    }

    const Json& array(const char* key) const
    {
        auto const& v = at(key);
        if (!v.is_array())
            throw ConfigError("'" + qualified(key) + "' must be an array");
        return v;
    }

    const Json& at(const char* key) const
    {
        if (!_j.contains(key))
            throw ConfigError("missing key '" + qualified(key) + "'");
        return _j.at(key);
    }

    std::string qualified(std::string_view key) const { return _name.empty() ? std::string(key) : _name + "." + std::string(key); }

  private:
    const Json& _j;
    std::string _name;
};

std::filesystem::path resolve(const std::filesystem::path& base, const std::string& p)
{
    std::filesystem::path path(p);
    if (path.is_absolute() || base.empty())
        return path;
    return base / path;
}

BackendSettings backend_settings(const Table& t, const std::filesystem::path& base)
{
    t.allow({ "kind", "script", "endpoint_url", "path", "model_name", "models", "temperature", "max_tokens", "max_in_flight" });
    BackendSettings b;
    if (t.has("kind"))
        b.kind = t.str("kind");
    if (b.kind != "scripted" && b.kind != "http")
        throw ConfigError("'" + t.qualified("kind") + "' must be \"scripted\" or \"http\"");
    if (t.has("script"))
        b.script = resolve(base, t.str("script"));
    if (t.has("endpoint_url"))
        b.endpoint_url = t.str("endpoint_url");
    if (t.has("path"))
        b.path = t.str("path");
    if (t.has("model_name") && t.has("models"))
        throw ConfigError("give either '" + t.qualified("model_name") + "' or '" + t.qualified("models") + "'");
    if (t.has("model_name"))
        b.models = { t.str("model_name") };
    if (t.has("models"))
    {
        b.models.clear();
        for (const auto& m: t.array("models"))
        {
            if (!m.is_string())
                throw ConfigError("'" + t.qualified("models") + "' must list strings");
            b.models.push_back(m.get<std::string>());
        }
    }
    if (t.has("temperature"))
        b.temperature = t.number("temperature");
    if (t.has("max_tokens"))
        b.max_tokens = static_cast<int>(t.integer("max_tokens"));
    if (t.has("max_in_flight"))
        b.max_in_flight = static_cast<int>(t.integer("max_in_flight"));
    return b;
}

void validate_backend(const BackendSettings& b, const std::string& name)
{
    if (b.kind == "scripted" && b.script.empty())
        throw ConfigError("'" + name + ".script' is required for a scripted backend");
    if (b.kind == "http" && b.endpoint_url.empty())
        throw ConfigError("'" + name + ".endpoint_url' is required for an http backend");
    if (b.models.empty())
        throw ConfigError("'" + name + ".models' must not be empty");
    if (b.temperature && (*b.temperature < 0.0 || *b.temperature > 2.0))
        throw ConfigError("'" + name + ".temperature' must lie in [0,2]");
    if (b.max_tokens && *b.max_tokens < 1)
        throw ConfigError("'" + name + ".max_tokens' must be positive");
    if (b.max_in_flight < 1)
        throw ConfigError("'" + name + ".max_in_flight' must be positive");
}

Json backend_json(const BackendSettings& b)
{
    Json j;
    j["kind"] = b.kind;
    j["script"] = b.script.string();
    j["endpoint_url"] = b.endpoint_url;
    j["path"] = b.path;
    j["models"] = b.models;
    j["temperature"] = b.temperature ? Json(*b.temperature) : Json(nullptr);
    j["max_tokens"] = b.max_tokens ? Json(*b.max_tokens) : Json(nullptr);
    j["max_in_flight"] = b.max_in_flight;
    return j;
}

} // namespace

Json parse_toml(std::string_view text)
{
    return TomlParser(text).parse();
}

ExperimentConfig parse_config(std::string_view text, const std::filesystem::path& base_dir)
{
    auto const doc = parse_toml(text);
    Table root(doc, "");
    root.allow({ "seed", "output_dir", "repeats", "probes", "question_timeout_s", "backend", "judge", "dataset", "teams", "diversity" });

    ExperimentConfig cfg;
    if (root.has("seed"))
    {
        auto const seed = root.integer("seed");
        if (seed < 0)
            throw ConfigError("'seed' must be non-negative");
        cfg.seed = static_cast<std::uint64_t>(seed);
    }
    if (root.has("output_dir"))
        cfg.output_dir = resolve(base_dir, root.str("output_dir"));
    if (root.has("repeats"))
        cfg.repeats = static_cast<int>(root.integer("repeats"));
    if (root.has("probes"))
        cfg.probes = root.boolean("probes");
    if (root.has("question_timeout_s"))
        cfg.question_timeout_s = root.number("question_timeout_s");

    if (!root.has("backend"))
        throw ConfigError("missing table [backend]");
    cfg.backend = backend_settings(Table(root.at("backend"), "backend"), base_dir);

    if (root.has("judge"))
    {
        Table t(root.at("judge"), "judge");
        t.allow({ "enabled", "model_name", "temperature", "calibration", "calibration_size", "sample", "backend" });
        if (t.has("enabled"))
            cfg.judge.enabled = t.boolean("enabled");
        if (t.has("model_name"))
            cfg.judge.model_name = t.str("model_name");
        if (t.has("temperature"))
            cfg.judge.temperature = t.number("temperature");
        if (t.has("calibration"))
            cfg.judge.calibration = resolve(base_dir, t.str("calibration"));
        if (t.has("calibration_size"))
            cfg.judge.calibration_size = static_cast<std::size_t>(std::max<std::int64_t>(0, t.integer("calibration_size")));
        if (t.has("sample"))
            cfg.judge.sample = static_cast<std::size_t>(std::max<std::int64_t>(0, t.integer("sample")));
        if (t.has("backend"))
            cfg.judge.backend = backend_settings(Table(t.at("backend"), "judge.backend"), base_dir);
    }

    if (root.has("dataset"))
    {
        for (const auto& entry: root.array("dataset"))
        {
            Table t(entry, "dataset");
            t.allow({ "name", "split", "path", "sample" });
            DatasetSettings d;
            try
            {
                d.dataset = dataset_from_string(t.str("name"));
                d.split = t.str("split");
                d.path = resolve(base_dir, t.str("path"));
                if (t.has("sample"))
                    d.sampling = sampling_from_string(t.str("sample"));
            }
            catch (const ValidationError& e)
            {
                throw ConfigError(std::string("dataset: ") + e.what());
            }
            cfg.datasets.push_back(std::move(d));
        }
    }

    if (root.has("teams"))
    {
        Table t(root.at("teams"), "teams");
        t.allow({ "flat_sizes", "hier_shapes", "rounds" });
        auto ints = [&](const char* key) {
            std::vector<int> out;
            if (t.has(key))
                for (const auto& v: t.array(key))
                {
                    if (!v.is_number_integer())
                        throw ConfigError("'" + t.qualified(key) + "' must list integers");
                    out.push_back(v.get<int>());
                }
            return out;
        };
        cfg.teams.flat_sizes = ints("flat_sizes");
        cfg.teams.rounds = ints("rounds");
        if (t.has("hier_shapes"))
            for (const auto& v: t.array("hier_shapes"))
            {
                if (!v.is_string())
                    throw ConfigError("'teams.hier_shapes' must list strings");
                try
                {
                    cfg.teams.hier_shapes.push_back(hier_shape_from_string(v.get<std::string>()));
                }
                catch (const ValidationError&)
                {
                    throw ConfigError("'teams.hier_shapes' accepts only \"L1\" and \"L2\"");
                }
            }
    }

    if (root.has("diversity"))
    {
        Table t(root.at("diversity"), "diversity");
        t.allow({ "mode", "k" });
        auto const mode = t.has("mode") ? t.str("mode") : std::string("none");
        if (mode != "none" && mode != "stratified")
            throw ConfigError("'diversity.mode' must be \"none\" or \"stratified\"");
        cfg.diversity.stratified = mode == "stratified";
        if (t.has("k"))
            cfg.diversity.k = static_cast<int>(t.integer("k"));
    }

    validate(cfg);
    return cfg;
}

ExperimentConfig load_config(const std::filesystem::path& path)
{
    if (!std::filesystem::exists(path))
        throw ConfigError("config file not found: " + path.string());
    return parse_config(read_file(path), path.parent_path());
}

void validate(const ExperimentConfig& cfg)
{
    validate_backend(cfg.backend, "backend");
    if (cfg.judge.backend)
        validate_backend(*cfg.judge.backend, "judge.backend");
    if (cfg.judge.enabled && cfg.judge.calibration.empty())
        throw ConfigError("'judge.calibration' is required when the judge is enabled");
    if (cfg.judge.temperature < 0.0 || cfg.judge.temperature > 2.0)
        throw ConfigError("'judge.temperature' must lie in [0,2]");
    if (cfg.repeats < 1)
        throw ConfigError("'repeats' must be at least 1");
    if (!(cfg.question_timeout_s > 0.0))
        throw ConfigError("'question_timeout_s' must be positive");
    if (cfg.datasets.empty())
        throw ConfigError("at least one [[dataset]] is required");
    for (const auto& d: cfg.datasets)
        if (d.split.empty())
            throw ConfigError("'dataset.split' must not be empty");

    auto const& g = cfg.teams;
    if ((g.flat_sizes.empty() && g.hier_shapes.empty()) || g.rounds.empty())
        throw InvalidGrid("team grid is empty: give rounds and at least one flat size or hierarchy shape");
    for (auto n: g.flat_sizes)
        if (n != 1 && n != 3 && n != 5 && n != 7)
            throw InvalidGrid("flat sizes must come from {1, 3, 5, 7}, got " + std::to_string(n));
    for (auto r: g.rounds)
        if (r < 2 || r > 4)
            throw InvalidGrid("rounds must come from {2, 3, 4}, got " + std::to_string(r));
    auto has_duplicates = [](auto v) {
        std::sort(v.begin(), v.end());
        return std::adjacent_find(v.begin(), v.end()) != v.end();
    };
    if (has_duplicates(g.flat_sizes) || has_duplicates(g.rounds) || has_duplicates(g.hier_shapes))
        throw InvalidGrid("team grid lists a value twice");

    if (cfg.diversity.stratified)
    {
        if (cfg.diversity.k < 3 || cfg.diversity.k % 3 != 0)
            throw ConfigError("'diversity.k' must be a positive multiple of 3");
        if (cfg.diversity.k > kPersonaSpaceSize)
            throw ConfigError("'diversity.k' cannot exceed the 48-persona space");
    }
}

Json to_json(const ExperimentConfig& cfg)
{
    Json j;
    j["seed"] = cfg.seed;
    j["output_dir"] = cfg.output_dir.string();
    j["repeats"] = cfg.repeats;
    j["probes"] = cfg.probes;
    j["question_timeout_s"] = cfg.question_timeout_s;
    j["backend"] = backend_json(cfg.backend);
    Json judge;
    judge["enabled"] = cfg.judge.enabled;
    judge["model_name"] = cfg.judge.model_name;
    judge["temperature"] = cfg.judge.temperature;
    judge["calibration"] = cfg.judge.calibration.string();
    judge["calibration_size"] = cfg.judge.calibration_size;
    judge["sample"] = cfg.judge.sample;
    judge["backend"] = cfg.judge.backend ? backend_json(*cfg.judge.backend) : Json(nullptr);
    j["judge"] = judge;
    Json ds = Json::array();
    for (const auto& d: cfg.datasets)
        ds.push_back(Json { { "name", to_string(d.dataset) },
                            { "split", d.split },
                            { "path", d.path.string() },
                            { "sample", to_string(d.sampling) } });
    j["dataset"] = ds;
    Json shapes = Json::array();
    for (auto s: cfg.teams.hier_shapes)
        shapes.push_back(to_string(s));
    j["teams"] = Json { { "flat_sizes", cfg.teams.flat_sizes }, { "hier_shapes", shapes }, { "rounds", cfg.teams.rounds } };
    j["diversity"] = Json { { "mode", cfg.diversity.stratified ? "stratified" : "none" }, { "k", cfg.diversity.k } };
    return j;
}

} // namespace teamlab
