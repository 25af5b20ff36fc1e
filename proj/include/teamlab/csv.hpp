// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <string>
#include <string_view>
#include <vector>

namespace teamlab
{

/// Splits one RFC 4180 record; doubled quotes inside quoted fields unescape.
[[nodiscard]] inline std::vector<std::string> split_csv_line(std::string_view line)
{
    std::vector<std::string> fields(1);
    bool quoted = false;
    for (std::size_t i = 0; i < line.size(); ++i)
    {
        char const c = line[i];
        if (quoted)
        {
            if (c == '"' && i + 1 < line.size() && line[i + 1] == '"')
            {
                fields.back() += '"';
                ++i;
            }
            else if (c == '"')
                quoted = false;
            else
                fields.back() += c;
        }
        else if (c == '"')
            quoted = true;
        else if (c == ',')
            fields.emplace_back();
        else if (c != '\r')
            fields.back() += c;
    }
    return fields;
}

[[nodiscard]] inline std::string csv_field(std::string_view s)
{
    if (s.find_first_of(",\"\n") == std::string_view::npos)
        return std::string(s);
    std::string out = "\"";
    for (char c: s)
    {
        if (c == '"')
            out += '"';
        out += c;
    }
    return out + "\"";
}

[[nodiscard]] inline std::string csv_row(const std::vector<std::string>& fields)
{
    std::string out;
    for (std::size_t i = 0; i < fields.size(); ++i)
    {
        if (i)
            out += ',';
        out += csv_field(fields[i]);
    }
    return out + "\n";
}

} // namespace teamlab
