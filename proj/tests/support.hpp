// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <teamlab/domain.hpp>

#include <atomic>
#include <filesystem>
#include <string>
#include <unistd.h>

namespace testing
{

inline std::filesystem::path fixture(const std::string& name)
{
    return std::filesystem::path(TEAMLAB_FIXTURES) / name;
}

/// Fresh directory under the system temp dir, removed on destruction.
class TempDir
{
  public:
    explicit TempDir(const std::string& tag)
    {
        static std::atomic<int> counter { 0 };
        _path = std::filesystem::temp_directory_path()
                / ("teamlab-" + tag + "-" + std::to_string(::getpid()) + "-" + std::to_string(counter++));
        std::filesystem::remove_all(_path);
        std::filesystem::create_directories(_path);
    }
    ~TempDir() { std::filesystem::remove_all(_path); }
    TempDir(const TempDir&) = delete;
    TempDir& operator=(const TempDir&) = delete;

    [[nodiscard]] const std::filesystem::path& path() const { return _path; }

  private:
    std::filesystem::path _path;
};

inline teamlab::Question make_question(const std::string& id, int n_options, char gold, const std::string& text = "Which option?")
{
    teamlab::Question q;
    q.id = id;
    q.text = text;
    for (int i = 0; i < n_options; ++i)
        q.options.push_back({ static_cast<char>('A' + i), "option " + std::string(1, static_cast<char>('a' + i)) });
    q.gold = gold;
    return q;
}

} // namespace testing
