#pragma once

#include <filesystem>
#include <functional>
#include <string>
#include <vector>

#include <json.hpp>

namespace gist {

using Json = nlohmann::json;

// Line-delimited JSON. Lines starting with '#' are header comments (every
// emitted artifact carries its manifest hash that way) and are skipped.
std::vector<Json> read_jsonl(const std::filesystem::path& path);

void for_each_jsonl(const std::filesystem::path& path,
                    const std::function<void(const Json&)>& fn);

// Writes rows with an optional "# key=value" header comment line.
void write_jsonl(const std::filesystem::path& path, const std::vector<Json>& rows,
                 const std::string& header_comment = {});

std::string read_text_file(const std::filesystem::path& path);
void write_text_file(const std::filesystem::path& path, const std::string& content);

std::uint64_t hash_file(const std::filesystem::path& path);

}  // namespace gist
