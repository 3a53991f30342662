#include "gist/io.hpp"

#include "gist/errors.hpp"
#include "gist/hash.hpp"

#include <fstream>
#include <sstream>

namespace gist {

std::vector<Json> read_jsonl(const std::filesystem::path& path) {
  std::vector<Json> rows;
  for_each_jsonl(path, [&](const Json& j) { rows.push_back(j); });
  return rows;
}

void for_each_jsonl(const std::filesystem::path& path,
                    const std::function<void(const Json&)>& fn) {
  std::ifstream in(path);
  if (!in) throw IngestError("cannot open " + path.string());
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (line.empty() || line[0] == '#') continue;
    Json j = Json::parse(line, nullptr, false);
    if (j.is_discarded()) {
      throw IngestError(path.string() + ":" + std::to_string(line_no) +
                        ": malformed JSON line");
    }
    fn(j);
  }
}

void write_jsonl(const std::filesystem::path& path, const std::vector<Json>& rows,
                 const std::string& header_comment) {
  std::filesystem::create_directories(path.parent_path());
  std::ofstream out(path, std::ios::trunc);
  if (!out) throw Error("cannot write " + path.string());
  if (!header_comment.empty()) out << "# " << header_comment << "\n";
  for (const Json& row : rows) out << row.dump() << "\n";
}

std::string read_text_file(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error("cannot open " + path.string());
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

void write_text_file(const std::filesystem::path& path, const std::string& content) {
  if (path.has_parent_path()) std::filesystem::create_directories(path.parent_path());
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw Error("cannot write " + path.string());
  out << content;
}

std::uint64_t hash_file(const std::filesystem::path& path) {
  return fnv1a64(read_text_file(path));
}

}  // namespace gist
