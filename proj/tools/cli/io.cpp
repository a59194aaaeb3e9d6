#include "io.hpp"

#include <fstream>
#include <sstream>

#include "cohemark/error.hpp"
#include "cohemark/segmenter.hpp"

namespace cohemark::cli {

std::string read_file(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw Error(Errc::IoFailure, "cannot read " + path.string());
    std::ostringstream buf;
    buf << in.rdbuf();
    return buf.str();
}

std::vector<std::string> read_lines(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw Error(Errc::IoFailure, "cannot read " + path.string());
    std::vector<std::string> lines;
    std::string line;
    while (std::getline(in, line)) {
        const auto t = trim(line);
        if (!t.empty()) lines.emplace_back(t);
    }
    return lines;
}

std::vector<nlohmann::json> read_jsonl(const std::filesystem::path& path) {
    std::vector<nlohmann::json> out;
    std::size_t line_no = 0;
    for (const auto& line : read_lines(path)) {
        ++line_no;
        try {
            out.push_back(nlohmann::json::parse(line));
        } catch (const nlohmann::json::parse_error& e) {
            throw Error(Errc::InvalidArgument,
                        path.string() + ": record " + std::to_string(line_no) + " is not JSON: " + e.what());
        }
    }
    return out;
}

void write_file(const std::filesystem::path& path, const std::string& content) {
    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    if (!out) throw Error(Errc::IoFailure, "cannot open " + path.string() + " for writing");
    out << content;
    out.flush();
    if (!out) throw Error(Errc::IoFailure, "failed writing " + path.string());
}

}  // namespace cohemark::cli
