#include "xdf/core/text.hpp"

#include "xdf/core/error.hpp"

#include <cctype>
#include <fstream>
#include <sstream>

namespace xdf {

namespace {

bool is_alpha(char c) {
    return std::isalpha(static_cast<unsigned char>(c)) != 0;
}

bool is_alnum(char c) {
    return std::isalnum(static_cast<unsigned char>(c)) != 0;
}

} // namespace

std::string to_lower(std::string_view text) {
    std::string out(text);
    for (char& c : out) {
        c = static_cast<char>(std::tolower(static_cast<unsigned char>(c)));
    }
    return out;
}

std::vector<std::string> tokenize_alpha(std::string_view text) {
    std::vector<std::string> tokens;
    std::string current;
    for (char c : text) {
        if (is_alpha(c)) {
            current.push_back(static_cast<char>(std::tolower(static_cast<unsigned char>(c))));
        } else if (!current.empty()) {
            tokens.push_back(std::move(current));
            current.clear();
        }
    }
    if (!current.empty()) {
        tokens.push_back(std::move(current));
    }
    return tokens;
}

bool contains_phrase(std::string_view haystack_lower, std::string_view phrase_lower) {
    if (phrase_lower.empty()) {
        return false;
    }
    std::size_t pos = 0;
    while ((pos = haystack_lower.find(phrase_lower, pos)) != std::string_view::npos) {
        const bool left_ok = pos == 0 || !is_alnum(haystack_lower[pos - 1]);
        const std::size_t end = pos + phrase_lower.size();
        const bool right_ok = end == haystack_lower.size() || !is_alnum(haystack_lower[end]);
        if (left_ok && right_ok) {
            return true;
        }
        ++pos;
    }
    return false;
}

std::unordered_set<std::string> load_token_set(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) {
        raise(Errc::io_error, "cannot open " + path.string());
    }
    std::unordered_set<std::string> tokens;
    std::string line;
    while (std::getline(in, line)) {
        while (!line.empty() && (line.back() == '\r' || line.back() == ' ')) {
            line.pop_back();
        }
        if (!line.empty()) {
            tokens.insert(to_lower(line));
        }
    }
    return tokens;
}

std::string read_file(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) {
        raise(Errc::io_error, "cannot open " + path.string());
    }
    std::ostringstream out;
    out << in.rdbuf();
    return out.str();
}

void write_file(const std::filesystem::path& path, std::string_view content) {
    std::ofstream out(path, std::ios::binary);
    if (!out) {
        raise(Errc::io_error, "cannot write " + path.string());
    }
    out.write(content.data(), static_cast<std::streamsize>(content.size()));
}

} // namespace xdf
