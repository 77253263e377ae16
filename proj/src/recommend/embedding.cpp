#include "xdf/recommend/embedding.hpp"

#include "xdf/core/error.hpp"
#include "xdf/core/text.hpp"

#include <bit>
#include <cstring>

namespace xdf::recommend {

namespace {

float float_from_le(const unsigned char* bytes) {
    std::uint32_t word = static_cast<std::uint32_t>(bytes[0]) |
                         (static_cast<std::uint32_t>(bytes[1]) << 8) |
                         (static_cast<std::uint32_t>(bytes[2]) << 16) |
                         (static_cast<std::uint32_t>(bytes[3]) << 24);
    return std::bit_cast<float>(word);
}

void float_to_le(float value, std::string& out) {
    const auto word = std::bit_cast<std::uint32_t>(value);
    out.push_back(static_cast<char>(word & 0xff));
    out.push_back(static_cast<char>((word >> 8) & 0xff));
    out.push_back(static_cast<char>((word >> 16) & 0xff));
    out.push_back(static_cast<char>((word >> 24) & 0xff));
}

} // namespace

EmbeddingTable parse_embeddings(const std::string& bytes) {
    const std::size_t header_end = bytes.find('\n');
    if (header_end == std::string::npos) {
        raise(Errc::malformed_header, "no header line");
    }
    const std::string header = bytes.substr(0, header_end);
    const std::size_t space = header.find(' ');
    if (space == std::string::npos || space == 0 || space + 1 >= header.size()) {
        raise(Errc::malformed_header, "header must be 'vocab_size dimension'");
    }
    long vocab_size = 0;
    long dimension = 0;
    try {
        std::size_t used = 0;
        vocab_size = std::stol(header.substr(0, space), &used);
        if (used != space) {
            raise(Errc::malformed_header, "vocab size is not a number");
        }
        const std::string dim_text = header.substr(space + 1);
        dimension = std::stol(dim_text, &used);
        if (used != dim_text.size()) {
            raise(Errc::malformed_header, "dimension is not a number");
        }
    } catch (const Error&) {
        throw;
    } catch (const std::exception&) {
        raise(Errc::malformed_header, "header must be 'vocab_size dimension'");
    }
    if (vocab_size < 0 || dimension <= 0) {
        raise(Errc::malformed_header, "vocab size and dimension must be positive");
    }

    EmbeddingTable table;
    table.dimension = static_cast<std::size_t>(dimension);
    std::size_t offset = header_end + 1;
    for (long entry = 0; entry < vocab_size; ++entry) {
        std::string token;
        while (true) {
            if (offset >= bytes.size()) {
                raise(Errc::truncated_entry,
                      "entry " + std::to_string(entry) + " cut off at byte " + std::to_string(offset));
            }
            const char c = bytes[offset++];
            if (c == ' ') {
                break;
            }
            token.push_back(c);
        }
        if (token.empty()) {
            raise(Errc::truncated_entry, "empty token at byte " + std::to_string(offset));
        }
        if (offset + 4 * table.dimension > bytes.size()) {
            raise(Errc::truncated_entry,
                  "vector for '" + token + "' cut off at byte " + std::to_string(offset));
        }
        std::vector<float> vector(table.dimension);
        for (std::size_t i = 0; i < table.dimension; ++i) {
            vector[i] = float_from_le(reinterpret_cast<const unsigned char*>(bytes.data()) + offset);
            offset += 4;
        }
        if (offset < bytes.size() && bytes[offset] == '\n') {
            ++offset;
        }
        if (!table.entries.emplace(token, std::move(vector)).second) {
            raise(Errc::duplicate_token, "token '" + token + "' appears twice");
        }
    }
    return table;
}

EmbeddingTable load_embeddings(const std::filesystem::path& path) {
    return parse_embeddings(read_file(path));
}

std::string serialize_embeddings(const EmbeddingTable& table) {
    std::string out = std::to_string(table.entries.size()) + " " + std::to_string(table.dimension) + "\n";
    for (const auto& [token, vector] : table.entries) {
        out += token;
        out.push_back(' ');
        for (float value : vector) {
            float_to_le(value, out);
        }
        out.push_back('\n');
    }
    return out;
}

void save_embeddings(const EmbeddingTable& table, const std::filesystem::path& path) {
    write_file(path, serialize_embeddings(table));
}

} // namespace xdf::recommend
