#pragma once

#include <cstdint>
#include <filesystem>
#include <map>
#include <string>
#include <vector>

namespace xdf::recommend {

/// Token -> vector table of one fixed dimension. Immutable after load and
/// safe to share across threads.
struct EmbeddingTable {
    std::size_t dimension = 0;
    std::map<std::string, std::vector<float>> entries;

    const std::vector<float>* find(const std::string& token) const {
        auto it = entries.find(token);
        return it == entries.end() ? nullptr : &it->second;
    }
};

/**
 * Parses the word2vec binary format:
 *   - ASCII header "vocab_size dimension\n"
 *   - per entry: token bytes terminated by one space, then dimension
 *     little-endian IEEE-754 single-precision floats, optionally followed
 *     by one newline.
 * Exactly vocab_size entries must be present. Throws MalformedHeader,
 * TruncatedEntry (naming the byte offset) or DuplicateToken.
 */
EmbeddingTable load_embeddings(const std::filesystem::path& path);
EmbeddingTable parse_embeddings(const std::string& bytes);

/// Mirror writer (token, space, floats, newline); floats are emitted
/// verbatim, so parse(serialize(t)) == t bit-exactly.
std::string serialize_embeddings(const EmbeddingTable& table);
void save_embeddings(const EmbeddingTable& table, const std::filesystem::path& path);

} // namespace xdf::recommend
