#ifndef NEURAL_BRANE_EMBEDDING_IO_HPP
#define NEURAL_BRANE_EMBEDDING_IO_HPP

#include "neural_brane/model.hpp"

#include <filesystem>
#include <iosfwd>

namespace neural_brane {

// Text embeddings: header "n d", then "<node-id> v_1 ... v_d" per row with
// 9 significant digits.
//
// Binary block: "NBRN", u32 version, u32 rows, u32 cols, then rows*cols
// row-major float64, all little-endian. A checkpoint is four blocks in the
// order P, P', W, b (b stored as h x 1).

inline constexpr char kBinaryMagic[4] = {'N', 'B', 'R', 'N'};
inline constexpr std::uint32_t kBinaryVersion = 1;

void write_embeddings_text(const EmbeddingTable& table, std::ostream& out);
void write_embeddings_text(const EmbeddingTable& table, const std::filesystem::path& path);
void write_embeddings_binary(const EmbeddingTable& table, const std::filesystem::path& path);

/// Detects the format from the first four bytes. Throws InputError/ParseError.
EmbeddingTable read_embeddings(const std::filesystem::path& path);

void write_matrix_block(const Matrix& m, std::ostream& out);
Matrix read_matrix_block(std::istream& in, const std::string& what);

void save_checkpoint(const ModelParameters& params, const std::filesystem::path& path);
ModelParameters load_checkpoint(const std::filesystem::path& path);

} // namespace neural_brane

#endif // NEURAL_BRANE_EMBEDDING_IO_HPP
