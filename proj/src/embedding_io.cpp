#include "neural_brane/embedding_io.hpp"

#include "neural_brane/errors.hpp"

#include <array>
#include <bit>
#include <cstdio>
#include <cstring>
#include <fstream>
#include <limits>
#include <sstream>
#include <string>

namespace neural_brane {

namespace {

void put_u32(std::ostream& out, std::uint32_t v) {
    std::array<char, 4> b;
    for (int k = 0; k < 4; ++k) b[k] = static_cast<char>((v >> (8 * k)) & 0xFF);
    out.write(b.data(), 4);
}

void put_f64(std::ostream& out, double x) {
    auto v = std::bit_cast<std::uint64_t>(x);
    std::array<char, 8> b;
    for (int k = 0; k < 8; ++k) b[k] = static_cast<char>((v >> (8 * k)) & 0xFF);
    out.write(b.data(), 8);
}

std::uint32_t get_u32(std::istream& in, const std::string& what) {
    std::array<unsigned char, 4> b;
    if (!in.read(reinterpret_cast<char*>(b.data()), 4)) throw InputError(what + ": truncated header");
    std::uint32_t v = 0;
    for (int k = 0; k < 4; ++k) v |= static_cast<std::uint32_t>(b[k]) << (8 * k);
    return v;
}

std::uint32_t checked_u32(std::size_t v) {
    if (v > std::numeric_limits<std::uint32_t>::max()) throw InputError("dimension exceeds u32");
    return static_cast<std::uint32_t>(v);
}

} // namespace

void write_embeddings_text(const EmbeddingTable& table, std::ostream& out) {
    out << table.node_count() << ' ' << table.dim() << '\n';
    char buf[32];
    for (std::size_t u = 0; u < table.node_count(); ++u) {
        out << u;
        for (double x : table.vectors.row(u)) {
            std::snprintf(buf, sizeof buf, "%.9g", x);
            out << ' ' << buf;
        }
        out << '\n';
    }
}

void write_embeddings_text(const EmbeddingTable& table, const std::filesystem::path& path) {
    std::ofstream out(path);
    if (!out) throw InputError("cannot write " + path.string());
    write_embeddings_text(table, out);
}

void write_matrix_block(const Matrix& m, std::ostream& out) {
    out.write(kBinaryMagic, 4);
    put_u32(out, kBinaryVersion);
    put_u32(out, checked_u32(m.rows()));
    put_u32(out, checked_u32(m.cols()));
    for (double x : m.data()) put_f64(out, x);
}

Matrix read_matrix_block(std::istream& in, const std::string& what) {
    char magic[4];
    if (!in.read(magic, 4) || std::memcmp(magic, kBinaryMagic, 4) != 0)
        throw InputError(what + ": missing NBRN magic");
    const auto version = get_u32(in, what);
    if (version != kBinaryVersion)
        throw InputError(what + ": unsupported version " + std::to_string(version));
    const auto rows = get_u32(in, what);
    const auto cols = get_u32(in, what);
    Matrix m(rows, cols);
    std::array<unsigned char, 8> b;
    for (double& x : m.data()) {
        if (!in.read(reinterpret_cast<char*>(b.data()), 8)) throw InputError(what + ": truncated data");
        std::uint64_t v = 0;
        for (int k = 0; k < 8; ++k) v |= static_cast<std::uint64_t>(b[k]) << (8 * k);
        x = std::bit_cast<double>(v);
    }
    return m;
}

void write_embeddings_binary(const EmbeddingTable& table, const std::filesystem::path& path) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw InputError("cannot write " + path.string());
    write_matrix_block(table.vectors, out);
}

EmbeddingTable read_embeddings(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw InputError("cannot open " + path.string());
    char magic[4] = {};
    in.read(magic, 4);
    const bool binary = in.gcount() == 4 && std::memcmp(magic, kBinaryMagic, 4) == 0;
    in.clear();
    in.seekg(0);
    if (binary) return EmbeddingTable{read_matrix_block(in, path.string())};

    const std::string name = path.string();
    std::string line;
    std::size_t line_no = 1;
    if (!std::getline(in, line)) throw ParseError(name, 1, "missing 'n d' header");
    std::istringstream header(line);
    std::size_t n = 0, d = 0;
    if (!(header >> n >> d)) throw ParseError(name, 1, "malformed 'n d' header");
    EmbeddingTable table{Matrix(n, d)};
    std::vector<bool> seen(n, false);
    while (std::getline(in, line)) {
        ++line_no;
        std::istringstream row(line);
        long long id = 0;
        if (!(row >> id)) {
            if (line.find_first_not_of(" \t\r") == std::string::npos) continue;
            throw ParseError(name, line_no, "expected node id");
        }
        if (id < 0 || static_cast<std::size_t>(id) >= n)
            throw ParseError(name, line_no, "node id out of range");
        if (seen[id]) throw ParseError(name, line_no, "duplicate node id");
        seen[id] = true;
        auto dst = table.vectors.row(static_cast<std::size_t>(id));
        for (std::size_t k = 0; k < d; ++k)
            if (!(row >> dst[k])) throw ParseError(name, line_no, "expected " + std::to_string(d) + " values");
        std::string extra;
        if (row >> extra) throw ParseError(name, line_no, "too many values");
    }
    for (std::size_t u = 0; u < n; ++u)
        if (!seen[u]) throw InputError(name + ": missing row for node " + std::to_string(u));
    return table;
}

void save_checkpoint(const ModelParameters& params, const std::filesystem::path& path) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw InputError("cannot write " + path.string());
    write_matrix_block(params.attr_embedding, out);
    write_matrix_block(params.nbr_embedding, out);
    write_matrix_block(params.hidden_weights, out);
    Matrix bias(params.hidden_dim(), 1);
    std::copy(params.hidden_bias.begin(), params.hidden_bias.end(), bias.data().begin());
    write_matrix_block(bias, out);
}

ModelParameters load_checkpoint(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw InputError("cannot open " + path.string());
    const std::string name = path.string();
    ModelParameters p;
    p.attr_embedding = read_matrix_block(in, name + " (P)");
    p.nbr_embedding = read_matrix_block(in, name + " (P')");
    p.hidden_weights = read_matrix_block(in, name + " (W)");
    Matrix bias = read_matrix_block(in, name + " (b)");
    if (bias.cols() != 1) throw InputError(name + ": bias block must be h x 1");
    p.hidden_bias.assign(bias.data().begin(), bias.data().end());
    if (p.hidden_weights.rows() != p.hidden_bias.size() || p.hidden_weights.cols() != p.dim())
        throw InputError(name + ": inconsistent block shapes");
    return p;
}

} // namespace neural_brane
