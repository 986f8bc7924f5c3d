#include <bit>
#include <cstring>
#include <fstream>
#include <stdexcept>

#include "picnn/error.hpp"
#include "picnn/network.hpp"

namespace picnn::net {

namespace {

void put_u64(std::ostream& out, std::uint64_t v) {
    char bytes[8];
    for (int i = 0; i < 8; ++i) bytes[i] = static_cast<char>((v >> (8 * i)) & 0xffU);
    out.write(bytes, 8);
}

bool get_u64(std::istream& in, std::uint64_t& v) {
    unsigned char bytes[8];
    if (!in.read(reinterpret_cast<char*>(bytes), 8)) return false;
    v = 0;
    for (int i = 0; i < 8; ++i) v |= static_cast<std::uint64_t>(bytes[i]) << (8 * i);
    return true;
}

}  // namespace

void save_checkpoint(const std::filesystem::path& path, const NetworkParams& params) {
    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    if (!out) throw std::runtime_error("cannot open checkpoint for writing: " + path.string());
    put_u64(out, params.layout.hash());
    for (double v : params.flat) put_u64(out, std::bit_cast<std::uint64_t>(v));
    if (!out) throw std::runtime_error("failed writing checkpoint: " + path.string());
}

NetworkParams load_checkpoint(const std::filesystem::path& path, const NetworkSpec& spec) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw std::runtime_error("cannot open checkpoint: " + path.string());
    NetworkParams params{std::vector<double>(), Layout(spec)};
    std::uint64_t hash = 0;
    if (!get_u64(in, hash)) throw ShapeError("checkpoint too short: " + path.string());
    if (hash != params.layout.hash()) throw ShapeError("checkpoint layout hash does not match the network spec: " + path.string());
    params.flat.resize(params.layout.size());
    for (double& v : params.flat) {
        std::uint64_t bits = 0;
        if (!get_u64(in, bits)) throw ShapeError("checkpoint truncated: " + path.string());
        v = std::bit_cast<double>(bits);
    }
    if (in.peek() != std::char_traits<char>::eof()) throw ShapeError("checkpoint has trailing data: " + path.string());
    return params;
}

}  // namespace picnn::net
