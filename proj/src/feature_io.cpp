#include "csmv/feature_io.hpp"

#include <cmath>
#include <cstring>
#include <fstream>
#include <vector>

#include "csmv/errors.hpp"

namespace csmv {

namespace {

std::uint32_t decode_u32le(const unsigned char* p) {
    return static_cast<std::uint32_t>(p[0]) | (static_cast<std::uint32_t>(p[1]) << 8) |
           (static_cast<std::uint32_t>(p[2]) << 16) | (static_cast<std::uint32_t>(p[3]) << 24);
}

void encode_u32le(std::uint32_t v, unsigned char* p) {
    p[0] = static_cast<unsigned char>(v & 0xff);
    p[1] = static_cast<unsigned char>((v >> 8) & 0xff);
    p[2] = static_cast<unsigned char>((v >> 16) & 0xff);
    p[3] = static_cast<unsigned char>((v >> 24) & 0xff);
}

float decode_f32le(const unsigned char* p) {
    const std::uint32_t bits = decode_u32le(p);
    float f;
    std::memcpy(&f, &bits, sizeof(f));
    return f;
}

void encode_f32le(float f, unsigned char* p) {
    std::uint32_t bits;
    std::memcpy(&bits, &f, sizeof(bits));
    encode_u32le(bits, p);
}

}  // namespace

Eigen::MatrixXd read_feature_matrix(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw DataError("cannot open feature file " + path.string());

    unsigned char header[16];
    in.read(reinterpret_cast<char*>(header), sizeof(header));
    if (in.gcount() != static_cast<std::streamsize>(sizeof(header)))
        throw Truncated(path.string() + ": header shorter than 16 bytes");
    if (std::memcmp(header, kFeatureMagic, 4) != 0)
        throw BadMagic(path.string() + ": not a CSMV feature file");
    const std::uint32_t version = decode_u32le(header + 4);
    if (version != kFeatureVersion)
        throw BadMagic(path.string() + ": unsupported version " + std::to_string(version));
    const std::uint32_t v_l = decode_u32le(header + 8);
    const std::uint32_t d_raw = decode_u32le(header + 12);
    if (v_l == 0 || d_raw == 0) throw DataError(path.string() + ": zero dimension in header");

    const std::uint64_t count = static_cast<std::uint64_t>(v_l) * d_raw;
    std::vector<unsigned char> payload(count * 4);
    in.read(reinterpret_cast<char*>(payload.data()), static_cast<std::streamsize>(payload.size()));
    if (in.gcount() != static_cast<std::streamsize>(payload.size()))
        throw Truncated(path.string() + ": payload shorter than header declares (" + std::to_string(in.gcount()) +
                        " of " + std::to_string(payload.size()) + " bytes)");
    in.peek();
    if (!in.eof())
        throw Truncated(path.string() + ": payload size mismatch, trailing bytes after declared payload");

    Eigen::MatrixXd m(v_l, d_raw);
    const unsigned char* p = payload.data();
    for (std::uint32_t r = 0; r < v_l; ++r) {
        for (std::uint32_t c = 0; c < d_raw; ++c, p += 4) {
            const float f = decode_f32le(p);
            if (!std::isfinite(f))
                throw NonFinite(path.string() + ": non-finite value at row " + std::to_string(r) + " col " +
                                std::to_string(c));
            m(r, c) = static_cast<double>(f);
        }
    }
    return m;
}

void write_feature_matrix(const std::filesystem::path& path, const Eigen::MatrixXd& m) {
    if (m.rows() < 1 || m.cols() < 1) throw DataError("feature matrix must be at least 1 x 1");
    if (!m.allFinite()) throw NonFinite("refusing to write non-finite feature matrix to " + path.string());

    std::vector<unsigned char> buf(16 + static_cast<std::size_t>(m.size()) * 4);
    std::memcpy(buf.data(), kFeatureMagic, 4);
    encode_u32le(kFeatureVersion, buf.data() + 4);
    encode_u32le(static_cast<std::uint32_t>(m.rows()), buf.data() + 8);
    encode_u32le(static_cast<std::uint32_t>(m.cols()), buf.data() + 12);
    unsigned char* p = buf.data() + 16;
    for (Eigen::Index r = 0; r < m.rows(); ++r) {
        for (Eigen::Index c = 0; c < m.cols(); ++c, p += 4) {
            encode_f32le(static_cast<float>(m(r, c)), p);
        }
    }

    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    if (!out) throw DataError("cannot open " + path.string() + " for writing");
    out.write(reinterpret_cast<const char*>(buf.data()), static_cast<std::streamsize>(buf.size()));
    if (!out) throw DataError("short write to " + path.string());
}

}  // namespace csmv
