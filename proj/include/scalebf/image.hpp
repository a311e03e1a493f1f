#pragma once

#include <array>
#include <cstdint>
#include <cstring>
#include <filesystem>
#include <fstream>
#include <span>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include "scalebf/crc64.hpp"
#include "scalebf/scale_filter.hpp"

// Versioned binary image of a ScaleBF. Layout (all integers little-endian):
//
//   8 bytes   magic "SCALEBF1"
//   u16       format version (currently 1)
//   u64       slot count P
//   u32 x3    dimensions x, y, z
//   u32       tau
//   u64       master seed
//   P slot records:
//     u32     chain length
//     per group:
//       u64 x3  member seeds
//       u64     inserted count
//       3 cell arrays, x*y*z u64 words each, row-major
//   u64       CRC-64 of everything above
//
// The writer emits groups in slot order, chain order, member order, so a
// structure serializes to the same bytes every time.

namespace scalebf {

inline constexpr std::array<char, 8> kImageMagic = {'S', 'C', 'A', 'L', 'E', 'B', 'F', '1'};
inline constexpr std::uint16_t kImageFormatVersion = 1;

class ImageError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

namespace detail {

template <typename T>
void append_le(std::string& out, T value) {
    for (std::size_t i = 0; i < sizeof(T); ++i)
        out.push_back(static_cast<char>((value >> (8 * i)) & 0xFF));
}

class ImageReader {
public:
    explicit ImageReader(std::span<const char> bytes) : bytes_(bytes) {}

    template <typename T>
    T read_le() {
        if (pos_ + sizeof(T) > bytes_.size()) throw ImageError("image truncated");
        T value = 0;
        for (std::size_t i = 0; i < sizeof(T); ++i)
            value |= static_cast<T>(static_cast<unsigned char>(bytes_[pos_ + i])) << (8 * i);
        pos_ += sizeof(T);
        return value;
    }

    std::vector<std::uint64_t> read_words(std::uint64_t count) {
        if (pos_ + count * 8 > bytes_.size()) throw ImageError("image truncated");
        std::vector<std::uint64_t> words(count);
        for (std::uint64_t i = 0; i < count; ++i) words[i] = read_le<std::uint64_t>();
        return words;
    }

    std::size_t position() const { return pos_; }
    std::size_t remaining() const { return bytes_.size() - pos_; }

private:
    std::span<const char> bytes_;
    std::size_t pos_ = 0;
};

}  // namespace detail

/// Serializes the structure to its byte image, checksum included.
inline std::string serialize_image(const ScaleBF& filter) {
    const FilterConfig& cfg = filter.config();
    std::string out;
    out.append(kImageMagic.data(), kImageMagic.size());
    detail::append_le(out, kImageFormatVersion);
    detail::append_le(out, cfg.slot_count);
    detail::append_le(out, cfg.dims.x);
    detail::append_le(out, cfg.dims.y);
    detail::append_le(out, cfg.dims.z);
    detail::append_le(out, cfg.tau);
    detail::append_le(out, cfg.master_seed);
    for (std::uint64_t slot = 0; slot < cfg.slot_count; ++slot) {
        const auto chain = filter.chain(slot);
        detail::append_le(out, static_cast<std::uint32_t>(chain.size()));
        for (const FilterGroup& g : chain) {
            for (int p = 0; p < kFiltersPerGroup; ++p)
                detail::append_le(out, g.filter(p).seed());
            detail::append_le(out, g.inserted_count());
            for (int p = 0; p < kFiltersPerGroup; ++p) {
                for (std::uint64_t word : g.filter(p).cells()) detail::append_le(out, word);
            }
        }
    }
    detail::append_le(out, crc64(out.data(), out.size()));
    return out;
}

/// Parses a byte image back into a live structure. Verifies the trailing
/// checksum, the header, and every structural invariant; any mismatch is an
/// ImageError.
inline ScaleBF parse_image(std::span<const char> bytes) {
    if (bytes.size() < kImageMagic.size() + sizeof(std::uint16_t) + sizeof(std::uint64_t))
        throw ImageError("image truncated");
    const std::size_t payload_len = bytes.size() - sizeof(std::uint64_t);

    detail::ImageReader trailer(bytes.subspan(payload_len));
    const std::uint64_t stored_crc = trailer.read_le<std::uint64_t>();
    if (crc64(bytes.data(), payload_len) != stored_crc)
        throw ImageError("checksum mismatch; image is corrupt");

    detail::ImageReader in(bytes.first(payload_len));
    std::array<char, 8> magic;
    for (char& c : magic) c = static_cast<char>(in.read_le<std::uint8_t>());
    if (magic != kImageMagic) throw ImageError("bad magic; not a filter image");
    const std::uint16_t version = in.read_le<std::uint16_t>();
    if (version != kImageFormatVersion)
        throw ImageError("unsupported format version " + std::to_string(version));

    FilterConfig cfg;
    cfg.slot_count = in.read_le<std::uint64_t>();
    cfg.dims.x = in.read_le<std::uint32_t>();
    cfg.dims.y = in.read_le<std::uint32_t>();
    cfg.dims.z = in.read_le<std::uint32_t>();
    cfg.tau = in.read_le<std::uint32_t>();
    cfg.master_seed = in.read_le<std::uint64_t>();
    try {
        cfg.validate();
    } catch (const std::invalid_argument& e) {
        throw ImageError(std::string("invalid configuration in image: ") + e.what());
    }

    const std::uint64_t words_per_filter = cfg.dims.cell_count();
    std::vector<std::vector<FilterGroup>> chains(cfg.slot_count);
    try {
        for (std::uint64_t slot = 0; slot < cfg.slot_count; ++slot) {
            const std::uint32_t chain_len = in.read_le<std::uint32_t>();
            chains[slot].reserve(chain_len);
            for (std::uint32_t gi = 0; gi < chain_len; ++gi) {
                std::array<std::uint64_t, 3> seeds;
                for (std::uint64_t& s : seeds) s = in.read_le<std::uint64_t>();
                const std::uint64_t inserted = in.read_le<std::uint64_t>();
                auto make_filter = [&](int p) {
                    return Bloom3D::restore(cfg.dims, seeds[static_cast<std::size_t>(p)], inserted,
                                            in.read_words(words_per_filter));
                };
                chains[slot].push_back(FilterGroup::restore(
                    {make_filter(0), make_filter(1), make_filter(2)}, cfg.group_capacity()));
            }
        }
    } catch (const std::invalid_argument& e) {
        throw ImageError(std::string("invalid filter state in image: ") + e.what());
    }
    if (in.remaining() != 0) throw ImageError("trailing bytes after last chain");

    try {
        return ScaleBF::restore(cfg, std::move(chains));
    } catch (const std::invalid_argument& e) {
        throw ImageError(std::string("invalid filter state in image: ") + e.what());
    }
}

inline ScaleBF load_image(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw ImageError("cannot open " + path.string());
    std::string bytes((std::istreambuf_iterator<char>(in)), std::istreambuf_iterator<char>());
    if (!in.good() && !in.eof()) throw ImageError("read failure on " + path.string());
    return parse_image(bytes);
}

/// Writes the image to a temporary file in the target directory, then
/// renames it over the destination, so a crash mid-write leaves any
/// previous image intact.
inline void save_image_atomic(const ScaleBF& filter, const std::filesystem::path& path) {
    const std::string bytes = serialize_image(filter);
    std::filesystem::path tmp = path;
    tmp += ".tmp";
    {
        std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
        if (!out) throw ImageError("cannot open " + tmp.string() + " for writing");
        out.write(bytes.data(), static_cast<std::streamsize>(bytes.size()));
        out.flush();
        if (!out.good()) throw ImageError("write failure on " + tmp.string());
    }
    std::error_code ec;
    std::filesystem::rename(tmp, path, ec);
    if (ec) {
        std::filesystem::remove(tmp);
        throw ImageError("cannot rename " + tmp.string() + " to " + path.string() + ": " +
                         ec.message());
    }
}

}  // namespace scalebf
