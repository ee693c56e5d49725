#pragma once

#include <cstdint>
#include <cstring>
#include <istream>
#include <ostream>
#include <string>

#include "prcnn/error.hpp"

namespace prcnn {
namespace io {

// All on-disk integers and floats are little-endian regardless of host.

inline void store_bytes(std::ostream& os, const void* p, std::size_t n) {
    os.write(static_cast<const char*>(p), static_cast<std::streamsize>(n));
    if (!os) throw format_error("write failed");
}

inline void load_bytes(std::istream& is, void* p, std::size_t n,
                       const char* what) {
    is.read(static_cast<char*>(p), static_cast<std::streamsize>(n));
    if (static_cast<std::size_t>(is.gcount()) != n)
        throw format_error(std::string("truncated file: expected ") + what);
}

inline void store_u16(std::ostream& os, std::uint16_t v) {
    unsigned char b[2] = {static_cast<unsigned char>(v & 0xff),
                          static_cast<unsigned char>(v >> 8)};
    store_bytes(os, b, 2);
}

inline void store_u32(std::ostream& os, std::uint32_t v) {
    unsigned char b[4];
    for (int i = 0; i < 4; ++i) b[i] = static_cast<unsigned char>(v >> (8 * i));
    store_bytes(os, b, 4);
}

inline void store_f32(std::ostream& os, float v) {
    std::uint32_t bits;
    std::memcpy(&bits, &v, 4);
    store_u32(os, bits);
}

inline std::uint16_t load_u16(std::istream& is, const char* what) {
    unsigned char b[2];
    load_bytes(is, b, 2, what);
    return static_cast<std::uint16_t>(b[0] | (b[1] << 8));
}

inline std::uint32_t load_u32(std::istream& is, const char* what) {
    unsigned char b[4];
    load_bytes(is, b, 4, what);
    std::uint32_t v = 0;
    for (int i = 0; i < 4; ++i) v |= static_cast<std::uint32_t>(b[i]) << (8 * i);
    return v;
}

inline float load_f32(std::istream& is, const char* what) {
    const std::uint32_t bits = load_u32(is, what);
    float v;
    std::memcpy(&v, &bits, 4);
    return v;
}

inline void store_string(std::ostream& os, const std::string& s) {
    if (s.size() > 0xffff) throw format_error("string too long for u16 length");
    store_u16(os, static_cast<std::uint16_t>(s.size()));
    if (!s.empty()) store_bytes(os, s.data(), s.size());
}

inline std::string load_string(std::istream& is, const char* what) {
    const std::uint16_t n = load_u16(is, what);
    std::string s(n, '\0');
    if (n) load_bytes(is, s.data(), n, what);
    return s;
}

}  // namespace io
}  // namespace prcnn
