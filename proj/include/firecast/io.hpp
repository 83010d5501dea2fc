#ifndef FIRECAST_IO_HPP
#define FIRECAST_IO_HPP

#include <bit>
#include <cstdint>
#include <fstream>
#include <string>
#include <type_traits>
#include <vector>

#include "json.hpp"

#include "firecast/common.hpp"

namespace firecast::io {

using json = nlohmann::json;

static_assert(std::endian::native == std::endian::little,
              "file containers are little-endian; big-endian hosts unsupported");

inline std::ofstream open_out(const std::string& path) {
    std::ofstream f(path, std::ios::binary | std::ios::trunc);
    require(f.good(), "cannot open for writing: " + path);
    return f;
}

inline std::ifstream open_in(const std::string& path) {
    std::ifstream f(path, std::ios::binary);
    require(f.good(), "cannot open for reading: " + path);
    return f;
}

template <class T>
void write_pod(std::ostream& s, const T& v) {
    static_assert(std::is_trivially_copyable_v<T>);
    s.write(reinterpret_cast<const char*>(&v), sizeof(T));
}

template <class T>
T read_pod(std::istream& s) {
    static_assert(std::is_trivially_copyable_v<T>);
    T v{};
    s.read(reinterpret_cast<char*>(&v), sizeof(T));
    require(s.good(), "truncated payload");
    return v;
}

template <class T>
void write_vec(std::ostream& s, const std::vector<T>& v) {
    static_assert(std::is_trivially_copyable_v<T>);
    s.write(reinterpret_cast<const char*>(v.data()),
            static_cast<std::streamsize>(v.size() * sizeof(T)));
}

template <class T>
std::vector<T> read_vec(std::istream& s, size_t n) {
    static_assert(std::is_trivially_copyable_v<T>);
    std::vector<T> v(n);
    s.read(reinterpret_cast<char*>(v.data()),
           static_cast<std::streamsize>(n * sizeof(T)));
    require(s.good() || (s.eof() && s.gcount() ==
                                        static_cast<std::streamsize>(n * sizeof(T))),
            "truncated payload");
    return v;
}

inline void write_magic(std::ostream& s, const char magic[9]) {
    s.write(magic, 8);
}

inline void check_magic(std::istream& s, const std::string& expect,
                        const std::string& what) {
    char buf[8];
    s.read(buf, 8);
    require(s.good() && std::string(buf, 8) == expect,
            what + ": bad magic (expected " + expect + ")");
}

inline void write_json_header(std::ostream& s, const json& j) {
    std::string txt = j.dump();
    write_pod<uint32_t>(s, static_cast<uint32_t>(txt.size()));
    s.write(txt.data(), static_cast<std::streamsize>(txt.size()));
}

inline json read_json_header(std::istream& s) {
    auto len = read_pod<uint32_t>(s);
    std::string txt(len, '\0');
    s.read(txt.data(), len);
    require(s.good(), "truncated JSON header");
    json j = json::parse(txt, nullptr, false);
    require(!j.is_discarded(), "malformed JSON header");
    return j;
}

}  // namespace firecast::io

#endif  // FIRECAST_IO_HPP
