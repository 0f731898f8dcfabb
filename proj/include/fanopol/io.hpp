#pragma once

// Text and binary output helpers. CSV numbers use 17 significant digits so
// every double round-trips; lines end in LF regardless of platform.

#include <bit>
#include <cstdint>
#include <cstdio>
#include <cstring>
#include <filesystem>
#include <fstream>
#include <istream>
#include <ostream>
#include <span>
#include <string>
#include <type_traits>

#include "fanopol/arrowhead.hpp"
#include "fanopol/error.hpp"

namespace fanopol {

inline std::string format_number(double v) {
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.17g", v == 0.0 ? 0.0 : v);
    return buf;
}

inline std::ofstream open_output(const std::filesystem::path& path) {
    if (path.has_parent_path()) std::filesystem::create_directories(path.parent_path());
    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    if (!out) throw Error("io", "cannot open " + path.string() + " for writing");
    return out;
}

/// Writes one CSV row; binary stream mode keeps '\n' as LF.
inline void write_csv_row(std::ostream& out, std::span<const double> values) {
    for (std::size_t i = 0; i < values.size(); ++i) {
        if (i) out << ',';
        out << format_number(values[i]);
    }
    out << '\n';
}

// ---- EigenSystem cache -------------------------------------------------
//
// layout: magic "FANOEIG\0", u32 version, u32 reserved, u64 fingerprint,
// u64 dim, u64 n_continuum, then f64 omega[dim], mu[dim],
// lam[dim * n_continuum]; all little-endian.

inline constexpr char eigen_magic[8] = {'F', 'A', 'N', 'O', 'E', 'I', 'G', '\0'};
inline constexpr std::uint32_t eigen_format_version = 1;

namespace detail {

template <class T>
void put_le(std::ostream& out, T v) {
    static_assert(sizeof(T) == 4 || sizeof(T) == 8);
    using U = std::conditional_t<sizeof(T) == 4, std::uint32_t, std::uint64_t>;
    auto u = std::bit_cast<U>(v);
    char b[sizeof(T)];
    for (std::size_t i = 0; i < sizeof(T); ++i) b[i] = static_cast<char>((u >> (8 * i)) & 0xffU);
    out.write(b, sizeof b);
}

template <class T>
T get_le(std::istream& in) {
    using U = std::conditional_t<sizeof(T) == 4, std::uint32_t, std::uint64_t>;
    unsigned char b[sizeof(T)];
    if (!in.read(reinterpret_cast<char*>(b), sizeof b)) throw Error("io", "truncated eigensystem file");
    U u = 0;
    for (std::size_t i = 0; i < sizeof(T); ++i) u |= static_cast<U>(b[i]) << (8 * i);
    return std::bit_cast<T>(u);
}

}  // namespace detail

inline void write_eigensystem(std::ostream& out, const EigenSystem& e) {
    out.write(eigen_magic, sizeof eigen_magic);
    detail::put_le<std::uint32_t>(out, eigen_format_version);
    detail::put_le<std::uint32_t>(out, 0);
    detail::put_le<std::uint64_t>(out, e.source_fingerprint);
    detail::put_le<std::uint64_t>(out, e.size());
    detail::put_le<std::uint64_t>(out, e.continuum_size());
    for (double v : e.omega) detail::put_le(out, v);
    for (double v : e.mu) detail::put_le(out, v);
    for (double v : e.lam) detail::put_le(out, v);
    if (!out) throw Error("io", "eigensystem write failed");
}

inline EigenSystem read_eigensystem(std::istream& in) {
    char magic[8];
    if (!in.read(magic, sizeof magic) || std::memcmp(magic, eigen_magic, sizeof magic) != 0)
        throw Error("io", "not an eigensystem file");
    const auto version = detail::get_le<std::uint32_t>(in);
    if (version != eigen_format_version)
        throw Error("io", "unsupported eigensystem version " + std::to_string(version));
    detail::get_le<std::uint32_t>(in);
    EigenSystem e;
    e.source_fingerprint = detail::get_le<std::uint64_t>(in);
    const auto dim = detail::get_le<std::uint64_t>(in);
    e.n_continuum = detail::get_le<std::uint64_t>(in);
    if (dim != e.n_continuum + 1) throw Error("io", "inconsistent eigensystem dimensions");
    e.omega.resize(dim);
    e.mu.resize(dim);
    e.lam.resize(dim * e.n_continuum);
    for (auto& v : e.omega) v = detail::get_le<double>(in);
    for (auto& v : e.mu) v = detail::get_le<double>(in);
    for (auto& v : e.lam) v = detail::get_le<double>(in);
    return e;
}

}  // namespace fanopol
