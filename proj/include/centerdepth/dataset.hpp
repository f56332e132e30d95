#pragma once

#include <array>
#include <bit>
#include <cstdint>
#include <cstdio>
#include <cstring>
#include <filesystem>
#include <fstream>
#include <iterator>
#include <sstream>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>
#include <openssl/evp.h>

#include "centerdepth/camera.hpp"
#include "centerdepth/errors.hpp"
#include "centerdepth/raster.hpp"
#include "centerdepth/scene.hpp"

namespace centerdepth::io {

namespace fs = std::filesystem;

// CDRAS1 raster file: 16-byte header then row-major little-endian float32
// samples, channel fastest.
//   bytes 0..7   magic "CDRAS1" padded with two NUL bytes
//   bytes 8..9   u16 width
//   bytes 10..11 u16 height
//   bytes 12..13 u16 channels
//   bytes 14..15 u16 reserved (0)
inline constexpr std::array<char, 8> kRasterMagic{'C', 'D', 'R', 'A', 'S', '1', '\0', '\0'};
inline constexpr std::size_t kRasterHeaderSize = 16;

namespace detail {
inline void put_u16(std::string& out, std::uint16_t v) {
    out.push_back(static_cast<char>(v & 0xFF));
    out.push_back(static_cast<char>(v >> 8));
}
inline std::uint16_t get_u16(const unsigned char* p) {
    return static_cast<std::uint16_t>(p[0] | (p[1] << 8));
}
}  // namespace detail

inline std::string encode_raster(const Raster<float>& r) {
    if (r.width() > 65535 || r.height() > 65535 || r.channels() > 65535)
        throw Error(Errc::InvalidArgument, "raster dimensions exceed u16");
    std::string out(kRasterMagic.begin(), kRasterMagic.end());
    detail::put_u16(out, static_cast<std::uint16_t>(r.width()));
    detail::put_u16(out, static_cast<std::uint16_t>(r.height()));
    detail::put_u16(out, static_cast<std::uint16_t>(r.channels()));
    detail::put_u16(out, 0);
    out.reserve(kRasterHeaderSize + r.data().size() * 4);
    for (float v : r.data()) {
        const auto bits = std::bit_cast<std::uint32_t>(v);
        for (int b = 0; b < 4; ++b) out.push_back(static_cast<char>((bits >> (8 * b)) & 0xFF));
    }
    return out;
}

/// `name` is used in error messages only.
inline Raster<float> decode_raster(const std::string& bytes, const std::string& name) {
    if (bytes.size() < kRasterHeaderSize)
        throw Error(Errc::MalformedRaster, name + ": shorter than the 16-byte header");
    if (std::memcmp(bytes.data(), kRasterMagic.data(), kRasterMagic.size()) != 0)
        throw Error(Errc::MalformedRaster, name + ": bad magic");
    const auto* p = reinterpret_cast<const unsigned char*>(bytes.data());
    const int w = detail::get_u16(p + 8);
    const int h = detail::get_u16(p + 10);
    const int c = detail::get_u16(p + 12);
    if (c == 0) throw Error(Errc::MalformedRaster, name + ": zero channels");
    const std::size_t expected = kRasterHeaderSize + static_cast<std::size_t>(w) * h * c * 4;
    if (bytes.size() != expected)
        throw Error(Errc::MalformedRaster, name + ": expected " + std::to_string(expected) +
                                               " bytes, found " + std::to_string(bytes.size()));
    Raster<float> r(w, h, c);
    auto data = r.data();
    for (std::size_t i = 0; i < data.size(); ++i) {
        const unsigned char* q = p + kRasterHeaderSize + 4 * i;
        const std::uint32_t bits = static_cast<std::uint32_t>(q[0]) |
                                   (static_cast<std::uint32_t>(q[1]) << 8) |
                                   (static_cast<std::uint32_t>(q[2]) << 16) |
                                   (static_cast<std::uint32_t>(q[3]) << 24);
        data[i] = std::bit_cast<float>(bits);
    }
    return r;
}

inline std::string sha256_hex(const std::string& bytes) {
    std::array<unsigned char, EVP_MAX_MD_SIZE> md{};
    unsigned int len = 0;
    if (EVP_Digest(bytes.data(), bytes.size(), md.data(), &len, EVP_sha256(), nullptr) != 1)
        throw Error(Errc::IoFailure, "sha256 digest failed");
    static constexpr char kHex[] = "0123456789abcdef";
    std::string out;
    for (unsigned int i = 0; i < len; ++i) {
        out.push_back(kHex[md[i] >> 4]);
        out.push_back(kHex[md[i] & 0xF]);
    }
    return out;
}

inline std::string read_file(const fs::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw Error(Errc::IoFailure, "cannot open " + path.string());
    return {std::istreambuf_iterator<char>(in), std::istreambuf_iterator<char>()};
}

/// Writes via a temporary sibling and rename, so readers never see a partial file.
inline void write_file(const fs::path& path, const std::string& bytes) {
    std::error_code ec;
    if (path.has_parent_path()) fs::create_directories(path.parent_path(), ec);
    if (ec) throw Error(Errc::IoFailure, path.parent_path().string() + ": " + ec.message());
    const fs::path tmp = path.string() + ".tmp";
    {
        std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
        if (!out) throw Error(Errc::IoFailure, "cannot write " + tmp.string());
        out.write(bytes.data(), static_cast<std::streamsize>(bytes.size()));
        if (!out) throw Error(Errc::IoFailure, "short write to " + tmp.string());
    }
    fs::rename(tmp, path, ec);
    if (ec) throw Error(Errc::IoFailure, path.string() + ": " + ec.message());
}

inline nlohmann::json to_json(const Annotation2D& a) {
    return {{"class", std::string(to_string(a.cls))},
            {"bbox", {a.x_min, a.y_min, a.x_max, a.y_max}},
            {"center", {a.u, a.v}},
            {"depth_m", a.depth_m},
            {"visibility", a.visibility}};
}

inline Annotation2D annotation_from_json(const nlohmann::json& j) {
    Annotation2D a;
    const auto cls = class_from_string(j.at("class").get<std::string>());
    if (!cls) throw Error(Errc::InvalidArgument, "unknown class " + j.at("class").dump());
    a.cls = *cls;
    const auto& b = j.at("bbox");
    a.x_min = b.at(0).get<double>();
    a.y_min = b.at(1).get<double>();
    a.x_max = b.at(2).get<double>();
    a.y_max = b.at(3).get<double>();
    a.u = j.at("center").at(0).get<double>();
    a.v = j.at("center").at(1).get<double>();
    a.depth_m = j.at("depth_m").get<double>();
    a.visibility = j.at("visibility").get<double>();
    return a;
}

inline std::string encode_annotations(const std::vector<Annotation2D>& anns) {
    std::string out;
    for (const auto& a : anns) out += to_json(a).dump() + "\n";
    return out;
}

inline std::vector<Annotation2D> decode_annotations(const std::string& text,
                                                    const std::string& name) {
    std::vector<Annotation2D> out;
    std::istringstream in(text);
    std::string line;
    int lineno = 0;
    while (std::getline(in, line)) {
        ++lineno;
        if (line.empty()) continue;
        try {
            out.push_back(annotation_from_json(nlohmann::json::parse(line)));
        } catch (const nlohmann::json::exception& e) {
            throw Error(Errc::InvalidArgument, name + ":" + std::to_string(lineno) + ": " + e.what());
        }
    }
    return out;
}

struct ManifestEntry {
    std::string frame_id;
    std::vector<std::pair<std::string, std::string>> files;  ///< role -> relative path
    std::vector<std::pair<std::string, std::string>> sha256;  ///< role -> hex digest
};

struct Manifest {
    std::vector<ManifestEntry> frames;
};

inline constexpr std::array<const char*, 5> kFrameRoles{"depth", "feat", "heat", "size", "ann"};

inline std::string role_suffix(const std::string& role) {
    return role == "ann" ? ".ann.jsonl" : "." + role + ".f32";
}

/// Writes `frames/<id>.{depth,feat,heat,size}.f32`, `frames/<id>.ann.jsonl` and
/// `manifest.json` under `dir`. Output bytes depend only on the frames.
inline Manifest emit_dataset(const std::vector<scene::SyntheticFrame>& frames, const fs::path& dir) {
    std::error_code ec;
    fs::create_directories(dir / "frames", ec);
    if (ec) throw Error(Errc::IoFailure, (dir / "frames").string() + ": " + ec.message());

    Manifest m;
    nlohmann::json jframes = nlohmann::json::array();
    for (const auto& f : frames) {
        ManifestEntry e{f.id, {}, {}};
        nlohmann::json files = nlohmann::json::object();
        nlohmann::json sums = nlohmann::json::object();
        for (const std::string role : kFrameRoles) {
            std::string bytes;
            if (role == "depth") bytes = encode_raster(f.depth);
            else if (role == "feat") bytes = encode_raster(f.features);
            else if (role == "heat") bytes = encode_raster(f.heatmap.values);
            else if (role == "size") bytes = encode_raster(f.sizes);
            else bytes = encode_annotations(f.annotations);
            const std::string rel = "frames/" + f.id + role_suffix(role);
            write_file(dir / rel, bytes);
            const std::string sum = sha256_hex(bytes);
            e.files.emplace_back(role, rel);
            e.sha256.emplace_back(role, sum);
            files[role] = rel;
            sums[role] = sum;
        }
        jframes.push_back({{"frame_id", f.id}, {"files", files}, {"sha256", sums}});
        m.frames.push_back(std::move(e));
    }
    const nlohmann::json manifest{{"format", "centerdepth-dataset"},
                                  {"version", 1},
                                  {"frames", std::move(jframes)}};
    write_file(dir / "manifest.json", manifest.dump(2) + "\n");
    return m;
}

/// Reads a dataset written by emit_dataset, verifying every checksum.
inline std::vector<scene::SyntheticFrame> load_dataset(const fs::path& dir) {
    const fs::path mpath = dir / "manifest.json";
    if (!fs::exists(mpath)) throw Error(Errc::ManifestMissing, mpath.string());
    nlohmann::json manifest;
    try {
        manifest = nlohmann::json::parse(read_file(mpath));
    } catch (const nlohmann::json::exception& e) {
        throw Error(Errc::InvalidArgument, mpath.string() + ": " + e.what());
    }

    std::vector<scene::SyntheticFrame> frames;
    try {
        for (const auto& jf : manifest.at("frames")) {
            scene::SyntheticFrame f;
            f.id = jf.at("frame_id").get<std::string>();
            auto load = [&](const char* role) {
                const std::string rel = jf.at("files").at(role).get<std::string>();
                const std::string bytes = read_file(dir / rel);
                if (sha256_hex(bytes) != jf.at("sha256").at(role).get<std::string>())
                    throw Error(Errc::ChecksumMismatch, (dir / rel).string());
                return std::pair{bytes, (dir / rel).string()};
            };
            {
                auto [b, name] = load("depth");
                f.depth = decode_raster(b, name);
                if (f.depth.channels() != 1)
                    throw Error(Errc::MalformedRaster, name + ": depth raster needs 1 channel");
            }
            {
                auto [b, name] = load("feat");
                f.features = decode_raster(b, name);
            }
            {
                auto [b, name] = load("heat");
                auto values = decode_raster(b, name);
                if (values.channels() != 1 || values.width() != f.features.width() ||
                    values.height() != f.features.height())
                    throw Error(Errc::MalformedRaster, name + ": heatmap shape mismatch");
                f.heatmap.values = std::move(values);
                f.heatmap.stride_x = static_cast<double>(f.depth.width()) / f.heatmap.cols();
                f.heatmap.stride_y = static_cast<double>(f.depth.height()) / f.heatmap.rows();
            }
            {
                auto [b, name] = load("size");
                f.sizes = decode_raster(b, name);
            }
            {
                auto [b, name] = load("ann");
                f.annotations = decode_annotations(b, name);
            }
            frames.push_back(std::move(f));
        }
    } catch (const nlohmann::json::exception& e) {
        throw Error(Errc::InvalidArgument, mpath.string() + ": " + e.what());
    }
    return frames;
}

/// Loads a single CDRAS1 file, e.g. an external unary depth prediction.
inline Raster<float> read_raster(const fs::path& path) {
    return decode_raster(read_file(path), path.string());
}

inline void write_raster(const fs::path& path, const Raster<float>& r) {
    write_file(path, encode_raster(r));
}

}  // namespace centerdepth::io
