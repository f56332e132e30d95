#pragma once

#include <algorithm>
#include <array>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <optional>
#include <span>
#include <sstream>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "centerdepth/errors.hpp"
#include "centerdepth/raster.hpp"

namespace centerdepth::eval {

struct DepthPair {
    double pred{0.0};
    double gt{0.0};
    std::string frame_id;
    int target_id{0};

    friend bool operator==(const DepthPair&, const DepthPair&) = default;
};

enum class DeltaMode {
    Symmetric,  ///< max(pred/gt, gt/pred) < t^k
    OneSided,   ///< pred/gt < t^k
};

inline constexpr std::array<double, 5> kDistanceBinEdges{0.0, 50.0, 100.0, 150.0, 200.0};

namespace detail {
inline void require_pairs(std::span<const DepthPair> pairs) {
    if (pairs.empty()) throw Error(Errc::EmptyInput, "no depth pairs");
    for (const auto& p : pairs)
        if (!(p.gt > 0.0) || !std::isfinite(p.pred))
            throw Error(Errc::InvalidArgument,
                        "invalid pair in frame " + p.frame_id + " target " +
                            std::to_string(p.target_id));
}
}  // namespace detail

/// Fractions of pairs whose ratio is strictly below threshold^1, ^2, ^3.
inline std::array<double, 3> delta_metrics(std::span<const DepthPair> pairs, double threshold,
                                           DeltaMode mode = DeltaMode::Symmetric) {
    detail::require_pairs(pairs);
    if (!(threshold > 1.0)) throw Error(Errc::InvalidArgument, "delta threshold must be > 1");
    const std::array<double, 3> bounds{threshold, threshold * threshold,
                                       threshold * threshold * threshold};
    std::array<std::size_t, 3> hits{};
    for (const auto& p : pairs) {
        const double ratio =
            mode == DeltaMode::Symmetric ? std::max(p.pred / p.gt, p.gt / p.pred) : p.pred / p.gt;
        for (int k = 0; k < 3; ++k)
            if (ratio < bounds[k]) ++hits[k];
    }
    const auto n = static_cast<double>(pairs.size());
    return {hits[0] / n, hits[1] / n, hits[2] / n};
}

struct ErrorMetrics {
    double mre{0.0};
    double mae{0.0};
    double rmse{0.0};
};

inline ErrorMetrics error_metrics(std::span<const DepthPair> pairs) {
    detail::require_pairs(pairs);
    double rel = 0.0, abs_sum = 0.0, sq = 0.0;
    for (const auto& p : pairs) {
        const double e = p.pred - p.gt;
        rel += std::abs(e) / p.gt;
        abs_sum += std::abs(e);
        sq += e * e;
    }
    const auto n = static_cast<double>(pairs.size());
    return {rel / n, abs_sum / n, std::sqrt(sq / n)};
}

struct BinStat {
    std::string label;
    double lo{0.0};
    double hi{0.0};
    std::size_t count{0};
    std::optional<double> mae;  ///< absent for empty bins

    friend bool operator==(const BinStat&, const BinStat&) = default;
};

/// Index of the bin holding `gt`: bins are [lo, hi) except the last, which is closed.
inline std::optional<std::size_t> bin_index(std::span<const double> edges, double gt) {
    const std::size_t nb = edges.size() - 1;
    for (std::size_t b = 0; b < nb; ++b) {
        const bool last = b + 1 == nb;
        if (gt >= edges[b] && (gt < edges[b + 1] || (last && gt == edges[b + 1]))) return b;
    }
    return std::nullopt;
}

/// MAE per ground-truth distance bin, labelled R1..Rk. Pairs outside all bins
/// are not counted.
inline std::vector<BinStat> binned_mae(std::span<const DepthPair> pairs,
                                       std::span<const double> edges) {
    if (edges.size() < 2) throw Error(Errc::InvalidArgument, "need at least two bin edges");
    for (std::size_t i = 1; i < edges.size(); ++i)
        if (!(edges[i] > edges[i - 1]))
            throw Error(Errc::InvalidArgument, "bin edges must be strictly increasing");
    const std::size_t nb = edges.size() - 1;
    std::vector<double> sums(nb, 0.0);
    std::vector<BinStat> bins(nb);
    for (std::size_t b = 0; b < nb; ++b)
        bins[b] = {"R" + std::to_string(b + 1), edges[b], edges[b + 1], 0, std::nullopt};
    for (const auto& p : pairs) {
        if (auto b = bin_index(edges, p.gt)) {
            sums[*b] += std::abs(p.pred - p.gt);
            ++bins[*b].count;
        }
    }
    for (std::size_t b = 0; b < nb; ++b)
        if (bins[b].count > 0) bins[b].mae = sums[b] / static_cast<double>(bins[b].count);
    return bins;
}

/// "Center" baseline: raster value at the pixel nearest to (u, v).
inline double extract_center_depth(const DepthRaster& raster, double u, double v) {
    const long x = std::lround(u);
    const long y = std::lround(v);
    if (x < 0 || y < 0 || x >= raster.width() || y >= raster.height())
        throw Error(Errc::OutOfBounds, "center (" + std::to_string(u) + "," + std::to_string(v) +
                                           ") outside raster");
    return raster.at(static_cast<int>(x), static_cast<int>(y));
}

/// "Seg" baseline: mean raster value over the pixels of `mask`.
inline double extract_seg_depth(const DepthRaster& raster, std::span<const Pixel> mask) {
    if (mask.empty()) throw Error(Errc::EmptyMask, "segmentation mask is empty");
    double sum = 0.0;
    for (const auto& p : mask) {
        if (!raster.contains(p.x, p.y)) throw Error(Errc::OutOfBounds, "mask pixel outside raster");
        sum += raster.at(p.x, p.y);
    }
    return sum / static_cast<double>(mask.size());
}

struct MetricsReport {
    double threshold{1.10};
    DeltaMode mode{DeltaMode::Symmetric};
    double delta1{0}, delta2{0}, delta3{0};
    double mre{0}, mae{0}, rmse{0};
    std::vector<BinStat> bins;
    std::size_t n{0};

    friend bool operator==(const MetricsReport&, const MetricsReport&) = default;
};

inline MetricsReport build_report(std::span<const DepthPair> pairs, double threshold,
                                  std::span<const double> edges,
                                  DeltaMode mode = DeltaMode::Symmetric) {
    const auto d = delta_metrics(pairs, threshold, mode);
    const auto e = error_metrics(pairs);
    MetricsReport r;
    r.threshold = threshold;
    r.mode = mode;
    r.delta1 = d[0];
    r.delta2 = d[1];
    r.delta3 = d[2];
    r.mre = e.mre;
    r.mae = e.mae;
    r.rmse = e.rmse;
    r.bins = binned_mae(pairs, edges);
    r.n = pairs.size();
    return r;
}

inline nlohmann::json to_json(const MetricsReport& r) {
    nlohmann::json bins = nlohmann::json::array();
    for (const auto& b : r.bins) {
        nlohmann::json jb{{"label", b.label}, {"lo", b.lo}, {"hi", b.hi}, {"count", b.count}};
        jb["mae"] = b.mae ? nlohmann::json(*b.mae) : nlohmann::json(nullptr);
        bins.push_back(std::move(jb));
    }
    return {{"threshold", r.threshold},
            {"delta_mode", r.mode == DeltaMode::Symmetric ? "symmetric" : "one_sided"},
            {"delta1", r.delta1},
            {"delta2", r.delta2},
            {"delta3", r.delta3},
            {"mre", r.mre},
            {"mae", r.mae},
            {"rmse", r.rmse},
            {"n", r.n},
            {"bins", std::move(bins)}};
}

inline MetricsReport report_from_json(const nlohmann::json& j) {
    try {
        MetricsReport r;
        r.threshold = j.at("threshold").get<double>();
        r.mode = j.at("delta_mode").get<std::string>() == "one_sided" ? DeltaMode::OneSided
                                                                      : DeltaMode::Symmetric;
        r.delta1 = j.at("delta1").get<double>();
        r.delta2 = j.at("delta2").get<double>();
        r.delta3 = j.at("delta3").get<double>();
        r.mre = j.at("mre").get<double>();
        r.mae = j.at("mae").get<double>();
        r.rmse = j.at("rmse").get<double>();
        r.n = j.at("n").get<std::size_t>();
        for (const auto& jb : j.at("bins")) {
            BinStat b{jb.at("label").get<std::string>(), jb.at("lo").get<double>(),
                      jb.at("hi").get<double>(), jb.at("count").get<std::size_t>(), std::nullopt};
            if (!jb.at("mae").is_null()) b.mae = jb.at("mae").get<double>();
            r.bins.push_back(std::move(b));
        }
        return r;
    } catch (const nlohmann::json::exception& e) {
        throw Error(Errc::InvalidArgument, std::string("malformed report: ") + e.what());
    }
}

/// Fixed-width table: one overall row (δ1 δ2 δ3 MRE RMSE) and one per-bin MAE row.
inline std::string format_table(const MetricsReport& r) {
    auto cell = [](double v, int prec) {
        char buf[32];
        std::snprintf(buf, sizeof buf, "%10.*f", prec, v);
        return std::string(buf);
    };
    std::ostringstream os;
    os << "        n     delta1    delta2    delta3     MRE(%)      RMSE       MAE\n";
    char nbuf[32];
    std::snprintf(nbuf, sizeof nbuf, "%9zu", r.n);
    os << nbuf << ' ' << cell(r.delta1, 3) << cell(r.delta2, 3) << cell(r.delta3, 3)
       << cell(100.0 * r.mre, 3) << cell(r.rmse, 3) << cell(r.mae, 3) << "\n\n";
    os << "MAE by distance";
    for (const auto& b : r.bins) {
        char lbl[48];
        std::snprintf(lbl, sizeof lbl, "%4s[%g-%g m]", b.label.c_str(), b.lo, b.hi);
        os << "  " << lbl;
    }
    os << "\n               ";
    for (const auto& b : r.bins) {
        char buf[48];
        if (b.mae)
            std::snprintf(buf, sizeof buf, "%*.3f", static_cast<int>(b.label.size()) + 12, *b.mae);
        else
            std::snprintf(buf, sizeof buf, "%*s", static_cast<int>(b.label.size()) + 12, "-");
        os << "  " << buf;
    }
    os << "\ncount          ";
    for (const auto& b : r.bins) {
        char buf[48];
        std::snprintf(buf, sizeof buf, "%*zu", static_cast<int>(b.label.size()) + 12, b.count);
        os << "  " << buf;
    }
    os << '\n';
    return os.str();
}

inline nlohmann::json to_json(const DepthPair& p) {
    return {{"frame_id", p.frame_id}, {"target_id", p.target_id}, {"pred_m", p.pred},
            {"gt_m", p.gt}};
}

inline std::string to_jsonl(std::span<const DepthPair> pairs) {
    std::string out;
    for (const auto& p : pairs) out += to_json(p).dump() + "\n";
    return out;
}

inline std::vector<DepthPair> parse_pairs_jsonl(std::istream& in, const std::string& source) {
    std::vector<DepthPair> pairs;
    std::string line;
    int lineno = 0;
    while (std::getline(in, line)) {
        ++lineno;
        if (line.find_first_not_of(" \t\r") == std::string::npos) continue;
        try {
            const auto j = nlohmann::json::parse(line);
            pairs.push_back({j.at("pred_m").get<double>(), j.at("gt_m").get<double>(),
                             j.at("frame_id").get<std::string>(), j.at("target_id").get<int>()});
        } catch (const nlohmann::json::exception& e) {
            throw Error(Errc::InvalidArgument,
                        source + ":" + std::to_string(lineno) + ": " + e.what());
        }
    }
    return pairs;
}

inline std::vector<DepthPair> read_pairs(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw Error(Errc::IoFailure, "cannot open " + path);
    return parse_pairs_jsonl(in, path);
}

}  // namespace centerdepth::eval
