#pragma once

#include <algorithm>
#include <atomic>
#include <chrono>
#include <cstdint>
#include <cstdio>
#include <cstdlib>
#include <ctime>
#include <exception>
#include <filesystem>
#include <functional>
#include <iostream>
#include <map>
#include <optional>
#include <sstream>
#include <string>
#include <thread>
#include <vector>

#include <nlohmann/json.hpp>

#include "centerdepth/bev.hpp"
#include "centerdepth/config.hpp"
#include "centerdepth/crf.hpp"
#include "centerdepth/dataset.hpp"
#include "centerdepth/evaluation.hpp"
#include "centerdepth/heatmap.hpp"
#include "centerdepth/rng.hpp"
#include "centerdepth/scene.hpp"

namespace centerdepth::pipeline {

namespace fs = std::filesystem;
using nlohmann::json;

// ---------------------------------------------------------------------------
// Worker pool

/// Worker count: cfg.threads (0 = hardware), capped by CENTERDEPTH_THREADS.
inline int worker_count(int configured) {
    int n = configured > 0 ? configured : static_cast<int>(std::thread::hardware_concurrency());
    n = std::max(1, n);
    if (const char* env = std::getenv("CENTERDEPTH_THREADS")) {
        char* end = nullptr;
        const long cap = std::strtol(env, &end, 10);
        if (end != env && cap > 0) n = std::min<long>(n, cap);
    }
    return n;
}

/// Runs fn(0..count-1) on up to `threads` workers; results keep index order.
/// The first exception by index is rethrown after all workers finish.
template <typename Fn>
auto parallel_map(std::size_t count, int threads, Fn fn) {
    using R = decltype(fn(std::size_t{}));
    std::vector<std::optional<R>> slots(count);
    std::vector<std::exception_ptr> errors(count);
    std::atomic<std::size_t> next{0};
    auto work = [&] {
        for (std::size_t i = next++; i < count; i = next++) {
            try {
                slots[i].emplace(fn(i));
            } catch (...) {
                errors[i] = std::current_exception();
            }
        }
    };
    const auto n = static_cast<std::size_t>(std::max(1, threads));
    if (n == 1 || count <= 1) {
        work();
    } else {
        std::vector<std::jthread> pool;
        for (std::size_t t = 0; t < std::min(n, count); ++t) pool.emplace_back(work);
    }
    for (auto& e : errors)
        if (e) std::rethrow_exception(e);
    std::vector<R> out;
    out.reserve(count);
    for (auto& s : slots) out.push_back(std::move(*s));
    return out;
}

// ---------------------------------------------------------------------------
// Logging

class Logger {
public:
    Logger(std::ostream& os, const std::string& level)
        : os_(os), level_(level == "quiet" ? 0 : level == "debug" ? 2 : 1) {}
    void info(const std::string& m) const { if (level_ >= 1) os_ << "[info] " << m << '\n'; }
    void debug(const std::string& m) const { if (level_ >= 2) os_ << "[debug] " << m << '\n'; }
    void error(const std::string& m) const { os_ << "[error] " << m << '\n'; }

private:
    std::ostream& os_;
    int level_;
};

// ---------------------------------------------------------------------------
// Per-frame refinement

struct Obstacle {
    std::string frame_id;
    int target_id{0};
    ObjectClass cls{ObjectClass::Car};
    double u{0}, v{0}, w{0}, h{0};
    double depth_m{0};
    double gt_m{0};
};

inline json to_json(const Obstacle& o) {
    return {{"frame_id", o.frame_id}, {"target_id", o.target_id}, {"class", to_string(o.cls)},
            {"u", o.u},               {"v", o.v},                 {"w", o.w},
            {"h", o.h},               {"depth_m", o.depth_m},     {"gt_m", o.gt_m}};
}

inline Obstacle obstacle_from_json(const json& j) {
    const auto cls = class_from_string(j.at("class").get<std::string>());
    if (!cls) throw Error(Errc::InvalidArgument, "unknown class " + j.at("class").dump());
    return {j.at("frame_id").get<std::string>(),
            j.at("target_id").get<int>(),
            *cls,
            j.at("u").get<double>(),
            j.at("v").get<double>(),
            j.at("w").get<double>(),
            j.at("h").get<double>(),
            j.at("depth_m").get<double>(),
            j.at("gt_m").get<double>()};
}

struct FrameResult {
    std::vector<eval::DepthPair> refined;
    std::vector<eval::DepthPair> center;  ///< raw unary read at the center pixel
    std::vector<eval::DepthPair> seg;     ///< mean unary over the target's visible pixels
    std::vector<Obstacle> obstacles;
    std::size_t annotations{0};  ///< post-filter count
    std::size_t peaks{0};
    std::size_t matched{0};
};

/// Largest extent centered on pixel `c` that stays inside [lo, hi].
inline double symmetric_extent(int c, int lo, int hi) {
    return std::max(0, 2 * std::min(c - lo, hi - c));
}

/// Refines every retained annotation of one frame. Detections are either the
/// annotation centers or decoded heatmap peaks matched to annotations by cell.
inline FrameResult refine_frame(const scene::SyntheticFrame& frame, std::uint64_t frame_index,
                                const config::RunConfig& cfg) {
    const int W = frame.depth.width();
    const int H = frame.depth.height();
    FrameResult out;

    std::vector<std::size_t> keep;
    for (std::size_t i = 0; i < frame.annotations.size(); ++i) {
        const auto& a = frame.annotations[i];
        if (a.depth_m <= cfg.refine.max_range && a.visibility >= cfg.refine.min_visibility)
            keep.push_back(i);
    }
    out.annotations = keep.size();

    std::vector<Peak> peaks;
    if (cfg.refine.detections == config::DetectionMode::Decoded) {
        peaks = extract_peaks(frame.heatmap, static_cast<float>(cfg.refine.peak_threshold),
                              cfg.refine.peak_window);
        out.peaks = peaks.size();
    }
    std::vector<std::uint8_t> used(peaks.size(), 0);

    struct Job {
        std::size_t ann;
        Detection det;
    };
    std::vector<Job> jobs;
    for (std::size_t i : keep) {
        const auto& a = frame.annotations[i];
        Detection det{std::clamp(a.u, 0.0, W - 1.0), std::clamp(a.v, 0.0, H - 1.0), 0, 0, a.cls,
                      1.0f};
        if (cfg.refine.detections == config::DetectionMode::Decoded) {
            const Pixel cell = frame.heatmap.cell_of(a.u, a.v);
            std::optional<std::size_t> hit;
            for (std::size_t p = 0; p < peaks.size(); ++p)
                if (!used[p] && peaks[p].cell == cell) {
                    hit = p;
                    break;
                }
            if (!hit) continue;
            used[*hit] = 1;
            det = detection_from_peak(peaks[*hit], frame.heatmap, 0, 0, a.cls);
        }
        const scene::PixelBox pb = scene::pixel_box(a);
        const int cx = static_cast<int>(std::lround(det.u));
        const int cy = static_cast<int>(std::lround(det.v));
        det.w = symmetric_extent(cx, std::max(0, pb.x0), std::min(W - 1, pb.x1));
        det.h = symmetric_extent(cy, std::max(0, pb.y0), std::min(H - 1, pb.y1));
        jobs.push_back({i, det});
    }
    out.matched = jobs.size();

    DepthRaster noisy;
    const DepthRaster* unary_raster = &frame.depth;
    if (cfg.refine.unary == config::UnaryMode::Noisy) {
        std::vector<scene::PixelBox> boxes;
        for (const auto& j : jobs) {
            boxes.push_back(scene::pixel_box(frame.annotations[j.ann]));
            const Region r = j.det.region(W, H);
            boxes.push_back({r.pixels().front().x, r.pixels().front().y, r.pixels().back().x,
                             r.pixels().back().y});
        }
        noisy = scene::corrupt_depth_in(frame.depth, boxes, cfg.refine.unary_noise, cfg.seed,
                                        frame_index);
        unary_raster = &noisy;
    } else if (cfg.refine.unary == config::UnaryMode::External) {
        noisy = io::read_raster(fs::path(cfg.refine.unary_dir) / (frame.id + ".depth.f32"));
        if (noisy.width() != W || noisy.height() != H)
            throw Error(Errc::MalformedRaster, "external unary for frame " + frame.id +
                                                   " does not match the image size");
        unary_raster = &noisy;
    }

    const crf::FeatureView view{frame.features, frame.heatmap.stride_x, frame.heatmap.stride_y};
    const auto unary = crf::UnarySource::from_raster(*unary_raster);
    for (const auto& j : jobs) {
        const auto& a = frame.annotations[j.ann];
        const int id = static_cast<int>(j.ann);
        const Region region = j.det.region(W, H);
        const auto ref = crf::refine_center_depth(view, region, unary, cfg.crf);
        out.refined.push_back({ref.center_depth, a.depth_m, frame.id, id});
        out.center.push_back(
            {eval::extract_center_depth(*unary_raster, j.det.u, j.det.v), a.depth_m, frame.id, id});

        // Segmentation mask: box pixels this target owns in the clean depth layer.
        std::vector<Pixel> mask;
        const scene::PixelBox pb = scene::pixel_box(a);
        const auto d = static_cast<float>(a.depth_m);
        for (int y = std::max(0, pb.y0); y <= std::min(H - 1, pb.y1); ++y)
            for (int x = std::max(0, pb.x0); x <= std::min(W - 1, pb.x1); ++x)
                if (frame.depth.at(x, y) == d) mask.push_back({x, y});
        if (mask.empty()) mask.push_back(region.center());
        out.seg.push_back({eval::extract_seg_depth(*unary_raster, mask), a.depth_m, frame.id, id});

        out.obstacles.push_back({frame.id, id, a.cls, j.det.u, j.det.v, a.box_width(),
                                 a.box_height(), ref.center_depth, a.depth_m});
    }
    return out;
}

// ---------------------------------------------------------------------------
// Planning

struct PlanResult {
    bev::OccupancyGrid grid;
    bev::PlannedPath path;
    std::vector<bev::GroundPoint> points;
    std::array<double, 2> goal{};
};

inline std::vector<bev::GroundPoint> ground_points(std::span<const Obstacle> obstacles,
                                                   const CameraIntrinsics& k) {
    std::vector<bev::GroundPoint> pts;
    for (const auto& o : obstacles) {
        const Detection det{o.u, o.v, o.w, o.h, o.cls, 1.0f};
        pts.push_back(bev::detection_to_bev(det, o.depth_m, k));
    }
    return pts;
}

/// Plans from the ego position to the configured goal, or, with goal "auto",
/// to a free cell just behind a randomly chosen obstacle (first reachable one).
inline PlanResult plan_frame(std::span<const Obstacle> obstacles, const config::RunConfig& cfg,
                             std::uint64_t frame_index) {
    PlanResult r;
    const auto& spec = cfg.plan.grid;
    r.points = ground_points(obstacles, cfg.scene.camera);
    r.grid = bev::rasterize_obstacles(r.points, spec);
    const auto start = r.grid.cell_of(0.0, spec.z_min + 0.5 * spec.resolution);
    if (!start) throw Error(Errc::InvalidEndpoint, "ego position lies outside the grid");

    std::vector<std::array<double, 2>> goals;
    if (cfg.plan.goal) {
        goals.push_back(*cfg.plan.goal);
    } else {
        std::vector<std::size_t> order(r.points.size());
        for (std::size_t i = 0; i < order.size(); ++i) order[i] = i;
        rng::Generator g(cfg.seed, rng::Stream::Planner, frame_index);
        for (std::size_t i = order.size(); i > 1; --i)
            std::swap(order[i - 1], order[static_cast<std::size_t>(g.uniform_int(0, i - 1))]);
        for (std::size_t i : order) {
            const auto& p = r.points[i];
            goals.push_back({p.x, p.z + p.radius + spec.inflation + 2.0 * spec.resolution});
        }
        goals.push_back({0.0, spec.z_max - 0.5 * spec.resolution});
    }
    for (const auto& goal : goals) {
        const auto cell = r.grid.cell_of(goal[0], goal[1]);
        if (cfg.plan.goal && !cell) throw Error(Errc::InvalidEndpoint, "goal lies outside the grid");
        if (!cell || (!cfg.plan.goal && r.grid.occupied(*cell))) continue;
        try {
            r.path = bev::astar(r.grid, *start, *cell);
            r.goal = goal;
            return r;
        } catch (const Error& e) {
            if (cfg.plan.goal || e.code() != Errc::Unreachable) throw;
        }
    }
    throw Error(Errc::Unreachable, "no reachable goal behind any obstacle");
}

// ---------------------------------------------------------------------------
// Plot data

inline std::string bins_csv(const eval::MetricsReport& r) {
    std::ostringstream os;
    os << "label,lo_m,hi_m,count,mae_m\n";
    for (const auto& b : r.bins) {
        os << b.label << ',' << b.lo << ',' << b.hi << ',' << b.count << ',';
        if (b.mae) {
            char buf[40];
            std::snprintf(buf, sizeof buf, "%.17g", *b.mae);
            os << buf;
        }
        os << '\n';
    }
    return os.str();
}

inline std::string scatter_csv(const bev::OccupancyGrid& grid) {
    std::ostringstream os;
    os << "x_m,z_m\n";
    char buf[64];
    for (int r = 0; r < grid.rows(); ++r)
        for (int c = 0; c < grid.cols(); ++c)
            if (grid.occupied({c, r})) {
                std::snprintf(buf, sizeof buf, "%.17g,%.17g\n", grid.center_x(c), grid.center_z(r));
                os << buf;
            }
    return os.str();
}

inline std::string polyline_csv(const bev::PlannedPath& path, const bev::OccupancyGrid& grid) {
    std::ostringstream os;
    os << "x_m,z_m\n";
    char buf[64];
    for (const auto& c : path.cells) {
        std::snprintf(buf, sizeof buf, "%.17g,%.17g\n", grid.center_x(c.col), grid.center_z(c.row));
        os << buf;
    }
    return os.str();
}

/// Side-by-side binned MAE for several methods.
inline std::string comparison_table(
    const std::vector<std::pair<std::string, eval::MetricsReport>>& rows) {
    std::ostringstream os;
    char buf[64];
    std::snprintf(buf, sizeof buf, "%-10s", "method");
    os << buf;
    if (!rows.empty())
        for (const auto& b : rows.front().second.bins) {
            std::snprintf(buf, sizeof buf, "%14s", (b.label + " MAE").c_str());
            os << buf;
        }
    os << "      delta1       MRE\n";
    for (const auto& [name, r] : rows) {
        std::snprintf(buf, sizeof buf, "%-10s", name.c_str());
        os << buf;
        for (const auto& b : r.bins) {
            if (b.mae) std::snprintf(buf, sizeof buf, "%14.3f", *b.mae);
            else std::snprintf(buf, sizeof buf, "%14s", "-");
            os << buf;
        }
        std::snprintf(buf, sizeof buf, "%12.3f%10.4f\n", r.delta1, r.mre);
        os << buf;
    }
    return os.str();
}

// ---------------------------------------------------------------------------
// Run directory and commands

inline std::string utc_stamp(const char* fmt) {
    const std::time_t now = std::chrono::system_clock::to_time_t(std::chrono::system_clock::now());
    std::tm tm{};
    gmtime_r(&now, &tm);
    char buf[40];
    std::strftime(buf, sizeof buf, fmt, &tm);
    return buf;
}

/// Creates <out>/<command>-<UTC stamp>, appending -2, -3, ... on collision.
inline fs::path make_run_dir(const fs::path& out, const std::string& command) {
    fs::create_directories(out);
    const std::string base = command + "-" + utc_stamp("%Y%m%dT%H%M%SZ");
    for (int i = 1;; ++i) {
        const fs::path p = out / (i == 1 ? base : base + "-" + std::to_string(i));
        if (fs::create_directory(p)) return p;
    }
}

struct RunResult {
    int exit_code{0};
    fs::path run_dir;
};

inline const std::vector<std::string>& commands() {
    static const std::vector<std::string> c{"gen", "refine", "eval", "plan", "demo"};
    return c;
}

class Runner {
public:
    Runner(const config::RunConfig& cfg, fs::path dir, const Logger& log)
        : cfg_(cfg), dir_(std::move(dir)), log_(log), threads_(worker_count(cfg.threads)) {}

    std::vector<scene::SyntheticFrame> gen() {
        auto frames = parallel_map(static_cast<std::size_t>(cfg_.frames), threads_,
                                   [&](std::size_t i) { return scene::generate_frame(cfg_.scene, i); });
        io::emit_dataset(frames, dir_ / "dataset");
        log_.info("wrote " + std::to_string(frames.size()) + " frames to " +
                  (dir_ / "dataset").string());
        return frames;
    }

    std::vector<FrameResult> refine(const std::vector<scene::SyntheticFrame>& frames) {
        auto results = parallel_map(frames.size(), threads_, [&](std::size_t i) {
            return refine_frame(frames[i], frame_index(frames[i], i), cfg_);
        });
        std::vector<eval::DepthPair> refined, center, seg;
        std::string obstacles;
        std::size_t kept = 0;
        for (const auto& r : results) {
            refined.insert(refined.end(), r.refined.begin(), r.refined.end());
            center.insert(center.end(), r.center.begin(), r.center.end());
            seg.insert(seg.end(), r.seg.begin(), r.seg.end());
            for (const auto& o : r.obstacles) obstacles += to_json(o).dump() + "\n";
            kept += r.annotations;
        }
        io::write_file(dir_ / "pairs.jsonl", eval::to_jsonl(refined));
        io::write_file(dir_ / "pairs_center.jsonl", eval::to_jsonl(center));
        io::write_file(dir_ / "pairs_seg.jsonl", eval::to_jsonl(seg));
        io::write_file(dir_ / "obstacles.jsonl", obstacles);
        log_.info("refined " + std::to_string(refined.size()) + " of " + std::to_string(kept) +
                  " retained targets");
        return results;
    }

    eval::MetricsReport evaluate(std::span<const eval::DepthPair> pairs, const std::string& stem) {
        const auto r = eval::build_report(pairs, cfg_.eval.delta_threshold, cfg_.eval.bin_edges,
                                          cfg_.eval.delta_mode);
        io::write_file(dir_ / (stem + ".json"), eval::to_json(r).dump(2) + "\n");
        io::write_file(dir_ / (stem + ".txt"), eval::format_table(r));
        return r;
    }

    PlanResult plan(std::span<const Obstacle> all) {
        std::string frame = cfg_.plan.frame;
        if (frame.empty() && !all.empty()) frame = all.front().frame_id;
        std::vector<Obstacle> sel;
        for (const auto& o : all)
            if (o.frame_id == frame) sel.push_back(o);
        std::uint64_t index = 0;
        try {
            index = std::stoull(frame);
        } catch (const std::exception&) {
        }
        auto r = plan_frame(sel, cfg_, index);
        io::write_file(dir_ / "grid.json", bev::to_json(r.grid).dump() + "\n");
        json pj = bev::to_json(r.path, r.grid);
        pj["frame_id"] = frame;
        pj["goal_m"] = r.goal;
        io::write_file(dir_ / "path.json", pj.dump(2) + "\n");
        io::write_file(dir_ / "bev_scatter.csv", scatter_csv(r.grid));
        io::write_file(dir_ / "path_polyline.csv", polyline_csv(r.path, r.grid));
        log_.info("planned " + std::to_string(r.path.cells.size()) + " cells on frame " + frame +
                  ", cost " + std::to_string(r.path.cost));
        return r;
    }

    void decode_summary(const std::vector<scene::SyntheticFrame>& frames) {
        json per = json::array();
        std::size_t planted = 0, found = 0, hits = 0;
        for (const auto& f : frames) {
            const auto peaks = extract_peaks(f.heatmap, static_cast<float>(cfg_.refine.peak_threshold),
                                             cfg_.refine.peak_window);
            std::size_t h = 0;
            for (const auto& a : f.annotations) {
                const Pixel c = f.heatmap.cell_of(a.u, a.v);
                if (std::any_of(peaks.begin(), peaks.end(), [&](const Peak& p) { return p.cell == c; }))
                    ++h;
            }
            per.push_back({{"frame_id", f.id},
                           {"annotations", f.annotations.size()},
                           {"peaks", peaks.size()},
                           {"matched", h}});
            planted += f.annotations.size();
            found += peaks.size();
            hits += h;
        }
        io::write_file(dir_ / "decode.json",
                       json{{"threshold", cfg_.refine.peak_threshold},
                            {"window", cfg_.refine.peak_window},
                            {"annotations", planted},
                            {"peaks", found},
                            {"matched", hits},
                            {"frames", per}}
                               .dump(2) + "\n");
        log_.info("decoded " + std::to_string(found) + " peaks for " + std::to_string(planted) +
                  " annotations");
    }

    const fs::path& dir() const noexcept { return dir_; }

private:
    static std::uint64_t frame_index(const scene::SyntheticFrame& f, std::size_t fallback) {
        try {
            return std::stoull(f.id);
        } catch (const std::exception&) {
            return fallback;
        }
    }

    const config::RunConfig& cfg_;
    fs::path dir_;
    const Logger& log_;
    int threads_;
};

inline std::vector<Obstacle> read_obstacles(const fs::path& path) {
    std::istringstream in(io::read_file(path));
    std::vector<Obstacle> out;
    std::string line;
    int lineno = 0;
    while (std::getline(in, line)) {
        ++lineno;
        if (line.find_first_not_of(" \t\r") == std::string::npos) continue;
        try {
            out.push_back(obstacle_from_json(json::parse(line)));
        } catch (const json::exception& e) {
            throw Error(Errc::InvalidArgument,
                        path.string() + ":" + std::to_string(lineno) + ": " + e.what());
        }
    }
    return out;
}

/// Executes one subcommand in a fresh run directory. Returns 0 on success, 1 on a
/// pipeline error (the run directory then holds a FAILED marker) and 2 when the
/// command or its input is unusable.
inline RunResult run(const std::string& command, const config::RunConfig& cfg,
                     std::ostream& err = std::cerr) {
    const Logger log(err, cfg.log_level);
    if (std::find(commands().begin(), commands().end(), command) == commands().end()) {
        log.error("unknown command '" + command + "'");
        return {2, {}};
    }
    if (command == "refine" || command == "eval" || command == "plan") {
        if (cfg.input.empty()) {
            log.error(command + " requires an input path");
            return {2, {}};
        }
        if (!fs::exists(cfg.input)) {
            log.error("input " + cfg.input + " does not exist");
            return {2, {}};
        }
    }

    RunResult result;
    try {
        result.run_dir = make_run_dir(cfg.out, command);
    } catch (const std::exception& e) {
        log.error(std::string("cannot create run directory: ") + e.what());
        return {1, {}};
    }
    const fs::path& dir = result.run_dir;
    const std::string started = utc_stamp("%Y-%m-%dT%H:%M:%SZ");
    try {
        io::write_file(dir / "config.json", config::to_json(cfg).dump(2) + "\n");
        Runner r(cfg, dir, log);
        if (command == "gen") {
            r.gen();
        } else if (command == "refine") {
            r.refine(io::load_dataset(cfg.input));
        } else if (command == "eval") {
            const auto pairs = eval::read_pairs(cfg.input);
            const auto rep = r.evaluate(pairs, "report");
            io::write_file(dir / "bins.csv", bins_csv(rep));
        } else if (command == "plan") {
            r.plan(read_obstacles(cfg.input));
        } else {
            const auto frames = r.gen();
            r.decode_summary(frames);
            const auto results = r.refine(frames);
            std::vector<eval::DepthPair> refined, center, seg;
            std::vector<Obstacle> obstacles;
            for (const auto& fr : results) {
                refined.insert(refined.end(), fr.refined.begin(), fr.refined.end());
                center.insert(center.end(), fr.center.begin(), fr.center.end());
                seg.insert(seg.end(), fr.seg.begin(), fr.seg.end());
                obstacles.insert(obstacles.end(), fr.obstacles.begin(), fr.obstacles.end());
            }
            const auto rep = r.evaluate(refined, "report");
            const auto rc = r.evaluate(center, "report_center");
            const auto rs = r.evaluate(seg, "report_seg");
            io::write_file(dir / "bins.csv", bins_csv(rep));
            io::write_file(dir / "table.txt",
                           comparison_table({{"crf", rep}, {"center", rc}, {"seg", rs}}));
            r.plan(obstacles);
        }
    } catch (const std::exception& e) {
        log.error(e.what());
        try {
            io::write_file(dir / "FAILED", std::string(e.what()) + "\n");
        } catch (...) {
        }
        result.exit_code = 1;
    }
    try {
        io::write_file(dir / "run.json", json{{"command", command},
                                              {"seed", cfg.seed},
                                              {"started", started},
                                              {"finished", utc_stamp("%Y-%m-%dT%H:%M:%SZ")},
                                              {"status", result.exit_code == 0 ? "ok" : "failed"}}
                                                 .dump(2) + "\n");
    } catch (const std::exception& e) {
        log.error(e.what());
        result.exit_code = 1;
    }
    if (result.exit_code == 0) log.info("run directory " + dir.string());
    return result;
}

}  // namespace centerdepth::pipeline
