#include <cstdlib>
#include <filesystem>
#include <map>
#include <sstream>

#include <gtest/gtest.h>

#include "centerdepth/pipeline.hpp"

using namespace centerdepth;
namespace fs = std::filesystem;

namespace {

std::size_t data_rows(const std::string& csv) {
    std::istringstream in(csv);
    std::string line;
    std::size_t n = 0;
    std::getline(in, line);  // header
    while (std::getline(in, line))
        if (!line.empty()) ++n;
    return n;
}

class PipelineTest : public ::testing::Test {
protected:
    void SetUp() override {
        out_ = fs::temp_directory_path() /
               ("centerdepth_pipe_" + std::string(::testing::UnitTest::GetInstance()->current_test_info()->name()));
        fs::remove_all(out_);
        cfg_ = config::resolve(nlohmann::json::object(), {"frames=3", "log_level=quiet"});
        cfg_.out = out_.string();
    }
    void TearDown() override { fs::remove_all(out_); }

    pipeline::RunResult run(const std::string& cmd, const std::string& input = "") {
        auto c = cfg_;
        c.input = input;
        return pipeline::run(cmd, c, err_);
    }

    fs::path out_;
    config::RunConfig cfg_;
    std::ostringstream err_;
};

}  // namespace

TEST(ParallelMap, KeepsOrder) {
    const auto r = pipeline::parallel_map(100, 4, [](std::size_t i) { return i * i; });
    ASSERT_EQ(r.size(), 100u);
    for (std::size_t i = 0; i < r.size(); ++i) EXPECT_EQ(r[i], i * i);
}

TEST(ParallelMap, RethrowsLowestIndex) {
    try {
        pipeline::parallel_map(50, 3, [](std::size_t i) -> int {
            if (i == 7 || i == 30) throw std::runtime_error(std::to_string(i));
            return 0;
        });
        FAIL();
    } catch (const std::runtime_error& e) {
        EXPECT_STREQ(e.what(), "7");
    }
}

TEST(WorkerCount, EnvironmentCap) {
    ::setenv("CENTERDEPTH_THREADS", "2", 1);
    EXPECT_EQ(pipeline::worker_count(8), 2);
    EXPECT_EQ(pipeline::worker_count(1), 1);
    ::unsetenv("CENTERDEPTH_THREADS");
    EXPECT_EQ(pipeline::worker_count(5), 5);
    EXPECT_GE(pipeline::worker_count(0), 1);
}

TEST(SymmetricExtent, ClampsToNearerEdge) {
    EXPECT_EQ(pipeline::symmetric_extent(10, 5, 20), 10.0);
    EXPECT_EQ(pipeline::symmetric_extent(10, 0, 12), 4.0);
    EXPECT_EQ(pipeline::symmetric_extent(10, 11, 20), 0.0);
}

TEST_F(PipelineTest, RefineThenEvalCountsMatch) {
    const auto gen = run("gen");
    ASSERT_EQ(gen.exit_code, 0) << err_.str();
    const auto refine = run("refine", (gen.run_dir / "dataset").string());
    ASSERT_EQ(refine.exit_code, 0) << err_.str();

    const auto frames = io::load_dataset(gen.run_dir / "dataset");
    std::size_t kept = 0;
    for (std::size_t i = 0; i < frames.size(); ++i)
        kept += pipeline::refine_frame(frames[i], i, cfg_).annotations;
    EXPECT_GT(kept, 0u);

    const auto ev = run("eval", (refine.run_dir / "pairs.jsonl").string());
    ASSERT_EQ(ev.exit_code, 0) << err_.str();
    const auto rep = eval::report_from_json(nlohmann::json::parse(io::read_file(ev.run_dir / "report.json")));
    EXPECT_EQ(rep.n, kept);
    EXPECT_EQ(data_rows(io::read_file(ev.run_dir / "bins.csv")), 4u);
    EXPECT_TRUE(fs::exists(ev.run_dir / "report.txt"));
    EXPECT_TRUE(fs::exists(ev.run_dir / "config.json"));
    EXPECT_TRUE(fs::exists(ev.run_dir / "run.json"));
}

TEST_F(PipelineTest, PlanArtifactsAgree) {
    const auto gen = run("gen");
    ASSERT_EQ(gen.exit_code, 0);
    const auto refine = run("refine", (gen.run_dir / "dataset").string());
    ASSERT_EQ(refine.exit_code, 0);
    const auto plan = run("plan", (refine.run_dir / "obstacles.jsonl").string());
    ASSERT_EQ(plan.exit_code, 0) << err_.str();

    const auto grid = nlohmann::json::parse(io::read_file(plan.run_dir / "grid.json"));
    EXPECT_EQ(data_rows(io::read_file(plan.run_dir / "bev_scatter.csv")), grid["occupied"].size());
    const auto path = nlohmann::json::parse(io::read_file(plan.run_dir / "path.json"));
    EXPECT_EQ(data_rows(io::read_file(plan.run_dir / "path_polyline.csv")), path["cells"].size());
    EXPECT_GT(path["cells"].size(), 1u);
}

TEST_F(PipelineTest, MissingInputIsUsageError) {
    const auto r = run("eval", (out_ / "nope.jsonl").string());
    EXPECT_EQ(r.exit_code, 2);
    EXPECT_FALSE(fs::exists(out_));
}

TEST_F(PipelineTest, UnknownCommand) {
    EXPECT_EQ(run("bogus").exit_code, 2);
}

TEST_F(PipelineTest, PipelineFailureLeavesMarker) {
    fs::create_directories(out_ / "empty_dataset");
    const auto r = run("refine", (out_ / "empty_dataset").string());
    EXPECT_EQ(r.exit_code, 1);
    EXPECT_TRUE(fs::exists(r.run_dir / "FAILED"));
    const auto meta = nlohmann::json::parse(io::read_file(r.run_dir / "run.json"));
    EXPECT_EQ(meta["status"], "failed");
}

TEST_F(PipelineTest, RunDirectoriesDoNotCollide) {
    const auto a = pipeline::make_run_dir(out_, "gen");
    const auto b = pipeline::make_run_dir(out_, "gen");
    EXPECT_NE(a, b);
    EXPECT_TRUE(fs::is_directory(a));
    EXPECT_TRUE(fs::is_directory(b));
}

TEST_F(PipelineTest, DecodedDetectionsMatchGroundTruthCells) {
    auto c = cfg_;
    c.refine.detections = config::DetectionMode::Decoded;
    for (std::uint64_t i = 0; i < 5; ++i) {
        const auto frame = scene::generate_frame(cfg_.scene, i);
        const auto decoded = pipeline::refine_frame(frame, i, c);
        const auto gt = pipeline::refine_frame(frame, i, cfg_);
        // Centers sharing a cell or a peak window decode to fewer detections.
        EXPECT_LE(decoded.refined.size(), gt.refined.size());
        EXPECT_GT(decoded.refined.size(), 0u);
        std::map<int, double> gt_depth;
        for (const auto& o : gt.obstacles) gt_depth[o.target_id] = o.gt_m;
        for (const auto& o : decoded.obstacles) {
            ASSERT_TRUE(gt_depth.count(o.target_id));
            EXPECT_EQ(o.gt_m, gt_depth[o.target_id]);
        }
    }
}

TEST(Obstacle, JsonRoundTrip) {
    pipeline::Obstacle o{"000003", 2, ObjectClass::Van, 100.5, 200.25, 30, 20, 42.5, 42.0};
    const auto back = pipeline::obstacle_from_json(pipeline::to_json(o));
    EXPECT_EQ(back.frame_id, o.frame_id);
    EXPECT_EQ(back.target_id, o.target_id);
    EXPECT_EQ(back.cls, o.cls);
    EXPECT_EQ(back.depth_m, o.depth_m);
    EXPECT_EQ(back.gt_m, o.gt_m);
}
