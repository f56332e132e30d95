#include <algorithm>
#include <cmath>
#include <random>
#include <sstream>

#include <gtest/gtest.h>

#include "centerdepth/evaluation.hpp"
#include "oracles.hpp"

using namespace centerdepth;
using eval::DepthPair;

namespace {

std::vector<DepthPair> from_values(const std::vector<std::pair<double, double>>& pg) {
    std::vector<DepthPair> out;
    int i = 0;
    for (const auto& [p, g] : pg) out.push_back({p, g, "000000", i++});
    return out;
}

const std::vector<double> kEdges(eval::kDistanceBinEdges.begin(), eval::kDistanceBinEdges.end());

}  // namespace

TEST(Delta, PerfectPredictions) {
    const auto d = eval::delta_metrics(from_values({{5, 5}, {80, 80}}), 1.10);
    EXPECT_EQ(d, (std::array<double, 3>{1, 1, 1}));
}

TEST(Delta, ThresholdPowers) {
    const auto d = eval::delta_metrics(from_values({{105, 100}, {115, 100}, {125, 100}}), 1.10);
    EXPECT_EQ(d[0], 1.0 / 3.0);
    EXPECT_EQ(d[1], 2.0 / 3.0);
    EXPECT_EQ(d[2], 1.0);
}

TEST(Delta, BoundaryIsExcluded) {
    // 1.1 * 10 == 11 exactly, so the ratio equals the threshold.
    const auto d = eval::delta_metrics(from_values({{11, 10}}), 1.1);
    EXPECT_EQ(11.0 / 10.0, 1.1);
    EXPECT_EQ(d[0], 0.0);
    EXPECT_EQ(d[1], 1.0);
}

TEST(Delta, SymmetricAndOneSided) {
    const auto pairs = from_values({{80, 100}});
    EXPECT_EQ(eval::delta_metrics(pairs, 1.10, eval::DeltaMode::Symmetric)[0], 0.0);
    EXPECT_EQ(eval::delta_metrics(pairs, 1.10, eval::DeltaMode::OneSided)[0], 1.0);
}

TEST(Delta, Errors) {
    try {
        eval::delta_metrics({}, 1.10);
        FAIL();
    } catch (const Error& e) {
        EXPECT_EQ(e.code(), Errc::EmptyInput);
    }
    EXPECT_THROW(eval::delta_metrics(from_values({{1, 1}}), 1.0), Error);
}

TEST(ErrorMetrics, Perfect) {
    const auto m = eval::error_metrics(from_values({{3, 3}, {9, 9}}));
    EXPECT_EQ(m.mre, 0.0);
    EXPECT_EQ(m.mae, 0.0);
    EXPECT_EQ(m.rmse, 0.0);
}

TEST(ErrorMetrics, SinglePair) {
    const auto m = eval::error_metrics(from_values({{102, 100}}));
    EXPECT_DOUBLE_EQ(m.mre, 0.02);
    EXPECT_DOUBLE_EQ(m.mae, 2.0);
    EXPECT_DOUBLE_EQ(m.rmse, 2.0);
}

TEST(ErrorMetrics, HandArithmetic) {
    const auto a = eval::error_metrics(from_values({{13, 10}, {7, 10}}));
    EXPECT_DOUBLE_EQ(a.mae, 3.0);
    EXPECT_DOUBLE_EQ(a.rmse, 3.0);
    const auto b = eval::error_metrics(from_values({{11, 10}, {15, 10}}));
    EXPECT_DOUBLE_EQ(b.mae, 3.0);
    EXPECT_DOUBLE_EQ(b.rmse, std::sqrt(13.0));
}

TEST(ErrorMetrics, EmptyInput) {
    EXPECT_THROW(eval::error_metrics({}), Error);
}

TEST(BinnedMae, DirectAssignment) {
    const auto bins = eval::binned_mae(from_values({{11, 10}, {62, 60}, {113, 110}, {164, 160}}), kEdges);
    ASSERT_EQ(bins.size(), 4u);
    for (std::size_t b = 0; b < 4; ++b) {
        EXPECT_EQ(bins[b].count, 1u);
        EXPECT_DOUBLE_EQ(*bins[b].mae, b + 1.0);
    }
    EXPECT_EQ(bins[0].label, "R1");
    EXPECT_EQ(bins[3].label, "R4");
}

TEST(BinnedMae, HalfOpenEdges) {
    const auto bins = eval::binned_mae(from_values({{50, 50}, {200, 200}}), kEdges);
    EXPECT_EQ(bins[0].count, 0u);
    EXPECT_FALSE(bins[0].mae.has_value());
    EXPECT_EQ(bins[1].count, 1u);
    EXPECT_EQ(bins[3].count, 1u);  // last bin is closed
}

TEST(BinnedMae, CountsAndRecombination) {
    std::mt19937_64 g(21);
    std::uniform_real_distribution<double> gt(0.1, 199.9), n(-5, 5);
    std::vector<DepthPair> pairs;
    for (int i = 0; i < 500; ++i) {
        const double t = gt(g);
        pairs.push_back({t + n(g), t, "f", i});
    }
    const auto bins = eval::binned_mae(pairs, kEdges);
    std::size_t total = 0;
    double weighted = 0;
    for (const auto& b : bins) {
        total += b.count;
        if (b.mae) weighted += *b.mae * b.count;
    }
    EXPECT_EQ(total, pairs.size());
    EXPECT_NEAR(weighted / total, eval::error_metrics(pairs).mae, 1e-12);
}

TEST(Metrics, PermutationInvariant) {
    std::mt19937_64 g(22);
    std::uniform_real_distribution<double> gt(1, 200), n(0.8, 1.2);
    std::vector<DepthPair> pairs;
    for (int i = 0; i < 200; ++i) {
        const double t = gt(g);
        pairs.push_back({t * n(g), t, "f", i});
    }
    const auto a = eval::build_report(pairs, 1.10, kEdges);
    std::shuffle(pairs.begin(), pairs.end(), g);
    const auto b = eval::build_report(pairs, 1.10, kEdges);
    EXPECT_EQ(a.delta1, b.delta1);
    EXPECT_NEAR(a.mae, b.mae, 1e-12);
    EXPECT_NEAR(a.rmse, b.rmse, 1e-12);
    EXPECT_NEAR(a.mre, b.mre, 1e-12);
}

TEST(Metrics, MatchBruteForce) {
    std::mt19937_64 g(23);
    std::uniform_int_distribution<int> len(1, 60);
    std::uniform_real_distribution<double> gt(0.5, 200);
    std::normal_distribution<double> n(0, 0.15);
    for (int k = 0; k < 1000; ++k) {
        std::vector<DepthPair> pairs;
        std::vector<double> p, t;
        for (int i = len(g); i > 0; --i) {
            t.push_back(gt(g));
            p.push_back(t.back() * std::exp(n(g)));
            pairs.push_back({p.back(), t.back(), "f", i});
        }
        const auto r = eval::build_report(pairs, 1.10, kEdges);
        const auto o = oracle::brute_metrics(p, t, 1.10, kEdges);
        EXPECT_EQ(r.delta1, o.d1);
        EXPECT_EQ(r.delta2, o.d2);
        EXPECT_EQ(r.delta3, o.d3);
        EXPECT_NEAR(r.mae, o.mae, 1e-12 * std::max(1.0, o.mae));
        EXPECT_NEAR(r.rmse, o.rmse, 1e-12 * std::max(1.0, o.rmse));
        EXPECT_NEAR(r.mre, o.mre, 1e-12);
        EXPECT_LE(r.delta1, r.delta2);
        EXPECT_LE(r.delta2, r.delta3);
        EXPECT_GE(r.rmse, r.mae);
    }
}

TEST(Extraction, CenterDepthNearestPixel) {
    DepthRaster r(20, 20, 1, 1.0f);
    r.at(10, 10) = 42.0f;
    EXPECT_EQ(eval::extract_center_depth(r, 10.2, 9.8), 42.0);
    EXPECT_EQ(eval::extract_center_depth(r, 10, 10), 42.0);
    try {
        eval::extract_center_depth(r, 25, 3);
        FAIL();
    } catch (const Error& e) {
        EXPECT_EQ(e.code(), Errc::OutOfBounds);
    }
}

TEST(Extraction, SegDepthMean) {
    DepthRaster r(10, 10, 1, 30.0f);
    const std::vector<Pixel> any{{1, 1}, {5, 7}, {9, 9}};
    EXPECT_EQ(eval::extract_seg_depth(r, any), 30.0);
    r.at(0, 0) = 10.0f;
    r.at(1, 0) = 20.0f;
    const std::vector<Pixel> two{{0, 0}, {1, 0}};
    EXPECT_EQ(eval::extract_seg_depth(r, two), 15.0);
    try {
        eval::extract_seg_depth(r, {});
        FAIL();
    } catch (const Error& e) {
        EXPECT_EQ(e.code(), Errc::EmptyMask);
    }
}

TEST(Extraction, SegDepthMatchesSummation) {
    std::mt19937_64 g(24);
    std::uniform_real_distribution<float> v(1, 200);
    std::uniform_int_distribution<int> px(0, 99);
    DepthRaster r(100, 100, 1, 0.0f);
    for (auto& x : r.data()) x = v(g);
    std::vector<Pixel> mask;
    long double sum = 0;
    for (int i = 0; i < 1000; ++i) {
        mask.push_back({px(g), px(g)});
        sum += r.at(mask.back().x, mask.back().y);
    }
    EXPECT_NEAR(eval::extract_seg_depth(r, mask), static_cast<double>(sum / 1000), 1e-9);
}

TEST(Report, DeltaExampleAndRoundTrip) {
    const auto r = eval::build_report(from_values({{105, 100}, {115, 100}, {125, 100}}), 1.10, kEdges);
    EXPECT_EQ(r.delta1, 1.0 / 3.0);
    EXPECT_EQ(r.delta2, 2.0 / 3.0);
    EXPECT_EQ(r.delta3, 1.0);
    EXPECT_EQ(r.n, 3u);
    const auto back = eval::report_from_json(nlohmann::json::parse(eval::to_json(r).dump()));
    EXPECT_EQ(back, r);
}

TEST(Report, PerfectPredictions) {
    const auto r = eval::build_report(from_values({{10, 10}, {70, 70}}), 1.10, kEdges);
    EXPECT_EQ(r.delta1, 1.0);
    EXPECT_EQ(r.mae, 0.0);
    EXPECT_EQ(r.rmse, 0.0);
    EXPECT_EQ(r.mre, 0.0);
}

TEST(Report, TableColumnOrder) {
    const auto r = eval::build_report(from_values({{11, 10}, {62, 60}}), 1.10, kEdges);
    const auto text = eval::format_table(r);
    const auto d1 = text.find("delta1"), mre = text.find("MRE"), rmse = text.find("RMSE");
    EXPECT_LT(d1, mre);
    EXPECT_LT(mre, rmse);
    EXPECT_LT(text.find("R1"), text.find("R4"));
}

TEST(PairsJsonl, RoundTrip) {
    const auto pairs = from_values({{1.5, 2.25}, {100.125, 99.0}});
    std::istringstream in(eval::to_jsonl(pairs));
    EXPECT_EQ(eval::parse_pairs_jsonl(in, "mem"), pairs);
}

TEST(PairsJsonl, MissingFile) {
    try {
        eval::read_pairs("/nonexistent/pairs.jsonl");
        FAIL();
    } catch (const Error& e) {
        EXPECT_EQ(e.code(), Errc::IoFailure);
    }
}
