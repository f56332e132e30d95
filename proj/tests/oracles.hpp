#pragma once
// Reference implementations used only by tests. Each one is written from the
// mathematical definition and shares no code with the library under test.

#include <algorithm>
#include <array>
#include <cmath>
#include <cstdint>
#include <limits>
#include <optional>
#include <queue>
#include <utility>
#include <vector>

#include <Eigen/Dense>

namespace oracle {

/// Pinhole projection through an explicit 3x4 matrix P = K [R | t] acting on
/// homogeneous coordinates.
struct Projection {
    double u, v, w;
};

inline Projection project_homogeneous(const std::array<double, 9>& K, const std::array<double, 9>& R,
                                      const std::array<double, 3>& t,
                                      const std::array<double, 3>& X) {
    double Rt[3][4];
    for (int r = 0; r < 3; ++r) {
        for (int c = 0; c < 3; ++c) Rt[r][c] = R[r * 3 + c];
        Rt[r][3] = t[r];
    }
    double P[3][4] = {};
    for (int r = 0; r < 3; ++r)
        for (int c = 0; c < 4; ++c)
            for (int k = 0; k < 3; ++k) P[r][c] += K[r * 3 + k] * Rt[k][c];
    const double Xh[4] = {X[0], X[1], X[2], 1.0};
    double x[3] = {};
    for (int r = 0; r < 3; ++r)
        for (int c = 0; c < 4; ++c) x[r] += P[r][c] * Xh[c];
    return {x[0] / x[2], x[1] / x[2], x[2]};
}

/// Star-CRF minimizer from the dense normal equations H D = λ d̂, where
/// H = λ I + Σ_i ω_i (e_i - e_c)(e_i - e_c)^T.
inline std::vector<double> dense_crf_solve(const std::vector<double>& unary,
                                           const std::vector<double>& weights, std::size_t center,
                                           double lambda) {
    const auto n = static_cast<Eigen::Index>(unary.size());
    Eigen::MatrixXd H = Eigen::MatrixXd::Identity(n, n) * lambda;
    Eigen::VectorXd b(n);
    const auto c = static_cast<Eigen::Index>(center);
    for (Eigen::Index i = 0; i < n; ++i) {
        b(i) = lambda * unary[static_cast<std::size_t>(i)];
        if (i == c) continue;
        const double w = weights[static_cast<std::size_t>(i)];
        H(i, i) += w;
        H(c, c) += w;
        H(i, c) -= w;
        H(c, i) -= w;
    }
    const Eigen::VectorXd x = H.ldlt().solve(b);
    return {x.data(), x.data() + n};
}

/// Star CRF energy in extended precision.
inline long double crf_energy(const std::vector<long double>& D, const std::vector<double>& unary,
                              const std::vector<double>& weights, std::size_t center,
                              double lambda) {
    long double e = 0;
    for (std::size_t j = 0; j < D.size(); ++j) {
        const long double r = D[j] - unary[j];
        e += static_cast<long double>(lambda) * r * r;
        if (j != center) {
            const long double p = D[j] - D[center];
            e += static_cast<long double>(weights[j]) * p * p;
        }
    }
    return e;
}

/// Central finite difference of crf_energy along coordinate j.
inline double crf_energy_fd(std::vector<long double> D, std::size_t j,
                            const std::vector<double>& unary, const std::vector<double>& weights,
                            std::size_t center, double lambda, long double h) {
    const long double x = D[j];
    D[j] = x + h;
    const long double ep = crf_energy(D, unary, weights, center, lambda);
    D[j] = x - h;
    const long double em = crf_energy(D, unary, weights, center, lambda);
    return static_cast<double>((ep - em) / (2 * h));
}

/// Every image pixel (x, y) with |x - cx| <= w/2 and |y - cy| <= h/2, row-major.
inline std::vector<std::pair<int, int>> lattice(int cx, int cy, double w, double h, int W, int H) {
    std::vector<std::pair<int, int>> out;
    for (int y = 0; y < H; ++y)
        for (int x = 0; x < W; ++x)
            if (2.0 * std::abs(x - cx) <= w && 2.0 * std::abs(y - cy) <= h) out.emplace_back(x, y);
    return out;
}

struct Metrics {
    double d1, d2, d3, mre, mae, rmse;
    std::vector<std::optional<double>> bin_mae;
    std::vector<std::size_t> bin_count;
};

/// Brute-force metric evaluator: one pass per quantity, bins by explicit search.
inline Metrics brute_metrics(const std::vector<double>& pred, const std::vector<double>& gt,
                             double t, const std::vector<double>& edges) {
    Metrics m{};
    const double n = static_cast<double>(pred.size());
    for (int k = 1; k <= 3; ++k) {
        std::size_t c = 0;
        for (std::size_t i = 0; i < pred.size(); ++i) {
            const double r = pred[i] > gt[i] ? pred[i] / gt[i] : gt[i] / pred[i];
            if (r < std::pow(t, k)) ++c;
        }
        (k == 1 ? m.d1 : k == 2 ? m.d2 : m.d3) = static_cast<double>(c) / n;
    }
    long double rel = 0, abs_sum = 0, sq = 0;
    for (std::size_t i = 0; i < pred.size(); ++i) {
        const long double e = static_cast<long double>(pred[i]) - gt[i];
        rel += std::fabs(e) / gt[i];
        abs_sum += std::fabs(e);
        sq += e * e;
    }
    m.mre = static_cast<double>(rel / n);
    m.mae = static_cast<double>(abs_sum / n);
    m.rmse = static_cast<double>(std::sqrt(sq / n));
    const std::size_t nb = edges.size() - 1;
    for (std::size_t b = 0; b < nb; ++b) {
        long double s = 0;
        std::size_t c = 0;
        for (std::size_t i = 0; i < gt.size(); ++i) {
            const bool last = b + 1 == nb;
            const bool in = gt[i] >= edges[b] && (last ? gt[i] <= edges[b + 1] : gt[i] < edges[b + 1]);
            if (!in) continue;
            s += std::fabs(static_cast<long double>(pred[i]) - gt[i]);
            ++c;
        }
        m.bin_count.push_back(c);
        m.bin_mae.push_back(c ? std::optional<double>(static_cast<double>(s / c)) : std::nullopt);
    }
    return m;
}

/// Dijkstra over an 8-connected grid with unit/√2 steps; diagonal moves need
/// both side-adjacent cells free. Returns the cost, or nullopt if unreachable.
inline std::optional<double> dijkstra(const std::vector<std::uint8_t>& occ, int cols, int rows,
                                      int sc, int sr, int gc, int gr) {
    auto free = [&](int c, int r) {
        return c >= 0 && r >= 0 && c < cols && r < rows && !occ[static_cast<std::size_t>(r) * cols + c];
    };
    if (!free(sc, sr) || !free(gc, gr)) return std::nullopt;
    std::vector<double> dist(occ.size(), std::numeric_limits<double>::infinity());
    using Item = std::pair<double, int>;
    std::priority_queue<Item, std::vector<Item>, std::greater<>> pq;
    dist[static_cast<std::size_t>(sr) * cols + sc] = 0;
    pq.emplace(0.0, sr * cols + sc);
    while (!pq.empty()) {
        const auto [d, id] = pq.top();
        pq.pop();
        if (d > dist[id]) continue;
        const int c = id % cols, r = id / cols;
        for (int dr = -1; dr <= 1; ++dr) {
            for (int dc = -1; dc <= 1; ++dc) {
                if (!dr && !dc) continue;
                if (!free(c + dc, r + dr)) continue;
                if (dr && dc && (!free(c + dc, r) || !free(c, r + dr))) continue;
                const double nd = d + ((dr && dc) ? std::sqrt(2.0) : 1.0);
                const int nid = (r + dr) * cols + c + dc;
                if (nd < dist[nid]) {
                    dist[nid] = nd;
                    pq.emplace(nd, nid);
                }
            }
        }
    }
    const double g = dist[static_cast<std::size_t>(gr) * cols + gc];
    if (std::isinf(g)) return std::nullopt;
    return g;
}

}  // namespace oracle
