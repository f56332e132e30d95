#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <functional>
#include <limits>
#include <span>
#include <string>
#include <variant>
#include <vector>

#include "centerdepth/errors.hpp"
#include "centerdepth/heatmap.hpp"
#include "centerdepth/raster.hpp"

namespace centerdepth::crf {

enum class Solver { ClosedForm, CoordinateDescent };

struct CrfConfig {
    double sigma_f{0.1};   ///< feature-similarity bandwidth, feature units
    double lambda_u{1.0};  ///< unary weight
    Solver solver{Solver::ClosedForm};
    int max_iters{1000};
    /// Coordinate descent stops once a sweep lowers the energy by less than tol.
    double tol{1e-18};
    /// Multiplies each weight by a spatial Gaussian on pixel distance to the center.
    bool spatial_term{false};
    double sigma_s{16.0};  ///< pixels; used only with spatial_term

    void validate() const {
        auto fail = [](const char* what) { throw Error(Errc::ValidationFailure, what); };
        if (!(sigma_f > 0)) fail("sigma_f > 0");
        if (!(lambda_u > 0)) fail("lambda_u > 0");
        if (!(tol > 0)) fail("tol > 0");
        if (max_iters < 1) fail("max_iters >= 1");
        if (spatial_term && !(sigma_s > 0)) fail("sigma_s > 0");
    }
};

/// Star-graph depth field over one region. Index `center_index` is the anchor;
/// `weights[center_index]` is ignored.
struct RegionDepthField {
    std::vector<double> unary;    ///< initial per-pixel estimates d̂
    std::vector<double> weights;  ///< ω to the center, in (0, 1]
    std::vector<double> depths;   ///< solution D
    std::size_t center_index{0};

    static RegionDepthField make(std::vector<double> unary, std::vector<double> weights,
                                 std::size_t center_index) {
        if (unary.size() != weights.size())
            throw Error(Errc::LengthMismatch, "unary and weight vectors differ in length");
        if (unary.empty()) throw Error(Errc::EmptyRegion, "field has no pixels");
        if (center_index >= unary.size())
            throw Error(Errc::InvalidArgument, "center index out of range");
        RegionDepthField f{std::move(unary), std::move(weights), {}, center_index};
        f.depths = f.unary;
        return f;
    }

    std::size_t size() const noexcept { return unary.size(); }
    double center_depth() const noexcept { return depths[center_index]; }
};

namespace detail {
template <typename T>
double feature_weight_impl(std::span<const T> fi, std::span<const T> fc, double sigma_f) {
    if (fi.size() != fc.size())
        throw Error(Errc::LengthMismatch, "feature vectors of length " +
                                              std::to_string(fi.size()) + " and " +
                                              std::to_string(fc.size()));
    double sq = 0.0;
    for (std::size_t k = 0; k < fi.size(); ++k) {
        const double d = static_cast<double>(fi[k]) - static_cast<double>(fc[k]);
        sq += d * d;
    }
    // Clamped so that distant features keep a tiny positive weight instead of
    // underflowing to zero.
    return std::max(std::exp(-sq / (2.0 * sigma_f * sigma_f)),
                    std::numeric_limits<double>::min());
}
}  // namespace detail

/// exp(-|f_i - f_c|^2 / (2 sigma_f^2)).
inline double feature_weight(std::span<const double> fi, std::span<const double> fc,
                             double sigma_f) {
    return detail::feature_weight_impl(fi, fc, sigma_f);
}
inline double feature_weight(std::span<const float> fi, std::span<const float> fc,
                             double sigma_f) {
    return detail::feature_weight_impl(fi, fc, sigma_f);
}

inline double pairwise_energy(double d_i, double d_c, double omega) {
    const double diff = d_i - d_c;
    return omega * diff * diff;
}

/// E(D) = λ Σ_j (D_j - d̂_j)^2 + Σ_{i≠c} ω_i (D_i - D_c)^2, summed with Neumaier
/// compensation so that successive solver iterates compare reliably.
inline double total_energy(const RegionDepthField& f, const CrfConfig& cfg) {
    const double dc = f.center_depth();
    double sum = 0.0;
    double comp = 0.0;
    auto add = [&](double x) {
        const double t = sum + x;
        comp += std::abs(sum) >= std::abs(x) ? (sum - t) + x : (x - t) + sum;
        sum = t;
    };
    for (std::size_t j = 0; j < f.size(); ++j) {
        const double r = f.depths[j] - f.unary[j];
        add(cfg.lambda_u * r * r);
        if (j != f.center_index) add(pairwise_energy(f.depths[j], dc, f.weights[j]));
    }
    return sum + comp;
}

/// ∂E/∂D_j at the field's current depths.
inline std::vector<double> energy_gradient(const RegionDepthField& f, const CrfConfig& cfg) {
    const std::size_t c = f.center_index;
    const double dc = f.depths[c];
    std::vector<double> g(f.size());
    double gc = 2.0 * cfg.lambda_u * (dc - f.unary[c]);
    for (std::size_t i = 0; i < f.size(); ++i) {
        if (i == c) continue;
        const double coupling = 2.0 * f.weights[i] * (f.depths[i] - dc);
        g[i] = 2.0 * cfg.lambda_u * (f.depths[i] - f.unary[i]) + coupling;
        gc -= coupling;
    }
    g[c] = gc;
    return g;
}

/// Exact minimizer by eliminating the leaves of the star:
///   α_i = ω_i / (λ + ω_i)
///   D_c = (d̂_c + Σ α_i d̂_i) / (1 + Σ α_i)
///   D_i = (λ d̂_i + ω_i D_c) / (λ + ω_i)
inline RegionDepthField solve_closed_form(RegionDepthField f, const CrfConfig& cfg) {
    const double lambda = cfg.lambda_u;
    const std::size_t c = f.center_index;
    double num = f.unary[c];
    double den = 1.0;
    for (std::size_t i = 0; i < f.size(); ++i) {
        if (i == c) continue;
        const double alpha = f.weights[i] / (lambda + f.weights[i]);
        num += alpha * f.unary[i];
        den += alpha;
    }
    const double dc = num / den;
    for (std::size_t i = 0; i < f.size(); ++i) {
        if (i == c) continue;
        f.depths[i] = (lambda * f.unary[i] + f.weights[i] * dc) / (lambda + f.weights[i]);
    }
    f.depths[c] = dc;
    return f;
}

struct DescentResult {
    RegionDepthField field;
    int sweeps{0};
    bool converged{false};
    double final_delta{0.0};           ///< |ΔE| of the last sweep
    std::vector<double> energy_trace;  ///< E before the first sweep, then after each
};

/// Exact per-variable minimization, leaves first and the center last in each
/// sweep, starting from D = d̂. A non-converged result is still returned with
/// `converged == false`.
///
/// The per-sweep decrease is accumulated from the coordinate steps, a_j (old - new)^2
/// with a_j the curvature along D_j, rather than as a difference of two large
/// energies, so tol can sit far below the rounding level of E itself.
inline DescentResult solve_coordinate_descent(RegionDepthField f, const CrfConfig& cfg) {
    if (cfg.max_iters < 1) throw Error(Errc::InvalidArgument, "max_iters must be >= 1");
    const double lambda = cfg.lambda_u;
    const std::size_t c = f.center_index;
    f.depths = f.unary;

    DescentResult res;
    double energy = total_energy(f, cfg);
    res.energy_trace.push_back(energy);
    for (int it = 0; it < cfg.max_iters; ++it) {
        const double dc = f.depths[c];
        double wsum = 0.0;
        double wdsum = 0.0;
        double decrease = 0.0;
        for (std::size_t i = 0; i < f.size(); ++i) {
            if (i == c) continue;
            const double w = f.weights[i];
            const double next = (lambda * f.unary[i] + w * dc) / (lambda + w);
            decrease += (lambda + w) * (f.depths[i] - next) * (f.depths[i] - next);
            f.depths[i] = next;
            wsum += w;
            wdsum += w * next;
        }
        const double next_c = (lambda * f.unary[c] + wdsum) / (lambda + wsum);
        decrease += (lambda + wsum) * (dc - next_c) * (dc - next_c);
        f.depths[c] = next_c;

        energy = total_energy(f, cfg);
        res.energy_trace.push_back(energy);
        res.final_delta = decrease;
        res.sweeps = it + 1;
        if (decrease < cfg.tol) {
            res.converged = true;
            break;
        }
    }
    res.field = std::move(f);
    return res;
}

inline RegionDepthField solve(RegionDepthField f, const CrfConfig& cfg) {
    if (cfg.solver == Solver::ClosedForm) return solve_closed_form(std::move(f), cfg);
    return solve_coordinate_descent(std::move(f), cfg).field;
}

/// Where initial per-pixel depth estimates come from: a raster at image
/// resolution (ground truth, or a third-party prediction) or one constant.
/// This is where a learned depth head would plug in.
class UnarySource {
public:
    UnarySource() = default;
    static UnarySource from_raster(const DepthRaster& r) {
        UnarySource s;
        s.src_ = std::cref(r);
        return s;
    }
    static UnarySource constant(double depth) {
        UnarySource s;
        s.src_ = depth;
        return s;
    }

    bool has_value() const noexcept { return !std::holds_alternative<std::monostate>(src_); }

    double at(Pixel p) const {
        if (const auto* r = std::get_if<std::reference_wrapper<const DepthRaster>>(&src_)) {
            const DepthRaster& raster = r->get();
            if (!raster.contains(p.x, p.y))
                throw Error(Errc::OutOfBounds, "unary raster does not cover pixel (" +
                                                   std::to_string(p.x) + "," +
                                                   std::to_string(p.y) + ")");
            return raster.at(p.x, p.y);
        }
        if (const auto* d = std::get_if<double>(&src_)) return *d;
        throw Error(Errc::UnarySourceMissing, "no unary depth source configured");
    }

private:
    std::variant<std::monostate, std::reference_wrapper<const DepthRaster>, double> src_;
};

/// Feature map sampled at nearest cell; strides are image pixels per cell.
struct FeatureView {
    const FeatureMap& map;
    double stride_x;
    double stride_y;

    std::span<const float> at_pixel(Pixel p) const {
        const int c = std::clamp(static_cast<int>(std::floor(p.x / stride_x)), 0, map.width() - 1);
        const int r = std::clamp(static_cast<int>(std::floor(p.y / stride_y)), 0, map.height() - 1);
        return map.pixel(c, r);
    }
};

struct Refinement {
    double center_depth{0.0};
    double unary_center{0.0};
    RegionDepthField field;
    std::vector<Pixel> pixels;  ///< region pixel order used by `field`
};

/// Builds the star field over `region` (weights from feature similarity to the
/// center pixel), minimizes the energy and returns the refined center depth.
inline Refinement refine_center_depth(const FeatureView& features, const Region& region,
                                      const UnarySource& unary, const CrfConfig& cfg) {
    if (region.size() == 0) throw Error(Errc::EmptyRegion, "region has no pixels");
    if (!unary.has_value()) throw Error(Errc::UnarySourceMissing, "no unary depth source");
    const auto& pixels = region.pixels();
    const Pixel center = region.center();
    const auto fc = features.at_pixel(center);

    std::vector<double> d_hat(pixels.size());
    std::vector<double> omega(pixels.size(), 1.0);
    const double inv_s = cfg.spatial_term ? 1.0 / (2.0 * cfg.sigma_s * cfg.sigma_s) : 0.0;
    for (std::size_t i = 0; i < pixels.size(); ++i) {
        d_hat[i] = unary.at(pixels[i]);
        if (i == region.center_index()) continue;
        double w = feature_weight(features.at_pixel(pixels[i]), fc, cfg.sigma_f);
        if (cfg.spatial_term) {
            const double dx = pixels[i].x - center.x;
            const double dy = pixels[i].y - center.y;
            w *= std::exp(-(dx * dx + dy * dy) * inv_s);
        }
        omega[i] = w;
    }
    Refinement out;
    out.field = solve(RegionDepthField::make(std::move(d_hat), std::move(omega),
                                             region.center_index()),
                      cfg);
    out.center_depth = out.field.center_depth();
    out.unary_center = out.field.unary[out.field.center_index];
    out.pixels = pixels;
    return out;
}

}  // namespace centerdepth::crf
