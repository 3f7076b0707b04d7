#include "bimef/exposure_sampler.hpp"

#include <algorithm>
#include <cmath>
#include <cstdint>

namespace bimef {

void KSearchConfig::validate() const {
    if (!(k_min > 0.0) || !(k_max > k_min) || !std::isfinite(k_max)) {
        throw ArgumentError("k-search bounds must satisfy 0 < k_min < k_max");
    }
    if (coarse_steps < 3) throw ArgumentError("coarse_steps must be >= 3");
    if (thumb_size < 1) throw ArgumentError("thumb_size must be >= 1");
    if (!(refine_tol > 0.0)) throw ArgumentError("refine_tol must be > 0");
    if (n_bins < 2) throw ArgumentError("n_bins must be >= 2");
}

UnderExposedSet extract_under_exposed(const Image& img, const ScalarMap& T,
                                      const KSearchConfig& cfg) {
    cfg.validate();
    if (!img.same_shape(T)) {
        throw ArgumentError("extract_under_exposed: image and illumination differ in size");
    }
    const auto thumb = resize_nearest(img, cfg.thumb_size, cfg.thumb_size);
    const auto thumb_T = resize_nearest(T, cfg.thumb_size, cfg.thumb_size);
    const auto B = geometric_brightness(thumb);

    UnderExposedSet q;
    auto t = thumb_T.values();
    auto b = B.values();
    for (std::size_t i = 0; i < t.size(); ++i) {
        if (t[i] < cfg.under_exposed_threshold) q.values.push_back(b[i]);
    }
    return q;
}

double entropy_of_enhanced(const UnderExposedSet& q, const CameraModel& model, double k,
                           int n_bins) {
    if (q.empty()) throw ArgumentError("entropy_of_enhanced: empty under-exposed set");
    const auto p = btf_params(model, k);
    Histogram h(n_bins);
    for (double v : q.values) h.add(std::clamp(apply_btf(v, p), 0.0, 1.0));
    return entropy(h);
}

std::vector<double> coarse_grid(const KSearchConfig& cfg) {
    cfg.validate();
    const double lo = std::log(cfg.k_min);
    const double hi = std::log(cfg.k_max);
    std::vector<double> ks(static_cast<std::size_t>(cfg.coarse_steps));
    for (int i = 0; i < cfg.coarse_steps; ++i) {
        ks[static_cast<std::size_t>(i)] = std::exp(lo + (hi - lo) * i / (cfg.coarse_steps - 1));
    }
    ks.front() = cfg.k_min;
    ks.back() = cfg.k_max;
    return ks;
}

namespace {

// One value moving between adjacent bins as k grows past `k`.
struct Crossing {
    double k;
    std::uint32_t from;
    std::uint32_t to;
};

// Entropy of a histogram over `n` samples, maintained incrementally through
// S = sum c log2 c so that H = log2 n - S / n.
class RunningEntropy {
public:
    RunningEntropy(std::vector<std::size_t> counts, std::size_t n)
        : counts_(std::move(counts)), n_(static_cast<double>(n)) {
        for (auto c : counts_) s_ += term(c);
    }

    void move(std::uint32_t from, std::uint32_t to) {
        s_ -= term(counts_[from]) + term(counts_[to]);
        --counts_[from];
        ++counts_[to];
        s_ += term(counts_[from]) + term(counts_[to]);
    }

    double value() const { return std::log2(n_) - s_ / n_; }

private:
    static double term(std::size_t c) {
        return c > 1 ? static_cast<double>(c) * std::log2(static_cast<double>(c)) : 0.0;
    }

    std::vector<std::size_t> counts_;
    double n_;
    double s_ = 0.0;
};

struct Piece {
    double k_lo;
    double k_hi;
    double entropy;
};

// Exposure ratio at which beta(k) v^gamma(k) equals c:
// b (1 - k^a) + k^a ln v = ln c  =>  k^a = (ln c - b) / (ln v - b).
double crossing_ratio(const CameraModel& m, double v, double c) {
    const double ratio = (std::log(c) - m.b) / (std::log(v) - m.b);
    return std::exp(std::log(ratio) / m.a);
}

KSearchResult sweep(const UnderExposedSet& q, const CameraModel& model, const KSearchConfig& cfg) {
    const auto lo = btf_params(model, cfg.k_min);
    const auto hi = btf_params(model, cfg.k_max);
    const Histogram binner(cfg.n_bins);
    const auto bin = [&](double v, const BtfParams& p) {
        return static_cast<std::uint32_t>(binner.bin_of(std::clamp(apply_btf(v, p), 0.0, 1.0)));
    };

    std::vector<std::size_t> counts(static_cast<std::size_t>(cfg.n_bins), 0);
    std::vector<Crossing> events;
    for (double v : q.values) {
        const auto b0 = bin(v, lo);
        const auto b1 = bin(v, hi);
        ++counts[b0];
        // g(v, k) is monotone in k, so the bin walks one step per boundary.
        for (auto b = b0; b != b1;) {
            const auto next = b1 > b0 ? b + 1 : b - 1;
            const double edge = static_cast<double>(std::max(b, next)) / cfg.n_bins;
            double k = crossing_ratio(model, v, edge);
            if (!std::isfinite(k)) k = cfg.k_min;
            events.push_back({std::clamp(k, cfg.k_min, cfg.k_max), b, next});
            b = next;
        }
    }
    std::stable_sort(events.begin(), events.end(),
                     [](const Crossing& x, const Crossing& y) { return x.k < y.k; });

    RunningEntropy H(std::move(counts), q.size());
    std::vector<Piece> pieces;
    double k_lo = cfg.k_min;
    for (std::size_t i = 0; i < events.size();) {
        const double k = events[i].k;
        if (k > k_lo) pieces.push_back({k_lo, k, H.value()});
        for (; i < events.size() && events[i].k == k; ++i) H.move(events[i].from, events[i].to);
        k_lo = std::max(k_lo, k);
    }
    if (cfg.k_max > k_lo || pieces.empty()) pieces.push_back({k_lo, cfg.k_max, H.value()});

    // Highest entropy first, smaller ratio first among equals.
    std::stable_sort(pieces.begin(), pieces.end(),
                     [](const Piece& x, const Piece& y) { return x.entropy > y.entropy; });

    // Confirm on the direct evaluation path; a sliver narrower than rounding
    // can bin differently there, in which case the next piece is tried.
    KSearchResult best{cfg.k_min, -1.0, q.size()};
    for (const auto& piece : pieces) {
        if (piece.entropy <= best.entropy + 1e-12) break;
        const double k = std::sqrt(piece.k_lo * piece.k_hi);
        const double e = entropy_of_enhanced(q, model, k, cfg.n_bins);
        if (e > best.entropy + 1e-12) best = {k, e, q.size()};
        if (std::abs(e - piece.entropy) <= 1e-9) break;
    }
    return best;
}

KSearchResult golden(const UnderExposedSet& q, const CameraModel& model, const KSearchConfig& cfg,
                     const std::vector<double>& grid, std::size_t arg) {
    KSearchResult best{cfg.k_min, -1.0, q.size()};
    auto consider = [&](double k) {
        const double H = entropy_of_enhanced(q, model, k, cfg.n_bins);
        if (H > best.entropy) best = {k, H, q.size()};
        return H;
    };
    double lo = std::log(grid[arg == 0 ? 0 : arg - 1]);
    double hi = std::log(grid[std::min(arg + 1, grid.size() - 1)]);
    constexpr double invphi = 0.6180339887498949;
    double x1 = hi - invphi * (hi - lo);
    double x2 = lo + invphi * (hi - lo);
    double f1 = consider(std::exp(x1));
    double f2 = consider(std::exp(x2));
    while (hi - lo > cfg.refine_tol) {
        if (f1 >= f2) {
            hi = x2;
            x2 = x1;
            f2 = f1;
            x1 = hi - invphi * (hi - lo);
            f1 = consider(std::exp(x1));
        } else {
            lo = x1;
            x1 = x2;
            f1 = f2;
            x2 = lo + invphi * (hi - lo);
            f2 = consider(std::exp(x2));
        }
    }
    return best;
}

}  // namespace

KSearchResult search_k(const UnderExposedSet& q, const CameraModel& model,
                       const KSearchConfig& cfg) {
    cfg.validate();
    model.validate();
    if (q.empty()) return {1.0, 0.0, 0};

    const auto grid = coarse_grid(cfg);
    KSearchResult coarse{cfg.k_min, -1.0, q.size()};
    std::size_t arg = 0;
    for (std::size_t i = 0; i < grid.size(); ++i) {
        const double H = entropy_of_enhanced(q, model, grid[i], cfg.n_bins);
        if (H > coarse.entropy) {
            coarse = {grid[i], H, q.size()};
            arg = i;
        }
    }

    const auto refined = cfg.method == KSearchMethod::exact_sweep
                             ? sweep(q, model, cfg)
                             : golden(q, model, cfg, grid, arg);
    if (refined.entropy > coarse.entropy) return refined;
    if (refined.entropy == coarse.entropy && refined.k < coarse.k) return refined;
    return coarse;
}

double optimal_k(const Image& img, const ScalarMap& T, const CameraModel& model,
                 const KSearchConfig& cfg) {
    return search_k(extract_under_exposed(img, T, cfg), model, cfg).k;
}

}  // namespace bimef
