#include "bimef/illumination.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <string>

namespace bimef {

void SolverConfig::validate() const {
    if (!(lambda >= 0.0) || !std::isfinite(lambda)) throw ArgumentError("lambda must be >= 0");
    if (!(epsilon > 0.0) || !std::isfinite(epsilon)) throw ArgumentError("epsilon must be > 0");
    if (window < 1 || window % 2 == 0) throw ArgumentError("window must be odd and >= 1");
    if (!(pcg_tol > 0.0)) throw ArgumentError("pcg_tol must be > 0");
    if (pcg_max_iter < 1) throw ArgumentError("pcg_max_iter must be >= 1");
}

SparseSystem::SparseSystem(int width, int height, std::vector<double> east,
                           std::vector<double> south, std::vector<double> rhs)
    : width_(width), height_(height), east_(std::move(east)), south_(std::move(south)),
      rhs_(std::move(rhs)) {
    const auto n = static_cast<std::size_t>(width) * height;
    if (width < 1 || height < 1 || east_.size() != n || south_.size() != n || rhs_.size() != n) {
        throw ArgumentError("sparse system arrays do not match the grid");
    }
    diag_.assign(n, 1.0);
    for (int r = 0; r < height; ++r) {
        for (int c = 0; c < width; ++c) {
            const auto i = static_cast<std::size_t>(r) * width + c;
            if (c + 1 < width) {
                diag_[i] += east_[i];
                diag_[i + 1] += east_[i];
            } else {
                east_[i] = 0.0;
            }
            if (r + 1 < height) {
                diag_[i] += south_[i];
                diag_[i + width] += south_[i];
            } else {
                south_[i] = 0.0;
            }
        }
    }
}

void SparseSystem::multiply(std::span<const double> x, std::span<double> y) const {
    const auto n = dimension();
    const auto w = static_cast<std::size_t>(width_);
    for (std::size_t i = 0; i < n; ++i) {
        double acc = diag_[i] * x[i];
        if (east_[i] != 0.0) acc -= east_[i] * x[i + 1];
        if (i >= 1) acc -= east_[i - 1] * x[i - 1];
        if (i + w < n) acc -= south_[i] * x[i + w];
        if (i >= w) acc -= south_[i - w] * x[i - w];
        y[i] = acc;
    }
}

double SparseSystem::coefficient(std::size_t row, std::size_t col) const {
    const auto w = static_cast<std::size_t>(width_);
    if (row == col) return diag_[row];
    const auto lo = std::min(row, col);
    const auto hi = std::max(row, col);
    if (hi == lo + 1) return -east_[lo];
    if (hi == lo + w) return -south_[lo];
    return 0.0;
}

std::vector<double> SparseSystem::to_dense() const {
    const auto n = dimension();
    std::vector<double> dense(n * n, 0.0);
    for (std::size_t r = 0; r < n; ++r) {
        for (std::size_t c = 0; c < n; ++c) dense[r * n + c] = coefficient(r, c);
    }
    return dense;
}

double SparseSystem::energy(std::span<const double> t) const {
    const auto n = dimension();
    const auto w = static_cast<std::size_t>(width_);
    double e = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
        const double d = t[i] - rhs_[i];
        e += d * d;
        if (east_[i] != 0.0) {
            const double g = t[i + 1] - t[i];
            e += east_[i] * g * g;
        }
        if (south_[i] != 0.0) {
            const double g = t[i + w] - t[i];
            e += south_[i] * g * g;
        }
    }
    return e;
}

ScalarMap gradient(const ScalarMap& map, Direction direction) {
    ScalarMap out(map.width(), map.height());
    const int W = map.width();
    const int H = map.height();
    for (int r = 0; r < H; ++r) {
        for (int c = 0; c < W; ++c) {
            if (direction == Direction::horizontal) {
                out.at(r, c) = c + 1 < W ? map.at(r, c + 1) - map.at(r, c) : 0.0;
            } else {
                out.at(r, c) = r + 1 < H ? map.at(r + 1, c) - map.at(r, c) : 0.0;
            }
        }
    }
    return out;
}

std::pair<ScalarMap, ScalarMap> texture_weights(const ScalarMap& L, const SolverConfig& cfg) {
    cfg.validate();
    const int W = L.width();
    const int H = L.height();
    const int half = cfg.window / 2;
    const auto gh = gradient(L, Direction::horizontal);
    const auto gv = gradient(L, Direction::vertical);

    ScalarMap Mh(W, H);
    ScalarMap Mv(W, H);
    for (int r = 0; r < H; ++r) {
        for (int c = 0; c < W; ++c) {
            double sh = 0.0;
            double sv = 0.0;
            for (int k = -half; k <= half; ++k) {
                if (c + k >= 0 && c + k < W) sh += gh.at(r, c + k);
                if (r + k >= 0 && r + k < H) sv += gv.at(r + k, c);
            }
            Mh.at(r, c) = 1.0 / (std::abs(sh) + cfg.epsilon);
            Mv.at(r, c) = 1.0 / (std::abs(sv) + cfg.epsilon);
        }
    }
    return {std::move(Mh), std::move(Mv)};
}

SparseSystem assemble_system(const ScalarMap& L, const ScalarMap& M_h, const ScalarMap& M_v,
                             const SolverConfig& cfg) {
    cfg.validate();
    if (!L.same_shape(M_h) || !L.same_shape(M_v)) {
        throw ArgumentError("assemble_system: weight maps do not match the lightness map");
    }
    const auto gh = gradient(L, Direction::horizontal);
    const auto gv = gradient(L, Direction::vertical);
    const auto n = L.pixel_count();
    std::vector<double> east(n);
    std::vector<double> south(n);
    auto mh = M_h.values();
    auto mv = M_v.values();
    auto dh = gh.values();
    auto dv = gv.values();
    for (std::size_t i = 0; i < n; ++i) {
        east[i] = cfg.lambda * mh[i] / (std::abs(dh[i]) + cfg.epsilon);
        south[i] = cfg.lambda * mv[i] / (std::abs(dv[i]) + cfg.epsilon);
    }
    auto rhs = L.values();
    return SparseSystem(L.width(), L.height(), std::move(east), std::move(south),
                        std::vector<double>(rhs.begin(), rhs.end()));
}

namespace {

double dot(std::span<const double> a, std::span<const double> b) {
    return std::transform_reduce(a.begin(), a.end(), b.begin(), 0.0);
}

class JacobiPreconditioner {
public:
    explicit JacobiPreconditioner(const SparseSystem& A) : inv_(A.dimension()) {
        auto d = A.diagonal();
        for (std::size_t i = 0; i < inv_.size(); ++i) inv_[i] = 1.0 / d[i];
    }

    void apply(std::span<const double> r, std::span<double> z) const {
        for (std::size_t i = 0; i < inv_.size(); ++i) z[i] = inv_[i] * r[i];
    }

private:
    std::vector<double> inv_;
};

// Zero-fill incomplete factorization A ~ (D + L) D^-1 (D + L^T) on the
// five-point pattern, L being the strictly lower part of A. With `modified`
// the dropped fill is lumped onto the diagonal so that row sums of A are
// reproduced exactly (MIC(0)); constants, the near-null space of the
// Laplacian part, are then preconditioned exactly.
class IncompleteFactorization {
public:
    IncompleteFactorization(const SparseSystem& A, bool modified)
        : width_(static_cast<std::size_t>(A.width())), pivot_(A.dimension()),
          east_(A.east().begin(), A.east().end()), south_(A.south().begin(), A.south().end()) {
        auto d = A.diagonal();
        const double lump = modified ? 1.0 : 0.0;
        for (std::size_t i = 0; i < pivot_.size(); ++i) {
            double p = d[i];
            if (i >= 1) {
                const double e = east_[i - 1];
                p -= e * (e + lump * south_[i - 1]) / pivot_[i - 1];
            }
            if (i >= width_) {
                const double s = south_[i - width_];
                p -= s * (s + lump * east_[i - width_]) / pivot_[i - width_];
            }
            pivot_[i] = p;
        }
    }

    void apply(std::span<const double> r, std::span<double> z) const {
        const auto n = pivot_.size();
        // Off-diagonal entries of A are -east and -south.
        for (std::size_t i = 0; i < n; ++i) {
            double v = r[i];
            if (i >= 1) v += east_[i - 1] * z[i - 1];
            if (i >= width_) v += south_[i - width_] * z[i - width_];
            z[i] = v / pivot_[i];
        }
        for (std::size_t i = n; i-- > 0;) {
            double v = 0.0;
            if (i + 1 < n) v += east_[i] * z[i + 1];
            if (i + width_ < n) v += south_[i] * z[i + width_];
            z[i] += v / pivot_[i];
        }
    }

private:
    std::size_t width_;
    std::vector<double> pivot_;
    std::vector<double> east_;
    std::vector<double> south_;
};

template <class Precond>
std::vector<double> pcg(const SparseSystem& A, const Precond& M, const SolverConfig& cfg,
                        SolveReport* report) {
    const auto n = A.dimension();
    auto b = A.rhs();
    const double bnorm = std::sqrt(dot(b, b));
    std::vector<double> x(b.begin(), b.end());
    if (bnorm == 0.0) {
        if (report) *report = {};
        return x;
    }

    std::vector<double> r(n), z(n), p(n), q(n);
    A.multiply(x, q);
    for (std::size_t i = 0; i < n; ++i) r[i] = b[i] - q[i];
    double rnorm = std::sqrt(dot(r, r));
    int it = 0;
    if (rnorm / bnorm > cfg.pcg_tol) {
        M.apply(r, z);
        p = z;
        double rz = dot(r, z);
        while (it < cfg.pcg_max_iter) {
            ++it;
            A.multiply(p, q);
            const double alpha = rz / dot(p, q);
            for (std::size_t i = 0; i < n; ++i) {
                x[i] += alpha * p[i];
                r[i] -= alpha * q[i];
            }
            rnorm = std::sqrt(dot(r, r));
            if (rnorm / bnorm <= cfg.pcg_tol) break;
            M.apply(r, z);
            const double rz_next = dot(r, z);
            const double beta = rz_next / rz;
            rz = rz_next;
            for (std::size_t i = 0; i < n; ++i) p[i] = z[i] + beta * p[i];
        }
    }

    // Recurrence residuals drift; report the true one.
    A.multiply(x, q);
    for (std::size_t i = 0; i < n; ++i) r[i] = b[i] - q[i];
    const double achieved = std::sqrt(dot(r, r)) / bnorm;
    if (report) *report = {it, achieved};
    if (rnorm / bnorm > cfg.pcg_tol) {
        throw SolverError("PCG did not converge in " + std::to_string(it) +
                              " iterations (relative residual " + std::to_string(achieved) + ")",
                          achieved, it);
    }
    return x;
}

}  // namespace

std::vector<double> solve_raw(const SparseSystem& system, const SolverConfig& cfg,
                              SolveReport* report) {
    cfg.validate();
    if (cfg.preconditioner == Preconditioner::jacobi) {
        return pcg(system, JacobiPreconditioner(system), cfg, report);
    }
    const bool modified = cfg.preconditioner == Preconditioner::modified_incomplete_cholesky;
    return pcg(system, IncompleteFactorization(system, modified), cfg, report);
}

ScalarMap solve(const SparseSystem& system, const SolverConfig& cfg, SolveReport* report) {
    auto t = solve_raw(system, cfg, report);
    for (double& v : t) v = std::clamp(v, cfg.epsilon, 1.0);
    return ScalarMap(system.width(), system.height(), std::move(t));
}

ScalarMap estimate_illumination(const Image& img, const SolverConfig& cfg,
                                SolveReport* report) {
    const auto L = lightness(img);
    const auto [Mh, Mv] = texture_weights(L, cfg);
    return solve(assemble_system(L, Mh, Mv, cfg), cfg, report);
}

}  // namespace bimef
