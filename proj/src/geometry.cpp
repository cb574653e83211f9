#include "hslab/geometry.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <stdexcept>

namespace hslab {

namespace {

struct CellIndex {
    long i;
    long j;
};

std::vector<CellIndex> member_indices(const RegionMask& A) {
    std::vector<CellIndex> out;
    const Grid& g = A.grid();
    for (std::size_t k = 0; k < A.size(); ++k) {
        if (A[k]) out.push_back({static_cast<long>(g.ix(k)), static_cast<long>(g.iy(k))});
    }
    return out;
}

long dist2(const CellIndex& a, const CellIndex& b) {
    const long di = a.i - b.i, dj = a.j - b.j;
    return di * di + dj * dj;
}

// Directed distance in squared cell units, exact in integers.
long directed_dist2(const std::vector<CellIndex>& a, const std::vector<CellIndex>& b) {
    long worst = 0;
    for (const auto& x : a) {
        long best = std::numeric_limits<long>::max();
        for (const auto& y : b) {
            best = std::min(best, dist2(x, y));
            // x cannot raise the running maximum any more.
            if (best <= worst) break;
        }
        worst = std::max(worst, best);
    }
    return worst;
}

} // namespace

RegionMask positivity_set(const ScalarField& f, double threshold) {
    if (!(threshold >= 0.0)) throw std::invalid_argument("threshold must be nonnegative");
    RegionMask m(f.grid());
    for (std::size_t k = 0; k < f.size(); ++k) m.set(k, f[k] > threshold);
    return m;
}

double directed_distance(const RegionMask& A, const RegionMask& B) {
    require_same_grid(A.grid(), B.grid(), "directed_distance");
    const auto a = member_indices(A), b = member_indices(B);
    if (a.empty()) return 0.0;
    if (b.empty()) return std::numeric_limits<double>::infinity();
    return std::sqrt(static_cast<double>(directed_dist2(a, b))) * A.grid().spacing();
}

double hausdorff_distance(const RegionMask& A, const RegionMask& B) {
    require_same_grid(A.grid(), B.grid(), "hausdorff_distance");
    const auto a = member_indices(A), b = member_indices(B);
    if (a.empty() && b.empty()) return 0.0;
    if (a.empty() || b.empty()) return std::numeric_limits<double>::infinity();
    const long d2 = std::max(directed_dist2(a, b), directed_dist2(b, a));
    return std::sqrt(static_cast<double>(d2)) * A.grid().spacing();
}

RegionMask neighborhood(const RegionMask& A, double delta) {
    if (!(delta >= 0.0)) throw std::invalid_argument("neighborhood radius must be nonnegative");
    const Grid& g = A.grid();
    const double h = g.spacing();
    const long reach = static_cast<long>(std::floor(delta / h));
    const double limit = delta / h;
    const long n = static_cast<long>(g.cells_per_axis());
    const long jreach = g.dim() == 2 ? reach : 0;
    RegionMask out(g);
    for (const auto& c : member_indices(A)) {
        for (long dj = -jreach; dj <= jreach; ++dj) {
            for (long di = -reach; di <= reach; ++di) {
                const long i = c.i + di, j = c.j + dj;
                if (i < 0 || j < 0 || i >= n || (g.dim() == 2 && j >= n)) continue;
                if (std::sqrt(static_cast<double>(di * di + dj * dj)) <= limit) {
                    out.set(g.index(static_cast<std::size_t>(i), static_cast<std::size_t>(j)), true);
                }
            }
        }
    }
    return out;
}

double minimal_diameter(const RegionMask& A, std::size_t angles) {
    const Grid& g = A.grid();
    const auto cells = member_indices(A);
    if (cells.empty()) return 0.0;
    const double h = g.spacing();
    if (g.dim() == 1) {
        long lo = cells.front().i, hi = cells.front().i;
        for (const auto& c : cells) {
            lo = std::min(lo, c.i);
            hi = std::max(hi, c.i);
        }
        return static_cast<double>(hi - lo) * h + h;
    }
    if (angles == 0) throw std::invalid_argument("need at least one direction");
    double best = std::numeric_limits<double>::infinity();
    for (std::size_t a = 0; a < angles; ++a) {
        const double th = std::numbers::pi * static_cast<double>(a) / static_cast<double>(angles);
        const double cx = std::cos(th), cy = std::sin(th);
        double lo = std::numeric_limits<double>::infinity(), hi = -lo;
        for (const auto& c : cells) {
            const double v = cx * static_cast<double>(c.i) + cy * static_cast<double>(c.j);
            lo = std::min(lo, v);
            hi = std::max(hi, v);
        }
        best = std::min(best, hi - lo);
    }
    return best * h + h;
}

double diameter(const RegionMask& A) {
    const auto cells = member_indices(A);
    if (cells.empty()) return 0.0;
    long d2 = 0;
    for (std::size_t a = 0; a < cells.size(); ++a) {
        for (std::size_t b = a + 1; b < cells.size(); ++b) d2 = std::max(d2, dist2(cells[a], cells[b]));
    }
    return std::sqrt(static_cast<double>(d2)) * A.grid().spacing() + A.grid().spacing();
}

RegionMask ball_mask(const Grid& g, std::size_t cell, double r) {
    const double h = g.spacing();
    if (r < 3.0 * h) throw std::invalid_argument("ball radius must be at least 3h");
    const auto x = g.position(cell);
    const double L = g.half_width();
    for (int axis = 0; axis < g.dim(); ++axis) {
        if (x[axis] - r < -L || x[axis] + r > L) throw std::domain_error("ball exits the grid");
    }
    RegionMask out(g);
    for (std::size_t k = 0; k < g.size(); ++k) {
        const auto y = g.position(k);
        out.set(k, std::hypot(y[0] - x[0], y[1] - x[1]) <= r);
    }
    return out;
}

namespace {

RegionMask zero_set_in_ball(const ScalarField& p, std::size_t cell, double r, double threshold) {
    RegionMask ball = ball_mask(p.grid(), cell, r);
    for (std::size_t k = 0; k < p.size(); ++k) {
        if (ball[k] && p[k] > threshold) ball.set(k, false);
    }
    return ball;
}

} // namespace

double flatness_ratio(const ScalarField& p, std::size_t cell, double r, double threshold) {
    return minimal_diameter(zero_set_in_ball(p, cell, r, threshold)) / r;
}

double lebesgue_density(const ScalarField& p, std::size_t cell, double r, double threshold) {
    const auto ball = ball_mask(p.grid(), cell, r);
    const auto zero = zero_set_in_ball(p, cell, r, threshold);
    return static_cast<double>(zero.count()) / static_cast<double>(ball.count());
}

RadialBounds radial_bounds(const RegionMask& A, const std::array<double, 2>& center) {
    const Grid& g = A.grid();
    if (A.empty()) throw std::invalid_argument("radial bounds of an empty set");
    const double h = g.spacing();
    auto dist = [&](std::size_t k) {
        const auto x = g.position(k);
        return std::hypot(x[0] - center[0], g.dim() == 2 ? x[1] - center[1] : 0.0);
    };
    RadialBounds out;
    double nearest_out = std::numeric_limits<double>::infinity();
    bool center_uncovered = false;
    for (std::size_t k = 0; k < A.size(); ++k) {
        const double d = dist(k);
        if (A[k]) {
            out.R_plus = std::max(out.R_plus, d);
            continue;
        }
        nearest_out = std::min(nearest_out, d);
        const auto x = g.position(k);
        bool touches = std::abs(x[0] - center[0]) <= 0.5 * h;
        if (g.dim() == 2) touches = touches && std::abs(x[1] - center[1]) <= 0.5 * h;
        if (touches) center_uncovered = true;
    }
    out.R_plus += 0.5 * h;
    if (!std::isfinite(nearest_out)) {
        const double L = g.half_width();
        nearest_out = L - std::abs(center[0]);
        if (g.dim() == 2) nearest_out = std::min(nearest_out, L - std::abs(center[1]));
    }
    out.R_minus = center_uncovered ? 0.0 : std::max(0.0, nearest_out - 0.5 * h);
    return out;
}

std::size_t component_count(const RegionMask& A) {
    const Grid& g = A.grid();
    const std::size_t n = g.cells_per_axis();
    std::vector<unsigned char> seen(A.size(), 0);
    std::vector<std::size_t> stack;
    std::size_t components = 0;
    for (std::size_t start = 0; start < A.size(); ++start) {
        if (!A[start] || seen[start]) continue;
        ++components;
        stack.push_back(start);
        seen[start] = 1;
        while (!stack.empty()) {
            const std::size_t k = stack.back();
            stack.pop_back();
            const std::size_t i = g.ix(k), j = g.iy(k);
            auto visit = [&](std::size_t nb) {
                if (A[nb] && !seen[nb]) {
                    seen[nb] = 1;
                    stack.push_back(nb);
                }
            };
            if (i > 0) visit(k - 1);
            if (i + 1 < n) visit(k + 1);
            if (g.dim() == 2) {
                if (j > 0) visit(k - n);
                if (j + 1 < n) visit(k + n);
            }
        }
    }
    return components;
}

RegionMask boundary_cells(const RegionMask& A) {
    const Grid& g = A.grid();
    const std::size_t n = g.cells_per_axis();
    RegionMask out(g);
    for (std::size_t k = 0; k < A.size(); ++k) {
        if (!A[k]) continue;
        const std::size_t i = g.ix(k), j = g.iy(k);
        bool edge = i == 0 || i + 1 == n || !A[k - 1] || !A[k + 1];
        if (g.dim() == 2) edge = edge || j == 0 || j + 1 == n || !A[k - n] || !A[k + n];
        out.set(k, edge);
    }
    return out;
}

} // namespace hslab
