#include "hslab/grid.hpp"

#include <algorithm>
#include <cmath>

namespace hslab {

Grid::Grid(int dim, std::size_t cells_per_axis, double half_width)
    : dim_(dim), n_(cells_per_axis), half_width_(half_width), h_(0.0) {
    if (dim != 1 && dim != 2) {
        throw std::invalid_argument("grid dimension must be 1 or 2");
    }
    if (cells_per_axis < kMinCells) {
        throw std::invalid_argument("grid needs at least 8 cells per axis");
    }
    if (!(half_width > 0.0) || !std::isfinite(half_width)) {
        throw std::invalid_argument("grid half width must be positive and finite");
    }
    h_ = 2.0 * half_width / static_cast<double>(cells_per_axis);
}

std::size_t Grid::edge_distance(std::size_t cell) const {
    const std::size_t i = ix(cell);
    std::size_t d = std::min(i, n_ - 1 - i);
    if (dim_ == 2) {
        const std::size_t j = iy(cell);
        d = std::min({d, j, n_ - 1 - j});
    }
    return d;
}

ScalarField::ScalarField(const Grid& grid, double value) : grid_(grid), values_(grid.size(), value) {}

ScalarField::ScalarField(const Grid& grid, std::vector<double> values) : grid_(grid), values_(std::move(values)) {
    if (values_.size() != grid_.size()) {
        throw GridMismatch("field value count does not match the grid");
    }
}

double ScalarField::max() const { return *std::max_element(values_.begin(), values_.end()); }
double ScalarField::min() const { return *std::min_element(values_.begin(), values_.end()); }

bool ScalarField::all_finite() const {
    return std::all_of(values_.begin(), values_.end(), [](double v) { return std::isfinite(v); });
}

ScalarField& ScalarField::operator+=(const ScalarField& other) {
    require_same_grid(grid_, other.grid_, "field addition");
    for (std::size_t k = 0; k < values_.size(); ++k) values_[k] += other.values_[k];
    return *this;
}

ScalarField& ScalarField::operator-=(const ScalarField& other) {
    require_same_grid(grid_, other.grid_, "field subtraction");
    for (std::size_t k = 0; k < values_.size(); ++k) values_[k] -= other.values_[k];
    return *this;
}

ScalarField& ScalarField::operator*=(double s) {
    for (double& v : values_) v *= s;
    return *this;
}

ScalarField operator+(ScalarField a, const ScalarField& b) { return a += b; }
ScalarField operator-(ScalarField a, const ScalarField& b) { return a -= b; }
ScalarField operator*(double s, ScalarField a) { return a *= s; }

RegionMask::RegionMask(const Grid& grid, bool value) : grid_(grid), member_(grid.size(), value ? 1 : 0) {}

std::size_t RegionMask::count() const {
    return static_cast<std::size_t>(std::count(member_.begin(), member_.end(), static_cast<unsigned char>(1)));
}

std::vector<std::size_t> RegionMask::members() const {
    std::vector<std::size_t> out;
    for (std::size_t k = 0; k < member_.size(); ++k) {
        if (member_[k]) out.push_back(k);
    }
    return out;
}

bool RegionMask::subset_of(const RegionMask& other) const {
    require_same_grid(grid_, other.grid_, "mask inclusion");
    for (std::size_t k = 0; k < member_.size(); ++k) {
        if (member_[k] && !other.member_[k]) return false;
    }
    return true;
}

void require_same_grid(const Grid& a, const Grid& b, const char* what) {
    if (!(a == b)) {
        throw GridMismatch(std::string("grid mismatch in ") + what);
    }
}

double laplacian_at(const ScalarField& f, std::size_t cell) {
    const Grid& g = f.grid();
    const std::size_t n = g.cells_per_axis();
    const double inv_h2 = 1.0 / (g.spacing() * g.spacing());
    const std::size_t i = g.ix(cell);
    const double c = f[cell];
    double acc = 0.0;
    acc += (i > 0 ? f[cell - 1] : 0.0) - c;
    acc += (i + 1 < n ? f[cell + 1] : 0.0) - c;
    if (g.dim() == 2) {
        const std::size_t j = g.iy(cell);
        acc += (j > 0 ? f[cell - n] : 0.0) - c;
        acc += (j + 1 < n ? f[cell + n] : 0.0) - c;
    }
    return acc * inv_h2;
}

ScalarField laplacian(const ScalarField& f) {
    ScalarField out(f.grid());
    for (std::size_t k = 0; k < f.size(); ++k) out[k] = laplacian_at(f, k);
    return out;
}

namespace {

// Difference quotient along one axis with stride `stride` at position `i` of `n`.
double axis_derivative(const ScalarField& f, std::size_t cell, std::size_t i, std::size_t n, std::size_t stride,
                       double h) {
    if (i > 0 && i + 1 < n) return (f[cell + stride] - f[cell - stride]) / (2.0 * h);
    if (i == 0) return (f[cell + stride] - f[cell]) / h;
    return (f[cell] - f[cell - stride]) / h;
}

} // namespace

ScalarField grad_sq(const ScalarField& f) {
    const Grid& g = f.grid();
    const std::size_t n = g.cells_per_axis();
    const double h = g.spacing();
    ScalarField out(g);
    for (std::size_t k = 0; k < f.size(); ++k) {
        const double dx = axis_derivative(f, k, g.ix(k), n, 1, h);
        double s = dx * dx;
        if (g.dim() == 2) {
            const double dy = axis_derivative(f, k, g.iy(k), n, n, h);
            s += dy * dy;
        }
        out[k] = s;
    }
    return out;
}

ScalarField flux_divergence(const ScalarField& n, const ScalarField& p) {
    ScalarField out(n.grid());
    flux_divergence(n, p, out);
    return out;
}

void flux_divergence(const ScalarField& n, const ScalarField& p, ScalarField& out) {
    require_same_grid(n.grid(), p.grid(), "flux_divergence");
    require_same_grid(n.grid(), out.grid(), "flux_divergence output");
    const Grid& g = n.grid();
    const std::size_t m = g.cells_per_axis();
    const double inv_h2 = 1.0 / (g.spacing() * g.spacing());
    std::fill(out.values().begin(), out.values().end(), 0.0);
    const std::size_t rows = g.dim() == 1 ? 1 : m;
    // x faces
    for (std::size_t j = 0; j < rows; ++j) {
        for (std::size_t i = 0; i + 1 < m; ++i) {
            const std::size_t a = g.index(i, j);
            const std::size_t b = a + 1;
            const double flux = 0.5 * (n[a] + n[b]) * (p[b] - p[a]) * inv_h2;
            out[a] += flux;
            out[b] -= flux;
        }
    }
    if (g.dim() == 2) {
        for (std::size_t j = 0; j + 1 < m; ++j) {
            for (std::size_t i = 0; i < m; ++i) {
                const std::size_t a = g.index(i, j);
                const std::size_t b = a + m;
                const double flux = 0.5 * (n[a] + n[b]) * (p[b] - p[a]) * inv_h2;
                out[a] += flux;
                out[b] -= flux;
            }
        }
    }
}

double integrate(const ScalarField& f) {
    double s = 0.0;
    for (double v : f.values()) s += v;
    return s * f.grid().cell_volume();
}

std::size_t support_margin(const ScalarField& f) {
    std::size_t margin = f.grid().cells_per_axis();
    for (std::size_t k = 0; k < f.size(); ++k) {
        if (f[k] > 0.0) margin = std::min(margin, f.grid().edge_distance(k));
    }
    return margin;
}

double l1_distance(const ScalarField& a, const ScalarField& b) {
    require_same_grid(a.grid(), b.grid(), "l1_distance");
    double s = 0.0;
    for (std::size_t k = 0; k < a.size(); ++k) s += std::abs(a[k] - b[k]);
    return s * a.grid().cell_volume();
}

} // namespace hslab
