#pragma once

#include <array>
#include <cstddef>
#include <memory>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

namespace hslab {

class GridMismatch : public std::invalid_argument {
public:
    using std::invalid_argument::invalid_argument;
};

/**
 * Uniform cell-centered Cartesian grid on [-L, L]^dim, dim in {1, 2}.
 *
 * Cells are indexed row-major in 2D: index = j * nx + i where i runs along x.
 * Spacing is identical on every axis.
 */
class Grid {
public:
    static constexpr std::size_t kMinCells = 8;

    Grid(int dim, std::size_t cells_per_axis, double half_width);

    int dim() const { return dim_; }
    std::size_t cells_per_axis() const { return n_; }
    std::size_t size() const { return dim_ == 1 ? n_ : n_ * n_; }
    double half_width() const { return half_width_; }
    double spacing() const { return h_; }
    /// h^dim
    double cell_volume() const { return dim_ == 1 ? h_ : h_ * h_; }

    /// Center coordinate along one axis: -L + (i + 1/2) h.
    double center(std::size_t i) const { return -half_width_ + (static_cast<double>(i) + 0.5) * h_; }

    std::size_t index(std::size_t i, std::size_t j = 0) const { return j * n_ + i; }
    std::size_t ix(std::size_t cell) const { return cell % n_; }
    std::size_t iy(std::size_t cell) const { return dim_ == 1 ? 0 : cell / n_; }

    /// Center of a cell; the y component is 0 in 1D.
    std::array<double, 2> position(std::size_t cell) const {
        return {center(ix(cell)), dim_ == 1 ? 0.0 : center(iy(cell))};
    }

    /// Number of cells between this cell and the nearest domain edge (0 for edge cells).
    std::size_t edge_distance(std::size_t cell) const;

    bool operator==(const Grid& other) const {
        return dim_ == other.dim_ && n_ == other.n_ && half_width_ == other.half_width_;
    }

private:
    int dim_;
    std::size_t n_;
    double half_width_;
    double h_;
};

/// Cell-centered real values on a Grid.
class ScalarField {
public:
    explicit ScalarField(const Grid& grid, double value = 0.0);
    ScalarField(const Grid& grid, std::vector<double> values);

    const Grid& grid() const { return grid_; }
    std::size_t size() const { return values_.size(); }

    double& operator[](std::size_t k) { return values_[k]; }
    double operator[](std::size_t k) const { return values_[k]; }
    double& at(std::size_t i, std::size_t j = 0) { return values_[grid_.index(i, j)]; }
    double at(std::size_t i, std::size_t j = 0) const { return values_[grid_.index(i, j)]; }

    std::span<double> values() { return values_; }
    std::span<const double> values() const { return values_; }

    double max() const;
    double min() const;
    bool all_finite() const;

    ScalarField& operator+=(const ScalarField& other);
    ScalarField& operator-=(const ScalarField& other);
    ScalarField& operator*=(double s);

private:
    Grid grid_;
    std::vector<double> values_;
};

ScalarField operator+(ScalarField a, const ScalarField& b);
ScalarField operator-(ScalarField a, const ScalarField& b);
ScalarField operator*(double s, ScalarField a);

/// Boolean membership per cell; represents sets such as {p > 0}.
class RegionMask {
public:
    explicit RegionMask(const Grid& grid, bool value = false);

    const Grid& grid() const { return grid_; }
    std::size_t size() const { return member_.size(); }

    bool operator[](std::size_t k) const { return member_[k] != 0; }
    void set(std::size_t k, bool v) { member_[k] = v ? 1 : 0; }

    std::size_t count() const;
    bool empty() const { return count() == 0; }
    std::vector<std::size_t> members() const;

    /// this ⊆ other
    bool subset_of(const RegionMask& other) const;
    bool operator==(const RegionMask& other) const { return grid_ == other.grid_ && member_ == other.member_; }

private:
    Grid grid_;
    std::vector<unsigned char> member_;
};

void require_same_grid(const Grid& a, const Grid& b, const char* what);

/// Second differences over h^2 with ghost value 0 beyond the domain edge.
ScalarField laplacian(const ScalarField& f);

/// Laplacian at a single cell (same stencil as laplacian()).
double laplacian_at(const ScalarField& f, std::size_t cell);

/// Sum over axes of squared central difference quotients, one-sided at the edge.
ScalarField grad_sq(const ScalarField& f);

/**
 * div(n grad p) in conservative face form. Face coefficient is the arithmetic
 * mean of the adjacent n values; exterior faces carry zero flux, so the
 * h^dim-weighted sum of the result telescopes to zero.
 */
ScalarField flux_divergence(const ScalarField& n, const ScalarField& p);
/// Same as above, writing into `out` (which must live on the same grid).
void flux_divergence(const ScalarField& n, const ScalarField& p, ScalarField& out);

/// Sum of values times h^dim.
double integrate(const ScalarField& f);

/// Smallest edge_distance over cells where f > 0 (cells_per_axis when f has no positive cell).
std::size_t support_margin(const ScalarField& f);

/// L1 norm of a - b.
double l1_distance(const ScalarField& a, const ScalarField& b);

} // namespace hslab
