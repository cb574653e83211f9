#pragma once

#include <filesystem>
#include <stdexcept>
#include <string>
#include <vector>

namespace hslab {

class InvalidLaw : public std::invalid_argument {
public:
    using std::invalid_argument::invalid_argument;
};

/**
 * Pressure-limited growth rate G(p).
 *
 * Accepted laws satisfy G(pM) = 0, G' < 0 on [0, pM] and
 * min_{[0,pM]} (G - p G') > 0. Linear laws are G(p) = g0 (1 - p/pM);
 * tabulated laws interpolate linearly between knots and extend past the last
 * knot with the last segment, so G < 0 above pM.
 */
class GrowthLaw {
public:
    enum class Shape { Linear, Tabulated, Zero };

    static GrowthLaw linear(double g0, double pM);
    /// Knots must start at p = 0, be strictly increasing, end at pM with |G(pM)| <= 1e-8.
    static GrowthLaw tabulated(std::vector<double> p, std::vector<double> g);
    /// Two-column CSV (p, G(p)); '#' comments and a non-numeric header line are skipped.
    static GrowthLaw from_csv(const std::filesystem::path& path);
    /// G == 0 with a nominal pM. Violates the law invariants on purpose; only
    /// used to isolate the transport part of the density equation.
    static GrowthLaw zero(double pM);

    Shape shape() const { return shape_; }
    double g0() const { return g0_; }
    double pM() const { return pM_; }

    /// G(p); throws for p < 0.
    double eval(double p) const;
    double derivative(double p) const;

    /// min over [0, pM] of G(p) - p G'(p). Throws InvalidLaw if not positive.
    double semiconvexity_constant(std::size_t samples = 10000) const;

    /// H^(alpha)(p) = ∫_0^p q^alpha G(q) dq for 0 <= p <= pM (alpha = 0 gives H).
    double antiderivative(double p, double alpha = 0.0) const;

    const std::vector<double>& knots_p() const { return kp_; }
    const std::vector<double>& knots_g() const { return kg_; }

private:
    GrowthLaw() = default;
    std::size_t segment(double p) const;

    Shape shape_ = Shape::Linear;
    double g0_ = 0.0;
    double pM_ = 0.0;
    std::vector<double> kp_;
    std::vector<double> kg_;
};

} // namespace hslab
