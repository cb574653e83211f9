#include "hslab/growth.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <limits>
#include <sstream>

namespace hslab {

GrowthLaw GrowthLaw::linear(double g0, double pM) {
    if (!(g0 > 0.0) || !std::isfinite(g0)) throw InvalidLaw("growth law: g0 must be positive");
    if (!(pM > 0.0) || !std::isfinite(pM)) throw InvalidLaw("growth law: pM must be positive");
    GrowthLaw law;
    law.shape_ = Shape::Linear;
    law.g0_ = g0;
    law.pM_ = pM;
    return law;
}

GrowthLaw GrowthLaw::tabulated(std::vector<double> p, std::vector<double> g) {
    if (p.size() != g.size() || p.size() < 2) {
        throw InvalidLaw("tabulated law: need at least two (p, G) pairs");
    }
    if (p.front() != 0.0) throw InvalidLaw("tabulated law: first pressure knot must be 0");
    for (std::size_t k = 0; k < p.size(); ++k) {
        if (!std::isfinite(p[k]) || !std::isfinite(g[k])) throw InvalidLaw("tabulated law: non-finite entry");
        if (k > 0 && !(p[k] > p[k - 1])) throw InvalidLaw("tabulated law: pressures must be strictly increasing");
        if (k > 0 && !(g[k] < g[k - 1])) throw InvalidLaw("tabulated law: G must be strictly decreasing");
    }
    if (std::abs(g.back()) > 1e-8) throw InvalidLaw("tabulated law: G(pM) must vanish within 1e-8");
    if (!(g.front() > 0.0)) throw InvalidLaw("tabulated law: G(0) must be positive");
    GrowthLaw law;
    law.shape_ = Shape::Tabulated;
    law.g0_ = g.front();
    law.pM_ = p.back();
    law.kp_ = std::move(p);
    law.kg_ = std::move(g);
    law.semiconvexity_constant(); // rejects laws with c <= 0
    return law;
}

GrowthLaw GrowthLaw::from_csv(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) throw InvalidLaw("cannot open growth table " + path.string());
    std::vector<double> p, g;
    std::string line;
    std::size_t lineno = 0;
    while (std::getline(in, line)) {
        ++lineno;
        if (line.empty() || line[0] == '#') continue;
        std::replace(line.begin(), line.end(), ',', ' ');
        std::istringstream row(line);
        double a = 0.0, b = 0.0;
        if (!(row >> a >> b)) {
            if (p.empty() && lineno == 1) continue; // header
            throw InvalidLaw("growth table " + path.string() + ": malformed line " + std::to_string(lineno));
        }
        p.push_back(a);
        g.push_back(b);
    }
    return tabulated(std::move(p), std::move(g));
}

GrowthLaw GrowthLaw::zero(double pM) {
    GrowthLaw law;
    law.shape_ = Shape::Zero;
    law.g0_ = 0.0;
    law.pM_ = pM;
    return law;
}

std::size_t GrowthLaw::segment(double p) const {
    auto it = std::upper_bound(kp_.begin(), kp_.end(), p);
    std::size_t k = static_cast<std::size_t>(it - kp_.begin());
    if (k == 0) return 0;
    return std::min(k - 1, kp_.size() - 2);
}

double GrowthLaw::eval(double p) const {
    if (p < 0.0) throw std::domain_error("growth law evaluated at negative pressure");
    switch (shape_) {
    case Shape::Linear:
        return g0_ * (1.0 - p / pM_);
    case Shape::Zero:
        return 0.0;
    case Shape::Tabulated: {
        const std::size_t k = segment(p);
        const double s = (kg_[k + 1] - kg_[k]) / (kp_[k + 1] - kp_[k]);
        return kg_[k] + s * (p - kp_[k]);
    }
    }
    return 0.0;
}

double GrowthLaw::derivative(double p) const {
    switch (shape_) {
    case Shape::Linear:
        return -g0_ / pM_;
    case Shape::Zero:
        return 0.0;
    case Shape::Tabulated: {
        const std::size_t k = segment(std::max(p, 0.0));
        return (kg_[k + 1] - kg_[k]) / (kp_[k + 1] - kp_[k]);
    }
    }
    return 0.0;
}

double GrowthLaw::semiconvexity_constant(std::size_t samples) const {
    double c = 0.0;
    switch (shape_) {
    case Shape::Linear:
        c = g0_; // G - pG' is identically g0
        break;
    case Shape::Zero:
        c = 0.0;
        break;
    case Shape::Tabulated: {
        samples = std::max<std::size_t>(samples, 2);
        c = std::numeric_limits<double>::infinity();
        for (std::size_t k = 0; k <= samples; ++k) {
            const double p = pM_ * static_cast<double>(k) / static_cast<double>(samples);
            c = std::min(c, eval(p) - p * derivative(p));
        }
        // endpoint one-sided values
        c = std::min(c, eval(0.0) - 0.0);
        c = std::min(c, eval(pM_) - pM_ * derivative(pM_));
        break;
    }
    }
    if (!(c > 0.0)) throw InvalidLaw("growth law: semiconvexity constant must be positive");
    return c;
}

double GrowthLaw::antiderivative(double p, double alpha) const {
    if (p < 0.0 || p > pM_ * (1.0 + 1e-12)) throw std::domain_error("antiderivative: pressure outside [0, pM]");
    if (alpha < 0.0) throw std::domain_error("antiderivative: alpha must be nonnegative");
    if (p == 0.0) return 0.0;
    switch (shape_) {
    case Shape::Zero:
        return 0.0;
    case Shape::Linear: {
        const double a1 = alpha + 1.0;
        const double a2 = alpha + 2.0;
        return g0_ * (std::pow(p, a1) / a1 - std::pow(p, a2) / (a2 * pM_));
    }
    case Shape::Tabulated: {
        constexpr int panels = 1024; // even
        const double dq = p / panels;
        auto f = [&](double q) { return (alpha == 0.0 ? 1.0 : std::pow(q, alpha)) * eval(q); };
        double s = f(0.0) + f(p);
        for (int k = 1; k < panels; ++k) s += (k % 2 ? 4.0 : 2.0) * f(k * dq);
        return s * dq / 3.0;
    }
    }
    return 0.0;
}

} // namespace hslab
