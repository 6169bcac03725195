#include "semiscat/potential.hpp"

#include <cmath>
#include <sstream>

#include "semiscat/errors.hpp"
#include "semiscat/numerics.hpp"

namespace semiscat {

namespace {

// B(t) = exp(-1/t) for t > 0, else 0; all derivatives vanish at t = 0.
double bump_b(double t) { return t > 0.0 ? std::exp(-1.0 / t) : 0.0; }

} // namespace

PlateauFunction::PlateauFunction(double inner, double outer)
    : inner_(inner), outer_(outer) {
    if (!(0.0 < inner && inner < outer))
        throw invalid_parameter("PlateauFunction: need 0 < inner < outer");
}

double PlateauFunction::operator()(double r) const {
    const double a = std::abs(r);
    if (a <= inner_) return 1.0;
    if (a >= outer_) return 0.0;
    // normalized position in the transition band, 0 at inner, 1 at outer
    const double s = (a - inner_) / (outer_ - inner_);
    const double up = bump_b(1.0 - s);
    const double dn = bump_b(s);
    return up / (up + dn);
}

Potential::Potential(PotentialKind k, std::vector<double> p, double rho)
    : kind_(k), params_(std::move(p)), rho_(rho) {}

Potential Potential::free() { return Potential(PotentialKind::Free, {}, 0.0); }

Potential Potential::square_barrier(double height, double halfwidth) {
    if (halfwidth <= 0.0)
        throw invalid_parameter("square_barrier: halfwidth must be positive");
    return Potential(PotentialKind::SquareBarrier, {height, halfwidth}, 0.0);
}

Potential Potential::gaussian_barrier(double E0, double width) {
    if (width <= 0.0)
        throw invalid_parameter("gaussian_barrier: width must be positive");
    return Potential(PotentialKind::GaussianBarrier, {E0, width}, 0.0);
}

Potential Potential::well_in_island(double A, double a, double B, double b) {
    if (a <= 0.0 || b <= 0.0)
        throw invalid_parameter("well_in_island: widths must be positive");
    return Potential(PotentialKind::WellInIsland, {A, a, B, b}, 0.0);
}

Potential Potential::well_in_island() {
    // Narrow well above sea level, thin enough barrier that tunneling
    // widths are resolvable at h ~ 0.05.
    return well_in_island(0.42, 1.1, 0.38, 0.55);
}

Potential Potential::double_structure(double E0, double w0, double E1,
                                      double w1, double separation) {
    if (w0 <= 0.0 || w1 <= 0.0 || separation <= 0.0)
        throw invalid_parameter("double_structure: bad shape parameters");
    return Potential(PotentialKind::DoubleStructure, {E0, w0, E1, w1, separation},
                     0.0);
}

Potential Potential::double_structure() {
    // Barrier top E0 = 1 at x = 0 (curvature mu = 2) and a taller bump at
    // x = -5 closing a homoclinic loop on the left.
    return double_structure(1.0, 1.0, 1.3, 1.0, 5.0);
}

Potential Potential::power_tail(double amplitude, double rho) {
    if (rho <= 0.0) throw invalid_parameter("power_tail: rho must be positive");
    return Potential(PotentialKind::PowerTail, {amplitude, rho}, rho);
}

double Potential::evaluate(double x) const {
    switch (kind_) {
    case PotentialKind::Free:
        return 0.0;
    case PotentialKind::SquareBarrier:
        return std::abs(x) < params_[1] ? params_[0] : 0.0;
    case PotentialKind::GaussianBarrier: {
        const double u = x / params_[1];
        return params_[0] * std::exp(-u * u);
    }
    case PotentialKind::WellInIsland: {
        const double u = x / params_[1], v = x / params_[3];
        return params_[0] * std::exp(-u * u) - params_[2] * std::exp(-v * v);
    }
    case PotentialKind::DoubleStructure: {
        const double u = x / params_[1];
        const double v = (x + params_[4]) / params_[3];
        return params_[0] * std::exp(-u * u) + params_[2] * std::exp(-v * v);
    }
    case PotentialKind::PowerTail:
        return params_[0] * std::pow(jbracket(x), -params_[1]);
    case PotentialKind::Truncated:
        return plateau_(x / trunc_R_) * base_->evaluate(x);
    }
    return 0.0;
}

double Potential::derivative(double x) const {
    switch (kind_) {
    case PotentialKind::Free:
        return 0.0;
    case PotentialKind::SquareBarrier:
        return 0.0;  // away from the edges; edges are breakpoints
    case PotentialKind::GaussianBarrier: {
        const double w = params_[1], u = x / w;
        return params_[0] * std::exp(-u * u) * (-2.0 * u / w);
    }
    case PotentialKind::WellInIsland: {
        const double a = params_[1], b = params_[3];
        const double u = x / a, v = x / b;
        return params_[0] * std::exp(-u * u) * (-2.0 * u / a) -
               params_[2] * std::exp(-v * v) * (-2.0 * v / b);
    }
    case PotentialKind::DoubleStructure: {
        const double w0 = params_[1], w1 = params_[3];
        const double u = x / w0, v = (x + params_[4]) / w1;
        return params_[0] * std::exp(-u * u) * (-2.0 * u / w0) +
               params_[2] * std::exp(-v * v) * (-2.0 * v / w1);
    }
    case PotentialKind::PowerTail: {
        const double r = params_[1];
        return params_[0] * (-r) * x * std::pow(jbracket(x), -r - 2.0);
    }
    case PotentialKind::Truncated: {
        // central difference through the smooth blend
        const double s = 1e-5;
        return (evaluate(x + s) - evaluate(x - s)) / (2.0 * s);
    }
    }
    return 0.0;
}

double Potential::second_derivative(double x) const {
    switch (kind_) {
    case PotentialKind::GaussianBarrier: {
        const double w = params_[1], u = x / w;
        return params_[0] * std::exp(-u * u) * (4.0 * u * u - 2.0) / (w * w);
    }
    case PotentialKind::WellInIsland: {
        const double a = params_[1], b = params_[3];
        const double u = x / a, v = x / b;
        return params_[0] * std::exp(-u * u) * (4.0 * u * u - 2.0) / (a * a) -
               params_[2] * std::exp(-v * v) * (4.0 * v * v - 2.0) / (b * b);
    }
    case PotentialKind::DoubleStructure: {
        const double w0 = params_[1], w1 = params_[3];
        const double u = x / w0, v = (x + params_[4]) / w1;
        return params_[0] * std::exp(-u * u) * (4.0 * u * u - 2.0) / (w0 * w0) +
               params_[2] * std::exp(-v * v) * (4.0 * v * v - 2.0) / (w1 * w1);
    }
    default: {
        const double s = 1e-5;
        return (evaluate(x + s) - 2.0 * evaluate(x) + evaluate(x - s)) / (s * s);
    }
    }
}

std::vector<double> Potential::breakpoints() const {
    switch (kind_) {
    case PotentialKind::SquareBarrier:
        return {-params_[1], params_[1]};
    case PotentialKind::Truncated:
        // the plateau junctions are C-infinity; only genuine kinks of the
        // base need grid alignment
        return base_->breakpoints();
    default:
        return {};
    }
}

std::optional<double> Potential::support_radius() const {
    switch (kind_) {
    case PotentialKind::Free:
        return 0.0;
    case PotentialKind::SquareBarrier:
        return params_[1];
    case PotentialKind::Truncated:
        if (auto rb = base_->support_radius())
            return std::min(*rb, 2.0 * trunc_R_);
        return 2.0 * trunc_R_;
    default:
        return std::nullopt;
    }
}

double Potential::effective_support_radius(double eps) const {
    // scan outward until both tails stay below eps; never wider than the
    // exact support when the potential is compactly supported
    const auto hard = support_radius();
    const double r_max = hard ? std::max(*hard, 1e-12) : 1e6;
    double r = 1.0;
    while (r < r_max) {
        if (std::abs(evaluate(r)) < eps && std::abs(evaluate(-r)) < eps &&
            std::abs(evaluate(1.5 * r)) < eps && std::abs(evaluate(-1.5 * r)) < eps)
            return r;
        r *= 1.25;
    }
    return r_max;
}

std::string Potential::describe() const {
    std::ostringstream os;
    switch (kind_) {
    case PotentialKind::Free: os << "free"; break;
    case PotentialKind::SquareBarrier:
        os << "square_barrier(height=" << params_[0] << ",halfwidth=" << params_[1] << ")";
        break;
    case PotentialKind::GaussianBarrier:
        os << "gaussian_barrier(E0=" << params_[0] << ",width=" << params_[1] << ")";
        break;
    case PotentialKind::WellInIsland:
        os << "well_in_island(A=" << params_[0] << ",a=" << params_[1]
           << ",B=" << params_[2] << ",b=" << params_[3] << ")";
        break;
    case PotentialKind::DoubleStructure:
        os << "double_structure(E0=" << params_[0] << ",w0=" << params_[1]
           << ",E1=" << params_[2] << ",w1=" << params_[3] << ",d=" << params_[4] << ")";
        break;
    case PotentialKind::PowerTail:
        os << "power_tail(amplitude=" << params_[0] << ",rho=" << params_[1] << ")";
        break;
    case PotentialKind::Truncated:
        os << "truncated(" << base_->describe() << ",R=" << trunc_R_ << ")";
        break;
    }
    return os.str();
}

Potential truncate(const Potential& base, double R) {
    if (R <= 0.0) throw invalid_parameter("truncate: R must be positive");
    Potential out(PotentialKind::Truncated, {R}, base.decay_exponent());
    out.base_ = std::make_shared<Potential>(base);
    out.trunc_R_ = R;
    return out;
}

DecayReport decay_certificate(const Potential& pot, double rho,
                              const std::vector<double>& x_samples,
                              double bound) {
    DecayReport rep;
    rep.bound = bound;
    const double s = 1e-5;
    for (double x : x_samples) {
        const double w = jbracket(x);
        const double rv = std::abs(pot.evaluate(x)) * std::pow(w, rho);
        const double dv = (pot.evaluate(x + s) - pot.evaluate(x - s)) / (2.0 * s);
        const double rd = std::abs(dv) * std::pow(w, rho + 1.0);
        rep.max_ratio_v = std::max(rep.max_ratio_v, rv);
        rep.max_ratio_dv = std::max(rep.max_ratio_dv, rd);
    }
    rep.violated = rep.max_ratio_v > bound || rep.max_ratio_dv > bound;
    return rep;
}

} // namespace semiscat
