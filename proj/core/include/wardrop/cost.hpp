#pragma once

#include <string>
#include <utility>
#include <vector>

namespace wardrop {

/// Separable resource cost c(x), continuous and nondecreasing on [0, inf).
///
/// Five parametric families are supported. Each family carries closed forms
/// for the antiderivative, the generalized inverse and the Fenchel conjugate
/// of the antiderivative, which the solvers and the exact singleton machinery
/// rely on.
class CostFunction {
public:
    enum class Kind { Affine, Monomial, Bpr, PiecewiseLinear, Constant };

    // a*x + b, a >= 0, b >= 0
    static CostFunction affine(double a, double b);
    // coeff*x^exponent + constant, coeff >= 0, exponent >= 1, constant >= 0
    static CostFunction monomial(double coeff, double exponent, double constant);
    // t0*(1 + alpha*(x/capacity)^beta), t0 > 0, alpha >= 0, beta >= 1, capacity > 0
    static CostFunction bpr(double t0, double alpha, double beta, double capacity);
    // linear interpolation through knots (x_i, y_i); x_0 = 0, x strictly
    // increasing, y nondecreasing; extrapolates with the last segment slope
    static CostFunction piecewise_linear(std::vector<std::pair<double, double>> knots);
    // b >= 0
    static CostFunction constant(double b);

    Kind kind() const { return kind_; }

    /// c(x). Negative x is clamped to 0.
    double eval(double x) const;

    /// C(x) = integral of c over [0, x], exact per family.
    double antiderivative(double x) const;

    /// Generalized inverse inv(y) = sup{x >= 0 : c(x) < y}, with inv(y) = 0
    /// for y <= c(0). Finite for strictly increasing families; for families
    /// bounded above by y the result is +inf.
    double inverse(double y) const;

    /// Fenchel conjugate C*(t) = sup_{x>=0} (t*x - C(x)).
    double conjugate(double t) const;

    /// True iff c is strictly increasing on [0, inf).
    bool strictly_increasing() const;

    /// Parameter-level problems (negative coefficients, decreasing knots, ...).
    /// Empty when the instance is well formed.
    std::vector<std::string> validate() const;

    // Parameter access for serialization.
    const std::vector<double>& params() const { return params_; }
    const std::vector<std::pair<double, double>>& knots() const { return knots_; }

    bool operator==(const CostFunction& other) const;

private:
    CostFunction(Kind kind, std::vector<double> params,
                 std::vector<std::pair<double, double>> knots = {})
        : kind_(kind), params_(std::move(params)), knots_(std::move(knots)) {}

    Kind kind_;
    std::vector<double> params_;
    std::vector<std::pair<double, double>> knots_;  // PiecewiseLinear only
};

const char* to_string(CostFunction::Kind kind);

}  // namespace wardrop
