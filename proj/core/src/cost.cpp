#include "wardrop/cost.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

namespace wardrop {

namespace {
constexpr double kInf = std::numeric_limits<double>::infinity();
}

CostFunction CostFunction::affine(double a, double b) {
    return CostFunction(Kind::Affine, {a, b});
}

CostFunction CostFunction::monomial(double coeff, double exponent, double constant) {
    return CostFunction(Kind::Monomial, {coeff, exponent, constant});
}

CostFunction CostFunction::bpr(double t0, double alpha, double beta, double capacity) {
    return CostFunction(Kind::Bpr, {t0, alpha, beta, capacity});
}

CostFunction CostFunction::piecewise_linear(std::vector<std::pair<double, double>> knots) {
    return CostFunction(Kind::PiecewiseLinear, {}, std::move(knots));
}

CostFunction CostFunction::constant(double b) {
    return CostFunction(Kind::Constant, {b});
}

double CostFunction::eval(double x) const {
    if (x < 0.0) x = 0.0;
    switch (kind_) {
        case Kind::Affine:
            return params_[0] * x + params_[1];
        case Kind::Monomial:
            return params_[0] * std::pow(x, params_[1]) + params_[2];
        case Kind::Bpr: {
            const double t0 = params_[0], alpha = params_[1], beta = params_[2],
                         cap = params_[3];
            return t0 * (1.0 + alpha * std::pow(x / cap, beta));
        }
        case Kind::PiecewiseLinear: {
            const auto& k = knots_;
            if (k.empty()) return 0.0;
            if (x <= k.front().first) return k.front().second;
            for (std::size_t i = 1; i < k.size(); ++i) {
                if (x <= k[i].first) {
                    const double t = (x - k[i - 1].first) / (k[i].first - k[i - 1].first);
                    return k[i - 1].second + t * (k[i].second - k[i - 1].second);
                }
            }
            if (k.size() == 1) return k.back().second;
            const auto& a = k[k.size() - 2];
            const auto& b = k.back();
            const double slope = (b.second - a.second) / (b.first - a.first);
            return b.second + slope * (x - b.first);
        }
        case Kind::Constant:
            return params_[0];
    }
    return 0.0;
}

double CostFunction::antiderivative(double x) const {
    if (x < 0.0) x = 0.0;
    switch (kind_) {
        case Kind::Affine:
            return 0.5 * params_[0] * x * x + params_[1] * x;
        case Kind::Monomial: {
            const double p = params_[1];
            return params_[0] * std::pow(x, p + 1.0) / (p + 1.0) + params_[2] * x;
        }
        case Kind::Bpr: {
            const double t0 = params_[0], alpha = params_[1], beta = params_[2],
                         cap = params_[3];
            return t0 * x + t0 * alpha * cap / (beta + 1.0) * std::pow(x / cap, beta + 1.0);
        }
        case Kind::PiecewiseLinear: {
            const auto& k = knots_;
            if (k.empty()) return 0.0;
            double acc = 0.0;
            double px = 0.0, py = k.front().second;
            for (const auto& [kx, ky] : k) {
                if (x <= kx) {
                    const double y = eval(x);
                    return acc + 0.5 * (py + y) * (x - px);
                }
                acc += 0.5 * (py + ky) * (kx - px);
                px = kx;
                py = ky;
            }
            const double y = eval(x);
            return acc + 0.5 * (py + y) * (x - px);
        }
        case Kind::Constant:
            return params_[0] * x;
    }
    return 0.0;
}

double CostFunction::inverse(double y) const {
    if (y <= eval(0.0)) return 0.0;
    switch (kind_) {
        case Kind::Affine: {
            const double a = params_[0], b = params_[1];
            if (a <= 0.0) return kInf;  // constant below y forever
            return (y - b) / a;
        }
        case Kind::Monomial: {
            const double c = params_[0], p = params_[1], k = params_[2];
            if (c <= 0.0) return kInf;
            return std::pow((y - k) / c, 1.0 / p);
        }
        case Kind::Bpr: {
            const double t0 = params_[0], alpha = params_[1], beta = params_[2],
                         cap = params_[3];
            if (alpha <= 0.0) return kInf;
            return cap * std::pow((y / t0 - 1.0) / alpha, 1.0 / beta);
        }
        case Kind::PiecewiseLinear: {
            const auto& k = knots_;
            if (k.empty()) return kInf;
            for (std::size_t i = 1; i < k.size(); ++i) {
                if (y <= k[i].second) {
                    // sup{x : c(x) < y} lies on segment i-1 -> i
                    if (k[i].second == k[i - 1].second) return k[i].first;
                    const double t = (y - k[i - 1].second) / (k[i].second - k[i - 1].second);
                    return k[i - 1].first + t * (k[i].first - k[i - 1].first);
                }
            }
            if (k.size() == 1) return kInf;
            const auto& a = k[k.size() - 2];
            const auto& b = k.back();
            const double slope = (b.second - a.second) / (b.first - a.first);
            if (slope <= 0.0) return kInf;
            return b.first + (y - b.second) / slope;
        }
        case Kind::Constant:
            return kInf;
    }
    return kInf;
}

double CostFunction::conjugate(double t) const {
    if (t <= eval(0.0)) return 0.0;
    const double x = inverse(t);
    if (!std::isfinite(x)) return kInf;
    return t * x - antiderivative(x);
}

bool CostFunction::strictly_increasing() const {
    switch (kind_) {
        case Kind::Affine:
            return params_[0] > 0.0;
        case Kind::Monomial:
            return params_[0] > 0.0;
        case Kind::Bpr:
            return params_[1] > 0.0;
        case Kind::PiecewiseLinear: {
            if (knots_.size() < 2) return false;
            for (std::size_t i = 1; i < knots_.size(); ++i) {
                if (knots_[i].second <= knots_[i - 1].second) return false;
            }
            return true;
        }
        case Kind::Constant:
            return false;
    }
    return false;
}

std::vector<std::string> CostFunction::validate() const {
    std::vector<std::string> out;
    auto req = [&](bool ok, const std::string& msg) {
        if (!ok) out.push_back(msg);
    };
    switch (kind_) {
        case Kind::Affine:
            req(params_[0] >= 0.0, "affine: a must be >= 0");
            req(params_[1] >= 0.0, "affine: b must be >= 0");
            break;
        case Kind::Monomial:
            req(params_[0] >= 0.0, "monomial: coeff must be >= 0");
            req(params_[1] >= 1.0, "monomial: exponent must be >= 1");
            req(params_[2] >= 0.0, "monomial: constant must be >= 0");
            break;
        case Kind::Bpr:
            req(params_[0] > 0.0, "bpr: t0 must be > 0");
            req(params_[1] >= 0.0, "bpr: alpha must be >= 0");
            req(params_[2] >= 1.0, "bpr: beta must be >= 1");
            req(params_[3] > 0.0, "bpr: capacity must be > 0");
            break;
        case Kind::PiecewiseLinear: {
            req(!knots_.empty(), "piecewise-linear: needs at least one knot");
            if (!knots_.empty()) {
                req(knots_.front().first == 0.0, "piecewise-linear: first knot must be at x = 0");
                req(knots_.front().second >= 0.0, "piecewise-linear: values must be >= 0");
            }
            for (std::size_t i = 1; i < knots_.size(); ++i) {
                req(knots_[i].first > knots_[i - 1].first,
                    "piecewise-linear: knot x-values must be strictly increasing");
                req(knots_[i].second >= knots_[i - 1].second,
                    "piecewise-linear: knot values must be nondecreasing");
            }
            break;
        }
        case Kind::Constant:
            req(params_[0] >= 0.0, "constant: b must be >= 0");
            break;
    }
    // Sampled monotonicity, guards any future family against regressions.
    if (out.empty()) {
        double prev = eval(0.0);
        for (int i = 1; i <= 32; ++i) {
            const double x = 0.25 * static_cast<double>(i) * static_cast<double>(i);
            const double y = eval(x);
            if (y < prev - 1e-12) {
                out.push_back("cost decreases between sampled points");
                break;
            }
            prev = y;
        }
    }
    return out;
}

bool CostFunction::operator==(const CostFunction& other) const {
    return kind_ == other.kind_ && params_ == other.params_ && knots_ == other.knots_;
}

const char* to_string(CostFunction::Kind kind) {
    switch (kind) {
        case CostFunction::Kind::Affine: return "affine";
        case CostFunction::Kind::Monomial: return "monomial";
        case CostFunction::Kind::Bpr: return "bpr";
        case CostFunction::Kind::PiecewiseLinear: return "piecewise-linear";
        case CostFunction::Kind::Constant: return "constant";
    }
    return "?";
}

}  // namespace wardrop
