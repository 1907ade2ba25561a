#include "pbp/drift.hpp"

#include <cmath>
#include <stdexcept>

namespace pbp {

int sign_of(double v) noexcept {
    return (v > 0.0) - (v < 0.0);
}

namespace {

void require_helper_time(double t) {
    if (!(t < 1.0)) {
        throw std::domain_error("helper drift undefined for t >= 1 (time pole)");
    }
}

// Helper-f component in sign region s.
ComponentTerms helper_terms(double t, double x, int s) {
    require_helper_time(t);
    ComponentTerms out;
    if (s > 0) {
        out.regular = (1.0 - x) / (1.0 - t);
    } else if (s < 0) {
        out.regular = -(1.0 + x) / (1.0 - t);
    } else {
        return out;
    }
    out.singular = SingularTerm{1.0, 0.0};
    out.bridge = true;
    return out;
}

double coth_minus_inv(double u) {
    if (u < 1e-4) {
        return u / 3.0 - u * u * u / 45.0;
    }
    return 1.0 / std::tanh(u) - 1.0 / u;
}

ComponentTerms bes3_bridge_terms(double t, double x, int s) {
    require_helper_time(t);
    ComponentTerms out;
    if (s == 0) {
        return out;
    }
    const double rest = 1.0 - t;
    const double y = s > 0 ? x : -x;
    const double reg = -y / rest + coth_minus_inv(std::max(y, 0.0) / rest) / rest;
    out.regular = s > 0 ? reg : -reg;
    out.singular = SingularTerm{1.0, 0.0};
    out.bridge = true;
    return out;
}

ComponentTerms bessel_terms(double coeff, int s) {
    ComponentTerms out;
    if (s != 0) {
        out.singular = SingularTerm{coeff, 0.0};
    }
    return out;
}

std::string trim_number(double v) {
    std::string s = std::to_string(v);
    s.erase(s.find_last_not_of('0') + 1);
    if (!s.empty() && s.back() == '.') {
        s.pop_back();
    }
    return s;
}

} // namespace

double eval_helper_f(double t, double x) {
    const auto terms = helper_terms(t, x, sign_of(x));
    return DriftField::value_of(terms, x);
}

double eval_bessel(double delta, double x) {
    if (!(delta > 1.0)) {
        throw std::invalid_argument("eval_bessel: need delta > 1");
    }
    return x != 0.0 ? (delta - 1.0) / (2.0 * x) : 0.0;
}

double eval_nosol(double x) {
    return x != 0.0 ? -1.0 / (2.0 * x) : 0.0;
}

std::array<double, 2> eval_sys2d(double t, std::array<double, 2> x) {
    const auto v = DriftField::sys2d().eval(t, x);
    return {v[0], v[1]};
}

std::array<double, 3> eval_sys3d(double t, std::array<double, 3> x) {
    const auto v = DriftField::sys3d().eval(t, x);
    return {v[0], v[1], v[2]};
}

DriftField DriftField::zero(std::size_t dim, double t_end) {
    if (dim == 0) {
        throw std::invalid_argument("zero drift: dim must be >= 1");
    }
    return DriftField(Kind::zero, dim, t_end);
}

DriftField DriftField::helper_f() { return DriftField(Kind::helper_f, 1, 1.0); }

DriftField DriftField::bessel(double delta, double t_end) {
    if (!(delta > 1.0)) {
        throw std::invalid_argument("bessel drift: need delta > 1");
    }
    return DriftField(Kind::bessel, 1, t_end, delta);
}

DriftField DriftField::nosol(double t_end) { return DriftField(Kind::nosol, 1, t_end); }
DriftField DriftField::sys2d() { return DriftField(Kind::sys2d, 2, 2.0); }
DriftField DriftField::sys3d() { return DriftField(Kind::sys3d, 3, 2.0); }

DriftField DriftField::product_block(int n) {
    if (n < 1) {
        throw std::invalid_argument("product_block: need n >= 1");
    }
    auto field = scaled_sys2d(1.0 / (2.0 * n));
    field.param_ = n;
    return field;
}

DriftField DriftField::scaled_sys2d(double lambda) {
    if (!(lambda > 0.0)) {
        throw std::invalid_argument("scaled_sys2d: need lambda > 0");
    }
    return DriftField(Kind::product_block, 2, 2.0 * lambda, 0.0, lambda);
}

DriftField DriftField::bes3_bridge() { return DriftField(Kind::bes3_bridge, 1, 1.0); }

DriftField DriftField::from_id(std::string_view id) {
    const auto open = id.find('(');
    const std::string_view name = id.substr(0, open);
    std::optional<double> arg;
    if (open != std::string_view::npos) {
        const auto close = id.find(')', open);
        if (close == std::string_view::npos || close != id.size() - 1) {
            throw std::invalid_argument("malformed drift id: " + std::string(id));
        }
        arg = std::stod(std::string(id.substr(open + 1, close - open - 1)));
    }
    if (name == "helper_f" && !arg) return helper_f();
    if (name == "bessel" && arg) return bessel(*arg);
    if (name == "nosol" && !arg) return nosol();
    if (name == "sys2d" && !arg) return sys2d();
    if (name == "sys3d" && !arg) return sys3d();
    if (name == "product_block" && arg) return product_block(static_cast<int>(*arg));
    if (name == "zero" && arg) return zero(static_cast<std::size_t>(*arg), 1.0);
    if (name == "bes3_bridge" && !arg) return bes3_bridge();
    throw std::invalid_argument("unknown drift id: " + std::string(id));
}

std::string DriftField::id() const {
    switch (kind_) {
    case Kind::zero: return "zero(" + std::to_string(dim_) + ")";
    case Kind::helper_f: return "helper_f";
    case Kind::bessel: return "bessel(" + trim_number(param_) + ")";
    case Kind::nosol: return "nosol";
    case Kind::sys2d: return "sys2d";
    case Kind::sys3d: return "sys3d";
    case Kind::product_block:
        return param_ > 0 ? "product_block(" + trim_number(param_) + ")" : "scaled_sys2d(" + trim_number(lambda_) + ")";
    case Kind::bes3_bridge: return "bes3_bridge";
    }
    return "unknown";
}

std::optional<double> DriftField::bridge_time() const noexcept {
    switch (kind_) {
    case Kind::helper_f:
    case Kind::bes3_bridge:
    case Kind::sys2d:
    case Kind::sys3d: return 1.0;
    case Kind::product_block: return lambda_;
    default: return std::nullopt;
    }
}

double DriftField::bridge_magnitude() const noexcept {
    return kind_ == Kind::product_block ? std::sqrt(lambda_) : 1.0;
}

std::vector<DriftPiece> DriftField::pieces() const {
    switch (kind_) {
    case Kind::zero: return {{0.0, t_end_, "b = 0"}};
    case Kind::helper_f:
        return {{0.0, 1.0, "1{x>0}((1-x)/(1-t) + 1/x) - 1{x<0}((1+x)/(1-t) + 1/(-x))"}};
    case Kind::bes3_bridge: return {{0.0, 1.0, "sgn(x)(-|x|/(1-t) + coth(|x|/(1-t))/(1-t))"}};
    case Kind::bessel: return {{0.0, t_end_, "1{x!=0}(delta-1)/(2x), delta=" + trim_number(param_)}};
    case Kind::nosol: return {{0.0, t_end_, "1{x!=0}(-1)/(2x)"}};
    case Kind::sys2d:
    case Kind::product_block: {
        const double l = lambda_;
        std::string scale = kind_ == Kind::sys2d ? "" : " [rescaled, lambda=" + trim_number(l) + "]";
        return {{0.0, l, "b1 = 0; b2 = helper_f(t, x2)" + scale},
                {l, 2.0 * l,
                 "b1 = 1{x1!=0}/x1; b2 = 1{x1>0,x2>0}(-1)/(2(x2-1)) + 1{x1<0,x2<0}(-1)/(2(x2+1)) + "
                 "1{x1>0,x2<0}/x2 + 1{x1<0,x2>0}/x2" +
                     scale}};
    }
    case Kind::sys3d:
        return {{0.0, 1.0, "b1 = 0; b2 = 1{x3>0} helper_f(t, x2); b3 = helper_f(t, x3)"},
                {1.0, 2.0, "b1,b2 = 1{x3>0} sys2d(t, x1, x2); b3 = 1{x3!=0}/x3"}};
    }
    return {};
}

std::vector<SingularDecl> DriftField::singular_components() const {
    switch (kind_) {
    case Kind::zero: return {};
    case Kind::helper_f:
    case Kind::bes3_bridge: return {{0, "1/(x-0)"}};
    case Kind::bessel: return {{0, trim_number((param_ - 1.0) / 2.0) + "/(x-0)"}};
    case Kind::nosol: return {{0, "-0.5/(x-0)"}};
    case Kind::sys2d:
    case Kind::product_block: {
        const std::string r = trim_number(std::sqrt(lambda_));
        return {{0, "1/(x1-0)"}, {1, "1/(x2-0), -0.5/(x2-" + r + "), -0.5/(x2+" + r + ")"}};
    }
    case Kind::sys3d: return {{0, "1/(x1-0)"}, {1, "1/(x2-0), -0.5/(x2-1), -0.5/(x2+1)"}, {2, "1/(x3-0)"}};
    }
    return {};
}

double DriftField::value_of(const ComponentTerms& terms, double xj) noexcept {
    double v = terms.regular;
    if (terms.singular && xj != terms.singular->pole) {
        v += terms.singular->coeff / (xj - terms.singular->pole);
    }
    return v;
}

std::vector<double> DriftField::eval(double t, std::span<const double> x) const {
    if (x.size() != dim_) {
        throw std::invalid_argument("DriftField::eval: dimension mismatch");
    }
    std::vector<int> signs(dim_);
    for (std::size_t j = 0; j < dim_; ++j) {
        signs[j] = sign_of(x[j]);
    }
    std::vector<double> out(dim_);
    for (std::size_t j = 0; j < dim_; ++j) {
        out[j] = value_of(terms(t, x, signs, j, false), x[j]);
    }
    return out;
}

ComponentTerms DriftField::sys2d_terms(double t, std::span<const double> x, std::span<const int> s, std::size_t j,
                                       bool right_limit) const {
    // Work in the unscaled frame; lambda == 1 for sys2d/sys3d.
    const double root = std::sqrt(lambda_);
    const double tu = t / lambda_;
    const bool first_piece = tu < 1.0 || (tu == 1.0 && !right_limit);
    ComponentTerms out;
    if (first_piece) {
        if (j == 1) {
            out = helper_terms(tu, x[1] / root, s[1]);
        }
    } else if (j == 0) {
        if (s[0] != 0) {
            out.singular = SingularTerm{1.0, 0.0};
        }
    } else {
        if (s[0] > 0 && s[1] > 0) {
            out.singular = SingularTerm{-0.5, 1.0};
        } else if (s[0] < 0 && s[1] < 0) {
            out.singular = SingularTerm{-0.5, -1.0};
        } else if (s[0] != 0 && s[1] != 0) {
            out.singular = SingularTerm{1.0, 0.0};
        }
    }
    if (lambda_ != 1.0) {
        out.regular /= root;
        if (out.singular) {
            out.singular->pole *= root;
        }
    }
    return out;
}

ComponentTerms DriftField::terms(double t, std::span<const double> x, std::span<const int> s, std::size_t j,
                                 bool right_limit) const {
    switch (kind_) {
    case Kind::zero: return {};
    case Kind::helper_f: return helper_terms(t, x[0], s[0]);
    case Kind::bes3_bridge: return bes3_bridge_terms(t, x[0], s[0]);
    case Kind::bessel: return bessel_terms((param_ - 1.0) / 2.0, s[0]);
    case Kind::nosol: return bessel_terms(-0.5, s[0]);
    case Kind::sys2d:
    case Kind::product_block: return sys2d_terms(t, x, s, j, right_limit);
    case Kind::sys3d: {
        const bool first_piece = t < 1.0 || (t == 1.0 && !right_limit);
        if (j == 2) {
            return first_piece ? helper_terms(t, x[2], s[2]) : bessel_terms(1.0, s[2]);
        }
        if (s[2] <= 0) {
            return {};
        }
        return sys2d_terms(t, x, s, j, right_limit);
    }
    }
    return {};
}

} // namespace pbp
