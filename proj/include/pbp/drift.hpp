#pragma once

#include <array>
#include <cstddef>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

namespace pbp {

/// Closed-form helper drift selecting the signed bridges from 0:
///   1{x>0}((1-x)/(1-t) + 1/x) - 1{x<0}((1+x)/(1-t) + 1/(-x)).
/// Throws std::domain_error for t >= 1.
double eval_helper_f(double t, double x);

/// 1{x != 0}(delta-1)/(2x); requires delta > 1.
double eval_bessel(double delta, double x);

/// 1{x != 0}(-1)/(2x).
double eval_nosol(double x);

/// Two-dimensional randomized-filter drift on [0, 2].
std::array<double, 2> eval_sys2d(double t, std::array<double, 2> x);

/// Three-dimensional drift on [0, 2]; the first two components are the
/// two-dimensional drift gated by 1{x3 > 0}.
std::array<double, 3> eval_sys3d(double t, std::array<double, 3> x);

/// A term c / (x_j - pole) of one drift component.
struct SingularTerm {
    double coeff = 0.0;
    double pole = 0.0;
};

/// Drift component j split for the integrator: b_j = regular + c/(x_j - pole).
struct ComponentTerms {
    double regular = 0.0;
    std::optional<SingularTerm> singular;
    /// True when the component is pulled to +-magnitude at the bridge time.
    bool bridge = false;
};

/// Declared singular structure of one component, for reporting.
struct SingularDecl {
    std::size_t component;
    std::string terms;
};

/// Time piece with a human-readable formula.
struct DriftPiece {
    double t_begin;
    double t_end;
    std::string formula;
};

/// A catalog drift b(t, x): piecewise in time, indicator-gated, with every
/// singular term of the form c / (x_j - a) and b = 0 exactly at a pole.
class DriftField {
public:
    enum class Kind { zero, helper_f, bessel, nosol, sys2d, sys3d, product_block, bes3_bridge };

    static DriftField zero(std::size_t dim, double t_end);
    static DriftField helper_f();
    static DriftField bessel(double delta, double t_end = 1.0);
    static DriftField nosol(double t_end = 1.0);
    static DriftField sys2d();
    static DriftField sys3d();
    /// Brownian-rescaled sys2d living on [0, 1/n], lambda = 1/(2n).
    static DriftField product_block(int n);
    /// sys2d rescaled by an arbitrary lambda > 0: b(t,x) = b2(t/lambda, x/sqrt(lambda))/sqrt(lambda).
    static DriftField scaled_sys2d(double lambda);
    /// Exact drift of the 3-Bessel bridge from 0 to +-1 on [0, 1):
    /// -x/(1-t) + coth(x/(1-t))/(1-t), odd in x. Reference only.
    static DriftField bes3_bridge();

    /// Parses ids such as "helper_f", "bessel(3)", "nosol", "sys2d", "sys3d",
    /// "product_block(2)", "zero(2)", "bes3_bridge".
    static DriftField from_id(std::string_view id);

    Kind kind() const noexcept { return kind_; }
    std::string id() const;
    std::size_t dim() const noexcept { return dim_; }
    double t_end() const noexcept { return t_end_; }
    double lambda() const noexcept { return lambda_; }

    /// Time at which bridge components are pinned, if any.
    std::optional<double> bridge_time() const noexcept;
    /// Pinned magnitude at the bridge time (sqrt(lambda) for rescaled blocks).
    double bridge_magnitude() const noexcept;

    std::vector<DriftPiece> pieces() const;
    std::vector<SingularDecl> singular_components() const;

    /// Pointwise value using the verbatim piece convention (the value at a
    /// piece boundary belongs to the earlier piece).
    std::vector<double> eval(double t, std::span<const double> x) const;

    /// Component split evaluated in the sign region `signs` (entries -1, 0,
    /// +1) rather than the signs of x. With `right_limit` the piece to the
    /// right of a boundary time applies.
    ComponentTerms terms(double t, std::span<const double> x, std::span<const int> signs, std::size_t j,
                         bool right_limit) const;

    /// regular + gated singular value of a split at x_j.
    static double value_of(const ComponentTerms& terms, double xj) noexcept;

private:
    DriftField(Kind kind, std::size_t dim, double t_end, double param = 0.0, double lambda = 1.0)
        : kind_(kind), dim_(dim), t_end_(t_end), param_(param), lambda_(lambda) {}

    ComponentTerms sys2d_terms(double t, std::span<const double> x, std::span<const int> signs, std::size_t j,
                               bool right_limit) const;

    Kind kind_;
    std::size_t dim_;
    double t_end_;
    double param_;
    double lambda_;
};

int sign_of(double v) noexcept;

} // namespace pbp
