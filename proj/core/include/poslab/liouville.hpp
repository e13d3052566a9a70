#pragma once

// Caccioppoli energy estimates, L^p Liouville tests and the annulus growth
// class, all for nonnegative subharmonic grid functions on pole models.

#include <functional>
#include <optional>
#include <string>
#include <vector>

#include "poslab/operators.hpp"
#include "poslab/smoothing.hpp"

namespace poslab {

/// phi_k = 1 on B_k, (2k - r)/k on [k, 2k], 0 beyond.
GridFunction cutoff(const GridPtr& grid, double k);

struct CutoffFamily {
    std::vector<double> radii;
    std::vector<GridFunction> phi;
    std::vector<double> max_slope;   ///< max |D phi_k| over cells, equals 1/k
};

/// Throws InvalidArgument when 2k exceeds r_max for some k.
CutoffFamily cutoff_family(const GridPtr& grid, const std::vector<double>& ks);

/// 4 eps (p - 1 - eps) / p^2.
double caccioppoli_constant(double p, double eps);

struct CaccioppoliResult {
    double constant = 0.0;
    double lhs = 0.0;        ///< constant * sum phi_bar^2 W (D u^{p/2})^2 h
    double rhs = 0.0;        ///< sum (u^p)_bar W (D phi)^2 h
    double tolerance = 0.0;
    bool pass = false;
    IneqCertificate certificate;  ///< Delta u >= 0 on the grid
};

/// Bars are half-node averages. Requires 1 < p < inf, 0 < eps < p - 1,
/// u > 0 (InvalidArgument) and a certified subharmonic u
/// (PreconditionError).
CaccioppoliResult caccioppoli_check(const GridFunction& u, double p, double eps, const GridFunction& phi);

struct EnergyRow {
    double k = 0.0;
    double lhs = 0.0;            ///< sum over cells of B_k of W (D u^{p/2})^2 h
    double annulus_mass = 0.0;   ///< int_{B_2k \ B_k} u^p
    double rhs = 0.0;            ///< (4 / k^2) annulus_mass
    double bound = 0.0;          ///< (p / (p-1))^2 annulus_mass / k^2, slope 1/k cutoff
    double budget_bound = 0.0;   ///< same with the 2/k gradient budget
    bool dominated = false;      ///< lhs <= bound + tol
};

struct EnergyOptions {
    double delta = 0.5;          ///< required decay exponent of rhs
    double lp_change = 0.05;     ///< allowed relative change of ||u||_p^p between B_{R/2} and B_R
    double c = 10.0;
    std::optional<GridFunction> node_tolerance;  ///< inherited certificate tolerances
};

struct EnergyTable {
    std::vector<EnergyRow> rows;
    double slope = 0.0;          ///< fitted d log rhs / d log k
    double delta = 0.0;
    bool decays = false;         ///< slope <= -delta
    bool lp_member = false;
    double lp_relative_change = 0.0;
    bool dominated = false;      ///< every row dominated
    IneqCertificate certificate;
};

/// Requires u >= 0 and a certified subharmonic u (PreconditionError); every
/// 2k must fit in the domain (InvalidArgument).
EnergyTable energy_decay_test(const GridFunction& u, double p, const std::vector<double>& ks,
                              const EnergyOptions& options = {});

enum class VerdictKind { constant, nonconstant_witness, not_applicable };
std::string to_string(VerdictKind v);

struct LiouvilleVerdict {
    VerdictKind kind = VerdictKind::not_applicable;
    std::string reason;
    std::optional<EnergyTable> table;
    double oscillation = 0.0;        ///< max - min of u on B_{k_max}
    double oscillation_tol = 0.0;
    double poincare_bound = 0.0;     ///< sqrt(lhs * T) bound on osc u^{p/2} over B_{k_max}
};

/// Throws InvalidArgument for models that are not pole + truncation.
/// Non-finite p or p <= 1, a failed certificate, negative values or
/// u outside L^p yield not_applicable with a reason.
LiouvilleVerdict liouville_verdict(const GridFunction& u, double p, const std::vector<double>& ks,
                                   const EnergyOptions& options = {});

using FunctionGenerator = std::function<GridFunction(const GridPtr&)>;

struct DoublingResult {
    LiouvilleVerdict base;
    LiouvilleVerdict doubled;
    bool stable = false;   ///< same verdict kind at r_max and 2 r_max
};

/// Runs the verdict on [0, r_max] with `nodes` nodes and on [0, 2 r_max] with
/// the same spacing; ks are used for both.
DoublingResult liouville_doubling(const WarpingProfile& profile, int n, double r_max, std::size_t nodes,
                                  const FunctionGenerator& make_u, double p, const std::vector<double>& ks,
                                  const EnergyOptions& options = {});

struct GrowthClass {
    std::vector<double> masses;   ///< ||u||^p_{L^p(B_2k \ B_k)}
    double exponent = 0.0;        ///< fitted; -inf when every mass is zero
    double delta_fit = 0.0;
    bool member = false;          ///< exponent < 2 - delta_fit
};

/// Needs at least 4 radii.
GrowthClass subquadratic_class_check(const GridFunction& u, double p, const std::vector<double>& ks,
                                     double delta_fit = 0.1);

struct RegularityReport {
    double p = 0.0;
    double eps = 0.0;
    double grad_cutoff = 0.0;          ///< ||grad phi||_inf
    double bound = 0.0;                ///< p^2 |grad phi|^2 / (4 eps (p-1-eps)) int u~_1^p
    std::vector<double> seminorms_sq;  ///< |u~_k^{p/2}|^2_{W^{1,2}(Omega_1)}
    double sup_first = 0.0;            ///< max of u~_1 on Omega_1
    std::size_t violations = 0;
    bool pass = false;
    ApproxSequence sequence;
};

/// u >= 0 subharmonic on Omega; Omega_1 strictly inside Omega'. Iterates are
/// shifted, u~_k = u_k + 1/(k+1).
RegularityReport regularity_certificate(const GridFunction& u, double p, Interval omega, Interval omega1,
                                        std::size_t k_count = 6, const SmoothingOptions& options = {});

/// max over cells of |D(u^q) - q u_bar^{q-1} D u|. Requires q > 0 and u > 0.
double chain_rule_consistency(const GridFunction& u, double q);

/// Least-squares slope of log2(error) against level (errors at successive
/// doublings); returned with the sign flipped so O(h^2) gives about 2.
double observed_order(const std::vector<double>& errors);

/// Least-squares slope of log y against log x.
double loglog_slope(const std::vector<double>& x, const std::vector<double>& y);

}  // namespace poslab
