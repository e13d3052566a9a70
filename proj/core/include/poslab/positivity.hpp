#pragma once

// L^p positivity preservation: if (-Delta + 1) u >= 0 and u is in L^p on a
// complete model then u >= 0. The pipeline runs Brezis-Kato on -u, then the
// Liouville verdict on (-u)_+. The catalog collects the sharpness examples
// (incomplete manifolds, p = infinity).

#include <optional>
#include <string>
#include <vector>

#include "poslab/kato.hpp"
#include "poslab/liouville.hpp"

namespace poslab {

enum class PPConclusion { nonnegative, violated, inconclusive };
std::string to_string(PPConclusion c);

struct PPOptions {
    std::vector<double> ks;      ///< Liouville radii; default r_max / {16, 8, 4, 2}
    EnergyOptions energy;
    KatoOptions kato;
};

struct PPVerdict {
    IneqCertificate hypothesis;     ///< (Delta - 1)(-u) >= 0
    KatoReport kato;                ///< Brezis-Kato on -u with lambda = 1
    IneqCertificate subharmonic;    ///< Delta (-u)_+ >= 0
    LiouvilleVerdict liouville;     ///< on (-u)_+
    double negative_part_norm = 0.0;   ///< ||(-u)_+||_{L^p}
    double negative_part_max = 0.0;
    std::string zero_route;         ///< how the Liouville constant is shown to vanish
    PPConclusion conclusion = PPConclusion::inconclusive;
    std::size_t witness_node = 0;   ///< argmax of (-u)_+ when violated
    double witness_radius = 0.0;
};

/// Requires a pole + truncation model (InvalidArgument) and a certified
/// hypothesis (PreconditionError).
PPVerdict pp_experiment(const GridFunction& u, double p, const PPOptions& options = {});

struct CatalogCheck {
    std::string name;
    double value = 0.0;
    double reference = 0.0;
    double tolerance = 0.0;   ///< meaning depends on the check (relative or absolute)
    bool pass = false;
};

struct CatalogEntry {
    std::string name;
    std::string manifold;
    std::string failing_property;
    std::optional<GridFunction> u;
    std::vector<CatalogCheck> checks;

    [[nodiscard]] bool pass() const;
    [[nodiscard]] const CatalogCheck& check(const std::string& name) const;
};

struct CatalogOptions {
    // punctured-ball
    double r_min = 1e-3;
    std::size_t nodes = 100000;
    std::vector<double> scan_p{1.5, 2.0, 2.5, 2.9, 3.1};
    std::vector<double> scan_r_min{1e-1, 1e-2, 1e-3, 1e-4};
    std::size_t scan_nodes = 200000;
    // stochastically-incomplete-Linfty
    double growth = 1.0;
    int dimension = 2;
    std::vector<double> probes{25.0, 50.0};
    double ode_rtol = 1e-10;
    double contrast_radius = 20.0;
    // hyperbolic-bounded-harmonic
    double harmonic_r_max = 20.0;
    std::size_t harmonic_nodes = 20000;
};

/// name in {punctured-ball, stochastically-incomplete-Linfty,
/// hyperbolic-bounded-harmonic}; anything else is InvalidArgument.
CatalogEntry counterexample_catalog(const std::string& name, const CatalogOptions& options = {});

/// Radial solution of h'' + (log S)' h' = h with h(0) = 1, h'(0) = 0 on a
/// pole model, integrated by an adaptive Dormand-Prince 5(4) scheme from a
/// small series start. Returns h at the requested increasing radii.
std::vector<double> radial_resolvent_ode(const ModelManifold& m, const std::vector<double>& radii,
                                         double rtol = 1e-10);

struct ResolventRow {
    std::string label;
    double min_u = 0.0;
    double max_u = 0.0;
    bool pass = false;      ///< min u >= -1e-14 max |u|
};

struct ResolventView {
    std::vector<ResolventRow> rows;
    ResolventReport matrix;   ///< entrywise check of the inverse
    bool pass = false;
};

/// Solves (-Delta + 1) u = f for each nonnegative f with the grid's end
/// conditions. Negative samples in f are InvalidArgument.
ResolventView resolvent_view(const GridPtr& grid, const std::vector<std::pair<std::string, GridFunction>>& fs);

}  // namespace poslab
