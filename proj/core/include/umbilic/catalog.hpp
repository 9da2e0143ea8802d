#pragma once

#include "umbilic/immersion.hpp"

#include <string>
#include <string_view>
#include <vector>

namespace umbilic {

/// Known geometry of a catalog entry, used as test expectations.
struct GroundTruth {
    bool totally_umbilic = false;
    bool extrinsic_sphere = false;
    bool constant_isotropic = false;
    bool hypersurface = false;
};

struct CatalogEntry {
    std::string name;
    std::string description;
    ParametricImmersion immersion;
    GroundTruth flags;
    /// Chart region that curve seeds are drawn from; well inside the domain.
    Box seed_box;
};

/// All entries in a fixed order.
const std::vector<CatalogEntry>& catalog();
/// Throws ConfigInvalid for unknown names.
const CatalogEntry& catalog_entry(std::string_view name);
bool has_catalog_entry(std::string_view name);

/// Axis-aligned ellipsoid x^2/a^2 + y^2/b^2 + z^2/c^2 = 1 in polar chart
/// (theta, phi) with analytic derivatives up to order 3.
ParametricImmersion make_ellipsoid(std::string name, double a, double b, double c);
/// Torus of revolution with tube radius r around a circle of radius R.
ParametricImmersion make_torus(std::string name, double R, double r);

}  // namespace umbilic
