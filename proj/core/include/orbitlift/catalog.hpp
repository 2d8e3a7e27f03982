#pragma once

#include <optional>
#include <string>
#include <vector>

#include "orbitlift/grouprep.hpp"

namespace orbitlift {

struct CatalogParams {
  int n = 0;
  int dim = 0;          // only for "trivial"
  bool strict = false;  // reject labels outside the published Coxeter families
};

// Families: Sn An Bn Dn I2n G2 H3 F4 H4 C2n C3n I3n T W H trivial.
GroupSpec catalog(const std::string& family, const CatalogParams& params = {});

std::vector<std::string> catalog_families();

// Published (d, k, |G|); E6, E7, E8 are listed but not constructible here.
std::optional<TableEntry> published_entry(const std::string& family, int n = 0);

// Largest generator degree where it is known in closed form (published
// tables, Sn: n, trivial: 1); used as the default invariant degree cap.
std::optional<int> known_degree(const std::string& family, int n = 0);

}  // namespace orbitlift
