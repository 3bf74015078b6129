#pragma once

#include <string>
#include <vector>

#include "halfline/potential.hpp"
#include "halfline/spectrum.hpp"
#include "halfline/weyl.hpp"

namespace halfline::tools {

// Plot emitters are presentation only: nothing downstream reads these files,
// and no acceptance check depends on them.

// Complex-plane scatter of eigenvalues over the search rectangle; points with
// multiplicity > 1 are labeled.
void write_eigenvalue_svg(const std::string& path, const ComplexRect& region,
                          const std::vector<Eigenvalue>& eigenvalues);

// The nested enclosures from a disk trace, drawn in the mu/theta plane.
void write_disk_svg(const std::string& path, const std::vector<WeylDisk>& disks);

// Membership heatmap of a sampled lambda rectangle; members shaded by margin.
void write_region_svg(const std::string& path, const RegionMap& map);

}  // namespace halfline::tools
