#pragma once

// Deterministic, headless SVG rendering. Identical inputs produce
// byte-identical files; every figure embeds its data table as an XML
// comment so plots are self-auditing.

#include <string>
#include <vector>

#include "rugged/attribute.hpp"
#include "rugged/decompose.hpp"
#include "rugged/grid.hpp"
#include "rugged/tileselect.hpp"

namespace rugged::plot {

// 1D TFLOPs line along the slice's sweep axis, annotated with roughness.
std::string slice_line(const Slice1D& slice, const std::string& title);

// (M, N) TFLOPs heatmap at a fixed K value.
std::string surface_heatmap(const TimingGrid& grid, dim_t fixed_k,
                            const std::string& title);

// Per-N stacked time bars (bound component + overhead) at fixed M, K.
std::string stacked_decomposition(const DecompositionSurfaces& s, dim_t fixed_m,
                                  dim_t fixed_k, const std::string& title);

// (M, N) winner-tile mosaic at a fixed K value.
std::string winner_mosaic(const WinnerMap& map, dim_t fixed_k,
                          const std::string& title);

// Side-by-side slice panels, shared y-scale, one per optimization stage.
std::string stage_progression(const std::vector<StageSlice>& stages,
                              const std::string& title);

}  // namespace rugged::plot
