#pragma once

#include <array>
#include <span>
#include <string_view>
#include <vector>

#include "fcnf/instance.hpp"
#include "fcnf/lp_relaxation.hpp"

namespace fcnf {

inline constexpr int kFeatureCount = 33;

using FeatureVector = std::array<double, kFeatureCount>;

// Fixed contract order; this is also the CSV column order.
std::span<const std::string_view> feature_names();
int feature_index(std::string_view name);  // -1 if unknown

// Index constants for the handful of features referenced from code.
namespace feat {
inline constexpr int kN = 0;
inline constexpr int kM = 1;
inline constexpr int kRho = 2;
inline constexpr int kSBar = 3;
inline constexpr int kC = 4;
inline constexpr int kF = 5;
inline constexpr int kGamma = 6;
inline constexpr int kLBar = 7;
inline constexpr int kLBin = 8;
inline constexpr int kTi = 9;
inline constexpr int kTj = 10;
inline constexpr int kRi = 11;
inline constexpr int kRj = 12;
}  // namespace feat

struct FeatureOptions {
  // Neighborhood request sums count a neighbor once per incident arc; the
  // alternative counts each distinct neighbor once. With at most one arc per
  // ordered pair the two coincide, but imported data may differ.
  bool per_arc_neighbor_sums = true;
};

// One vector per arc, index-aligned with instance.arcs. Degree features are
// divided by n, request features by total supply S (all zeros when S = 0);
// gamma floors the variable cost at 1e-9 to keep the ratio finite.
std::vector<FeatureVector> extract(const Instance& instance,
                                   const RelaxationResult& relaxation,
                                   const FeatureOptions& options = {});

}  // namespace fcnf
