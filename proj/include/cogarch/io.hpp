#pragma once

#include <cstdint>
#include <string>

#include "cogarch/convergence.hpp"
#include "cogarch/estimation.hpp"
#include "cogarch/simulator.hpp"

// CSV and JSON serialization. All floating-point CSV output is printed with
// 17 significant digits so reruns are byte-identical.

namespace cogarch {

std::string format_double(double x);  // %.17g

// Header: time,G,V,Y1,...,Yq,is_jump
std::string path_to_csv(const SimulatedPath& path);
void write_file(const std::string& filename, const std::string& content);
std::string read_file(const std::string& filename);

// Header: mesh,seed,distance
std::string study_cells_to_csv(const ConvergenceReport& report);

// Headers: "time,dG" (rows are increments over (prev,time], origin t_0 = 0)
// or "time,level" (increments derived from consecutive levels).
std::string observed_to_csv(const ObservedSeries& series);
ObservedSeries read_observed_csv(const std::string& content);

// FNV-1a 64-bit checksum, hex string; embedded in output manifests.
std::string fnv1a_hex(const std::string& content);

}  // namespace cogarch
