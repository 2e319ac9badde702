#pragma once

#include <string>
#include <vector>

#include "selfdual/torus.hpp"

namespace selfdual {

struct Path;

/// CSV: metadata comment line, then header k1,k2[,k3],component,re,im with
/// one row per retained-band mode and component.
void write_field_csv(const std::string& filename, const SpectralField& u);
SpectralField read_field_csv(const std::string& filename);

/// Flat little-endian binary. Layout: magic "SDF1", int32 d, int32 n,
/// float64 nu, int64 record count, then records of
/// { int32 k[d], int32 component, float64 re, float64 im }
/// covering the retained band.
void write_field_binary(const std::string& filename, const SpectralField& u);
SpectralField read_field_binary(const std::string& filename);

/// Path container: magic "SDP1", int32 d, int32 n, float64 nu, int32 node
/// count, float64 T, followed by per-node field records (count + records,
/// same record layout as fields).
void write_path_binary(const std::string& filename, const Path& path);
Path read_path_binary(const std::string& filename);

}  // namespace selfdual
