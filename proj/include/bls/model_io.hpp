#pragma once

#include "bls/bls.hpp"
#include "bls/cbls.hpp"

#include <string>

namespace bls {

// Versioned JSON model files. Floats are written with shortest-round-trip
// precision, so numeric fields survive a save/load cycle exactly; matrices
// are row-major nested arrays. The "model" field ("bls" or "cbls") selects
// the loader.

void save_model(const std::string& path, const BlsModel& model);
void save_model(const std::string& path, const CblsModel& model);

BlsModel load_bls_model(const std::string& path);
CblsModel load_cbls_model(const std::string& path);

/// Peeks at the "model" field so callers can dispatch without parsing twice.
std::string model_kind_in_file(const std::string& path);

} // namespace bls
