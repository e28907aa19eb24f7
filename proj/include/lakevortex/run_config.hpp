#pragma once

#include <string>
#include <vector>

#include "lakevortex/blob.hpp"
#include "lakevortex/elliptic.hpp"
#include "lakevortex/integrator.hpp"
#include "lakevortex/lake.hpp"

namespace lakevortex {

struct VortexConfig {
    Vec2 center{0.0, 0.0};
    double gamma = 1.0;
    double M0 = 1.0;
    BlobProfile profile = BlobProfile::Uniform;
};

/// One experiment, as described by a JSON config file. `eps_values` holds a
/// single entry for a plain run or the full sweep list; invariants (positive,
/// < 1, distinct, descending is NOT required) are checked at parse time.
struct RunConfig {
    std::string name = "run";
    LakeSpec lake;
    std::vector<VortexConfig> vortices;
    std::vector<double> eps_values;
    TimeControls time;
    SolverOptions solver;
    std::string output_dir = "out";
};

/// Parse a config from JSON text. Unknown keys, missing required keys, wrong
/// types and out-of-range values all throw ConfigError with the offending
/// path in the message. Geometric validation (centers interior, blob fits)
/// happens later, when the lake is built.
RunConfig parse_config(const std::string& json_text);

/// Read the file and parse it. Throws ConfigError if unreadable.
RunConfig load_config(const std::string& path);

/// Round-trip aid: the canonical JSON rendering of a parsed config (stable
/// key order, numbers via the shortest round-trip form). The manifest hash
/// is computed over this string.
std::string canonical_config(const RunConfig& config);

}  // namespace lakevortex
