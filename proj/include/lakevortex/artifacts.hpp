#pragma once

#include <string>
#include <vector>

#include "lakevortex/blob.hpp"
#include "lakevortex/elliptic.hpp"
#include "lakevortex/integrator.hpp"
#include "lakevortex/lake.hpp"
#include "lakevortex/limit_ode.hpp"

namespace lakevortex {

/// Shortest decimal rendering that round-trips to the same double; every
/// file writer goes through this so reruns are byte-identical and parsers
/// recover the exact values.
std::string fmt_double(double v);

/// 64-bit FNV-1a of a byte string as 16 lowercase hex digits (config hash).
std::string fnv1a_hex(const std::string& bytes);

/// Deterministic probe set: the first `count` points of the Halton (2,3)
/// sequence mapped onto the grid bounding box and filtered to the offset
/// region dist_boundary >= margin. No RNG, no seed to record beyond the rule.
std::vector<Vec2> probe_points(const Lake& lake, double margin, std::size_t count = 64);

/// Create the directory (parents included) and write the whole file.
void write_text(const std::string& path, const std::string& content);

/// Pinned time-series header: the ten documented columns first, then the
/// extra diagnostics (kept stable; consumers may ignore them).
extern const char* const kTimeSeriesHeader;
std::string timeseries_csv(const TimeSeries& series, std::size_t blob_index);

/// Particle snapshot as x,y,w rows plus a JSON sidecar with the blob's
/// metadata at a given time.
std::string blob_csv(const Blob& blob);
std::string blob_sidecar_json(const Blob& blob, double t);

/// Stream field as x,y,psi rows over the interior cells.
std::string stream_csv(const Lake& lake, const StreamField& field);

/// Row-major binary snapshot: magic "LVSF", version, dimensions, h, origin,
/// then the full nx*ny grid of doubles (exterior cells are zero).
struct StreamSnapshot {
    int nx = 0, ny = 0;
    double h = 0.0;
    Vec2 origin{0.0, 0.0};
    std::vector<double> values;
};
void write_stream_binary(const std::string& path, const Lake& lake, const StreamField& field);
StreamSnapshot read_stream_binary(const std::string& path);

/// Limit trajectory as t,z_x,z_y,b_level_error rows.
std::string limit_csv(const LimitTrajectory& traj, const DepthForm& depth);

/// One polyline of a static SVG plot, in data coordinates.
struct SvgSeries {
    std::string label;
    std::string color = "#1f6fb2";
    std::vector<Vec2> points;
    bool markers = false;
};

/// Minimal self-contained SVG line plot (axes box, tick labels, legend).
/// log_x / log_y switch the respective axis to log10; nonpositive values
/// are rejected with ConfigError in that case.
std::string svg_plot(const std::string& title, const std::vector<SvgSeries>& series,
                     bool log_x = false, bool log_y = false);

}  // namespace lakevortex
