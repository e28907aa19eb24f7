#include "lakevortex/artifacts.hpp"

#include <charconv>
#include <cmath>
#include <cstdint>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <sstream>

#include "lakevortex/errors.hpp"

namespace lakevortex {

std::string fmt_double(double v) {
    char buf[40];
    const auto res = std::to_chars(buf, buf + sizeof buf, v);
    return std::string(buf, res.ptr);
}

std::string fnv1a_hex(const std::string& bytes) {
    std::uint64_t hash = 14695981039346656037ull;
    for (unsigned char c : bytes) {
        hash ^= c;
        hash *= 1099511628211ull;
    }
    char buf[20];
    std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(hash));
    return buf;
}

namespace {

/// Van der Corput radical inverse in the given base.
double radical_inverse(std::uint32_t n, std::uint32_t base) {
    double inv = 1.0 / base, scale = inv, value = 0.0;
    while (n) {
        value += static_cast<double>(n % base) * scale;
        n /= base;
        scale *= inv;
    }
    return value;
}

}  // namespace

std::vector<Vec2> probe_points(const Lake& lake, double margin, std::size_t count) {
    std::vector<Vec2> probes;
    const double wx = lake.nx * lake.h, wy = lake.ny * lake.h;
    for (std::uint32_t n = 1; probes.size() < count && n < 200000; ++n) {
        const Vec2 p{lake.origin.x + wx * radical_inverse(n, 2),
                     lake.origin.y + wy * radical_inverse(n, 3)};
        int i, j;
        if (!lake.locate(p, i, j) || !lake.is_interior(i, j)) continue;
        if (dist_boundary(lake, p) < margin) continue;
        probes.push_back(p);
    }
    return probes;
}

void write_text(const std::string& path, const std::string& content) {
    const std::filesystem::path p(path);
    if (p.has_parent_path()) std::filesystem::create_directories(p.parent_path());
    std::ofstream out(p, std::ios::binary | std::ios::trunc);
    if (!out) throw ConfigError("cannot write '" + path + "'");
    out << content;
    if (!out) throw ConfigError("short write to '" + path + "'");
}

const char* const kTimeSeriesHeader =
    "t,z_x,z_y,I,K,E,J1,J2,mass_out,R_t,"
    "J4,psi_moment,R_used,min_phi,lp1,lp2,h_ladder0,"
    "m_t0,m_t1,m_t2,m_t3,m_t4,m_t5,m_t6,m_t7";

std::string timeseries_csv(const TimeSeries& series, std::size_t blob_index) {
    std::ostringstream out;
    out << kTimeSeriesHeader << '\n';
    for (const DiagnosticsRecord& r : series.blobs.at(blob_index)) {
        out << fmt_double(r.t) << ',' << fmt_double(r.z.x) << ',' << fmt_double(r.z.y) << ','
            << fmt_double(r.I) << ',' << fmt_double(r.K) << ',' << fmt_double(r.E) << ','
            << fmt_double(r.J1) << ',' << fmt_double(r.J2) << ',' << fmt_double(r.mass_out) << ','
            << fmt_double(r.R_t) << ',' << fmt_double(r.J4) << ',' << fmt_double(r.psi_moment) << ','
            << fmt_double(r.R_used) << ',' << fmt_double(r.min_phi) << ',' << fmt_double(r.lp1) << ','
            << fmt_double(r.lp2) << ',' << fmt_double(r.h_ladder0);
        for (double m : r.m_t) out << ',' << fmt_double(m);
        out << '\n';
    }
    return out.str();
}

std::string blob_csv(const Blob& blob) {
    std::ostringstream out;
    out << "x,y,w\n";
    for (std::size_t j = 0; j < blob.pos.size(); ++j)
        out << fmt_double(blob.pos[j].x) << ',' << fmt_double(blob.pos[j].y) << ','
            << fmt_double(blob.w[j]) << '\n';
    return out.str();
}

std::string blob_sidecar_json(const Blob& blob, double t) {
    std::ostringstream out;
    out << "{\n"
        << "  \"z0\": [" << fmt_double(blob.z0.x) << ", " << fmt_double(blob.z0.y) << "],\n"
        << "  \"gamma\": " << fmt_double(blob.gamma) << ",\n"
        << "  \"eps\": " << fmt_double(blob.eps) << ",\n"
        << "  \"M0\": " << fmt_double(blob.M0) << ",\n"
        << "  \"sign\": " << (blob.gamma >= 0.0 ? 1 : -1) << ",\n"
        << "  \"profile\": \"" << (blob.profile == BlobProfile::Uniform ? "uniform" : "cosine")
        << "\",\n"
        << "  \"spacing\": " << fmt_double(blob.spacing) << ",\n"
        << "  \"particles\": " << blob.count() << ",\n"
        << "  \"time\": " << fmt_double(t) << "\n"
        << "}\n";
    return out.str();
}

std::string stream_csv(const Lake& lake, const StreamField& field) {
    std::ostringstream out;
    out << "x,y,psi\n";
    for (int c = 0; c < lake.n_cells(); ++c) {
        const int flat = lake.cell_of[c];
        const Vec2 p = lake.cell_center(flat % lake.nx, flat / lake.nx);
        out << fmt_double(p.x) << ',' << fmt_double(p.y) << ',' << fmt_double(field.values[flat])
            << '\n';
    }
    return out.str();
}

namespace {
constexpr char kStreamMagic[4] = {'L', 'V', 'S', 'F'};
constexpr std::uint32_t kStreamVersion = 1;
}  // namespace

void write_stream_binary(const std::string& path, const Lake& lake, const StreamField& field) {
    const std::filesystem::path p(path);
    if (p.has_parent_path()) std::filesystem::create_directories(p.parent_path());
    std::ofstream out(p, std::ios::binary | std::ios::trunc);
    if (!out) throw ConfigError("cannot write '" + path + "'");
    out.write(kStreamMagic, 4);
    const std::uint32_t version = kStreamVersion;
    const std::int32_t nx = lake.nx, ny = lake.ny;
    out.write(reinterpret_cast<const char*>(&version), sizeof version);
    out.write(reinterpret_cast<const char*>(&nx), sizeof nx);
    out.write(reinterpret_cast<const char*>(&ny), sizeof ny);
    out.write(reinterpret_cast<const char*>(&lake.h), sizeof lake.h);
    out.write(reinterpret_cast<const char*>(&lake.origin.x), sizeof lake.origin.x);
    out.write(reinterpret_cast<const char*>(&lake.origin.y), sizeof lake.origin.y);
    out.write(reinterpret_cast<const char*>(field.values.data()),
              static_cast<std::streamsize>(field.values.size() * sizeof(double)));
    if (!out) throw ConfigError("short write to '" + path + "'");
}

StreamSnapshot read_stream_binary(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw ConfigError("cannot read '" + path + "'");
    char magic[4];
    std::uint32_t version = 0;
    StreamSnapshot snap;
    in.read(magic, 4);
    in.read(reinterpret_cast<char*>(&version), sizeof version);
    if (!in || std::string(magic, 4) != std::string(kStreamMagic, 4) ||
        version != kStreamVersion)
        throw ConfigError("'" + path + "' is not a stream snapshot");
    std::int32_t nx = 0, ny = 0;
    in.read(reinterpret_cast<char*>(&nx), sizeof nx);
    in.read(reinterpret_cast<char*>(&ny), sizeof ny);
    in.read(reinterpret_cast<char*>(&snap.h), sizeof snap.h);
    in.read(reinterpret_cast<char*>(&snap.origin.x), sizeof snap.origin.x);
    in.read(reinterpret_cast<char*>(&snap.origin.y), sizeof snap.origin.y);
    if (!in || nx <= 0 || ny <= 0) throw ConfigError("'" + path + "' has a corrupt header");
    snap.nx = nx;
    snap.ny = ny;
    snap.values.resize(static_cast<std::size_t>(nx) * ny);
    in.read(reinterpret_cast<char*>(snap.values.data()),
            static_cast<std::streamsize>(snap.values.size() * sizeof(double)));
    if (!in) throw ConfigError("'" + path + "' is truncated");
    return snap;
}

std::string limit_csv(const LimitTrajectory& traj, const DepthForm& depth) {
    std::ostringstream out;
    out << "t,z_x,z_y,b_level_error\n";
    for (std::size_t k = 0; k < traj.t.size(); ++k)
        out << fmt_double(traj.t[k]) << ',' << fmt_double(traj.z[k].x) << ',' << fmt_double(traj.z[k].y)
            << ',' << fmt_double(depth.depth(traj.z[k]) - traj.level0) << '\n';
    return out.str();
}

namespace {

struct AxisMap {
    double lo = 0.0, hi = 1.0;
    bool log = false;
    double px0 = 0.0, px1 = 1.0;

    double operator()(double v) const {
        const double x = log ? std::log10(v) : v;
        const double a = log ? std::log10(lo) : lo;
        const double b = log ? std::log10(hi) : hi;
        const double f = b > a ? (x - a) / (b - a) : 0.5;
        return px0 + f * (px1 - px0);
    }
};

std::string xml_escape(const std::string& s) {
    std::string out;
    for (char c : s) {
        if (c == '&')
            out += "&amp;";
        else if (c == '<')
            out += "&lt;";
        else if (c == '>')
            out += "&gt;";
        else
            out += c;
    }
    return out;
}

std::string fmt_tick(double v) {
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.4g", v);
    return buf;
}

}  // namespace

std::string svg_plot(const std::string& title, const std::vector<SvgSeries>& series, bool log_x,
                     bool log_y) {
    double xlo = 0.0, xhi = 1.0, ylo = 0.0, yhi = 1.0;
    bool first = true;
    for (const SvgSeries& s : series)
        for (const Vec2& p : s.points) {
            if ((log_x && !(p.x > 0.0)) || (log_y && !(p.y > 0.0)))
                throw ConfigError("svg_plot: nonpositive value on a log axis");
            if (first) {
                xlo = xhi = p.x;
                ylo = yhi = p.y;
                first = false;
            } else {
                xlo = std::min(xlo, p.x);
                xhi = std::max(xhi, p.x);
                ylo = std::min(ylo, p.y);
                yhi = std::max(yhi, p.y);
            }
        }
    auto pad = [](double& lo, double& hi, bool log) {
        if (log) {
            lo /= 1.25;
            hi *= 1.25;
        } else {
            const double m = hi > lo ? 0.06 * (hi - lo) : std::max(1.0, std::abs(hi)) * 0.1;
            lo -= m;
            hi += m;
        }
    };
    pad(xlo, xhi, log_x);
    pad(ylo, yhi, log_y);

    const double W = 640, H = 440, L = 70, R = 20, T = 40, B = 50;
    const AxisMap X{xlo, xhi, log_x, L, W - R};
    const AxisMap Y{ylo, yhi, log_y, H - B, T};  // y grows upward

    std::ostringstream out;
    out << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << W << "\" height=\"" << H
        << "\" viewBox=\"0 0 " << W << ' ' << H << "\">\n"
        << "<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n"
        << "<text x=\"" << W / 2 << "\" y=\"24\" text-anchor=\"middle\" font-family=\"sans-serif\""
        << " font-size=\"15\">" << xml_escape(title) << "</text>\n"
        << "<rect x=\"" << L << "\" y=\"" << T << "\" width=\"" << (W - L - R) << "\" height=\""
        << (H - T - B) << "\" fill=\"none\" stroke=\"#444\"/>\n";
    for (int k = 0; k <= 4; ++k) {
        const double fx = xlo + (log_x ? 0 : k * (xhi - xlo) / 4.0);
        const double vx = log_x ? std::pow(10.0, std::log10(xlo) + k * (std::log10(xhi) -
                                                                        std::log10(xlo)) / 4.0)
                                : fx;
        const double vy = log_y ? std::pow(10.0, std::log10(ylo) + k * (std::log10(yhi) -
                                                                        std::log10(ylo)) / 4.0)
                                : ylo + k * (yhi - ylo) / 4.0;
        out << "<text x=\"" << X(vx) << "\" y=\"" << H - B + 18
            << "\" text-anchor=\"middle\" font-family=\"sans-serif\" font-size=\"11\">"
            << fmt_tick(vx) << "</text>\n"
            << "<text x=\"" << L - 6 << "\" y=\"" << Y(vy) + 4
            << "\" text-anchor=\"end\" font-family=\"sans-serif\" font-size=\"11\">"
            << fmt_tick(vy) << "</text>\n";
    }
    double legend_y = T + 16;
    for (const SvgSeries& s : series) {
        out << "<polyline fill=\"none\" stroke=\"" << s.color << "\" stroke-width=\"1.6\" points=\"";
        for (const Vec2& p : s.points) out << X(p.x) << ',' << Y(p.y) << ' ';
        out << "\"/>\n";
        if (s.markers)
            for (const Vec2& p : s.points)
                out << "<circle cx=\"" << X(p.x) << "\" cy=\"" << Y(p.y)
                    << "\" r=\"3\" fill=\"" << s.color << "\"/>\n";
        if (!s.label.empty()) {
            out << "<line x1=\"" << W - R - 150 << "\" y1=\"" << legend_y << "\" x2=\""
                << W - R - 126 << "\" y2=\"" << legend_y << "\" stroke=\"" << s.color
                << "\" stroke-width=\"2\"/>\n"
                << "<text x=\"" << W - R - 120 << "\" y=\"" << legend_y + 4
                << "\" font-family=\"sans-serif\" font-size=\"12\">" << xml_escape(s.label)
                << "</text>\n";
            legend_y += 18;
        }
    }
    out << "</svg>\n";
    return out.str();
}

}  // namespace lakevortex
