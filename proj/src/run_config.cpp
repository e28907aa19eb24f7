#include "lakevortex/run_config.hpp"

#include <cmath>
#include <fstream>
#include <set>
#include <sstream>

#include <json.hpp>

#include "lakevortex/errors.hpp"

namespace lakevortex {

namespace {

using json = nlohmann::json;

[[noreturn]] void fail(const std::string& path, const std::string& what) {
    throw ConfigError("config: " + path + ": " + what);
}

void check_keys(const json& obj, const std::string& path,
                std::initializer_list<const char*> allowed) {
    if (!obj.is_object()) fail(path, "expected an object");
    for (const auto& item : obj.items()) {
        bool known = false;
        for (const char* key : allowed)
            if (item.key() == key) {
                known = true;
                break;
            }
        if (!known) fail(path + "." + item.key(), "unknown key");
    }
}

const json* find(const json& obj, const char* key) {
    const auto it = obj.find(key);
    return it == obj.end() ? nullptr : &*it;
}

const json& need(const json& obj, const std::string& path, const char* key) {
    const json* v = find(obj, key);
    if (!v) fail(path, std::string("missing required key '") + key + "'");
    return *v;
}

double num(const json& v, const std::string& path) {
    if (!v.is_number()) fail(path, "expected a number");
    const double x = v.get<double>();
    if (!std::isfinite(x)) fail(path, "expected a finite number");
    return x;
}

double num_or(const json& obj, const std::string& path, const char* key, double fallback) {
    const json* v = find(obj, key);
    return v ? num(*v, path + "." + key) : fallback;
}

std::string text(const json& v, const std::string& path) {
    if (!v.is_string()) fail(path, "expected a string");
    return v.get<std::string>();
}

Vec2 point(const json& v, const std::string& path) {
    if (!v.is_array() || v.size() != 2) fail(path, "expected a point [x, y]");
    return {num(v[0], path + "[0]"), num(v[1], path + "[1]")};
}

ScalarExpr parse_expr(const json& v, const std::string& path) {
    if (!v.is_object()) fail(path, "expected an expression object");
    const std::string kind = text(need(v, path, "kind"), path + ".kind");
    if (kind == "constant") {
        check_keys(v, path, {"kind", "value"});
        return ScalarExpr::constant(num(need(v, path, "value"), path + ".value"));
    }
    if (kind == "affine") {
        check_keys(v, path, {"kind", "a0", "ax", "ay"});
        return ScalarExpr::affine(num_or(v, path, "a0", 0.0), num_or(v, path, "ax", 0.0),
                                  num_or(v, path, "ay", 0.0));
    }
    if (kind == "radial") {
        check_keys(v, path, {"kind", "p0", "p2", "p4", "center"});
        Vec2 c{0.0, 0.0};
        if (const json* cj = find(v, "center")) c = point(*cj, path + ".center");
        return ScalarExpr::radial(num_or(v, path, "p0", 0.0), num_or(v, path, "p2", 0.0),
                                  num_or(v, path, "p4", 0.0), c);
    }
    if (kind == "box") {
        check_keys(v, path, {"kind", "x0", "y0", "x1", "y1"});
        return ScalarExpr::box(num(need(v, path, "x0"), path + ".x0"),
                               num(need(v, path, "y0"), path + ".y0"),
                               num(need(v, path, "x1"), path + ".x1"),
                               num(need(v, path, "y1"), path + ".y1"));
    }
    fail(path + ".kind", "unknown expression kind '" + kind +
                             "' (expected constant, affine, radial or box)");
}

Shape parse_shape(const json& v, const std::string& path) {
    const std::string kind = text(need(v, path, "kind"), path + ".kind");
    Shape shape;
    if (kind == "disc") {
        check_keys(v, path, {"kind", "center", "radius"});
        shape.kind = Shape::Kind::Disc;
        if (const json* cj = find(v, "center")) shape.center = point(*cj, path + ".center");
        shape.radius = num(need(v, path, "radius"), path + ".radius");
        if (!(shape.radius > 0.0)) fail(path + ".radius", "must be positive");
    } else if (kind == "rectangle") {
        check_keys(v, path, {"kind", "x0", "y0", "x1", "y1"});
        shape.kind = Shape::Kind::Rectangle;
        shape.x0 = num(need(v, path, "x0"), path + ".x0");
        shape.y0 = num(need(v, path, "y0"), path + ".y0");
        shape.x1 = num(need(v, path, "x1"), path + ".x1");
        shape.y1 = num(need(v, path, "y1"), path + ".y1");
        if (!(shape.x0 < shape.x1) || !(shape.y0 < shape.y1))
            fail(path, "rectangle corners must satisfy x0 < x1 and y0 < y1");
    } else {
        fail(path + ".kind", "unknown shape '" + kind + "' (expected disc or rectangle)");
    }
    return shape;
}

BlobProfile parse_profile(const json& v, const std::string& path) {
    const std::string s = text(v, path);
    if (s == "uniform") return BlobProfile::Uniform;
    if (s == "cosine") return BlobProfile::Cosine;
    fail(path, "unknown profile '" + s + "' (expected uniform or cosine)");
}

json expr_json(const ScalarExpr& e) {
    json v;
    switch (e.kind) {
        case ScalarExpr::Kind::Constant:
            v = {{"kind", "constant"}, {"value", e.a0}};
            break;
        case ScalarExpr::Kind::Affine:
            v = {{"kind", "affine"}, {"a0", e.a0}, {"ax", e.ax}, {"ay", e.ay}};
            break;
        case ScalarExpr::Kind::Radial:
            v = {{"kind", "radial"},
                 {"p0", e.p0},
                 {"p2", e.p2},
                 {"p4", e.p4},
                 {"center", {e.center.x, e.center.y}}};
            break;
        case ScalarExpr::Kind::Box:
            v = {{"kind", "box"}, {"x0", e.x0}, {"y0", e.y0}, {"x1", e.x1}, {"y1", e.y1}};
            break;
    }
    return v;
}

}  // namespace

RunConfig parse_config(const std::string& json_text) {
    json root;
    try {
        root = json::parse(json_text);
    } catch (const json::exception& e) {
        throw ConfigError(std::string("config: not valid JSON: ") + e.what());
    }
    check_keys(root, "$", {"name", "lake", "vortices", "eps", "time", "solver", "output"});

    RunConfig cfg;
    if (const json* v = find(root, "name")) cfg.name = text(*v, "$.name");

    const json& lake = need(root, "$", "lake");
    check_keys(lake, "$.lake", {"shape", "depth", "resolution"});
    cfg.lake.shape = parse_shape(need(lake, "$.lake", "shape"), "$.lake.shape");
    const json& res = need(lake, "$.lake", "resolution");
    if (!res.is_number_integer() || res.get<long>() <= 0)
        fail("$.lake.resolution", "expected a positive integer (cells per unit length)");
    cfg.lake.resolution = res.get<int>();
    if (const json* d = find(lake, "depth")) {
        check_keys(*d, "$.lake.depth", {"c", "phi", "alpha"});
        if (const json* c = find(*d, "c")) cfg.lake.depth.c = parse_expr(*c, "$.lake.depth.c");
        if (const json* p = find(*d, "phi"))
            cfg.lake.depth.phi = parse_expr(*p, "$.lake.depth.phi");
        cfg.lake.depth.alpha = num_or(*d, "$.lake.depth", "alpha", 0.0);
        if (cfg.lake.depth.alpha < 0.0) fail("$.lake.depth.alpha", "must be >= 0");
    }

    const json& vortices = need(root, "$", "vortices");
    if (!vortices.is_array() || vortices.empty())
        fail("$.vortices", "expected a non-empty array");
    for (std::size_t i = 0; i < vortices.size(); ++i) {
        const std::string path = "$.vortices[" + std::to_string(i) + "]";
        const json& v = vortices[i];
        check_keys(v, path, {"center", "gamma", "M0", "profile"});
        VortexConfig vc;
        vc.center = point(need(v, path, "center"), path + ".center");
        vc.gamma = num(need(v, path, "gamma"), path + ".gamma");
        if (vc.gamma == 0.0) fail(path + ".gamma", "must be nonzero");
        vc.M0 = num_or(v, path, "M0", 1.0);
        if (!(vc.M0 > 0.0)) fail(path + ".M0", "must be positive");
        if (const json* p = find(v, "profile")) vc.profile = parse_profile(*p, path + ".profile");
        cfg.vortices.push_back(vc);
    }

    const json& eps = need(root, "$", "eps");
    if (eps.is_number()) {
        cfg.eps_values.push_back(num(eps, "$.eps"));
    } else if (eps.is_array() && !eps.empty()) {
        for (std::size_t i = 0; i < eps.size(); ++i)
            cfg.eps_values.push_back(num(eps[i], "$.eps[" + std::to_string(i) + "]"));
    } else {
        fail("$.eps", "expected a number or a non-empty array of numbers");
    }
    std::set<double> seen;
    for (double e : cfg.eps_values) {
        if (!(e > 0.0 && e < 1.0)) fail("$.eps", "values must lie in (0, 1)");
        if (!seen.insert(e).second) fail("$.eps", "values must be distinct");
    }

    if (const json* t = find(root, "time")) {
        check_keys(*t, "$.time", {"T", "cfl", "sample_interval", "dt_cap"});
        cfg.time.T = num_or(*t, "$.time", "T", cfg.time.T);
        cfg.time.cfl = num_or(*t, "$.time", "cfl", cfg.time.cfl);
        cfg.time.sample_interval =
            num_or(*t, "$.time", "sample_interval", cfg.time.sample_interval);
        cfg.time.dt_cap = num_or(*t, "$.time", "dt_cap", cfg.time.dt_cap);
        if (!(cfg.time.T >= 0.0)) fail("$.time.T", "must be >= 0");
        if (!(cfg.time.cfl > 0.0)) fail("$.time.cfl", "must be positive");
        if (!(cfg.time.sample_interval > 0.0)) fail("$.time.sample_interval", "must be positive");
        if (cfg.time.dt_cap < 0.0) fail("$.time.dt_cap", "must be >= 0");
    }

    if (const json* s = find(root, "solver")) {
        check_keys(*s, "$.solver", {"backend", "tol", "max_iter_factor"});
        if (const json* b = find(*s, "backend")) {
            const std::string name = text(*b, "$.solver.backend");
            if (name == "pcg")
                cfg.solver.backend = SolverBackend::PCG;
            else if (name == "direct")
                cfg.solver.backend = SolverBackend::Direct;
            else
                fail("$.solver.backend", "unknown backend '" + name + "' (expected pcg or direct)");
        }
        cfg.solver.tol = num_or(*s, "$.solver", "tol", cfg.solver.tol);
        if (!(cfg.solver.tol > 0.0)) fail("$.solver.tol", "must be positive");
        if (const json* m = find(*s, "max_iter_factor")) {
            if (!m->is_number_integer() || m->get<long>() <= 0)
                fail("$.solver.max_iter_factor", "expected a positive integer");
            cfg.solver.max_iter_factor = m->get<int>();
        }
    }

    if (const json* o = find(root, "output")) cfg.output_dir = text(*o, "$.output");
    if (cfg.output_dir.empty()) fail("$.output", "must not be empty");
    return cfg;
}

RunConfig load_config(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw ConfigError("config: cannot read file '" + path + "'");
    std::ostringstream buf;
    buf << in.rdbuf();
    return parse_config(buf.str());
}

std::string canonical_config(const RunConfig& config) {
    nlohmann::ordered_json root;
    root["name"] = config.name;
    nlohmann::ordered_json shape;
    if (config.lake.shape.kind == Shape::Kind::Disc) {
        shape = {{"kind", "disc"},
                 {"center", {config.lake.shape.center.x, config.lake.shape.center.y}},
                 {"radius", config.lake.shape.radius}};
    } else {
        shape = {{"kind", "rectangle"},
                 {"x0", config.lake.shape.x0},
                 {"y0", config.lake.shape.y0},
                 {"x1", config.lake.shape.x1},
                 {"y1", config.lake.shape.y1}};
    }
    root["lake"] = {{"shape", shape},
                    {"depth",
                     {{"c", expr_json(config.lake.depth.c)},
                      {"phi", expr_json(config.lake.depth.phi)},
                      {"alpha", config.lake.depth.alpha}}},
                    {"resolution", config.lake.resolution}};
    root["vortices"] = nlohmann::ordered_json::array();
    for (const VortexConfig& v : config.vortices)
        root["vortices"].push_back(
            {{"center", {v.center.x, v.center.y}},
             {"gamma", v.gamma},
             {"M0", v.M0},
             {"profile", v.profile == BlobProfile::Uniform ? "uniform" : "cosine"}});
    root["eps"] = config.eps_values;
    root["time"] = {{"T", config.time.T},
                    {"cfl", config.time.cfl},
                    {"sample_interval", config.time.sample_interval},
                    {"dt_cap", config.time.dt_cap}};
    root["solver"] = {
        {"backend", config.solver.backend == SolverBackend::PCG ? "pcg" : "direct"},
        {"tol", config.solver.tol},
        {"max_iter_factor", config.solver.max_iter_factor}};
    root["output"] = config.output_dir;
    return root.dump(2) + "\n";
}

}  // namespace lakevortex
