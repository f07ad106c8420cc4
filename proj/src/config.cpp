#include "corrosion/config.hpp"

#include "corrosion/errors.hpp"

#include <json.hpp>

#include <cmath>
#include <fstream>
#include <numbers>
#include <set>
#include <sstream>

namespace corrosion {

namespace {

using nlohmann::json;

void only_keys(const json& j, const std::set<std::string>& allowed, const std::string& where)
{
    for (auto it = j.begin(); it != j.end(); ++it)
        if (!allowed.count(it.key()))
            throw ConfigError(where + ": unknown key '" + it.key() + "'");
}

const json& require(const json& j, const char* key, const std::string& where)
{
    if (!j.contains(key))
        throw ConfigError(where + ": missing key '" + key + "'");
    return j.at(key);
}

double number(const json& j, const char* key, const std::string& where)
{
    const json& v = require(j, key, where);
    if (!v.is_number())
        throw ConfigError(where + ": '" + key + "' must be a number");
    const double d = v.get<double>();
    if (!std::isfinite(d))
        throw ConfigError(where + ": '" + key + "' must be finite");
    return d;
}

Point point(const json& v, const std::string& where)
{
    if (!v.is_array() || v.size() != 2 || !v[0].is_number() || !v[1].is_number())
        throw ConfigError(where + ": expected a point [x, y]");
    return {v[0].get<double>(), v[1].get<double>()};
}

std::vector<Point> points(const json& v, const std::string& where)
{
    if (!v.is_array())
        throw ConfigError(where + ": expected an array of points");
    std::vector<Point> out;
    for (const auto& p : v)
        out.push_back(point(p, where));
    return out;
}

BoundaryCurve parse_arc(const json& j, const std::string& name, int nf)
{
    const std::string where = "arcs." + name;
    if (!j.is_object())
        throw ConfigError(where + ": expected an object");
    const std::string type = require(j, "type", where).get<std::string>();
    if (type == "polyline" || type == "tabulated") {
        const char* key = type == "polyline" ? "vertices" : "points";
        only_keys(j, {"type", key, "t0", "t1", "degree"}, where);
        if (type == "tabulated" && j.contains("degree") && j.at("degree") != 1)
            throw ConfigError(where + ": only spline degree 1 is supported for tabulated arcs");
        const double t0 = j.contains("t0") ? number(j, "t0", where) : 0.0;
        const double t1 = j.contains("t1") ? number(j, "t1", where) : t0;
        return make_polyline(name, points(require(j, key, where), where), nf, t0, t1);
    }
    if (type == "ellipse_arc") {
        only_keys(j, {"type", "center", "a", "b", "t0", "t1"}, where);
        return make_ellipse_arc(name, point(require(j, "center", where), where), number(j, "a", where),
                                number(j, "b", where), number(j, "t0", where), number(j, "t1", where), nf);
    }
    if (type == "circle_arc") {
        only_keys(j, {"type", "center", "radius", "t0", "t1"}, where);
        return make_circle_arc(name, point(require(j, "center", where), where), number(j, "radius", where),
                               number(j, "t0", where), number(j, "t1", where), nf);
    }
    throw ConfigError(where + ": unknown arc type '" + type + "'");
}

std::function<double(double)> parse_gamma(const json& j)
{
    if (j.is_number()) {
        const double g = j.get<double>();
        if (!(g > 0.0) || !std::isfinite(g))
            throw ConfigError("gamma must be positive (got " + j.dump() + ")");
        return [g](double) { return g; };
    }
    if (j.is_object()) {
        only_keys(j, {"table"}, "gamma");
        const json& table = require(j, "table", "gamma");
        if (!table.is_array() || table.empty())
            throw ConfigError("gamma.table must be a nonempty array");
        struct Piece {
            double from, to, value;
        };
        std::vector<Piece> pieces;
        for (const auto& e : table) {
            only_keys(e, {"from", "to", "value"}, "gamma.table");
            Piece p{number(e, "from", "gamma.table"), number(e, "to", "gamma.table"),
                    number(e, "value", "gamma.table")};
            if (!(p.to > p.from))
                throw ConfigError("gamma.table: empty interval");
            if (!(p.value > 0.0))
                throw ConfigError("gamma must be positive on every table interval");
            pieces.push_back(p);
        }
        return [pieces](double t) {
            for (const auto& p : pieces)
                if (t >= p.from && t <= p.to)
                    return p.value;
            return std::numeric_limits<double>::quiet_NaN(); // uncovered: rejected by validate
        };
    }
    throw ConfigError("gamma must be a number or {\"table\": [...]}");
}

} // namespace

ProblemSpec load_spec(const std::string& config_text, RunSettings* settings)
{
    json j;
    try {
        j = json::parse(config_text);
    } catch (const json::parse_error& e) {
        throw ConfigError(std::string("malformed config: ") + e.what());
    }
    if (!j.is_object())
        throw ConfigError("config must be a JSON object");
    only_keys(j, {"example", "gamma", "nf", "arcs", "basis_frequency", "imaging_bounds", "levels", "measure"},
              "config");

    try {
        const int nf = j.contains("nf") ? j.at("nf").get<int>() : 300;
        if (nf < 1)
            throw ConfigError("nf must be positive");
        if (j.contains("measure")) {
            const Measure m = parse_measure(j.at("measure").get<std::string>());
            if (settings)
                settings->measure = m;
        }

        ProblemSpec spec;
        if (j.contains("example")) {
            if (j.contains("arcs"))
                throw ConfigError("config: 'example' and 'arcs' are mutually exclusive");
            const int id = j.at("example").get<int>();
            const json gamma = j.contains("gamma") ? j.at("gamma") : json(0.5);
            if (!gamma.is_number())
                throw ConfigError("gamma tables need explicit arcs; examples take a constant gamma");
            parse_gamma(gamma); // positivity
            spec = make_example(id, nf, gamma.get<double>());
        } else {
            const json& arcs = require(j, "arcs", "config");
            only_keys(arcs, {"gamma_N", "gamma_D", "gamma_C"}, "arcs");
            spec.gamma_n = parse_arc(require(arcs, "gamma_N", "arcs"), "Gamma_N", nf);
            spec.gamma_d = parse_arc(require(arcs, "gamma_D", "arcs"), "Gamma_D", nf);
            spec.gamma_c = parse_arc(require(arcs, "gamma_C", "arcs"), "Gamma_C", nf);
            spec.gamma = parse_gamma(require(j, "gamma", "config"));

            std::vector<Point> outer, inner;
            for (const auto& p : spec.gamma_n.sample(512))
                outer.push_back(p);
            inner = outer;
            outer.pop_back();
            inner.pop_back();
            for (const auto& p : spec.gamma_d.sample(512))
                outer.push_back(p);
            for (const auto& p : spec.gamma_c.sample(512))
                inner.push_back(p);
            outer.pop_back();
            inner.pop_back();
            spec.in_domain = [outer](const Point& z) { return winding_number(outer, z) != 0; };
            spec.region = [outer, inner](const Point& z) {
                if (winding_number(outer, z) == 0)
                    return Region::Outside;
                return winding_number(inner, z) != 0 ? Region::Healthy : Region::Omega;
            };
            spec.basis_frequency =
                2.0 * std::numbers::pi / (spec.gamma_n.t_end() - spec.gamma_n.t_begin());
            Point lo = outer.front(), hi = lo;
            for (const auto& p : outer) {
                lo = lo.cwiseMin(p);
                hi = hi.cwiseMax(p);
            }
            spec.imaging_bounds = {lo.x(), hi.x(), lo.y(), hi.y()};
        }

        if (j.contains("basis_frequency"))
            spec.basis_frequency = number(j, "basis_frequency", "config");
        if (j.contains("imaging_bounds")) {
            const auto b = j.at("imaging_bounds").get<std::vector<double>>();
            if (b.size() != 4)
                throw ConfigError("imaging_bounds must be [xmin, xmax, ymin, ymax]");
            spec.imaging_bounds = {b[0], b[1], b[2], b[3]};
        }
        if (j.contains("levels")) {
            const json& l = j.at("levels");
            only_keys(l, {"fmreg", "lsmreg"}, "levels");
            if (l.contains("fmreg"))
                spec.fm_level = number(l, "fmreg", "levels");
            if (l.contains("lsmreg"))
                spec.lsm_level = number(l, "lsmreg", "levels");
        }
        json canonical = j;
        canonical["nf"] = nf;
        if (canonical.contains("example")) {
            // match make_example's description so both routes hash alike
            canonical["gamma"] = canonical.contains("gamma") ? canonical["gamma"].get<double>() : 0.5;
        }
        spec.description = canonical.dump();
        validate(spec);
        return spec;
    } catch (const json::exception& e) {
        throw ConfigError(std::string("config has a value of the wrong type: ") + e.what());
    }
}

ProblemSpec load_spec_file(const std::filesystem::path& path, RunSettings* settings)
{
    std::ifstream in(path);
    if (!in)
        throw ConfigError("cannot read config file " + path.string());
    std::ostringstream text;
    text << in.rdbuf();
    return load_spec(text.str(), settings);
}

} // namespace corrosion
