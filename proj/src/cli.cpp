#include "qtube/cli.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <iostream>
#include <set>
#include <sstream>

#include <json.hpp>

#include "qtube/errors.hpp"

namespace qtube {

using nlohmann::json;

std::string format_number(double x)
{
    if (std::isnan(x)) return "nan";
    if (std::isinf(x)) return x > 0 ? "inf" : "-inf";
    char buf[64];
    std::snprintf(buf, sizeof buf, "%.12g", x);
    return buf;
}

DuctGeometry RunConfig::duct() const
{
    if (!geometry) throw InvalidArgument("config: no geometry");
    return rounding ? round_corners(*geometry, *rounding) : *geometry;
}

namespace {

void check_keys(const json& j, const std::set<std::string>& allowed, const std::string& where)
{
    for (auto it = j.begin(); it != j.end(); ++it)
        if (!allowed.count(it.key())) throw InvalidArgument("config: unknown key '" + it.key() + "' in " + where);
}

double positive(const json& j, const char* key)
{
    const double v = j.at(key).get<double>();
    if (!(v > 0.0)) throw InvalidArgument(std::string("config: '") + key + "' must be positive");
    return v;
}

} // namespace

RunConfig parse_run_config(const std::string& json_text, const std::filesystem::path& base_dir)
{
    json j;
    try {
        j = json::parse(json_text);
    } catch (const json::exception& e) {
        throw InvalidArgument(std::string("config: malformed JSON: ") + e.what());
    }
    if (!j.is_object()) throw InvalidArgument("config: top level must be an object");
    RunConfig c;
    c.source = j.dump();
    try {
        check_keys(j, {"geometry", "rounding", "k2", "N", "L", "splitter", "tolerances", "output", "workers",
                       "verbosity", "mufield", "cuts", "verify"},
                   "config");
        if (!j.contains("geometry")) throw InvalidArgument("config: 'geometry' is required");
        const json& g = j.at("geometry");
        if (g.is_string()) {
            std::filesystem::path p = g.get<std::string>();
            if (p.is_relative() && !base_dir.empty()) p = base_dir / p;
            c.geometry_path = p;
            c.geometry = load_geometry(p);
        } else if (g.is_object()) {
            c.geometry = parse_geometry(g.dump());
        } else {
            throw InvalidArgument("config: 'geometry' must be a path or an object");
        }
        if (j.contains("rounding")) c.rounding = positive(j, "rounding");

        if (j.contains("k2")) {
            const json& k = j.at("k2");
            if (k.is_number()) {
                c.k2 = {k.get<double>()};
            } else if (k.is_array()) {
                c.k2 = k.get<std::vector<double>>();
            } else if (k.is_object()) {
                check_keys(k, {"min", "max", "count"}, "k2");
                const double lo = k.at("min").get<double>();
                const double hi = k.at("max").get<double>();
                const int n = k.at("count").get<int>();
                if (n < 1) throw InvalidArgument("config: k2 count must be at least 1");
                if (hi < lo) throw InvalidArgument("config: k2 max below min");
                for (int i = 0; i < n; ++i) c.k2.push_back(n == 1 ? lo : lo + (hi - lo) * i / (n - 1));
            } else {
                throw InvalidArgument("config: 'k2' must be a number, a list or {min, max, count}");
            }
        }
        for (double k : c.k2)
            if (!std::isfinite(k)) throw InvalidArgument("config: k2 values must be finite");

        if (j.contains("N")) {
            const json& n = j.at("N");
            c.N = n.is_array() ? n.get<std::vector<int>>() : std::vector<int>{n.get<int>()};
        }
        for (int n : c.N)
            if (n < 1) throw InvalidArgument("config: N must be at least 1");
        if (j.contains("L")) c.L = j.at("L").get<int>();
        if (c.L < 0) throw InvalidArgument("config: L must be non-negative");

        if (j.contains("splitter")) {
            const json& s = j.at("splitter");
            check_keys(s, {"scale", "center"}, "splitter");
            if (s.contains("scale")) c.pipeline.splitter_scale = positive(s, "scale");
            if (s.contains("center")) c.pipeline.splitter_center = s.at("center").get<double>();
        }
        if (j.contains("tolerances")) {
            const json& t = j.at("tolerances");
            check_keys(t, {"ode_rtol", "ode_atol", "flat_threshold", "map_residual", "quadrature", "profile", "bound",
                           "flux"},
                       "tolerances");
            if (t.contains("ode_rtol")) c.pipeline.solve.rtol = positive(t, "ode_rtol");
            if (t.contains("ode_atol")) c.pipeline.solve.atol = positive(t, "ode_atol");
            if (t.contains("flat_threshold")) {
                c.pipeline.solve.flat_threshold = positive(t, "flat_threshold");
                c.pipeline.profile.flat_threshold = c.pipeline.solve.flat_threshold;
            }
            if (t.contains("map_residual")) c.pipeline.map.residual_tol = positive(t, "map_residual");
            if (t.contains("quadrature")) c.pipeline.map.quad_tol = positive(t, "quadrature");
            if (t.contains("profile")) c.pipeline.profile.tolerance = positive(t, "profile");
            if (t.contains("bound")) c.pipeline.solve.bound = positive(t, "bound");
            if (t.contains("flux")) c.flux_tolerance = positive(t, "flux");
        }
        if (j.contains("output")) c.output = j.at("output").get<std::string>();
        if (j.contains("workers")) c.workers = j.at("workers").get<int>();
        if (c.workers < 1) throw InvalidArgument("config: workers must be at least 1");
        if (j.contains("verbosity")) c.verbosity = j.at("verbosity").get<int>();

        if (j.contains("mufield")) {
            const json& m = j.at("mufield");
            check_keys(m, {"u_min", "u_max", "nu", "nv"}, "mufield");
            if (m.contains("u_min")) c.u_min = m.at("u_min").get<double>();
            if (m.contains("u_max")) c.u_max = m.at("u_max").get<double>();
            if (m.contains("nu")) c.nu = m.at("nu").get<int>();
            if (m.contains("nv")) c.nv = m.at("nv").get<int>();
            if (c.nu < 1 || c.nv < 1) throw InvalidArgument("config: mufield lattice must be non-empty");
            if (c.u_min && c.u_max && *c.u_max < *c.u_min) throw InvalidArgument("config: mufield u_max below u_min");
        }
        if (j.contains("cuts")) c.cuts = j.at("cuts").get<std::vector<double>>();
        if (j.contains("verify")) c.verify = j.at("verify").get<bool>();
    } catch (const json::exception& e) {
        throw InvalidArgument(std::string("config: ") + e.what());
    }
    if (c.rounding) (void)c.duct();
    return c;
}

RunConfig load_run_config(const std::filesystem::path& path)
{
    std::ifstream in(path);
    if (!in) throw InvalidArgument("config: cannot open " + path.string());
    std::stringstream buf;
    buf << in.rdbuf();
    return parse_run_config(buf.str(), path.parent_path());
}

namespace {

struct Row {
    double k2 = 0.0;
    int N = 0;
    bool ok = false;
    std::string error;
    bool bound = false;
    double bound_u = NAN;
    ScatteringSet S;
    double flux = NAN;
    double condition = NAN;
    double difference = NAN;
};

std::string clean(std::string s)
{
    std::replace(s.begin(), s.end(), ',', ';');
    std::replace(s.begin(), s.end(), '\n', ' ');
    return s;
}

void header(std::ostream& out, const char* cmd, const RunConfig& cfg)
{
    out << "# qtube " << cmd << "\n";
    out << "# config " << cfg.source << "\n";
    if (cfg.geometry) out << "# geometry " << json::parse(geometry_to_json(cfg.duct())).dump() << "\n";
}

void log(const RunConfig& cfg, int level, const std::string& msg)
{
    if (cfg.verbosity >= level) std::cerr << msg << "\n";
}

template <class Solve>
Row run_row(double k2, int N, Solve&& solve)
{
    Row r;
    r.k2 = k2;
    r.N = N;
    try {
        solve(r);
        r.flux = flux_residual(r.S);
        r.ok = true;
    } catch (const BoundStateError& e) {
        r.bound = true;
        r.bound_u = e.location();
        r.error = e.what();
    } catch (const Error& e) {
        r.error = e.what();
    }
    return r;
}

int single_N(const RunConfig& cfg)
{
    if (cfg.N.size() != 1) throw InvalidArgument("config: this command needs exactly one N");
    if (cfg.k2.empty()) throw InvalidArgument("config: 'k2' is required");
    return cfg.N.front();
}

int write_rows(const RunConfig& cfg, const std::vector<Row>& rows, std::ostream& out, bool cascade)
{
    int open_left = 0;
    int open_right = 0;
    for (const Row& r : rows)
        if (r.ok) {
            open_left = std::max(open_left, r.S.propagating_left());
            open_right = std::max(open_right, r.S.propagating_right());
        }
    out << "k2,N,status,open_left,open_right,flux_residual,flux_flag,bound_state,bound_u";
    if (cascade) out << ",condition" << (cfg.verify ? ",unsplit_difference" : "");
    for (int n = 1; n <= open_right; ++n)
        for (int m = 1; m <= open_left; ++m) out << ",T_" << n << "_" << m << "_abs2,T_" << n << "_" << m << "_phase";
    for (int n = 1; n <= open_left; ++n)
        for (int m = 1; m <= open_left; ++m) out << ",R_" << n << "_" << m << "_abs2,R_" << n << "_" << m << "_phase";
    out << ",error\n";
    int failed = 0;
    for (const Row& r : rows) {
        const int pl = r.ok ? r.S.propagating_left() : 0;
        const int pr = r.ok ? r.S.propagating_right() : 0;
        out << format_number(r.k2) << "," << r.N << "," << (r.ok ? "ok" : "failed") << "," << pl << "," << pr << ","
            << format_number(r.flux) << "," << (r.ok && !(r.flux <= cfg.flux_tolerance) ? 1 : 0) << ","
            << (r.bound ? 1 : 0) << "," << format_number(r.bound_u);
        if (cascade) {
            out << "," << format_number(r.condition);
            if (cfg.verify) out << "," << format_number(r.difference);
        }
        auto cell = [&](bool open, cplx v) {
            if (open)
                out << "," << format_number(std::norm(v)) << "," << format_number(std::arg(v));
            else
                out << ",,";
        };
        for (int n = 1; n <= open_right; ++n)
            for (int m = 1; m <= open_left; ++m) {
                const bool open = n <= pr && m <= pl;
                cell(open, open ? transmission_amplitude(r.S, n, m) : cplx());
            }
        for (int n = 1; n <= open_left; ++n)
            for (int m = 1; m <= open_left; ++m) {
                const bool open = n <= pl && m <= pl;
                cell(open, open ? reflection_amplitude(r.S, n, m) : cplx());
            }
        out << "," << clean(r.error) << "\n";
        if (!r.ok) ++failed;
    }
    return failed > 0 ? 1 : 0;
}

} // namespace

int cmd_solve(const RunConfig& cfg, std::ostream& out)
{
    const int N = single_N(cfg);
    const TubeModel model(cfg.duct(), std::max(cfg.L, 2 * N), cfg.pipeline);
    log(cfg, 1, "qtube: profile ready (" + std::to_string(model.profile().pieces().size()) + " pieces)");
    std::vector<Row> rows(cfg.k2.size());
    parallel_for(static_cast<int>(rows.size()), cfg.workers, [&](int i) {
        const double k2 = cfg.k2[static_cast<std::size_t>(i)];
        rows[static_cast<std::size_t>(i)] = run_row(k2, N, [&](Row& r) { r.S = model.solve(k2, N).S; });
        log(cfg, 2, "qtube: k2 = " + format_number(k2) + " done");
    });
    header(out, "solve", cfg);
    out << "# amplitudes are flux-normalized; T_n_m: left mode m -> right mode n, R_n_m: left mode m -> left mode n\n";
    return write_rows(cfg, rows, out, false);
}

int cmd_compose(const RunConfig& cfg, std::ostream& out)
{
    const int N = single_N(cfg);
    const DuctGeometry geom = cfg.duct();
    const CascadePlan plan = partition_geometry(geom, cfg.cuts);
    const int L = std::max(cfg.L, 2 * N);
    const CascadeModel cascade(plan, L, cfg.pipeline, cfg.workers);
    std::optional<TubeModel> whole;
    if (cfg.verify) whole.emplace(geom, L, cfg.pipeline);
    std::vector<Row> rows(cfg.k2.size());
    parallel_for(static_cast<int>(rows.size()), cfg.workers, [&](int i) {
        const double k2 = cfg.k2[static_cast<std::size_t>(i)];
        rows[static_cast<std::size_t>(i)] = run_row(k2, N, [&](Row& r) {
            PlacedScattering C = cascade.solve(k2, N, &r.condition);
            if (whole) {
                PlacedScattering W = whole->solve(k2, N);
                const double xl = std::min(C.x_left, W.x_left);
                const double xr = std::max(C.x_right, W.x_right);
                C = move_planes(C, xl, xr);
                W = move_planes(W, xl, xr);
                r.difference = max_difference(C.S, W.S);
            }
            r.S = C.S;
        });
    });
    header(out, "compose", cfg);
    out << "# parts " << plan.parts.size() << "\n";
    out << "# amplitudes are flux-normalized; T_n_m: left mode m -> right mode n, R_n_m: left mode m -> left mode n\n";
    return write_rows(cfg, rows, out, true);
}

int cmd_converge(const RunConfig& cfg, std::ostream& out)
{
    if (cfg.N.size() < 2) throw InvalidArgument("config: converge needs at least two values of N");
    if (cfg.k2.empty()) throw InvalidArgument("config: 'k2' is required");
    const int Nmax = *std::max_element(cfg.N.begin(), cfg.N.end());
    const TubeModel model(cfg.duct(), std::max(cfg.L, 2 * Nmax), cfg.pipeline);
    const std::size_t nN = cfg.N.size();
    std::vector<Row> rows(cfg.k2.size() * nN);
    parallel_for(static_cast<int>(rows.size()), cfg.workers, [&](int i) {
        const double k2 = cfg.k2[static_cast<std::size_t>(i) / nN];
        const int N = cfg.N[static_cast<std::size_t>(i) % nN];
        rows[static_cast<std::size_t>(i)] = run_row(k2, N, [&](Row& r) { r.S = model.solve(k2, N).S; });
    });
    header(out, "converge", cfg);
    out << "k2,N,status,T11_abs,T11_abs2,R11_abs,difference,flux_residual,error\n";
    const double floor = 10.0 * cfg.pipeline.solve.rtol;
    bool monotone = true;
    bool failed = false;
    for (std::size_t e = 0; e < cfg.k2.size(); ++e) {
        double prev_value = NAN;
        double prev_diff = NAN;
        for (std::size_t k = 0; k < nN; ++k) {
            const Row& r = rows[e * nN + k];
            double t = NAN, t2 = NAN, rr = NAN, diff = NAN;
            if (r.ok && r.S.propagating_left() > 0 && r.S.propagating_right() > 0) {
                t = std::abs(transmission_amplitude(r.S, 1, 1));
                t2 = t * t;
                rr = std::abs(reflection_amplitude(r.S, 1, 1));
            }
            if (!r.ok) failed = true;
            if (!std::isnan(prev_value)) {
                diff = std::abs(t - prev_value);
                if (!std::isnan(prev_diff) && !(diff <= prev_diff || diff < floor)) monotone = false;
                prev_diff = diff;
            }
            prev_value = t;
            out << format_number(r.k2) << "," << r.N << "," << (r.ok ? "ok" : "failed") << "," << format_number(t)
                << "," << format_number(t2) << "," << format_number(rr) << "," << format_number(diff) << ","
                << format_number(r.flux) << "," << clean(r.error) << "\n";
        }
    }
    out << "# monotone " << (monotone ? "yes" : "no") << " (differences below " << format_number(floor)
        << " count as converged)\n";
    return (failed || !monotone) ? 1 : 0;
}

int cmd_mufield(const RunConfig& cfg, std::ostream& out)
{
    const DuctGeometry geom = cfg.duct();
    const StripMap map = geom.has_corners()
                             ? solve_strip_map(geom, cfg.pipeline.map)
                             : StripMap::identity(geom.width_left(), geom.points(Wall::lower).front().imag());
    const double a = map.width();
    double lo = -2.0 * a, hi = 2.0 * a;
    if (!map.is_identity()) {
        const auto [p, q] = map.prevertex_range();
        lo = p - 2.0 * a;
        hi = q + 2.0 * a;
    }
    if (cfg.u_min) lo = *cfg.u_min;
    if (cfg.u_max) hi = *cfg.u_max;
    out << "# qtube mufield\n";
    out << "# config " << cfg.source << "\n";
    out << "# nu " << cfg.nu << " nv " << cfg.nv << " u_min " << format_number(lo) << " u_max " << format_number(hi)
        << " v_min " << format_number(a / (cfg.nv + 1)) << " v_max " << format_number(a * cfg.nv / (cfg.nv + 1))
        << "\n";
    out << "# rows: v ascending; columns: u ascending; mu_minus " << format_number(map.mu_minus()) << " mu_plus "
        << format_number(map.mu_plus()) << "\n";
    std::vector<std::string> lines(static_cast<std::size_t>(cfg.nv));
    parallel_for(cfg.nv, cfg.workers, [&](int j) {
        const double v = a * (j + 1) / (cfg.nv + 1);
        std::string line;
        for (int i = 0; i < cfg.nu; ++i) {
            const double u = cfg.nu == 1 ? lo : lo + (hi - lo) * i / (cfg.nu - 1);
            if (i) line += ",";
            line += format_number(map.mu(u, v));
        }
        lines[static_cast<std::size_t>(j)] = std::move(line);
    });
    for (const auto& l : lines) out << l << "\n";
    return 0;
}

} // namespace qtube
