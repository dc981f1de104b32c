#include "kcut/cli.hpp"

#include <algorithm>
#include <atomic>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <functional>
#include <limits>
#include <mutex>
#include <random>
#include <thread>

#include "kcut/cuts.hpp"
#include "kcut/errors.hpp"
#include "kcut/toric.hpp"

namespace kcut::cli {

namespace {

constexpr double kTwoPi = 6.283185307179586476925286766559;

[[noreturn]] void config_fail(const std::string& what)
{
    fail(ErrorCode::config_error, "run", what);
}

double jget_num(const Json& j, const char* key, double def, bool required = false)
{
    if (!j.contains(key)) {
        if (required) config_fail(std::string("missing field '") + key + "'");
        return def;
    }
    if (!j[key].is_number()) config_fail(std::string("field '") + key + "' must be a number");
    return j[key].get<double>();
}

std::string jget_str(const Json& j, const char* key, const std::string& def, bool required = false)
{
    if (!j.contains(key)) {
        if (required) config_fail(std::string("missing field '") + key + "'");
        return def;
    }
    if (!j[key].is_string()) config_fail(std::string("field '") + key + "' must be a string");
    return j[key].get<std::string>();
}

RadialSpec parse_radial(const Json& j)
{
    RadialSpec spec;
    spec.kind = jget_str(j, "kind", "", true);
    spec.a0 = jget_num(j, "a0", 1.0);
    spec.kappa = jget_num(j, "kappa", 1.0);
    spec.t_max = jget_num(j, "t_max", 10.0);
    if (j.contains("coeffs")) {
        if (!j["coeffs"].is_array()) config_fail("radial coeffs must be an array");
        for (const auto& c : j["coeffs"]) spec.coeffs.push_back(c.get<double>());
    }
    return spec;
}

ComplexPoint parse_point(const Json& j)
{
    if (!j.is_array()) config_fail("point must be an array of [re, im] pairs");
    ComplexPoint p;
    for (const auto& c : j) {
        if (!c.is_array() || c.size() != 2) config_fail("coordinate must be [re, im]");
        p.coords.emplace_back(c[0].get<double>(), c[1].get<double>());
    }
    return p;
}

// Builds a CutProblem + chart either from a named example or from explicit
// pieces (potential, weights, level, radial, probes).
std::pair<CutProblem, CutChart> parse_cut_problem(const Json& j)
{
    if (j.contains("example")) {
        const Json& ex = j["example"];
        ExampleParams par;
        par.n = static_cast<std::size_t>(jget_num(ex, "n", 1));
        par.lambda = jget_num(ex, "lambda", 1.0, true);
        par.kappa = jget_num(ex, "kappa", 1.0);
        return example_problem(example_from_string(jget_str(ex, "name", "", true)), par);
    }

    std::string potname = jget_str(j, "potential", "", true);
    if (!j.contains("weights") || !j["weights"].is_array())
        config_fail("explicit problem needs a weights array");
    std::vector<int> weights;
    for (const auto& w : j["weights"]) weights.push_back(w.get<int>());
    std::size_t n = weights.size();

    ToricPotential pot;
    if (potname == "flat") pot = toric_flat(n);
    else if (potname == "fs") pot = toric_fs(n, jget_num(j, "fs_scale", static_cast<double>(n) + 1.0));
    else config_fail("unknown potential '" + potname + "'");

    if (!j.contains("radial")) config_fail("explicit problem needs a radial spec");
    RadialPotential radial = make_radial(parse_radial(j["radial"]));
    double level = jget_num(j, "level", 0.0, true);

    if (!j.contains("probes") || !j["probes"].is_array() || j["probes"].empty())
        config_fail("explicit problem needs probe points");
    std::vector<ComplexPoint> probes;
    for (const auto& pr : j["probes"]) probes.push_back(parse_point(pr));

    std::optional<double> kappa, c;
    if (j.contains("kappa")) kappa = j["kappa"].get<double>();
    if (j.contains("c")) c = j["c"].get<double>();

    CutProblem p = make_cut_problem(std::move(pot), std::move(weights), level, radial, probes,
                                    kappa, c);
    CutChart chart = make_chart(p);
    return {std::move(p), std::move(chart)};
}

PolyhedralSet parse_polytope(const Json& j)
{
    std::size_t k = static_cast<std::size_t>(jget_num(j, "dimension", 0, true));
    if (!j.contains("constraints") || !j["constraints"].is_array())
        config_fail("polytope needs a constraints array");
    std::vector<HalfSpace> hs;
    for (const auto& c : j["constraints"]) {
        HalfSpace h;
        if (!c.contains("normal") || !c["normal"].is_array())
            config_fail("constraint needs an integer normal");
        for (const auto& v : c["normal"]) h.normal.push_back(v.get<std::int64_t>());
        h.offset = Rational::from_double(jget_num(c, "offset", 0.0, true));
        hs.push_back(std::move(h));
    }
    return make_polyhedral_set(k, std::move(hs));
}

// map a function over grid points with a bounded worker pool; record order
// is the grid order regardless of the worker count
std::vector<Record> parallel_map(std::size_t count, int workers,
                                 const std::function<Record(std::size_t)>& fn)
{
    std::vector<Record> out(count);
    if (count == 0) return out;
    workers = std::max(1, std::min<int>(workers, static_cast<int>(count)));
    if (workers == 1) {
        for (std::size_t i = 0; i < count; ++i) out[i] = fn(i);
        return out;
    }
    std::atomic<std::size_t> next{0};
    std::vector<std::thread> pool;
    std::exception_ptr first_error;
    std::mutex err_mutex;
    for (int w = 0; w < workers; ++w) {
        pool.emplace_back([&]() {
            for (;;) {
                std::size_t i = next.fetch_add(1);
                if (i >= count) return;
                try {
                    out[i] = fn(i);
                } catch (...) {
                    std::lock_guard<std::mutex> lock(err_mutex);
                    if (!first_error) first_error = std::current_exception();
                    return;
                }
            }
        });
    }
    for (std::thread& t : pool) t.join();
    if (first_error) std::rethrow_exception(first_error);
    return out;
}

std::vector<ComplexPoint> grid_points(const GridSpec& grid)
{
    const std::size_t n = grid.center.size();
    std::vector<ComplexPoint> pts;
    ComplexPoint center;
    for (auto [re, im] : grid.center) center.coords.emplace_back(re, im);
    const int s = grid.samples;
    auto offset = [&](int i) {
        return (s == 1) ? 0.0 : -grid.extent + 2.0 * grid.extent * i / (s - 1);
    };
    for (int i = 0; i < s; ++i) {
        for (int j = 0; j < s; ++j) {
            ComplexPoint p = center;
            if (n == 1) {
                p[0] += Complex(offset(i), offset(j));
            } else {
                p[0] += Complex(offset(i), 0.0);
                p[1] += Complex(offset(j), 0.0);
            }
            pts.push_back(std::move(p));
        }
    }
    return pts;
}

void push(Record& r, double v) { r.cells.emplace_back(round_wire(v)); }
void push(Record& r, std::int64_t v) { r.cells.emplace_back(v); }
void push(Record& r, const std::string& v) { r.cells.emplace_back(v); }

void summary_num(Json& s, const char* key, double v) { s[key] = round_wire(v); }

// --- command pipelines -----------------------------------------------------

RunReport run_radial_check(const RunConfig& cfg)
{
    RunReport rep;
    rep.command = cfg.command;
    rep.columns = {"t", "F", "H", "H1"};
    if (!cfg.problem.contains("radial")) config_fail("radial-check needs a radial spec");
    RadialPotential pot = make_radial(parse_radial(cfg.problem["radial"]));
    MomentProfile mp = moment_profile(pot);

    double hi = cfg.grid.extent > 0.0 ? cfg.grid.extent : 10.0;
    int samples = std::max(2, cfg.grid.samples * cfg.grid.samples);
    std::vector<double> ts;
    for (int i = 0; i < samples; ++i)
        ts.push_back(hi * static_cast<double>(i) / (samples - 1));

    SymplecticVerdict v = check_symplectic(pot, ts);
    for (double t : ts) {
        Record r;
        push(r, t);
        push(r, pot.F(t));
        push(r, mp.H(t));
        push(r, mp.H1(t));
        rep.records.push_back(std::move(r));
    }
    rep.summary["symplectic"] = v.symplectic;
    if (!v.symplectic) summary_num(rep.summary, "fails_at", v.fails_at);
    if (std::isinf(mp.cap_a)) rep.summary["cap_a"] = "inf";
    else summary_num(rep.summary, "cap_a", mp.cap_a);
    rep.summary["cap_estimated"] = mp.cap_estimated;
    rep.pass = v.symplectic;
    rep.summary["pass"] = rep.pass;
    return rep;
}

RunReport run_cut_grid(const RunConfig& cfg)
{
    RunReport rep;
    rep.command = cfg.command;
    auto [p, chart] = parse_cut_problem(cfg.problem);
    const std::size_t n = p.weights.size();
    if (cfg.grid.center.size() != n) config_fail("grid center dimension != chart dimension");

    rep.columns = {};
    for (std::size_t j = 0; j < n; ++j) {
        rep.columns.push_back("zeta" + std::to_string(j) + "_re");
        rep.columns.push_back("zeta" + std::to_string(j) + "_im");
    }
    rep.columns.push_back("u");
    rep.columns.push_back("rho_lambda");
    for (std::size_t a = 0; a < n; ++a)
        for (std::size_t b = 0; b < n; ++b) {
            rep.columns.push_back("omega_" + std::to_string(a) + std::to_string(b) + "_re");
            rep.columns.push_back("omega_" + std::to_string(a) + std::to_string(b) + "_im");
        }
    rep.columns.push_back("min_eig");
    rep.columns.push_back("v_eff");

    std::vector<ComplexPoint> pts = grid_points(cfg.grid);
    const CutProblem& pr = p;
    const CutChart& ch = chart;
    double min_eig_all = std::numeric_limits<double>::infinity();
    std::vector<Record> recs = parallel_map(pts.size(), cfg.workers, [&](std::size_t i) {
        const ComplexPoint& zeta = pts[i];
        Record r;
        for (std::size_t j = 0; j < n; ++j) {
            push(r, zeta[j].real());
            push(r, zeta[j].imag());
        }
        double u = ch.w_solver(zeta);
        push(r, u);
        push(r, reduced_potential(pr, ch, zeta));
        OneOneForm w = ddbar(reduced_potential_field(pr, ch), zeta);
        for (std::size_t idx = 0; idx < w.coeffs.size(); ++idx) {
            push(r, w.coeffs[idx].real());
            push(r, w.coeffs[idx].imag());
        }
        push(r, hermitian_eigenvalues(w).front());
        push(r, v_eff(pr, ch, zeta));
        return r;
    });
    for (const Record& r : recs) {
        double me = std::get<double>(r.cells[2 * n + 2 + 2 * n * n]);
        min_eig_all = std::min(min_eig_all, me);
    }
    rep.records = std::move(recs);
    summary_num(rep.summary, "min_eigenvalue", min_eig_all);
    rep.pass = min_eig_all > 0.0;
    rep.summary["pass"] = rep.pass;
    return rep;
}

RunReport run_map_g(const RunConfig& cfg)
{
    RunReport rep;
    rep.command = cfg.command;
    auto [p, chart] = parse_cut_problem(cfg.problem);
    const std::size_t n = p.weights.size();
    if (cfg.grid.center.size() != n) config_fail("grid center dimension != chart dimension");
    double tol = cfg.tolerance > 0.0 ? cfg.tolerance : 1e-9;

    rep.columns = {};
    for (std::size_t j = 0; j < n; ++j) {
        rep.columns.push_back("q" + std::to_string(j) + "_re");
        rep.columns.push_back("q" + std::to_string(j) + "_im");
    }
    rep.columns.push_back("path_dist");
    rep.columns.push_back("equivariance_dist");
    rep.columns.push_back("pullback_dist");

    std::vector<ComplexPoint> all = grid_points(cfg.grid);
    std::vector<ComplexPoint> pts;
    for (ComplexPoint& q : all)
        if (moment_map(p, q) < p.level - 1e-6 &&
            p.level - moment_map(p, q) < moment_profile(p.radial).cap_a)
            pts.push_back(std::move(q));

    std::mt19937_64 rng(cfg.seed);
    std::uniform_real_distribution<double> ang(0.0, kTwoPi);
    std::vector<double> thetas(pts.size());
    for (double& th : thetas) th = ang(rng);

    const CutProblem& pr = p;
    const CutChart& ch = chart;
    std::vector<Record> recs = parallel_map(pts.size(), cfg.workers, [&](std::size_t i) {
        const ComplexPoint& q = pts[i];
        Record r;
        for (std::size_t j = 0; j < n; ++j) {
            push(r, q[j].real());
            push(r, q[j].imag());
        }
        ComplexPoint g1 = map_g(pr, q);
        ComplexPoint g2 = map_g_orbit_path(pr, q);
        double pd = 0.0;
        for (std::size_t j = 0; j < n; ++j) pd = std::max(pd, std::abs(g1[j] - g2[j]));
        push(r, pd);

        ComplexPoint qrot = q;
        for (std::size_t j = 0; j < n; ++j)
            qrot[j] *= std::polar(1.0, pr.weights[j] * thetas[i]);
        ComplexPoint grot = map_g(pr, qrot);
        double ed = 0.0;
        for (std::size_t j = 0; j < n; ++j)
            ed = std::max(ed, std::abs(grot[j] - g1[j] * std::polar(1.0, pr.weights[j] * thetas[i])));
        push(r, ed);
        push(r, pullback_defect(pr, ch, q));
        return r;
    });
    double max_path = 0.0, max_equiv = 0.0, max_pull = 0.0;
    for (const Record& r : recs) {
        max_path = std::max(max_path, std::get<double>(r.cells[2 * n]));
        max_equiv = std::max(max_equiv, std::get<double>(r.cells[2 * n + 1]));
        max_pull = std::max(max_pull, std::get<double>(r.cells[2 * n + 2]));
    }
    rep.records = std::move(recs);
    summary_num(rep.summary, "max_path_dist", max_path);
    summary_num(rep.summary, "max_equivariance_dist", max_equiv);
    summary_num(rep.summary, "max_pullback_dist", max_pull);
    rep.summary["points"] = static_cast<std::int64_t>(rep.records.size());
    rep.pass = !rep.records.empty() && max_path <= tol && max_equiv <= tol && max_pull <= 1e-5;
    rep.summary["pass"] = rep.pass;
    return rep;
}

RunReport run_einstein_check(const RunConfig& cfg)
{
    RunReport rep;
    rep.command = cfg.command;
    auto [p, chart] = parse_cut_problem(cfg.problem);
    const std::size_t n = p.weights.size();
    if (cfg.grid.center.size() != n) config_fail("grid center dimension != chart dimension");
    double tol = cfg.tolerance > 0.0 ? cfg.tolerance : 1e-4;

    rep.columns = {};
    for (std::size_t j = 0; j < n; ++j) {
        rep.columns.push_back("zeta" + std::to_string(j) + "_re");
        rep.columns.push_back("zeta" + std::to_string(j) + "_im");
    }
    rep.columns.push_back("residual");

    std::vector<ComplexPoint> pts = grid_points(cfg.grid);
    const CutProblem& pr = p;
    const CutChart& ch = chart;
    std::vector<Record> recs = parallel_map(pts.size(), cfg.workers, [&](std::size_t i) {
        Record r;
        for (std::size_t j = 0; j < n; ++j) {
            push(r, pts[i][j].real());
            push(r, pts[i][j].imag());
        }
        push(r, einstein_residual(pr, ch, pts[i]));
        return r;
    });
    double max_res = 0.0;
    for (const Record& r : recs)
        max_res = std::max(max_res, std::get<double>(r.cells[2 * n]));
    rep.records = std::move(recs);
    summary_num(rep.summary, "max_residual", max_res);
    rep.pass = max_res <= tol;
    rep.summary["pass"] = rep.pass;
    return rep;
}

RunReport run_veff(const RunConfig& cfg)
{
    RunReport rep;
    rep.command = cfg.command;
    if (!cfg.problem.contains("example")) config_fail("veff needs an example problem");
    const Json& ex = cfg.problem["example"];
    ExampleParams par;
    par.n = static_cast<std::size_t>(jget_num(ex, "n", 1));
    par.lambda = jget_num(ex, "lambda", 1.0, true);
    par.kappa = jget_num(ex, "kappa", 1.0);
    ExampleName name = example_from_string(jget_str(ex, "name", "", true));
    auto [p, chart] = example_problem(name, par);
    const std::size_t n = p.weights.size();
    if (cfg.grid.center.size() != n) config_fail("grid center dimension != chart dimension");
    double tol = cfg.tolerance > 0.0 ? cfg.tolerance : 1e-6;

    rep.columns = {"r", "v_eff", "v_eff_closed", "rel_err"};
    std::vector<ComplexPoint> pts = grid_points(cfg.grid);
    const CutProblem& pr = p;
    const CutChart& ch = chart;
    std::vector<Record> recs = parallel_map(pts.size(), cfg.workers, [&](std::size_t i) {
        double r2 = 0.0;
        for (const Complex& c : pts[i].coords) r2 += std::norm(c);
        double vnum = v_eff(pr, ch, pts[i]);
        double vcf = example_v_eff(name, par, r2);
        Record r;
        push(r, r2);
        push(r, vnum);
        push(r, vcf);
        push(r, std::fabs(vnum - vcf) / std::max(1e-300, std::fabs(vcf)));
        return r;
    });
    double max_rel = 0.0;
    for (const Record& r : recs) max_rel = std::max(max_rel, std::get<double>(r.cells[3]));
    rep.records = std::move(recs);
    summary_num(rep.summary, "max_rel_err", max_rel);
    rep.pass = max_rel <= tol;
    rep.summary["pass"] = rep.pass;
    return rep;
}

RunReport run_polytope(const RunConfig& cfg)
{
    RunReport rep;
    rep.command = cfg.command;
    Json pj;
    if (cfg.problem.contains("file")) {
        std::ifstream in(cfg.problem["file"].get<std::string>());
        if (!in) fail(ErrorCode::io_error, "run", "cannot read polytope file");
        Json doc = Json::parse(in, nullptr, false);
        if (doc.is_discarded()) config_fail("polytope file is not valid JSON");
        pj = doc;
    } else if (cfg.problem.contains("polytope")) {
        pj = cfg.problem["polytope"];
    } else {
        config_fail("polytope command needs 'file' or inline 'polytope'");
    }
    PolyhedralSet delta = parse_polytope(pj);

    rep.columns = {"face", "dim", "isotropy_rank"};
    std::vector<Face> faces = enumerate_faces(delta);
    for (const Face& f : faces) {
        std::string label;
        for (std::size_t j : f.active) {
            if (!label.empty()) label += ";";
            label += std::to_string(j);
        }
        if (label.empty()) label = "interior";
        Record r;
        push(r, label);
        push(r, static_cast<std::int64_t>(f.dim));
        push(r, static_cast<std::int64_t>(isotropy(delta, f).rank));
        rep.records.push_back(std::move(r));
    }
    rep.summary["faces"] = static_cast<std::int64_t>(faces.size());
    rep.pass = !faces.empty();
    rep.summary["pass"] = rep.pass;
    return rep;
}

RunReport run_stability(const RunConfig& cfg)
{
    RunReport rep;
    rep.command = cfg.command;
    const Json& pj = cfg.problem;

    std::size_t k = static_cast<std::size_t>(jget_num(pj, "k", 1));
    if (!pj.contains("weights") || !pj["weights"].is_array())
        config_fail("stability needs a weight matrix");
    IntMat wm;
    for (const auto& row : pj["weights"]) {
        IntVec r;
        for (const auto& v : row) r.push_back(v.get<std::int64_t>());
        wm.push_back(std::move(r));
    }
    std::size_t n = wm.empty() ? 0 : wm[0].size();
    std::string potname = jget_str(pj, "potential", "flat");
    ToricPotential pot = (potname == "fs")
        ? toric_fs(n, jget_num(pj, "fs_scale", static_cast<double>(n) + 1.0))
        : toric_flat(n);

    if (!pj.contains("factors") || !pj["factors"].is_array() || pj["factors"].size() != k)
        config_fail("stability needs one factor per torus rank");
    std::vector<XFactor> factors;
    for (const auto& fj : pj["factors"]) {
        RadialPotential rp = make_radial(parse_radial(fj));
        factors.push_back(radial_factor(rp, -1, jget_num(fj, "level", 0.0, true)));
    }
    PolyhedralSet delta = delta_from_factors(factors);
    TorusCutProblem p = make_torus_cut_problem(k, std::move(pot), std::move(wm),
                                               std::move(delta), std::move(factors));

    std::vector<std::pair<ComplexPoint, ComplexPoint>> points;
    if (pj.contains("points")) {
        for (const auto& pt : pj["points"]) {
            ComplexPoint m = parse_point(pt.at("m"));
            ComplexPoint x = pt.contains("x") ? parse_point(pt.at("x"))
                                              : ComplexPoint{std::vector<Complex>(k, Complex(1.0, 0.0))};
            points.emplace_back(std::move(m), std::move(x));
        }
    } else {
        int count = static_cast<int>(jget_num(pj, "samples", 10));
        std::mt19937_64 rng(cfg.seed);
        std::uniform_real_distribution<double> dist(-1.0, 1.0);
        for (int i = 0; i < count; ++i) {
            ComplexPoint m;
            for (std::size_t j = 0; j < n; ++j) m.coords.emplace_back(dist(rng), dist(rng));
            points.emplace_back(std::move(m),
                                ComplexPoint{std::vector<Complex>(k, Complex(1.0, 0.0))});
        }
    }

    rep.columns = {"index", "status", "residual", "iterations"};
    for (std::size_t a = 0; a < k; ++a) rep.columns.push_back("t" + std::to_string(a));
    if (k == 1) rep.columns.push_back("orbit_crossing_delta");

    double max_delta = 0.0;
    bool all_classified = true;
    for (std::size_t i = 0; i < points.size(); ++i) {
        Record r;
        push(r, static_cast<std::int64_t>(i));
        KempfNessResult kn;
        bool inconclusive = false;
        try {
            kn = kempf_ness_solve(p, points[i].first, points[i].second);
        } catch (const Error& e) {
            if (e.code() != ErrorCode::inconclusive) throw;
            inconclusive = true;
        }
        if (inconclusive) {
            all_classified = false;
            push(r, std::string("inconclusive"));
            push(r, 0.0);
            push(r, static_cast<std::int64_t>(0));
            for (std::size_t a = 0; a < k; ++a) push(r, 0.0);
            if (k == 1) push(r, 0.0);
            rep.records.push_back(std::move(r));
            continue;
        }
        push(r, std::string(kn.stable ? "stable" : "unstable"));
        push(r, kn.residual);
        push(r, static_cast<std::int64_t>(kn.iterations));
        for (std::size_t a = 0; a < k; ++a) push(r, kn.stable ? kn.t[a] : 0.0);
        if (k == 1) {
            double delta_t = 0.0;
            if (kn.stable && potname == "flat") {
                // cross-check against the circle-cut orbit crossing
                std::vector<int> weights;
                for (std::int64_t w : p.weight_matrix[0]) weights.push_back(static_cast<int>(w));
                try {
                    CutProblem cp = make_cut_problem(toric_flat(n), weights,
                                                     p.factors[0].offset,
                                                     p.factors[0].radial, {});
                    delta_t = std::fabs(kn.t[0] - orbit_crossing(cp, points[i].first));
                } catch (const Error&) {
                    delta_t = 0.0;
                }
            }
            push(r, delta_t);
            max_delta = std::max(max_delta, delta_t);
        }
        rep.records.push_back(std::move(r));
    }
    if (k == 1) summary_num(rep.summary, "max_orbit_crossing_delta", max_delta);
    rep.summary["points"] = static_cast<std::int64_t>(rep.records.size());
    rep.pass = all_classified && (k != 1 || max_delta <= 1e-9);
    rep.summary["pass"] = rep.pass;
    return rep;
}

} // namespace

std::string format_wire(double x)
{
    if (!std::isfinite(x))
        fail(ErrorCode::numeric_failure, "emit", "non-finite value in report");
    char buf[40];
    std::snprintf(buf, sizeof(buf), "%.14e", x);
    return buf;
}

double round_wire(double x)
{
    return std::strtod(format_wire(x).c_str(), nullptr);
}

RunConfig parse_config(const Json& doc)
{
    RunConfig cfg;
    cfg.command = jget_str(doc, "command", "", true);
    static const std::vector<std::string> known = {
        "radial-check", "cut-grid", "map-g", "einstein-check", "veff", "polytope", "stability"};
    if (std::find(known.begin(), known.end(), cfg.command) == known.end())
        config_fail("unknown command '" + cfg.command + "'");
    if (doc.contains("problem")) cfg.problem = doc["problem"];

    if (doc.contains("grid")) {
        const Json& g = doc["grid"];
        if (g.contains("center")) {
            for (const auto& c : g["center"]) {
                if (!c.is_array() || c.size() != 2) config_fail("grid center must be [re,im] pairs");
                cfg.grid.center.emplace_back(c[0].get<double>(), c[1].get<double>());
            }
        }
        cfg.grid.extent = jget_num(g, "extent", 1.0);
        cfg.grid.samples = static_cast<int>(jget_num(g, "samples", 5));
        if (!(cfg.grid.extent > 0.0)) config_fail("grid extent must be positive");
        if (cfg.grid.samples < 1 || cfg.grid.samples > 512)
            config_fail("samples per axis must lie in [1, 512]");
    }
    if (doc.contains("output")) {
        cfg.out_path = jget_str(doc["output"], "path", "");
        cfg.format = jget_str(doc["output"], "format", "json");
    }
    if (doc.contains("tolerance")) cfg.tolerance = doc["tolerance"].get<double>();
    if (doc.contains("seed")) cfg.seed = doc["seed"].get<std::uint64_t>();
    if (doc.contains("workers")) {
        cfg.workers = doc["workers"].get<int>();
    } else if (const char* env = std::getenv("KCUT_WORKERS")) {
        int w = std::atoi(env);
        if (w > 0) cfg.workers = w;
    }
    if (cfg.format != "json" && cfg.format != "csv")
        config_fail("format must be json or csv");
    if (cfg.workers < 1) config_fail("workers must be >= 1");
    return cfg;
}

RunReport run(const RunConfig& cfg)
{
    auto start = std::chrono::steady_clock::now();
    RunReport rep;
    if (cfg.command == "radial-check")       rep = run_radial_check(cfg);
    else if (cfg.command == "cut-grid")      rep = run_cut_grid(cfg);
    else if (cfg.command == "map-g")         rep = run_map_g(cfg);
    else if (cfg.command == "einstein-check") rep = run_einstein_check(cfg);
    else if (cfg.command == "veff")          rep = run_veff(cfg);
    else if (cfg.command == "polytope")      rep = run_polytope(cfg);
    else if (cfg.command == "stability")     rep = run_stability(cfg);
    else config_fail("unknown command '" + cfg.command + "'");
    rep.wall_ms = std::chrono::duration<double, std::milli>(
                      std::chrono::steady_clock::now() - start).count();
    return rep;
}

namespace {

Json cell_to_json(const Cell& c)
{
    if (std::holds_alternative<double>(c)) return std::get<double>(c);
    if (std::holds_alternative<std::int64_t>(c)) return std::get<std::int64_t>(c);
    if (std::holds_alternative<bool>(c)) return std::get<bool>(c);
    return std::get<std::string>(c);
}

std::string cell_to_csv(const Cell& c)
{
    if (std::holds_alternative<double>(c)) return format_wire(std::get<double>(c));
    if (std::holds_alternative<std::int64_t>(c)) return std::to_string(std::get<std::int64_t>(c));
    if (std::holds_alternative<bool>(c)) return std::get<bool>(c) ? "true" : "false";
    return std::get<std::string>(c);
}

} // namespace

std::string emit(const RunReport& report, const std::string& format)
{
    if (format == "json") {
        Json doc;
        doc["schema"] = "kcut-report/1";
        doc["command"] = report.command;
        doc["summary"] = report.summary;
        doc["columns"] = report.columns;
        Json records = Json::array();
        for (const Record& r : report.records) {
            Json row;
            for (std::size_t i = 0; i < r.cells.size(); ++i)
                row[report.columns[i]] = cell_to_json(r.cells[i]);
            records.push_back(std::move(row));
        }
        doc["records"] = std::move(records);
        return doc.dump(2) + "\n";
    }
    if (format == "csv") {
        std::string out;
        for (std::size_t i = 0; i < report.columns.size(); ++i) {
            if (i) out += ",";
            out += report.columns[i];
        }
        out += "\n";
        for (const Record& r : report.records) {
            for (std::size_t i = 0; i < r.cells.size(); ++i) {
                if (i) out += ",";
                out += cell_to_csv(r.cells[i]);
            }
            out += "\n";
        }
        return out;
    }
    fail(ErrorCode::config_error, "emit", "format must be json or csv");
}

void write_artifact(const std::string& bytes, const std::string& path)
{
    namespace fs = std::filesystem;
    fs::path target(path);
    fs::path tmp = target;
    tmp += ".tmp";
    {
        std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
        if (!out)
            fail(ErrorCode::io_error, "write_artifact", "cannot open " + tmp.string());
        out.write(bytes.data(), static_cast<std::streamsize>(bytes.size()));
        if (!out)
            fail(ErrorCode::io_error, "write_artifact", "short write to " + tmp.string());
    }
    std::error_code ec;
    fs::rename(tmp, target, ec);
    if (ec)
        fail(ErrorCode::io_error, "write_artifact", "rename failed: " + ec.message());
}

int exit_code_for(const RunReport& report)
{
    return report.pass ? 0 : 1;
}

} // namespace kcut::cli
