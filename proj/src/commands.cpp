#include "commands.hpp"

#include <algorithm>
#include <cstdio>
#include <iostream>

#include "soliton_lab/soliton_lab.hpp"

namespace soliton_lab::cli {

namespace {

json complex_matrix(const Eigen::MatrixXcd& M) {
    json re = json::array(), im = json::array();
    for (int i = 0; i < M.rows(); ++i) {
        json rr = json::array(), ii = json::array();
        for (int j = 0; j < M.cols(); ++j) {
            rr.push_back(M(i, j).real());
            ii.push_back(M(i, j).imag());
        }
        re.push_back(rr);
        im.push_back(ii);
    }
    return {{"re", re}, {"im", im}};
}

json pairs(const std::vector<std::pair<int, double>>& v) {
    json a = json::array();
    for (auto& [ell, x] : v) a.push_back({{"ell", ell}, {"value", x}});
    return a;
}

fs::path sidecar(const fs::path& out) {
    fs::path p = out;
    return p.replace_extension(".json");
}

// ---------------------------------------------------------------- evolve

std::string grid_name(const CartGrid&) { return "cartesian"; }
std::string grid_name(const ChannelGrid&) { return "radial"; }

json grid_json(const CartGrid& g) { return {{"kind", "cartesian"}, {"n", g.n()}, {"box", g.box_length()}}; }
json grid_json(const ChannelGrid& cg) {
    return {{"kind", "radial"}, {"r_max", cg.radial_grid().r_max()}, {"n_r", cg.n_r()}, {"channels", cg.ells()}};
}

Field gaussian(const Spec& s, const CartGrid& g) {
    const double amp = s.get("amp", 1.0), w = s.get("width", 1.0);
    const Vec3 c{s.get("cx", 0.0), s.get("cy", 0.0), s.get("cz", 0.0)};
    return g.sample([&](const Vec3& x) {
        return cplx(amp * std::exp(-(sq(x[0] - c[0]) + sq(x[1] - c[1]) + sq(x[2] - c[2])) / sq(w)));
    });
}
Field gaussian(const Spec& s, const ChannelGrid& cg) {
    const double amp = s.get("amp", 1.0), w = s.get("width", 1.0);
    return cg.from_profile(0, [&](double r) { return cplx(amp * std::exp(-sq(r / w)) / Y00); });
}

SolitonParams soliton_params(const Spec& s) {
    SolitonParams p;
    p.alpha = s.get("alpha", 1.0);
    p.gamma = s.get("gamma", 0.0);
    for (int k = 0; k < 3; ++k) {
        p.v[k] = s.get("v" + std::to_string(k + 1), 0.0);
        p.d[k] = s.get("d" + std::to_string(k + 1), 0.0);
    }
    return p;
}

template <class Grid>
void evolve_on(const EvolveArgs& a, const Grid& g, const fs::path& dir) {
    Field psi0 = g.zeros();
    std::optional<PairField> standing;
    SolitonParams sp;
    if (fs::exists(a.init)) {
        auto raw = read_field_bin(a.init, false);
        require(raw.size() == psi0.size(), "evolve: " + a.init + " holds " + std::to_string(raw.size()) +
                                               " values, the grid needs " + std::to_string(psi0.size()));
        std::copy(raw.begin(), raw.end(), psi0.span().begin());
    } else {
        Spec s = parse_spec(a.init);
        if (s.name == "soliton") {
            sp = soliton_params(s);
            PairField W = make_soliton(sp, solve_ground_state(1.0), g);
            psi0 = W.upper;
            if (sp.is_standing()) standing = W;
        } else if (s.name == "gaussian") {
            psi0 = gaussian(s, g);
        } else {
            throw InvalidArgument("evolve: --init '" + a.init + "' is neither a file nor soliton:/gaussian:");
        }
    }

    EvolutionConfig cfg;
    cfg.dt = a.dt;
    cfg.t_end = a.t_end;
    cfg.scheme = parse_scheme(a.scheme);
    cfg.absorb_width = a.absorb_width;
    cfg.observe_every = std::max(1, a.observe_every);

    std::vector<std::string> cols{"t", "mass", "energy", "p1", "p2", "p3", "sup", "h_half", "w_half_6", "l2t_w_half_6"};
    if (standing) cols.push_back("soliton_defect");
    Csv csv(dir / "diagnostics.csv", cols);
    json snaps = json::array();
    double acc = 0, w6_prev = 0, t_prev = 0;
    int k = 0;
    Invariants first, last;
    Field final = evolve_nls(psi0, g, cfg, [&](double t, const Field& f) {
        Invariants iv = invariants(f, g);
        if (k == 0) first = iv;
        last = iv;
        const double hh = sobolev_norm(f, 0.5, g);
        const double w6 = l6_norm(fractional_half(f, g), g);
        if (k > 0) acc += 0.5 * (t - t_prev) * (sq(w6) + sq(w6_prev));
        std::vector<double> row{t, iv.mass, iv.energy, iv.momentum[0], iv.momentum[1], iv.momentum[2],
                                sup_norm_density(f, g), hh, w6, std::sqrt(acc)};
        if (standing) {
            Field ref = std::exp(I * sq(sp.alpha) * t) * standing->upper;
            row.push_back(sobolev_norm(f - ref, 0.5, g));
        }
        csv.row(row);
        if (a.snapshot_every > 0 && k % a.snapshot_every == 0) {
            char name[32];
            std::snprintf(name, sizeof name, "snap_%06d.bin", k);
            write_field_bin(dir / name, f.span());
            snaps.push_back({{"file", name}, {"t", t}});
        }
        w6_prev = w6;
        t_prev = t;
        ++k;
        return true;
    });
    write_field_bin(dir / "final.bin", final.span());
    write_json(dir / "run.json", {{"grid", grid_json(g)},
                                  {"values", final.size()},
                                  {"layout", grid_name(g) == "radial" ? "channel-major u = r f_c, complex128"
                                                                      : "row-major (x, y, z), complex128"},
                                  {"scheme", to_string(cfg.scheme)},
                                  {"observations", k},
                                  {"mass_drift", (last.mass - first.mass) / first.mass},
                                  {"energy_drift", (last.energy - first.energy) / std::abs(first.energy)},
                                  {"snapshots", snaps},
                                  {"final", "final.bin"}});
}

// ----------------------------------------------------------- potentials

Spec potential_spec(const std::string& s) {
    if (fs::exists(s) && fs::is_regular_file(s)) {
        json j = read_json(s);
        Spec sp;
        sp.name = j.value("kind", std::string());
        for (auto& [k, v] : j.items())
            if (k != "kind") {
                if (!v.is_number()) throw InvalidArgument(s + ": '" + k + "' must be numeric");
                sp.values[k] = v.get<double>();
            }
        return sp;
    }
    return parse_spec(s);
}

PotentialSpec build_potential(const Spec& s, int ell) {
    if (s.name == "zero") return square_well(0.0, 1.0, 2, ell);
    if (s.name == "square_well")
        return square_well(s.get("c", 4.0), s.get("radius", 1.0), int(s.get("panels", 2)), ell);
    if (s.name == "gaussian") {
        const double a = s.get("amp", 1.0), b = s.get("amp_im", 0.0), w = s.get("width", 1.0);
        PanelGrid g(s.get("r_max", 6.0 * w), int(s.get("panels", 8)), 10);
        return PotentialSpec::scalar(g, [&](double r) { return cplx(a, b) * std::exp(-sq(r / w)); }, ell);
    }
    if (s.name == "soliton")
        return soliton_matrix_potential(solve_ground_state(s.get("alpha", 1.0)), s.get("r_max", 12.0),
                                        int(s.get("panels", 12)), ell);
    throw InvalidArgument("unknown potential kind '" + s.name + "' (zero, square_well, gaussian, soliton)");
}

ScanRegion parse_region(const std::string& s, int n_re, int n_im) {
    std::vector<double> v;
    std::size_t pos = 0;
    while (pos <= s.size()) {
        std::size_t c = s.find(',', pos);
        try {
            v.push_back(std::stod(s.substr(pos, c == std::string::npos ? std::string::npos : c - pos)));
        } catch (const std::exception&) {
            throw InvalidArgument("--region '" + s + "': expected re_min,re_max,im_min,im_max");
        }
        if (c == std::string::npos) break;
        pos = c + 1;
    }
    require(v.size() == 4 && v[0] < v[1] && v[2] < v[3], "--region '" + s + "': expected re_min<re_max,im_min<im_max");
    require(n_re >= 2 && n_im >= 2, "scan needs at least 2 samples per axis");
    return {v[0], v[1], v[2], v[3], n_re, n_im};
}

}  // namespace

// ------------------------------------------------------------ commands

void ground_state_cmd(const GroundStateArgs& a) {
    require(a.dr > 0 && a.r_max > a.dr, "ground-state: need 0 < dr < r_max");
    GroundState gs = solve_ground_state(a.alpha, a.tol);
    Csv csv(a.out, {"r", "phi"});
    const int n = int(std::floor(a.r_max / a.dr + 1e-9));
    for (int i = 0; i <= n; ++i) csv.row({i * a.dr, gs(i * a.dr)});
    write_json(sidecar(a.out), {{"alpha", a.alpha},
                                {"peak", gs.peak},
                                {"l2norm", std::sqrt(ground_state_mass(gs))},
                                {"residual", gs.residual_norm}});
}

void frame_cmd(const FrameArgs& a) {
    GroundState gs = solve_ground_state(1.0);
    SolitonParams p{a.alpha, 0.0};
    SpectralFrame fr;
    json grid;
    if (a.grid.grid == "radial") {
        ChannelGrid cg(RadialGrid(a.grid.r_max, a.grid.n_r), {0, 1, 1, 1});
        fr = tangent_frame(p, gs, cg);
        grid = grid_json(cg);
    } else if (a.grid.grid == "cartesian") {
        CartGrid g(a.grid.n, a.grid.box);
        fr = tangent_frame(p, gs, g);
        grid = grid_json(g);
    } else {
        throw InvalidArgument("--grid must be radial or cartesian");
    }
    Eigen::MatrixXcd G = frame_gram(fr.tangent, fr.cotangent);
    double off = 0;
    for (int i = 0; i < 8; ++i)
        for (int j = 0; j < 8; ++j)
            if (i != j) off = std::max(off, std::abs(G(i, j)));
    json dirs = json::array();
    for (auto* d : direction_name) dirs.push_back(d);
    write_json(a.out, {{"alpha", a.alpha},
                       {"grid", grid},
                       {"norm2", fr.norm2},
                       {"directions", dirs},
                       {"gram", complex_matrix(G)},
                       {"max_offdiagonal", off}});
}

void verify_spectrum_cmd(const SpectrumArgs& a) {
    CertificateOptions o;
    o.l_max = a.lmax;
    o.lambda_max = a.lambda_max;
    o.grid = RadialGrid(a.r_max, a.n_r);
    o.scan_grid = RadialGrid(a.r_max, a.scan_n_r);
    SpectralCertificate c = verify_spectral_assumption(solve_ground_state(1.0), o);
    json dips = json::array();
    for (auto& d : c.embedded_dips) dips.push_back({{"ell", d.ell}, {"lambda", d.lambda}, {"smin", d.smin}});
    double smin = std::numeric_limits<double>::infinity();
    for (auto& s : c.embedded_scan) smin = std::min(smin, s.smin);
    write_json(a.out, {{"verdict", c.verdict},
                       {"sigma", c.sigma},
                       {"l_plus_in_window", pairs(c.l_plus_in_window)},
                       {"l_minus_in_window", pairs(c.l_minus_in_window)},
                       {"l_plus_zero_modes", pairs(c.l_plus_zero_modes)},
                       {"l_minus_zero_modes", pairs(c.l_minus_zero_modes)},
                       {"edge_norms_plus", c.edge_norms_plus},
                       {"edge_norms_minus", c.edge_norms_minus},
                       {"edge_indicator", c.edge_indicator},
                       {"edge_threshold", o.edge_threshold},
                       {"embedded_dips", dips},
                       {"scan_min_smin", smin},
                       {"scan_points", c.embedded_scan.size()}});
}

void evolve_cmd(const EvolveArgs& a) {
    fs::path dir = output_dir(a.out, true);
    if (a.grid.grid == "radial")
        evolve_on(a, ChannelGrid::radial(RadialGrid(a.grid.r_max, a.grid.n_r)), dir);
    else if (a.grid.grid == "cartesian")
        evolve_on(a, CartGrid(a.grid.n, a.grid.box), dir);
    else
        throw InvalidArgument("--grid must be radial or cartesian");
}

void shoot_cmd(const ShootArgs& a) {
    fs::path dir = output_dir(a.out, true);
    GroundState gs = solve_ground_state(1.0);
    RadialGrid rg(a.r_max, a.n_r);
    ChannelGrid cg = ChannelGrid::radial(rg);
    ImaginaryPair unit = compute_imaginary_pair(gs, rg);
    SolitonParams pi0{1.0, 0.0};
    SpectralFrame fr = spectral_frame(pi0, gs, cg, unit);
    PairField R0 = continuous_perturbation({a.epsilon, a.center, a.width, a.tilt}, fr, cg);
    ShootProblem prob = make_shoot_problem(R0, pi0, gs, cg, unit);

    ShootOptions opt;
    opt.T = a.T;
    opt.dt = a.dt;
    opt.observe_dt = a.observe_dt;
    opt.threshold = a.threshold;
    if (a.mode == "nonlinear")
        opt.mode = ShootMode::Nonlinear;
    else if (a.mode == "linearized")
        opt.mode = ShootMode::Linearized;
    else
        throw InvalidArgument("--mode must be nonlinear or linearized");

    ShootResult res = shoot_h(prob, opt);

    auto ind = res.indicator;
    std::sort(ind.begin(), ind.end());
    Csv gi(dir / "growth_indicator.csv", {"h", "indicator"});
    for (auto& [h, v] : ind) gi.row({h, v});

    const Shot& s = res.trajectory;
    Csv bpm(dir / "b_pm.csv", {"t", "b_plus", "b_minus", "r_half", "alpha", "gamma"});
    std::vector<double> t;
    for (auto& x : s.samples) {
        bpm.row({x.t, x.b, x.b_stable, x.r_half, x.pi.alpha, x.pi.gamma});
        t.push_back(x.t);
    }

    json out = {{"h_star", res.h_star},
                {"bracket", {res.lo, res.hi}},
                {"b_final", res.b_final},
                {"target", res.target},
                {"converged", res.converged},
                {"shots", res.shots},
                {"sigma", unit.sigma},
                {"norm_R0", l2_norm(R0)},
                {"mode", a.mode},
                {"b_plus_is", "coefficient along the growing eigenfunction"}};

    if (opt.mode == ShootMode::Nonlinear) {
        TrajectoryTerms terms = trajectory_terms(prob, s);
        out["h_explicit"] = h_explicit(terms, opt.T);
        ScatteringCheck sc = scattering_check(s, terms, cg);
        Csv scsv(dir / "scattering.csv", {"t", "defect"});
        for (std::size_t i = 0; i < sc.t.size(); ++i) scsv.row({sc.t[i], sc.defect[i]});
    } else {
        out["h_explicit"] = nullptr;
    }

    if (a.detune > 0) {
        Shot up = run_shot(prob, res.h_star + a.detune, opt, true, false);
        Shot dn = run_shot(prob, res.h_star - a.detune, opt, true, false);
        Csv dc(dir / "detuned.csv", {"t", "db_up", "db_down", "dr_up", "dr_down"});
        std::vector<double> dbu, dbd, dru, drd;
        for (std::size_t i = 0; i < s.samples.size(); ++i) {
            dbu.push_back(up.samples[i].b - s.samples[i].b);
            dbd.push_back(dn.samples[i].b - s.samples[i].b);
            dru.push_back(sobolev_norm(up.R[i] - s.R[i], 0.5, cg));
            drd.push_back(sobolev_norm(dn.R[i] - s.R[i], 0.5, cg));
            dc.row({t[i], dbu[i], dbd[i], dru[i], drd[i]});
        }
        const double t0 = 0.25 * opt.T, t1 = 0.75 * opt.T;
        out["detune"] = a.detune;
        out["growth_rate_up"] = growth_rate(t, dru, t0, t1);
        out["growth_rate_down"] = growth_rate(t, drd, t0, t1);
        out["growth_window"] = {t0, t1};
    }
    write_json(dir / "shoot.json", out);
}

void scan_exceptional_cmd(const ScanArgs& a) {
    PotentialSpec V = build_potential(potential_spec(a.potential), a.ell);
    ScanRegion reg = parse_region(a.region, a.n_re, a.n_im);
    ExceptionalScan sc = scan_exceptional(V, reg, a.refine_below, a.flag_below);
    Csv csv(a.out, {"re", "im", "smin"});
    double smin = std::numeric_limits<double>::infinity();
    for (auto& x : sc.samples) {
        csv.row({x.z.real(), x.z.imag(), x.smin});
        smin = std::min(smin, x.smin);
    }
    json flags = json::array();
    for (auto& x : sc.flagged) flags.push_back({{"re", x.z.real()}, {"im", x.z.imag()}, {"smin", x.smin}});
    write_json(sidecar(a.out), {{"kind", to_string(V.kind)},
                                {"ell", a.ell},
                                {"region", {reg.re_min, reg.re_max, reg.im_min, reg.im_max}},
                                {"min_smin", smin},
                                {"flagged", flags}});
}

void lorentz_decompose_cmd(const LorentzArgs& a) {
    require(!a.in.empty(), "lorentz-decompose: --in is required");
    require(a.cell > 0, "lorentz-decompose: --cell must be positive");
    auto f = read_field_bin(a.in, a.real);
    std::vector<double> m(f.size(), a.cell), mag(f.size());
    for (std::size_t i = 0; i < f.size(); ++i) mag[i] = std::abs(f[i]);
    const double norm = lorentz_norm(mag, m, a.p, a.q);
    AtomicDecomposition d = atomic_decompose(f, m, a.p);
    auto back = d.reconstruct(f.size());
    double err = 0, fmax = 0;
    for (std::size_t i = 0; i < f.size(); ++i) {
        err = std::max(err, std::abs(back[i] - f[i]));
        fmax = std::max(fmax, mag[i]);
    }
    const double cn = d.coefficient_norm(a.q);
    json atoms = json::array();
    for (auto& at : d.atoms)
        atoms.push_back({{"coefficient", at.coefficient}, {"measure", at.measure}, {"support", at.support}});
    write_json(a.out, {{"p", a.p},
                       {"q", a.q},
                       {"values", f.size()},
                       {"lorentz_norm", norm},
                       {"coefficient_norm", cn},
                       {"ratio", norm > 0 ? cn / norm : 0.0},
                       {"constant_bounds", {std::pow(2.0, -2 / a.p), std::pow(2.0, 2 / a.p)}},
                       {"reconstruction_error", fmax > 0 ? err / fmax : err},
                       {"atoms", atoms}});
}

void report_cmd(const ReportArgs& a) {
    fs::path in = a.in;
    require(fs::is_directory(in), "report: " + a.in + " is not a directory");
    fs::path dir = output_dir(a.out, true);
    std::vector<fs::path> files;
    for (auto& e : fs::directory_iterator(in))
        if (e.is_regular_file()) files.push_back(e.path());
    std::sort(files.begin(), files.end());
    json rep = {{"run", a.in}, {"files", json::array()}};
    for (auto& f : files) {
        json entry = {{"name", f.filename().string()}, {"bytes", fs::file_size(f)}};
        if (f.extension() == ".json") {
            json j = read_json(f);
            json scalars = json::object();
            if (j.is_object())
                for (auto& [k, v] : j.items())
                    if (v.is_primitive()) scalars[k] = v;
            entry["scalars"] = scalars;
        } else if (f.extension() == ".csv") {
            std::ifstream is(f);
            std::string header, line, lastline;
            std::getline(is, header);
            std::size_t rows = 0;
            while (std::getline(is, line))
                if (!line.empty()) {
                    ++rows;
                    lastline = line;
                }
            entry["header"] = header;
            entry["rows"] = rows;
            entry["last"] = lastline;
        }
        std::cout << entry["name"].get<std::string>();
        if (entry.contains("rows")) std::cout << "  rows=" << entry["rows"];
        if (entry.contains("scalars"))
            for (auto& [k, v] : entry["scalars"].items()) std::cout << "  " << k << "=" << v.dump();
        std::cout << '\n';
        rep["files"].push_back(entry);
    }
    write_json(dir / "report.json", rep);
}

}  // namespace soliton_lab::cli
