#include "cli.hpp"

#include <iostream>
#include <memory>
#include <set>

#include "CLI11.hpp"
#include "commands.hpp"
#include "soliton_lab/core.hpp"

namespace soliton_lab::cli {

namespace {

struct UsageError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

// Flags of one subcommand, mirrored as JSON keys of the same name so that a
// config file and the command line address the same parameters.
class ParamSet {
public:
    explicit ParamSet(CLI::App* app) : app_(app) {}

    template <class T>
    void add(const std::string& name, T& var, const std::string& help) {
        CLI::Option* o = app_->add_option("--" + name, var, help)->capture_default_str();
        params_.push_back({name, o, [&var](const json& j) { var = j.get<T>(); }, [&var] { return json(var); }});
    }
    void flag(const std::string& name, bool& var, const std::string& help) {
        CLI::Option* o = app_->add_flag("--" + name, var, help);
        params_.push_back({name, o, [&var](const json& j) { var = j.get<bool>(); }, [&var] { return json(var); }});
    }

    // Values from `cfg` for parameters not given on the command line and not
    // filled by an earlier file. `only` restricts the accepted keys.
    void load(const json& cfg, const std::string& source, const std::set<std::string>& only = {}) {
        if (!cfg.is_object()) throw UsageError(source + ": expected a JSON object");
        for (auto& [key, value] : cfg.items()) {
            auto it = std::find_if(params_.begin(), params_.end(), [&](const Param& p) { return p.name == key; });
            if (it == params_.end() || (!only.empty() && !only.count(key)))
                throw UsageError(source + ": unknown key '" + key + "'");
            if (it->opt->count() > 0 || filled_.count(key)) continue;
            try {
                it->load(value);
            } catch (const json::exception&) {
                throw UsageError(source + ": key '" + key + "' has the wrong type");
            }
            filled_.insert(key);
        }
    }

    json dump() const {
        json j = json::object();
        for (const auto& p : params_) j[p.name] = p.dump();
        return j;
    }

private:
    struct Param {
        std::string name;
        CLI::Option* opt;
        std::function<void(const json&)> load;
        std::function<json()> dump;
    };
    CLI::App* app_;
    std::vector<Param> params_;
    std::set<std::string> filled_;
};

struct Command {
    std::string name;
    CLI::App* app = nullptr;
    std::unique_ptr<ParamSet> params;
    std::string config;
    std::string perturbation;  // shoot only
    long long seed = 0;
    std::function<fs::path()> out_dir;
    std::function<void()> action;
};

void add_grid(ParamSet& ps, GridArgs& g) {
    ps.add("grid", g.grid, "radial | cartesian");
    ps.add("r-max", g.r_max, "radial box radius");
    ps.add("n-r", g.n_r, "radial nodes");
    ps.add("n", g.n, "cartesian points per axis (power of two)");
    ps.add("box", g.box, "cartesian box length");
}

}  // namespace

int run(int argc, const char* const* argv) {
    CLI::App app{"Numerical laboratory for the focusing cubic NLS in three dimensions", "soliton-lab"};
    app.require_subcommand(1);

    GroundStateArgs gs;
    FrameArgs fr;
    SpectrumArgs sp;
    EvolveArgs ev;
    ShootArgs sh;
    ScanArgs sc;
    LorentzArgs lz;
    ReportArgs rp;

    std::vector<Command> cmds;
    cmds.reserve(8);
    auto make = [&](const std::string& name, const std::string& help) -> Command& {
        Command& c = cmds.emplace_back();
        c.name = name;
        c.app = app.add_subcommand(name, help);
        c.params = std::make_unique<ParamSet>(c.app);
        c.app->add_option("--config", c.config, "JSON file of parameters; flags win")->check(CLI::ExistingFile);
        c.params->add("seed", c.seed, "seed recorded with the run");
        return c;
    };
    auto file_out = [](const std::string& out) { return [&out] { return output_dir(out, false); }; };
    auto dir_out = [](const std::string& out) { return [&out] { return output_dir(out, true); }; };

    {
        Command& c = make("ground-state", "radial ground state profile");
        c.params->add("alpha", gs.alpha, "frequency parameter");
        c.params->add("tol", gs.tol, "shooting tolerance on phi(0)");
        c.params->add("r-max", gs.r_max, "extent of the written profile");
        c.params->add("dr", gs.dr, "spacing of the written profile");
        c.params->add("out", gs.out, "profile CSV; a JSON sidecar goes next to it");
        c.out_dir = file_out(gs.out);
        c.action = [&] { ground_state_cmd(gs); };
    }
    {
        Command& c = make("frame", "8x8 Gram matrix of the tangent frame");
        c.params->add("alpha", fr.alpha, "frequency parameter");
        add_grid(*c.params, fr.grid);
        c.params->add("out", fr.out, "output JSON");
        c.out_dir = file_out(fr.out);
        c.action = [&] { frame_cmd(fr); };
    }
    {
        Command& c = make("verify-spectrum", "spectral certificate for L+ and L-");
        c.params->add("lmax", sp.lmax, "highest angular momentum");
        c.params->add("lambda-max", sp.lambda_max, "upper end of the embedded-eigenvalue scan");
        c.params->add("r-max", sp.r_max, "radial box");
        c.params->add("n-r", sp.n_r, "radial nodes for eigenvalue lists");
        c.params->add("scan-n-r", sp.scan_n_r, "radial nodes for the embedded scan");
        c.params->add("out", sp.out, "certificate JSON");
        c.out_dir = file_out(sp.out);
        c.action = [&] { verify_spectrum_cmd(sp); };
    }
    {
        Command& c = make("evolve", "NLS evolution with diagnostics and snapshots");
        c.params->add("init", ev.init, "field.bin | soliton:alpha=..,gamma=.. | gaussian:amp=..,width=..");
        c.params->add("t-end", ev.t_end, "final time");
        c.params->add("dt", ev.dt, "time step");
        c.params->add("scheme", ev.scheme, "strang-split | if-rk4");
        add_grid(*c.params, ev.grid);
        c.params->add("absorb-width", ev.absorb_width, "absorbing layer width (0 = off)");
        c.params->add("observe-every", ev.observe_every, "steps between diagnostics rows");
        c.params->add("snapshot-every", ev.snapshot_every, "observations between snapshots (0 = none)");
        c.params->add("out", ev.out, "run directory");
        c.out_dir = dir_out(ev.out);
        c.action = [&] { evolve_cmd(ev); };
    }
    {
        Command& c = make("shoot", "stable-manifold shooting for the unstable coefficient");
        c.app->add_option("--perturbation", c.perturbation, "JSON with epsilon, center, width, tilt")
            ->check(CLI::ExistingFile);
        c.params->add("epsilon", sh.epsilon, "size of the perturbation in L2");
        c.params->add("center", sh.center, "bump center");
        c.params->add("width", sh.width, "bump width");
        c.params->add("tilt", sh.tilt, "imaginary part of the bump");
        c.params->add("T", sh.T, "shooting horizon");
        c.params->add("dt", sh.dt, "time step");
        c.params->add("observe-dt", sh.observe_dt, "sampling interval of b(t)");
        c.params->add("mode", sh.mode, "nonlinear | linearized");
        c.params->add("threshold", sh.threshold, "accept |b(T)| < threshold ||R0||");
        c.params->add("r-max", sh.r_max, "radial box");
        c.params->add("n-r", sh.n_r, "radial nodes");
        c.params->add("detune", sh.detune, "offset of the two detuned shots (0 = skip)");
        c.params->add("out", sh.out, "run directory");
        c.out_dir = dir_out(sh.out);
        c.action = [&] { shoot_cmd(sh); };
    }
    {
        Command& c = make("scan-exceptional", "Birman-Schwinger scan for exceptional values");
        c.params->add("potential", sc.potential, "pot.json | zero | square_well:c=.. | gaussian:.. | soliton:..");
        c.params->add("region", sc.region, "re_min,re_max,im_min,im_max");
        c.params->add("n-re", sc.n_re, "samples along Re z");
        c.params->add("n-im", sc.n_im, "samples along Im z");
        c.params->add("ell", sc.ell, "partial wave");
        c.params->add("refine-below", sc.refine_below, "refine local minima below this");
        c.params->add("flag-below", sc.flag_below, "flag refined minima below this");
        c.params->add("out", sc.out, "scan CSV; a JSON sidecar goes next to it");
        c.out_dir = file_out(sc.out);
        c.action = [&] { scan_exceptional_cmd(sc); };
    }
    {
        Command& c = make("lorentz-decompose", "Lorentz norm and atomic decomposition of a field");
        c.params->add("in", lz.in, "flat float64 field (complex pairs unless --real)");
        c.params->add("p", lz.p, "Lorentz exponent p");
        c.params->add("q", lz.q, "Lorentz exponent q");
        c.params->add("cell", lz.cell, "measure of each entry");
        c.params->flag("real", lz.real, "input holds real values");
        c.params->add("out", lz.out, "atoms JSON");
        c.out_dir = file_out(lz.out);
        c.action = [&] { lorentz_decompose_cmd(lz); };
    }
    {
        Command& c = make("report", "summary of a run directory");
        c.params->add("in", rp.in, "run directory");
        c.params->add("out", rp.out, "report directory");
        c.out_dir = dir_out(rp.out);
        c.action = [&] { report_cmd(rp); };
    }

    Command* active = nullptr;
    try {
        app.parse(argc, argv);
        for (auto& c : cmds)
            if (c.app->parsed()) active = &c;
        if (!active->perturbation.empty())
            active->params->load(read_json(active->perturbation), active->perturbation,
                                 {"epsilon", "center", "width", "tilt"});
        if (!active->config.empty()) {
            json cfg = read_json(active->config);
            if (cfg.is_object() && cfg.contains(active->name)) cfg = cfg[active->name];
            active->params->load(cfg, active->config);
        }
    } catch (const CLI::CallForHelp& e) {
        return app.exit(e);
    } catch (const CLI::CallForAllHelp& e) {
        return app.exit(e);
    } catch (const CLI::ParseError& e) {
        app.exit(e);
        return 2;
    } catch (const std::exception& e) {
        std::cerr << "usage error: " << e.what() << '\n';
        return 2;
    }

    fs::path dir;
    auto fail = [&](const std::string& kind, const std::string& what) {
        json err = {{"error", kind}, {"message", what}, {"subcommand", active->name}};
        std::cerr << err.dump() << '\n';
        if (!dir.empty()) {
            try {
                write_json(dir / "error.json", err);
            } catch (...) {
            }
        }
        return 1;
    };
    try {
        dir = active->out_dir();
        json config = {{"subcommand", active->name}, {"parameters", active->params->dump()}};
        write_json(dir / "config.json", config);
        active->action();
    } catch (const Error& e) {
        return fail(e.kind(), e.what());
    } catch (const std::exception& e) {
        return fail("IOError", e.what());
    }
    return 0;
}

}  // namespace soliton_lab::cli
