#pragma once

#include <string>

#include "io.hpp"

namespace soliton_lab::cli {

// Grid selection shared by the field-carrying commands. "radial" is the
// s-wave channel layout (plus p-waves where a command needs all eight
// symmetry directions); "cartesian" is the periodic n^3 box.
struct GridArgs {
    std::string grid = "radial";
    double r_max = 30.0;
    int n_r = 600;
    int n = 64;
    double box = 32.0;
};

struct GroundStateArgs {
    double alpha = 1.0;
    double tol = 1e-10;
    double r_max = 20.0;  // extent of the written profile
    double dr = 0.01;
    std::string out = "profile.csv";
};

struct FrameArgs {
    double alpha = 1.0;
    GridArgs grid;
    std::string out = "frame.json";
};

struct SpectrumArgs {
    int lmax = 4;
    double lambda_max = 5.0;
    double r_max = 30.0;
    int n_r = 600;
    int scan_n_r = 300;
    std::string out = "cert.json";
};

struct EvolveArgs {
    std::string init = "soliton";  // file.bin or name:key=value,...
    double t_end = 1.0;
    double dt = 1e-3;
    std::string scheme = "strang-split";
    GridArgs grid;
    double absorb_width = 0.0;
    int observe_every = 10;
    int snapshot_every = 0;  // in observations; 0 = final field only
    std::string out = "run";
};

struct ShootArgs {
    double epsilon = 1e-3;
    double center = 1.0;
    double width = 1.0;
    double tilt = 0.3;
    double T = 2.0;
    double dt = 2e-4;
    double observe_dt = 5e-3;
    std::string mode = "nonlinear";
    double threshold = 1e-6;
    double r_max = 20.0;
    int n_r = 320;
    double detune = 1e-6;  // 0 skips the detuned pair
    std::string out = "shoot";
};

struct ScanArgs {
    std::string potential = "soliton";  // file.json or name:key=value,...
    std::string region = "-6,6,-6,6";   // re_min,re_max,im_min,im_max
    int n_re = 41;
    int n_im = 41;
    int ell = 0;
    double refine_below = 0.1;
    double flag_below = 1e-4;
    std::string out = "scan.csv";
};

struct LorentzArgs {
    std::string in;
    double p = 1.2;
    double q = 1.0;
    double cell = 1.0;  // measure of every entry
    bool real = false;
    std::string out = "atoms.json";
};

struct ReportArgs {
    std::string in = "run";
    std::string out = "report";
};

void ground_state_cmd(const GroundStateArgs& a);
void frame_cmd(const FrameArgs& a);
void verify_spectrum_cmd(const SpectrumArgs& a);
void evolve_cmd(const EvolveArgs& a);
void shoot_cmd(const ShootArgs& a);
void scan_exceptional_cmd(const ScanArgs& a);
void lorentz_decompose_cmd(const LorentzArgs& a);
void report_cmd(const ReportArgs& a);

}  // namespace soliton_lab::cli
