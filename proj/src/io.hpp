#pragma once

#include <complex>
#include <filesystem>
#include <fstream>
#include <map>
#include <span>
#include <string>
#include <vector>

#include "json.hpp"

namespace soliton_lab::cli {

namespace fs = std::filesystem;
using json = nlohmann::json;

// Floats in CSV carry 17 significant digits so that they round-trip.
std::string num(double x);

class Csv {
public:
    Csv(const fs::path& path, const std::vector<std::string>& header);
    void row(const std::vector<double>& values);

private:
    std::ofstream os_;
    std::size_t width_;
};

void write_json(const fs::path& path, const json& j);
json read_json(const fs::path& path);

// Flat little-endian float64 files: interleaved (re, im) pairs, or bare
// reals when `real` is set.
std::vector<std::complex<double>> read_field_bin(const fs::path& path, bool real);
void write_field_bin(const fs::path& path, std::span<const std::complex<double>> f);

// Directory that receives config.json: `out` itself for directory outputs,
// its parent for file outputs. Created when missing.
fs::path output_dir(const fs::path& out, bool is_dir);

// "name:key=value,key=value" -> (name, {key: value}).
struct Spec {
    std::string name;
    std::map<std::string, double> values;
    double get(const std::string& key, double fallback) const;
};
Spec parse_spec(const std::string& s);

}  // namespace soliton_lab::cli
