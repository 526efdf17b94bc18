#include "io.hpp"

#include <cstdio>
#include <cstring>
#include <iterator>

#include "soliton_lab/core.hpp"

namespace soliton_lab::cli {

std::string num(double x) {
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.17g", x);
    return buf;
}

Csv::Csv(const fs::path& path, const std::vector<std::string>& header) : os_(path), width_(header.size()) {
    if (!os_) throw InvalidArgument("cannot write " + path.string());
    for (std::size_t i = 0; i < header.size(); ++i) os_ << (i ? "," : "") << header[i];
    os_ << '\n';
}

void Csv::row(const std::vector<double>& values) {
    require(values.size() == width_, "Csv::row: width mismatch");
    for (std::size_t i = 0; i < values.size(); ++i) os_ << (i ? "," : "") << num(values[i]);
    os_ << '\n';
}

void write_json(const fs::path& path, const json& j) {
    std::ofstream os(path);
    if (!os) throw InvalidArgument("cannot write " + path.string());
    os << j.dump(2) << '\n';
}

json read_json(const fs::path& path) {
    std::ifstream is(path);
    if (!is) throw InvalidArgument("cannot read " + path.string());
    try {
        return json::parse(is);
    } catch (const json::exception& e) {
        throw InvalidArgument(path.string() + ": " + e.what());
    }
}

std::vector<std::complex<double>> read_field_bin(const fs::path& path, bool real) {
    std::ifstream is(path, std::ios::binary);
    if (!is) throw InvalidArgument("cannot read " + path.string());
    std::vector<char> bytes((std::istreambuf_iterator<char>(is)), std::istreambuf_iterator<char>());
    const std::size_t per = real ? sizeof(double) : 2 * sizeof(double);
    if (bytes.empty() || bytes.size() % per != 0)
        throw InvalidArgument(path.string() + ": size is not a whole number of " + (real ? "float64" : "complex128") +
                              " values");
    std::vector<double> raw(bytes.size() / sizeof(double));
    std::memcpy(raw.data(), bytes.data(), bytes.size());
    std::vector<std::complex<double>> f(bytes.size() / per);
    for (std::size_t i = 0; i < f.size(); ++i) f[i] = real ? raw[i] : std::complex<double>(raw[2 * i], raw[2 * i + 1]);
    return f;
}

void write_field_bin(const fs::path& path, std::span<const std::complex<double>> f) {
    std::ofstream os(path, std::ios::binary);
    if (!os) throw InvalidArgument("cannot write " + path.string());
    os.write(reinterpret_cast<const char*>(f.data()), std::streamsize(f.size_bytes()));
}

fs::path output_dir(const fs::path& out, bool is_dir) {
    fs::path d = is_dir ? out : out.parent_path();
    if (d.empty()) d = ".";
    fs::create_directories(d);
    return d;
}

double Spec::get(const std::string& key, double fallback) const {
    auto it = values.find(key);
    return it == values.end() ? fallback : it->second;
}

Spec parse_spec(const std::string& s) {
    Spec sp;
    auto colon = s.find(':');
    sp.name = s.substr(0, colon);
    if (colon == std::string::npos) return sp;
    std::string rest = s.substr(colon + 1);
    std::size_t pos = 0;
    while (pos < rest.size()) {
        std::size_t comma = rest.find(',', pos);
        std::string kv = rest.substr(pos, comma == std::string::npos ? std::string::npos : comma - pos);
        auto eq = kv.find('=');
        if (eq == std::string::npos) throw InvalidArgument("spec '" + s + "': expected key=value, got '" + kv + "'");
        try {
            sp.values[kv.substr(0, eq)] = std::stod(kv.substr(eq + 1));
        } catch (const std::exception&) {
            throw InvalidArgument("spec '" + s + "': '" + kv + "' is not numeric");
        }
        if (comma == std::string::npos) break;
        pos = comma + 1;
    }
    return sp;
}

}  // namespace soliton_lab::cli
