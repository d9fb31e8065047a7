#pragma once

//==============================================================================
// io.hpp
// File formats of the command-line tools: the domain-spec JSON schema shared
// with the geometry module, deterministic CSV writers (%.17g round-trips
// doubles exactly), run manifests, and coefficient tables.
//
// Domain spec schema:
//   { "center": [re, im], "radius": r,
//     "delta": { "coeffs": [[re, im], ...] },   // c_{-N}..c_N, odd count
//     "eps": e }
// "delta"/"eps" may be omitted for a plain disk.
//==============================================================================

#include <cstdio>
#include <fstream>
#include <sstream>
#include <string>
#include <vector>

#include "json.hpp"

#include "disktomo/fourier_series.hpp"
#include "disktomo/geometry.hpp"

namespace disktomo {

using json = nlohmann::json;

inline std::string format_double(double v) {
    char buf[40];
    std::snprintf(buf, sizeof(buf), "%.17g", v);
    return buf;
}

//------------------------------------------------------------------------------
// domain specs
//------------------------------------------------------------------------------

inline json series_to_json(const FourierSeries& f) {
    json coeffs = json::array();
    for (int n = -f.degree(); n <= f.degree(); ++n)
        coeffs.push_back({f.coeff(n).real(), f.coeff(n).imag()});
    return json{{"coeffs", coeffs}};
}

inline FourierSeries series_from_json(const json& j) {
    if (!j.contains("coeffs") || !j["coeffs"].is_array())
        throw std::invalid_argument("series_from_json: missing coeffs array");
    std::vector<cdouble> coeffs;
    for (const auto& c : j["coeffs"]) {
        if (c.is_array() && c.size() == 2)
            coeffs.emplace_back(c[0].get<double>(), c[1].get<double>());
        else if (c.is_number())
            coeffs.emplace_back(c.get<double>(), 0.0);
        else
            throw std::invalid_argument("series_from_json: bad coefficient entry");
    }
    if (coeffs.empty()) coeffs.emplace_back(0.0, 0.0);
    if (coeffs.size() % 2 == 0)
        throw std::invalid_argument("series_from_json: coefficient count must be odd");
    return FourierSeries::from_coefficients(std::move(coeffs));
}

inline json spec_to_json(const PerturbedDiskSpec& spec, cdouble center = cdouble(0.0, 0.0)) {
    return json{{"center", {center.real(), center.imag()}},
                {"radius", spec.base_radius()},
                {"delta", series_to_json(spec.delta())},
                {"eps", spec.eps()}};
}

struct DomainSpec {
    cdouble center{0.0, 0.0};
    double radius = 0.0;
    FourierSeries delta;
    double eps = 0.0;

    bool is_plain_disk() const { return eps == 0.0 || delta.max_abs_coeff() == 0.0; }

    PerturbedDiskSpec centered_spec(AprioriConstants apriori = {}) const {
        if (std::abs(center) > 1e-14)
            throw unsupported_geometry("domain spec: perturbed disks must be centered");
        return PerturbedDiskSpec(DiskSpec(cdouble(0.0, 0.0), radius, apriori), delta, eps);
    }
};

inline DomainSpec domain_spec_from_json(const json& j) {
    DomainSpec out;
    if (!j.contains("radius")) throw std::invalid_argument("domain spec: missing radius");
    out.radius = j["radius"].get<double>();
    if (j.contains("center")) {
        const auto& c = j["center"];
        if (!c.is_array() || c.size() != 2)
            throw std::invalid_argument("domain spec: center must be [re, im]");
        out.center = cdouble(c[0].get<double>(), c[1].get<double>());
    }
    if (j.contains("delta")) out.delta = series_from_json(j["delta"]);
    if (j.contains("eps")) out.eps = j["eps"].get<double>();
    return out;
}

inline DomainSpec load_domain_spec(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw std::invalid_argument("cannot open spec file: " + path);
    json j;
    in >> j;
    return domain_spec_from_json(j);
}

//------------------------------------------------------------------------------
// CSV and manifests
//------------------------------------------------------------------------------

class CsvWriter {
public:
    CsvWriter(const std::string& path, const std::string& header) : out_(path) {
        if (!out_) throw std::runtime_error("cannot open output file: " + path);
        out_ << header << "\n";
    }

    void row(const std::vector<double>& values) {
        for (std::size_t i = 0; i < values.size(); ++i) {
            if (i) out_ << ",";
            out_ << format_double(values[i]);
        }
        out_ << "\n";
    }

    // mixed row with a leading integer column
    void row(long long first, const std::vector<double>& values) {
        out_ << first;
        for (double v : values) out_ << "," << format_double(v);
        out_ << "\n";
    }

private:
    std::ofstream out_;
};

inline void write_neumann_csv(const std::string& path, const FourierSeries& g) {
    CsvWriter csv(path, "mode,re,im");
    for (int n = -g.degree(); n <= g.degree(); ++n)
        csv.row(n, {g.coeff(n).real(), g.coeff(n).imag()});
}

inline FourierSeries read_neumann_csv(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw std::invalid_argument("cannot open coefficient file: " + path);
    std::string line;
    if (!std::getline(in, line) || line.rfind("mode,re,im", 0) != 0)
        throw std::invalid_argument("coefficient file must start with 'mode,re,im': " + path);
    std::vector<std::pair<int, cdouble>> entries;
    int max_mode = 0;
    while (std::getline(in, line)) {
        if (line.empty()) continue;
        std::istringstream ss(line);
        std::string tok;
        std::getline(ss, tok, ',');
        const int mode = std::stoi(tok);
        std::getline(ss, tok, ',');
        const double re = std::stod(tok);
        std::getline(ss, tok, ',');
        const double im = std::stod(tok);
        entries.emplace_back(mode, cdouble(re, im));
        max_mode = std::max(max_mode, std::abs(mode));
    }
    FourierSeries g(max_mode);
    for (const auto& [mode, c] : entries) g.set_coeff(mode, c);
    return g;
}

inline void write_json_file(const std::string& path, const json& j) {
    std::ofstream out(path);
    if (!out) throw std::runtime_error("cannot open output file: " + path);
    out << j.dump(2) << "\n";
}

// every run drops a manifest next to its outputs: the full configuration echo
// plus the tool version, enough to re-run the command
inline void write_manifest(const std::string& dir, const std::string& command,
                           const json& config) {
    json m{{"tool", "dtcli"}, {"version", "0.1.0"}, {"command", command}, {"config", config}};
    write_json_file(dir + "/manifest.json", m);
}

} // namespace disktomo
