#pragma once

// Report serialization: JSON reports (fixed key order for byte-identical
// reruns) and CSV tables.

#include <filesystem>
#include <fstream>

#include <json.hpp>

#include "bp.hpp"
#include "harmonics.hpp"
#include "validate.hpp"
#include "version.hpp"

namespace kltomo {

using Json = nlohmann::ordered_json;

inline Json to_json(const BpReport& r) {
    Json j;
    j["dims"] = {{"n", r.n}, {"i", r.i}, {"ell", r.ell}};
    j["mode"] = r.mode;
    j["section_samples"] = r.section_samples;
    j["fraction_ok"] = r.fraction_ok;
    j["hypothesis_holds"] = r.hypothesis_holds;
    j["worst_section_excess"] = r.worst_section_excess;
    j["vol_a"] = r.vol_a;
    j["vol_b"] = r.vol_b;
    j["vol_b_std_error"] = r.vol_b_std_error;
    j["vol_b0"] = r.vol_b0;
    j["volume_margin"] = r.volume_margin;
    j["volume_error"] = r.volume_error;
    j["min_g"] = r.min_g;
    j["max_abs_g"] = r.max_abs_g;
    j["duality_identity_residual"] = r.duality_identity_residual;
    j["chain_max_excess"] = r.chain_max_excess;
    j["chain_ok"] = r.chain_ok;
    j["verdict"] = r.verdict;
    j["seed"] = r.seed;
    j["tolerances"] = {{"section_rel", r.tol.section_rel},
                       {"volume_rel", r.tol.volume_rel},
                       {"mc_sigmas", r.tol.mc_sigmas}};
    return j;
}

inline Json to_json(const CounterexampleSpec& s) {
    Json j;
    j["dims"] = {{"n", s.n}, {"i", s.i}, {"ell", s.ell}};
    j["q"] = s.q;
    j["K"] = s.K;
    j["eps"] = s.eps;
    j["eps_max"] = s.eps_max;
    j["delta"] = s.delta;
    j["phi_min"] = s.phi_min;
    j["pairing"] = s.pairing;
    j["h_max"] = s.h_max;
    j["smoke_sections_ok"] = s.smoke_sections_ok;
    return j;
}

inline Json to_json(const ValidationReport& r) {
    Json j;
    Json checks = Json::array();
    for (const auto& c : r.checks) {
        Json jc;
        jc["name"] = c.name;
        jc["residual"] = c.residual;
        jc["tolerance"] = c.tolerance;
        jc["pass"] = c.pass;
        jc["note"] = c.note;
        checks.push_back(jc);
    }
    j["checks"] = checks;
    j["all_pass"] = r.all_pass;
    j["convention_note"] = r.convention_note;
    return j;
}

inline Json to_json(const IntersectionBodyReport& r) {
    Json j;
    j["is_member"] = r.is_member;
    j["mu_min"] = r.mu_min;
    j["mu_max_abs"] = r.mu_max_abs;
    j["truncation_error"] = r.truncation_error;
    return j;
}

inline void write_text_file(const std::filesystem::path& path, const std::string& content) {
    std::filesystem::create_directories(path.parent_path());
    std::ofstream os(path, std::ios::binary);
    if (!os) throw std::runtime_error("cannot open for writing: " + path.string());
    os << content;
}

inline void write_json_file(const std::filesystem::path& path, const Json& j) {
    write_text_file(path, j.dump(2) + "\n");
}

inline std::string csv_cell(double v) {
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.17g", v);
    return buf;
}

// header: lambda1..lambdam,volA,volB
inline std::string section_table_csv(const std::vector<std::vector<double>>& spectra,
                                     const std::vector<double>& vol_a,
                                     const std::vector<double>& vol_b) {
    std::string out;
    const std::size_t m = spectra.empty() ? 0 : spectra.front().size();
    for (std::size_t c = 0; c < m; ++c) out += "lambda" + std::to_string(c + 1) + ",";
    out += "volA,volB\n";
    for (std::size_t r = 0; r < spectra.size(); ++r) {
        for (double l : spectra[r]) out += csv_cell(l) + ",";
        out += csv_cell(vol_a[r]) + "," + csv_cell(vol_b[r]) + "\n";
    }
    return out;
}

// header: t,<name>
inline std::string grid_function_csv(const std::string& name, const std::vector<double>& ts,
                                     const std::vector<double>& values) {
    std::string out = "t," + name + "\n";
    for (std::size_t k = 0; k < ts.size(); ++k)
        out += csv_cell(ts[k]) + "," + csv_cell(values[k]) + "\n";
    return out;
}

// StarBody specs as JSON:
//   {"kind":"ql_ball","n":6,"ell":1,"q":4}
//   {"kind":"profile","n":6,"ell":1,"csv":"path"}  or inline "grid_t"/"grid_rho"
//   {"kind":"perturbed","base":{...},"coeffs":[...]}
inline StarBody star_body_from_json(const nlohmann::json& j) {
    const std::string kind = j.at("kind").get<std::string>();
    if (kind == "ql_ball") {
        return StarBody::ql_ball(j.at("n").get<int>(), j.at("ell").get<int>(),
                                 j.at("q").get<double>());
    }
    if (kind == "profile") {
        const int n = j.at("n").get<int>(), ell = j.at("ell").get<int>();
        if (j.contains("csv"))
            return StarBody::from_profile(n, ell,
                                          Profile::load_csv_file(j.at("csv").get<std::string>()));
        return StarBody::from_profile(
            n, ell,
            Profile::from_grid(j.at("grid_t").get<std::vector<double>>(),
                               j.at("grid_rho").get<std::vector<double>>()));
    }
    if (kind == "perturbed") {
        const StarBody base = star_body_from_json(j.at("base"));
        return base.perturbed(j.at("coeffs").get<std::vector<double>>());
    }
    throw std::invalid_argument("star_body_from_json: unknown kind '" + kind + "'");
}

} // namespace kltomo
