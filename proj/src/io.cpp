#include "cocoflow/io.hpp"

#include <cmath>
#include <fstream>
#include <sstream>

namespace cocoflow {

using nlohmann::json;

namespace {

std::size_t state_dim_or_throw(const Trajectory& traj) {
    if (traj.samples.empty()) throw FormatError("trajectory has no samples");
    return traj.samples.front().u.size();
}

}  // namespace

std::string trajectory_to_csv(const Trajectory& traj, const std::vector<DiagnosticsSample>& diag) {
    const std::size_t n = state_dim_or_throw(traj);
    const bool with_diag = !diag.empty();
    if (with_diag && diag.size() != traj.samples.size())
        throw FormatError("diagnostics length does not match trajectory");

    std::string out = "t";
    for (std::size_t i = 0; i < n; ++i) out += ",u_" + std::to_string(i);
    for (std::size_t i = 0; i < n; ++i) out += ",v_" + std::to_string(i);
    out += ",running_l2_velocity";
    if (with_diag) out += ",gamma0,gamma1,h,w,a_residual,d_term,eq_residual";
    out += "\n";

    for (std::size_t k = 0; k < traj.samples.size(); ++k) {
        const auto& s = traj.samples[k];
        out += fmt17(s.t);
        for (double x : s.u) out += "," + fmt17(x);
        for (double x : s.v) out += "," + fmt17(x);
        out += "," + fmt17(traj.running_l2_velocity[k]);
        if (with_diag) {
            const auto& d = diag[k];
            out += "," + fmt17(d.gamma0);
            out += "," + (d.gamma1 ? fmt17(*d.gamma1) : std::string("nan"));
            out += "," + fmt17(d.h) + "," + fmt17(d.w) + "," + fmt17(d.a_residual) + "," + fmt17(d.d_term) + "," +
                   fmt17(d.eq_residual);
        }
        out += "\n";
    }
    return out;
}

std::string trajectory_to_jsonl(const Trajectory& traj, const std::vector<DiagnosticsSample>& diag) {
    state_dim_or_throw(traj);
    const bool with_diag = !diag.empty();
    if (with_diag && diag.size() != traj.samples.size())
        throw FormatError("diagnostics length does not match trajectory");

    std::string out;
    for (std::size_t k = 0; k < traj.samples.size(); ++k) {
        const auto& s = traj.samples[k];
        json line;
        line["t"] = s.t;
        line["u"] = s.u;
        line["v"] = s.v;
        line["running_l2_velocity"] = traj.running_l2_velocity[k];
        if (with_diag) {
            const auto& d = diag[k];
            line["gamma0"] = d.gamma0;
            line["gamma1"] = d.gamma1 ? json(*d.gamma1) : json();
            line["h"] = d.h;
            line["w"] = d.w;
            line["a_residual"] = d.a_residual;
            line["d_term"] = d.d_term;
            line["eq_residual"] = d.eq_residual;
        }
        out += line.dump();
        out += "\n";
    }
    return out;
}

namespace {

std::vector<std::string> split_csv_line(const std::string& line) {
    std::vector<std::string> cells;
    std::string cur;
    for (char c : line) {
        if (c == ',') {
            cells.push_back(cur);
            cur.clear();
        } else {
            cur.push_back(c);
        }
    }
    cells.push_back(cur);
    return cells;
}

double parse_double(const std::string& cell, std::size_t row) {
    try {
        std::size_t pos = 0;
        const double v = std::stod(cell, &pos);
        if (pos != cell.size()) throw std::invalid_argument("trailing characters");
        return v;
    } catch (const std::exception&) {
        throw FormatError("row " + std::to_string(row) + ": cannot parse number '" + cell + "'");
    }
}

}  // namespace

StoredTrajectory parse_trajectory_csv(const std::string& text) {
    std::istringstream in(text);
    std::string line;
    if (!std::getline(in, line)) throw FormatError("empty CSV input");
    const auto header = split_csv_line(line);

    std::size_t n = 0;
    for (const auto& h : header)
        if (h.rfind("u_", 0) == 0) ++n;
    if (n == 0) throw FormatError("CSV header has no state columns");
    const std::size_t base_cols = 1 + 2 * n + 1;
    const bool with_diag = header.size() == base_cols + 7;
    if (!with_diag && header.size() != base_cols)
        throw FormatError("CSV header has " + std::to_string(header.size()) + " columns, expected " +
                          std::to_string(base_cols) + " or " + std::to_string(base_cols + 7));

    StoredTrajectory out;
    out.has_diagnostics = with_diag;
    std::size_t row = 1;
    while (std::getline(in, line)) {
        ++row;
        if (line.empty()) continue;
        const auto cells = split_csv_line(line);
        if (cells.size() != header.size())
            throw FormatError("row " + std::to_string(row) + ": expected " + std::to_string(header.size()) +
                              " cells, found " + std::to_string(cells.size()));
        PhaseState s;
        std::size_t c = 0;
        s.t = parse_double(cells[c++], row);
        s.u.resize(n);
        for (std::size_t i = 0; i < n; ++i) s.u[i] = parse_double(cells[c++], row);
        s.v.resize(n);
        for (std::size_t i = 0; i < n; ++i) s.v[i] = parse_double(cells[c++], row);
        out.trajectory.running_l2_velocity.push_back(parse_double(cells[c++], row));
        if (with_diag) {
            DiagnosticsSample d;
            d.t = s.t;
            d.gamma0 = parse_double(cells[c++], row);
            const std::string& g1 = cells[c++];
            if (g1 != "nan") d.gamma1 = parse_double(g1, row);
            d.h = parse_double(cells[c++], row);
            d.w = parse_double(cells[c++], row);
            d.a_residual = parse_double(cells[c++], row);
            d.d_term = parse_double(cells[c++], row);
            d.eq_residual = parse_double(cells[c++], row);
            out.diagnostics.push_back(d);
        }
        out.trajectory.samples.push_back(std::move(s));
    }
    if (out.trajectory.samples.empty()) throw FormatError("CSV has a header but no data rows");
    return out;
}

StoredTrajectory parse_trajectory_jsonl(const std::string& text) {
    StoredTrajectory out;
    std::istringstream in(text);
    std::string line;
    std::size_t row = 0;
    while (std::getline(in, line)) {
        ++row;
        if (line.empty()) continue;
        json j;
        try {
            j = json::parse(line);
        } catch (const json::parse_error& e) {
            throw FormatError("line " + std::to_string(row) + ": " + e.what());
        }
        if (!j.contains("t") || !j.contains("u") || !j.contains("v") || !j.contains("running_l2_velocity"))
            throw FormatError("line " + std::to_string(row) + ": missing trajectory fields");
        PhaseState s;
        s.t = j.at("t").get<double>();
        s.u = j.at("u").get<Vec>();
        s.v = j.at("v").get<Vec>();
        out.trajectory.running_l2_velocity.push_back(j.at("running_l2_velocity").get<double>());
        if (j.contains("gamma0")) {
            DiagnosticsSample d;
            d.t = s.t;
            d.gamma0 = j.at("gamma0").get<double>();
            if (j.contains("gamma1") && !j.at("gamma1").is_null()) d.gamma1 = j.at("gamma1").get<double>();
            d.h = j.at("h").get<double>();
            d.w = j.at("w").get<double>();
            d.a_residual = j.at("a_residual").get<double>();
            d.d_term = j.at("d_term").get<double>();
            d.eq_residual = j.at("eq_residual").get<double>();
            out.diagnostics.push_back(d);
            out.has_diagnostics = true;
        }
        out.trajectory.samples.push_back(std::move(s));
    }
    if (out.trajectory.samples.empty()) throw FormatError("JSONL input has no records");
    if (out.has_diagnostics && out.diagnostics.size() != out.trajectory.samples.size())
        throw FormatError("JSONL diagnostics present on only some lines");
    return out;
}

nlohmann::json report_to_json(const ConvergenceReport& rep) {
    json j;
    j["final_velocity_norm"] = rep.final_velocity_norm;
    j["l2_velocity_tail"] = rep.l2_velocity_tail;
    j["anchor_oscillation"] = rep.anchor_oscillation;
    j["gamma0_monotonicity_defect"] = rep.gamma0_monotonicity_defect;
    j["d_term_tail"] = rep.d_term_tail;
    j["limit_estimate"] = rep.limit_estimate;
    j["limit_residual"] = rep.limit_residual;
    j["i1_limit_in_solution_set"] = rep.i1_limit_in_solution_set;
    j["i2_velocity_vanishes"] = rep.i2_velocity_vanishes;
    j["i3_residual_integrable"] = rep.i3_residual_integrable;
    j["i4_anchor_distance_settles"] = rep.i4_anchor_distance_settles;
    j["pass"] = rep.pass;
    j["tolerances"] = {{"velocity", rep.tolerances.velocity},
                       {"l2_tail", rep.tolerances.l2_tail},
                       {"oscillation", rep.tolerances.oscillation},
                       {"residual", rep.tolerances.residual},
                       {"gamma0_defect", rep.tolerances.gamma0_defect},
                       {"tail_fraction", rep.tolerances.tail_fraction}};
    return j;
}

void write_text_file(const std::string& path, const std::string& content) {
    std::ofstream f(path, std::ios::binary);
    if (!f) throw Error("cannot open '" + path + "' for writing");
    f << content;
    if (!f) throw Error("failed writing '" + path + "'");
}

std::string read_text_file(const std::string& path) {
    std::ifstream f(path, std::ios::binary);
    if (!f) throw Error("cannot open '" + path + "' for reading");
    std::ostringstream ss;
    ss << f.rdbuf();
    return ss.str();
}

}  // namespace cocoflow
