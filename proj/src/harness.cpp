#include "carreau/harness.hpp"

#include <atomic>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <thread>

#include <json.hpp>

namespace carreau {

namespace {

std::string fmt_num(double v) {
    char buf[40];
    if (std::isnan(v)) return "NaN";
    std::snprintf(buf, sizeof(buf), "%.17g", v);
    return buf;
}

std::string fmt_short(double v) {
    char buf[40];
    std::snprintf(buf, sizeof(buf), "%g", v);
    return buf;
}

} // namespace

void StudySpec::validate() const {
    if (case_id != "test1" && case_id != "test2" && case_id != "linear")
        throw ConfigError("StudySpec: unknown case '" + case_id + "'");
    if (degree < 2 || degree > 3)
        throw ConfigError("StudySpec: degree must be 2 or 3");
    if (p_list.empty()) throw ConfigError("StudySpec: empty p list");
    for (double p : p_list)
        if (!(p > 1.0 && p <= 2.0))
            throw ConfigError("StudySpec: p must lie in (1, 2]");
    if (levels.empty()) throw ConfigError("StudySpec: empty level list");
    for (size_t k = 0; k < levels.size(); ++k) {
        if (levels[k] < 1) throw ConfigError("StudySpec: levels must be >= 1");
        if (k > 0 && levels[k] <= levels[k - 1])
            throw ConfigError("StudySpec: levels must strictly increase");
    }
    for (double s : sigma_list)
        if (s < 0.0) throw ConfigError("StudySpec: sigma entries must be >= 0");
    if (!(solver.tol > 0.0)) throw ConfigError("StudySpec: tol must be > 0");
    if (solver.max_iter < 1) throw ConfigError("StudySpec: max_iter must be >= 1");
    if (solver.r_reg < 2.0) throw ConfigError("StudySpec: r_reg must be >= 2");
    if (!(kappa > 0.0)) throw ConfigError("StudySpec: kappa must be > 0");
    if (!(eta0 > 0.0)) throw ConfigError("StudySpec: eta0 must be > 0");
    if (eta_inf < 0.0) throw ConfigError("StudySpec: eta_inf must be >= 0");
    if (!(lambda > 0.0)) throw ConfigError("StudySpec: lambda must be > 0");
    if (quad_boost < 0) throw ConfigError("StudySpec: quad_boost must be >= 0");
    if (jobs < 1) throw ConfigError("StudySpec: jobs must be >= 1");
}

std::vector<double> StudySpec::effective_sigmas() const {
    if (!sigma_list.empty()) return sigma_list;
    if (case_id == "test2") return {0.0, 1e-2, 1e-3, 1e-4, 1e-5};
    return {0.0};
}

double StudySpec::effective_eta_inf() const {
    return case_id == "test2" ? 0.0 : eta_inf;
}

std::string ConvergenceReport::file_stem() const {
    return case_id + "_deg" + std::to_string(degree) + "_p" + fmt_short(p) +
           "_sigma" + fmt_short(sigma);
}

EocTable eoc_table(const std::vector<LevelResult>& rows) {
    EocTable t;
    auto pair_eoc = [](const LevelResult& a, const LevelResult& b, double ea, double eb) {
        if (a.status != 0 || b.status != 0 || !(ea > 0.0) || !(eb > 0.0) ||
            !std::isfinite(ea) || !std::isfinite(eb))
            return std::nan("");
        return std::log(ea / eb) / std::log(a.h / b.h);
    };
    for (size_t k = 0; k + 1 < rows.size(); ++k) {
        const LevelResult& a = rows[k];
        const LevelResult& b = rows[k + 1];
        t.u_l2.push_back(pair_eoc(a, b, a.err_u_l2, b.err_u_l2));
        t.u_w1s.push_back(pair_eoc(a, b, a.err_u_w1s, b.err_u_w1s));
        t.pi.push_back(pair_eoc(a, b, a.err_pi, b.err_pi));
        t.t_h1.push_back(pair_eoc(a, b, a.err_t_h1, b.err_t_h1));
    }
    return t;
}

namespace {

LevelResult solve_level(const StudySpec& spec, double p, double sigma, int level,
                        const CoupledState* initial, CoupledState* final_state,
                        Mesh* mesh_out) {
    LevelResult row;
    row.level = level;
    row.err_u_l2 = row.err_u_w1s = row.err_pi = row.err_t_h1 = std::nan("");
    try {
        Mesh mesh = unit_square_mesh(level);
        row.h = metrics(mesh).h_max;
        DiscreteSpaces spaces(mesh, spec.degree);
        row.ndof_u = spaces.velocity.n_dofs();
        row.ndof_p = spaces.pressure.n_dofs();
        row.ndof_t = spaces.temperature.n_dofs();

        ManufacturedCase c = make_case(spec.case_id, p, spec.effective_eta_inf(),
                                       spec.eta0, spec.lambda, spec.kappa);
        SolverConfig config = spec.solver;
        config.sigma = sigma;
        config.kappa = spec.kappa;

        PicardResult result = picard_solve(spaces, c, config, initial);
        row.iters = static_cast<int>(result.log.records.size());
        switch (result.log.status) {
        case SolveStatus::Converged: row.status = 0; break;
        case SolveStatus::MaxIterReached: row.status = 1; break;
        case SolveStatus::Diverged: row.status = 2; break;
        }
        if (row.status == 0) {
            const ErrorReport err =
                error_norms(result.state, spaces, c, spec.quad_boost);
            row.err_u_l2 = err.err_u_l2;
            row.err_u_w1s = err.err_u_w1s;
            row.err_pi = err.err_pi;
            row.err_t_h1 = err.err_theta_h1;
            if (final_state) *final_state = result.state;
            if (mesh_out) *mesh_out = std::move(mesh);
        }
    } catch (const std::exception&) {
        row.status = 3;
    }
    return row;
}

/// Nodal transfer of a converged state onto the next level's spaces.
CoupledState carry_state(const CoupledState& prev, const Mesh& prev_mesh,
                         int degree, const DiscreteSpaces& next) {
    DiscreteSpaces coarse(prev_mesh, degree);
    PointLocator loc(prev_mesh);
    CoupledState init;
    init.u = interpolate_velocity(next.velocity, [&](const Vec2& x) {
        return eval_velocity_at(coarse.velocity, prev.u, loc, x);
    });
    init.pi = interpolate_scalar(next.pressure, [&](const Vec2& x) {
        return eval_scalar_at(coarse.pressure, prev.pi, loc, x);
    });
    init.theta = interpolate_scalar(next.temperature, [&](const Vec2& x) {
        return eval_scalar_at(coarse.temperature, prev.theta, loc, x);
    });
    return init;
}

void fill_metadata(ConvergenceReport& r, const StudySpec& spec) {
    const double s = (spec.effective_eta_inf() > 0.0) ? 2.0 : r.p;
    r.metadata["tool_version"] = "0.1.0";
    r.metadata["case"] = r.case_id;
    r.metadata["degree_velocity"] = std::to_string(spec.degree);
    r.metadata["degree_pressure"] = std::to_string(spec.degree - 1);
    r.metadata["p"] = fmt_short(r.p);
    r.metadata["sigma"] = fmt_short(r.sigma);
    r.metadata["sigma_term_scaled_by_nu"] = "true";
    r.metadata["r_reg"] = fmt_short(spec.solver.r_reg);
    r.metadata["eta_inf"] = fmt_short(spec.effective_eta_inf());
    r.metadata["eta0"] = fmt_short(spec.eta0);
    r.metadata["lambda"] = fmt_short(spec.lambda);
    r.metadata["kappa"] = fmt_short(spec.kappa);
    r.metadata["tol"] = fmt_short(spec.solver.tol);
    r.metadata["max_iter"] = std::to_string(spec.solver.max_iter);
    r.metadata["stopping_norm_s"] = fmt_short(s);
    r.metadata["quad_exactness_assembly"] =
        std::to_string(spec.solver.exactness_for(spec.degree));
    r.metadata["quad_exactness_errors"] = std::to_string(
        std::min(kMaxQuadratureExactness,
                 default_assembly_exactness(spec.degree) + spec.quad_boost));
    r.metadata["warm_start"] = spec.solver.warm_start ? "true" : "false";
}

} // namespace

std::vector<ConvergenceReport> run_study_in_memory(const StudySpec& spec) {
    spec.validate();

    struct Combo {
        double p;
        double sigma;
    };
    std::vector<Combo> combos;
    for (double p : spec.p_list)
        for (double sigma : spec.effective_sigmas()) combos.push_back({p, sigma});

    std::vector<ConvergenceReport> reports(combos.size());
    for (size_t i = 0; i < combos.size(); ++i) {
        reports[i].case_id = spec.case_id;
        reports[i].degree = spec.degree;
        reports[i].p = combos[i].p;
        reports[i].sigma = combos[i].sigma;
        reports[i].rows.resize(spec.levels.size());
        fill_metadata(reports[i], spec);
    }

    if (spec.solver.warm_start || spec.jobs == 1) {
        // Levels of one combo run in order so a converged state can seed the
        // next level; combos are independent.
        std::atomic<size_t> next{0};
        auto worker = [&] {
            for (size_t i = next.fetch_add(1); i < combos.size(); i = next.fetch_add(1)) {
                CoupledState carried;
                Mesh carried_mesh;
                bool have_state = false;
                for (size_t k = 0; k < spec.levels.size(); ++k) {
                    CoupledState state;
                    Mesh mesh;
                    const CoupledState* init = nullptr;
                    CoupledState mapped;
                    if (spec.solver.warm_start && have_state) {
                        try {
                            Mesh fine = unit_square_mesh(spec.levels[k]);
                            DiscreteSpaces fine_spaces(fine, spec.degree);
                            mapped = carry_state(carried, carried_mesh, spec.degree,
                                                 fine_spaces);
                            init = &mapped;
                        } catch (const std::exception&) {
                            init = nullptr;  // fall back to a cold start
                        }
                    }
                    reports[i].rows[k] = solve_level(spec, combos[i].p, combos[i].sigma,
                                                     spec.levels[k], init, &state, &mesh);
                    if (reports[i].rows[k].status == 0) {
                        carried = std::move(state);
                        carried_mesh = std::move(mesh);
                        have_state = true;
                    } else {
                        have_state = false;
                    }
                }
            }
        };
        const int nthreads = std::min<size_t>(spec.jobs, combos.size());
        std::vector<std::thread> pool;
        for (int t = 1; t < nthreads; ++t) pool.emplace_back(worker);
        worker();
        for (auto& t : pool) t.join();
    } else {
        struct Task {
            size_t combo;
            size_t level;
        };
        std::vector<Task> tasks;
        for (size_t i = 0; i < combos.size(); ++i)
            for (size_t k = 0; k < spec.levels.size(); ++k) tasks.push_back({i, k});
        std::atomic<size_t> next{0};
        auto worker = [&] {
            for (size_t t = next.fetch_add(1); t < tasks.size(); t = next.fetch_add(1)) {
                const Task& task = tasks[t];
                reports[task.combo].rows[task.level] =
                    solve_level(spec, combos[task.combo].p, combos[task.combo].sigma,
                                spec.levels[task.level], nullptr, nullptr, nullptr);
            }
        };
        const int nthreads = std::min<size_t>(spec.jobs, tasks.size());
        std::vector<std::thread> pool;
        for (int t = 1; t < nthreads; ++t) pool.emplace_back(worker);
        worker();
        for (auto& t : pool) t.join();
    }

    return reports;
}

std::vector<ConvergenceReport> run_study(const StudySpec& spec) {
    std::vector<ConvergenceReport> reports = run_study_in_memory(spec);

    namespace fs = std::filesystem;
    std::error_code ec;
    fs::create_directories(spec.out_dir, ec);
    if (ec) throw std::runtime_error("run_study: cannot create '" + spec.out_dir + "'");

    for (const ConvergenceReport& r : reports) {
        const std::string stem = (fs::path(spec.out_dir) / r.file_stem()).string();
        emit_csv(r, stem + ".csv");

        nlohmann::json meta;
        for (const auto& [k, v] : r.metadata) meta[k] = v;
        std::ofstream mf(stem + ".meta.json");
        if (!mf) throw std::runtime_error("run_study: cannot write " + stem + ".meta.json");
        mf << meta.dump(2) << "\n";

        int ok = 0;
        for (const LevelResult& row : r.rows)
            if (row.status == 0) ++ok;
        if (ok >= 2) emit_loglog_svg(r, stem + ".svg");
    }
    return reports;
}

std::string report_csv(const ConvergenceReport& report) {
    std::string s = "level,h,ndof_u,ndof_p,ndof_t,iters,err_u_l2,err_u_w1s,err_pi,"
                    "err_t_h1,status\n";
    char buf[512];
    for (const LevelResult& r : report.rows) {
        std::snprintf(buf, sizeof(buf), "%d,%s,%d,%d,%d,%d,%s,%s,%s,%s,%d\n", r.level,
                      fmt_num(r.h).c_str(), r.ndof_u, r.ndof_p, r.ndof_t, r.iters,
                      fmt_num(r.err_u_l2).c_str(), fmt_num(r.err_u_w1s).c_str(),
                      fmt_num(r.err_pi).c_str(), fmt_num(r.err_t_h1).c_str(), r.status);
        s += buf;
    }
    return s;
}

void emit_csv(const ConvergenceReport& report, const std::string& path) {
    std::ofstream f(path, std::ios::binary);
    if (!f) throw std::runtime_error("emit_csv: cannot open " + path);
    f << report_csv(report);
    if (!f) throw std::runtime_error("emit_csv: write failed for " + path);
}

std::vector<LevelResult> parse_csv_rows(const std::string& csv_text) {
    std::istringstream in(csv_text);
    std::string line;
    if (!std::getline(in, line) || line.rfind("level,h,", 0) != 0)
        throw std::runtime_error("parse_csv_rows: missing header");
    std::vector<LevelResult> rows;
    while (std::getline(in, line)) {
        if (line.empty()) continue;
        std::vector<std::string> cells;
        std::string cell;
        std::istringstream ls(line);
        while (std::getline(ls, cell, ',')) cells.push_back(cell);
        if (cells.size() != 11)
            throw std::runtime_error("parse_csv_rows: expected 11 columns");
        LevelResult r;
        r.level = std::atoi(cells[0].c_str());
        r.h = std::strtod(cells[1].c_str(), nullptr);
        r.ndof_u = std::atoi(cells[2].c_str());
        r.ndof_p = std::atoi(cells[3].c_str());
        r.ndof_t = std::atoi(cells[4].c_str());
        r.iters = std::atoi(cells[5].c_str());
        r.err_u_l2 = std::strtod(cells[6].c_str(), nullptr);
        r.err_u_w1s = std::strtod(cells[7].c_str(), nullptr);
        r.err_pi = std::strtod(cells[8].c_str(), nullptr);
        r.err_t_h1 = std::strtod(cells[9].c_str(), nullptr);
        r.status = std::atoi(cells[10].c_str());
        rows.push_back(r);
    }
    return rows;
}

namespace {

struct Series {
    const char* label;
    const char* color;
    std::vector<std::pair<double, double>> pts;  // (h, err)
};

} // namespace

std::string report_svg(const ConvergenceReport& report) {
    std::vector<const LevelResult*> ok;
    for (const LevelResult& r : report.rows)
        if (r.status == 0 && std::isfinite(r.err_u_w1s)) ok.push_back(&r);
    if (ok.size() < 2)
        throw std::invalid_argument("report_svg: need at least 2 successful levels");

    std::vector<Series> series = {
        {"u L2", "#1f77b4", {}},
        {"u W1s", "#d62728", {}},
        {"pi Ls'", "#2ca02c", {}},
        {"theta H1", "#9467bd", {}},
    };
    for (const LevelResult* r : ok) {
        series[0].pts.push_back({r->h, r->err_u_l2});
        series[1].pts.push_back({r->h, r->err_u_w1s});
        series[2].pts.push_back({r->h, r->err_pi});
        series[3].pts.push_back({r->h, r->err_t_h1});
    }

    // Reference slope from the two finest successful levels of err_u_w1s.
    const LevelResult* fine = ok.back();
    const LevelResult* prev = ok[ok.size() - 2];
    const double slope = std::log(prev->err_u_w1s / fine->err_u_w1s) /
                         std::log(prev->h / fine->h);

    double lx0 = 1e300, lx1 = -1e300, ly0 = 1e300, ly1 = -1e300;
    for (const Series& s : series)
        for (auto [h, e] : s.pts) {
            if (!(e > 0.0) || !std::isfinite(e)) continue;
            lx0 = std::min(lx0, std::log10(h));
            lx1 = std::max(lx1, std::log10(h));
            ly0 = std::min(ly0, std::log10(e));
            ly1 = std::max(ly1, std::log10(e));
        }
    if (lx1 - lx0 < 1e-12) lx1 = lx0 + 1.0;
    if (ly1 - ly0 < 1e-12) ly1 = ly0 + 1.0;

    const double W = 640, H = 480, ml = 70, mr = 160, mt = 30, mb = 50;
    const double pw = W - ml - mr, ph = H - mt - mb;
    auto X = [&](double h) { return ml + (std::log10(h) - lx0) / (lx1 - lx0) * pw; };
    auto Y = [&](double e) { return mt + (ly1 - std::log10(e)) / (ly1 - ly0) * ph; };

    std::ostringstream svg;
    svg << "<?xml version=\"1.0\" encoding=\"UTF-8\"?>\n";
    svg << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << W << "\" height=\""
        << H << "\" viewBox=\"0 0 " << W << " " << H << "\">\n";
    svg << "  <rect x=\"" << ml << "\" y=\"" << mt << "\" width=\"" << pw
        << "\" height=\"" << ph << "\" fill=\"none\" stroke=\"black\"/>\n";

    char buf[256];
    // Ticks at powers of ten covering the data range.
    for (int ex = static_cast<int>(std::ceil(lx0 - 1e-9));
         ex <= static_cast<int>(std::floor(lx1 + 1e-9)); ++ex) {
        const double x = X(std::pow(10.0, ex));
        std::snprintf(buf, sizeof(buf),
                      "  <line x1=\"%.1f\" y1=\"%.1f\" x2=\"%.1f\" y2=\"%.1f\" "
                      "stroke=\"black\"/>\n",
                      x, mt + ph, x, mt + ph + 6);
        svg << buf;
        std::snprintf(buf, sizeof(buf),
                      "  <text x=\"%.1f\" y=\"%.1f\" font-size=\"12\" "
                      "text-anchor=\"middle\">1e%d</text>\n",
                      x, mt + ph + 20, ex);
        svg << buf;
    }
    for (int ey = static_cast<int>(std::ceil(ly0 - 1e-9));
         ey <= static_cast<int>(std::floor(ly1 + 1e-9)); ++ey) {
        const double y = Y(std::pow(10.0, ey));
        std::snprintf(buf, sizeof(buf),
                      "  <line x1=\"%.1f\" y1=\"%.1f\" x2=\"%.1f\" y2=\"%.1f\" "
                      "stroke=\"black\"/>\n",
                      ml - 6, y, ml, y);
        svg << buf;
        std::snprintf(buf, sizeof(buf),
                      "  <text x=\"%.1f\" y=\"%.1f\" font-size=\"12\" "
                      "text-anchor=\"end\">1e%d</text>\n",
                      ml - 10, y + 4, ey);
        svg << buf;
    }

    int legend_row = 0;
    for (const Series& s : series) {
        std::ostringstream pts;
        bool any = false;
        for (auto [h, e] : s.pts) {
            if (!(e > 0.0) || !std::isfinite(e)) continue;
            pts << X(h) << "," << Y(e) << " ";
            any = true;
        }
        if (!any) continue;
        svg << "  <polyline fill=\"none\" stroke=\"" << s.color
            << "\" stroke-width=\"1.5\" points=\"" << pts.str() << "\"/>\n";
        std::snprintf(buf, sizeof(buf),
                      "  <text x=\"%.1f\" y=\"%.1f\" font-size=\"12\" fill=\"%s\">%s</text>\n",
                      W - mr + 10, mt + 16.0 + 16.0 * legend_row, s.color, s.label);
        svg << buf;
        ++legend_row;
    }

    // Dotted reference line e = C h^slope anchored below the finest point.
    {
        const double C = fine->err_u_w1s * 0.5 / std::pow(fine->h, slope);
        const double h0 = fine->h, h1 = prev->h * (prev->h / fine->h);
        const double e0 = C * std::pow(h0, slope);
        const double e1 = C * std::pow(h1, slope);
        std::snprintf(buf, sizeof(buf),
                      "  <line x1=\"%.1f\" y1=\"%.1f\" x2=\"%.1f\" y2=\"%.1f\" "
                      "stroke=\"black\" stroke-dasharray=\"4 3\"/>\n",
                      X(h0), Y(e0), X(h1), Y(e1));
        svg << buf;
        std::snprintf(buf, sizeof(buf),
                      "  <text x=\"%.1f\" y=\"%.1f\" font-size=\"12\">slope %.2f</text>\n",
                      X(h1) + 6, Y(e1), slope);
        svg << buf;
    }

    std::snprintf(buf, sizeof(buf),
                  "  <text x=\"%.1f\" y=\"%.1f\" font-size=\"13\" "
                  "text-anchor=\"middle\">h</text>\n",
                  ml + pw / 2, H - 12.0);
    svg << buf;
    std::snprintf(buf, sizeof(buf),
                  "  <text x=\"%.1f\" y=\"%.1f\" font-size=\"13\">%s</text>\n", 8.0,
                  mt + 14.0, "error");
    svg << buf;
    svg << "</svg>\n";
    return svg.str();
}

void emit_loglog_svg(const ConvergenceReport& report, const std::string& path) {
    std::ofstream f(path, std::ios::binary);
    if (!f) throw std::runtime_error("emit_loglog_svg: cannot open " + path);
    f << report_svg(report);
    if (!f) throw std::runtime_error("emit_loglog_svg: write failed for " + path);
}

namespace {

std::string trim(const std::string& s) {
    size_t a = s.find_first_not_of(" \t\r\n");
    if (a == std::string::npos) return "";
    size_t b = s.find_last_not_of(" \t\r\n");
    return s.substr(a, b - a + 1);
}

double parse_double(const std::string& s, int line_no) {
    char* end = nullptr;
    const std::string t = trim(s);
    const double v = std::strtod(t.c_str(), &end);
    if (t.empty() || end != t.c_str() + t.size())
        throw ConfigError("config line " + std::to_string(line_no) +
                          ": cannot parse number '" + t + "'");
    return v;
}

int parse_int(const std::string& s, int line_no) {
    const double v = parse_double(s, line_no);
    if (v != std::floor(v))
        throw ConfigError("config line " + std::to_string(line_no) +
                          ": expected an integer, got '" + trim(s) + "'");
    return static_cast<int>(v);
}

bool parse_bool(const std::string& s, int line_no) {
    const std::string t = trim(s);
    if (t == "true" || t == "1") return true;
    if (t == "false" || t == "0") return false;
    throw ConfigError("config line " + std::to_string(line_no) +
                      ": expected true/false, got '" + t + "'");
}

std::vector<std::string> split_list(const std::string& s) {
    std::vector<std::string> out;
    std::string cell;
    std::istringstream in(s);
    while (std::getline(in, cell, ',')) out.push_back(cell);
    return out;
}

} // namespace

StudySpec parse_config(const std::string& path) {
    std::ifstream f(path);
    if (!f) throw ConfigError("parse_config: cannot read '" + path + "'");

    StudySpec spec;
    std::string section;
    std::string line;
    int line_no = 0;
    while (std::getline(f, line)) {
        ++line_no;
        const std::string t = trim(line);
        if (t.empty() || t[0] == '#' || t[0] == ';') continue;
        if (t.front() == '[') {
            if (t.back() != ']')
                throw ConfigError("config line " + std::to_string(line_no) +
                                  ": malformed section header");
            section = trim(t.substr(1, t.size() - 2));
            if (section != "case" && section != "solver" && section != "mesh" &&
                section != "output")
                throw ConfigError("config line " + std::to_string(line_no) +
                                  ": unknown section [" + section + "]");
            continue;
        }
        const size_t eq = t.find('=');
        if (eq == std::string::npos)
            throw ConfigError("config line " + std::to_string(line_no) +
                              ": expected key = value");
        const std::string key = trim(t.substr(0, eq));
        const std::string value = trim(t.substr(eq + 1));
        if (section.empty())
            throw ConfigError("config line " + std::to_string(line_no) +
                              ": key outside any section");

        if (section == "case") {
            if (key == "id") {
                spec.case_id = value;
            } else if (key == "p") {
                spec.p_list.clear();
                for (const std::string& c : split_list(value))
                    spec.p_list.push_back(parse_double(c, line_no));
            } else if (key == "degree") {
                spec.degree = parse_int(value, line_no);
            } else if (key == "eta_inf") {
                spec.eta_inf = parse_double(value, line_no);
            } else if (key == "eta0") {
                spec.eta0 = parse_double(value, line_no);
            } else if (key == "lambda") {
                spec.lambda = parse_double(value, line_no);
            } else if (key == "kappa") {
                spec.kappa = parse_double(value, line_no);
            } else if (key == "sigma") {
                spec.sigma_list.clear();
                for (const std::string& c : split_list(value))
                    spec.sigma_list.push_back(parse_double(c, line_no));
            } else {
                throw ConfigError("config line " + std::to_string(line_no) +
                                  ": unknown key '" + key + "' in [case]");
            }
        } else if (section == "solver") {
            if (key == "tol") {
                spec.solver.tol = parse_double(value, line_no);
            } else if (key == "max_iter") {
                spec.solver.max_iter = parse_int(value, line_no);
            } else if (key == "r_reg") {
                spec.solver.r_reg = parse_double(value, line_no);
            } else if (key == "quad_exactness") {
                spec.solver.quad_exactness = parse_int(value, line_no);
            } else if (key == "quad_boost") {
                spec.quad_boost = parse_int(value, line_no);
            } else if (key == "warm_start") {
                spec.solver.warm_start = parse_bool(value, line_no);
            } else if (key == "jobs") {
                spec.jobs = parse_int(value, line_no);
            } else {
                throw ConfigError("config line " + std::to_string(line_no) +
                                  ": unknown key '" + key + "' in [solver]");
            }
        } else if (section == "mesh") {
            if (key == "levels") {
                spec.levels.clear();
                for (const std::string& c : split_list(value))
                    spec.levels.push_back(parse_int(c, line_no));
            } else {
                throw ConfigError("config line " + std::to_string(line_no) +
                                  ": unknown key '" + key + "' in [mesh]");
            }
        } else if (section == "output") {
            if (key == "dir") {
                spec.out_dir = value;
            } else {
                throw ConfigError("config line " + std::to_string(line_no) +
                                  ": unknown key '" + key + "' in [output]");
            }
        }
    }

    spec.validate();
    return spec;
}

} // namespace carreau
