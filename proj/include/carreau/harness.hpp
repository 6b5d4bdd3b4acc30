#pragma once

#include <map>
#include <string>
#include <vector>

#include "carreau/solver.hpp"

namespace carreau {

/// Configuration error (bad file, unknown key, invalid value). The message
/// carries the offending line number when it comes from a config file.
class ConfigError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// One convergence study: a sweep over p values, regularization strengths
/// and mesh levels for a single case and element pair.
struct StudySpec {
    std::string case_id = "test1";
    std::vector<double> p_list = {1.6};
    int degree = 2;  // velocity/temperature degree; pressure is one lower
    std::vector<int> levels = {8, 16, 32, 64};
    std::vector<double> sigma_list;  // empty selects the case default
    double eta_inf = 0.5;
    double eta0 = 2.0;
    double lambda = 1.0;
    double kappa = 1.0;
    int quad_boost = 4;  // extra exactness for error norms
    SolverConfig solver;
    std::string out_dir = "results";
    int jobs = 1;

    void validate() const;
    std::vector<double> effective_sigmas() const;
    double effective_eta_inf() const;  // test2 forces eta_inf = 0
};

struct LevelResult {
    int level = 0;
    double h = 0.0;
    int ndof_u = 0, ndof_p = 0, ndof_t = 0;
    int iters = 0;
    double err_u_l2 = 0.0, err_u_w1s = 0.0, err_pi = 0.0, err_t_h1 = 0.0;
    int status = 0;  // 0 converged, 1 max_iter, 2 diverged, 3 solver error
};

/// Per (p, sigma) results over all mesh levels, plus run metadata.
struct ConvergenceReport {
    std::string case_id;
    int degree = 2;
    double p = 1.6;
    double sigma = 0.0;
    std::vector<LevelResult> rows;
    std::map<std::string, std::string> metadata;

    std::string file_stem() const;
};

/// EOC sequences (one entry per consecutive level pair, NaN across failed
/// rows) for the four error columns.
struct EocTable {
    std::vector<double> u_l2, u_w1s, pi, t_h1;
};

EocTable eoc_table(const std::vector<LevelResult>& rows);

/// Runs every (p, sigma, level) combination and writes one CSV, SVG and
/// metadata JSON per (p, sigma) into spec.out_dir. Solver failures degrade
/// to NaN rows. Throws on I/O failure.
std::vector<ConvergenceReport> run_study(const StudySpec& spec);

/// Compute-only variant of run_study (no files written).
std::vector<ConvergenceReport> run_study_in_memory(const StudySpec& spec);

/// CSV with the fixed header
/// level,h,ndof_u,ndof_p,ndof_t,iters,err_u_l2,err_u_w1s,err_pi,err_t_h1,status
/// and 17-significant-digit, locale-independent numbers.
std::string report_csv(const ConvergenceReport& report);
void emit_csv(const ConvergenceReport& report, const std::string& path);
std::vector<LevelResult> parse_csv_rows(const std::string& csv_text);

/// Log-log SVG of the four error families against h, with a dotted
/// reference line whose slope comes from the two finest successful levels.
/// Requires at least 2 successful levels.
std::string report_svg(const ConvergenceReport& report);
void emit_loglog_svg(const ConvergenceReport& report, const std::string& path);

/// key = value configuration with sections [case], [solver], [mesh],
/// [output]. Unknown sections or keys are hard errors; messages carry line
/// numbers. An empty file yields the default spec.
StudySpec parse_config(const std::string& path);

} // namespace carreau
