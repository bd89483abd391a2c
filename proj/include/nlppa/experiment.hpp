#ifndef NLPPA_EXPERIMENT_HPP
#define NLPPA_EXPERIMENT_HPP

#include <algorithm>
#include <atomic>
#include <chrono>
#include <cstring>
#include <cstdint>
#include <cmath>
#include <ctime>
#include <limits>
#include <filesystem>
#include <fstream>
#include <iomanip>
#include <iostream>
#include <mutex>
#include <optional>
#include <sstream>
#include <string>
#include <thread>
#include <tuple>
#include <utility>
#include <vector>

#include <json.hpp>

#include "nlppa/diagnostics.hpp"
#include "nlppa/pc_method.hpp"
#include "nlppa/qcqp.hpp"
#include "nlppa/qcqp_oracle.hpp"
#include "nlppa/relaxed_ppa.hpp"

namespace nlppa::experiment
{

/// One solver configuration of the comparison.
struct MethodSpec
{
    std::string name = "rppa"; // "ppa", "rppa" or "pc"
    double mu1 = 9.0;
    double mu2 = 1.2;
    double gamma = 1.5;
    Corrector corrector = Corrector::LowerTriangular;
};

inline MethodSpec default_method(const std::string& name)
{
    MethodSpec ms;
    ms.name = name;
    if (name == "ppa") {
        ms.gamma = 1.0;
    } else if (name == "rppa") {
        ms.gamma = 1.5;
    } else if (name == "pc") {
        ms.gamma = 1.0;
    } else {
        throw InvalidParameter("unknown method '" + name + "' (expected ppa, rppa or pc)");
    }
    return ms;
}

struct ExperimentConfig
{
    std::vector<std::pair<Index, Index>> grid; // (m, n)
    int seeds = 20;
    std::vector<MethodSpec> methods;
    double tau = 1e-10;
    /// Extra stopping condition on the KKT residual; infinity disables it.
    double kkt_tol = std::numeric_limits<double>::infinity();
    long max_iters = 100000;
    bool diagnostics = false;
    bool compat_signs = false;
    bool series = false; // series files for the first seed of every cell
    int jobs = 1;
    std::string out_dir = "nlppa_out";

    static ExperimentConfig defaults()
    {
        ExperimentConfig cfg;
        for (Index m : {10, 20, 30})
            for (Index n : {30, 60, 90}) cfg.grid.emplace_back(m, n);
        cfg.methods = {default_method("ppa"), default_method("rppa"), default_method("pc")};
        return cfg;
    }

    void validate() const
    {
        if (grid.empty()) throw InvalidParameter("experiment: empty grid");
        for (const auto& [m, n] : grid) {
            if (m < 0 || n < 1) throw InvalidParameter("experiment: grid cells need m >= 0 and n >= 1");
        }
        if (seeds < 1) throw InvalidParameter("experiment: seeds must be at least 1");
        if (methods.empty()) throw InvalidParameter("experiment: no methods selected");
        if (!(tau > 0.0)) throw InvalidParameter("experiment: tau must be positive");
        if (!(kkt_tol > 0.0)) throw InvalidParameter("experiment: kkt_tol must be positive");
        if (max_iters < 1) throw InvalidParameter("experiment: max_iters must be at least 1");
        if (jobs < 1) throw InvalidParameter("experiment: jobs must be at least 1");
    }
};

/// Seeds of a cell are 1..cfg.seeds.
inline std::uint64_t seed_value(int index) { return static_cast<std::uint64_t>(index) + 1; }

/// One row of the results table.
struct CellResult
{
    Index m = 0;
    Index n = 0;
    std::uint64_t seed = 0;
    std::size_t method_index = 0;
    MethodSpec method;
    long iterations = 0;
    double time_s = 0.0;
    double cpu_s = 0.0;
    double error = 0.0;
    bool converged = false;
    double f_final = 0.0;
    double kkt = 0.0;
    std::string status = "ok"; // ok | not_converged | error: <message>
};

inline RunResult run_method(const ProblemSpec& p, const MethodSpec& ms, double tau, long max_iters,
                            bool diagnostics = false, double kkt_tol = std::numeric_limits<double>::infinity())
{
    if (ms.name == "ppa" || ms.name == "rppa") {
        RelaxedPpaConfig cfg;
        cfg.gamma = ms.gamma;
        cfg.tau = tau;
        cfg.kkt_tol = kkt_tol;
        cfg.max_iters = max_iters;
        cfg.rule = AdaptiveRule{ms.mu1, ms.mu2};
        cfg.diagnostics = diagnostics;
        return run_relaxed_ppa(p, cfg);
    }
    if (ms.name == "pc") {
        PcConfig cfg;
        cfg.gamma = ms.gamma;
        cfg.tau = tau;
        cfg.kkt_tol = kkt_tol;
        cfg.max_iters = max_iters;
        cfg.corrector = ms.corrector;
        cfg.rule = AdaptiveRule{ms.mu1, ms.mu2};
        cfg.diagnostics = diagnostics;
        return run_pc(p, cfg);
    }
    throw InvalidParameter("unknown method '" + ms.name + "'");
}

/// Deterministic rerun of one method on a serialized instance.
inline RunResult replay(const qcqp::Instance& inst, const MethodSpec& ms, double tau, long max_iters,
                        bool compat_signs = false, double kkt_tol = std::numeric_limits<double>::infinity())
{
    return run_method(qcqp::qcqp_problem(inst, compat_signs), ms, tau, max_iters, false, kkt_tol);
}

inline RunResult replay(const std::string& instance_file, const MethodSpec& ms, double tau, long max_iters,
                        bool compat_signs = false, double kkt_tol = std::numeric_limits<double>::infinity())
{
    std::ifstream in(instance_file);
    if (!in) throw InvalidInput("cannot open '" + instance_file + "'");
    std::stringstream buf;
    buf << in.rdbuf();
    return replay(qcqp::parse_instance(buf.str()), ms, tau, max_iters, compat_signs, kkt_tol);
}

// ---------------------------------------------------------------------------
// Serialization of configs and runs

inline nlohmann::json to_json(const MethodSpec& ms)
{
    return {{"name", ms.name},
            {"mu1", ms.mu1},
            {"mu2", ms.mu2},
            {"gamma", ms.gamma},
            {"corrector", corrector_name(ms.corrector)}};
}

inline MethodSpec method_from_json(const nlohmann::json& j)
{
    MethodSpec ms = default_method(qcqp::detail::require(j, "name", "method").get<std::string>());
    ms.mu1 = qcqp::detail::require(j, "mu1", "method").get<double>();
    ms.mu2 = qcqp::detail::require(j, "mu2", "method").get<double>();
    ms.gamma = qcqp::detail::require(j, "gamma", "method").get<double>();
    const auto c = qcqp::detail::require(j, "corrector", "method").get<std::string>();
    if (c != "upper" && c != "lower") throw FormatError("method: corrector must be 'upper' or 'lower'");
    ms.corrector = c == "upper" ? Corrector::UpperTriangular : Corrector::LowerTriangular;
    return ms;
}

/// Everything that determines the numbers in the output (the output directory does not).
inline nlohmann::json to_json(const ExperimentConfig& cfg)
{
    nlohmann::json j;
    j["grid"] = nlohmann::json::array();
    for (const auto& [m, n] : cfg.grid) j["grid"].push_back({m, n});
    j["seeds"] = cfg.seeds;
    j["methods"] = nlohmann::json::array();
    for (const auto& ms : cfg.methods) j["methods"].push_back(to_json(ms));
    j["tau"] = cfg.tau;
    if (std::isfinite(cfg.kkt_tol)) j["kkt_tol"] = cfg.kkt_tol;
    j["max_iters"] = cfg.max_iters;
    j["diagnostics"] = cfg.diagnostics;
    j["compat_signs"] = cfg.compat_signs;
    j["series"] = cfg.series;
    return j;
}

/// 64-bit FNV-1a of the canonical (sorted-key, compact) config JSON, as 16 hex digits.
inline std::string config_hash(const ExperimentConfig& cfg)
{
    std::uint64_t h = 0xcbf29ce484222325ULL;
    for (unsigned char ch : to_json(cfg).dump()) {
        h ^= ch;
        h *= 0x100000001b3ULL;
    }
    std::ostringstream os;
    os << std::hex << std::setw(16) << std::setfill('0') << h;
    return os.str();
}

/// Saved run: method, solver settings, iteration count and final point.
inline nlohmann::json run_record(const std::string& instance_file, const MethodSpec& ms, double tau, long max_iters,
                                 bool compat_signs, const RunResult& res,
                                 double kkt_tol = std::numeric_limits<double>::infinity())
{
    nlohmann::json j = {{"kind", "run"},
            {"instance", instance_file},
            {"method", to_json(ms)},
            {"tau", tau},
            {"max_iters", max_iters},
            {"compat_signs", compat_signs},
            {"iterations", res.iterations},
            {"converged", res.converged},
            {"x", qcqp::detail::vector_to_json(res.w.x)},
            {"lambda", qcqp::detail::vector_to_json(res.w.lambda)}};
    if (std::isfinite(kkt_tol)) j["kkt_tol"] = kkt_tol;
    return j;
}

/// Outcome of replaying a saved run record.
struct ReplayCheck
{
    RunResult result;
    long expected_iterations = 0;
    bool identical = false;
};

inline bool bitwise_equal(const Vec& a, const std::vector<double>& b)
{
    if (static_cast<std::size_t>(a.size()) != b.size()) return false;
    for (std::size_t i = 0; i < b.size(); ++i) {
        if (std::memcmp(&a[static_cast<Index>(i)], &b[i], sizeof(double)) != 0) return false;
    }
    return true;
}

/// Reruns a run record; its instance path is resolved relative to the record's directory.
inline ReplayCheck replay_record(const std::string& run_file)
{
    std::ifstream in(run_file);
    if (!in) throw InvalidInput("cannot open '" + run_file + "'");
    nlohmann::json j;
    try {
        j = nlohmann::json::parse(in);
    } catch (const nlohmann::json::parse_error& e) {
        throw FormatError("run record parse error at byte " + std::to_string(e.byte) + ": " + e.what());
    }
    const std::string where = "run record";
    std::filesystem::path inst_path = qcqp::detail::require(j, "instance", where).get<std::string>();
    if (inst_path.is_relative()) inst_path = std::filesystem::path(run_file).parent_path() / inst_path;
    const MethodSpec ms = method_from_json(qcqp::detail::require(j, "method", where));

    ReplayCheck out;
    out.result = replay(inst_path.string(), ms, qcqp::detail::require(j, "tau", where).get<double>(),
                        qcqp::detail::require(j, "max_iters", where).get<long>(),
                        j.value("compat_signs", false),
                        j.value("kkt_tol", std::numeric_limits<double>::infinity()));
    out.expected_iterations = qcqp::detail::require(j, "iterations", where).get<long>();
    const auto x = qcqp::detail::require(j, "x", where).get<std::vector<double>>();
    out.identical = out.result.iterations == out.expected_iterations && bitwise_equal(out.result.w.x, x);
    return out;
}

// ---------------------------------------------------------------------------
// Table

inline std::string cell_stem(Index m, Index n, std::uint64_t seed)
{
    return "m" + std::to_string(m) + "_n" + std::to_string(n) + "_s" + std::to_string(seed);
}

namespace detail
{

inline CellResult run_cell(const ExperimentConfig& cfg, Index m, Index n, std::uint64_t seed, std::size_t mi,
                           const qcqp::Instance& inst, RunResult* keep = nullptr)
{
    CellResult row;
    row.m = m;
    row.n = n;
    row.seed = seed;
    row.method_index = mi;
    row.method = cfg.methods[mi];
    try {
        const ProblemSpec p = qcqp::qcqp_problem(inst, cfg.compat_signs);
        RunResult res = run_method(p, row.method, cfg.tau, cfg.max_iters, false, cfg.kkt_tol);
        row.iterations = res.iterations;
        row.time_s = res.total_seconds;
        row.cpu_s = res.max_subproblem_seconds;
        row.error = res.final_error;
        row.converged = res.converged;
        row.f_final = p.objective(res.w.x);
        row.kkt = kkt_residual(p, res.w).value;
        row.status = res.converged ? "ok" : "not_converged";
        if (keep) *keep = std::move(res);
    } catch (const SolverError& e) {
        row.iterations = e.iteration() >= 0 ? e.iteration() : 0;
        row.status = std::string("error: ") + e.what();
    } catch (const std::exception& e) {
        row.status = std::string("error: ") + e.what();
    }
    return row;
}

inline double median(std::vector<double> v)
{
    if (v.empty()) return std::numeric_limits<double>::quiet_NaN();
    std::sort(v.begin(), v.end());
    const std::size_t h = v.size() / 2;
    return v.size() % 2 ? v[h] : 0.5 * (v[h - 1] + v[h]);
}

inline std::string csv_quote(const std::string& s)
{
    if (s.find_first_of(",\"\n") == std::string::npos) return s;
    std::string out = "\"";
    for (char c : s) {
        if (c == '"') out += '"';
        out += c;
    }
    return out + "\"";
}

} // namespace detail

/// Sort key: (m, n, seed, method position in the config).
inline void sort_rows(std::vector<CellResult>& rows)
{
    std::sort(rows.begin(), rows.end(), [](const CellResult& a, const CellResult& b) {
        return std::tie(a.m, a.n, a.seed, a.method_index) < std::tie(b.m, b.n, b.seed, b.method_index);
    });
}

/**
 * Runs every (m, n, seed, method) combination. Solver failures are recorded
 * in the row's status and do not stop the sweep. Rows come back sorted.
 */
inline std::vector<CellResult> run_table(const ExperimentConfig& cfg)
{
    cfg.validate();
    struct Task
    {
        Index m, n;
        std::uint64_t seed;
    };
    std::vector<Task> tasks;
    for (const auto& [m, n] : cfg.grid)
        for (int s = 0; s < cfg.seeds; ++s) tasks.push_back({m, n, seed_value(s)});

    std::vector<CellResult> rows;
    std::mutex mtx;
    std::atomic<std::size_t> next{0};
    auto worker = [&] {
        for (std::size_t i = next++; i < tasks.size(); i = next++) {
            const Task& t = tasks[i];
            const qcqp::Instance inst = qcqp::generate_instance(t.m, t.n, t.seed);
            std::vector<CellResult> local;
            for (std::size_t mi = 0; mi < cfg.methods.size(); ++mi) {
                local.push_back(detail::run_cell(cfg, t.m, t.n, t.seed, mi, inst));
            }
            std::lock_guard<std::mutex> lock(mtx);
            rows.insert(rows.end(), local.begin(), local.end());
        }
    };
    const int jobs = std::min<int>(cfg.jobs, static_cast<int>(tasks.size()));
    if (jobs <= 1) {
        worker();
    } else {
        std::vector<std::thread> pool;
        for (int j = 0; j < jobs; ++j) pool.emplace_back(worker);
        for (auto& th : pool) th.join();
    }
    sort_rows(rows);
    return rows;
}

inline const char* table_header()
{
    return "m,n,seed,method,gamma,corrector,iter,time_s,cpu_s,error,converged,f_final,kkt_residual,status";
}

/// One line per run; see table_header() for the column order.
inline void write_table_csv(std::ostream& os, const std::vector<CellResult>& rows)
{
    os << table_header() << '\n';
    os << std::setprecision(17);
    for (const auto& r : rows) {
        os << r.m << ',' << r.n << ',' << r.seed << ',' << r.method.name << ',' << r.method.gamma << ','
           << corrector_name(r.method.corrector) << ',' << r.iterations << ',' << r.time_s << ',' << r.cpu_s << ','
           << r.error << ',' << (r.converged ? 1 : 0) << ',' << r.f_final << ',' << r.kkt << ','
           << detail::csv_quote(r.status) << '\n';
    }
}

inline const char* summary_header()
{
    return "m,n,method,gamma,runs,converged,median_iter,median_time_s,median_cpu_s,median_error";
}

/// Medians over seeds per (m, n, method), over converged runs only.
inline void write_summary_csv(std::ostream& os, const std::vector<CellResult>& rows)
{
    os << summary_header() << '\n';
    os << std::setprecision(17);
    std::vector<CellResult> sorted = rows;
    std::stable_sort(sorted.begin(), sorted.end(), [](const CellResult& a, const CellResult& b) {
        return std::tie(a.m, a.n, a.method_index) < std::tie(b.m, b.n, b.method_index);
    });
    for (std::size_t i = 0; i < sorted.size();) {
        std::size_t j = i;
        std::vector<double> it, tm, cpu, err;
        long runs = 0;
        while (j < sorted.size() && sorted[j].m == sorted[i].m && sorted[j].n == sorted[i].n &&
               sorted[j].method_index == sorted[i].method_index) {
            ++runs;
            if (sorted[j].converged) {
                it.push_back(static_cast<double>(sorted[j].iterations));
                tm.push_back(sorted[j].time_s);
                cpu.push_back(sorted[j].cpu_s);
                err.push_back(sorted[j].error);
            }
            ++j;
        }
        const CellResult& r = sorted[i];
        os << r.m << ',' << r.n << ',' << r.method.name << ',' << r.method.gamma << ',' << runs << ',' << it.size()
           << ',' << detail::median(it) << ',' << detail::median(tm) << ',' << detail::median(cpu) << ','
           << detail::median(err) << '\n';
        i = j;
    }
}

// ---------------------------------------------------------------------------
// Series

struct SeriesResult
{
    std::vector<double> f;    // f(x^k), k = 1..Iter
    std::vector<double> dist; // ||x^k - x*||, empty without a reference
    long iterations = 0;
    bool reference_available = false;
    std::string reference_kind; // "oracle" | "reference_run" | ""
};

/// x* from the oracle on small instances, otherwise a long relaxed-PPA run.
inline std::optional<Vec> reference_solution(const qcqp::Instance& inst, std::string& kind)
{
    if (inst.m() <= 3 && inst.n() <= 6) {
        try {
            kind = "oracle";
            return qcqp::oracle_solve(inst).x;
        } catch (const OracleFailure&) {
        }
    }
    RelaxedPpaConfig cfg;
    cfg.gamma = 1.5;
    cfg.tau = 1e-15;
    cfg.max_iters = 200000;
    const ProblemSpec p = qcqp::qcqp_problem(inst);
    const RunResult ref = run_relaxed_ppa(p, cfg);
    if (kkt_residual(p, ref.w).value > 1e-7) {
        kind.clear();
        return std::nullopt;
    }
    kind = "reference_run";
    return ref.w.x;
}

inline SeriesResult run_series(const ExperimentConfig& cfg, const MethodSpec& ms, Index m, Index n,
                               std::uint64_t seed)
{
    const qcqp::Instance inst = qcqp::generate_instance(m, n, seed);
    const ProblemSpec p = qcqp::qcqp_problem(inst, cfg.compat_signs);
    const RunResult res = run_method(p, ms, cfg.tau, cfg.max_iters, true, cfg.kkt_tol);

    SeriesResult out;
    out.iterations = res.iterations;
    for (const auto& rec : res.trace.records) out.f.push_back(rec.f_value);

    std::string kind;
    const auto x_star = reference_solution(inst, kind);
    if (!x_star) {
        std::cerr << "nlppa: warning: no reference solution for " << cell_stem(m, n, seed)
                  << "; writing the function-value series only\n";
        return out;
    }
    out.reference_available = true;
    out.reference_kind = kind;
    for (const auto& snap : res.trace.snapshots) out.dist.push_back((snap.w_next.head(n) - *x_star).norm());
    return out;
}

/// Columns: k,f  and  k,dist
inline void write_series_csv(const std::filesystem::path& stem, const SeriesResult& s)
{
    std::ofstream fo(stem.string() + "_f.csv");
    fo << std::setprecision(17) << "k,f\n";
    for (std::size_t k = 0; k < s.f.size(); ++k) fo << k + 1 << ',' << s.f[k] << '\n';
    if (!s.reference_available) return;
    std::ofstream fd(stem.string() + "_dist.csv");
    fd << std::setprecision(17) << "k,dist\n";
    for (std::size_t k = 0; k < s.dist.size(); ++k) fd << k + 1 << ',' << s.dist[k] << '\n';
}

// ---------------------------------------------------------------------------
// Full experiment with artifacts

struct ExperimentOutcome
{
    std::vector<CellResult> rows;
    std::vector<std::string> artifacts; // relative to out_dir
    long failed_cells = 0;
};

inline std::string utc_timestamp()
{
    const std::time_t now = std::chrono::system_clock::to_time_t(std::chrono::system_clock::now());
    std::tm tm{};
    gmtime_r(&now, &tm);
    std::ostringstream os;
    os << std::put_time(&tm, "%Y-%m-%dT%H:%M:%SZ");
    return os.str();
}

/**
 * run_table plus the files: table.csv, summary.csv, runs/<cell>.instance.json,
 * runs/<cell>_<method>.run.json, optional series/<stem>_f.csv and _dist.csv and manifest.json.
 */
inline ExperimentOutcome run_experiment(const ExperimentConfig& cfg)
{
    namespace fs = std::filesystem;
    cfg.validate();
    const fs::path root(cfg.out_dir);
    fs::create_directories(root / "runs");

    ExperimentOutcome out;
    out.rows = run_table(cfg);

    for (const auto& [m, n] : cfg.grid) {
        for (int s = 0; s < cfg.seeds; ++s) {
            const std::uint64_t seed = seed_value(s);
            const qcqp::Instance inst = qcqp::generate_instance(m, n, seed);
            const std::string inst_name = cell_stem(m, n, seed) + ".instance.json";
            std::ofstream(root / "runs" / inst_name) << qcqp::to_json(inst).dump() << '\n';
            out.artifacts.push_back("runs/" + inst_name);
        }
    }
    for (const auto& row : out.rows) {
        if (row.status.rfind("error", 0) == 0 || !row.converged) ++out.failed_cells;
        if (row.status.rfind("error", 0) == 0) continue;
        const qcqp::Instance inst = qcqp::generate_instance(row.m, row.n, row.seed);
        RunResult res;
        detail::run_cell(cfg, row.m, row.n, row.seed, row.method_index, inst, &res);
        const std::string stem = cell_stem(row.m, row.n, row.seed);
        const std::string run_name = stem + "_" + row.method.name + ".run.json";
        std::ofstream(root / "runs" / run_name)
            << run_record(stem + ".instance.json", row.method, cfg.tau, cfg.max_iters, cfg.compat_signs, res,
                          cfg.kkt_tol)
                   .dump(1)
            << '\n';
        out.artifacts.push_back("runs/" + run_name);
    }

    {
        std::ofstream t(root / "table.csv");
        write_table_csv(t, out.rows);
        std::ofstream s(root / "summary.csv");
        write_summary_csv(s, out.rows);
        out.artifacts.insert(out.artifacts.begin(), {"table.csv", "summary.csv"});
    }

    if (cfg.series) {
        fs::create_directories(root / "series");
        for (const auto& [m, n] : cfg.grid) {
            for (const auto& ms : cfg.methods) {
                try {
                    const SeriesResult sr = run_series(cfg, ms, m, n, seed_value(0));
                    const std::string stem = cell_stem(m, n, seed_value(0)) + "_" + ms.name;
                    write_series_csv(root / "series" / stem, sr);
                    out.artifacts.push_back("series/" + stem + "_f.csv");
                    if (sr.reference_available) out.artifacts.push_back("series/" + stem + "_dist.csv");
                } catch (const std::exception& e) {
                    std::cerr << "nlppa: series " << cell_stem(m, n, seed_value(0)) << " " << ms.name
                              << " failed: " << e.what() << '\n';
                }
            }
        }
    }

    nlohmann::json manifest;
    manifest["config"] = to_json(cfg);
    manifest["config_hash"] = config_hash(cfg);
    manifest["created_utc"] = utc_timestamp();
    manifest["failed_cells"] = out.failed_cells;
    manifest["artifacts"] = out.artifacts;
    std::ofstream(root / "manifest.json") << manifest.dump(1) << '\n';
    return out;
}

} // namespace nlppa::experiment

#endif // NLPPA_EXPERIMENT_HPP
