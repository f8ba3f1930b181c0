#include <algorithm>
#include <atomic>
#include <cmath>
#include <cstdint>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>
#include <thread>
#include <vector>

#include "CLI11.hpp"
#include "json.hpp"

#include "flexkacz/driver.hpp"
#include "flexkacz/errors.hpp"
#include "flexkacz/genmat.hpp"
#include "flexkacz/matrix_market.hpp"
#include "flexkacz/workmodel.hpp"

using json = nlohmann::json;
using namespace flexkacz;

namespace {

constexpr int kSchemaVersion = 1;

SparseMatrix transposed(const SparseMatrix& A) {
    std::vector<Triplet> t;
    t.reserve(static_cast<std::size_t>(A.nnz()));
    for (index_t i = 0; i < A.rows(); ++i) {
        auto idx = A.row_indices(i);
        auto val = A.row_values(i);
        for (std::size_t k = 0; k < idx.size(); ++k) t.push_back({idx[k], i, val[k]});
    }
    return SparseMatrix::from_triplets(A.cols(), A.rows(), std::move(t));
}

// "identity:N" or "random:m,n,density,kappa[,rank]"
SparseMatrix parse_gen(const std::string& spec, std::uint64_t seed) {
    const auto colon = spec.find(':');
    const std::string kind = spec.substr(0, colon);
    const std::string args = colon == std::string::npos ? "" : spec.substr(colon + 1);
    if (kind == "identity") {
        const long nl = std::stol(args);
        if (nl < 1) throw DomainError("identity size must be positive");
        std::vector<Triplet> t;
        for (index_t i = 0; i < nl; ++i) t.push_back({i, i, 1.0});
        return SparseMatrix::from_triplets(nl, nl, std::move(t));
    }
    if (kind == "random") {
        std::vector<std::string> parts;
        std::stringstream ss(args);
        std::string item;
        while (std::getline(ss, item, ',')) parts.push_back(item);
        if (parts.size() < 4) throw ParseError("random generator needs m,n,density,kappa[,rank]");
        ProblemSpec ps;
        ps.m = std::stol(parts[0]);
        ps.n = std::stol(parts[1]);
        ps.density = std::stod(parts[2]);
        ps.kappa = std::stod(parts[3]);
        if (parts.size() > 4) ps.rank = std::stol(parts[4]);
        ps.seed = seed;
        return random_ill_conditioned(ps);
    }
    throw ParseError("unknown generator '" + kind + "' (expected identity:N or random:m,n,density,kappa)");
}

DenseVector load_rhs(const std::string& path, index_t m) {
    if (path.size() > 4 && path.substr(path.size() - 4) == ".mtx") {
        auto B = load_matrix_market(path);
        if (B.cols() != 1 || B.rows() != m)
            throw DimensionMismatch("right-hand side file must be an m x 1 matrix");
        DenseVector b(static_cast<std::size_t>(m), 0.0);
        for (index_t i = 0; i < m; ++i) {
            auto val = B.row_values(i);
            if (!val.empty()) b[static_cast<std::size_t>(i)] = val[0];
        }
        return b;
    }
    std::ifstream in(path);
    if (!in) throw ParseError("cannot open right-hand side file " + path);
    DenseVector b;
    double v;
    while (in >> v) b.push_back(v);
    if (static_cast<index_t>(b.size()) != m)
        throw DimensionMismatch("right-hand side has " + std::to_string(b.size()) +
                                " entries, expected " + std::to_string(m));
    return b;
}

const char* status_name(SolveStatus s) {
    switch (s) {
        case SolveStatus::Converged: return "converged";
        case SolveStatus::MaxIterations: return "max_iterations";
        case SolveStatus::BreakdownExact: return "breakdown_exact";
        case SolveStatus::BreakdownSingularH: return "breakdown_singular_h";
    }
    return "unknown";
}

json report_to_json(const DriveResult& result) {
    const SolveReport& r = result.report;
    json j;
    j["schema_version"] = kSchemaVersion;
    j["converged"] = r.converged;
    j["status"] = status_name(r.status);
    j["stagnation_warning"] = r.stagnation_warning;
    j["outer_iters"] = r.outer_iters;
    j["total_inner"] = r.total_inner;
    j["omega_used"] = r.omega_used;
    j["ell_max_used"] = r.ell_max_used;
    j["final_direct_relres"] = r.final_direct_relres;
    j["relres_history"] = r.relres_history;
    j["per_step_inner"] = r.per_step_inner;
    j["per_step_seconds"] = r.per_step_seconds;
    j["seed"] = r.seed;
    j["seconds"] = {{"tuning", r.tuning_seconds}, {"gram", r.gram_seconds}, {"solve", r.solve_seconds}};
    j["flops"] = {{"selection", r.flops.selection_flops},
                  {"projection", r.flops.projection_flops},
                  {"residual_update", r.flops.residual_update_flops},
                  {"gram_build", r.flops.gram_build_flops},
                  {"total", r.flops.total()}};
    j["gram_density"] = result.gram_density;
    j["x"] = r.x;
    if (result.tuned) {
        j["tuning"] = {{"ell_max", result.tuning.ell_max},
                       {"omega_opt", result.tuning.omega_opt},
                       {"eta", result.tuning.eta},
                       {"cap_reached", result.tuning.cap_reached},
                       {"residual_at_omega", result.tuning.residual_at_omega}};
    }
    return j;
}

void write_convergence_files(const SolveReport& r, const std::filesystem::path& dir) {
    std::ofstream fi(dir / "convergence_inner.dat");
    fi.precision(17);
    long cumulative = 0;
    for (std::size_t k = 0; k < r.relres_history.size(); ++k) {
        cumulative += r.per_step_inner[k];
        fi << cumulative << " " << r.relres_history[k] << "\n";
    }
    std::ofstream ft(dir / "convergence_time.dat");
    ft.precision(17);
    for (std::size_t k = 0; k < r.relres_history.size(); ++k)
        ft << r.per_step_seconds[k] << " " << r.relres_history[k] << "\n";
}

struct MethodChoice {
    InnerTag tag = InnerTag::GRK;
    bool fixed = false;
};

MethodChoice parse_method(const std::string& name) {
    if (name == "nesor-fixed") return {InnerTag::NESOR, true};
    auto tag = parse_inner_tag(name);
    if (!tag) throw ParseError("unknown method '" + name + "'");
    return {*tag, false};
}

double median(std::vector<double> v) {
    if (v.empty()) return 0.0;
    std::sort(v.begin(), v.end());
    const std::size_t h = v.size() / 2;
    return v.size() % 2 == 1 ? v[h] : 0.5 * (v[h - 1] + v[h]);
}

// ------------------------------ solve / tune ------------------------------

struct MatrixArgs {
    std::string matrix_path;
    std::string gen_spec;
    std::string rhs_path;
    bool transpose = false;
    std::uint64_t seed = 0;
    std::optional<std::uint64_t> rhs_seed;
};

void add_matrix_options(CLI::App* cmd, MatrixArgs& args) {
    auto* mat = cmd->add_option("--matrix", args.matrix_path, "Matrix Market input file");
    cmd->add_option("--gen", args.gen_spec, "generate the matrix: identity:N or random:m,n,density,kappa[,rank]")
        ->excludes(mat);
    cmd->add_option("--rhs", args.rhs_path, "right-hand side file (.mtx column or whitespace-separated values)");
    cmd->add_flag("--transpose", args.transpose, "solve with the transposed matrix");
    cmd->add_option("--seed", args.seed, "random seed");
    cmd->add_option("--rhs-seed", args.rhs_seed, "seed for the generated right-hand side (defaults to --seed)");
}

SparseMatrix load_problem_matrix(const MatrixArgs& args) {
    if (args.matrix_path.empty() && args.gen_spec.empty())
        throw ParseError("either --matrix or --gen is required");
    SparseMatrix A =
        args.matrix_path.empty() ? parse_gen(args.gen_spec, args.seed) : load_matrix_market(args.matrix_path);
    if (args.transpose) A = transposed(A);
    return A;
}

DenseVector problem_rhs(const MatrixArgs& args, const SparseMatrix& A) {
    if (!args.rhs_path.empty()) return load_rhs(args.rhs_path, A.rows());
    return make_consistent_rhs(A, args.rhs_seed.value_or(args.seed)).first;
}

int run_solve(const MatrixArgs& margs, const std::string& method, const DriveOptions& base,
              const std::string& out_dir) {
    SparseMatrix A = load_problem_matrix(margs);
    DenseVector b = problem_rhs(margs, A);

    DriveOptions opts = base;
    const MethodChoice mc = parse_method(method);
    opts.method = mc.tag;
    opts.fixed_nesor = mc.fixed;
    opts.seed = margs.seed;

    DriveResult result = solve_system(A, b, opts);

    const std::filesystem::path dir(out_dir);
    std::filesystem::create_directories(dir);
    {
        std::ofstream out(dir / "report.json");
        out << report_to_json(result).dump(2) << "\n";
    }
    write_convergence_files(result.report, dir);

    if (result.report.status == SolveStatus::BreakdownSingularH) return 3;
    if (!result.report.converged) return 2;
    return 0;
}

int run_tune(const MatrixArgs& margs, const std::string& method, double eta, long cap, bool no_gram,
             const std::string& out_path) {
    SparseMatrix A = load_problem_matrix(margs);
    DenseVector b = problem_rhs(margs, A);
    const MethodChoice mc = parse_method(method);

    std::unique_ptr<GramMatrix> C;
    if (!no_gram && mc.tag != InnerTag::NESOR) C = std::make_unique<GramMatrix>(GramMatrix::build(A));
    auto res = tune(A, C.get(), b, mc.tag, eta, cap, margs.seed);

    json j;
    j["schema_version"] = kSchemaVersion;
    j["method"] = to_string(mc.tag);
    j["ell_max"] = res.ell_max;
    j["omega_opt"] = res.omega_opt;
    j["eta"] = res.eta;
    j["cap_reached"] = res.cap_reached;
    j["residual_at_omega"] = res.residual_at_omega;
    j["seconds"] = res.seconds;
    json cps = json::array();
    for (auto [p, rr] : res.checkpoints) cps.push_back({{"projections", p}, {"relres", rr}});
    j["checkpoints"] = cps;
    if (out_path.empty()) {
        std::cout << j.dump(2) << "\n";
    } else {
        std::ofstream out(out_path);
        out << j.dump(2) << "\n";
    }
    return 0;
}

// ------------------------------ genmat ------------------------------

int run_genmat(const ProblemSpec& spec, const std::string& out_path) {
    auto A = random_ill_conditioned(spec);
    std::ostringstream header;
    header << "m=" << spec.m << " n=" << spec.n << " density=" << spec.density << " kappa=" << spec.kappa
           << " rank=" << spec.effective_rank() << " seed=" << spec.seed;
    write_matrix_market(out_path, A, {header.str()});
    std::cout << "wrote " << out_path << " (" << A.rows() << "x" << A.cols() << ", " << A.nnz()
              << " nonzeros, density " << A.density() << ")\n";
    return 0;
}

// ------------------------------ workmodel ------------------------------

int run_workmodel(const std::string& from_matrix, long m, long n, double d, std::uint64_t k,
                  std::uint64_t ell, const std::string& out_path) {
    std::string name = "synthetic";
    std::unique_ptr<SparseMatrix> A;
    if (!from_matrix.empty()) {
        A = std::make_unique<SparseMatrix>(load_matrix_market(from_matrix));
        name = std::filesystem::path(from_matrix).stem().string();
        m = A->rows();
        n = A->cols();
        d = A->density();
    } else if (m < 1 || n < 1 || d < 0.0) {
        throw ParseError("workmodel needs --from-matrix or all of --m, --n, --density");
    }

    const double q = d * static_cast<double>(n);
    const double p_pred = predicted_gram_density(static_cast<std::uint64_t>(m), static_cast<std::uint64_t>(n), d);
    double p_actual = -1.0;
    if (!A && m * n <= 20'000'000) {
        ProblemSpec ps;
        ps.m = m;
        ps.n = n;
        ps.density = d;
        ps.kappa = 1.0;
        A = std::make_unique<SparseMatrix>(random_ill_conditioned(ps));
    }
    if (A) p_actual = GramMatrix::build(*A, 2.0).density();  // sparse storage: count only

    const double cross_d = crossover_dense(static_cast<std::uint64_t>(m), static_cast<std::uint64_t>(n));
    const double p_for_cross = p_actual >= 0.0 ? p_actual : p_pred;
    double cross_s = std::numeric_limits<double>::infinity();
    if (q > p_for_cross) cross_s = crossover_sparse(static_cast<std::uint64_t>(m), q, p_for_cross);

    std::ostringstream csv;
    csv << "name,m,n,density,q,predicted_p,actual_p,crossover_dense,crossover_sparse";
    if (k >= 1 && ell >= 1) csv << ",w_gk_sparse,w_mgk_sparse";
    csv << "\n";
    csv << name << "," << m << "," << n << "," << d << "," << q << "," << p_pred << "," << p_actual << ","
        << cross_d << "," << cross_s;
    if (k >= 1 && ell >= 1)
        csv << "," << w_gk_sparse(k, ell, static_cast<std::uint64_t>(m), q) << ","
            << w_mgk_sparse(k, ell, static_cast<std::uint64_t>(m), q, p_for_cross);
    csv << "\n";
    if (out_path.empty()) {
        std::cout << csv.str();
    } else {
        std::ofstream out(out_path);
        out << csv.str();
    }
    return 0;
}

// ------------------------------ bench ------------------------------

struct BenchProblem {
    std::string name;
    std::string matrix_path;
    std::string gen_spec;
    bool transpose = false;
    std::uint64_t rhs_seed = 0;
};

struct BenchPlan {
    int repeats = 10;
    std::vector<std::uint64_t> seeds{0};
    std::vector<std::string> methods;
    std::string output_dir = ".";
    std::vector<BenchProblem> problems;
};

BenchPlan parse_plan(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw ParseError("cannot open plan file " + path);
    BenchPlan plan;
    BenchProblem* current = nullptr;
    std::string line;
    int lineno = 0;
    auto split_list = [](const std::string& s) {
        std::vector<std::string> out;
        std::stringstream ss(s);
        std::string item;
        while (std::getline(ss, item, ',')) {
            const auto b = item.find_first_not_of(" \t");
            const auto e = item.find_last_not_of(" \t");
            if (b != std::string::npos) out.push_back(item.substr(b, e - b + 1));
        }
        return out;
    };
    while (std::getline(in, line)) {
        ++lineno;
        const auto hash = line.find('#');
        if (hash != std::string::npos) line = line.substr(0, hash);
        const auto b = line.find_first_not_of(" \t\r");
        if (b == std::string::npos) continue;
        const auto e = line.find_last_not_of(" \t\r");
        line = line.substr(b, e - b + 1);
        if (line == "[problem]") {
            plan.problems.emplace_back();
            current = &plan.problems.back();
            continue;
        }
        const auto eq = line.find('=');
        if (eq == std::string::npos)
            throw ParseError("plan line " + std::to_string(lineno) + ": expected key = value");
        auto trim = [](std::string s) {
            const auto bb = s.find_first_not_of(" \t");
            const auto ee = s.find_last_not_of(" \t");
            return bb == std::string::npos ? std::string() : s.substr(bb, ee - bb + 1);
        };
        const std::string key = trim(line.substr(0, eq));
        const std::string value = trim(line.substr(eq + 1));
        if (!current) {
            if (key == "repeats") plan.repeats = std::stoi(value);
            else if (key == "seeds") {
                plan.seeds.clear();
                for (const auto& s : split_list(value)) plan.seeds.push_back(std::stoull(s));
            } else if (key == "methods") plan.methods = split_list(value);
            else if (key == "output_dir") plan.output_dir = value;
            else throw ParseError("plan line " + std::to_string(lineno) + ": unknown key '" + key + "'");
        } else {
            if (key == "name") current->name = value;
            else if (key == "matrix") current->matrix_path = value;
            else if (key == "gen") current->gen_spec = value;
            else if (key == "transpose") current->transpose = value == "true" || value == "1";
            else if (key == "rhs_seed") current->rhs_seed = std::stoull(value);
            else throw ParseError("plan line " + std::to_string(lineno) + ": unknown key '" + key + "'");
        }
    }
    if (plan.repeats < 1) throw ParseError("plan: repeats must be >= 1");
    if (plan.methods.empty()) throw ParseError("plan: methods must be nonempty");
    if (plan.problems.empty()) throw ParseError("plan: no [problem] sections");
    if (plan.seeds.empty()) plan.seeds.push_back(0);
    for (std::size_t i = 0; i < plan.problems.size(); ++i) {
        if (plan.problems[i].name.empty()) plan.problems[i].name = "problem" + std::to_string(i);
        if (plan.problems[i].matrix_path.empty() && plan.problems[i].gen_spec.empty())
            throw ParseError("plan problem '" + plan.problems[i].name + "' needs matrix or gen");
    }
    return plan;
}

struct BenchCell {
    std::size_t problem = 0;
    std::size_t method = 0;
    bool failed = false;
    std::string error;
    double median_outer = 0.0;
    double median_inner = 0.0;
    double omega = 0.0;
    double median_tuning_s = 0.0, median_gram_s = 0.0, median_solve_s = 0.0;
    std::vector<long> raw_outer, raw_inner;
    bool fastest = false;
};

int run_bench(const std::string& plan_path, const DriveOptions& base) {
    BenchPlan plan = parse_plan(plan_path);
    std::filesystem::create_directories(plan.output_dir);

    // materialize problems up front so workers share read-only data
    std::vector<SparseMatrix> matrices;
    std::vector<DenseVector> rhss;
    for (std::size_t p = 0; p < plan.problems.size(); ++p) {
        const auto& prob = plan.problems[p];
        SparseMatrix A = prob.matrix_path.empty() ? parse_gen(prob.gen_spec, plan.seeds[p % plan.seeds.size()])
                                                  : load_matrix_market(prob.matrix_path);
        if (prob.transpose) A = transposed(A);
        rhss.push_back(make_consistent_rhs(A, prob.rhs_seed).first);
        matrices.push_back(std::move(A));
    }

    std::vector<BenchCell> cells;
    for (std::size_t p = 0; p < plan.problems.size(); ++p)
        for (std::size_t m = 0; m < plan.methods.size(); ++m) cells.push_back({p, m});

    std::atomic<std::size_t> next{0};
    auto worker = [&] {
        for (;;) {
            const std::size_t c = next.fetch_add(1);
            if (c >= cells.size()) return;
            BenchCell& cell = cells[c];
            try {
                const MethodChoice mc = parse_method(plan.methods[cell.method]);
                const std::uint64_t base_seed = plan.seeds[c % plan.seeds.size()];
                std::vector<double> outers, inners, tunes, grams, solves;
                for (int rep = 0; rep < plan.repeats; ++rep) {
                    DriveOptions opts = base;
                    opts.method = mc.tag;
                    opts.fixed_nesor = mc.fixed;
                    opts.seed = base_seed + 1000003ull * static_cast<std::uint64_t>(rep);
                    DriveResult r = solve_system(matrices[cell.problem], rhss[cell.problem], opts);
                    outers.push_back(static_cast<double>(r.report.outer_iters));
                    inners.push_back(static_cast<double>(r.report.total_inner));
                    tunes.push_back(r.report.tuning_seconds);
                    grams.push_back(r.report.gram_seconds);
                    solves.push_back(r.report.solve_seconds);
                    cell.raw_outer.push_back(r.report.outer_iters);
                    cell.raw_inner.push_back(r.report.total_inner);
                    cell.omega = r.report.omega_used;
                    if (!r.report.converged) {
                        cell.failed = true;
                        cell.error = status_name(r.report.status);
                    }
                }
                cell.median_outer = median(outers);
                cell.median_inner = median(inners);
                cell.median_tuning_s = median(tunes);
                cell.median_gram_s = median(grams);
                cell.median_solve_s = median(solves);
            } catch (const std::exception& ex) {
                cell.failed = true;
                cell.error = ex.what();
            }
        }
    };
    const unsigned hw = std::max(1u, std::thread::hardware_concurrency());
    const std::size_t nworkers = std::min<std::size_t>(hw, cells.size());
    std::vector<std::thread> pool;
    for (std::size_t t = 0; t < nworkers; ++t) pool.emplace_back(worker);
    for (auto& th : pool) th.join();

    // mark the fastest successful method per problem
    for (std::size_t p = 0; p < plan.problems.size(); ++p) {
        double best = -1.0;
        BenchCell* winner = nullptr;
        for (auto& cell : cells) {
            if (cell.problem != p || cell.failed) continue;
            const double total = cell.median_tuning_s + cell.median_gram_s + cell.median_solve_s;
            if (best < 0.0 || total < best) {
                best = total;
                winner = &cell;
            }
        }
        if (winner) winner->fastest = true;
    }

    auto join_raw = [](const std::vector<long>& v) {
        std::ostringstream os;
        for (std::size_t i = 0; i < v.size(); ++i) os << (i ? ";" : "") << v[i];
        return os.str();
    };
    const std::filesystem::path csv_path = std::filesystem::path(plan.output_dir) / "bench.csv";
    std::ofstream csv(csv_path);
    csv << "problem,method,median_outer,median_total_inner,omega,median_tuning_s,median_gram_s,"
           "median_solve_s,fastest,status,raw_outer,raw_inner\n";
    for (const auto& cell : cells) {
        csv << plan.problems[cell.problem].name << "," << plan.methods[cell.method] << ","
            << cell.median_outer << "," << cell.median_inner << "," << cell.omega << ","
            << cell.median_tuning_s << "," << cell.median_gram_s << "," << cell.median_solve_s << ","
            << (cell.fastest ? "*" : "") << "," << (cell.failed ? cell.error : "ok") << ","
            << join_raw(cell.raw_outer) << "," << join_raw(cell.raw_inner) << "\n";
    }
    std::cout << "wrote " << csv_path.string() << "\n";
    return 0;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Sparse iterative least-squares solver with Kaczmarz-type inner preconditioning"};
    app.require_subcommand(1);

    const auto omega_check = CLI::Validator(
        [](std::string& s) -> std::string {
            const double w = std::stod(s);
            if (!(w > 0.0 && w < 2.0)) return "omega must lie in the open interval (0, 2)";
            return {};
        },
        "OMEGA");

    // solve
    MatrixArgs solve_args;
    std::string solve_method = "grk";
    DriveOptions solve_opts;
    std::string solve_out = ".";
    double solve_omega = 0.0;
    long solve_ell = 0;
    bool solve_no_gram = false;
    auto* solve_cmd = app.add_subcommand("solve", "solve one least-squares system");
    add_matrix_options(solve_cmd, solve_args);
    solve_cmd->add_option("--method", solve_method, "inner method: nesor, gk, rk, grk, or nesor-fixed");
    solve_cmd->add_option("--tol", solve_opts.tol, "outer relative-residual tolerance");
    solve_cmd->add_option("--max-outer", solve_opts.max_outer, "outer iteration limit");
    solve_cmd->add_option("--eta", solve_opts.eta, "phase-1 tuning residual target");
    solve_cmd->add_option("--omega", solve_omega, "pin the relaxation parameter")->check(omega_check);
    solve_cmd->add_option("--ell-max", solve_ell, "pin the inner budget (projections; sweeps for nesor)");
    solve_cmd->add_flag("--no-gram", solve_no_gram, "skip building C = A A^T");
    solve_cmd->add_option("--tuning-cap", solve_opts.tuning_cap, "phase-1 projection cap (0 -> 50m)");
    solve_cmd->add_option("--out", solve_out, "output directory");

    // tune
    MatrixArgs tune_args;
    std::string tune_method = "grk";
    double tune_eta = 0.1;
    long tune_cap = 0;
    bool tune_no_gram = false;
    std::string tune_out;
    auto* tune_cmd = app.add_subcommand("tune", "run two-phase parameter tuning only");
    add_matrix_options(tune_cmd, tune_args);
    tune_cmd->add_option("--method", tune_method, "inner method: nesor, gk, rk, grk");
    tune_cmd->add_option("--eta", tune_eta, "phase-1 residual target");
    tune_cmd->add_option("--tuning-cap", tune_cap, "phase-1 projection cap (0 -> 50m)");
    tune_cmd->add_flag("--no-gram", tune_no_gram, "skip building C = A A^T");
    tune_cmd->add_option("--out", tune_out, "output JSON file (default stdout)");

    // bench
    std::string plan_path;
    DriveOptions bench_opts;
    auto* bench_cmd = app.add_subcommand("bench", "run a benchmark plan");
    bench_cmd->add_option("--plan", plan_path, "plan file (key = value lines with [problem] sections)")
        ->required();
    bench_cmd->add_option("--tol", bench_opts.tol, "outer relative-residual tolerance");
    bench_cmd->add_option("--max-outer", bench_opts.max_outer, "outer iteration limit");
    bench_cmd->add_option("--eta", bench_opts.eta, "phase-1 tuning residual target");

    // genmat
    ProblemSpec gen_spec;
    std::string gen_out = "matrix.mtx";
    auto* gen_cmd = app.add_subcommand("genmat", "generate an ill-conditioned sparse test matrix");
    gen_cmd->add_option("--m", gen_spec.m, "rows")->required();
    gen_cmd->add_option("--n", gen_spec.n, "columns")->required();
    gen_cmd->add_option("--density", gen_spec.density, "target nonzero density");
    gen_cmd->add_option("--kappa", gen_spec.kappa, "target condition number");
    gen_cmd->add_option("--rank", gen_spec.rank, "rank (0 -> min(m, n))");
    gen_cmd->add_option("--seed", gen_spec.seed, "random seed");
    gen_cmd->add_option("--out", gen_out, "output Matrix Market file");

    // workmodel
    std::string wm_from;
    long wm_m = 0, wm_n = 0;
    double wm_d = -1.0;
    std::uint64_t wm_k = 0, wm_ell = 0;
    std::string wm_out;
    auto* wm_cmd = app.add_subcommand("workmodel", "Gram density prediction and work-model crossovers");
    wm_cmd->add_option("--from-matrix", wm_from, "measure density from a Matrix Market file");
    wm_cmd->add_option("--m", wm_m, "rows");
    wm_cmd->add_option("--n", wm_n, "columns");
    wm_cmd->add_option("--density", wm_d, "nonzero density");
    wm_cmd->add_option("--k", wm_k, "outer iterations for work totals");
    wm_cmd->add_option("--ell", wm_ell, "inner iterations for work totals");
    wm_cmd->add_option("--out", wm_out, "output CSV file (default stdout)");

    CLI11_PARSE(app, argc, argv);

    try {
        if (solve_cmd->parsed()) {
            if (solve_cmd->count("--omega")) solve_opts.omega = solve_omega;
            if (solve_cmd->count("--ell-max")) solve_opts.ell_max = solve_ell;
            solve_opts.use_gram = !solve_no_gram;
            return run_solve(solve_args, solve_method, solve_opts, solve_out);
        }
        if (tune_cmd->parsed())
            return run_tune(tune_args, tune_method, tune_eta, tune_cap, tune_no_gram, tune_out);
        if (bench_cmd->parsed()) return run_bench(plan_path, bench_opts);
        if (gen_cmd->parsed()) return run_genmat(gen_spec, gen_out);
        if (wm_cmd->parsed()) return run_workmodel(wm_from, wm_m, wm_n, wm_d, wm_k, wm_ell, wm_out);
    } catch (const std::exception& ex) {
        std::cerr << "error: " << ex.what() << "\n";
        return 1;
    }
    return 1;
}
