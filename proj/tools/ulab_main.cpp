#include <chrono>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "json.hpp"
#include "ulab/cache.hpp"
#include "ulab/config.hpp"
#include "ulab/experiments.hpp"
#include "ulab/mult_sieve.hpp"
#include "ulab/patterns.hpp"

using namespace ulab;

namespace {

double seconds_since(std::chrono::steady_clock::time_point t0) {
    return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
}

// CSV goes to --out (or stdout); wall time goes to stderr so the emitted
// bytes depend only on (config, seed).
int emit_rows(const std::vector<ResultRow>& rows, const std::string& out_path, bool force,
              bool suppress_stdout) {
    if (out_path.empty()) {
        if (!suppress_stdout) write_rows_csv(std::cout, rows);
        return 0;
    }
    if (std::filesystem::exists(out_path) && !force) {
        std::cerr << "output exists, not rewritten (use --force): " << out_path << "\n";
        return 0;
    }
    std::ofstream f(out_path, std::ios::binary);
    if (!f) {
        std::cerr << "error: cannot open output " << out_path << "\n";
        return 1;
    }
    write_rows_csv(f, rows);
    return 0;
}

std::string render_pattern(uint64_t key, int k, long long ell) {
    std::string out;
    for (int j = 0; j < k; ++j) {
        long long d = (long long)(key % (uint64_t)ell);
        key /= (uint64_t)ell;
        if (ell == 2)
            out += d == 0 ? '+' : '-';
        else if (ell <= 10)
            out += (char)('0' + d);
        else
            out += (j ? "." : "") + std::to_string(d);
    }
    return out;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"uniformity laboratory for multiplicative functions"};
    app.require_subcommand(1);
    app.fallthrough();

    ExperimentConfig cfg;
    std::string out_path, config_path, suite_name;
    std::string x_list, shift_list, coeff_list;
    bool force = false, print = false;
    app.add_option("--cache-dir", cfg.cache_dir,
                   "table cache directory (ULAB_CACHE is the fallback)");
    app.add_option("--out", out_path, "write CSV to this file instead of stdout");
    app.add_flag("--force", force, "overwrite an existing output file");
    app.add_flag("--print", print, "print values instead of CSV on stdout");

    auto* sieve = app.add_subcommand("sieve", "emit one sieved table range");
    sieve->add_option("--kind", cfg.table_kind, "liouville | moebius | von-mangoldt");
    sieve->add_option("--start", cfg.start);
    sieve->add_option("--end", cfg.end);

    auto* gowers = app.add_subcommand("gowers-avg", "stratified mean interval Gowers norm");
    gowers->add_option("--X", x_list, "comma list of X rungs");
    gowers->add_option("--H", cfg.h_rule, "window length: absolute or X^theta");
    gowers->add_option("--k", cfg.k, "U^{k+1} norms");
    gowers->add_option("--samples", cfg.samples);
    gowers->add_option("--seed", cfg.seed);

    auto* weak = app.add_subcommand("weak-gowers", "stratified mean weak-Gowers correlation");
    weak->add_option("--X", x_list);
    weak->add_option("--H", cfg.h_rule);
    weak->add_option("--k", cfg.k, "phase degree bound");
    weak->add_option("--sigma", cfg.sigma, "exhaustive grid pitch");
    weak->add_option("--samples", cfg.samples, "strata");
    weak->add_option("--seed", cfg.seed);

    auto* pret = app.add_subcommand("pretentious", "twisted-character distance minimization");
    pret->add_option("--X", x_list);
    pret->add_option("--Q", cfg.q_bound, "modulus bound");
    pret->add_option("--t-res", cfg.t_res, "archimedean grid resolution");
    pret->add_option("--kind", cfg.table_kind);

    auto* pat = app.add_subcommand("patterns", "distinct value windows of a sieved function");
    pat->add_option("--k", cfg.k, "window length");
    pat->add_option("--N", cfg.n_scan, "scan bound");
    pat->add_option("--ell", cfg.ell, "alphabet size (roots of unity)");
    pat->add_option("--kind", cfg.table_kind);

    auto* cho = app.add_subcommand("chowla", "short averages of shifted Liouville products");
    cho->add_option("--X", x_list);
    cho->add_option("--epsilon", cfg.epsilon);
    cho->add_option("--shifts", shift_list, "comma list of shifts");
    cho->add_flag("--log", cfg.log_average, "logarithmic inner averaging");

    auto* pav = app.add_subcommand("polyavg", "polynomial-shift correlation averages");
    pav->add_option("--X", x_list);
    pav->add_option("--epsilon", cfg.epsilon);
    pav->add_option("--poly", cfg.polys, "polynomial in m or m1..mr (repeatable)");
    pav->add_option("--weight", cfg.weights, "lambda | von-mangoldt (repeatable)");
    pav->add_option("--r", cfg.r, "number of outer variables");
    pav->add_flag("--log", cfg.log_average);

    auto* nil = app.add_subcommand("nilseq", "Heisenberg nilsequence statistics");
    nil->add_option("--coeffs", coeff_list, "x,y,z of the orbit generator");
    nil->add_option("--char", cfg.nil_char, "horizontal:a,b or vertical:m");
    nil->add_option("--N", cfg.nil_n, "defect sample count");
    nil->add_option("--x", cfg.x0, "discorrelation window start");
    nil->add_option("--window", cfg.window_h, "window length (0 keeps defect mode)");
    nil->add_option("--table", cfg.table_kind, "self | liouville | moebius | von-mangoldt");

    long long algebra_reps = 10000;
    auto* alg = app.add_subcommand("algebra", "randomized exact-algebra verification");
    alg->add_option("--reps", algebra_reps, "total rational checks across families");
    alg->add_option("--seed", cfg.seed);

    auto* sui = app.add_subcommand("suite", "fixed acceptance-style parameter ladders");
    sui->add_option("name", suite_name,
                    "decay-u2 | decay-weak | pretentious-growth | chowla-decay | "
                    "nil-discorrelation | algebra-verify")
        ->required();

    auto* run = app.add_subcommand("run", "run one experiment described by a config file");
    run->add_option("--config", config_path, "key = value config path")->required();

    CLI11_PARSE(app, argc, argv);

    try {
        auto t0 = std::chrono::steady_clock::now();
        if (!x_list.empty()) cfg.xs = parse_int_list(x_list);
        if (!shift_list.empty()) cfg.shifts = parse_int_list(shift_list);
        if (!coeff_list.empty()) cfg.nil_coeffs = parse_real_list(coeff_list);

        if (sui->parsed()) {
            SuiteOutcome res = run_suite(suite_name, cfg.cache_dir);
            std::cerr << "wall_time_s=" << seconds_since(t0) << "\n";
            for (const auto& line : res.checks) std::cout << line << "\n";
            int rc = emit_rows(res.rows, out_path, force, /*suppress_stdout=*/print);
            return rc != 0 ? rc : (res.pass ? 0 : 1);
        }

        if (run->parsed()) {
            ExperimentConfig file_cfg = experiment_from_config(load_config(config_path));
            if (!cfg.cache_dir.empty()) file_cfg.cache_dir = cfg.cache_dir;
            std::vector<ResultRow> rows = run_experiment(file_cfg);
            std::cerr << "wall_time_s=" << seconds_since(t0) << "\n";
            return emit_rows(rows, file_cfg.output_path.empty() ? out_path : file_cfg.output_path,
                             force, false);
        }

        if (pat->parsed()) {
            MultSpec spec = cfg.table_kind == "liouville" ? MultSpec::liouville()
                            : cfg.table_kind == "moebius" ? MultSpec::moebius()
                                                          : MultSpec::liouville();
            FunctionTable t = cached_table(spec, 1, cfg.n_scan + std::max(cfg.k, 1),
                                           resolve_cache_dir(cfg.cache_dir));
            PatternCount pc = value_patterns(t, cfg.k, cfg.n_scan, cfg.ell);
            std::cerr << "wall_time_s=" << seconds_since(t0) << "\n";
            if (print)
                for (const auto& [key, n] : pc.first_occurrence) {
                    nlohmann::ordered_json j;
                    j["pattern"] = render_pattern(key, pc.k, cfg.ell);
                    j["first_n"] = n;
                    std::cout << j.dump() << "\n";
                }
            std::cout << "count=" << pc.count << "\n";
            std::vector<ResultRow> rows{
                {"patterns",
                 {{"kind", cfg.table_kind},
                  {"k", std::to_string(pc.k)},
                  {"N", std::to_string(pc.N)},
                  {"ell", std::to_string(cfg.ell)},
                  {"count", std::to_string(pc.count)}}}};
            return emit_rows(rows, out_path, force, /*suppress_stdout=*/true);
        }

        const std::pair<CLI::App*, const char*> kinds[] = {
            {sieve, "sieve"},   {gowers, "gowers-avg"}, {weak, "weak-gowers"},
            {pret, "pretentious"}, {cho, "chowla"},     {pav, "polyavg"},
            {nil, "nilseq"},    {alg, "algebra"}};
        for (auto [sub, kind] : kinds) {
            if (!sub->parsed()) continue;
            cfg.kind = kind;
            if (sub == alg) cfg.samples = algebra_reps;
            std::vector<ResultRow> rows = run_experiment(cfg);
            std::cerr << "wall_time_s=" << seconds_since(t0) << "\n";
            bool values_printed = print && sub == sieve;
            if (values_printed)
                for (const auto& r : rows) std::cout << r.cols[2].second << "\n";
            int rc = emit_rows(rows, out_path, force, values_printed);
            if (rc == 0 && sub == alg)
                for (const auto& r : rows)
                    if (r.cols[2].second != "0") rc = 1;  // cols[2] = failures
            return rc;
        }
        std::cerr << "error: no subcommand\n";
        return 2;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 2;
    }
}
