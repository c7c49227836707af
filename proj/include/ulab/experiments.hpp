#pragma once

#include <cstdint>
#include <ostream>
#include <string>
#include <vector>

#include "ulab/config.hpp"
#include "ulab/mult_sieve.hpp"

namespace ulab {

// A fully resolved experiment: the union of the parameters the subcommands
// consume.  Config files fill this through experiment_from_config; the CLI
// fills it from flags.
struct ExperimentConfig {
    std::string kind;  // sieve | gowers-avg | weak-gowers | pretentious |
                       // patterns | chowla | polyavg | nilseq | algebra
    std::vector<long long> xs{10000};
    std::string h_rule = "X^0.4";  // "X^theta" or an absolute length
    int k = 1;
    double sigma = 0.02;
    int samples = 200;  // strata for the averaged norms, reps for algebra
    uint64_t seed = 1;
    long long q_bound = 10;
    double t_res = 2.0;
    double epsilon = 0.3;
    std::vector<long long> shifts{0, 1};
    std::vector<std::string> polys;  // zpoly texts, arity r
    int r = 1;
    std::vector<std::string> weights;  // lambda | von-mangoldt
    std::vector<double> nil_coeffs;    // g_1 coordinates; default (sqrt2, sqrt3, 0)
    std::string nil_char = "horizontal:1,1";
    long long nil_n = 100000;       // defect sample count
    long long x0 = 50;              // discorrelation window start
    long long window_h = 0;         // window length; 0 selects defect mode
    std::string table_kind = "liouville";  // sieve kind, or "self" for nilseq
    long long start = 1, end = 100;        // sieve range
    long long n_scan = 1000;               // patterns scan bound N
    long long ell = 2;
    bool log_average = false;
    std::string cache_dir;  // "" -> ULAB_CACHE, else off
    std::string output_path;
};

struct ResultRow {
    std::string experiment;
    std::vector<std::pair<std::string, std::string>> cols;
};

// Shortest round-trip decimal rendering; byte-stable across runs and thread
// counts, which keeps the CSV invariant honest.
std::string format_double(double v);

// "X^theta" -> ceil(X^theta); a plain integer is taken verbatim.
long long resolve_h(const std::string& rule, long long X);

std::vector<long long> parse_int_list(const std::string& text);
std::vector<double> parse_real_list(const std::string& text);

// Reads [experiment] (plus [cache]/[output]) from a parsed config; kind and
// seed are mandatory.
ExperimentConfig experiment_from_config(const Config& c);

// Header row "experiment,<columns of the first row>", then one CRLF record
// per row; the schema is fixed per experiment kind.
void write_rows_csv(std::ostream& os, const std::vector<ResultRow>& rows);

std::vector<ResultRow> run_experiment(const ExperimentConfig& cfg);

struct SuiteOutcome {
    bool pass = true;
    std::vector<std::string> checks;  // "PASS: ..." / "FAIL: ..." lines
    std::vector<ResultRow> rows;
};

// Fixed parameter ladders mirroring the acceptance checks:
// decay-u2 | decay-weak | pretentious-growth | chowla-decay |
// nil-discorrelation | algebra-verify.  Throws on unknown names.
SuiteOutcome run_suite(const std::string& name, const std::string& cache_dir);

// Mean over `strata` of the weak Gowers correlation on one window per
// stratum of [X, 2X), with the same deterministic stratified sampling as
// averaged_gowers (stream = stratum index).
double averaged_weak_gowers(const FunctionTable& table, long long X, long long H, int k,
                            double sigma, int strata, uint64_t seed);

// Randomized exact-algebra verification: Bezout splits, CRT alignment,
// binomial-basis round-trips, local-phase comparison (all zero-tolerance
// rational checks), plus exact BCH multiplicativity and a real-power cube
// check.  Counts failures; never throws on a failed property.
SuiteOutcome algebra_verify(long long rational_reps, long long heis_reps, long long dim4_reps,
                            uint64_t seed);

}  // namespace ulab
