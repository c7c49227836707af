#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <omp.h>
#include <sstream>
#include <string>
#include <sys/wait.h>
#include <vector>

#include "doctest.h"
#include "ulab/cache.hpp"
#include "ulab/config.hpp"
#include "ulab/csvio.hpp"
#include "ulab/experiments.hpp"
#include "ulab/mult_sieve.hpp"

using namespace ulab;
namespace fs = std::filesystem;

namespace {

fs::path fresh_dir(const std::string& tag) {
    fs::path p = fs::temp_directory_path() / ("ulab_test_" + tag);
    fs::remove_all(p);
    fs::create_directories(p);
    return p;
}

std::string slurp(const fs::path& p) {
    std::ifstream f(p, std::ios::binary);
    REQUIRE(f.good());
    std::ostringstream ss;
    ss << f.rdbuf();
    return ss.str();
}

void spit(const fs::path& p, const std::string& bytes) {
    std::ofstream f(p, std::ios::binary | std::ios::trunc);
    f.write(bytes.data(), (std::streamsize)bytes.size());
    REQUIRE(f.good());
}

// Spawns the installed CLI binary; returns the exit code and captures stdout.
int run_cli(const std::string& args, std::string* out = nullptr) {
    static int counter = 0;
    fs::path ob = fs::temp_directory_path() / ("ulab_cli_out_" + std::to_string(counter++));
    std::string cmd = std::string(ULAB_CLI_PATH) + " " + args + " > " + ob.string() + " 2> /dev/null";
    int st = std::system(cmd.c_str());
    if (out) *out = slurp(ob);
    fs::remove(ob);
    return WIFEXITED(st) ? WEXITSTATUS(st) : -1;
}

std::string rows_to_string(const std::vector<ResultRow>& rows) {
    std::ostringstream ss;
    write_rows_csv(ss, rows);
    return ss.str();
}

}  // namespace

TEST_CASE("csv escaping quotes exactly the fields that need it") {
    CHECK(csv_escape("plain") == "plain");
    CHECK(csv_escape("") == "");
    CHECK(csv_escape("a,b") == "\"a,b\"");
    CHECK(csv_escape("say \"hi\"") == "\"say \"\"hi\"\"\"");
    CHECK(csv_escape("line\nbreak") == "\"line\nbreak\"");
    CHECK(csv_escape("cr\rhere") == "\"cr\rhere\"");
    CHECK(csv_escape("naïve λ") == "naïve λ");  // UTF-8 passes through unquoted
}

TEST_CASE("csv write/parse round-trips awkward fields") {
    std::vector<std::vector<std::string>> table = {
        {"a", "b,c", "d\"e", ""},
        {"multi\nline", "\"", "trailing space ", ",,,"},
        {"é漢字", "0.5", "-1"},
    };
    std::ostringstream ss;
    for (const auto& row : table) csv_write_row(ss, row);
    const std::string bytes = ss.str();
    CHECK(bytes.substr(bytes.size() - 2) == "\r\n");
    CHECK(csv_parse(bytes) == table);
    // bare-LF record ends are accepted on input
    std::string lf_only;
    for (char c : bytes)
        if (c != '\r') lf_only += c;
    CHECK(csv_parse(lf_only) == table);
}

TEST_CASE("csv parser rejects malformed quoting") {
    CHECK_THROWS_AS((void)csv_parse("a,b\"c\r\n"), std::runtime_error);      // quote mid-field
    CHECK_THROWS_AS((void)csv_parse("\"unterminated\r\n"), std::runtime_error);
    CHECK_THROWS_AS((void)csv_parse("\"x\"y,b\r\n"), std::runtime_error);    // garbage after close
    CHECK(csv_parse("").empty());
    CHECK(csv_parse("\r\n\r\n").empty());  // blank records dropped
    CHECK(csv_parse("a\r\n\r\nb\r\n") == std::vector<std::vector<std::string>>{{"a"}, {"b"}});
}

TEST_CASE("config parse -> format -> parse is the identity") {
    const std::string text =
        "# top comment\n"
        "[experiment]\n"
        "kind = chowla\n"
        "seed = 1\n"
        "X = 1000, 10000\n"
        "; another comment\n"
        "[output]\n"
        "path = /tmp/x.csv\n";
    Config c = parse_config(text);
    REQUIRE(c.sections.size() == 2);
    CHECK(c.sections[0].name == "experiment");
    CHECK(c.sections[0].entries.size() == 3);
    CHECK(c.sections[0].entries[2] == std::pair<std::string, std::string>{"X", "1000, 10000"});
    Config again = parse_config(format_config(c));
    CHECK(again == c);
    CHECK(format_config(again) == format_config(c));
}

TEST_CASE("config lookup helpers") {
    Config c = parse_config("[a]\nx = 1\n[b]\nx = 2\ny = z\n");
    REQUIRE(c.find("a", "x") != nullptr);
    CHECK(*c.find("a", "x") == "1");
    CHECK(*c.find("b", "x") == "2");
    CHECK(c.find("b", "missing") == nullptr);
    CHECK(c.find("nosection", "x") == nullptr);
    CHECK(c.get("b", "y", "fallback") == "z");
    CHECK(c.get("b", "absent", "fallback") == "fallback");
    CHECK(c.require("b", "y") == "z");
    CHECK_THROWS_WITH_AS((void)c.require("b", "absent"),
                         doctest::Contains("missing required key 'absent'"), std::runtime_error);
}

TEST_CASE("config parse errors carry line and column") {
    auto fails_at = [](const std::string& text, const std::string& where) {
        try {
            (void)parse_config(text);
            FAIL("expected parse failure for: " << text);
        } catch (const std::runtime_error& e) {
            CHECK(std::string(e.what()).find(where) != std::string::npos);
        }
    };
    fails_at("key_without_equals\n", "line 1");
    fails_at("[sec]\nok = 1\nnope\n", "line 3");
    fails_at("[unterminated\n", "line 1");
    fails_at("[]\n", "line 1");
    fails_at("[sec] trailing\n", "line 1");
    fails_at(" = value\n", "line 1");
    fails_at("[s]\na = 1\na = 2\n", "line 3");  // duplicate key in section
}

TEST_CASE("format_double is shortest round-trip") {
    const double vals[] = {0.0,     1.0,    -1.0,   0.1,    1.0 / 3.0, 1e-300,
                           2.5e300, 0.00484, 42.0,  -0.125, 3.141592653589793};
    for (double v : vals) {
        const std::string s = format_double(v);
        CHECK(std::stod(s) == v);
    }
    CHECK(format_double(0.1) == "0.1");
    CHECK(format_double(1.0) == "1");
    CHECK(format_double(-0.5) == "-0.5");
}

TEST_CASE("window rules resolve to lengths") {
    CHECK(resolve_h("40", 10000) == 40);
    CHECK(resolve_h("X^0.4", 10000) == 40);        // ceil(10^1.6) = 40
    CHECK(resolve_h("X^0.4", 1000000) == 252);     // ceil(10^2.4)
    CHECK(resolve_h("X^0.5", 100) == 10);
    CHECK(resolve_h("1", 5) == 1);
    CHECK_THROWS_AS((void)resolve_h("0", 100), std::runtime_error);
    CHECK_THROWS_AS((void)resolve_h("X^1.5", 100), std::runtime_error);
    CHECK_THROWS_AS((void)resolve_h("X^0", 100), std::runtime_error);
    CHECK_THROWS_AS((void)resolve_h("forty", 100), std::runtime_error);
}

TEST_CASE("list parsing") {
    CHECK(parse_int_list("1,2,3") == std::vector<long long>{1, 2, 3});
    CHECK(parse_int_list(" 10 , -4 ") == std::vector<long long>{10, -4});
    CHECK(parse_int_list("10000") == std::vector<long long>{10000});
    CHECK(parse_real_list("0.5,1e-3") == std::vector<double>{0.5, 1e-3});
    CHECK_THROWS_AS((void)parse_int_list("1,x"), std::runtime_error);
    CHECK_THROWS_AS((void)parse_real_list("0.5,?"), std::runtime_error);
}

TEST_CASE("experiment_from_config fills fields and validates") {
    Config c = parse_config(
        "[experiment]\n"
        "kind = gowers-avg\n"
        "seed = 9\n"
        "X = 100, 200\n"
        "H = X^0.3\n"
        "k = 2\n"
        "samples = 7\n"
        "log_average = true\n"
        "[cache]\n"
        "dir = /tmp/cache\n"
        "[output]\n"
        "path = out.csv\n");
    ExperimentConfig e = experiment_from_config(c);
    CHECK(e.kind == "gowers-avg");
    CHECK(e.seed == 9);
    CHECK(e.xs == std::vector<long long>{100, 200});
    CHECK(e.h_rule == "X^0.3");
    CHECK(e.k == 2);
    CHECK(e.samples == 7);
    CHECK(e.log_average);
    CHECK(e.cache_dir == "/tmp/cache");
    CHECK(e.output_path == "out.csv");

    // defaults survive when keys are absent
    ExperimentConfig d = experiment_from_config(parse_config("[experiment]\nkind = chowla\nseed = 1\n"));
    CHECK(d.xs == std::vector<long long>{10000});
    CHECK(d.epsilon == 0.3);
    CHECK(d.shifts == std::vector<long long>{0, 1});
    CHECK(d.table_kind == "liouville");

    CHECK_THROWS_AS((void)experiment_from_config(parse_config("[experiment]\nseed = 1\n")),
                    std::runtime_error);
    CHECK_THROWS_AS((void)experiment_from_config(parse_config("[experiment]\nkind = chowla\n")),
                    std::runtime_error);
    CHECK_THROWS_WITH_AS(
        (void)experiment_from_config(parse_config("[experiment]\nkind = chowla\nseed = 1\nk = two\n")),
        doctest::Contains("k"), std::runtime_error);
}

TEST_CASE("result CSV is byte-stable across reruns and thread counts") {
    ExperimentConfig cfg;
    cfg.kind = "chowla";
    cfg.xs = {2000};
    cfg.epsilon = 0.3;
    const std::string a = rows_to_string(run_experiment(cfg));
    const int saved = omp_get_max_threads();
    omp_set_num_threads(3);
    const std::string b = rows_to_string(run_experiment(cfg));
    omp_set_num_threads(1);
    const std::string c = rows_to_string(run_experiment(cfg));
    omp_set_num_threads(saved);
    CHECK(a == b);
    CHECK(a == c);
    CHECK(a.find("\r\n") != std::string::npos);

    // schema drift between rows is a programming error
    std::vector<ResultRow> bad = {{"x", {{"a", "1"}}}, {"x", {{"b", "2"}}}};
    std::ostringstream ss;
    CHECK_THROWS_AS(write_rows_csv(ss, bad), std::logic_error);
}

TEST_CASE("table cache round-trips and detects corruption") {
    fs::path dir = fresh_dir("cache");
    MultSpec spec = MultSpec::liouville();

    FunctionTable built = cached_table(spec, 1, 500, dir.string());
    auto name = cache_file_name(spec, 1, 500);
    REQUIRE(name.has_value());
    fs::path file = dir / *name;
    REQUIRE(fs::exists(file));

    FunctionTable loaded = cached_table(spec, 1, 500, dir.string());
    REQUIRE(loaded.store == FunctionTable::Storage::i8);
    for (long long n = 1; n <= 500; ++n) CHECK(loaded.sign_at(n) == built.sign_at(n));

    SUBCASE("truncated payload") {
        std::string bytes = slurp(file);
        spit(file, bytes.substr(0, bytes.size() / 2));
        CHECK_THROWS_WITH_AS((void)cached_table(spec, 1, 500, dir.string()),
                             doctest::Contains("cache corruption"), std::runtime_error);
    }
    SUBCASE("magic mismatch") {
        std::string bytes = slurp(file);
        bytes[0] = 'X';
        spit(file, bytes);
        CHECK_THROWS_WITH_AS((void)load_table(file.string()),
                             doctest::Contains("cache corruption"), std::runtime_error);
    }
    SUBCASE("range mismatch against the file name") {
        FunctionTable other = sieve_table(spec, 1, 200);
        save_table(other, file.string());
        CHECK_THROWS_WITH_AS((void)cached_table(spec, 1, 500, dir.string()),
                             doctest::Contains("cache corruption"), std::runtime_error);
    }
    SUBCASE("empty cache dir disables caching") {
        FunctionTable t = cached_table(spec, 1, 50, "");
        CHECK(t.covers(1, 50));
    }
    SUBCASE("twisted specs are not cacheable") {
        MultSpec twisted = MultSpec::twist(4, 1, 0.0);
        CHECK_FALSE(cache_file_name(twisted, 1, 100).has_value());
        FunctionTable t = cached_table(twisted, 1, 100, dir.string());  // plain build
        CHECK(t.covers(1, 100));
    }
    fs::remove_all(dir);
}

TEST_CASE("cache directory resolution: flag beats environment") {
    unsetenv("ULAB_CACHE");
    CHECK(resolve_cache_dir("") == "");
    CHECK(resolve_cache_dir("/explicit") == "/explicit");
    setenv("ULAB_CACHE", "/from_env", 1);
    CHECK(resolve_cache_dir("") == "/from_env");
    CHECK(resolve_cache_dir("/explicit") == "/explicit");
    unsetenv("ULAB_CACHE");
    CHECK(resolve_cache_dir("") == "");
}

TEST_CASE("cli: sieve --print emits the signed values") {
    std::string out;
    REQUIRE(run_cli("sieve --kind liouville --start 1 --end 100 --print", &out) == 0);
    std::istringstream ss(out);
    std::vector<int> vals;
    for (std::string line; std::getline(ss, line);) vals.push_back(std::stoi(line));
    REQUIRE(vals.size() == 100);
    FunctionTable lam = sieve_table(MultSpec::liouville(), 1, 100);
    for (long long n = 1; n <= 100; ++n) CHECK(vals[n - 1] == lam.sign_at(n));
}

TEST_CASE("cli: gowers-avg example lands in (0,1)") {
    std::string out;
    REQUIRE(run_cli("gowers-avg --X 10000 --H 40 --k 1 --samples 100 --seed 1", &out) == 0);
    auto rows = csv_parse(out);
    REQUIRE(rows.size() == 2);
    REQUIRE(rows[0].size() >= 7);
    CHECK(rows[0][6] == "mean_norm");
    const double mean = std::stod(rows[1][6]);
    CHECK(mean > 0.0);
    CHECK(mean < 1.0);
}

TEST_CASE("cli: pattern census prints JSON lines") {
    std::string out;
    REQUIRE(run_cli("patterns --k 2 --N 20 --print", &out) == 0);
    CHECK(out ==
          "{\"pattern\":\"++\",\"first_n\":8}\n"
          "{\"pattern\":\"-+\",\"first_n\":2}\n"
          "{\"pattern\":\"+-\",\"first_n\":0}\n"
          "{\"pattern\":\"--\",\"first_n\":1}\n"
          "count=4\n");
}

TEST_CASE("cli: run --config honors the skip-unless-force rule") {
    fs::path dir = fresh_dir("cli_run");
    fs::path out_csv = dir / "result.csv";
    fs::path cfg = dir / "exp.cfg";
    spit(cfg, "[experiment]\nkind = chowla\nseed = 1\nX = 1000\nepsilon = 0.3\n[output]\npath = " +
                  out_csv.string() + "\n");

    REQUIRE(run_cli("run --config " + cfg.string()) == 0);
    const std::string first = slurp(out_csv);
    CHECK(csv_parse(first).size() == 2);

    spit(out_csv, "sentinel");
    REQUIRE(run_cli("run --config " + cfg.string()) == 0);
    CHECK(slurp(out_csv) == "sentinel");  // untouched without --force

    REQUIRE(run_cli("run --config " + cfg.string() + " --force") == 0);
    CHECK(slurp(out_csv) == first);  // deterministic rewrite
    fs::remove_all(dir);
}

TEST_CASE("cli: config errors exit nonzero") {
    fs::path dir = fresh_dir("cli_bad");
    fs::path cfg = dir / "bad.cfg";
    spit(cfg, "[experiment]\nkind = chowla\nbroken line\n");
    CHECK(run_cli("run --config " + cfg.string()) == 2);
    spit(cfg, "[experiment]\nkind = chowla\n");  // seed missing
    CHECK(run_cli("run --config " + cfg.string()) == 2);
    CHECK(run_cli("suite no-such-suite") == 2);
    fs::remove_all(dir);
}

TEST_CASE("cli: repeated runs give byte-identical CSV files") {
    fs::path dir = fresh_dir("cli_bytes");
    fs::path a = dir / "a.csv", b = dir / "b.csv";
    const std::string args = "chowla --X 10000 --epsilon 0.3 --shifts 0,1";
    REQUIRE(run_cli(args + " --out " + a.string()) == 0);
    REQUIRE(run_cli(args + " --out " + b.string()) == 0);
    CHECK(slurp(a) == slurp(b));
    CHECK(!slurp(a).empty());
    fs::remove_all(dir);
}

TEST_CASE("cli: algebra subcommand verifies exactly and exits zero") {
    std::string out;
    REQUIRE(run_cli("algebra --reps 80 --seed 3", &out) == 0);
    auto rows = csv_parse(out);
    REQUIRE(rows.size() >= 8);  // header + 7 families
    for (size_t i = 1; i < rows.size(); ++i) CHECK(rows[i][3] == "0");
}
