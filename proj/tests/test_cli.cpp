#include <cstdlib>
#include <functional>
#include <sys/wait.h>
#include <filesystem>
#include <fstream>
#include <sstream>

#include "doctest.h"
#include "bnprd/csv_io.hpp"
#include "bnprd/error.hpp"
#include "bnprd/pipeline.hpp"
#include "bnprd/report_io.hpp"
#include "bnprd/run_config.hpp"
#include "bnprd/synthgen.hpp"

using namespace bnprd;
namespace fs = std::filesystem;

namespace {

ErrorCode code_of(const std::function<void()>& f) {
    try {
        f();
    } catch (const Error& e) {
        return e.code();
    }
    FAIL("no error thrown");
    return ErrorCode::IoError;
}

LoadedData load_text(const std::string& text, const LoadOptions& o = {}) {
    std::istringstream in(text);
    return load_csv(parse_csv(in), o);
}

struct TempDir {
    fs::path path;
    explicit TempDir(const std::string& name) : path(fs::temp_directory_path() / name) {
        fs::remove_all(path);
        fs::create_directories(path);
    }
    ~TempDir() { fs::remove_all(path); }
};

void write_file(const fs::path& p, const std::string& text) {
    std::ofstream(p) << text;
}

std::string read_file(const fs::path& p) {
    std::ifstream in(p);
    std::ostringstream s;
    s << in.rdbuf();
    return s.str();
}

int run_cli(const std::string& args) {
    const std::string cmd = std::string(BNPRD_CLI_PATH) + " " + args + " > /dev/null 2>&1";
    const int status = std::system(cmd.c_str());
    return WIFEXITED(status) ? WEXITSTATUS(status) : -1;
}

}  // namespace

TEST_CASE("CSV loading") {
    const auto d = load_text("id,r,y\na,-1,0.5\nb,0.5,1\nc,2,3\n");
    REQUIRE(d.subjects.size() == 3);
    CHECK_FALSE(d.has_treatment_column);
    CHECK(d.subjects[1].id == "b");
    CHECK(d.subjects[1].r == 0.5);
    CHECK_FALSE(d.subjects[0].t);
    const auto sorted = validate_and_sort(d.subjects, 0.0);
    CHECK(sorted.t()[1] == 1);

    CHECK(code_of([] { load_text("id,r\na,1\n"); }) == ErrorCode::MissingColumn);
    CHECK(code_of([] { load_text("id,r,y\na,1,2\na,3,2\n"); }) == ErrorCode::DuplicateId);
    try {
        load_text("r,y\n1,2\nabc,3\n");
        FAIL("expected ParseError");
    } catch (const Error& e) {
        CHECK(e.code() == ErrorCode::ParseError);
        CHECK(std::string(e.what()).find("line 3") != std::string::npos);
        CHECK(std::string(e.what()).find("'r'") != std::string::npos);
    }
    CHECK(code_of([] { load_text("r,y\n1,\n"); }) == ErrorCode::ParseError);
    CHECK(code_of([] { load_text("r,y,t\n1,2,yes\n"); }) == ErrorCode::ParseError);
    CHECK(code_of([] { load_text("r,y\n1,2,3\n"); }) == ErrorCode::ParseError);
    CHECK(code_of([] { load_text("r,y\n1,inf\n"); }) == ErrorCode::ParseError);
}

TEST_CASE("CSV details") {
    LoadOptions o;
    o.x_column = "score";
    const auto d = load_text("\"id\",r,y,score,t\n\"a, b\",  -1 ,2,+3.5,1\n", o);
    CHECK(d.subjects[0].id == "a, b");
    CHECK(d.subjects[0].r == -1.0);
    CHECK(d.subjects[0].x == 3.5);
    CHECK(*d.subjects[0].t);

    LoadOptions all;
    all.all_remaining_covariates = true;
    const auto c = load_text("id,r,y,t,c1,c2\na,1,2,0,5,6\n", all);
    CHECK(c.covariate_names == std::vector<std::string>{"c1", "c2"});
    CHECK(c.covariates[0] == std::vector<double>{5, 6});
}

TEST_CASE("assignment reduction") {
    LoadOptions o;
    o.assignment = AssignmentReduction{{"a", "b", "c"}, 10.0, 2.0};
    const auto d = load_text("y,a,b,c\n1,20,14,30\n2,9,50,12\n", o);
    CHECK(d.subjects[0].r == 2.0);
    CHECK(d.subjects[1].r == -0.5);
}

TEST_CASE("dataset CSV round trip") {
    const auto data = generate(sharp_recovery_config(2, 60)).data;
    std::ostringstream out;
    write_dataset_csv(out, data);
    LoadOptions o;
    o.x_column = "x";
    const auto back = validate_and_sort(load_text(out.str(), o).subjects, data.cutoff());
    CHECK(back == data);
}

TEST_CASE("config parsing") {
    const auto c = parse_run_config(R"(
# analysis
[data]
input = data.csv
cutoff = 0.25
mode = fuzzy

[prior]
alpha = 2
C = 100, 0, 0, 5
variant = printed_n

[chain]
iterations = 5000
burn_in = 500
seed = 99
shift_move = true

[confounder]
source = score
covariates = c1, c2
basis = polynomial
degree = 2

[report]
format = csv
path = out/r.csv
)",
                                    "/base");
    CHECK(c.input == "/base/data.csv");
    CHECK(c.report_path == "/base/out/r.csv");
    CHECK(c.cutoff == 0.25);
    CHECK(c.mode == DesignMode::Fuzzy);
    CHECK(c.hyper.alpha == 2.0);
    CHECK(c.hyper.C(0, 0) == 100.0);
    CHECK(c.hyper.C(1, 1) == 5.0);
    CHECK(c.chain.prior == PriorVariant::PrintedN);
    CHECK(c.chain.iterations == 5000);
    CHECK(c.chain.seed == 99);
    CHECK(c.chain.enable_shift_move);
    CHECK(c.confounder.kind == ConfounderSource::Kind::Score);
    CHECK(c.confounder.covariates == std::vector<std::string>{"c1", "c2"});
    CHECK(c.confounder.basis.degree == 2);
    CHECK(c.format == ReportFormat::Csv);
    CHECK_NOTHROW(c.validate());

    CHECK(code_of([] { parse_run_config("[chain]\nbogus = 1\n"); }) == ErrorCode::InvalidConfig);
    CHECK(code_of([] { parse_run_config("[chain]\niterations = many\n"); }) == ErrorCode::InvalidConfig);
    CHECK(code_of([] { parse_run_config("[prior]\nC = 1, 2\n"); }) == ErrorCode::InvalidConfig);
    CHECK(code_of([] { parse_run_config("[data]\ncutoff = 0\n").validate(); }) == ErrorCode::InvalidConfig);
    CHECK(code_of([] { parse_run_config("[data]\ninput=x\n[chain]\nburn_in = 300000\n").validate(); }) ==
          ErrorCode::InvalidConfig);
}

TEST_CASE("config echo and digest") {
    RunConfig a;
    a.input = "d.csv";
    RunConfig b = a;
    CHECK(a.digest() == b.digest());
    apply_setting(b, "chain.seed", "5");
    CHECK(a.digest() != b.digest());
    const auto echo = a.echo();
    CHECK(echo.front().first == "data.input");
    // Every echoed setting can be applied back.
    RunConfig c;
    for (const auto& [k, v] : echo) {
        if (v != "auto") apply_setting(c, k, v);
    }
    CHECK(c.digest() == a.digest());
}

TEST_CASE("pipeline end to end") {
    TempDir dir("bnprd_cli_test");
    write_dataset_csv(dir.path / "d.csv", generate(sharp_recovery_config(6, 80)).data);
    const RunConfig c = parse_run_config(
        "[data]\ninput = d.csv\n[chain]\niterations = 4000\nburn_in = 1000\n[report]\npath = rep.json\n",
        dir.path);
    const auto out = run(c);
    CHECK(out.report_file == dir.path / "rep.json");
    CHECK(read_file(out.report_file) == report_to_json(out.report));
    CHECK(out.report.draws_total == 3000);
    CHECK(out.report.metadata.software_version == std::string(version()));
    CHECK(out.report.metadata.config_digest == c.digest());
    CHECK_FALSE(out.report.notes.empty());
    CHECK(report_from_json(read_file(out.report_file)) == out.report);

    // Fuzzy mode on sharp data: fuzzy effect equals the mean difference in every draw.
    RunConfig f = c;
    f.mode = DesignMode::Fuzzy;
    const auto prepared = prepare_dataset(f);
    const auto draws = collect_draws(prepared.data, f);
    for (const auto& d : draws.distinct) {
        if (d.mean_diff) CHECK(*d.fuzzy_effect == *d.mean_diff);
    }

    // min_side removes draws with a thin side.
    RunConfig strict = c;
    strict.min_side = 8;
    const auto s = analyze(prepare_dataset(strict).data, strict);
    CHECK(s.draws_used <= s.draws_total);
    CHECK(s.find("treatment.sample_size")->summary->lower >= 8.0);
    CHECK(s.find("non_treatment.sample_size")->summary->lower >= 8.0);
    strict.min_side = 70;
    CHECK(code_of([&] { analyze(prepare_dataset(strict).data, strict); }) == ErrorCode::NoDraws);
}

TEST_CASE("report directory override") {
    RunConfig c;
    c.report_path = "some/where/report.json";
    ::unsetenv(kReportDirEnv);
    CHECK(resolve_report_path(c) == fs::path("some/where/report.json"));
    ::setenv(kReportDirEnv, "/tmp/elsewhere", 1);
    CHECK(resolve_report_path(c) == fs::path("/tmp/elsewhere/report.json"));
    ::unsetenv(kReportDirEnv);
}

TEST_CASE("exit codes") {
    CHECK(exit_code(ErrorCategory::Config) == 2);
    CHECK(exit_code(ErrorCategory::Data) == 3);
    CHECK(exit_code(ErrorCategory::Numerical) == 4);

    TempDir dir("bnprd_cli_exit");
    const auto ini = dir.path / "a.ini";
    write_file(dir.path / "d.csv", "id,r,y,x\na,-1,0,0\nb,-0.5,1,0.2\nc,0.5,2,1\nd,1,3,0.9\n");
    write_file(ini, "[data]\ninput = d.csv\n[chain]\niterations = 500\nburn_in = 100\n[report]\npath = r.json\n");
    CHECK(run_cli("run -q -c " + ini.string()) == 0);
    CHECK(fs::exists(dir.path / "r.json"));
    CHECK(run_cli("run -q -c " + ini.string() + " --set chain.burn_in=900") == 2);
    CHECK(run_cli("run -q -c " + ini.string() + " --set data.y_column=nope") == 3);
    CHECK(run_cli("run -q -c " + ini.string() + " --set data.cutoff=5") == 3);
    CHECK(run_cli("run --no-such-flag") == 2);
    CHECK(run_cli("exact -c " + ini.string() + " -o " + (dir.path / "exact.tsv").string()) == 0);
    CHECK(read_file(dir.path / "exact.tsv").rfind("composition\tprobability\n", 0) == 0);
    CHECK(run_cli("synth -o " + (dir.path / "s.csv").string() + " --seed 3 --n 50") == 0);
}
