#include <catch2/catch_amalgamated.hpp>

#include <hyperbox/sweep.hpp>

#include <cstdio>
#include <fstream>
#include <sstream>
#include <string>
#include <sys/wait.h>

// Drives the installed binary end to end through a shell, capturing exit
// status and stdout. stderr is dropped unless a test merges it in.

namespace {

struct CmdResult {
    int status;
    std::string out;
};

CmdResult run_cli(const std::string& args, bool merge_stderr = false) {
    const std::string cmd = std::string("\"") + HYPERBOX_CLI_PATH + "\" " + args +
                            (merge_stderr ? " 2>&1" : " 2>/dev/null");
    FILE* pipe = popen(cmd.c_str(), "r");
    REQUIRE(pipe != nullptr);
    std::string out;
    char buf[4096];
    std::size_t n;
    while ((n = fread(buf, 1, sizeof buf, pipe)) > 0) out.append(buf, n);
    const int rc = pclose(pipe);
    REQUIRE(rc != -1);
    return {WIFEXITED(rc) ? WEXITSTATUS(rc) : -1, out};
}

bool contains(const std::string& hay, const std::string& needle) {
    return hay.find(needle) != std::string::npos;
}

std::string slurp(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    REQUIRE(in.is_open());
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

} // namespace

TEST_CASE("cli minbox prints the witness", "[cli]") {
    const auto r = run_cli("minbox --p 7 --c 3");
    REQUIRE(r.status == 0);
    REQUIRE(contains(r.out, "h_star=3"));
    REQUIRE(contains(r.out, "x1=1 y1=3 x2=2 y2=5"));
    REQUIRE(contains(r.out, "a=1 b_sign=1 b=2"));

    const auto r5 = run_cli("minbox --p 7 --c 5");
    REQUIRE(r5.status == 0);
    REQUIRE(contains(r5.out, "h_star=2"));
    REQUIRE(contains(r5.out, "x1=1 y1=5 x2=2 y2=6"));

    const auto j = run_cli("minbox --p 7 --c 3 --format json");
    REQUIRE(j.status == 0);
    const auto obj = hyperbox::ojson::parse(j.out);
    REQUIRE(obj["p"] == 7);
    REQUIRE(obj["h_star"] == 3);
    REQUIRE(obj["x2"] == 2);
}

TEST_CASE("cli criterion reports both outcomes", "[cli]") {
    const auto yes = run_cli("criterion --p 7 --c 3 --H 3");
    REQUIRE(yes.status == 0);
    REQUIRE(contains(yes.out, "exists=true"));
    REQUIRE(contains(yes.out, "a=1 b_sign=1 b=2"));

    const auto no = run_cli("criterion --p 7 --c 3 --H 2");
    REQUIRE(no.status == 0);
    REQUIRE(contains(no.out, "exists=false"));
    REQUIRE_FALSE(contains(no.out, "b_sign"));

    const auto even = run_cli("criterion --p 7 --c 3 --H 6 --even");
    REQUIRE(even.status == 0);
    REQUIRE(contains(even.out, "even=true"));
    REQUIRE(contains(even.out, "exists=true"));
    REQUIRE(contains(even.out, "a=4 b_sign=1 b=4"));
}

TEST_CASE("cli charsum, shao and moment expose the statistics", "[cli]") {
    const auto s = run_cli("charsum --p 7 --N 0 --H 3");
    REQUIRE(s.status == 0);
    REQUIRE(contains(s.out, "sum=1"));

    const auto z = run_cli("charsum --p 7 --N 3 --H 2");
    REQUIRE(z.status == 0);
    REQUIRE(contains(z.out, "sum=0"));
    REQUIRE(contains(z.out, "max_abs=1"));

    const auto shao = run_cli("shao --p 7 --H 2 --r 1 --family 0");
    REQUIRE(shao.status == 0);
    REQUIRE(contains(shao.out, "J=1"));
    REQUIRE(contains(shao.out, "value=4"));

    const auto shao_def = run_cli("shao --p 7 --H 2 --r 1");
    REQUIRE(shao_def.status == 0);
    REQUIRE(contains(shao_def.out, "J=3")); // default family 0, 2, 4
    REQUIRE(contains(shao_def.out, "value=9"));

    const auto mom = run_cli("moment --p 7 --c 1 --U 1 --r 1");
    REQUIRE(mom.status == 0);
    REQUIRE(contains(mom.out, "value=5"));
}

TEST_CASE("cli nqr and dichotomy answer the survey questions", "[cli]") {
    const auto n = run_cli("nqr --p 23");
    REQUIRE(n.status == 0);
    REQUIRE(contains(n.out, "n_p=5"));

    const auto d = run_cli("dichotomy --p 7");
    REQUIRE(d.status == 0);
    REQUIRE(contains(d.out, "branch_A=false"));
    REQUIRE(contains(d.out, "branch_B=true"));
    REQUIRE(contains(d.out, "max_h_star=3"));
}

TEST_CASE("cli sweep writes CSV to stdout and files identically", "[cli]") {
    const auto to_stdout = run_cli("sweep --mode minbox --p-min 7 --p-max 7");
    REQUIRE(to_stdout.status == 0);
    REQUIRE(contains(to_stdout.out, "p,c,h_star,x1,y1,x2,y2,a,b_sign,b\n"));
    REQUIRE(contains(to_stdout.out, "7,1,2,2,4,3,5,1,1,1\n"));
    REQUIRE(contains(to_stdout.out, "7,6,2,2,3,3,2,1,-1,1\n"));

    const std::string path = "cli_sweep_tmp.csv";
    const auto to_file =
        run_cli("sweep --mode minbox --p-min 7 --p-max 7 --out " + path);
    REQUIRE(to_file.status == 0);
    REQUIRE(to_file.out.empty());
    REQUIRE(slurp(path) == to_stdout.out);
    std::remove(path.c_str());

    const auto json = run_cli("sweep --mode minbox --p-min 7 --p-max 7 --format json");
    REQUIRE(json.status == 0);
    const auto arr = hyperbox::ojson::parse(json.out);
    REQUIRE(arr.is_array());
    REQUIRE(arr.size() == 6);
    REQUIRE(arr[2]["h_star"] == 3);
}

TEST_CASE("cli sweep output does not depend on --threads", "[cli]") {
    const std::string one = "cli_threads_one.csv";
    const std::string four = "cli_threads_four.csv";
    REQUIRE(run_cli("sweep --mode minbox --p-min 5 --p-max 31 --threads 1 --out " + one)
                .status == 0);
    REQUIRE(run_cli("sweep --mode minbox --p-min 5 --p-max 31 --threads 4 --out " + four)
                .status == 0);
    REQUIRE(slurp(one) == slurp(four));
    std::remove(one.c_str());
    std::remove(four.c_str());
}

TEST_CASE("cli sweep warns on an empty prime range", "[cli]") {
    const auto r = run_cli("sweep --mode nqr --p-min 8 --p-max 10", true);
    REQUIRE(r.status == 0);
    REQUIRE(contains(r.out, "warning"));
    REQUIRE(contains(r.out, "p,n_p"));
}

TEST_CASE("cli fit recovers a slope from swept files", "[cli]") {
    const std::string csv = "cli_fit_tmp.csv";
    REQUIRE(run_cli("sweep --mode nqr --p-min 3 --p-max 101 --out " + csv).status == 0);
    const auto fit = run_cli("fit --in " + csv + " --field n_p");
    REQUIRE(fit.status == 0);
    REQUIRE(contains(fit.out, "alpha="));
    REQUIRE(contains(fit.out, "reference_quarter=0.25"));
    std::remove(csv.c_str());

    const std::string json = "cli_fit_tmp.json";
    REQUIRE(run_cli("sweep --mode nqr --p-min 3 --p-max 101 --format json --out " + json)
                .status == 0);
    const auto jfit = run_cli("fit --in " + json + " --field n_p");
    REQUIRE(jfit.status == 0);
    REQUIRE(contains(jfit.out, "alpha="));
    std::remove(json.c_str());
}

TEST_CASE("cli exit codes separate usage from domain errors", "[cli]") {
    REQUIRE(run_cli("").status == 1); // a subcommand is required
    REQUIRE(run_cli("minbox --p 7").status == 1); // missing --c
    REQUIRE(run_cli("minbox --p 7 --c 1 --bogus").status == 1);
    REQUIRE(run_cli("sweep --mode bogus --p-min 5 --p-max 7").status == 1);
    REQUIRE(run_cli("sweep --mode nqr --p-min 9 --p-max 3").status == 1);
    REQUIRE(run_cli("sweep --mode minbox --p-min 5 --p-max 7 --c 1 --sample-c 2").status ==
            1);
    REQUIRE(run_cli("fit --in no_such_file.csv --field n_p").status == 1);

    REQUIRE(run_cli("nqr --p 6").status == 2); // composite modulus
    REQUIRE(run_cli("minbox --p 7 --c 7").status == 2); // c = 0 mod p
    REQUIRE(run_cli("criterion --p 7 --c 3 --H 99").status == 2);
    REQUIRE(run_cli("charsum --p 7 --N 6 --H 3").status == 2);
    REQUIRE(run_cli("moment --p 7 --c 1 --U 7 --r 1").status == 2);
}
