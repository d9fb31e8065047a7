#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>

namespace fs = std::filesystem;

namespace {

const std::string cli = DTCLI_PATH;

int run(const std::string& args) {
    const std::string cmd = cli + " " + args + " >/dev/null 2>&1";
    const int status = std::system(cmd.c_str());
    return WEXITSTATUS(status);
}

std::string slurp(const fs::path& p) {
    std::ifstream in(p);
    REQUIRE(in.good());
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

std::string first_line(const fs::path& p) {
    std::ifstream in(p);
    REQUIRE(in.good());
    std::string line;
    std::getline(in, line);
    return line;
}

struct TempDir {
    fs::path path;
    explicit TempDir(const std::string& tag) : path(fs::temp_directory_path() / tag) {
        fs::remove_all(path);
        fs::create_directories(path);
    }
    ~TempDir() { fs::remove_all(path); }
    std::string sub(const std::string& name) const { return (path / name).string(); }
};

void write_disk_spec(const fs::path& p, double radius) {
    std::ofstream out(p);
    out << "{\"center\": [0.0, 0.0], \"radius\": " << radius << ", \"eps\": 0.0}\n";
}

void write_perturbed_spec(const fs::path& p) {
    std::ofstream out(p);
    out << "{\"center\": [0.0, 0.0], \"radius\": 0.4, \"eps\": 0.02, "
           "\"delta\": {\"coeffs\": [[0.5,0],[0,0],[0,0],[0,0],[0,0],[0,0],[0.5,0]]}}\n";
}

} // namespace

TEST_CASE("dtn subcommand: formats and the eps=0 transplant identity") {
    TempDir tmp("dtcli_test_dtn");
    write_disk_spec(tmp.path / "disk.json", 0.5);

    CHECK(run("dtn --spec " + tmp.sub("disk.json") + " --method closed --n-modes 48 --out " +
              tmp.sub("closed")) == 0);
    CHECK(first_line(tmp.path / "closed/neumann.csv") == "mode,re,im");
    CHECK(fs::exists(tmp.path / "closed/manifest.json"));

    CHECK(run("dtn --spec " + tmp.sub("disk.json") + " --method transplant --n-modes 48 --out " +
              tmp.sub("tp")) == 0);
    // eps = 0: the transplant pipeline reproduces the closed form; compare the
    // two CSVs line by line numerically
    std::ifstream a(tmp.path / "closed/neumann.csv"), b(tmp.path / "tp/neumann.csv");
    std::string la, lb;
    std::getline(a, la);
    std::getline(b, lb);
    int checked = 0;
    while (std::getline(a, la) && std::getline(b, lb)) {
        std::replace(la.begin(), la.end(), ',', ' ');
        std::replace(lb.begin(), lb.end(), ',', ' ');
        std::istringstream sa(la), sb(lb);
        int ma, mb;
        double ra, ia, rb, ib;
        sa >> ma >> ra >> ia;
        sb >> mb >> rb >> ib;
        CHECK(ma == mb);
        CHECK(std::abs(ra - rb) < 1e-10);
        CHECK(std::abs(ia - ib) < 1e-10);
        ++checked;
    }
    CHECK(checked == 97);
}

TEST_CASE("dtn subcommand: oracle method and grid dump") {
    TempDir tmp("dtcli_test_oracle");
    write_disk_spec(tmp.path / "disk.json", 0.5);
    CHECK(run("dtn --spec " + tmp.sub("disk.json") +
              " --method oracle --grid 96 --dump-grid --out " + tmp.sub("orc")) == 0);
    CHECK(fs::exists(tmp.path / "orc/neumann.csv"));
    CHECK(fs::exists(tmp.path / "orc/grid.bin"));
    CHECK(fs::exists(tmp.path / "orc/grid.json"));
}

TEST_CASE("identify subcommand") {
    TempDir tmp("dtcli_test_identify");
    write_disk_spec(tmp.path / "disk.json", 0.5);
    write_perturbed_spec(tmp.path / "pert.json");

    CHECK(run("identify --synthetic-spec " + tmp.sub("disk.json") +
              " --mode exact --n-modes 48 --out " + tmp.sub("id")) == 0);
    const std::string id_json = slurp(tmp.path / "id/identification.json");
    CHECK(id_json.find("\"radius\": 0.5") != std::string::npos);
    CHECK(id_json.find("\"status\": \"ok\"") != std::string::npos);

    // perturbed truth: symdiff column populated
    CHECK(run("identify --synthetic-spec " + tmp.sub("pert.json") + " --n-modes 48 --out " +
              tmp.sub("idp")) == 0);
    CHECK(slurp(tmp.path / "idp/identification.json").find("symdiff_to_truth") !=
          std::string::npos);

    // infeasible init: numerical failure exit code
    CHECK(run("identify --synthetic-spec " + tmp.sub("disk.json") +
              " --init-radius 0.92 --n-modes 32 --out " + tmp.sub("bad")) == 3);
}

TEST_CASE("sweep subcommand: headers, slopes, determinism") {
    TempDir tmp("dtcli_test_sweep");
    CHECK(run("sweep --what dtn-error --eps-list 0.01,0.02 --n-modes 48 --out " +
              tmp.sub("s1")) == 0);
    CHECK(first_line(tmp.path / "s1/sweep.csv") == "eps,error_hminushalf,xi_w1inf,rho");
    CHECK(run("sweep --what dtn-error --eps-list 0.01,0.02 --n-modes 48 --out " +
              tmp.sub("s2")) == 0);
    CHECK(slurp(tmp.path / "s1/sweep.csv") == slurp(tmp.path / "s2/sweep.csv"));
    CHECK(slurp(tmp.path / "s1/slope.json") == slurp(tmp.path / "s2/slope.json"));

    CHECK(run("sweep --what stability --eps-list 0.01,0.02 --n-modes 48 --out " +
              tmp.sub("st")) == 0);
    CHECK(first_line(tmp.path / "st/stability.csv") == "eps,symdiff,residual,b_re,b_im,R");

    CHECK(run("sweep --what theodorsen --radius 1.0 --delta-shape cos1 --eps-list "
              "0.01,0.02,0.04 --out " +
              tmp.sub("th")) == 0);
    CHECK(first_line(tmp.path / "th/theodorsen.csv") == "eps,deviation_sup");

    // parallel workers produce the same bytes
    CHECK(run("sweep --what dtn-error --eps-list 0.01,0.02 --n-modes 48 --jobs 2 --out " +
              tmp.sub("s3")) == 0);
    CHECK(slurp(tmp.path / "s1/sweep.csv") == slurp(tmp.path / "s3/sweep.csv"));

    CHECK(run("sweep --what dtn-error --eps-list '' --out " + tmp.sub("bad")) == 2);
    CHECK(run("sweep --what nonsense --out " + tmp.sub("bad2")) == 2);
}

TEST_CASE("precomp subcommand") {
    TempDir tmp("dtcli_test_precomp");
    CHECK(run("precomp --map-spec identity --n-max 8 --norm-modes 16 --out " + tmp.sub("id")) ==
          0);
    CHECK(first_line(tmp.path / "id/distortion.csv") == "n,distortion,bound,ratio");
    CHECK(first_line(tmp.path / "id/composition.csv") == "eps,error,bound");
    // identity map: all-zero distortion column
    {
        std::ifstream in(tmp.path / "id/distortion.csv");
        std::string line;
        std::getline(in, line);
        while (std::getline(in, line)) {
            std::replace(line.begin(), line.end(), ',', ' ');
            std::istringstream ss(line);
            int n;
            double dist, bound, ratio;
            ss >> n >> dist >> bound >> ratio;
            CHECK(dist < 1e-11);
        }
    }
    CHECK(run("precomp --map-spec rotation:0.1 --n-max 6 --norm-modes 16 --out " +
              tmp.sub("rot")) == 0);
    CHECK(run("precomp --map-spec moebius:0.3,0 --n-max 6 --norm-modes 32 --out " +
              tmp.sub("mo")) == 0);
    const std::string norms = slurp(tmp.path / "mo/norms.json");
    CHECK(norms.find("operator_norm") != std::string::npos);

    CHECK(run("precomp --map-spec wat:1 --out " + tmp.sub("bad")) == 2);
}

TEST_CASE("DTCLI_OUT_ROOT roots relative output paths") {
    TempDir tmp("dtcli_test_outroot");
    write_disk_spec(tmp.path / "disk.json", 0.5);
    const std::string cmd = "DTCLI_OUT_ROOT=" + tmp.path.string() + " " + cli + " dtn --spec " +
                            tmp.sub("disk.json") +
                            " --method closed --n-modes 16 --out nested/run >/dev/null 2>&1";
    CHECK(WEXITSTATUS(std::system(cmd.c_str())) == 0);
    CHECK(fs::exists(tmp.path / "nested/run/neumann.csv"));
}

TEST_CASE("malformed spec file exits with the config code") {
    TempDir tmp("dtcli_test_badjson");
    {
        std::ofstream out(tmp.path / "bad.json");
        out << "{this is not json";
    }
    CHECK(run("dtn --spec " + tmp.sub("bad.json") + " --out " + tmp.sub("x")) == 2);
    CHECK(run("dtn --spec " + tmp.sub("missing.json") + " --out " + tmp.sub("y")) == 2);
}
