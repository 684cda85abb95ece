// End-to-end tests of the command-line tool. The first argument is the path
// to the binary under test; everything runs through a shell with stdout and
// stderr captured separately, checking exit codes and output contracts.

#include <sys/wait.h>
#include <unistd.h>

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <sstream>
#include <string>

#include "bmg/jsonio.hpp"

namespace fs = std::filesystem;
using bmg::json;

namespace {

int failures = 0;
int checks = 0;

#define EXPECT(cond)                                                                   \
    do {                                                                               \
        ++checks;                                                                      \
        if (!(cond)) {                                                                 \
            ++failures;                                                                \
            std::cerr << "FAIL line " << __LINE__ << ": " << #cond << "\n";            \
        }                                                                              \
    } while (0)

#define EXPECT_MSG(cond, msg)                                                          \
    do {                                                                               \
        ++checks;                                                                      \
        if (!(cond)) {                                                                 \
            ++failures;                                                                \
            std::cerr << "FAIL line " << __LINE__ << ": " << #cond << "  [" << (msg)   \
                      << "]\n";                                                        \
        }                                                                              \
    } while (0)

std::string g_bin;
fs::path g_dir;

struct Res {
    int code = -1;
    std::string out, err;
};

std::string slurp(const fs::path& p) {
    std::ifstream in(p, std::ios::binary);
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

Res run(const std::string& args) {
    fs::path so = g_dir / "stdout.txt", se = g_dir / "stderr.txt";
    std::string cmd = "\"" + g_bin + "\" " + args + " > \"" + so.string() + "\" 2> \"" +
                      se.string() + "\"";
    int rc = std::system(cmd.c_str());
    Res r;
    r.code = WIFEXITED(rc) ? WEXITSTATUS(rc) : -1;
    r.out = slurp(so);
    r.err = slurp(se);
    return r;
}

bool contains(const std::string& hay, const std::string& needle) {
    return hay.find(needle) != std::string::npos;
}

json parse(const std::string& text) { return json::parse(text); }

void test_usage_and_version() {
    auto v = run("--version");
    EXPECT(v.code == 0);
    EXPECT(contains(v.out, "bmg"));

    EXPECT(run("").code == 64);                       // a subcommand is required
    EXPECT(run("frobnicate").code == 64);             // unknown subcommand
    EXPECT(run("bm --graph x").code == 64);           // missing required options
    EXPECT(run("kl --cartan A2 --top e --bogus").code == 64);
    auto h = run("--help");
    EXPECT(h.code == 0);
    EXPECT(contains(h.out, "build"));
}

void test_build() {
    fs::path g = g_dir / "a2.json";
    auto r = run("build --type finite --cartan A2 --top \"1 2 1\" --out \"" + g.string() + "\"");
    EXPECT_MSG(r.code == 0, r.err);
    auto summary = parse(r.out);
    EXPECT(summary["vertices"] == 6);
    EXPECT(summary["edges"] == 9);
    EXPECT(fs::exists(g));
    auto gj = parse(slurp(g));
    EXPECT(gj["vertices"].size() == 6);
    // The manifest records the tool version and the output hash.
    auto man = parse(slurp(g.string() + ".manifest.json"));
    EXPECT(man["subcommand"] == "build");
    EXPECT(man["output_hash"] == bmg::sha256_hex(slurp(g)));
    EXPECT(contains(man["tool_version"].get<std::string>(), "bmg"));

    // Missing per-type options refuse with a JSON reason on stderr.
    auto bad = run("build --type finite --cartan A2 --out \"" + (g_dir / "x.json").string() + "\"");
    EXPECT(bad.code == 1);
    EXPECT(contains(parse(bad.err)["error"].get<std::string>(), "requires --cartan and --top"));
    auto bad2 = run("build --type nonsense --out \"" + (g_dir / "x.json").string() + "\"");
    EXPECT(bad2.code == 1);

    // Internal errors (not refusals) exit with 2.
    auto oops = run("build --type affine-gr --cartan A1 --cutoff abc --out \"" +
                    (g_dir / "x.json").string() + "\"");
    EXPECT(oops.code == 2);
    EXPECT(contains(oops.err, "internal_error"));

    // The affine slice builder and the file round trip.
    fs::path ga = g_dir / "aff.json";
    auto r2 = run("build --type affine-gr --cartan A1 --cutoff 6 --out \"" + ga.string() + "\"");
    EXPECT_MSG(r2.code == 0, r2.err);
    EXPECT(parse(r2.out)["vertices"] == 7);
    fs::path gb = g_dir / "aff2.json";
    auto r3 = run("build --type file --graph \"" + ga.string() + "\" --out \"" + gb.string() + "\"");
    EXPECT_MSG(r3.code == 0, r3.err);
    EXPECT(slurp(ga) == slurp(gb));
}

void test_gkm() {
    fs::path b2 = g_dir / "b2.json";
    run("build --type finite --cartan B2 --top \"1 2 1 2\" --out \"" + b2.string() + "\"");

    auto pass = run("gkm --graph \"" + b2.string() + "\" --coeff Q");
    EXPECT_MSG(pass.code == 0, pass.err);
    EXPECT(parse(pass.out)["pass"] == true);

    auto fail = run("gkm --graph \"" + b2.string() + "\" --coeff Fp:2");
    EXPECT(fail.code == 0); // diagnosis, not an error
    auto fj = parse(fail.out);
    EXPECT(fj["pass"] == false);
    EXPECT(fj["dependent_pairs"].size() >= 1);
    EXPECT(fj["zero_label_edges"].empty());

    auto miss = run("gkm --graph \"" + (g_dir / "absent.json").string() + "\" --coeff Q");
    EXPECT(miss.code == 1);
}

void test_bm_cache_and_manifest() {
    fs::path g = g_dir / "a2.json";
    fs::path s1 = g_dir / "s1.json", s2 = g_dir / "s2.json";

    auto r1 = run("bm --graph \"" + g.string() + "\" --coeff Q --top \"1 2 1\" --out \"" +
                  s1.string() + "\"");
    EXPECT_MSG(r1.code == 0, r1.err);
    EXPECT(contains(r1.err, "cache miss"));
    EXPECT(!contains(r1.err, "cache hit"));

    auto r2 = run("bm --graph \"" + g.string() + "\" --coeff Q --top \"1 2 1\" --out \"" +
                  s2.string() + "\"");
    EXPECT_MSG(r2.code == 0, r2.err);
    EXPECT(contains(r2.err, "cache hit"));
    EXPECT(slurp(s1) == slurp(s2)); // byte-identical hit vs miss

    // Stdout mode emits the same content plus a newline, without a manifest.
    auto r3 = run("bm --graph \"" + g.string() + "\" --coeff Q --top \"1 2 1\"");
    EXPECT_MSG(r3.code == 0, r3.err);
    EXPECT(r3.out == slurp(s1) + "\n");

    // --no-cache recomputes silently and identically.
    auto r4 = run("bm --graph \"" + g.string() + "\" --coeff Q --top \"1 2 1\" --no-cache");
    EXPECT_MSG(r4.code == 0, r4.err);
    EXPECT(!contains(r4.err, "cache"));
    EXPECT(r4.out == r3.out);

    // Thread count must not change the bytes.
    auto r5 = run("bm --graph \"" + g.string() + "\" --coeff Q --top \"1 2 1\" --no-cache --jobs 4");
    EXPECT(r5.out == r3.out);

    // The manifest ties the output to its inputs.
    auto man = parse(slurp(s1.string() + ".manifest.json"));
    EXPECT(man["subcommand"] == "bm");
    EXPECT(man["output_hash"] == bmg::sha256_hex(slurp(s1)));
    EXPECT(man["input_hashes"]["graph"] == bmg::sha256_hex(slurp(g)));
    EXPECT(man["arguments"]["coeff"] == "Q");

    // Explicit windows: an over-tight bound refuses.
    auto tight = run("bm --graph \"" + g.string() + "\" --coeff Q --top \"1 2 1\" --window 0,1");
    EXPECT(tight.code == 1);
    EXPECT(contains(parse(tight.err)["error"].get<std::string>(), "degree bound too small"));
    auto badw = run("bm --graph \"" + g.string() + "\" --coeff Q --top \"1 2 1\" --window 7");
    EXPECT(badw.code == 1);

    auto badtop = run("bm --graph \"" + g.string() + "\" --coeff Q --top nonsense");
    EXPECT(badtop.code == 1);
    auto badk = run("bm --graph \"" + g.string() + "\" --coeff Fp:6 --top \"1 2 1\"");
    EXPECT(badk.code == 1);
}

void test_sections() {
    fs::path s1 = g_dir / "s1.json";
    auto all = run("sections --sheaf \"" + s1.string() +
                   "\" --open \"e,1,2,1 2,2 1,1 2 1\"");
    EXPECT_MSG(all.code == 0, all.err);
    auto aj = parse(all.out);
    EXPECT(aj["open"].size() == 6);
    EXPECT(aj["dims"]["0"] == 1);
    EXPECT(aj["dims"]["2"] == 4); // one degree-0 generator in degree 2, plus two degree-2 ones
    EXPECT((aj["generator_degrees"] == json::array({0, 2, 2, 4, 4, 6})));

    auto top = run("sections --sheaf \"" + s1.string() + "\" --open \"1 2 1\"");
    EXPECT_MSG(top.code == 0, top.err);
    EXPECT(parse(top.out)["dims"]["0"] == 1);

    auto empty = run("sections --sheaf \"" + s1.string() + "\"");
    EXPECT_MSG(empty.code == 0, empty.err);
    EXPECT(parse(empty.out)["dims"]["0"] == 0);

    auto notopen = run("sections --sheaf \"" + s1.string() + "\" --open e");
    EXPECT(notopen.code == 1);
    EXPECT(contains(parse(notopen.err)["error"].get<std::string>(), "not up-closed"));

    auto badid = run("sections --sheaf \"" + s1.string() + "\" --open nonsense");
    EXPECT(badid.code == 1);
}

void test_smooth() {
    fs::path gi = g_dir / "a3i.json";
    run("build --type finite --cartan A3 --top \"2 1 3 2\" --out \"" + gi.string() + "\"");

    auto r = run("smooth --graph \"" + gi.string() +
                 "\" --coeff Q --top \"2 1 3 2\" --method compare");
    EXPECT_MSG(r.code == 0, r.err);
    auto j = parse(r.out);
    EXPECT(j["l"] == 4);
    EXPECT(j["symmetric_difference"].empty());
    EXPECT(j["smooth"].size() == 12);

    // With an explicit l the comparison is free to disagree.
    auto r2 = run("smooth --graph \"" + gi.string() +
                  "\" --coeff Q --top \"2 1 3 2\" --method compare --l 3");
    EXPECT_MSG(r2.code == 0, r2.err);
    EXPECT(parse(r2.out)["l"] == 3);

    // File output echoes the report and writes a manifest.
    fs::path rep = g_dir / "smooth.json";
    auto r3 = run("smooth --graph \"" + gi.string() +
                  "\" --coeff Q --top \"2 1 3 2\" --method stalks --out \"" + rep.string() + "\"");
    EXPECT_MSG(r3.code == 0, r3.err);
    EXPECT(parse(slurp(rep))["smooth"].size() == 12);
    EXPECT(r3.out == slurp(rep) + "\n");
    EXPECT(parse(slurp(rep.string() + ".manifest.json"))["subcommand"] == "smooth");

    fs::path b2 = g_dir / "b2.json";
    auto gate = run("smooth --graph \"" + b2.string() +
                    "\" --coeff Fp:2 --top \"1 2 1 2\" --method compare");
    EXPECT(gate.code == 1);
    EXPECT(contains(parse(gate.err)["error"].get<std::string>(), "are dependent"));

    auto badm = run("smooth --graph \"" + b2.string() +
                    "\" --coeff Q --top \"1 2 1 2\" --method sideways");
    EXPECT(badm.code == 1);
}

void test_kl() {
    auto r = run("kl --cartan A3 --top \"2 1 3 2\"");
    EXPECT_MSG(r.code == 0, r.err);
    EXPECT(contains(r.out, "e\t1+q"));
    EXPECT(contains(r.out, "2\t1+q"));
    EXPECT(contains(r.out, "2 1 3 2\t1"));

    auto j = run("kl --cartan A3 --top \"2 1 3 2\" --json");
    EXPECT_MSG(j.code == 0, j.err);
    auto rows = parse(j.out)["rows"];
    EXPECT(rows.size() == 14);
    EXPECT(rows["e"] == "1+q");
    EXPECT(rows["1 3 2"] == "1");

    EXPECT(run("kl --cartan Z9 --top e").code == 1);
}

void test_tilt() {
    auto r = run("tilt --cartan A1 --p 5 --lambda 5");
    EXPECT_MSG(r.code == 0, r.err);
    EXPECT(contains(r.out, "[5]\t1"));
    EXPECT(contains(r.out, "[3]\t2"));
    EXPECT(contains(r.out, "[-5]\t1"));

    auto j = run("tilt --cartan A1 --p 5 --lambda 3 --json");
    EXPECT_MSG(j.code == 0, j.err);
    auto rows = parse(j.out)["rows"];
    EXPECT(rows["[3]"] == 1);
    EXPECT(rows["[-3]"] == 1);
    EXPECT(rows["[1]"] == 1);

    auto gate = run("tilt --cartan A1 --p 3 --lambda 1");
    EXPECT(gate.code == 1);
    EXPECT(contains(parse(gate.err)["error"].get<std::string>(), "p > h+1"));
    EXPECT(run("tilt --cartan A1 --p 3 --lambda 1 --force").code == 0);
    EXPECT(run("tilt --cartan A1 --p x --lambda 1").code == 1);
}

void test_verify_and_decompose() {
    fs::path s1 = g_dir / "s1.json";
    auto ok = run("verify --sheaf \"" + s1.string() + "\"");
    EXPECT_MSG(ok.code == 0, ok.err);
    EXPECT(parse(ok.out)["ok"] == true);

    auto dec = run("decompose --sheaf \"" + s1.string() + "\"");
    EXPECT_MSG(dec.code == 0, dec.err);
    auto dj = parse(dec.out);
    EXPECT(dj.size() == 1);
    EXPECT(dj[0]["vertex"] == "1 2 1");
    EXPECT(dj[0]["shift"] == 0);
    EXPECT(dj[0]["multiplicity"] == 1);

    // Tamper with a stored restriction value (shapes intact, so the file still
    // loads): verification pinpoints the edge axiom, and decomposition refuses
    // to run.
    auto sj = parse(slurp(s1));
    sj["rho"]["e->1"]["head"]["0"][0][0] = "2";
    fs::path bad = g_dir / "bad.json";
    std::ofstream(bad) << bmg::canonical_dump(sj);
    auto vr = run("verify --sheaf \"" + bad.string() + "\"");
    EXPECT(vr.code == 1);
    auto ej = parse(vr.err);
    EXPECT(ej["axiom"] == 2);
    EXPECT(contains(ej["error"].get<std::string>(), "axiom"));
    auto dr = run("decompose --sheaf \"" + bad.string() + "\"");
    EXPECT(dr.code == 1);
    EXPECT(contains(parse(dr.err)["error"].get<std::string>(), "requires a verified sheaf"));

    // A structurally broken file is a refusal, not a crash — both a wrong
    // value type and a shape drift surface as "malformed sheaf file".
    fs::path trash = g_dir / "trash.json";
    std::ofstream(trash) << "{\"graph\": 3}";
    auto tr = run("verify --sheaf \"" + trash.string() + "\"");
    EXPECT(tr.code == 1);
    auto sj2 = parse(slurp(s1));
    sj2["stalks"]["e"] = json::array({0, 2});
    fs::path drift = g_dir / "drift.json";
    std::ofstream(drift) << bmg::canonical_dump(sj2);
    auto dv = run("verify --sheaf \"" + drift.string() + "\"");
    EXPECT(dv.code == 1);
    EXPECT(contains(parse(dv.err)["error"].get<std::string>(), "malformed sheaf file"));
}

} // namespace

int main(int argc, char** argv) {
    if (argc < 2) {
        std::cerr << "usage: bmg_cli_tests <path-to-bmg>\n";
        return 2;
    }
    g_bin = argv[1];
    g_dir = fs::temp_directory_path() / ("bmg-cli-test-" + std::to_string(getpid()));
    fs::create_directories(g_dir);
    fs::path cache = g_dir / "cache";
    fs::create_directories(cache);
    setenv("BMG_CACHE_DIR", cache.c_str(), 1);

    test_usage_and_version();
    test_build();
    test_gkm();
    test_bm_cache_and_manifest();
    test_sections();
    test_smooth();
    test_kl();
    test_tilt();
    test_verify_and_decompose();

    std::cout << checks << " checks, " << failures << " failures\n";
    fs::remove_all(g_dir);
    return failures == 0 ? 0 : 1;
}
