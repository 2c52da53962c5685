// End-to-end checks of the command line tool: each case launches the built
// binary, captures stdout and the exit code, and compares against the
// library called in-process or against frozen values.

#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <string>
#include <sys/wait.h>
#include <unistd.h>
#include <vector>

#include <json.hpp>

#include "macjscc/admissibility.hpp"
#include "macjscc/feedback.hpp"
#include "macjscc/fixtures.hpp"
#include "macjscc/gmac.hpp"
#include "macjscc/io.hpp"
#include "macjscc/orthogonal.hpp"

using json = nlohmann::json;
using namespace macjscc;

namespace {

struct CliResult {
  int code = -1;
  std::string out;
};

CliResult run_cli(const std::string& args, const std::string& env = "") {
  std::string cmd;
  if (!env.empty()) cmd += env + " ";
  cmd += std::string(CLI_BIN) + " " + args;
  FILE* pipe = popen(cmd.c_str(), "r");
  REQUIRE(pipe != nullptr);
  std::string out;
  char buf[4096];
  size_t k = 0;
  while ((k = fread(buf, 1, sizeof buf, pipe)) > 0) out.append(buf, k);
  int status = pclose(pipe);
  CliResult r;
  r.code = WIFEXITED(status) ? WEXITSTATUS(status) : -1;
  r.out = out;
  return r;
}

json run_json(const std::string& args) {
  CliResult r = run_cli(args + " --json 2>/dev/null");
  REQUIRE(r.code == 0);
  return json::parse(r.out);
}

std::string scratch(const std::string& name) {
  static const std::string dir = [] {
    std::string d = "/tmp/t_cli_" + std::to_string(getpid());
    std::filesystem::create_directories(d);
    return d;
  }();
  return dir + "/" + name;
}

std::string fmt(double x) {
  char buf[40];
  std::snprintf(buf, sizeof(buf), "%.12g", x);
  return buf;
}

std::vector<std::string> lines_of(const std::string& text) {
  std::vector<std::string> out;
  size_t pos = 0;
  while (pos < text.size()) {
    size_t next = text.find('\n', pos);
    if (next == std::string::npos) next = text.size();
    out.push_back(text.substr(pos, next - pos));
    pos = next + 1;
  }
  return out;
}

}  // namespace

TEST_CASE("version flag prints the library version") {
  CliResult r = run_cli("--version");
  CHECK(r.code == 0);
  CHECK(r.out == "0.1.0\n");
}

TEST_CASE("region example reports the fixture admissibility ladder") {
  json full = run_json("region example --name cover-example");
  CHECK(full["admissible"].get<bool>());
  CHECK(full["lhs"][2].get<double>() == doctest::Approx(1.4120).epsilon(0.01));
  CHECK(full["rhs"][2].get<double>() == doctest::Approx(1.5));
  CHECK(full["lhs"][0].get<double>() == doctest::Approx(0.7).epsilon(0.01));

  json none = run_json("region example --name cover-example --si none");
  CHECK_FALSE(none["admissible"].get<bool>());
  CHECK(none["lhs"][2].get<double>() == doctest::Approx(1.918).epsilon(0.01));
}

TEST_CASE("region check on serialized system files matches the in-process report") {
  SideInfoSystem sys = fixtures::cover_example();
  write_text_file(scratch("src.json"), pmf_to_json(sys.source));
  write_text_file(scratch("q1.json"), kernel_to_json(sys.quantizer1));
  write_text_file(scratch("q2.json"), kernel_to_json(sys.quantizer2));
  write_text_file(scratch("m1.json"), kernel_to_json(sys.channel_map1));
  write_text_file(scratch("m2.json"), kernel_to_json(sys.channel_map2));
  write_text_file(scratch("ch.json"), kernel_to_json(sys.channel));

  json rep = run_json("region check --source " + scratch("src.json") + " --quantizer1 " +
                      scratch("q1.json") + " --quantizer2 " + scratch("q2.json") +
                      " --map1 " + scratch("m1.json") + " --map2 " + scratch("m2.json") +
                      " --channel " + scratch("ch.json") +
                      " --measure1 hamming --measure2 hamming --limit1 0 --limit2 0");
  AdmissibilityReport want = check_theorem1(sys);
  for (int i = 0; i < 3; ++i) {
    CHECK(rep["lhs"][i].get<double>() == doctest::Approx(want.lhs[i]).epsilon(1e-12));
    CHECK(rep["rhs"][i].get<double>() == doctest::Approx(want.rhs[i]).epsilon(1e-12));
  }
  CHECK(rep["admissible"].get<bool>() == want.admissible);
  CHECK(rep["binding_constraint"].get<int>() == want.binding_constraint);
}

TEST_CASE("gmac bounds and rho-interval match the library") {
  json b = run_json("gmac bounds --p1 3 --p2 4 --sigma2 1.3 --rho 0.25");
  TransmissionBounds want = relaxed_bounds(GmacSpec{3.0, 4.0, 1.3}, 0.25);
  CHECK(b["b1"].get<double>() == want.b1);
  CHECK(b["b2"].get<double>() == want.b2);
  CHECK(b["b12"].get<double>() == want.b12);

  json ri = run_json("gmac rho-interval --fixture gmac-discrete");
  CHECK(ri["rho_min"].get<double>() == doctest::Approx(0.1443375673).epsilon(1e-8));
  CHECK(ri["rho_max"].get<double>() == doctest::Approx(0.7024143839).epsilon(1e-8));
  CHECK(ri["lemma3_cap"].get<double>() == doctest::Approx(0.5426678739).epsilon(1e-8));
  CHECK(ri["feasible"].get<bool>());

  CliResult manual = run_cli("gmac rho-interval --p1 3 --p2 4 2>&1");
  CHECK(manual.code == 2);
}

TEST_CASE("gmac sweep writes the csv schema with values matching the library") {
  std::string out = scratch("sweep.csv");
  CliResult r = run_cli("gmac sweep --schemes af,sb,lt,nc --rho 0.75 --snr-db=-10:30:1 --out " +
                        out + " 2>/dev/null");
  REQUIRE(r.code == 0);

  std::vector<std::string> rows = lines_of(read_text_file(out));
  REQUIRE(rows.size() == 1 + 41 * 4);
  CHECK(rows[0] == "snr_db,S,scheme,D1,D2,R1,R2,rho_tilde");

  std::vector<double> snr_grid;
  for (int db = -10; db <= 30; ++db) snr_grid.push_back(std::pow(10.0, db / 10.0));
  std::vector<SchemePoint> want =
      sweep({SchemeId::af, SchemeId::sb, SchemeId::lt, SchemeId::nc}, 1.0, 0.75, snr_grid);
  for (size_t i = 0; i < want.size(); ++i) {
    const SchemePoint& p = want[i];
    std::string expect = fmt(-10.0 + static_cast<double>(i / 4)) + "," + fmt(p.snr) + "," +
                         scheme_name(p.scheme) + "," + fmt(p.d1) + "," + fmt(p.d2) + "," +
                         (p.r1 ? fmt(*p.r1) : "") + "," + (p.r2 ? fmt(*p.r2) : "") + "," +
                         (p.rho_tilde ? fmt(*p.rho_tilde) : "");
    CHECK(rows[1 + i] == expect);
  }
}

TEST_CASE("manifest records the invocation and replay reproduces outputs bitwise") {
  std::string out = scratch("replay.csv");
  CliResult r =
      run_cli("gmac sweep --schemes af,sb --rho 0.3 --snr-db 0:10:5 --out " + out +
              " 2>/dev/null");
  REQUIRE(r.code == 0);

  json manifest = json::parse(read_text_file(out + ".manifest.json"));
  CHECK(manifest["version"].get<std::string>() == "0.1.0");
  CHECK(manifest["seed"].get<uint64_t>() == 0);
  CHECK(manifest["outputs"] == json::array({out}));
  std::vector<std::string> argv = manifest["argv"].get<std::vector<std::string>>();
  REQUIRE(argv.size() == 10);
  CHECK(argv[0] == "gmac");
  CHECK(argv[1] == "sweep");

  std::string csv_before = read_text_file(out);
  std::string manifest_before = read_text_file(out + ".manifest.json");
  std::filesystem::remove(out);
  CliResult rr = run_cli("replay --manifest " + out + ".manifest.json 2>/dev/null");
  CHECK(rr.code == 0);
  CHECK(read_text_file(out) == csv_before);
  CHECK(read_text_file(out + ".manifest.json") == manifest_before);
}

TEST_CASE("codebook fit validate sample round trip") {
  std::string cb_path = scratch("cb.json");
  json fit_rep = run_json("codebook fit --fixture gmac-discrete --rho 0.3 --out " + cb_path);
  CHECK(fit_rep["normalized_distortion"].get<double>() < 0.005);
  double corr = fit_rep["correlation"].get<double>();
  CHECK(corr > 0.0);
  CHECK(corr < 0.5);

  MixtureCodebook cb = codebook_from_json(read_text_file(cb_path));
  cb.validate();

  CliResult again = run_cli("codebook fit --fixture gmac-discrete --rho 0.3 --out " +
                            scratch("cb2.json") + " --json 2>/dev/null");
  REQUIRE(again.code == 0);
  json rep2 = json::parse(again.out);
  CHECK(rep2["objective"].get<double>() == fit_rep["objective"].get<double>());
  CHECK(read_text_file(scratch("cb2.json")).substr(0, 200) ==
        read_text_file(cb_path).substr(0, 200));

  json val = run_json("codebook validate --in " + cb_path);
  CHECK(val["valid"].get<bool>());
  CHECK(val["correlation"].get<double>() == corr);

  std::string samp = scratch("samp.csv");
  CliResult s1 = run_cli("codebook sample --in " + cb_path + " --n 64 --seed 5 --out " +
                         samp + " 2>/dev/null");
  REQUIRE(s1.code == 0);
  std::vector<std::string> rows = lines_of(read_text_file(samp));
  REQUIRE(rows.size() == 65);
  CHECK(rows[0] == "u1,u2,x1,x2");

  std::string first_run = read_text_file(samp);
  run_cli("codebook sample --in " + cb_path + " --n 64 --seed 5 --out " + samp +
          " 2>/dev/null");
  CHECK(read_text_file(samp) == first_run);
  run_cli("codebook sample --in " + cb_path + " --n 64 --seed 6 --out " + samp +
          " 2>/dev/null");
  CHECK(read_text_file(samp) != first_run);
}

TEST_CASE("orthogonal sweep and closed-form subcommands match the library") {
  std::string out = scratch("orth.csv");
  CliResult r = run_cli("orthogonal sweep --rho 0.6 --snr-db 0:20:10 --out " + out +
                        " 2>/dev/null");
  REQUIRE(r.code == 0);
  std::vector<std::string> rows = lines_of(read_text_file(out));
  REQUIRE(rows.size() == 1 + 3 * 2);
  CHECK(rows[0] == "snr_db,S,scheme,D1,D2,R1,R2,rho_tilde");
  DistortionPair af0 = af_distortion_orth(GaussianSourcePair{1.0, 1.0, 0.6},
                                          OrthogonalSpec{1.0, 1.0, 1.0, 1.0});
  CHECK(rows[1] == "0,1,af," + fmt(af0.d1) + "," + fmt(af0.d2) + ",,,");
  double sb0 = sb_distortion_orth_symmetric(0.6, 1.0);
  CHECK(rows[2] == "0,1,sb," + fmt(sb0) + "," + fmt(sb0) + "," + fmt(0.5) + "," + fmt(0.5) + ",");

  json si = run_json("orthogonal si-optimize --rho 0.4 --p 0.5 --sigma2 1 --s1 0.5 --s2 0.5"
                     " --mode both");
  CHECK(si["b1"].get<double>() == doctest::Approx(-0.16).epsilon(1e-9));
  CHECK(si["b2"].get<double>() == doctest::Approx(-0.16).epsilon(1e-9));

  json td = run_json("orthogonal tdma --p1 3 --p2 4 --noise1 1 --noise2 2 --alpha 0.4");
  TransmissionBounds want = tdma_bounds(OrthogonalSpec{3.0, 4.0, 1.0, 2.0}, 0.4);
  CHECK(td["b1"].get<double>() == want.b1);
  CHECK(td["b2"].get<double>() == want.b2);
  CHECK(td["b12"].get<double>() == want.b12);
}

TEST_CASE("fading subcommands reproduce frozen closed forms") {
  json c = run_json("fading csir --family constant --m 3 --nu0 2 --p 3 --sigma2 1");
  CHECK(c["rate"].get<double>() == std::log2(19.0) / 3.0);
  CHECK(c["se"].get<double>() == 0.0);
  CHECK(c["n"].get<int64_t>() == 0);

  json w = run_json("fading waterfill --family discrete --m 2 --table 0.5:0.5,2:0.3,4:0.2"
                    " --p-avg 0.2325");
  CHECK(w["lambda"].get<double>() == doctest::Approx(1.0).epsilon(1e-9));

  json t = run_json("fading csit --family rayleigh --m 1 --p-avg 1");
  CHECK(t["rate"].get<double>() == doctest::Approx(1.028538925359).epsilon(1e-6));
  CHECK(t["lambda"].get<double>() == doctest::Approx(0.393773845045).epsilon(1e-6));
}

TEST_CASE("feedback region csv lists every pentagon corner") {
  std::string out = scratch("fb.csv");
  json rep = run_json("feedback region --p1 1 --p2 1 --sigma2 1 --rho-grid 0:1:0.05 --out " +
                      out);
  CHECK(rep["vertices"].get<size_t>() == 21 * 5);
  std::vector<std::string> rows = lines_of(read_text_file(out));
  REQUIRE(rows.size() == 1 + 21 * 5);
  CHECK(rows[0] == "rho,corner,R1,R2");
  CHECK(rows[1] == "0,0,0,0");

  std::vector<double> grid;
  for (int i = 0; i <= 20; ++i) grid.push_back(i * 0.05);
  std::vector<BoundaryVertex> verts = ozarow_boundary(1.0, 1.0, 1.0, grid);
  double best = 0.0;
  for (const auto& v : verts) best = std::max(best, v.r1 + v.r2);
  CHECK(rep["best_sum_rate"].get<double>() == doctest::Approx(best).epsilon(1e-12));
}

TEST_CASE("simulate commands agree with closed forms and respect seeds") {
  json g = run_json("simulate af-gmac --rho 0.3 --p1 3 --p2 4 --noise 1 --n 100000 --seed 7");
  CHECK(std::abs(g["z1"].get<double>()) <= 4.0);
  CHECK(std::abs(g["z2"].get<double>()) <= 4.0);
  CHECK(g["seed"].get<uint64_t>() == 7);

  json env_run = json::parse(
      run_cli("simulate af-gmac --rho 0 --p1 1 --p2 1 --n 2000 --json 2>/dev/null",
              "MACJSCC_SEED=42")
          .out);
  CHECK(env_run["seed"].get<uint64_t>() == 42);
  json flag_run = json::parse(
      run_cli("simulate af-gmac --rho 0 --p1 1 --p2 1 --n 2000 --seed 9 --json 2>/dev/null",
              "MACJSCC_SEED=42")
          .out);
  CHECK(flag_run["seed"].get<uint64_t>() == 9);

  CliResult t1 = run_cli("simulate af-orth --rho 0.7 --p1 4 --p2 4 --s1 0.6 --s2 0.6"
                         " --b1 0.3 --b2 0.3 --decoder-si --n 50000 --threads 1 --json"
                         " 2>/dev/null");
  CliResult t3 = run_cli("simulate af-orth --rho 0.7 --p1 4 --p2 4 --s1 0.6 --s2 0.6"
                         " --b1 0.3 --b2 0.3 --decoder-si --n 50000 --threads 3 --json"
                         " 2>/dev/null");
  REQUIRE(t1.code == 0);
  CHECK(t1.out == t3.out);
  json o = json::parse(t1.out);
  CHECK(std::abs(o["z1"].get<double>()) <= 4.0);
  CHECK(std::abs(o["z2"].get<double>()) <= 4.0);
}

TEST_CASE("invalid input exits 2 with a diagnostic") {
  CliResult unknown = run_cli("gmac bounds --p1 1 --p2 1 --rho 0 --bogus 2>&1");
  CHECK(unknown.code == 2);
  CHECK(unknown.out.find("--bogus") != std::string::npos);

  CliResult neg = run_cli("gmac bounds --p1 -3 --p2 4 --rho 0.3 2>&1");
  CHECK(neg.code == 2);
  CHECK(neg.out.find("input error") != std::string::npos);

  CliResult missing = run_cli("gmac sweep --rho 0.3 2>&1");
  CHECK(missing.code == 2);

  CliResult bad_range = run_cli("gmac sweep --rho 0.3 --snr-db nope --out /tmp/x.csv 2>&1");
  CHECK(bad_range.code == 2);
  CHECK(bad_range.out.find("min:max:step") != std::string::npos);

  CliResult bad_manifest = run_cli("replay --manifest /nonexistent.json 2>&1");
  CHECK(bad_manifest.code == 2);

  CliResult bad_table = run_cli("fading waterfill --family discrete --table 1:0.5,2:0.6"
                                " --p-avg 1 2>&1");
  CHECK(bad_table.code == 2);
  CHECK(bad_table.out.find("sum to 1") != std::string::npos);
}
