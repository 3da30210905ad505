#include <sys/wait.h>

#include <cstdio>
#include <fstream>
#include <sstream>

#include "doctest.h"
#include "json.hpp"
#include "piii/cli/cli.hpp"

using nlohmann::json;

namespace {

struct Result {
  int code = -1;
  std::string out;
};

// Runs the installed binary; arguments are passed through the shell, so
// callers quote words containing spaces.
Result cli(const std::string& args, bool merge_stderr = false) {
  std::string cmd = std::string(PIII_CLI_PATH) + " " + args + (merge_stderr ? " 2>&1" : " 2>/dev/null");
  FILE* p = popen(cmd.c_str(), "r");
  REQUIRE(p != nullptr);
  Result r;
  char buf[4096];
  std::size_t n;
  while ((n = fread(buf, 1, sizeof buf, p)) > 0) r.out.append(buf, n);
  int st = pclose(p);
  r.code = WIFEXITED(st) ? WEXITSTATUS(st) : -1;
  return r;
}

std::string golden(const std::string& name) {
  std::ifstream f(std::string(PIII_GOLDEN_DIR) + "/" + name);
  REQUIRE(f.good());
  std::stringstream s;
  s << f.rdbuf();
  return s.str();
}

std::string tmp(const std::string& name) { return "/tmp/piii_cli_test_" + name; }

}  // namespace

TEST_SUITE("cli") {
  TEST_CASE("usage and invalid input") {
    Result r = cli("", true);
    CHECK(r.code == 2);
    CHECK(r.out.find("Usage") != std::string::npos);
    CHECK(cli("verify").code == 2);
    CHECK(cli("frobnicate").code == 2);
    CHECK(cli("verify isomonodromy --family d9").code == 2);
    CHECK(cli("--help").code == 0);
  }

  TEST_CASE("parse_complex") {
    using piii::cli::parse_complex;
    CHECK(parse_complex("1/2+1/3i") == std::complex<double>(0.5, 1.0 / 3));
    CHECK(parse_complex("0.5 - 2 i") == std::complex<double>(0.5, -2));
    CHECK(parse_complex("-i") == std::complex<double>(0, -1));
    CHECK(parse_complex("1e-3+2e-1i") == std::complex<double>(1e-3, 0.2));
    CHECK(parse_complex("2.5e2") == std::complex<double>(250, 0));
    CHECK_THROWS(parse_complex("x"));
    CHECK_THROWS(parse_complex(""));
    CHECK_THROWS(parse_complex("1e+"));
  }

  TEST_CASE("verify isomonodromy matches golden output") {
    for (std::string f : {"d6", "d7"}) {
      Result r = cli("verify isomonodromy --family " + f + " --json");
      CHECK(r.code == 0);
      CHECK(r.out == golden("verify_isomonodromy_" + f + ".json"));
    }
    Result t = cli("verify isomonodromy --family d7");
    CHECK(t.out.find("(q + 2*a)/t") != std::string::npos);
    CHECK(t.out.find("FAIL") == std::string::npos);
  }

  TEST_CASE("verify backlund") {
    Result r = cli("verify backlund --element s2 --family d6 --json");
    CHECK(r.code == 0);
    json j = json::parse(r.out);
    CHECK(j["word"] == "s2");
    CHECK(j["pass"] == true);
    CHECK(j["checks"].size() >= 3);
    CHECK(j["paramAction"] == "(theta0=theta0 + 1, thetainf=thetainf + 1, shift=0*i*pi/2)");
    Result w = cli("verify backlund --word 's1+^-1 s2+' --json");
    CHECK(w.code == 0);
    CHECK(json::parse(w.out)["family"] == "d7");
    CHECK(cli("verify backlund --element s9").code == 2);
    CHECK(cli("verify backlund --element s1+ --family d6").code == 2);
  }

  TEST_CASE("verify group-relations, okamoto, monodromy-embed") {
    Result g = cli("verify group-relations --json");
    CHECK(g.code == 0);
    bool seen = false;
    json gj = json::parse(g.out);
    for (auto& c : gj["checks"]) seen = seen || c["name"] == "(s1+)^2 = B";
    CHECK(seen);
    CHECK(cli("verify okamoto").code == 0);
    Result m = cli("verify monodromy-embed --json");
    CHECK(m.code == 0);
    CHECK(json::parse(m.out)["pass"] == true);
  }

  TEST_CASE("monodromy singular and alpha") {
    Result r = cli("monodromy singular --family d6 --alpha 1 --beta 1 --json");
    CHECK(r.code == 0);
    CHECK(r.out == golden("monodromy_singular_d6_1_1.json"));
    json j = json::parse(r.out);
    CHECK(j["points"] == json::array({json::array({"0", "-1", "2"}), json::array({"-1", "0", "2"})}));
    CHECK(json::parse(cli("monodromy singular --family d6 --alpha 2 --beta 3 --json").out)["points"].empty());
    CHECK(json::parse(cli("monodromy singular --family d7 --alpha 2 --json").out)["points"].empty());
    CHECK(cli("monodromy singular --family d6 --alpha 0 --beta 1").code == 2);
    CHECK(cli("monodromy singular --family d6 --alpha 1").code == 2);

    Result a = cli("monodromy alpha --l1 1 --l2 1/2 --l3 -1 --l4 1/2 --e 0 --json");
    CHECK(a.code == 0);
    json ja = json::parse(a.out);
    CHECK(ja["alpha"] == "i");
    CHECK(ja["c1"] == "0");
    CHECK(ja["c2"] == "0");
    CHECK(cli("monodromy alpha --l1 1 --l2 0 --l3 0 --l4 1").code == 2);
  }

  TEST_CASE("special subcommands") {
    Result r = cli("special riccati --eps1 1 --eps2 1 --d 1/4 --order 30 --json");
    CHECK(r.code == 0);
    CHECK(r.out == golden("special_riccati.json"));
    json j = json::parse(r.out);
    CHECK(j["series"]["N"] == 30);
    CHECK(j["series"]["rho"] == "0");
    CHECK(j["series"]["logFlag"] == false);
    CHECK(j["series"]["coeffs"].size() == 31);
    CHECK(j["middle"] == "2");
    CHECK(cli("special riccati --eps1 2 --d 1/4").code == 2);
    CHECK(cli("special riccati --eps1 1").code == 2);

    Result a = cli("special algebraic --theta 1 --json");
    CHECK(a.code == 0);
    CHECK(json::parse(a.out)["q"] == "(1/2*t^2 + 1/6*t*q)/q^2");
    CHECK(cli("special algebraic --theta 1/2").code == 2);

    json c = json::parse(cli("special constants --theta0 2 --thetainf 1 --json").out);
    CHECK(c["constants"].size() == 2);
    json n = json::parse(cli("special constants --theta0 0.5 --thetainf 0.25 --json").out);
    CHECK(n["constants"].empty());
    CHECK(n["notes"].size() == 1);

    json p = json::parse(cli("special presence --theta0 1 --thetainf 1 --json").out);
    CHECK(p["families"] == json::array({json::array({1, -1}), json::array({-1, -1})}));
  }

  TEST_CASE("integrate, residual and backlund apply end to end") {
    std::string tr = tmp("tr.json"), im = tmp("im.json");
    Result r = cli("integrate --family d6 --theta0 1/3 --thetainf 1/5 --q0 0.7+0.2i --a0 0.3-0.1i --t0 1 --to 2 "
                   "--samples 200 --json --out " + tr);
    REQUIRE(r.code == 0);
    json j = json::parse(r.out);
    CHECK(j["family"] == "d6");
    CHECK(j["samples"].size() == 201);
    CHECK(j["samples"][0]["q"] == json::array({0.7, 0.2}));
    CHECK(j["samples"][0]["frame"] == "direct");
    CHECK(j["params"]["theta0"][0].get<double>() == doctest::Approx(1.0 / 3));

    // the trajectory file round-trips exactly
    std::ifstream f(tr);
    json back = json::parse(f);
    CHECK(piii::cli::trajectory_to_json(piii::cli::trajectory_from_json(back)) == back);

    CHECK(cli("residual --in " + tr).code == 0);
    CHECK(cli("residual --in " + tr + " --mode first-order").code == 0);
    CHECK(cli("residual --in " + tr + " --exp-form").code == 2);  // samples uniform in t, not t~

    Result a = cli("backlund apply --word s2 --in " + tr + " --out " + im);
    CHECK(a.code == 0);
    Result ri = cli("residual --in " + im + " --json");
    CHECK(ri.code == 0);
    CHECK(json::parse(ri.out)["max"].get<double>() < 1e-7);

    // the image does not solve the source equation
    std::ifstream g(im);
    json wrong = json::parse(g);
    wrong["params"] = back["params"];
    std::ofstream(tmp("wrong.json")) << wrong.dump();
    CHECK(cli("residual --in " + tmp("wrong.json")).code == 1);

    // t~-plane path checked in the t~ form
    Result e = cli("integrate --family d7 --theta 3/10 --q0 0.5+0.1i --a0 0.2+0.3i --plane t-tilde --t0 0 --to "
                   "0.5+0.3i --samples 200 --out " + tmp("t7.json"));
    CHECK(e.code == 0);
    CHECK(cli("residual --in " + tmp("t7.json") + " --exp-form").code == 0);

    CHECK(cli("residual --in /nonexistent.json").code == 2);
    CHECK(cli("residual").code == 2);
  }

  TEST_CASE("integrate input validation and numerical failure") {
    CHECK(cli("integrate --family d7 --theta 0 --t0 0 --q0 1 --a0 0 --to 1").code == 2);
    CHECK(cli("integrate --family d6 --theta0 x --thetainf 1 --q0 1 --a0 0 --to 2").code == 2);
    CHECK(cli("integrate --family d6 --theta0 1 --thetainf 1 --q0 0 --a0 0 --to 2").code == 2);
    CHECK(cli("integrate --family d6 --theta0 1 --thetainf 1 --q0 1 --a0 0 --to -1").code == 2);
    CHECK(cli("integrate --family d6 --theta0 1 --q0 1 --a0 0 --to 2").code == 2);
    Result f = cli("integrate --family d6 --theta0 1 --thetainf 1 --q0 1e-3 --a0 1e5 --to 100 --tol 1e-14", true);
    CHECK(f.code == 3);
    CHECK(f.out.find("numerical failure") != std::string::npos);
  }

  TEST_CASE("backlund apply symbolic output is stable") {
    struct G {
      std::string args, file;
    };
    for (auto& g : {G{"--word 's2+ s1+' --family d7", "backlund_apply_s2p_s1p.json"},
                    G{"--word s2 --family d6", "backlund_apply_s2.json"},
                    G{"--word B1 --family d6", "backlund_apply_B1.json"}}) {
      Result r1 = cli("backlund apply --json " + g.args), r2 = cli("backlund apply --json " + g.args);
      CHECK(r1.code == 0);
      CHECK(r1.out == r2.out);
      CHECK(r1.out == golden(g.file));
    }
    json j = json::parse(golden("backlund_apply_s2p_s1p.json"));
    CHECK(j["q"] == "(1/2*t*q*theta + 1/2*t^2 - t*a)/q^2");
    CHECK(j["paramAction"] == "(theta=theta + 1, shift=4*i*pi/2)");
    CHECK(cli("backlund apply --word 'B1 s1+'").code == 2);
  }
}
