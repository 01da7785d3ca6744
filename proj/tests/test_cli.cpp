#include <doctest.h>

#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <map>
#include <sstream>
#include <string>
#include <vector>

#include "nullgauge/cli.hpp"

using namespace nullgauge;

namespace {

struct Run {
  int code = -1;
  std::string out;
  std::string err;
  std::map<std::string, std::string> kv;
  std::vector<std::string> lines;
};

Run run(std::vector<std::string> args) {
  std::ostringstream out, err;
  Run r;
  r.code = run_cli(args, out, err);
  r.out = out.str();
  r.err = err.str();
  std::istringstream in(r.out);
  for (std::string line; std::getline(in, line);) {
    r.lines.push_back(line);
    const auto eq = line.find('=');
    if (eq != std::string::npos && line.find(" = ") == std::string::npos) r.kv[line.substr(0, eq)] = line.substr(eq + 1);
  }
  return r;
}

std::string val(const Run& r, const std::string& key) {
  const auto it = r.kv.find(key);
  return it == r.kv.end() ? std::string() : it->second;
}

double num_of(const Run& r, const std::string& key) {
  REQUIRE(r.kv.count(key) == 1);
  return std::stod(r.kv.at(key));
}

}  // namespace

TEST_SUITE("cli") {
  TEST_CASE("verify-null") {
    const Run a = run({"verify-null", "--gauge", "c1*x + c2*t"});
    CHECK(a.code == exit_pass);
    CHECK(val(a, "result") == "pass");
    CHECK(a.lines.front() == "command=verify-null");
    CHECK(val(a, "seed") == "42");

    const Run b = run({"verify-null", "--lagrangian", "xdot^2"});
    CHECK(b.code == exit_check_failed);
    CHECK(val(b, "result") == "fail");

    CHECK(run({"verify-null", "--lagrangian", "x*xdot"}).code == exit_pass);
  }

  TEST_CASE("input errors") {
    const Run p = run({"verify-null", "--lagrangian", "sin(a*x"});
    CHECK(p.code == exit_input_error);
    CHECK(p.err.find("offset 8") != std::string::npos);
    CHECK(run({"verify-null", "--lagrangian", "frob(x)"}).code == exit_input_error);
    CHECK(run({"verify-null"}).code == exit_input_error);
    CHECK(run({"no-such-command"}).code == exit_input_error);
    CHECK(run({"derive", "--model", "van-der-pol"}).code == exit_input_error);
    CHECK(run({"derive", "--model", "duffing", "--gamma0", "1"}).code == exit_input_error);
    CHECK(run({"series", "--order", "0"}).code == exit_input_error);
    CHECK(run({"verify-null", "--lagrangian", "xddot*x"}).code == exit_input_error);
  }

  TEST_CASE("derive") {
    const Run h = run({"derive", "--model", "harmonic", "--gamma0", "1", "--c1", "1"});
    CHECK(h.code == exit_pass);
    CHECK(std::find(h.lines.begin(), h.lines.end(), "a = -(1*x)") != h.lines.end());
    CHECK(num_of(h, "max_residual") < 1e-10);

    const Run g = run({"derive", "--gauge", "x + t^3/6"});
    CHECK(g.code == exit_pass);
    CHECK(std::find(g.lines.begin(), g.lines.end(), "a = -t") != g.lines.end());

    const Run d = run({"derive", "--lagrangian", "c1*xdot"});
    CHECK(d.code == exit_degenerate);
    CHECK(val(d, "error") == "NullDegenerate");

    for (const char* m : {"pendulum", "bateman-linear", "duffing", "harmonic-potential"}) {
      CAPTURE(m);
      const Run r = run({"derive", "--model", m, "--gamma0", "1", "--a", "1", "--b", "0.1", "--beta-nl", "0.5",
                         "--m", "1"});
      CHECK(r.code == exit_pass);
    }
  }

  TEST_CASE("simulate") {
    const Run h = run({"simulate", "--model", "harmonic", "--gamma0", "1", "--x0", "1", "--v0", "0", "--dt", "1e-3",
                       "--t-end", "6.2832"});
    CHECK(h.code == exit_pass);
    CHECK(num_of(h, "x_end") == doctest::Approx(1.0).epsilon(1e-6));

    const Run d = run({"simulate", "--model", "duffing", "--b", "0.1", "--gamma0", "1", "--beta-nl", "0.5", "--x0",
                       "1", "--v0", "0", "--dt", "1e-3", "--t-end", "20"});
    CHECK(d.code == exit_pass);
    CHECK(std::abs(num_of(d, "x_end")) < 1.0);
    // Independent RK4 on the closed form of the full damped Duffing field, c1 = 1.
    const auto accel = [](double x, double v) {
      const double P = std::sqrt(2.0) / std::sqrt(2.0 * x * x + 0.5 * std::pow(x, 4) + 1.0);
      const double L = P * v;
      return -(0.1 / P) * std::asinh(L) * std::sqrt(1 + L * L) - x - 0.5 * x * x * x;
    };
    double x = 1.0, v = 0.0;
    const double step = 1e-3;
    for (int n = 0; n < 20000; ++n) {
      const double k1x = v, k1v = accel(x, v);
      const double k2x = v + 0.5 * step * k1v, k2v = accel(x + 0.5 * step * k1x, v + 0.5 * step * k1v);
      const double k3x = v + 0.5 * step * k2v, k3v = accel(x + 0.5 * step * k2x, v + 0.5 * step * k2v);
      const double k4x = v + step * k3v, k4v = accel(x + step * k3x, v + step * k3v);
      x += step / 6 * (k1x + 2 * k2x + 2 * k3x + k4x);
      v += step / 6 * (k1v + 2 * k2v + 2 * k3v + k4v);
    }
    CHECK(num_of(d, "x_end") == doctest::Approx(x).epsilon(1e-9));
    const Run dr = run({"simulate", "--model", "duffing", "--reference", "--b", "0.1", "--gamma0", "1", "--beta-nl",
                        "0.5", "--x0", "1", "--v0", "0", "--dt", "1e-3", "--t-end", "20"});
    CHECK(dr.code == exit_pass);
    CHECK(std::abs(num_of(dr, "x_end")) < 1.0);

    const Run i = run({"simulate", "--model", "inertia", "--x0", "0", "--v0", "1", "--t-end", "5"});
    CHECK(std::abs(num_of(i, "x_end") - 5.0) < 1e-12);

    const Run blow = run({"simulate", "--lagrangian", "xdot^2/2 + x^4/4", "--x0", "1", "--v0", "0", "--dt", "0.01",
                          "--t-end", "100"});
    CHECK(blow.code == exit_blowup);
    CHECK(blow.kv.count("blowup_time") == 1);
  }

  TEST_CASE("simulate writes CSV") {
    const std::filesystem::path path = std::filesystem::temp_directory_path() / "nullgauge_cli_test.csv";
    const Run r = run({"simulate", "--model", "inertia", "--x0", "0", "--v0", "1", "--dt", "0.5", "--t-end", "1",
                       "--out", path.string()});
    CHECK(r.code == exit_pass);
    CHECK(val(r, "csv") == path.string());
    std::ifstream in(path);
    std::stringstream content;
    content << in.rdbuf();
    CHECK(content.str() == "t,x,v\n0,0,1\n0.5,0.5,1\n1,1,1\n");
    std::filesystem::remove(path);
  }

  TEST_CASE("compare") {
    const Run same = run({"compare", "ref:harmonic", "ref:harmonic", "--gamma0", "1", "--x0", "1"});
    CHECK(same.code == exit_pass);
    CHECK(num_of(same, "max_dx") == 0.0);

    const Run ns = run({"compare", "nsl:harmonic", "ref:harmonic", "--gamma0", "1", "--x0", "1", "--t-end", "10"});
    CHECK(num_of(ns, "max_dx") < 1e-9);

    const auto bateman = [](const char* v0) {
      return num_of(run({"compare", "nsl:bateman-linear", "ref:bateman-linear", "--b", "0.1", "--gamma0", "1",
                         "--x0", "0", "--v0", v0, "--t-end", "10"}),
                    "max_dx");
    };
    const double d1 = bateman("0.01");
    const double d2 = bateman("0.005");
    CHECK(d1 < 1e-3);
    CHECK((d1 / 0.01) / (d2 / 0.005) == doctest::Approx(4.0).epsilon(0.1));
  }

  TEST_CASE("compat") {
    const Run ok = run({"compat", "--alpha", "0", "--beta", "2", "--gamma", "1"});
    CHECK(ok.code == exit_pass);
    CHECK(val(ok, "result") == "satisfied");

    const Run bad = run({"compat", "--alpha", "0", "--beta", "1", "--gamma", "1"});
    CHECK(bad.code == exit_check_failed);
    CHECK(val(bad, "result") == "violated");
    CHECK(num_of(bad, "residual") == -0.75);

    // beta = 2/(1+t) solves beta_t + beta^2/2 = 0; the squared denominator does not.
    CHECK(val(run({"compat", "--alpha", "0", "--beta", "2/(1+t)", "--gamma", "0"}), "result") == "satisfied");
    const Run sq = run({"compat", "--alpha", "0", "--beta", "2/(1+t)^2", "--gamma", "0"});
    CHECK(val(sq, "result") == "violated");
    CHECK(num_of(sq, "max_residual") > 0.1);

    const Run cs = run({"compat", "--alpha", "0", "--beta", "2/(c1+t)", "--gamma", "0", "--case", "beta-only",
                        "--c1", "2"});
    CHECK(cs.code == exit_pass);
    CHECK(run({"compat", "--alpha", "0", "--beta", "1", "--gamma", "1", "--case", "nope"}).code == exit_input_error);
  }

  TEST_CASE("series") {
    CHECK(val(run({"series", "--order", "3"}), "coefficients") == "1, 1/3, -2/15");
    CHECK(val(run({"series", "--order", "1"}), "coefficients") == "1");
    const std::string five = val(run({"series", "--order", "5"}), "coefficients");
    CHECK(five.rfind("1, 1/3, -2/15, ", 0) == 0);
    CHECK(five == "1, 1/3, -2/15, 8/105, -16/315");
  }

  TEST_CASE("reports are byte-identical for a fixed seed") {
    const std::vector<std::string> args{"verify-null", "--lagrangian", "xdot^2*sin(x)", "--seed", "9"};
    const Run a = run(args);
    const Run b = run(args);
    CHECK(a.out == b.out);
    CHECK(val(a, "seed") == "9");
    std::vector<std::string> other = args;
    other.back() = "10";
    CHECK(run(other).out != a.out);
  }
}
