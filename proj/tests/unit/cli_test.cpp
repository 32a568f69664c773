#include <gtest/gtest.h>

#include <filesystem>
#include <sstream>

#include "apery/serialize.hpp"
#include "cache.hpp"
#include "commands.hpp"

using namespace apery;
namespace fs = std::filesystem;

namespace {

struct Run {
  int code;
  std::string out, err;
};

Run run(std::vector<std::string> args) {
  args.insert(args.begin(), "apery");
  std::ostringstream out, err;
  int code = cli::run(args, out, err);
  return {code, out.str(), err.str()};
}

fs::path scratch(const std::string& name) {
  fs::path p = fs::temp_directory_path() / ("apery_cli_test_" + name);
  fs::remove_all(p);
  fs::create_directories(p);
  return p;
}

}  // namespace

TEST(Cli, EvalPrintsTheIntegral) {
  auto r = run({"eval", "log1", "0,0,1", "--n", "0", "--prec", "40"});
  ASSERT_EQ(r.code, 0) << r.err;
  EXPECT_TRUE(agree_to(Real::parse(r.out, 40), log2_const(40), 38)) << r.out;
}

TEST(Cli, CertifyIsDeterministic) {
  auto dir = scratch("det");
  auto a = run({"certify", "log1", "0,0,1", "--terms", "500", "--prec", "60", "--out", (dir / "a.json").string()});
  auto b = run({"certify", "--family", "log1", "--params", "0,0,1", "--terms", "500", "--prec", "60",
                "--out", (dir / "b.json").string()});
  ASSERT_EQ(a.code, 0) << a.err;
  ASSERT_EQ(b.code, 0) << b.err;
  EXPECT_EQ(a.out, b.out);
  EXPECT_EQ(cli::read_file(dir / "a.json"), cli::read_file(dir / "b.json"));
  EXPECT_NE(a.out.find("irrationality"), std::string::npos) << a.out;
}

TEST(Cli, CacheResumesAndReproduces) {
  auto dir = scratch("cache");
  auto fresh = run({"certify", "log1", "0,0,1", "--terms", "500", "--prec", "60", "--out",
                    (dir / "fresh.json").string()});
  ASSERT_EQ(fresh.code, 0) << fresh.err;

  // An interrupted run: only the quadrature stage made it to the cache.
  auto f = IntegralFamily::parse("log1", "0,0,1");
  PipelineState partial;
  PipelineOptions opt;
  opt.checkpoint = [&](const PipelineState& s) {
    if (partial.values.empty() && !s.values.empty()) {
      partial.first_index = s.first_index;
      partial.values_digits = s.values_digits;
      partial.values = s.values;
      partial.norm_values = s.norm_values;
    }
  };
  build_certificate(f, 500, 60, opt);
  ASSERT_FALSE(partial.values.empty());
  cli::Cache cache(dir / "c");
  cache.save_state(f, partial);

  auto resumed = run({"certify", "log1", "0,0,1", "--terms", "500", "--prec", "60", "--cache-dir",
                      (dir / "c").string(), "--out", (dir / "resumed.json").string()});
  ASSERT_EQ(resumed.code, 0) << resumed.err;
  EXPECT_EQ(cli::read_file(dir / "fresh.json"), cli::read_file(dir / "resumed.json"));
  ASSERT_TRUE(cache.load_certificate(f, 500, 60));
  auto st = cache.load_state(f);
  ASSERT_TRUE(st);
  EXPECT_EQ(st->a.size(), 501u);

  // Served from the cache the second time.
  auto cached = run({"certify", "log1", "0,0,1", "--terms", "500", "--prec", "60", "--cache-dir",
                     (dir / "c").string()});
  ASSERT_EQ(cached.code, 0) << cached.err;
  EXPECT_EQ(cached.out, fresh.out);
}

TEST(Cli, ExitCodes) {
  EXPECT_EQ(run({}).code, cli::ExitCode::usage);
  EXPECT_EQ(run({"frobnicate"}).code, cli::ExitCode::usage);
  EXPECT_EQ(run({"eval", "zeta9", "0,0"}).code, cli::ExitCode::usage);
  EXPECT_EQ(run({"eval", "zeta2", "0,0,0"}).code, cli::ExitCode::usage);
  EXPECT_EQ(run({"certify", "log1"}).code, cli::ExitCode::usage);
  EXPECT_EQ(run({"identify", "3.14159"}).code, cli::ExitCode::usage);
  EXPECT_EQ(run({"--help"}).code, cli::ExitCode::ok);

  auto dir = scratch("io");
  // The cache directory is a regular file.
  cli::write_atomic(dir / "blocker", "x");
  auto r = run({"certify", "log1", "0,0,1", "--terms", "500", "--prec", "60", "--cache-dir",
                (dir / "blocker").string()});
  EXPECT_EQ(r.code, cli::ExitCode::io) << r.err;
  r = run({"certify", "log1", "0,0,1", "--terms", "500", "--prec", "60", "--out",
           (dir / "missing" / "x.json").string()});
  EXPECT_EQ(r.code, cli::ExitCode::io) << r.err;
  r = run({"identify", (dir / "blocker").string()});
  EXPECT_NE(r.code, cli::ExitCode::ok);
}

TEST(Cli, IdentifyValueAndCertificate) {
  Real two_log2 = log2_const(200) * 2L;
  auto r = run({"identify", two_log2.str(150), "--prec", "100"});
  ASSERT_EQ(r.code, 0) << r.err;
  EXPECT_NE(r.out.find("C = 2*log(2)\n"), std::string::npos) << r.out;

  r = run({"identify", pi(200).str(150) + "", "--prec", "100"});
  ASSERT_EQ(r.code, 0) << r.err;
  EXPECT_NE(r.out.find("pi"), std::string::npos) << r.out;

  auto dir = scratch("id");
  auto c = run({"certify", "log1", "0,0,1", "--terms", "500", "--prec", "60", "--out",
                (dir / "c.json").string()});
  ASSERT_EQ(c.code, 0) << c.err;
  r = run({"identify", (dir / "c.json").string(), "--prec", "80"});
  ASSERT_EQ(r.code, 0) << r.err;
  EXPECT_NE(r.out.find("C = log(2)\n"), std::string::npos) << r.out;

  // Euler's constant is outside the basis.
  r = run({"identify", euler_gamma(200).str(150), "--prec", "100"});
  ASSERT_EQ(r.code, 0) << r.err;
  EXPECT_EQ(r.out, "unidentified\n");
}
