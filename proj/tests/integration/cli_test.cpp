#include <cstdlib>
#include <sys/wait.h>

#include "doctest.h"
#include "emogap/keyed_text.hpp"
#include "emogap/pipeline.hpp"
#include "fixtures.hpp"

using namespace emogap;
namespace fs = std::filesystem;

namespace {

struct Result {
  int status;
  std::string out;
  std::string err;
};

Result cli(const fs::path& dir, const std::string& args) {
  const auto out = dir / "stdout.txt";
  const auto err = dir / "stderr.txt";
  const std::string cmd = std::string("'") + EMOGAP_CLI_PATH + "' " + args + " > '" + out.string() + "' 2> '" +
                          err.string() + "'";
  const int raw = std::system(cmd.c_str());
  return {WIFEXITED(raw) ? WEXITSTATUS(raw) : -1, read_file(out), read_file(err)};
}

}  // namespace

TEST_CASE("synth then run succeeds and prints the summary") {
  const auto dir = fixtures::scratch_dir("cli_run");
  auto r = cli(dir, "synth --posts 800 --seed 3 -o '" + (dir / "c.tsv").string() + "'");
  REQUIRE(r.status == 0);
  CHECK(r.out.find("mark000") != std::string::npos);

  r = cli(dir, "run --corpus '" + (dir / "c.tsv").string() + "' --seed 2 --out '" + (dir / "out").string() + "'");
  REQUIRE_MESSAGE(r.status == 0, r.err);
  CHECK(r.out.find("eval.auc\t") != std::string::npos);
  CHECK(fs::exists(dir / "out" / artifact::kManifest));
  CHECK(fs::exists(dir / "out" / artifact::kRocSvg));
}

TEST_CASE("stage subcommands resume from the output directory") {
  const auto dir = fixtures::scratch_dir("cli_stages");
  REQUIRE(cli(dir, "synth --posts 600 -o '" + (dir / "c.tsv").string() + "'").status == 0);
  const std::string out = " --out '" + (dir / "out").string() + "'";
  REQUIRE(cli(dir, "ingest --corpus '" + (dir / "c.tsv").string() + "' --seed 9 --top-k 4" + out).status == 0);
  for (const char* stage : {"stats", "split", "train", "evaluate", "mine", "report"}) {
    const auto r = cli(dir, std::string(stage) + out);
    CHECK_MESSAGE(r.status == 0, stage, r.err);
  }
  const auto snapshot = read_block_file(dir / "out" / artifact::kRunConfig);
  CHECK(snapshot.get("seed") == "9");
  CHECK(snapshot.get("top_k") == "4");
  CHECK(fs::exists(dir / "out" / artifact::kRankingUnfilteredSvg));
}

TEST_CASE("flags override the config file") {
  const auto dir = fixtures::scratch_dir("cli_precedence");
  REQUIRE(cli(dir, "synth --posts 300 -o '" + (dir / "c.tsv").string() + "'").status == 0);
  write_file(dir / "cfg.txt", "top_k=3\nthreshold=0.4\n");
  const auto r = cli(dir, "ingest --corpus '" + (dir / "c.tsv").string() + "' --config '" +
                              (dir / "cfg.txt").string() + "' --top-k 6 --out '" + (dir / "out").string() + "'");
  REQUIRE(r.status == 0);
  const auto snapshot = read_block_file(dir / "out" / artifact::kRunConfig);
  CHECK(snapshot.get("top_k") == "6");
  CHECK(snapshot.get("threshold") == "0.4");
}

TEST_CASE("failures exit nonzero with a stage tag") {
  const auto dir = fixtures::scratch_dir("cli_fail");
  auto r = cli(dir, "run --corpus '" + (dir / "missing.tsv").string() + "' --out '" + (dir / "out").string() + "'");
  CHECK(r.status != 0);
  CHECK(r.err.find("[ingest]") != std::string::npos);

  r = cli(dir, "train --out '" + (dir / "empty").string() + "'");
  CHECK(r.status != 0);
  CHECK(r.err.find("[train]") != std::string::npos);

  CHECK(cli(dir, "run --emotion rage --out '" + (dir / "o2").string() + "'").status != 0);
  CHECK(cli(dir, "nonsense").status != 0);
}

TEST_CASE("external segmenter via environment") {
  const auto dir = fixtures::scratch_dir("cli_segmenter");
  REQUIRE(cli(dir, "synth --posts 600 -o '" + (dir / "c.tsv").string() + "'").status == 0);
  const auto r = cli(dir, "run --segmenter external-morphological --corpus '" + (dir / "c.tsv").string() +
                              "' --out '" + (dir / "out").string() + "'");
  CHECK(r.status != 0);
  ::setenv("EMOGAP_SEGMENTER_CMD", "cat", 1);
  const auto ok = cli(dir, "run --segmenter external-morphological --corpus '" + (dir / "c.tsv").string() +
                               "' --out '" + (dir / "out").string() + "'");
  ::unsetenv("EMOGAP_SEGMENTER_CMD");
  CHECK_MESSAGE(ok.status == 0, ok.err);
}
