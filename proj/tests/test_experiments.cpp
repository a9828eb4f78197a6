#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <sys/wait.h>

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>
#include <vector>

#include "nncp/dataset.hpp"
#include "nncp/errors.hpp"
#include "nncp/experiments.hpp"
#include "nncp/rng.hpp"
#include "nncp/synthetic.hpp"

using namespace nncp;

namespace {

namespace fs = std::filesystem;

struct TempDir {
  fs::path path;
  explicit TempDir(const std::string& stem) {
    static int counter = 0;
    path = fs::temp_directory_path() /
           (stem + "_" + std::to_string(counter++));
    fs::create_directories(path);
  }
  ~TempDir() {
    std::error_code ec;
    fs::remove_all(path, ec);
  }
  std::string str() const { return path.string(); }
  std::string file(const std::string& name) const {
    return (path / name).string();
  }
};

std::string read_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  REQUIRE(in.good());
  std::ostringstream buffer;
  buffer << in.rdbuf();
  return buffer.str();
}

std::string make_corpus_file(const TempDir& dir, std::uint64_t seed,
                             std::size_t papers, int horizon) {
  SyntheticOptions options;
  options.n_papers = papers;
  options.horizon_n = horizon;
  Rng rng(seed);
  Corpus corpus = generate_synthetic(rng, options);
  const std::string path = dir.file("corpus.csv");
  write_corpus(corpus, path);
  return path;
}

int run_cli(const std::string& args) {
  const std::string command =
      std::string(NNCP_CLI_PATH) + " " + args + " >/dev/null 2>&1";
  const int status = std::system(command.c_str());
  REQUIRE(status != -1);
  return WEXITSTATUS(status);
}

}  // namespace

TEST_CASE("method normalization") {
  CHECK(normalize_methods({"mey"}) == std::vector<std::string>{"MEY"});
  CHECK(normalize_methods({"gmm", "Mey", "MEY", "avr"}) ==
        std::vector<std::string>{"MEY", "AVR", "GMM"});
  CHECK(normalize_methods({"AVR", "NNCP"}) ==
        std::vector<std::string>{"NNCP", "AVR"});
  CHECK_THROWS_AS(normalize_methods({}), ArgumentError);
  CHECK_THROWS_AS(normalize_methods({"LSTM"}), ArgumentError);
  CHECK(canonical_methods() ==
        std::vector<std::string>{"NNCP", "MEY", "AVR", "GMM"});
}

TEST_CASE("spec maps onto a model config") {
  ExperimentSpec spec;
  spec.n = 10;
  spec.hidden_dim = 32;
  spec.epochs = 7;
  spec.learning_rate = 0.5;
  spec.batch_size = 9;
  spec.dropout_rate = 0.1;
  spec.seed = 123;
  ModelConfig config = spec.model_config(3);
  CHECK(config.k == 3);
  CHECK(config.n == 10);
  CHECK(config.hidden_dim == 32);
  CHECK(config.epochs == 7);
  CHECK(config.learning_rate == 0.5);
  CHECK(config.batch_size == 9);
  CHECK(config.dropout_rate == 0.1);
  CHECK(config.seed == 123);
  CHECK_NOTHROW(config.validate());
}

TEST_CASE("evaluate_experiment scores every journal in both modes") {
  SyntheticOptions options;
  options.n_papers = 300;
  options.horizon_n = 8;
  Rng rng(11);
  Corpus corpus = generate_synthetic(rng, options);

  ExperimentSpec spec;
  spec.k = 2;
  spec.n = 8;
  spec.methods = {"MEY"};

  EvaluationOutcome outcome = evaluate_experiment(corpus, spec);
  const EvaluationReport& report = outcome.report;
  CHECK(report.train_papers + report.test_papers + report.dropped_papers ==
        corpus.size());
  CHECK(report.test_papers > 0);
  CHECK(report.methods == std::vector<std::string>{"MEY"});
  CHECK_FALSE(outcome.has_model);
  CHECK(report.fallbacks.empty());

  // One cell per (journal + ALL) x method x mode.
  bool found_all_total = false;
  for (const ScoreCell& cell : report.cells) {
    CHECK((cell.mode == "total" || cell.mode == "yearly"));
    CHECK(cell.method == "MEY");
    CHECK(cell.rmse >= 0.0);
    if (cell.journal == "ALL" && cell.mode == "total") {
      found_all_total = true;
      CHECK(cell.papers == report.test_papers);
    }
  }
  CHECK(found_all_total);

  ExperimentSpec bad = spec;
  bad.k = 8;
  CHECK_THROWS_AS(evaluate_experiment(corpus, bad), ArgumentError);
}

TEST_CASE("fallback stats cover the whole test split") {
  SyntheticOptions options;
  options.n_papers = 250;
  options.horizon_n = 8;
  Rng rng(21);
  Corpus corpus = generate_synthetic(rng, options);

  ExperimentSpec spec;
  spec.k = 2;
  spec.n = 8;
  spec.neighbors = 20;
  spec.methods = {"AVR", "GMM"};

  EvaluationOutcome outcome = evaluate_experiment(corpus, spec);
  REQUIRE(outcome.report.fallbacks.count("AVR") == 1);
  REQUIRE(outcome.report.fallbacks.count("GMM") == 1);
  for (const auto& [method, stats] : outcome.report.fallbacks) {
    CHECK(stats.full + stats.reduced + stats.mey ==
          outcome.report.test_papers);
  }
}

TEST_CASE("repeat runs write byte-identical artifacts") {
  TempDir dir("determinism");
  const std::string corpus_path = make_corpus_file(dir, 33, 400, 8);

  ExperimentSpec spec;
  spec.corpus_path = corpus_path;
  spec.k = 2;
  spec.n = 8;
  spec.methods = {"MEY", "AVR", "GMM"};
  spec.seed = 42;

  TempDir out_a("eval_a");
  TempDir out_b("eval_b");
  spec.out_dir = out_a.str();
  run_evaluate(spec);
  spec.out_dir = out_b.str();
  run_evaluate(spec);

  for (const std::string& name :
       {std::string("report.json"), std::string("report.txt"),
        std::string("plotdata/rmse_total.csv"),
        std::string("plotdata/r2_total.csv"),
        std::string("plotdata/rmse_yearly.csv"),
        std::string("plotdata/r2_yearly.csv")}) {
    CHECK(read_file(out_a.file(name)) == read_file(out_b.file(name)));
  }
}

TEST_CASE("synth writes a loadable corpus honoring the mix") {
  ExperimentSpec spec;
  spec.synth_papers = 100;
  spec.n = 8;
  spec.seed = 5;
  spec.journal_mix = "ALPHA:0.5,BETA:0.5";

  TempDir out("synth");
  spec.out_dir = out.str();
  SynthReport report = run_synth(spec);
  CHECK(report.papers == 100);
  CHECK(report.journal_counts.at("ALPHA") == 50);
  CHECK(report.journal_counts.at("BETA") == 50);

  Corpus loaded = load_corpus(out.file("corpus.csv"), 8);
  CHECK(loaded.size() == 100);
  CHECK(loaded.journals == std::set<std::string>{"ALPHA", "BETA"});

  // Identical seeds produce identical bytes.
  TempDir again("synth_again");
  spec.out_dir = again.str();
  run_synth(spec);
  CHECK(read_file(out.file("corpus.csv")) ==
        read_file(again.file("corpus.csv")));

  spec.journal_mix = "ALPHA:0.5,ALPHA:0.5";
  CHECK_THROWS_AS(run_synth(spec), ArgumentError);
  spec.journal_mix = "ALPHA-0.5";
  CHECK_THROWS_AS(run_synth(spec), ArgumentError);
  spec.journal_mix = "ALPHA:half,BETA:0.5";
  CHECK_THROWS_AS(run_synth(spec), ArgumentError);
}

TEST_CASE("train then predict round-trips through the checkpoint") {
  TempDir dir("roundtrip");
  const std::string corpus_path = make_corpus_file(dir, 44, 150, 8);

  ExperimentSpec spec;
  spec.corpus_path = corpus_path;
  spec.k = 2;
  spec.n = 8;
  spec.hidden_dim = 4;
  spec.epochs = 2;
  spec.learning_rate = 1e-3;
  spec.batch_size = 16;
  spec.dropout_rate = 0.0;

  TempDir train_out("train_out");
  spec.out_dir = train_out.str();
  run_train(spec);
  CHECK(fs::exists(train_out.file("model.ckpt")));
  CHECK(fs::exists(train_out.file("losses.csv")));
  CHECK(fs::exists(train_out.file("report.json")));

  const std::string losses = read_file(train_out.file("losses.csv"));
  CHECK(losses.rfind("epoch,loss", 0) == 0);

  TempDir predict_out("predict_out");
  ExperimentSpec predict_spec;
  predict_spec.corpus_path = corpus_path;
  predict_spec.n = 8;
  predict_spec.model_path = train_out.file("model.ckpt");
  predict_spec.out_dir = predict_out.str();
  run_predict(predict_spec);

  const std::string csv = read_file(predict_out.file("predictions.csv"));
  std::size_t lines = 0;
  for (char c : csv) {
    if (c == '\n') ++lines;
  }
  CHECK(lines == 151);  // header + one row per paper
  CHECK(csv.rfind("paper_id,journal_id,pred_c3", 0) == 0);
}

TEST_CASE("sensitivity sweeps k over the fixed window") {
  SyntheticOptions options;
  options.n_papers = 200;
  options.horizon_n = 8;
  Rng rng(55);
  Corpus corpus = generate_synthetic(rng, options);

  ExperimentSpec spec;
  spec.n = 8;
  spec.methods = {"MEY"};

  SensitivityReport report = sensitivity_experiment(corpus, spec, "");
  CHECK(report.window_lo == 7);
  CHECK(report.window_hi == 8);
  CHECK(report.mode == "total");
  REQUIRE(report.points.size() == 8);
  for (int k = 0; k <= 7; ++k) {
    CHECK(report.points[k].k == k);
    REQUIRE(report.points[k].by_method.count("MEY") == 1);
    CHECK(report.points[k].by_method.at("MEY").rmse >= 0.0);
    CHECK(report.points[k].by_method.at("MEY").papers > 0);
  }

  ExperimentSpec shallow = spec;
  shallow.n = 7;
  CHECK_THROWS_AS(sensitivity_experiment(corpus, shallow, ""), ArgumentError);
}

TEST_CASE("top100 credit sums to the ranked count") {
  SyntheticOptions options;
  options.n_papers = 300;
  options.horizon_n = 8;
  Rng rng(66);
  Corpus corpus = generate_synthetic(rng, options);

  ExperimentSpec spec;
  spec.k = 2;
  spec.n = 8;
  spec.methods = {"MEY", "AVR"};

  Top100Report report = top100_experiment(corpus, spec, 10);
  CHECK(report.target_rank == 10);
  REQUIRE_FALSE(report.rankings.empty());
  for (const JournalRanking& ranking : report.rankings) {
    CHECK(ranking.ranked == std::min<std::size_t>(10, ranking.population));
    double sum = 0.0;
    for (const auto& [method, credit] : ranking.credit) {
      CHECK(credit >= 0.0);
      sum += credit;
    }
    CHECK(sum == doctest::Approx(
                      static_cast<double>(ranking.ranked)).epsilon(1e-9));
  }

  // A single method wins every ranked paper outright.
  spec.methods = {"MEY"};
  Top100Report solo = top100_experiment(corpus, spec, 10);
  for (const JournalRanking& ranking : solo.rankings) {
    CHECK(ranking.credit.at("MEY") ==
          doctest::Approx(static_cast<double>(ranking.ranked)).epsilon(1e-12));
  }

  CHECK_THROWS_AS(top100_experiment(corpus, spec, 0), ArgumentError);
}

TEST_CASE("cli maps failures onto documented exit codes") {
  CHECK(run_cli("--help") == 0);
  CHECK(run_cli("") == 2);
  CHECK(run_cli("evaluate") == 2);
  CHECK(run_cli("bogus-subcommand") == 2);

  TempDir dir("cli");
  CHECK(run_cli("evaluate --corpus " + dir.file("absent.csv") +
                " --methods MEY --out " + dir.file("out1")) == 3);

  {
    std::ofstream bad(dir.file("malformed.csv"));
    bad << "not,a,real,header\njunk\n";
  }
  CHECK(run_cli("evaluate --corpus " + dir.file("malformed.csv") +
                " --horizon 8 --methods MEY --out " + dir.file("out2")) == 4);

  {
    std::ofstream dup(dir.file("duplicate.csv"));
    dup << "paper_id,journal_id,publication_year,c0,c1,c2,c3,c4,c5,c6,c7,c8\n";
    dup << "P1,NATURE,1990,1,2,3,4,5,6,7,8,9\n";
    dup << "P1,NATURE,1999,1,2,3,4,5,6,7,8,9\n";
  }
  CHECK(run_cli("evaluate --corpus " + dir.file("duplicate.csv") +
                " --horizon 8 --methods MEY --out " + dir.file("out3")) == 5);

  {
    std::ofstream train_only(dir.file("train_only.csv"));
    train_only
        << "paper_id,journal_id,publication_year,c0,c1,c2,c3,c4,c5,c6,c7,c8\n";
    train_only << "P1,NATURE,1990,1,2,3,4,5,6,7,8,9\n";
  }
  CHECK(run_cli("evaluate --corpus " + dir.file("train_only.csv") +
                " --horizon 8 --methods MEY --out " + dir.file("out4")) == 6);

  CHECK(run_cli("evaluate --corpus " + dir.file("train_only.csv") +
                " --horizon 8 --methods MEY --train-years oops --out " +
                dir.file("out5")) == 2);
}

TEST_CASE("cli evaluate runs end to end") {
  TempDir dir("cli_eval");
  const std::string corpus_path = make_corpus_file(dir, 77, 200, 8);
  const int code =
      run_cli("evaluate --corpus " + corpus_path +
              " --horizon 8 --k 2 --methods MEY,AVR --out " + dir.file("out"));
  CHECK(code == 0);
  CHECK(fs::exists(dir.path / "out" / "report.json"));
  CHECK(fs::exists(dir.path / "out" / "report.txt"));
  CHECK(fs::exists(dir.path / "out" / "plotdata" / "rmse_total.csv"));
}
