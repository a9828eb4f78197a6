#include <cstdint>
#include <exception>
#include <iostream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "nncp/errors.hpp"
#include "nncp/experiments.hpp"

namespace {

constexpr const char* kExitCodeHelp =
    "Exit codes:\n"
    "  0  all requested outputs written\n"
    "  2  bad arguments or usage\n"
    "  3  file I/O failure\n"
    "  4  malformed input file\n"
    "  5  invalid data (e.g. duplicate paper ids)\n"
    "  6  not enough data for the requested operation\n"
    "  7  internal error\n";

struct YearRangeFlag {
  std::string text;
  int lo = 0;
  int hi = 0;

  void parse(const char* flag) {
    const std::size_t colon = text.find(':');
    if (colon == std::string::npos) {
      throw nncp::ArgumentError(std::string(flag) + " expects LO:HI, got '" +
                                text + "'");
    }
    try {
      std::size_t used = 0;
      lo = std::stoi(text.substr(0, colon), &used);
      if (used != colon) throw std::invalid_argument("");
      const std::string rest = text.substr(colon + 1);
      hi = std::stoi(rest, &used);
      if (used != rest.size()) throw std::invalid_argument("");
    } catch (const std::exception&) {
      throw nncp::ArgumentError(std::string(flag) + " expects LO:HI, got '" +
                                text + "'");
    }
  }
};

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{
      "nncp: forecasts per-year citation counts of scientific papers with a "
      "recurrent encoder/decoder network and three reference baselines "
      "(MEY, AVR, GMM)."};
  app.require_subcommand(1);
  app.footer(kExitCodeHelp);

  nncp::ExperimentSpec spec;
  YearRangeFlag train_years{"1980:1997"};
  YearRangeFlag test_years{"1998:2002"};

  auto add_out = [&](CLI::App* cmd) {
    cmd->add_option("--out", spec.out_dir, "Output directory")
        ->capture_default_str();
    cmd->add_option("--seed", spec.seed, "Master random seed")
        ->capture_default_str();
  };
  auto add_corpus = [&](CLI::App* cmd) {
    cmd->add_option("--corpus", spec.corpus_path, "Corpus CSV path")
        ->required();
    cmd->add_option("--horizon", spec.n,
                    "Last modeled year index n (corpus holds c0..cn)")
        ->capture_default_str();
  };
  auto add_split = [&](CLI::App* cmd) {
    cmd->add_option("--train-years", train_years.text,
                    "Training publication years, LO:HI inclusive")
        ->capture_default_str();
    cmd->add_option("--test-years", test_years.text,
                    "Test publication years, LO:HI inclusive")
        ->capture_default_str();
  };
  auto add_model = [&](CLI::App* cmd) {
    cmd->add_option("--hidden", spec.hidden_dim, "Hidden units per network")
        ->capture_default_str();
    cmd->add_option("--epochs", spec.epochs, "Training epochs")
        ->capture_default_str();
    cmd->add_option("--lr", spec.learning_rate, "RMSProp learning rate")
        ->capture_default_str();
    cmd->add_option("--batch", spec.batch_size, "Papers per batch")
        ->capture_default_str();
    cmd->add_option("--dropout", spec.dropout_rate,
                    "Dropout rate on recurrent-layer inputs")
        ->capture_default_str();
  };
  auto add_methods = [&](CLI::App* cmd) {
    cmd->add_option("--methods", spec.methods,
                    "Comma-separated subset of NNCP,MEY,AVR,GMM")
        ->delimiter(',')
        ->capture_default_str();
    cmd->add_option("--neighbors", spec.neighbors,
                    "Similar papers per neighbor search (L)")
        ->capture_default_str();
  };

  CLI::App* synth = app.add_subcommand(
      "synth", "Generate a synthetic citation corpus CSV");
  synth->add_option("--papers", spec.synth_papers, "Number of papers")
      ->capture_default_str();
  synth->add_option("--journal-mix", spec.journal_mix,
                    "Journal fractions as NAME:FRAC,... (default built-in)");
  synth->add_option("--horizon", spec.n, "Last modeled year index n")
      ->capture_default_str();
  add_out(synth);

  CLI::App* train = app.add_subcommand(
      "train", "Train the network on the training-year split");
  add_corpus(train);
  add_split(train);
  train->add_option("--k", spec.k, "Known years are c0..ck")
      ->capture_default_str();
  add_model(train);
  add_out(train);

  CLI::App* predict = app.add_subcommand(
      "predict", "Predict future citations with a saved model");
  add_corpus(predict);
  predict->add_option("--model", spec.model_path, "Checkpoint to load")
      ->required();
  add_out(predict);

  CLI::App* evaluate = app.add_subcommand(
      "evaluate", "Train, predict the test split, and score every method");
  add_corpus(evaluate);
  add_split(evaluate);
  evaluate->add_option("--k", spec.k, "Known years are c0..ck")
      ->capture_default_str();
  add_model(evaluate);
  add_methods(evaluate);
  evaluate->add_flag("--yearly-pooled", spec.yearly_pooled,
                     "Also score all paper-year pairs pooled together");
  add_out(evaluate);

  CLI::App* top100 = app.add_subcommand(
      "top100", "Best-prediction frequency among each journal's most cited");
  add_corpus(top100);
  add_split(top100);
  top100->add_option("--k", spec.k, "Known years are c0..ck")
      ->capture_default_str();
  add_model(top100);
  add_methods(top100);
  add_out(top100);

  CLI::App* sensitivity = app.add_subcommand(
      "sensitivity", "Sweep the known prefix k from 0 to 7");
  add_corpus(sensitivity);
  add_split(sensitivity);
  add_model(sensitivity);
  add_methods(sensitivity);
  add_out(sensitivity);

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    return app.exit(e) == 0 ? 0 : 2;
  }

  try {
    train_years.parse("--train-years");
    test_years.parse("--test-years");
    spec.train_lo = train_years.lo;
    spec.train_hi = train_years.hi;
    spec.test_lo = test_years.lo;
    spec.test_hi = test_years.hi;

    if (*synth) {
      const nncp::SynthReport report = nncp::run_synth(spec);
      std::cout << report.papers << " papers written to "
                << report.corpus_path << "\n";
      for (const auto& [journal, count] : report.journal_counts) {
        std::cout << "  " << journal << ": " << count << "\n";
      }
      std::cout << "mean total citations per paper: "
                << report.mean_total_citations << "\n";
    } else if (*train) {
      nncp::run_train(spec);
      std::cout << "model and training report written to " << spec.out_dir
                << "\n";
    } else if (*predict) {
      nncp::run_predict(spec);
      std::cout << "predictions written to " << spec.out_dir << "\n";
    } else if (*evaluate) {
      nncp::run_evaluate(spec);
      std::cout << "evaluation report written to " << spec.out_dir << "\n";
    } else if (*top100) {
      nncp::run_top100(spec);
      std::cout << "ranking report written to " << spec.out_dir << "\n";
    } else if (*sensitivity) {
      nncp::run_sensitivity(spec);
      std::cout << "sensitivity report written to " << spec.out_dir << "\n";
    }
  } catch (const nncp::ArgumentError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  } catch (const nncp::IoError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 3;
  } catch (const nncp::ParseError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 4;
  } catch (const nncp::ValidationError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 5;
  } catch (const nncp::InsufficientDataError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 6;
  } catch (const std::exception& e) {
    std::cerr << "internal error: " << e.what() << "\n";
    return 7;
  }
  return 0;
}
