// emogap: hidden-emotion corpus statistics, detector training and
// expression mining from the command line.

#include <cstdlib>
#include <iostream>
#include <memory>
#include <optional>

#include "CLI11.hpp"
#include "emogap/errors.hpp"
#include "emogap/pipeline.hpp"
#include "emogap/synthetic.hpp"

namespace {

struct Flags {
  std::optional<std::string> config_file;
  std::optional<std::string> corpus;
  std::optional<std::string> emotion;
  std::optional<double> gap_threshold;
  std::optional<double> strong_threshold;
  std::optional<std::uint64_t> seed;
  std::optional<std::string> ratio;
  std::optional<std::string> split_mode;
  std::optional<std::string> backend;
  std::optional<std::string> checkpoint;
  std::optional<int> epochs;
  std::optional<double> threshold;
  std::optional<std::size_t> top_k;
  std::optional<std::size_t> min_hidden_count;
  std::optional<std::string> rate_mode;
  std::optional<std::string> mining_pool;
  std::optional<std::string> segmenter;
  std::optional<int> ngram;
  std::optional<std::string> normalizer;
  std::optional<std::string> adapter;
  std::string out = "emogap-out";
};

void add_common(CLI::App& cmd, Flags& f) {
  cmd.add_option("--config", f.config_file, "Key=value config file (overrides defaults)");
  cmd.add_option("--corpus", f.corpus, "Corpus TSV");
  cmd.add_option("--emotion", f.emotion, "Emotion analysed (default anger)");
  cmd.add_option("--gap-threshold", f.gap_threshold, "Writer minus reader-average gap for hidden (default 2)");
  cmd.add_option("--strong-threshold", f.strong_threshold, "Intensity counted as strong (default 2)");
  cmd.add_option("--seed", f.seed, "Run seed");
  cmd.add_option("--ratio", f.ratio, "Train:test ratio (default 4:1)");
  cmd.add_option("--split-mode", f.split_mode, "random | stratified | grouped");
  cmd.add_option("--backend", f.backend, "Detector backend: baseline | encoder");
  cmd.add_option("--checkpoint", f.checkpoint, "Pretrained encoder checkpoint (encoder backend)");
  cmd.add_option("--epochs", f.epochs, "Encoder fine-tuning epochs (default 3)");
  cmd.add_option("--threshold", f.threshold, "Decision threshold (default 0.5)");
  cmd.add_option("--top-k", f.top_k, "Expressions to report (default 10)");
  cmd.add_option("--min-hidden-count", f.min_hidden_count, "Support floor in the hidden set (default 5)");
  cmd.add_option("--rate-mode", f.rate_mode, "presence | token-share");
  cmd.add_option("--mining-pool", f.mining_pool, "Unfiltered mining pool: test | corpus");
  cmd.add_option("--segmenter", f.segmenter, "whitespace | char-ngram | external-morphological");
  cmd.add_option("--ngram", f.ngram, "n for char-ngram mode");
  cmd.add_option("--normalize", f.normalizer, "none | unicode-compatibility-fold");
  cmd.add_option("--adapter", f.adapter, "Registered adapter name (external mode)");
  cmd.add_option("--out", f.out, "Output directory")->capture_default_str();
}

emogap::PipelineConfig resolve(const Flags& f) {
  using emogap::KeyedRecord;
  emogap::PipelineConfig config;
  config.out_dir = f.out;
  // Earlier stages' snapshot, then the config file, then flags.
  const auto snapshot = config.out_dir / emogap::artifact::kRunConfig;
  if (std::filesystem::exists(snapshot)) config.apply(emogap::read_block_file(snapshot));
  if (f.config_file) config.apply(emogap::read_block_file(*f.config_file));

  KeyedRecord r;
  if (f.corpus) r.set("corpus", *f.corpus);
  if (f.emotion) r.set("emotion", *f.emotion);
  if (f.gap_threshold) r.set_number("gap_threshold", *f.gap_threshold);
  if (f.strong_threshold) r.set_number("strong_threshold", *f.strong_threshold);
  if (f.seed) r.set("seed", std::to_string(*f.seed));
  if (f.ratio) r.set("ratio", *f.ratio);
  if (f.split_mode) r.set("split_mode", *f.split_mode);
  if (f.backend) r.set("detector.backend", *f.backend);
  if (f.checkpoint) r.set("detector.encoder_checkpoint", *f.checkpoint);
  if (f.epochs) r.set_number("detector.epochs", *f.epochs);
  if (f.threshold) r.set_number("threshold", *f.threshold);
  if (f.top_k) r.set_number("top_k", *f.top_k);
  if (f.min_hidden_count) r.set_number("min_hidden_count", *f.min_hidden_count);
  if (f.rate_mode) r.set("rate_mode", *f.rate_mode);
  if (f.mining_pool) r.set("mining_pool", *f.mining_pool);
  if (f.segmenter) r.set("segmenter.mode", *f.segmenter);
  if (f.ngram) r.set_number("segmenter.ngram_n", *f.ngram);
  if (f.normalizer) r.set("segmenter.normalizer", *f.normalizer);
  if (f.adapter) r.set("segmenter.adapter", *f.adapter);
  config.apply(r);
  config.out_dir = f.out;

  // EMOGAP_SEGMENTER_CMD registers a command-line analyzer as "command".
  if (const char* cmd = std::getenv("EMOGAP_SEGMENTER_CMD"); cmd && *cmd) {
    emogap::AdapterRegistry::global().add("command", std::make_shared<emogap::CommandAdapter>(cmd));
    if (config.segmenter.adapter.empty()) config.segmenter.adapter = "command";
  }
  return config;
}

void print_summary(const emogap::RunManifest& m) {
  for (const auto& [k, v] : m.summary.fields()) std::cout << k << "\t" << v << "\n";
  std::cout << "manifest\t" << (m.out_dir / emogap::artifact::kManifest).string() << "\n";
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"emogap: writer/reader emotion-gap toolkit"};
  app.require_subcommand(1);
  Flags flags;

  struct Stage {
    const char* name;
    const char* help;
    void (*fn)(const emogap::PipelineConfig&);
  };
  const Stage stages[] = {
      {"ingest", "Parse and validate the corpus TSV", emogap::stage_ingest},
      {"stats", "Derive hidden labels, co-occurrence matrices and strong-label counts", emogap::stage_stats},
      {"split", "Seeded train/test split", emogap::stage_split},
      {"train", "Train the detector on the train split", emogap::stage_train},
      {"evaluate", "Score the test split: ROC, AUC, confusion counts", emogap::stage_evaluate},
      {"mine", "Rank expressions (filtered and unfiltered) and build the intensity table", emogap::stage_mine},
  };
  std::vector<std::pair<CLI::App*, const Stage*>> stage_cmds;
  for (const auto& s : stages) {
    auto* cmd = app.add_subcommand(s.name, s.help);
    add_common(*cmd, flags);
    stage_cmds.emplace_back(cmd, &s);
  }
  auto* report = app.add_subcommand("report", "Render figures and tables from the run manifest");
  add_common(*report, flags);
  auto* run = app.add_subcommand("run", "Full pipeline: ingest through report");
  add_common(*run, flags);

  emogap::PlantedCorpusSpec synth_spec;
  std::string synth_out;
  auto* synth = app.add_subcommand("synth", "Write a planted-marker synthetic corpus TSV");
  synth->add_option("--posts", synth_spec.posts)->capture_default_str();
  synth->add_option("--hidden-fraction", synth_spec.hidden_fraction)->capture_default_str();
  synth->add_option("--markers", synth_spec.markers)->capture_default_str();
  synth->add_option("--seed", synth_spec.seed)->capture_default_str();
  synth->add_option("--output,-o", synth_out, "Output TSV")->required();

  CLI11_PARSE(app, argc, argv);

  try {
    if (synth->parsed()) {
      const auto planted = emogap::generate_planted_corpus(synth_spec);
      emogap::write_file(synth_out, emogap::to_tsv(planted.corpus, emogap::ColumnMapping::defaults()));
      std::cout << "posts\t" << planted.corpus.size() << "\nmarkers";
      for (const auto& m : planted.markers) std::cout << "\t" << m;
      std::cout << "\n";
      return 0;
    }
    const auto config = resolve(flags);
    if (run->parsed()) {
      print_summary(emogap::run_pipeline(config));
      return 0;
    }
    if (report->parsed()) {
      print_summary(emogap::emit_report(emogap::load_manifest(config.out_dir)));
      return 0;
    }
    for (const auto& [cmd, stage] : stage_cmds) {
      if (!cmd->parsed()) continue;
      stage->fn(config);
      print_summary(emogap::refresh_manifest(config.out_dir));
      return 0;
    }
  } catch (const emogap::StageError& e) {
    std::cerr << "emogap: stage '" << e.stage() << "' failed: " << e.what() << "\n";
    return 2;
  } catch (const std::exception& e) {
    std::cerr << "emogap: " << e.what() << "\n";
    return 1;
  }
  return 0;
}
