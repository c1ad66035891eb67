#include <algorithm>
#include <cstdio>
#include <set>
#include <unordered_map>

#include "emogap/errors.hpp"
#include "emogap/metrics.hpp"
#include "emogap/pipeline.hpp"
#include "emogap/svg.hpp"

namespace emogap {
namespace {

std::vector<std::string> emotion_labels() {
  std::vector<std::string> out;
  for (auto e : kAllEmotions) out.emplace_back(emotion_name(e));
  return out;
}

std::vector<std::vector<long long>> as_rows(const CooccurrenceMatrix& m) {
  std::vector<std::vector<long long>> rows;
  for (const auto& r : m.counts) rows.emplace_back(r.begin(), r.end());
  return rows;
}

std::string ranking_svg(const std::string& title, const ExpressionRanking& ranking) {
  std::vector<std::pair<std::string, double>> bars;
  for (const auto& s : ranking.top) bars.emplace_back(s.token, s.diff);
  std::string notice;
  if (ranking.top.empty()) {
    notice = "no token qualified (shortfall: 0 of " + std::to_string(ranking.requested) + ")";
  } else if (ranking.shortfall) {
    notice = "shortfall: only " + std::to_string(ranking.top.size()) + " of " + std::to_string(ranking.requested) +
             " tokens qualified";
  }
  return svg::horizontal_bars(title, bars, notice);
}

}  // namespace

RunManifest emit_report(const RunManifest& manifest) {
  const auto& dir = manifest.out_dir;
  try {
    for (const char* needed : {artifact::kRunConfig, artifact::kCorpus, artifact::kLabels, artifact::kCoocWriter,
                               artifact::kCoocReader, artifact::kRoc, artifact::kMetrics,
                               artifact::kRankingFiltered, artifact::kRankingUnfiltered, artifact::kIntensity,
                               artifact::kTruePositives, artifact::kMining}) {
      if (!manifest.lists(needed) || !std::filesystem::exists(dir / needed)) {
        throw IoError(std::string("missing artifact '") + needed + "'");
      }
    }
    const auto run_config = read_block_file(dir / artifact::kRunConfig);
    const auto strong = std::stod(run_config.get("strong_threshold"));
    const auto emotion = emotion_from_name(run_config.get("emotion"));
    const auto examples = static_cast<std::size_t>(run_config.get_int("examples"));
    const auto mining = read_block_file(dir / artifact::kMining);
    const auto top_k = static_cast<std::size_t>(mining.get_int("top_k"));
    const auto metrics = read_block_file(dir / artifact::kMetrics);
    const auto labels = emotion_labels();

    const auto writer = matrix_from_tsv(read_file(dir / artifact::kCoocWriter), LabelSource::kWriter, strong);
    const auto reader = matrix_from_tsv(read_file(dir / artifact::kCoocReader), LabelSource::kReaderAverage, strong);
    write_file(dir / artifact::kHeatmapWriter,
               svg::heatmap("Co-occurrence of strong labels (writer)", labels, as_rows(writer)));
    write_file(dir / artifact::kHeatmapReader,
               svg::heatmap("Co-occurrence of strong labels (reader average)", labels, as_rows(reader)));

    const auto curve = roc_from_tsv(read_file(dir / artifact::kRoc));
    std::vector<std::pair<double, double>> pts;
    for (const auto& p : curve.points) pts.emplace_back(p.fpr, p.tpr);
    write_file(dir / artifact::kRocSvg,
               svg::line_plot("ROC: hidden-" + std::string(emotion_name(emotion)) + " detection", pts,
                              "False positive rate", "True positive rate", "AUC = " + metrics.get("auc")));

    write_file(dir / artifact::kRankingFilteredSvg,
               ranking_svg("Expressions, detector-filtered",
                           ranking_from_tsv(read_file(dir / artifact::kRankingFiltered), top_k)));
    write_file(dir / artifact::kRankingUnfilteredSvg,
               ranking_svg("Expressions, labels only",
                           ranking_from_tsv(read_file(dir / artifact::kRankingUnfiltered), top_k)));
    write_file(dir / artifact::kIntensityReport, read_file(dir / artifact::kIntensity));

    // Example true-positive sentences with the writer and reader labels.
    const auto corpus = deserialize_corpus(read_file(dir / artifact::kCorpus));
    const auto hidden = labels_from_tsv(read_file(dir / artifact::kLabels));
    std::unordered_map<std::string, std::size_t> position;
    for (std::size_t i = 0; i < corpus.size(); ++i) position.emplace(corpus[i].post_id, i);
    std::vector<std::size_t> chosen;
    {
      const auto tp_text = read_file(dir / artifact::kTruePositives);
      std::size_t start = 0;
      while (start < tp_text.size()) {
        auto nl = tp_text.find('\n', start);
        auto id = tp_text.substr(start, nl == std::string::npos ? std::string::npos : nl - start);
        if (!id.empty()) {
          auto it = position.find(id);
          if (it == position.end()) throw IoError("true-positive id '" + id + "' not in corpus");
          chosen.push_back(it->second);
        }
        if (nl == std::string::npos) break;
        start = nl + 1;
      }
    }
    // Largest gap first, then corpus order.
    std::stable_sort(chosen.begin(), chosen.end(),
                     [&](std::size_t a, std::size_t b) { return hidden[a].gap > hidden[b].gap; });
    if (chosen.size() > examples) chosen.resize(examples);
    const std::string title = emotion_title(emotion);
    std::string text;
    if (chosen.empty()) text = "(no true-positive sentences)\n";
    for (auto i : chosen) {
      const auto& post = corpus[i];
      text += "Text: " + post.text + "\n";
      text += title + "\tWriter: " + std::to_string(post.writer[emotion]);
      for (std::size_t r = 0; r < post.readers.size(); ++r) {
        text += "\tReader" + std::to_string(r + 1) + ": " + std::to_string(post.readers[r][emotion]);
      }
      text += "\n\n";
    }
    write_file(dir / artifact::kExamples, text);
  } catch (const StageError&) {
    throw;
  } catch (const std::exception& e) {
    throw StageError("report", e.what());
  }
  return refresh_manifest(dir);
}

}  // namespace emogap
