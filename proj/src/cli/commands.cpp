#include "claimalign/cli.hpp"

#include <cstdio>
#include <fstream>
#include <iostream>
#include <map>
#include <optional>
#include <sstream>
#include <thread>

#include "CLI11.hpp"
#include "claimalign/analysis.hpp"
#include "claimalign/corpus.hpp"
#include "claimalign/labeling.hpp"
#include "claimalign/viz.hpp"
#include "json.hpp"

namespace claimalign::cli {
namespace {

namespace fs = std::filesystem;

/// Failure that has already been phrased for the user.
struct CommandError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

std::string real4(double value) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.4f", value);
  return buf;
}

// Probabilities below 1e-4 switch to scientific notation so tiny p-values survive.
std::string probability(double value) {
  char buf[64];
  std::snprintf(buf, sizeof buf, value != 0.0 && value < 1e-4 ? "%.4e" : "%.4f", value);
  return buf;
}

std::string quote(const std::string& s) { return nlohmann::json(s).dump(); }

void require_readable(const fs::path& path) {
  std::ifstream probe(path);
  if (!probe) throw CommandError("cannot read " + path.string());
}

std::ofstream open_output(const fs::path& path) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw CommandError("cannot write " + path.string());
  return out;
}

std::map<std::string, PatentRecord> records_by_id(const fs::path& path) {
  std::map<std::string, PatentRecord> out;
  RecordReader reader(path);
  PatentRecord record;
  while (reader.next(record)) {
    const std::string id = record.id;
    if (!out.emplace(id, std::move(record)).second) {
      throw CommandError(path.string() + ": line " + std::to_string(reader.line()) +
                         ": duplicate id " + quote(id));
    }
  }
  return out;
}

void check_same_ids(const std::map<std::string, PatentRecord>& predicted,
                    const std::map<std::string, PatentRecord>& gold) {
  for (const auto& [id, _] : gold) {
    if (!predicted.count(id)) throw CommandError("id " + quote(id) + " is missing from the predicted file");
  }
  for (const auto& [id, _] : predicted) {
    if (!gold.count(id)) throw CommandError("id " + quote(id) + " is missing from the gold file");
  }
}

// ---------------------------------------------------------------------------
// Label configuration from config file + flags.

struct LabelFlags {
  std::optional<std::string> config_path;
  std::optional<std::string> match_scorer;
  std::optional<std::string> match_algorithm;
  std::optional<std::string> deleted_threshold;
  std::optional<std::string> fraction_limit;
  std::optional<std::string> kept_metric;
  std::optional<std::string> kept_threshold;

  void attach(CLI::App& cmd) {
    const LabelConfig d;
    cmd.add_option("--config", config_path, "Config file of key = value lines (flags override it)");
    cmd.add_option("--match-scorer", match_scorer,
                   "bleu1|bleu4|rouge1|rougeL|meteor|chrf, or external:DIR with one <id>.txt "
                   "score matrix per record (default " + d.match_scorer.to_string() + ")");
    cmd.add_option("--match-algorithm", match_algorithm,
                   "draft_greedy|final_greedy|match_and_cover (default match_and_cover)");
    cmd.add_option("--deleted-threshold", deleted_threshold, "Minimum match score (default 0.45)");
    cmd.add_option("--fraction-limit", fraction_limit,
                   "Uncovered fraction below which match-and-cover stops (default 0.3)");
    cmd.add_option("--kept-metric", kept_metric, "Metric for the kept test (default bleu4)");
    cmd.add_option("--kept-threshold", kept_threshold, "Kept when kept metric >= this (default 0.88)");
  }

  LabelConfig resolve() const {
    LabelConfig config;
    try {
      if (config_path) config = read_label_config(*config_path);
      const std::pair<const char*, const std::optional<std::string>*> overrides[] = {
          {"match_scorer", &match_scorer},         {"match_algorithm", &match_algorithm},
          {"deleted_threshold", &deleted_threshold}, {"fraction_limit", &fraction_limit},
          {"kept_metric", &kept_metric},           {"kept_threshold", &kept_threshold},
      };
      for (const auto& [key, value] : overrides) {
        if (*value) config.set(key, **value);
      }
      config.validate();
    } catch (const std::exception& e) {
      throw CommandError(std::string("invalid configuration: ") + e.what());
    }
    return config;
  }
};

// External scorers name a directory; each record reads <dir>/<id>.txt.
LabelConfig config_for_record(const LabelConfig& config, const PatentRecord& record) {
  if (config.match_scorer.kind != ScorerSpec::Kind::External) return config;
  LabelConfig local = config;
  local.match_scorer.matrix_path = config.match_scorer.matrix_path / (record.id + ".txt");
  return local;
}

enum class Rewrite { LabelsAndEdges, EdgesOnly };

void rewrite_record(PatentRecord& record, const LabelConfig& config, Rewrite mode) {
  LabelResult result = derive_labels(record.draft, record.final, config_for_record(config, record));
  record.edges = to_sentence_edges(result.edges);
  if (mode == Rewrite::LabelsAndEdges) {
    record.labels = std::move(result.labels);
  } else {
    record.labels.reset();
  }
}

struct StreamSummary {
  std::size_t records = 0;
  std::size_t edges = 0;
  std::array<std::size_t, 3> counts{};
};

// Streams `input` to `output` in bounded batches; output order always equals
// input order whatever the worker count.
StreamSummary stream_records(const fs::path& input, const fs::path& output, const LabelConfig& config,
                             Rewrite mode, unsigned jobs, std::ostream& err) {
  require_readable(input);
  if (fs::exists(output) && fs::equivalent(input, output)) {
    throw CommandError("output would overwrite the input file");
  }
  RecordReader reader(input);
  std::ofstream out = open_output(output);

  const std::size_t batch_size = 64 * std::max(1u, jobs);
  std::vector<PatentRecord> batch;
  std::vector<std::size_t> lines;
  std::vector<std::string> failures;
  StreamSummary summary;

  auto flush = [&] {
    failures.assign(batch.size(), {});
    auto work = [&](std::size_t first, std::size_t stride) {
      for (std::size_t k = first; k < batch.size(); k += stride) {
        try {
          rewrite_record(batch[k], config, mode);
        } catch (const std::exception& e) {
          failures[k] = e.what();
        }
      }
    };
    if (jobs <= 1) {
      work(0, 1);
    } else {
      std::vector<std::thread> pool;
      for (unsigned t = 0; t < jobs; ++t) pool.emplace_back(work, t, jobs);
      for (auto& th : pool) th.join();
    }
    for (std::size_t k = 0; k < batch.size(); ++k) {
      if (!failures[k].empty()) {
        throw CommandError(input.string() + ": line " + std::to_string(lines[k]) + " (id " +
                           quote(batch[k].id) + "): " + failures[k]);
      }
      out << format_record(batch[k]) << '\n';
      ++summary.records;
      summary.edges += batch[k].edges->size();
      if (batch[k].labels) {
        for (auto label : *batch[k].labels) ++summary.counts[static_cast<std::size_t>(label)];
      }
      if (summary.records % 10000 == 0) err << "processed " << summary.records << " records\n";
    }
    batch.clear();
    lines.clear();
  };

  PatentRecord record;
  try {
    while (reader.next(record)) {
      batch.push_back(std::move(record));
      lines.push_back(reader.line());
      if (batch.size() == batch_size) flush();
    }
  } catch (const RecordError& e) {
    throw CommandError(input.string() + ": " + e.what());
  }
  flush();
  if (!out.flush()) throw CommandError("write failed for " + output.string());
  return summary;
}

std::vector<PatentRecord> load_records(const fs::path& path) {
  require_readable(path);
  try {
    return read_records(path);
  } catch (const RecordError& e) {
    throw CommandError(path.string() + ": " + e.what());
  }
}

std::string label_counts_json(const std::array<std::size_t, 3>& counts) {
  return "\"keep\":" + std::to_string(counts[0]) + ",\"edit\":" + std::to_string(counts[1]) +
         ",\"del\":" + std::to_string(counts[2]);
}

// Entailment predictions: {"id": ..., "entailment": ["neutral", ...]} per line.
std::map<std::string, std::vector<EntailmentLabel>> read_entailment(const fs::path& path) {
  require_readable(path);
  std::ifstream in(path);
  std::map<std::string, std::vector<EntailmentLabel>> out;
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (line.find_first_not_of(" \t\r") == std::string::npos) continue;
    try {
      const auto obj = nlohmann::json::parse(line);
      std::vector<EntailmentLabel> labels;
      for (const auto& item : obj.at("entailment")) labels.push_back(parse_entailment(item.get<std::string>()));
      out[obj.at("id").get<std::string>()] = std::move(labels);
    } catch (const std::exception& e) {
      throw CommandError(path.string() + ": line " + std::to_string(line_no) + ": " + e.what());
    }
  }
  return out;
}

const std::vector<EditLabel>& labels_of(const PatentRecord& record, const char* which) {
  if (!record.labels) {
    throw CommandError(std::string(which) + " record " + quote(record.id) + " has no labels");
  }
  return *record.labels;
}

}  // namespace

int run(int argc, const char* const* argv, std::ostream& out, std::ostream& err) {
  CLI::App app{"Sentence alignment and edit labeling for revised claim sets"};
  app.name("claimalign");
  app.require_subcommand(1);

  // label / match
  LabelFlags label_flags;
  std::string label_in, label_out;
  unsigned label_jobs = 1;
  auto* label = app.add_subcommand("label", "Match drafts to final sentences and label every draft sentence");
  label->add_option("-i,--input", label_in, "Record file")->required();
  label->add_option("-o,--output", label_out, "Labeled record file")->required();
  label->add_option("-j,--jobs", label_jobs, "Worker threads")->capture_default_str();
  label_flags.attach(*label);

  LabelFlags match_flags;
  std::string match_in, match_out;
  unsigned match_jobs = 1;
  auto* match = app.add_subcommand("match", "Compute match edges only (drops existing labels)");
  match->add_option("-i,--input", match_in, "Record file")->required();
  match->add_option("-o,--output", match_out, "Record file with edges")->required();
  match->add_option("-j,--jobs", match_jobs, "Worker threads")->capture_default_str();
  match_flags.attach(*match);

  // evaluation
  std::string em_pred, em_gold;
  auto* eval_match = app.add_subcommand("eval-match", "Pooled edge precision/recall/F1 against gold records");
  eval_match->add_option("--predicted", em_pred, "Predicted record file")->required();
  eval_match->add_option("--gold", em_gold, "Gold record file")->required();

  std::string el_pred, el_gold;
  bool el_entailment = false;
  auto* eval_labels = app.add_subcommand("eval-labels", "Weighted/micro/macro/per-class label F1");
  eval_labels->add_option("--predicted", el_pred, "Predicted record file")->required();
  eval_labels->add_option("--gold", el_gold, "Gold record file")->required();
  eval_labels->add_flag("--entailment", el_entailment,
                        "Predicted file holds {\"id\", \"entailment\": [...]} lines mapped to edit labels");

  std::string stats_in;
  auto* stats = app.add_subcommand("stats", "Edit-label distribution of a labeled corpus");
  stats->add_option("-i,--input", stats_in, "Labeled record file")->required();

  // splits and sampling
  std::string split_in, split_dir;
  SplitSpec split_spec;
  auto* split = app.add_subcommand("split", "Stratified train/validation/test split");
  split->add_option("-i,--input", split_in, "Labeled record file")->required();
  split->add_option("--output-dir", split_dir, "Directory for train/validation/test.jsonl")->required();
  split->add_option("--train", split_spec.train_fraction, "Train fraction")->capture_default_str();
  split->add_option("--validation", split_spec.validation_fraction, "Validation fraction")->capture_default_str();
  split->add_option("--test", split_spec.test_fraction, "Test fraction")->capture_default_str();
  split->add_option("--seed", split_spec.seed, "Shuffle seed")->capture_default_str();

  std::string us_in, us_out;
  std::uint64_t us_seed = 0;
  auto* under = app.add_subcommand("undersample", "Balance labeled draft sentences by undersampling");
  under->add_option("-i,--input", us_in, "Labeled record file")->required();
  under->add_option("-o,--output", us_out, "Sentence file ({\"sentence\", \"label\"} per line)")->required();
  under->add_option("--seed", us_seed, "Sampling seed")->capture_default_str();

  std::string tr_in, tr_out, tr_ranker = "rougeL";
  std::size_t tr_limit = 2000;
  auto* triplets = app.add_subcommand("triplets", "Build (draft, cited, final) triplets from Edited sentences");
  triplets->add_option("-i,--input", tr_in, "Labeled record file with cited sentences")->required();
  triplets->add_option("-o,--output", tr_out, "Triplet file")->required();
  triplets->add_option("--limit", tr_limit, "Maximum triplets")->capture_default_str();
  triplets->add_option("--ranker", tr_ranker,
                       "Cited-sentence ranker: metric name or external:DIR of <id>.txt matrices")
      ->capture_default_str();

  std::string chi_table, chi_entailment, chi_gold;
  auto* chi2 = app.add_subcommand("chi2", "Chi-squared test of independence");
  chi2->add_option("--table", chi_table, "Count table: one row of integers per line");
  chi2->add_option("--entailment", chi_entailment, "Entailment predictions (with --gold)");
  chi2->add_option("--gold", chi_gold, "Labeled record file (with --entailment)");

  std::string viz_in, viz_id, viz_out;
  auto* viz = app.add_subcommand("viz", "Emit a record's matches as a Graphviz bipartite graph");
  viz->add_option("-i,--input", viz_in, "Record file")->required();
  viz->add_option("--id", viz_id, "Record id")->required();
  viz->add_option("-o,--output", viz_out, "DOT file (standard output when omitted)");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    return app.exit(e, out, err);
  }

  try {
    if (*label) {
      const auto summary = stream_records(label_in, label_out, label_flags.resolve(),
                                          Rewrite::LabelsAndEdges, label_jobs, err);
      out << "{\"records\":" << summary.records << "," << label_counts_json(summary.counts) << "}\n";
    } else if (*match) {
      const auto summary =
          stream_records(match_in, match_out, match_flags.resolve(), Rewrite::EdgesOnly, match_jobs, err);
      out << "{\"records\":" << summary.records << ",\"edges\":" << summary.edges << "}\n";
    } else if (*eval_match) {
      const auto predicted = records_by_id(em_pred);
      const auto gold = records_by_id(em_gold);
      check_same_ids(predicted, gold);
      MatchCounts pooled;
      for (const auto& [id, g] : gold) {
        const auto& p = predicted.at(id);
        pooled += match_counts(p.edges.value_or(std::vector<SentenceEdge>{}),
                               g.edges.value_or(std::vector<SentenceEdge>{}));
      }
      const auto pr = precision_recall(pooled);
      out << "{\"precision\":" << real4(pr.precision) << ",\"recall\":" << real4(pr.recall)
          << ",\"f1\":" << real4(pr.f1) << "}\n";
    } else if (*eval_labels) {
      const auto gold = records_by_id(el_gold);
      std::vector<EditLabel> pred_all, gold_all;
      if (el_entailment) {
        const auto entail = read_entailment(el_pred);
        for (const auto& [id, g] : gold) {
          auto it = entail.find(id);
          if (it == entail.end()) throw CommandError("id " + quote(id) + " is missing from the predicted file");
          const auto& gl = labels_of(g, "gold");
          if (it->second.size() != gl.size()) throw CommandError("id " + quote(id) + ": label counts differ");
          for (auto e : it->second) pred_all.push_back(entailment_to_edit(e));
          gold_all.insert(gold_all.end(), gl.begin(), gl.end());
        }
        for (const auto& [id, _] : entail) {
          if (!gold.count(id)) throw CommandError("id " + quote(id) + " is missing from the gold file");
        }
      } else {
        const auto predicted = records_by_id(el_pred);
        check_same_ids(predicted, gold);
        for (const auto& [id, g] : gold) {
          const auto& pl = labels_of(predicted.at(id), "predicted");
          const auto& gl = labels_of(g, "gold");
          if (pl.size() != gl.size()) throw CommandError("id " + quote(id) + ": label counts differ");
          pred_all.insert(pred_all.end(), pl.begin(), pl.end());
          gold_all.insert(gold_all.end(), gl.begin(), gl.end());
        }
      }
      const auto report = label_f1(pred_all, gold_all);
      out << "{\"weighted_f1\":" << real4(report.weighted_f1) << ",\"micro_f1\":" << real4(report.micro_f1)
          << ",\"macro_f1\":" << real4(report.macro_f1) << ",\"per_class_f1\":{\"keep\":"
          << real4(report.f1(EditLabel::Kept)) << ",\"edit\":" << real4(report.f1(EditLabel::Edited))
          << ",\"del\":" << real4(report.f1(EditLabel::Deleted)) << "}}\n";
    } else if (*stats) {
      const auto report = corpus_stats(load_records(stats_in));
      out << "{\"records\":" << report.records << ",\"sentences\":" << report.sentences
          << ",\"mean_sentences_per_record\":" << real4(report.mean_sentences_per_record)
          << ",\"counts\":{" << label_counts_json(report.counts) << "},\"fractions\":{\"keep\":"
          << real4(report.fractions[0]) << ",\"edit\":" << real4(report.fractions[1])
          << ",\"del\":" << real4(report.fractions[2]) << "}}\n";
    } else if (*split) {
      const auto splits = stratified_split(load_records(split_in), split_spec);
      fs::create_directories(split_dir);
      write_records(splits.train, fs::path(split_dir) / "train.jsonl");
      write_records(splits.validation, fs::path(split_dir) / "validation.jsonl");
      write_records(splits.test, fs::path(split_dir) / "test.jsonl");
      out << "{\"train\":" << splits.train.size() << ",\"validation\":" << splits.validation.size()
          << ",\"test\":" << splits.test.size() << "}\n";
    } else if (*under) {
      const auto sample = undersample(labeled_sentences(load_records(us_in)), us_seed);
      std::ofstream file = open_output(us_out);
      std::array<std::size_t, 3> counts{};
      for (const auto& example : sample) {
        file << format_labeled_sentence(example) << '\n';
        ++counts[static_cast<std::size_t>(example.label)];
      }
      out << "{" << label_counts_json(counts) << "}\n";
    } else if (*triplets) {
      ScorerSpec ranker;
      try {
        ranker = ScorerSpec::parse(tr_ranker);
      } catch (const std::exception& e) {
        throw CommandError(std::string("invalid --ranker: ") + e.what());
      }
      const auto built = build_triplets(load_records(tr_in), ranker, tr_limit);
      std::ofstream file = open_output(tr_out);
      for (const auto& t : built) file << format_triplet(t) << '\n';
      out << "{\"triplets\":" << built.size() << "}\n";
    } else if (*chi2) {
      ContingencyTable table;
      if (!chi_table.empty()) {
        require_readable(chi_table);
        std::ifstream in(chi_table);
        table = parse_contingency_table(in);
      } else if (!chi_entailment.empty() && !chi_gold.empty()) {
        const auto entail = read_entailment(chi_entailment);
        const auto gold = records_by_id(chi_gold);
        std::vector<EntailmentLabel> e_all;
        std::vector<EditLabel> g_all;
        for (const auto& [id, g] : gold) {
          auto it = entail.find(id);
          if (it == entail.end()) throw CommandError("id " + quote(id) + " has no entailment predictions");
          const auto& gl = labels_of(g, "gold");
          if (it->second.size() != gl.size()) throw CommandError("id " + quote(id) + ": label counts differ");
          e_all.insert(e_all.end(), it->second.begin(), it->second.end());
          g_all.insert(g_all.end(), gl.begin(), gl.end());
        }
        table = contingency_table(e_all, g_all);
      } else {
        throw CommandError("chi2 needs --table, or --entailment together with --gold");
      }
      const auto result = chi_squared_independence(table);
      out << "{\"statistic\":" << real4(result.statistic) << ",\"dof\":" << result.dof
          << ",\"p_value\":" << probability(result.p_value) << "}\n";
    } else if (*viz) {
      const auto records = load_records(viz_in);
      auto it = std::find_if(records.begin(), records.end(),
                             [&](const PatentRecord& r) { return r.id == viz_id; });
      if (it == records.end()) throw CommandError("unknown id " + quote(viz_id));
      const std::string dot = to_dot(*it);
      if (viz_out.empty() || viz_out == "-") {
        out << dot;
      } else {
        std::ofstream file = open_output(viz_out);
        file << dot;
      }
    }
  } catch (const std::exception& e) {
    err << "error: " << e.what() << '\n';
    return 1;
  }
  return 0;
}

int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  std::vector<const char*> argv{"claimalign"};
  for (const auto& a : args) argv.push_back(a.c_str());
  return run(static_cast<int>(argv.size()), argv.data(), out, err);
}

}  // namespace claimalign::cli
