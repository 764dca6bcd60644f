// Command-line front end: synth / train / detect / compensate / evaluate /
// pipeline. Exit codes: 0 ok, 1 usage, 2 data or validation, 3 numerical.

#include <charconv>
#include <cstdint>
#include <cstdio>
#include <ctime>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <map>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "shoutcomp/shoutcomp.hpp"

namespace fs = std::filesystem;
using namespace shoutcomp;

namespace {

std::string fmt(double v) {
  char buf[64];
  auto [ptr, ec] = std::to_chars(buf, buf + sizeof(buf), v);
  (void)ec;
  return std::string(buf, ptr);
}

std::string fmt3(double v) {
  char buf[64];
  std::snprintf(buf, sizeof(buf), "%.3f", v);
  return buf;
}

std::string timestamp_utc() {
  const std::time_t now = std::time(nullptr);
  char buf[32];
  std::tm tm_utc{};
  gmtime_r(&now, &tm_utc);
  std::strftime(buf, sizeof(buf), "%Y-%m-%dT%H:%M:%SZ", &tm_utc);
  return buf;
}

// Deterministic body under a timestamp-only header line.
struct RunLog {
  std::ostringstream body;

  void line(const std::string& s) { body << s << '\n'; }

  void write(const fs::path& dir) {
    std::ofstream out(dir / "run.log");
    if (!out) throw IoError("cannot open '" + (dir / "run.log").string() + "' for writing");
    out << "# started " << timestamp_utc() << '\n' << body.str();
  }
};

FileFormat resolve_format(const std::string& path, const std::string& flag) {
  return flag.empty() ? format_from_path(path) : format_from_string(flag);
}

char parse_delimiter(const std::string& s) {
  if (s.size() != 1)
    throw ValidationError("--delimiter must be a single character");
  return s[0];
}

std::vector<Condition> parse_conditions(const std::vector<std::string>& names) {
  std::vector<Condition> out;
  for (const auto& n : names) out.push_back(condition_from_string(n));
  if (out.empty()) throw ValidationError("no conditions requested");
  return out;
}

void ensure_out_dir(const std::string& dir) {
  std::error_code ec;
  fs::create_directories(dir, ec);
  if (ec || !fs::is_directory(dir))
    throw IoError("cannot create output directory '" + dir + "'");
}

std::string bias_filename(Technique t, const std::string& suffix) {
  return std::string("bias_") + to_string(t) + suffix + ".json";
}

struct SynthOptions {
  SynthConfig config;
  std::string out;
  std::string format;
};

int run_synth(const SynthOptions& o) {
  const Dataset ds = generate(o.config);
  save_dataset(ds, o.out, resolve_format(o.out, o.format));
  std::cout << "wrote " << ds.size() << " records to " << o.out << '\n';
  return 0;
}

struct TrainOptions {
  std::string data;
  std::string out;
  std::string technique;
  std::string format;
  std::string delimiter = "_";
  std::size_t k = 8;
  double l2 = 1e-4;
  std::uint64_t seed = 0;
  bool gender_dependent = false;
};

void log_em(RunLog& log, const std::string& name, const EmTrace& trace) {
  std::ostringstream ll;
  for (std::size_t i = 0; i < trace.log_likelihood.size(); ++i) {
    if (i) ll << ' ';
    ll << fmt(trace.log_likelihood[i]);
  }
  log.line(name + ": iterations=" + std::to_string(trace.log_likelihood.size()) +
           " reseeds=" + std::to_string(trace.reseeded_iterations.size()) +
           " final_ll=" +
           (trace.log_likelihood.empty() ? "n/a" : fmt(trace.log_likelihood.back())));
  log.line(name + " ll_trace: " + ll.str());
}

// Fits the GMMs and bias table for one training partition, logging the EM
// trajectories, and writes the model files with the given suffix.
void train_partition(const Dataset& train, const StereoPairs& pairs,
                     const TrainOptions& o, Technique technique,
                     const std::string& suffix, RunLog& log) {
  std::optional<DiagonalGmm> normal_gmm, shouted_gmm;
  if (technique != Technique::Splice) {
    auto vs = detail::domain_vectors(train, Domain::Normal);
    if (vs.empty()) throw ValidationError("no normal-domain training vectors" + suffix);
    auto fit = fit_em(vs, o.k, {}, o.seed);
    log_em(log, "normal_gmm" + suffix, fit.trace);
    normal_gmm = std::move(fit.gmm);
    save_model(*normal_gmm, (fs::path(o.out) / ("normal_gmm" + suffix + ".json")).string());
  }
  if (technique != Technique::Ratz) {
    auto vs = detail::domain_vectors(train, Domain::Shouted);
    if (vs.empty()) throw ValidationError("no shouted-domain training vectors" + suffix);
    auto fit = fit_em(vs, o.k, {}, o.seed);
    log_em(log, "shouted_gmm" + suffix, fit.trace);
    shouted_gmm = std::move(fit.gmm);
    save_model(*shouted_gmm, (fs::path(o.out) / ("shouted_gmm" + suffix + ".json")).string());
  }
  const std::string bias_path = (fs::path(o.out) / bias_filename(technique, suffix)).string();
  switch (technique) {
    case Technique::Ratz:
      save_model(train_ratz(pairs, *normal_gmm), bias_path);
      break;
    case Technique::Splice:
      save_model(train_splice(pairs, *shouted_gmm), bias_path);
      break;
    case Technique::Memlin:
      save_model(train_memlin(pairs, *normal_gmm, *shouted_gmm), bias_path);
      break;
  }
  log.line("wrote: " + bias_filename(technique, suffix));
}

int run_train(const TrainOptions& o) {
  const Technique technique = technique_from_string(o.technique);
  const char delim = parse_delimiter(o.delimiter);
  ensure_out_dir(o.out);
  const Dataset ds = load_dataset(o.data, resolve_format(o.data, o.format));

  RunLog log;
  log.line("command: train");
  log.line("technique: " + std::string(to_string(technique)) +
           " k=" + std::to_string(o.k) + " l2=" + fmt(o.l2) +
           " seed=" + std::to_string(o.seed) +
           " gender_dependent=" + (o.gender_dependent ? "true" : "false"));
  log.line("dataset: " + std::to_string(ds.size()) + " records, dim " +
           std::to_string(ds.dim));

  const StereoPairs pairs = align_stereo(ds, delim);
  log.line("stereo pairs: " + std::to_string(pairs.size()) + " (skipped keys: " +
           std::to_string(pairs.skipped_keys.size()) + ", ignored records: " +
           std::to_string(pairs.ignored_records) + ")");

  train_partition(ds, pairs, o, technique, "", log);
  if (o.gender_dependent) {
    for (Gender g : {Gender::Male, Gender::Female}) {
      Dataset part;
      part.dim = ds.dim;
      for (const auto& r : ds.records)
        if (r.gender == g) part.records.push_back(r);
      StereoPairs gpairs;
      gpairs.dim = pairs.dim;
      for (const auto& p : pairs.pairs)
        if (p.gender == g) gpairs.pairs.push_back(p);
      if (part.records.empty() || gpairs.pairs.empty()) {
        log.line(std::string("gender partition ") + to_string(g) +
                 ": no data, skipped");
        continue;
      }
      train_partition(part, gpairs, o, technique, std::string("_") + to_string(g), log);
    }
  }

  auto shouted = detail::domain_vectors(ds, Domain::Shouted);
  auto normal = detail::domain_vectors(ds, Domain::Normal);
  DetectorConfig dc;
  dc.l2 = o.l2;
  const LogisticModel detector = train_detector(shouted, normal, dc);
  save_model(detector, (fs::path(o.out) / "detector.json").string());
  std::size_t correct = 0;
  for (const auto& v : shouted)
    if (classify(detector, v) == Domain::Shouted) ++correct;
  for (const auto& v : normal)
    if (classify(detector, v) == Domain::Normal) ++correct;
  const double accuracy = double(correct) / double(shouted.size() + normal.size());
  log.line("detector: training accuracy " + fmt(accuracy) + " (" +
           std::to_string(shouted.size()) + " shouted, " +
           std::to_string(normal.size()) + " normal)");
  log.write(o.out);

  std::cout << "trained " << to_string(technique) << " models on " << pairs.size()
            << " stereo pairs; detector training accuracy " << fmt3(accuracy * 100.0)
            << "%\n"
            << "models written to " << o.out << '\n';
  return 0;
}

struct DetectOptions {
  std::string data;
  std::string model;
  std::string out;
  std::string format;
};

int run_detect(const DetectOptions& o) {
  const Dataset ds = load_dataset(o.data, resolve_format(o.data, o.format));
  const LogisticModel detector = load_detector(o.model);

  std::ostringstream csv;
  csv << "id,predicted,prob_shouted\n";
  std::vector<Domain> predicted;
  bool labeled = true;
  for (const auto& r : ds.records) {
    const Domain p = classify(detector, r.vector);
    predicted.push_back(p);
    if (r.domain == Domain::Unknown) labeled = false;
    csv << r.id << ',' << to_string(p) << ','
        << fmt(predict_shouted_prob(detector, r.vector)) << '\n';
  }
  if (o.out.empty()) {
    std::cout << csv.str();
  } else {
    std::ofstream out(o.out);
    if (!out) throw IoError("cannot open '" + o.out + "' for writing");
    out << csv.str();
    std::cout << "wrote predictions for " << ds.size() << " records to " << o.out
              << '\n';
  }
  if (labeled) {
    std::vector<Domain> actual;
    for (const auto& r : ds.records) actual.push_back(r.domain);
    const auto m = detector_metrics(predicted, actual);
    std::cout << "accuracy " << fmt3(m.accuracy * 100.0) << "% (shouted miss "
              << fmt3(m.shouted_miss_rate * 100.0) << "%, normal miss "
              << fmt3(m.normal_miss_rate * 100.0) << "%)\n";
  }
  return 0;
}

CompensationCore load_core(const fs::path& dir, Technique technique,
                           const std::string& suffix) {
  CompensationCore core;
  if (technique != Technique::Splice)
    core.normal_gmm = load_gmm((dir / ("normal_gmm" + suffix + ".json")).string());
  if (technique != Technique::Ratz)
    core.shouted_gmm = load_gmm((dir / ("shouted_gmm" + suffix + ".json")).string());
  const std::string bias = (dir / bias_filename(technique, suffix)).string();
  switch (technique) {
    case Technique::Ratz: core.table = load_ratz(bias); break;
    case Technique::Splice: core.table = load_splice(bias); break;
    case Technique::Memlin: core.table = load_memlin(bias); break;
  }
  return core;
}

CompensationModel load_compensation(const std::string& models_dir, Technique technique) {
  const fs::path dir(models_dir);
  CompensationModel model;
  model.technique = technique;
  model.base = load_core(dir, technique, "");
  for (Gender g : {Gender::Male, Gender::Female}) {
    const std::string suffix = std::string("_") + to_string(g);
    if (fs::exists(dir / bias_filename(technique, suffix)))
      model.gender_partition.emplace(g, load_core(dir, technique, suffix));
  }
  return model;
}

struct CompensateOptions {
  std::string data;
  std::string models;
  std::string technique;
  std::string gating = "oracle";
  std::string out;
  std::string format;
  std::string out_format;
};

int run_compensate(const CompensateOptions& o) {
  const GatingMode gating = gating_from_string(o.gating);
  const Dataset ds = load_dataset(o.data, resolve_format(o.data, o.format));

  Dataset result;
  std::size_t gated = 0;
  if (gating == GatingMode::None) {
    result = ds;
  } else {
    if (o.models.empty() || o.technique.empty())
      throw ValidationError("compensation requires --models and --technique");
    const Technique technique = technique_from_string(o.technique);
    const CompensationModel model = load_compensation(o.models, technique);
    std::optional<LogisticModel> detector;
    if (gating == GatingMode::Detected)
      detector = load_detector((fs::path(o.models) / "detector.json").string());
    result = compensate_dataset(model, detector, ds, gating);
    for (std::size_t i = 0; i < ds.size(); ++i)
      if (ds.records[i].vector != result.records[i].vector) ++gated;
  }
  save_dataset(result, o.out, resolve_format(o.out, o.out_format));
  std::cout << "compensated " << gated << " of " << ds.size() << " records into "
            << o.out << '\n';
  return 0;
}

struct EvaluateOptions {
  std::string data;
  std::string out;
  std::vector<std::string> conditions = {"aa", "nn", "ss", "ns"};
  bool gender_dependent = false;
  std::string format;
  // in-memory compensation of the input file
  std::string models;
  std::string technique;
  std::string gating = "detected";
  // end-to-end mode
  bool loso = false;
  bool all_techniques = false;
  std::size_t k = 8;
  double l2 = 1e-4;
  std::uint64_t seed = 0;
  std::string delimiter = "_";
};

struct TechniqueRun {
  std::string label;
  EvalReport report;
  std::optional<DetectorMetrics> detector;
};

void write_det_csv(const fs::path& path, const std::vector<DetPoint>& points) {
  std::ofstream out(path);
  if (!out) throw IoError("cannot open '" + path.string() + "' for writing");
  out << "threshold,far,frr\n";
  for (const auto& p : thin_det(points, 4001))
    out << fmt(p.threshold) << ',' << fmt(p.far) << ',' << fmt(p.frr) << '\n';
}

void emit_report(const fs::path& dir, const std::vector<TechniqueRun>& runs,
                 const std::vector<Condition>& conditions, RunLog& log) {
  const bool gendered = !runs.empty() && runs.front().report.gender_averaged;
  const std::string scope = gendered ? "gender_averaged" : "pooled";

  std::ofstream summary(dir / "summary.csv");
  if (!summary) throw IoError("cannot open summary.csv for writing");
  summary << "condition,scope";
  for (const auto& run : runs) summary << ',' << run.label;
  summary << '\n';
  for (std::size_t ci = 0; ci < conditions.size(); ++ci) {
    summary << condition_label(conditions[ci]) << ',' << scope;
    for (const auto& run : runs)
      summary << ',' << fmt(run.report.conditions[ci].overall.eer * 100.0);
    summary << '\n';
  }
  summary.close();
  log.line("wrote: summary.csv");

  for (const auto& run : runs)
    for (std::size_t ci = 0; ci < conditions.size(); ++ci) {
      const auto& cond = run.report.conditions[ci];
      const std::string stem =
          std::string("det_") + to_string(conditions[ci]) + "_" + run.label;
      if (gendered) {
        for (const auto& [gender, eval] : cond.per_gender) {
          const std::string name = stem + "_" + to_string(gender) + ".csv";
          write_det_csv(dir / name, eval.det);
          log.line("wrote: " + name);
        }
      } else {
        write_det_csv(dir / (stem + ".csv"), cond.overall.det);
        log.line("wrote: " + stem + ".csv");
      }
    }

  // Table mirrored on stdout.
  std::cout << "EER (%) by condition"
            << (gendered ? ", averaged across genders" : "") << '\n';
  std::cout << "condition";
  for (const auto& run : runs) std::cout << '\t' << run.label;
  std::cout << '\n';
  for (std::size_t ci = 0; ci < conditions.size(); ++ci) {
    std::cout << condition_label(conditions[ci]);
    for (const auto& run : runs)
      std::cout << '\t' << fmt3(run.report.conditions[ci].overall.eer * 100.0);
    std::cout << '\n';
  }
  for (const auto& run : runs) {
    for (std::size_t ci = 0; ci < conditions.size(); ++ci)
      log.line("[" + run.label + "] " + condition_label(conditions[ci]) +
               " eer_percent=" +
               fmt(run.report.conditions[ci].overall.eer * 100.0));
    if (run.detector) {
      const auto& m = *run.detector;
      const std::string line =
          "detector: accuracy " + fmt(m.accuracy) + " shouted_miss " +
          fmt(m.shouted_miss_rate) + " normal_miss " + fmt(m.normal_miss_rate) +
          " (" + std::to_string(m.n_shouted) + " shouted, " +
          std::to_string(m.n_normal) + " normal held-out)";
      log.line(line);
      std::cout << "detector accuracy " << fmt3(m.accuracy * 100.0)
                << "% (shouted miss " << fmt3(m.shouted_miss_rate * 100.0)
                << "%, normal miss " << fmt3(m.normal_miss_rate * 100.0) << "%)\n";
      break;  // folds are shared; one report covers every run
    }
  }
}

std::vector<TechniqueRun> run_loso_suite(const Dataset& ds, const EvaluateOptions& o,
                                         const std::vector<Condition>& conditions) {
  const GatingMode gating = gating_from_string(o.gating);
  LosoConfig base;
  base.gating = gating;
  base.k = o.k;
  base.detector.l2 = o.l2;
  base.seed = o.seed;
  base.delimiter = parse_delimiter(o.delimiter);
  base.gender_dependent = o.gender_dependent;
  base.conditions = conditions;

  std::vector<std::optional<Technique>> techniques = {std::nullopt};
  if (o.all_techniques) {
    techniques.push_back(Technique::Memlin);
    techniques.push_back(Technique::Ratz);
    techniques.push_back(Technique::Splice);
  } else if (!o.technique.empty()) {
    techniques.push_back(technique_from_string(o.technique));
  }

  std::vector<TechniqueRun> runs;
  for (const auto& technique : techniques) {
    LosoConfig cfg = base;
    cfg.technique = technique;
    const LosoResult result = loso_evaluate(ds, cfg);
    runs.push_back({technique ? to_string(*technique) : "baseline", result.report,
                    result.detector});
  }
  return runs;
}

int run_evaluate(const EvaluateOptions& o) {
  const auto conditions = parse_conditions(o.conditions);
  ensure_out_dir(o.out);
  const Dataset ds = load_dataset(o.data, resolve_format(o.data, o.format));

  RunLog log;
  log.line("command: evaluate");
  log.line("dataset: " + std::to_string(ds.size()) + " records, dim " +
           std::to_string(ds.dim));

  std::vector<TechniqueRun> runs;
  if (o.loso) {
    log.line("mode: loso gating=" + o.gating + " k=" + std::to_string(o.k) +
             " l2=" + fmt(o.l2) + " seed=" + std::to_string(o.seed));
    runs = run_loso_suite(ds, o, conditions);
  } else {
    runs.push_back({"baseline",
                    evaluate_dataset(ds, conditions, o.gender_dependent),
                    std::nullopt});
    if (!o.technique.empty()) {
      if (o.models.empty())
        throw ValidationError("--technique needs --models in direct evaluation");
      const Technique technique = technique_from_string(o.technique);
      const GatingMode gating = gating_from_string(o.gating);
      const CompensationModel model = load_compensation(o.models, technique);
      std::optional<LogisticModel> detector;
      if (gating == GatingMode::Detected)
        detector = load_detector((fs::path(o.models) / "detector.json").string());
      const Dataset compensated = compensate_dataset(model, detector, ds, gating);
      runs.push_back({to_string(technique),
                      evaluate_dataset(compensated, conditions, o.gender_dependent),
                      std::nullopt});
      log.line("mode: direct with " + o.technique + " models, gating=" + o.gating);
    } else {
      log.line("mode: direct");
    }
  }

  emit_report(o.out, runs, conditions, log);
  log.write(o.out);
  return 0;
}

struct PipelineOptions {
  SynthConfig synth;
  std::string out;
  EvaluateOptions eval;  // loso knobs reused; data/out filled here
};

int run_pipeline(PipelineOptions o) {
  ensure_out_dir(o.out);
  o.synth.seed = o.eval.seed;
  const Dataset ds = generate(o.synth);
  const std::string data_path = (fs::path(o.out) / "dataset.jsonl").string();
  save_dataset(ds, data_path, FileFormat::Jsonl);

  RunLog log;
  log.line("command: pipeline");
  log.line("synth: " + std::to_string(o.synth.n_speakers) + " speakers x " +
           std::to_string(o.synth.n_contents) + " contents, dim " +
           std::to_string(o.synth.dim) + ", shift clusters " +
           std::to_string(o.synth.n_shift_clusters) + ", shift magnitude " +
           fmt(o.synth.shift_magnitude));
  log.line("dataset: " + std::to_string(ds.size()) + " records -> dataset.jsonl");
  log.line("loso: gating=" + o.eval.gating + " k=" + std::to_string(o.eval.k) +
           " l2=" + fmt(o.eval.l2) + " seed=" + std::to_string(o.eval.seed) +
           " gender_dependent=" + (o.eval.gender_dependent ? "true" : "false"));

  const auto conditions = parse_conditions(o.eval.conditions);
  const auto runs = run_loso_suite(ds, o.eval, conditions);
  emit_report(o.out, runs, conditions, log);
  log.write(o.out);
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"shouted/normal vocal-effort detection and embedding compensation"};
  app.require_subcommand(1);
  app.set_config("--config", "", "read options from an INI/TOML file");
  app.set_version_flag("--version", "shoutcomp 1.0.0");

  const std::vector<std::string> technique_names = {"memlin", "ratz", "splice"};
  const std::vector<std::string> gating_names = {"oracle", "detected", "none"};
  const std::vector<std::string> condition_names = {"aa", "nn", "ss", "ns"};
  const std::vector<std::string> format_names = {"jsonl", "csv"};

  SynthOptions synth;
  auto* synth_cmd = app.add_subcommand("synth", "generate a synthetic stereo corpus");
  synth_cmd->add_option("--out", synth.out, "output dataset file")->required();
  synth_cmd->add_option("--format", synth.format, "output format")
      ->check(CLI::IsMember(format_names));
  synth_cmd->add_option("--n-speakers", synth.config.n_speakers, "speaker count");
  synth_cmd->add_option("--n-contents", synth.config.n_contents,
                        "contents per speaker per domain");
  synth_cmd->add_option("--dim", synth.config.dim, "embedding dimensionality");
  synth_cmd->add_option("--speaker-spread", synth.config.speaker_spread,
                        "speaker mean spread");
  synth_cmd->add_option("--noise", synth.config.within_speaker_noise,
                        "within-speaker noise");
  synth_cmd->add_option("--shift-clusters", synth.config.n_shift_clusters,
                        "number of shift clusters");
  synth_cmd->add_option("--shift-magnitude", synth.config.shift_magnitude,
                        "norm of each cluster shift");
  synth_cmd->add_option("--gender-offset", synth.config.gender_offset_magnitude,
                        "gender offset magnitude");
  synth_cmd->add_option("--seed", synth.config.seed, "generator seed");

  TrainOptions train;
  auto* train_cmd = app.add_subcommand("train", "train gmms, bias table and detector");
  train_cmd->add_option("--data", train.data, "training dataset")->required();
  train_cmd->add_option("--out", train.out, "output model directory")->required();
  train_cmd->add_option("--technique", train.technique, "compensation technique")
      ->required()
      ->check(CLI::IsMember(technique_names));
  train_cmd->add_option("--format", train.format, "input format")
      ->check(CLI::IsMember(format_names));
  train_cmd->add_option("--k", train.k, "gmm components per domain");
  train_cmd->add_option("--l2", train.l2, "detector l2 penalty");
  train_cmd->add_option("--seed", train.seed, "training seed");
  train_cmd->add_option("--delimiter", train.delimiter, "id field delimiter");
  train_cmd->add_flag("--gender-dependent", train.gender_dependent,
                      "also train per-gender models");

  DetectOptions detect;
  auto* detect_cmd = app.add_subcommand("detect", "classify embeddings as shouted/normal");
  detect_cmd->add_option("--data", detect.data, "dataset to classify")->required();
  detect_cmd->add_option("--model", detect.model, "detector model file")->required();
  detect_cmd->add_option("--out", detect.out, "prediction csv (stdout when omitted)");
  detect_cmd->add_option("--format", detect.format, "input format")
      ->check(CLI::IsMember(format_names));

  CompensateOptions comp;
  auto* comp_cmd = app.add_subcommand("compensate", "apply bias compensation to a dataset");
  comp_cmd->add_option("--data", comp.data, "input dataset")->required();
  comp_cmd->add_option("--out", comp.out, "output dataset file")->required();
  comp_cmd->add_option("--models", comp.models, "model directory from train");
  comp_cmd->add_option("--technique", comp.technique, "compensation technique")
      ->check(CLI::IsMember(technique_names));
  comp_cmd->add_option("--gating", comp.gating, "which records to compensate")
      ->check(CLI::IsMember(gating_names));
  comp_cmd->add_option("--format", comp.format, "input format")
      ->check(CLI::IsMember(format_names));
  comp_cmd->add_option("--out-format", comp.out_format, "output format")
      ->check(CLI::IsMember(format_names));

  EvaluateOptions eval;
  auto* eval_cmd = app.add_subcommand("evaluate", "score trials and report EER per condition");
  eval_cmd->add_option("--data", eval.data, "dataset to evaluate")->required();
  eval_cmd->add_option("--out", eval.out, "output directory")->required();
  eval_cmd->add_option("--condition", eval.conditions, "conditions to evaluate")
      ->delimiter(',')
      ->check(CLI::IsMember(condition_names));
  eval_cmd->add_option("--format", eval.format, "input format")
      ->check(CLI::IsMember(format_names));
  eval_cmd->add_flag("--gender-dependent", eval.gender_dependent,
                     "evaluate per gender and average");
  eval_cmd->add_option("--models", eval.models, "model directory for direct compensation");
  eval_cmd->add_option("--technique", eval.technique, "compensation technique")
      ->check(CLI::IsMember(technique_names));
  eval_cmd->add_option("--gating", eval.gating, "gating mode")
      ->check(CLI::IsMember(gating_names));
  eval_cmd->add_flag("--loso", eval.loso, "leave-one-speaker-out end-to-end mode");
  eval_cmd->add_flag("--all-techniques", eval.all_techniques,
                     "loso: evaluate memlin, ratz and splice");
  eval_cmd->add_option("--k", eval.k, "gmm components per domain");
  eval_cmd->add_option("--l2", eval.l2, "detector l2 penalty");
  eval_cmd->add_option("--seed", eval.seed, "training seed");
  eval_cmd->add_option("--delimiter", eval.delimiter, "id field delimiter");

  PipelineOptions pipe;
  pipe.eval.seed = 42;  // one seed drives both generation and training
  auto* pipe_cmd = app.add_subcommand(
      "pipeline", "synthesize a corpus and run the full loso experiment");
  pipe_cmd->add_option("--out", pipe.out, "output directory")->required();
  pipe_cmd->add_option("--n-speakers", pipe.synth.n_speakers, "speaker count");
  pipe_cmd->add_option("--n-contents", pipe.synth.n_contents,
                       "contents per speaker per domain");
  pipe_cmd->add_option("--dim", pipe.synth.dim, "embedding dimensionality");
  pipe_cmd->add_option("--speaker-spread", pipe.synth.speaker_spread,
                       "speaker mean spread");
  pipe_cmd->add_option("--noise", pipe.synth.within_speaker_noise,
                       "within-speaker noise");
  pipe_cmd->add_option("--shift-clusters", pipe.synth.n_shift_clusters,
                       "number of shift clusters");
  pipe_cmd->add_option("--shift-magnitude", pipe.synth.shift_magnitude,
                       "norm of each cluster shift");
  pipe_cmd->add_option("--gender-offset", pipe.synth.gender_offset_magnitude,
                       "gender offset magnitude");
  pipe_cmd->add_option("--condition", pipe.eval.conditions, "conditions to evaluate")
      ->delimiter(',')
      ->check(CLI::IsMember(condition_names));
  pipe_cmd->add_option("--technique", pipe.eval.technique, "single technique to evaluate")
      ->check(CLI::IsMember(technique_names));
  auto* pipe_all = pipe_cmd->add_flag("--all-techniques", pipe.eval.all_techniques,
                                      "evaluate memlin, ratz and splice");
  pipe_cmd->add_option("--gating", pipe.eval.gating, "gating mode")
      ->check(CLI::IsMember(gating_names));
  pipe_cmd->add_option("--k", pipe.eval.k, "gmm components per domain");
  pipe_cmd->add_option("--l2", pipe.eval.l2, "detector l2 penalty");
  pipe_cmd->add_option("--seed", pipe.eval.seed, "experiment seed");
  pipe_cmd->add_flag("--gender-dependent", pipe.eval.gender_dependent,
                     "gender-dependent compensation and averaging");

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForAllHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForVersion& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 1;
  }

  try {
    if (synth_cmd->parsed()) return run_synth(synth);
    if (train_cmd->parsed()) return run_train(train);
    if (detect_cmd->parsed()) return run_detect(detect);
    if (comp_cmd->parsed()) return run_compensate(comp);
    if (eval_cmd->parsed()) return run_evaluate(eval);
    if (pipe_cmd->parsed()) {
      if (!pipe_all->count() && pipe.eval.technique.empty())
        pipe.eval.all_techniques = true;
      return run_pipeline(pipe);
    }
    std::cerr << "error: no subcommand\n";
    return 1;
  } catch (const NumericError& e) {
    std::cerr << "numerical error: " << e.what() << '\n';
    return 3;
  } catch (const Error& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 2;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 2;
  }
  return 0;
}
