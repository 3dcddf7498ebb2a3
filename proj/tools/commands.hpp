#pragma once

// Subcommands of the poitour command-line tool.
//
// stdout carries machine-readable results only; diagnostics go to stderr.
// Exit codes: 0 success, 1 usage, 2 input parse, 3 insufficient data,
// 4 unresolvable entity.

#include <filesystem>
#include <fstream>
#include <iostream>
#include <set>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "poitour/poitour.hpp"

namespace poitour::cli {

namespace fs = std::filesystem;

enum ExitCode : int { kOk = 0, kUsage = 1, kParse = 2, kNoData = 3, kUnresolved = 4 };

struct HyperFlags {
  std::vector<std::string> model_kinds{"skipgram"};
  std::vector<int> dims{32};
  std::vector<int> windows{3};
  std::vector<int> epochs{50};
  double lr = 0.025;
  int negatives = 5;
  int min_count = 1;
  int ngram_min = 3;
  int ngram_max = 6;
  std::uint64_t buckets = 2'000'000;
  std::uint64_t seed = kDefaultSeed;

  void add_to(CLI::App& app, bool lists) {
    auto* kind = app.add_option("--model-kind", model_kinds, "skipgram | cbow | fasttext_skipgram | fasttext_cbow");
    auto* dim = app.add_option("--dim", dims, "Vector dimensionality");
    auto* win = app.add_option("--window", windows, "Context window");
    auto* ep = app.add_option("--epochs", epochs, "Training epochs");
    for (auto* o : {kind, dim, win, ep}) {
      o->capture_default_str();
      if (lists) {
        o->delimiter(',');
      } else {
        o->expected(1);
      }
    }
    app.add_option("--lr", lr, "Initial learning rate")->capture_default_str();
    app.add_option("--negatives", negatives, "Negative samples per target")->capture_default_str();
    app.add_option("--min-count", min_count, "Minimum token frequency")->capture_default_str();
    app.add_option("--ngram-min", ngram_min, "Shortest subword n-gram")->capture_default_str();
    app.add_option("--ngram-max", ngram_max, "Longest subword n-gram")->capture_default_str();
    app.add_option("--buckets", buckets, "Subword hash buckets")->capture_default_str();
    app.add_option("--seed", seed, "Random seed")->capture_default_str();
  }

  HyperParams base() const {
    HyperParams hp;
    hp.model_kind = parse_model_kind(model_kinds.at(0));
    hp.dim = dims.at(0);
    hp.window = windows.at(0);
    hp.epochs = epochs.at(0);
    hp.learning_rate_initial = lr;
    hp.negative_samples = negatives;
    hp.min_count = min_count;
    hp.ngram_min = ngram_min;
    hp.ngram_max = ngram_max;
    hp.bucket_count = buckets;
    hp.seed = seed;
    return hp;
  }

  HyperGrid grid() const {
    HyperGrid g;
    g.model_kinds.clear();
    for (const auto& k : model_kinds) g.model_kinds.push_back(parse_model_kind(k));
    g.dims = dims;
    g.windows = windows;
    g.epochs = epochs;
    return g;
  }
};

struct Options {
  std::vector<std::string> visits;
  std::vector<std::string> pois;
  std::vector<std::string> archives;
  std::string model;
  std::string out;
  std::string start;
  std::string geojson;
  std::string itinerary;
  std::string stats;
  double budget = 0;
  double lambda = 0.5;
  double speed = geo::kDefaultWalkingSpeed;
  bool baseline = false;
  bool conventional = false;
  bool exclude_start = false;
  bool leaky = false;
  int threads = 1;
  bool verbose = false;
  HyperFlags hyper;
};

class Context {
 public:
  Context(std::ostream& out, std::ostream& err, bool verbose) : out_(out), err_(err), verbose_(verbose) {}
  std::ostream& out() { return out_; }
  std::ostream& err() { return err_; }
  void log(const std::string& msg) {
    if (verbose_) err_ << "[poitour] " << msg << '\n';
  }

 private:
  std::ostream& out_;
  std::ostream& err_;
  bool verbose_;
};

inline std::ifstream open_input(const std::string& path) {
  if (!fs::exists(path)) throw ParseError("input file not found: " + path);
  std::ifstream in(path, std::ios::binary);
  if (!in) throw ParseError("cannot open input file: " + path);
  return in;
}

inline std::ofstream open_output(const fs::path& path) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw Error("cannot open output file: " + path.string());
  return out;
}

template <class Fn>
auto with_file_context(const std::string& path, Fn&& fn) {
  try {
    return fn();
  } catch (const ParseError& e) {
    throw ParseError(path + ": " + e.what());
  }
}

inline PoiTable read_poi_file(const std::string& path) {
  auto in = open_input(path);
  return with_file_context(path, [&] { return parse_pois(in); });
}

inline std::vector<Trajectory> read_archive_file(const std::string& path) {
  auto in = open_input(path);
  return with_file_context(path, [&] { return read_archive(in); });
}

inline fs::path stats_path_for(const std::string& archive) { return fs::path(archive + ".stats"); }

inline PoiStatsMap read_stats_file(const std::string& path) {
  auto in = open_input(path);
  return with_file_context(path, [&] { return read_stats(in); });
}

inline int cmd_ingest(const Options& o, Context& ctx) {
  if (o.visits.size() != o.pois.size()) throw ConfigError("--visits and --pois must be given the same number of times");
  const bool multi = o.visits.size() > 1;
  if (multi) fs::create_directories(o.out);
  std::set<std::string> users;
  std::size_t records = 0, trajectories = 0, pois = 0, dropped = 0;
  for (std::size_t c = 0; c < o.visits.size(); ++c) {
    const auto table = read_poi_file(o.pois[c]);
    auto in = open_input(o.visits[c]);
    auto raw = with_file_context(o.visits[c], [&] { return parse_visits(in); });
    const auto result = ingest(std::move(raw), table);
    for (const auto& r : result.records) users.insert(r.user_id);
    records += result.records.size();
    trajectories += result.trajectories.size();
    pois += table.size();
    dropped += result.dropped_records;
    if (result.dropped_records) {
      ctx.err() << "warning: " << o.visits[c] << ": dropped " << result.dropped_records
                << " records with unknown poi_id\n";
    }
    const std::string archive =
        multi ? (fs::path(o.out) / (fs::path(o.visits[c]).stem().string() + ".archive")).string() : o.out;
    auto out = open_output(archive);
    write_archive(out, result.trajectories);
    auto stats = open_output(stats_path_for(archive));
    write_stats(stats, result.stats);
    ctx.log("wrote " + archive);
  }
  ctx.out() << "users=" << users.size() << " records=" << records << " trajectories=" << trajectories
            << " pois=" << pois << " cities=" << o.visits.size() << " dropped=" << dropped << '\n';
  return kOk;
}

inline int cmd_train(const Options& o, Context& ctx) {
  const HyperParams hp = o.hyper.base();
  hp.validate();
  const auto table = read_poi_file(o.pois.at(0));
  const auto trajectories = read_archive_file(o.archives.at(0));
  const auto corpus = build_corpus(trajectories, table);
  ctx.log("corpus: " + std::to_string(corpus.sentences.size()) + " sentences from " +
          std::to_string(corpus.n_users) + " users");
  TrainOptions opts;
  opts.threads = o.threads;
  opts.on_epoch = [&](int epoch, double loss) { ctx.log("epoch " + std::to_string(epoch) + " loss " + std::to_string(loss)); };
  const auto model = train(corpus, hp, opts);
  save_model(model, o.model);
  char buf[64];
  std::snprintf(buf, sizeof buf, "final_loss=%.6f", model.loss_history().back());
  ctx.out() << buf << '\n';
  return kOk;
}

inline int cmd_recommend(const Options& o, Context& ctx) {
  const auto table = read_poi_file(o.pois.at(0));
  PoiStatsMap stats;
  if (!o.stats.empty()) {
    stats = read_stats_file(o.stats);
  } else if (!o.archives.empty()) {
    stats = read_stats_file(stats_path_for(o.archives.front()).string());
  }
  RecommendationRequest req;
  req.start_poi_id = o.start;
  req.time_budget = o.budget;
  req.weights.past_penalty = o.lambda;
  req.weights.walking_speed = o.speed;
  req.weights.validate();
  if (!(req.time_budget > 0)) throw ConfigError("--budget-seconds must be positive");
  if (!table.contains(req.start_poi_id)) throw LookupError("unknown start POI: " + req.start_poi_id);

  Itinerary it;
  if (o.baseline) {
    it = baseline_popularity(req, table, stats);
  } else {
    if (o.model.empty()) throw ConfigError("--model is required unless --baseline is given");
    if (!fs::exists(o.model)) throw ParseError("input file not found: " + o.model);
    const auto model = with_file_context(o.model, [&] { return load_model(o.model); });
    it = recommend_itinerary(req, model, table, stats);
    if (it.excluded_candidates) {
      ctx.err() << "warning: " << it.excluded_candidates << " POIs excluded (no vector in model)\n";
    }
  }
  const auto line = itinerary_line(req, it);
  if (o.out.empty()) {
    ctx.out() << line << '\n';
  } else {
    auto out = open_output(o.out);
    out << line << '\n';
  }
  if (!o.geojson.empty()) {
    auto out = open_output(o.geojson);
    out << route_geojson(it, table).dump(2) << '\n';
  }
  return kOk;
}

inline int cmd_evaluate(const Options& o, Context& ctx) {
  if (o.archives.size() != o.pois.size()) throw ConfigError("--archive and --pois must be given the same number of times");
  ExperimentConfig cfg;
  cfg.grid = o.hyper.grid();
  cfg.base = o.hyper.base();
  cfg.weights.past_penalty = o.lambda;
  cfg.weights.walking_speed = o.speed;
  if (o.budget > 0) {
    cfg.budget_policy = BudgetPolicy::fixed;
    cfg.fixed_budget = o.budget;
  }
  cfg.exclude_start = o.exclude_start;
  cfg.conventional_metrics = o.conventional;
  cfg.leaky = o.leaky;
  cfg.threads = o.threads;
  cfg.validate();

  std::vector<CityData> cities;
  for (std::size_t c = 0; c < o.archives.size(); ++c) {
    CityData city;
    city.city = fs::path(o.archives[c]).stem().string();
    city.pois = read_poi_file(o.pois[c]);
    city.trajectories = read_archive_file(o.archives[c]);
    const auto sp = stats_path_for(o.archives[c]);
    if (fs::exists(sp)) {
      city.stats = read_stats_file(sp.string());
    } else {
      ctx.err() << "warning: " << sp.string() << " not found; photo counts treated as zero\n";
    }
    if (evaluable_trajectories(city.trajectories).size() < 2) {
      throw DataError(city.city + ": fewer than 2 trajectories with >= 3 visits");
    }
    cities.push_back(std::move(city));
  }
  const auto rows = run_sweep(cities, cfg);
  auto out = open_output(o.out);
  write_results(out, rows);
  char buf[64];
  for (const auto& b : best_per_city(rows)) {
    ctx.out() << "best city=" << b.city << " scorer=" << b.scorer;
    if (b.hyperparams) {
      ctx.out() << " model=" << to_string(b.hyperparams->model_kind) << " dim=" << b.hyperparams->dim
                << " window=" << b.hyperparams->window << " epochs=" << b.hyperparams->epochs;
    }
    std::snprintf(buf, sizeof buf, " avg_f1=%.4f", b.mean.f1);
    ctx.out() << buf << '\n';
  }
  return kOk;
}

inline int cmd_export_geojson(const Options& o, Context& ctx) {
  const auto table = read_poi_file(o.pois.at(0));
  std::string line;
  if (o.itinerary.empty() || o.itinerary == "-") {
    std::getline(std::cin, line);
  } else {
    auto in = open_input(o.itinerary);
    std::getline(in, line);
  }
  const auto it = parse_itinerary_record(line);
  const auto doc = route_geojson(it, table).dump(2);
  if (o.out.empty()) {
    ctx.out() << doc << '\n';
  } else {
    auto out = open_output(o.out);
    out << doc << '\n';
  }
  return kOk;
}

/// Parses `args` (without the program name) and runs the selected subcommand.
inline int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  CLI::App app{"Tour itinerary recommendation from POI embeddings", "poitour"};
  app.require_subcommand(1);
  Options o;

  auto* ingest_cmd = app.add_subcommand("ingest", "Build trajectories and POI statistics from photo visits");
  ingest_cmd->add_option("--visits", o.visits, "Visits file (repeat per city)")->required();
  ingest_cmd->add_option("--pois", o.pois, "POI table (repeat per city)")->required();
  ingest_cmd->add_option("--out", o.out, "Archive path (a directory when several cities are given)")->required();

  auto* train_cmd = app.add_subcommand("train", "Train POI embeddings from a trajectory archive");
  train_cmd->add_option("--archive", o.archives, "Trajectory archive")->required()->expected(1);
  train_cmd->add_option("--pois", o.pois, "POI table")->required()->expected(1);
  train_cmd->add_option("--model", o.model, "Output model path")->required();
  train_cmd->add_option("--threads", o.threads, "Worker threads (1 = deterministic)")->capture_default_str();
  o.hyper.add_to(*train_cmd, false);

  auto* rec_cmd = app.add_subcommand("recommend", "Recommend a time-budgeted itinerary");
  rec_cmd->add_option("--model", o.model, "Model file");
  rec_cmd->add_option("--pois", o.pois, "POI table")->required()->expected(1);
  rec_cmd->add_option("--archive", o.archives, "Archive whose .stats sidecar supplies POI statistics")->expected(1);
  rec_cmd->add_option("--stats", o.stats, "POI statistics file (overrides --archive)");
  rec_cmd->add_option("--start", o.start, "Start poi_id")->required();
  rec_cmd->add_option("--budget-seconds", o.budget, "Time budget in seconds")->required();
  rec_cmd->add_option("--lambda", o.lambda, "Past-POI similarity penalty")->capture_default_str();
  rec_cmd->add_option("--speed", o.speed, "Walking speed in m/s")->capture_default_str();
  rec_cmd->add_flag("--baseline", o.baseline, "Use the popularity baseline");
  rec_cmd->add_option("--geojson", o.geojson, "Also write the route as GeoJSON");
  rec_cmd->add_option("--out", o.out, "Write the itinerary record here instead of stdout");

  auto* eval_cmd = app.add_subcommand("evaluate", "Leave-one-out evaluation over a hyperparameter grid");
  eval_cmd->add_option("--archive", o.archives, "Trajectory archive (repeat per city)")->required();
  eval_cmd->add_option("--pois", o.pois, "POI table (repeat per city)")->required();
  eval_cmd->add_option("--out", o.out, "Results table path")->required();
  eval_cmd->add_option("--budget-seconds", o.budget, "Fixed budget (default: ground-truth elapsed time)");
  eval_cmd->add_option("--lambda", o.lambda, "Past-POI similarity penalty")->capture_default_str();
  eval_cmd->add_option("--speed", o.speed, "Walking speed in m/s")->capture_default_str();
  eval_cmd->add_flag("--conventional-metrics", o.conventional, "Swap the t_r/t_p denominators");
  eval_cmd->add_flag("--exclude-start", o.exclude_start, "Drop the start POI from both sets");
  eval_cmd->add_flag("--leaky", o.leaky, "Train once on all trajectories");
  eval_cmd->add_option("--threads", o.threads, "Parallel folds")->capture_default_str();
  o.hyper.add_to(*eval_cmd, true);

  auto* geo_cmd = app.add_subcommand("export-geojson", "Convert an itinerary record to GeoJSON");
  geo_cmd->add_option("itinerary", o.itinerary, "Itinerary record file ('-' or omitted for stdin)");
  geo_cmd->add_option("--pois", o.pois, "POI table")->required()->expected(1);
  geo_cmd->add_option("--out", o.out, "Output path (default stdout)");

  app.add_flag("-v,--verbose", o.verbose, "Diagnostics on stderr");

  std::vector<std::string> reversed(args.rbegin(), args.rend());
  try {
    app.parse(reversed);
  } catch (const CLI::CallForHelp&) {
    out << app.help();
    return kOk;
  } catch (const CLI::CallForAllHelp&) {
    out << app.help("", CLI::AppFormatMode::All);
    return kOk;
  } catch (const CLI::ParseError& e) {
    err << "usage error: " << e.what() << '\n' << "run with --help for usage\n";
    return kUsage;
  }

  Context ctx(out, err, o.verbose);
  try {
    if (*ingest_cmd) return cmd_ingest(o, ctx);
    if (*train_cmd) return cmd_train(o, ctx);
    if (*rec_cmd) return cmd_recommend(o, ctx);
    if (*eval_cmd) return cmd_evaluate(o, ctx);
    if (*geo_cmd) return cmd_export_geojson(o, ctx);
  } catch (const ConfigError& e) {
    err << "usage error: " << e.what() << '\n';
    return kUsage;
  } catch (const ParseError& e) {
    err << "parse error: " << e.what() << '\n';
    return kParse;
  } catch (const DataError& e) {
    err << "insufficient data: " << e.what() << '\n';
    return kNoData;
  } catch (const LookupError& e) {
    err << "not found: " << e.what() << '\n';
    return kUnresolved;
  } catch (const TrainingError& e) {
    err << "training failed: " << e.what() << '\n';
    return kUsage;
  } catch (const std::exception& e) {
    err << "error: " << e.what() << '\n';
    return kParse;
  }
  return kUsage;
}

}  // namespace poitour::cli
