// Copyright 2026 The reco Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

// reco: command-line front end.
//
// Exit codes: 0 success, 1 usage error, 2 data error, 3 fingerprint mismatch.

#include <CLI11.hpp>

#include <chrono>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iomanip>
#include <iostream>
#include <map>
#include <set>
#include <sstream>
#include <string>

#include "reco/catalog.hpp"
#include "reco/config.hpp"
#include "reco/evaluation.hpp"
#include "reco/gravity.hpp"
#include "reco/knn.hpp"
#include "reco/log.hpp"
#include "reco/ratings.hpp"
#include "reco/segments.hpp"
#include "reco/similarity.hpp"
#include "reco/synth.hpp"
#include "text.hpp"

namespace fs = std::filesystem;
using namespace reco;

namespace {

constexpr const char *kOutputRootEnv = "RECO_OUTPUT_ROOT";

struct Context {
  RunConfig config;
  bool quiet = false;

  int workers() const { return static_cast<int>(config.get_int("workers")); }

  fs::path output_dir() const {
    fs::path out = config.get("output");
    if (out.empty())
      out = ".";
    if (out.is_relative())
      if (const char *root = std::getenv(kOutputRootEnv); root && *root)
        out = fs::path(root) / out;
    fs::create_directories(out);
    return out;
  }

  void log(const std::string &msg) const {
    if (!quiet)
      std::cerr << "reco: " << msg << '\n';
  }

  std::string stamp() const { return "config=" + to_hex(config.hash()); }
};

std::ofstream open_out(const fs::path &p) {
  std::ofstream out(p);
  if (!out)
    throw DataError("cannot write " + p.string());
  return out;
}

void append_comment(const fs::path &p, const std::string &line) {
  std::ofstream out(p, std::ios::app);
  out << "# " << line << '\n';
}

void save_logs_stamped(const fs::path &p, const RatingsMatrix &m, const Context &ctx,
                       const std::string &inputs) {
  save_logs(p, m);
  append_comment(p, ctx.stamp() + " " + inputs);
}

std::string percent(double x) {
  std::ostringstream s;
  s << std::fixed << std::setprecision(1) << 100.0 * x << '%';
  return s.str();
}

void print_stats(std::ostream &out, const RatingsMatrix &m) {
  const LogStats s = describe(m);
  out << "logs=" << s.logs << '\n'
      << "users=" << s.users << '\n'
      << "items=" << s.items << '\n'
      << "sparsity=" << percent(s.sparsity) << '\n'
      << "mean_rating=" << text::format_double(s.global_mean) << '\n'
      << "ratings_per_user=" << text::format_double(s.ratings_per_user) << '\n'
      << "ratings_per_item=" << text::format_double(s.ratings_per_item) << '\n'
      << "fingerprint=" << to_hex(m.fingerprint()) << '\n';
}

void check_fingerprint(std::uint64_t model_fp, const RatingsMatrix &train, const std::string &what) {
  if (model_fp != train.fingerprint())
    throw FingerprintMismatch(what + " was trained on logs with fingerprint " + to_hex(model_fp) +
                              " but the train file has fingerprint " +
                              to_hex(train.fingerprint()) + "; refusing to evaluate");
}

CatalogFormat catalog_format(const RunConfig &c) {
  const std::string &f = c.get("data.catalog_format");
  if (f == "tsv")
    return CatalogFormat::Tsv;
  if (f == "movielens")
    return CatalogFormat::MovieLens;
  throw UsageError("data.catalog_format: expected tsv or movielens, got '" + f + "'");
}

ScoringMode scoring_mode(const RunConfig &c) {
  const std::string &m = c.get("knn.scoring");
  if (m == "mean-based")
    return ScoringMode::MeanBased;
  if (m == "mono-user")
    return ScoringMode::MonoUser;
  throw UsageError("knn.scoring: expected mean-based or mono-user, got '" + m + "'");
}

TopNRequest topn_request(const RunConfig &c) {
  TopNRequest r;
  r.n = static_cast<int>(c.get_int("eval.n"));
  r.max_seeds = static_cast<int>(c.get_int("topn.seeds"));
  r.candidates_per_seed = static_cast<int>(c.get_int("topn.candidates"));
  r.diversity = static_cast<int>(c.get_int("topn.diversity"));
  const std::string &tail = c.get("topn.tail");
  if (tail == "any")
    r.tail = TailMode::Any;
  else if (tail == "head")
    r.tail = TailMode::ShortHead;
  else if (tail == "long")
    r.tail = TailMode::LongTail;
  else
    throw UsageError("topn.tail: expected any, head or long");
  r.head_fraction = c.get_double("topn.head_fraction");
  const std::string &rec = c.get("topn.recency");
  if (rec == "any")
    r.recency = SeedRecency::Any;
  else if (rec == "recent")
    r.recency = SeedRecency::RecentFirst;
  else
    throw UsageError("topn.recency: expected any or recent");
  r.seed = c.get_u64("topn.seed");
  r.validate();
  return r;
}

// Id space of a similarity file when no train set is given.
std::shared_ptr<const IdMap> similarity_ids(const fs::path &p) {
  std::ifstream in(p);
  if (!in)
    throw DataError("cannot open " + p.string());
  std::vector<std::string> ids;
  std::string line;
  while (std::getline(in, line)) {
    if (line.empty() || line[0] == '#')
      continue;
    const auto f = text::split(line, "\t");
    if (f.size() >= 2) {
      ids.emplace_back(f[0]);
      ids.emplace_back(f[1]);
    }
  }
  return std::make_shared<IdMap>(IdMap::from_ids(std::move(ids)));
}

// ---------------------------------------------------------------------------
// Commands

int cmd_ingest(Context &ctx) {
  const RunConfig &c = ctx.config;
  if (!c.has_value("data.ratings"))
    throw UsageError("ingest needs --ratings");
  const RatingsMatrix m = load_logs(c.get("data.ratings"), c.scale(), c.format());
  const fs::path out = ctx.output_dir();
  save_logs_stamped(out / "ratings.tsv", m, ctx, "source=" + c.get("data.ratings"));
  if (c.has_value("data.catalog")) {
    const DescriptorCatalog cat = load_catalog(c.get("data.catalog"), catalog_format(c));
    auto f = open_out(out / "catalog.tsv");
    f << "# " << ctx.stamp() << " source=" << c.get("data.catalog") << '\n';
    write_catalog(f, cat);
  }
  auto summary = open_out(out / "summary.txt");
  summary << "# " << ctx.stamp() << '\n';
  print_stats(summary, m);
  print_stats(std::cout, m);
  return 0;
}

int cmd_split(Context &ctx) {
  const RunConfig &c = ctx.config;
  if (!c.has_value("data.ratings"))
    throw UsageError("split needs --ratings");
  const RatingsMatrix m = load_logs(c.get("data.ratings"), c.scale(), c.format());
  const std::uint64_t seed = c.get_u64("split.seed");
  const auto folds = c.get_int("split.folds");
  std::vector<Split> splits;
  if (folds > 1) {
    splits = kfold(m, static_cast<int>(folds), seed);
  } else {
    const std::string &mode = c.get("split.mode");
    if (mode != "per-user" && mode != "global")
      throw UsageError("split.mode: expected per-user or global");
    splits.push_back(split_train_test(m, c.get_double("split.test_fraction"), seed,
                                      mode == "global" ? SplitMode::Global : SplitMode::PerUser));
  }
  const fs::path out = ctx.output_dir();
  const std::string inputs = "source=" + to_hex(m.fingerprint());
  for (std::size_t k = 0; k < splits.size(); ++k) {
    const fs::path dir = out / ("fold-" + std::to_string(k));
    fs::create_directories(dir);
    save_logs_stamped(dir / "train.tsv", splits[k].train, ctx, inputs);
    save_logs_stamped(dir / "test.tsv", splits[k].test, ctx, inputs);
    std::cout << dir.string() << "\ttrain=" << splits[k].train.size()
              << "\ttest=" << splits[k].test.size() << '\n';
  }
  return 0;
}

GravityModel train_gravity_stamped(const Context &ctx, const RatingsMatrix &train) {
  const auto t0 = std::chrono::steady_clock::now();
  GravityModel g = train_gravity(train, ctx.config.gravity());
  g.config_hash = ctx.config.hash();
  ctx.log("gravity: " + std::to_string(g.curve.size()) + " epochs, best " +
          std::to_string(g.best_epoch) + ", " +
          text::format_double(std::chrono::duration<double>(std::chrono::steady_clock::now() - t0)
                                  .count()) +
          " s");
  return g;
}

void save_gravity_artifacts(const fs::path &dir, const GravityModel &g, const Context &ctx) {
  save_model(dir / "gravity.bin", g);
  auto txt = open_out(dir / "gravity.txt");
  export_model_text(txt, g);
  auto curve = open_out(dir / "curve.tsv");
  curve << "# " << ctx.stamp() << " train=" << to_hex(g.train_fingerprint) << '\n';
  curve << "epoch\ttrain_rmse\tvalidation_rmse\n";
  for (const EpochStats &s : g.curve)
    curve << s.epoch << '\t' << text::format_double(s.train_rmse) << '\t'
          << text::format_double(s.validation_rmse) << '\n';
}

int cmd_train_knn(Context &ctx, const std::string &train_path, bool emulated) {
  const RunConfig &c = ctx.config;
  const RatingsMatrix train = load_logs(train_path, c.scale());
  const fs::path out = ctx.output_dir();
  const auto t0 = std::chrono::steady_clock::now();
  SimilarityMatrix sm;
  const std::string &model = c.get("model");
  if (emulated || model == "emulated-knn") {
    const GravityModel g = train_gravity_stamped(ctx, train);
    save_gravity_artifacts(out, g, ctx);
    sm = factor_similarity_matrix(g, static_cast<int>(c.get_int("emulated.k")),
                                  parse_factor_measure(c.get("emulated.measure")), ctx.workers());
  } else {
    sm = knn_search(train, c.knn());
    if (c.has_value("data.catalog")) {
      const DescriptorCatalog cat = load_catalog(c.get("data.catalog"), catalog_format(c));
      const SimilarityMatrix thematic = knn_search(
          cat.as_matrix(train.item_ids()), {c.knn().k, SimilarityMeasure::Jaccard, ctx.workers()});
      sm = merge_matrices(sm, thematic, c.get_double("hybrid.w"), c.knn().k);
    }
  }
  sm.set_source_fingerprint(train.fingerprint());
  const fs::path file = out / "similarity.tsv";
  save_similarity(file, sm);
  append_comment(file, ctx.stamp() + " train=" + to_hex(train.fingerprint()));
  ctx.log("similarity: " + std::to_string(sm.size()) + " entries in " +
          text::format_double(
              std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count()) +
          " s");
  std::cout << file.string() << "\tfingerprint=" << to_hex(train.fingerprint()) << '\n';
  return 0;
}

int cmd_train_gravity(Context &ctx, const std::string &train_path) {
  const RatingsMatrix train = load_logs(train_path, ctx.config.scale());
  const GravityModel g = train_gravity_stamped(ctx, train);
  const fs::path out = ctx.output_dir();
  save_gravity_artifacts(out, g, ctx);
  std::cout << (out / "gravity.bin").string() << "\tfingerprint=" << to_hex(g.train_fingerprint)
            << '\n';
  return 0;
}

struct LoadedModel {
  std::unique_ptr<SimilarityMatrix> sm;
  std::unique_ptr<GravityModel> gravity;
  std::unique_ptr<Scorer> scorer;
};

LoadedModel load_scorer(const Context &ctx, const RatingsMatrix &train, const std::string &sim_path,
                        const std::string &gravity_path) {
  const RunConfig &c = ctx.config;
  const std::string &model = c.get("model");
  LoadedModel lm;
  if (model == "knn" || model == "emulated-knn" || model == "hybrid") {
    if (sim_path.empty())
      throw UsageError("model " + model + " needs --similarity");
    lm.sm = std::make_unique<SimilarityMatrix>(load_similarity(sim_path, train.item_ids()));
    check_fingerprint(lm.sm->source_fingerprint(), train, "similarity matrix " + sim_path);
    lm.scorer = std::make_unique<KnnScorer>(train, *lm.sm, scoring_mode(c), model);
  } else if (model == "gravity") {
    if (gravity_path.empty())
      throw UsageError("model gravity needs --gravity");
    GravityModel g = load_model(gravity_path);
    check_fingerprint(g.train_fingerprint, train, "factor model " + gravity_path);
    lm.gravity = std::make_unique<GravityModel>(
        reindex_model(g, train.user_ids(), train.item_ids()));
    lm.scorer = std::make_unique<GravityScorer>(*lm.gravity, train);
  } else if (model == "default") {
    lm.scorer = std::make_unique<DefaultScorer>(train);
  } else if (model == "random") {
    lm.scorer = std::make_unique<RandomScorer>(train.scale(), c.get_u64("random.seed"));
  } else {
    throw UsageError("unknown model '" + model + "'");
  }
  return lm;
}

int cmd_evaluate(Context &ctx, const std::string &train_path, const std::string &test_path,
                 const std::string &sim_path, const std::string &gravity_path, int fold) {
  RunConfig &c = ctx.config;
  auto [train, test] = load_split(train_path, test_path, c.scale());
  LoadedModel lm = load_scorer(ctx, train, sim_path, gravity_path);
  const SegmentGrid grid = compute_segments(train);
  EvalOptions opt;
  opt.workers = ctx.workers();
  opt.top_n = static_cast<int>(c.get_int("eval.n"));
  opt.segments = c.get_bool("eval.segments");
  const auto tasks = c.get_list("eval.tasks");
  auto wants = [&](const char *t) { return std::find(tasks.begin(), tasks.end(), t) != tasks.end(); };

  EvaluationReport rep;
  rep.model = c.get("model");
  rep.fold = fold;
  if (wants("decide") || wants("compare")) {
    ctx.log("scoring test logs");
    rep.append(evaluate_scoring(*lm.scorer, train, test, grid, opt));
  }
  if (wants("discover") || wants("explore")) {
    ctx.log("full-catalog Top-" + std::to_string(opt.top_n));
    rep.append(evaluate_discovery(*lm.scorer, train, test, grid, opt));
  }
  rep.meta["config_hash"] = to_hex(c.hash());
  rep.meta["train_fingerprint"] = to_hex(train.fingerprint());
  rep.meta["test_fingerprint"] = to_hex(test.fingerprint());
  rep.meta["segments.user_threshold"] = text::format_double(grid.user_threshold());
  rep.meta["segments.item_threshold"] = text::format_double(grid.item_threshold());

  const fs::path out = ctx.output_dir();
  {
    auto f = open_out(out / "report.txt");
    write_report_text(f, rep);
    f << "# resolved configuration\n";
    for (auto line : text::split(c.resolved(), "\n"))
      if (!line.empty())
        f << "config." << line << '\n';
  }
  {
    auto f = open_out(out / "records.csv");
    f << "# " << ctx.stamp() << " train=" << to_hex(train.fingerprint())
      << " test=" << to_hex(test.fingerprint()) << '\n';
    write_records_csv(f, std::span(&rep, 1));
  }
  for (const char *m : {"rmse-out", "rmse-in", "percent-compatible", "ndpm", "precision", "ami"})
    if (auto v = rep.get(m))
      std::cout << m << '=' << text::format_double(*v) << '\n';
  return 0;
}

int cmd_recommend(Context &ctx, const std::string &train_path, const std::string &user,
                  const std::string &sim_path, const std::string &gravity_path) {
  const RunConfig &c = ctx.config;
  const RatingsMatrix train = load_logs(train_path, c.scale());
  const auto u = train.users().find(user);
  const UserProfile profile = u ? UserProfile::from_matrix(train, *u) : UserProfile{};
  if (!u)
    warn("user '" + user + "' has no train logs; using the popularity list");
  const TopNRequest req = topn_request(c);

  std::vector<ScoredItem> list;
  std::unique_ptr<SimilarityMatrix> sm;
  std::unique_ptr<GravityModel> g;
  std::unique_ptr<Scorer> scorer;
  if (!gravity_path.empty()) {
    GravityModel loaded = load_model(gravity_path);
    check_fingerprint(loaded.train_fingerprint, train, "factor model " + gravity_path);
    g = std::make_unique<GravityModel>(reindex_model(loaded, train.user_ids(), train.item_ids()));
    scorer = std::make_unique<GravityScorer>(*g, train);
  }
  if (!sim_path.empty()) {
    sm = std::make_unique<SimilarityMatrix>(load_similarity(sim_path, train.item_ids()));
    check_fingerprint(sm->source_fingerprint(), train, "similarity matrix " + sim_path);
    if (!scorer)
      scorer = std::make_unique<KnnScorer>(train, *sm, scoring_mode(c));
  }
  if (!scorer)
    scorer = std::make_unique<DefaultScorer>(train);
  const Index uu = u.value_or(-1);
  ItemScorer score = [&](Index i) {
    return u ? scorer->predict(uu, i).value
             : default_predict(profile.view(), i, train, DefaultMode::Collaborative).value;
  };
  if (sm) {
    const TailSplit tails(train, req.head_fraction);
    list = recommend_top_n(profile, req, *sm, train, tails, score);
  } else {
    list = full_catalog_top_n(profile, req.n, score, train.n_items());
  }
  for (const ScoredItem &s : list)
    std::cout << train.items().name(s.item) << '\t' << text::format_double(s.score) << '\n';
  return 0;
}

int cmd_similar(Context &ctx, const std::string &sim_path, const std::string &train_path,
                const std::string &item, int n) {
  std::shared_ptr<const IdMap> ids = train_path.empty()
                                         ? similarity_ids(sim_path)
                                         : load_logs(train_path, ctx.config.scale()).item_ids();
  const SimilarityMatrix sm = load_similarity(sim_path, ids);
  const auto i = ids->find(item);
  if (!i) {
    warn("item '" + item + "' is not in the similarity matrix");
    return 0;
  }
  for (const Neighbor &nb : similar_items(*i, n, sm))
    std::cout << ids->name(nb.item) << '\t' << text::format_double(nb.weight) << '\n';
  return 0;
}

int cmd_coldstart(Context &ctx) {
  const RunConfig &c = ctx.config;
  if (!c.has_value("data.ratings") || !c.has_value("data.catalog"))
    throw UsageError("coldstart needs --ratings and --catalog");
  const RatingsMatrix logs = load_logs(c.get("data.ratings"), c.scale(), c.format());
  const DescriptorCatalog cat = load_catalog(c.get("data.catalog"), catalog_format(c));
  std::vector<Index> counts;
  for (const auto &s : c.get_list("coldstart.counts")) {
    const auto v = text::parse_int(s);
    if (!v || *v < 1)
      throw UsageError("coldstart.counts: bad entry '" + s + "'");
    counts.push_back(static_cast<Index>(*v));
  }
  if (counts.empty())
    counts = log_spaced_counts(logs.active_users());
  std::vector<ProfileRegime> regimes;
  const std::string &reg = c.get("coldstart.regime");
  if (reg == "long" || reg == "both")
    regimes.push_back(ProfileRegime::Long);
  if (reg == "short" || reg == "both")
    regimes.push_back(ProfileRegime::Short);
  if (regimes.empty())
    throw UsageError("coldstart.regime: expected long, short or both");
  const ColdStartMode modes[] = {ColdStartMode::Collaborative, ColdStartMode::Thematic,
                                 ColdStartMode::HybridLight};
  ColdStartOptions opt;
  opt.k = c.knn().k;
  opt.collaborative_measure = c.knn().measure;
  opt.seed = c.get_u64("coldstart.seed");
  opt.workers = ctx.workers();

  const fs::path file = ctx.output_dir() / "coldstart.tsv";
  auto out = open_out(file);
  out << "# " << ctx.stamp() << " logs=" << to_hex(logs.fingerprint()) << '\n';
  out << "users\tregime\tmode\trmse_in\trmse_out\n";
  for (ProfileRegime r : regimes) {
    const ColdStartCurve curve = cold_start_experiment(logs, cat, counts, r, modes, opt);
    for (const auto &p : curve.points) {
      std::ostringstream line;
      line << p.users << '\t' << to_string(p.regime) << '\t' << to_string(p.mode) << '\t'
           << (p.rmse_in ? text::format_double(*p.rmse_in) : "NA") << '\t'
           << text::format_double(p.rmse_out) << '\n';
      out << line.str();
      std::cout << line.str();
    }
  }
  return 0;
}

int cmd_report(Context &ctx, const std::vector<std::string> &files) {
  if (files.empty())
    throw UsageError("report needs at least one records file");
  std::vector<EvaluationReport> all;
  for (const auto &f : files) {
    std::ifstream in(f);
    if (!in)
      throw DataError("cannot open " + f);
    auto reps = read_records_csv(in, f);
    all.insert(all.end(), reps.begin(), reps.end());
  }
  const auto grid = winners_grid(all);
  const fs::path file = ctx.output_dir() / "winners.tsv";
  auto out = open_out(file);
  out << "# " << ctx.stamp() << '\n';
  write_winners_grid(out, grid);
  write_winners_grid(std::cout, grid);
  return 0;
}

int cmd_synth(Context &ctx, std::uint64_t seed, Index users, Index items) {
  SurrogateOptions o;
  o.seed = seed;
  if (users > 0)
    o.users = users;
  if (items > 0)
    o.items = items;
  const Surrogate s = make_surrogate(o);
  const RatingsMatrix m = build_matrix(s.logs, Scale{1, 5});
  const fs::path out = ctx.output_dir();
  save_logs_stamped(out / "ratings.tsv", m, ctx, "surrogate-seed=" + std::to_string(seed));
  auto cat = open_out(out / "catalog.tsv");
  cat << "# " << ctx.stamp() << " surrogate-seed=" << seed << '\n';
  write_catalog(cat, DescriptorCatalog::from_records(s.catalog));
  print_stats(std::cout, m);
  return 0;
}

} // namespace

int main(int argc, char **argv) {
  CLI::App app{"reco: item-item KNN and factor-model recommender with an offline evaluation "
               "harness"};
  app.require_subcommand(1);
  app.fallthrough();
  app.set_version_flag("--version", "reco 1.0");

  std::string config_path;
  std::vector<std::string> sets;
  std::map<std::string, std::string> overrides;
  bool quiet = false;
  app.add_option("--config", config_path, "Key-value configuration file");
  app.add_option("--set", sets, "Override a configuration key (key=value)")->take_all();
  app.add_flag("-q,--quiet", quiet, "Suppress progress and warnings");

  auto bind = [&](CLI::App *sub, const std::string &flag, const std::string &key,
                  const std::string &help) {
    return sub->add_option_function<std::string>(
        flag, [&overrides, key](const std::string &v) { overrides[key] = v; }, help);
  };
  auto common = [&](CLI::App *sub) {
    bind(sub, "-o,--output", "output", "Output directory (relative to $RECO_OUTPUT_ROOT if set)");
    bind(sub, "--workers", "workers", "Worker threads (0: all cores)");
    bind(sub, "--scale", "scale", "Rating scale a,b");
  };

  auto *ingest = app.add_subcommand("ingest", "Load a rating log file and store it canonically");
  common(ingest);
  bind(ingest, "--ratings", "data.ratings", "Rating logs");
  bind(ingest, "--format", "data.format", "tsv or movielens");
  bind(ingest, "--catalog", "data.catalog", "Descriptor catalog");
  bind(ingest, "--catalog-format", "data.catalog_format", "tsv or movielens");

  auto *split = app.add_subcommand("split", "Write train/test fold files");
  common(split);
  bind(split, "--ratings", "data.ratings", "Rating logs");
  bind(split, "--format", "data.format", "tsv or movielens");
  bind(split, "--test-fraction", "split.test_fraction", "Per-user test fraction");
  bind(split, "--folds", "split.folds", "k-fold split when > 1");
  bind(split, "--mode", "split.mode", "per-user or global");
  bind(split, "--seed", "split.seed", "Split seed");

  std::string train_path, test_path, sim_path, gravity_path, user, item;
  std::vector<std::string> record_files;
  int fold = 0, n_similar = 10;
  bool emulated = false;
  std::uint64_t synth_seed = 1;
  Index synth_users = 0, synth_items = 0;

  auto gravity_flags = [&](CLI::App *sub) {
    bind(sub, "--factors", "gravity.factors", "Factor count K");
    bind(sub, "--alpha", "gravity.alpha", "Learning rate");
    bind(sub, "--lambda", "gravity.lambda", "Regularization");
    bind(sub, "--max-epochs", "gravity.max_epochs", "Epoch limit");
    bind(sub, "--patience", "gravity.patience", "Successive validation increases before stop");
    bind(sub, "--wall-clock", "gravity.wall_clock", "Training time cap in seconds");
    bind(sub, "--validation-fraction", "gravity.validation_fraction", "Held-out share of train");
    bind(sub, "--gravity-seed", "gravity.seed", "Initialization and ordering seed");
  };

  auto *train_knn = app.add_subcommand("train-knn", "Build an item-item similarity matrix");
  common(train_knn);
  train_knn->add_option("--train", train_path, "Train logs")->required();
  bind(train_knn, "--measure", "knn.measure", "Similarity measure");
  bind(train_knn, "--k", "knn.k", "Neighbours per item");
  bind(train_knn, "--catalog", "data.catalog", "Descriptor catalog to merge (hybrid)");
  bind(train_knn, "--catalog-format", "data.catalog_format", "tsv or movielens");
  bind(train_knn, "--hybrid-w", "hybrid.w", "Weight of the collaborative matrix");
  train_knn->add_flag("--emulated", emulated, "Neighbours from a factor model's item vectors");
  bind(train_knn, "--emulated-k", "emulated.k", "Neighbours per item for --emulated");
  bind(train_knn, "--factor-measure", "emulated.measure", "pearson, cosine or neg-euclidean");
  gravity_flags(train_knn);

  auto *train_grav = app.add_subcommand("train-gravity", "Train a factor model");
  common(train_grav);
  train_grav->add_option("--train", train_path, "Train logs")->required();
  gravity_flags(train_grav);

  auto *evaluate = app.add_subcommand("evaluate", "Evaluate a model on a fold");
  common(evaluate);
  evaluate->add_option("--train", train_path, "Train logs")->required();
  evaluate->add_option("--test", test_path, "Test logs")->required();
  bind(evaluate, "--model", "model", "knn, gravity, default, random, emulated-knn or hybrid");
  evaluate->add_option("--similarity", sim_path, "Similarity matrix file");
  evaluate->add_option("--gravity", gravity_path, "Factor model file");
  evaluate->add_option("--fold", fold, "Fold number recorded in the report");
  bind(evaluate, "--scoring", "knn.scoring", "mean-based or mono-user");
  bind(evaluate, "--tasks", "eval.tasks", "Subset of decide,compare,discover,explore");
  bind(evaluate, "--n", "eval.n", "Top-N length");
  bind(evaluate, "--random-seed", "random.seed", "Seed of the random predictor");

  auto *recommend = app.add_subcommand("recommend", "Top-N list for one user");
  common(recommend);
  recommend->add_option("--train", train_path, "Train logs")->required();
  recommend->add_option("--user", user, "User id")->required();
  recommend->add_option("--similarity", sim_path, "Similarity matrix (seed-based Top-N)");
  recommend->add_option("--gravity", gravity_path, "Factor model used for scoring");
  bind(recommend, "--scoring", "knn.scoring", "mean-based or mono-user");
  bind(recommend, "--n", "eval.n", "List length N");
  bind(recommend, "--seeds", "topn.seeds", "Seed items G");
  bind(recommend, "--candidates", "topn.candidates", "Candidates per seed C");
  bind(recommend, "--diversity", "topn.diversity", "Diversity factor D");
  bind(recommend, "--tail", "topn.tail", "any, head or long");
  bind(recommend, "--recency", "topn.recency", "any or recent");
  bind(recommend, "--seed", "topn.seed", "Random seed");

  auto *similar = app.add_subcommand("similar", "Nearest items of one item");
  common(similar);
  similar->add_option("--similarity", sim_path, "Similarity matrix")->required();
  similar->add_option("--train", train_path, "Train logs giving the id space");
  similar->add_option("--item", item, "Item id")->required();
  similar->add_option("--n", n_similar, "List length");

  auto *coldstart = app.add_subcommand("coldstart", "Cold-start simulation");
  common(coldstart);
  bind(coldstart, "--ratings", "data.ratings", "Rating logs");
  bind(coldstart, "--format", "data.format", "tsv or movielens");
  bind(coldstart, "--catalog", "data.catalog", "Descriptor catalog");
  bind(coldstart, "--catalog-format", "data.catalog_format", "tsv or movielens");
  bind(coldstart, "--regime", "coldstart.regime", "long, short or both");
  bind(coldstart, "--counts", "coldstart.counts", "Comma-separated user counts");
  bind(coldstart, "--k", "knn.k", "Neighbours per item");
  bind(coldstart, "--seed", "coldstart.seed", "Sampling seed");

  auto *report = app.add_subcommand("report", "Winners grid over evaluation records");
  common(report);
  report->add_option("records", record_files, "records.csv files")->required();

  auto *synth = app.add_subcommand("synth", "Write a seeded synthetic data set");
  common(synth);
  synth->add_option("--seed", synth_seed, "Generator seed");
  synth->add_option("--users", synth_users, "User count");
  synth->add_option("--items", synth_items, "Item count");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError &e) {
    const int rc = app.exit(e);
    return rc == 0 ? 0 : 1;
  }

  Context ctx;
  ctx.quiet = quiet;
  if (quiet)
    set_warning_sink([](std::string_view) {});
  else
    set_warning_sink([](std::string_view m) { std::cerr << "reco: warning: " << m << '\n'; });
  try {
    if (!config_path.empty())
      ctx.config = RunConfig::load(config_path);
    for (const auto &[k, v] : overrides)
      ctx.config.set(k, v);
    for (const auto &s : sets) {
      const auto eq = s.find('=');
      if (eq == std::string::npos)
        throw UsageError("--set expects key=value, got '" + s + "'");
      ctx.config.set(s.substr(0, eq), s.substr(eq + 1));
    }
    ctx.config.validate();

    if (*ingest)
      return cmd_ingest(ctx);
    if (*split)
      return cmd_split(ctx);
    if (*train_knn)
      return cmd_train_knn(ctx, train_path, emulated);
    if (*train_grav)
      return cmd_train_gravity(ctx, train_path);
    if (*evaluate)
      return cmd_evaluate(ctx, train_path, test_path, sim_path, gravity_path, fold);
    if (*recommend)
      return cmd_recommend(ctx, train_path, user, sim_path, gravity_path);
    if (*similar)
      return cmd_similar(ctx, sim_path, train_path, item, n_similar);
    if (*coldstart)
      return cmd_coldstart(ctx);
    if (*report)
      return cmd_report(ctx, record_files);
    if (*synth)
      return cmd_synth(ctx, synth_seed, synth_users, synth_items);
  } catch (const FingerprintMismatch &e) {
    std::cerr << "reco: " << e.what() << '\n';
    return 3;
  } catch (const UsageError &e) {
    std::cerr << "reco: " << e.what() << '\n';
    return 1;
  } catch (const DataError &e) {
    std::cerr << "reco: " << e.what() << '\n';
    return 2;
  } catch (const std::exception &e) {
    std::cerr << "reco: " << e.what() << '\n';
    return 2;
  }
  return 1;
}
