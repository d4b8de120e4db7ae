#include "pip/cli.hpp"

#include <chrono>
#include <fstream>
#include <iostream>
#include <set>

#include "pip/api.hpp"
#include "pip/campaigns.hpp"
#include "pip/error.hpp"
#include "pip/hunt.hpp"
#include "pip/monitor.hpp"
#include "pip/synth.hpp"
#include "pip/textnorm.hpp"
#include "pip/workspace.hpp"
// Eigen must be seen before httplib: <resolv.h> defines a `_res` macro.
#include "pip/osnsim_http.hpp"
#include "CLI11.hpp"

namespace pip {

namespace fs = std::filesystem;

namespace {

constexpr const char* kConfigName = "piptool.conf";

double seconds_since(std::chrono::steady_clock::time_point t0) {
  return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
}

std::vector<Post> stored_pips(const Store& store) {
  std::vector<Post> out;
  for (auto& p : store.posts()) {
    if (p.label && p.label->pip.is_pip) out.push_back(std::move(p));
  }
  return out;
}

struct Options {
  std::string config;
  std::string workspace;
  bool dry_run = false;

  // simulate
  std::string manifest;
  std::size_t reference = 0;
  std::size_t benign = 0;
  double advance = 0;
  bool ingest = false;
  bool serve = false;
  std::string host = "127.0.0.1";
  int port = -1;

  // hunt
  int rounds = 1;
  std::string seeds;

  // train / eval
  bool binary_only = false;
  bool multiclass = false;
  std::size_t kfold = 0;

  // extract-contacts
  bool intel = false;

  // revisit
  int cadence = 0;
  int ticks = 0;
  double offset_days = 0;

  // report
  std::string table;
  int max_days = 30;

  // label
  std::string path;
};

PipelineConfig effective_config(const Options& o) {
  PipelineConfig c;
  if (!o.config.empty()) {
    c = load_config(o.config);
  } else {
    const fs::path ws = o.workspace.empty() ? fs::path(".") : fs::path(o.workspace);
    if (fs::exists(ws / kConfigName)) c = load_config(ws / kConfigName);
  }
  if (!o.workspace.empty()) c.workspace = o.workspace;
  c.validate();
  return c;
}

Json manifest_summary(const sim::Simulator& sim) {
  std::size_t pips = 0;
  for (const auto& l : sim.corpus().labels) pips += l.is_pip ? 1 : 0;
  return {{"posts", sim.corpus().posts.size()},
          {"pips", pips},
          {"accounts", sim.corpus().accounts.size()},
          {"campaigns", sim.manifest().campaigns.size()},
          {"now", sim.now()}};
}

int cmd_simulate(Workspace& ws, const Options& o, std::ostream& out) {
  std::optional<sim::SimCorpusManifest> fresh;
  if (!o.manifest.empty()) {
    fresh = sim::load_manifest(o.manifest);
  } else if (o.reference > 0) {
    fresh = sim::reference_mix_manifest(o.reference, o.benign, ws.config().seed);
  }
  if (fresh) {
    ws.write_file(ws.manifest_path(), Json(*fresh).dump(2) + "\n");
    if (!ws.dry_run() && fs::exists(ws.clock_path())) fs::remove(ws.clock_path());
  }

  if (o.serve) {
    sim::SimCorpusManifest m = fresh ? *fresh : ws.manifest();
    if (ws.config().rate) m.rate_budget = *ws.config().rate;
    sim::Simulator simulator(m);
    sim::SimServer server(simulator);
    const int port = o.port >= 0 ? o.port : 8081;
    out << Json{{"serving", o.host + ":" + std::to_string(port)}}.dump() << std::endl;
    server.run(o.host, port);
    return 0;
  }

  std::unique_ptr<sim::Simulator> local;
  sim::Simulator* simulator = nullptr;
  if (fresh && ws.dry_run()) {
    local = std::make_unique<sim::Simulator>(*fresh);
    simulator = local.get();
  } else {
    ws.platform();
    simulator = ws.simulator();
    if (!simulator) fail(ErrorCode::PreconditionFailed, "simulate needs an in-process simulator (sim_url is set)");
  }
  if (o.advance < 0) fail(ErrorCode::PreconditionFailed, "--advance must be non-negative");
  if (o.advance > 0) simulator->advance(o.advance);
  ws.save_clock();

  Json summary = manifest_summary(*simulator);
  if (o.ingest) {
    // Ground-truth labels, for exercising the reports without classifier error.
    Store& store = ws.store();
    const auto& corpus = simulator->corpus();
    const Timestamp now = simulator->now();
    for (const auto& a : corpus.accounts) store.put_account(a);
    std::size_t stored = 0;
    for (std::size_t i = 0; i < corpus.posts.size(); ++i) {
      Post p = corpus.posts[i];
      p.crawled_at = std::max(now, p.created_at);
      PostLabel l;
      l.pip = {corpus.labels[i].is_pip, corpus.labels[i].is_pip ? 1.0 : 0.0};
      l.category = corpus.labels[i].category;
      l.labeler = "ground-truth";
      l.time = now;
      p.label = l;
      stored += store.insert_if_novel(p) ? 1 : 0;
    }
    summary["ingested"] = stored;
  }
  summary["manifest"] = ws.manifest_path().string();
  out << summary.dump() << '\n';
  return 0;
}

int cmd_hunt(Workspace& ws, const Options& o, std::ostream& out, std::ostream& err) {
  if (o.rounds < 1) fail(ErrorCode::PreconditionFailed, "--rounds must be at least 1");
  Store& store = ws.store();
  KeywordSet set = KeywordSet::load(store);
  if (set.size() == 0) {
    const fs::path seeds = o.seeds.empty() ? ws.seeds_path() : fs::path(o.seeds);
    if (!fs::exists(seeds)) fail(ErrorCode::PreconditionFailed, "no keywords stored and no seed file at " + seeds.string());
    for (auto& k : load_seed_keywords(seeds)) set.add(std::move(k));
    set.save(store);
  }
  const StoredClassifier model = ws.require_classifier();
  const HuntClassifier classifier = HuntClassifier::from(model.classifier);
  Platform& platform = ws.platform();

  int next_round = static_cast<int>(read_round_reports(ws.rounds_log()).size()) + 1;
  std::size_t total_new = 0;
  int ran = 0;
  for (int i = 0; i < o.rounds; ++i) {
    if (set.active_count() == 0) {
      err << "hunt: no active keyword left after " << ran << " round(s)\n";
      break;
    }
    HuntConfig config = ws.config().hunt;
    config.seed = ws.config().hunt.seed + static_cast<std::uint64_t>(next_round);
    const RoundReport report = run_round(next_round, set, platform, classifier, store, config);
    if (!ws.dry_run()) append_round_report(ws.rounds_log(), report);
    out << report.to_json().dump() << '\n';
    total_new += report.new_pips;
    ++ran;
    ++next_round;
  }
  err << "hunt: " << ran << " round(s), " << total_new << " new PIP(s), " << set.active_count()
      << " active keyword(s)\n";
  return 0;
}

int cmd_train(Workspace& ws, const Options& o, std::ostream& out) {
  const auto t0 = std::chrono::steady_clock::now();
  auto data = ws.training_data();
  if (o.binary_only) {
    for (auto& d : data) d.category.reset();
  }
  std::size_t pips = 0;
  for (const auto& d : data) pips += d.is_pip ? 1 : 0;
  StoredClassifier next;
  const auto previous = ws.load_classifier();
  next.version = previous ? previous->version + 1 : 1;
  next.classifier = TextClassifier::train(data, ws.config().train, ws.config().min_df);
  ws.save_classifier(next);

  const TaggerModel tagger = train_tagger(synth::generate_ner_corpus(ws.config().tagger_sentences, ws.config().seed));
  ws.save_tagger(tagger);

  out << Json{{"model_version", next.version},
              {"texts", data.size()},
              {"pips", pips},
              {"vocabulary", next.classifier.vocabulary().size()},
              {"category_model", next.classifier.has_category_model()},
              {"tagger_features", tagger.feature_count()},
              {"seconds", seconds_since(t0)}}
             .dump()
      << '\n';
  return 0;
}

int cmd_eval(Workspace& ws, const Options& o, std::ostream& out) {
  const auto t0 = std::chrono::steady_clock::now();
  const std::size_t k = o.kfold > 0 ? o.kfold : ws.config().kfold;
  const auto& cfg = ws.config();
  const auto corpus = sim::generate_corpus(sim::reference_mix_manifest(cfg.ground_truth_pips, cfg.ground_truth_benign, cfg.seed));
  std::vector<std::vector<std::string>> terms;
  terms.reserve(corpus.posts.size());
  for (const auto& p : corpus.posts) terms.push_back(feature_terms(tokenize(p.full_text())));
  const Vocabulary vocab = Vocabulary::fit(terms, cfg.min_df);
  std::vector<BinarySample> binary;
  std::vector<CategorySample> multi;
  for (std::size_t i = 0; i < corpus.posts.size(); ++i) {
    SparseVector x = vocab.transform(terms[i]);
    if (corpus.labels[i].is_pip && corpus.labels[i].category) multi.push_back({x, *corpus.labels[i].category});
    binary.push_back({std::move(x), corpus.labels[i].is_pip});
  }
  Json report = {{"posts", corpus.posts.size()}, {"kfold", k}};
  report["binary"] = cross_validate_binary(binary, k, cfg.train).to_json();
  if (!o.binary_only) report["multiclass"] = cross_validate_multiclass(multi, k, cfg.train).to_json();

  // Tagger on held-out synthetic sentences.
  const auto train = synth::generate_ner_corpus(cfg.tagger_sentences, cfg.seed);
  const auto test = synth::generate_ner_corpus(std::max<std::size_t>(cfg.tagger_sentences / 4, 100), cfg.seed + 1);
  const TaggerModel tagger = train_tagger(train);
  std::vector<std::vector<BioTag>> gold, predicted;
  for (const auto& s : test) {
    gold.push_back(s.tags);
    predicted.push_back(tagger.tag(s.text));
  }
  const SpanPrf ner = span_prf(gold, predicted);
  report["ner"] = {{"precision", ner.precision}, {"recall", ner.recall}, {"f1", ner.f1}, {"sentences", test.size()}};
  report["seconds"] = seconds_since(t0);
  ws.write_report("eval.json", report.dump(2) + "\n");
  out << report.dump() << '\n';
  return 0;
}

int cmd_extract(Workspace& ws, const Options& o, std::ostream& out, std::ostream& err) {
  Store& store = ws.store();
  const TaggerModel tagger = ws.tagger_or_default();
  Platform& platform = ws.platform();
  std::map<std::string, std::size_t> by_kind;
  std::vector<Contact> all;
  std::size_t posts = 0, accounts = 0, warnings = 0;
  std::set<std::string> authors;
  auto keep = [&](ContactExtraction&& ex) {
    for (const auto& w : ex.warnings) err << "extract-contacts: " << w << '\n';
    warnings += ex.warnings.size();
    for (auto& c : ex.contacts) {
      store.put_contact(c);
      ++by_kind[std::string(to_string(c.kind))];
      all.push_back(std::move(c));
    }
  };
  for (const Post& p : stored_pips(store)) {
    keep(extract_contacts(p, tagger, platform));
    authors.insert(p.author_id);
    ++posts;
  }
  for (const Account& a : store.accounts()) {
    const bool pip_profile = a.profile_label && a.profile_label->pip.is_pip;
    if (!pip_profile && !authors.count(a.id)) continue;
    keep(extract_contacts(a, tagger, platform));
    ++accounts;
  }
  Json summary = {{"posts", posts}, {"accounts", accounts}, {"contacts", all.size()},
                  {"by_kind", by_kind}, {"warnings", warnings}};
  if (o.intel) {
    std::vector<Contact> urls;
    for (const auto& c : all) {
      if (c.kind == ContactKind::URL) urls.push_back(c);
    }
    const auto enriched = enrich_threat(urls, platform);
    summary["urls_checked"] = enriched.size();
    if (!enriched.empty()) summary["alarm_rate"] = alarm_rate(enriched);
  }
  out << summary.dump() << '\n';
  return 0;
}

int cmd_cluster(Workspace& ws, std::ostream& out) {
  Store& store = ws.store();
  const auto records = pip_records(store);
  const PipGraph graph = build_graph(records);
  const auto campaigns = flood_fill(graph, pip_categories(records));
  save_campaigns(store, graph, campaigns);
  Json list = Json::array();
  for (const auto& c : campaigns) list.push_back(c.to_json());
  ws.write_report("campaigns.json", list.dump(2) + "\n");
  Json summary = campaign_stats(campaigns).to_json();
  summary["nodes"] = graph.nodes().size();
  summary["edges"] = graph.edges().size();
  out << summary.dump() << '\n';
  return 0;
}

std::vector<EvasionCohort> cohorts_of(Workspace& ws) {
  const auto pips = stored_pips(ws.store());
  if (pips.empty()) fail(ErrorCode::EmptyCohort, "store holds no PIP to monitor");
  return weekly_cohorts(pips, std::nullopt, ws.config().cohort_sample, ws.config().seed);
}

int cmd_revisit(Workspace& ws, const Options& o, std::ostream& out, std::ostream& err) {
  Store& store = ws.store();
  Platform& platform = ws.platform();
  RevisitPlan plan;
  plan.cadence_days = o.cadence > 0 ? o.cadence : ws.config().revisit_cadence_days;
  plan.ticks = o.ticks > 0 ? o.ticks : ws.config().revisit_ticks;
  if (o.offset_days < 0) fail(ErrorCode::PreconditionFailed, "--offset-days must be non-negative");
  plan.first_probe = platform.now() + static_cast<Timestamp>(o.offset_days * static_cast<double>(kSecondsPerDay));

  const auto cohorts = cohorts_of(ws);
  std::size_t probes = 0, warnings = 0;
  Json rows = Json::array();
  for (const auto& cohort : cohorts) {
    const RevisitResult r = schedule_revisits(cohort, platform, plan);
    for (const auto& rec : r.records) store.put_revisit(rec);
    if (!ws.dry_run()) append_revisits(ws.revisits_log(), r.records);
    for (const auto& w : r.warnings) err << "revisit: " << w << '\n';
    probes += r.records.size();
    warnings += r.warnings.size();
    rows.push_back({{"cohort", cohort.cohort_id}, {"size", cohort.post_ids.size()}, {"probes", r.records.size()}});
  }
  const Timestamp last = plan.first_probe + static_cast<Timestamp>(plan.ticks - 1) * plan.cadence_days * kSecondsPerDay;
  if (last > platform.now()) {
    platform.advance(static_cast<double>(last - platform.now()) / static_cast<double>(kSecondsPerDay));
  }
  ws.save_clock();
  out << Json{{"cohorts", rows}, {"probes", probes}, {"warnings", warnings}, {"first_probe", plan.first_probe},
              {"cadence_days", plan.cadence_days}, {"ticks", plan.ticks}, {"now", platform.now()}}
             .dump()
      << '\n';
  return 0;
}

int cmd_report(Workspace& ws, const Options& o, std::ostream& out) {
  Store& store = ws.store();
  std::string csv;
  if (o.table == "categories") {
    csv = categories_csv(corpus_report(store));
  } else if (o.table == "contacts") {
    csv = contacts_csv(corpus_report(store));
  } else if (o.table == "accounts") {
    csv = accounts_csv(corpus_report(store));
  } else if (o.table == "engagement") {
    csv = engagement_csv(engagement_curve(stored_pips(store), o.max_days));
  } else if (o.table == "evasion") {
    const auto records = store.revisits();
    if (records.empty()) fail(ErrorCode::NoProbeData, "no revisit recorded; run `revisit` first");
    std::set<Timestamp> days;
    for (const auto& r : records) days.insert(r.probe_time - r.probe_time % kSecondsPerDay);
    csv = evasion_csv(evasion_table(cohorts_of(ws), records, {days.begin(), days.end()}));
  } else if (o.table == "summary") {
    csv = corpus_report(store).to_json().dump(2) + "\n";
  }
  ws.write_report(o.table + (o.table == "summary" ? ".json" : ".csv"), csv);
  out << csv;
  return 0;
}

int cmd_serve(Workspace& ws, const Options& o, std::ostream& out) {
  ApiService api(ws);
  const int port = o.port >= 0 ? o.port : ws.config().api_port;
  out << Json{{"serving", o.host + ":" + std::to_string(port)}, {"model_version", api.model_version()}}.dump()
      << std::endl;
  api.run(o.host, port);
  return 0;
}

int cmd_label(Workspace& ws, bool do_export, const Options& o, std::ostream& out) {
  Store& store = ws.store();
  std::size_t n = 0;
  if (do_export) {
    if (ws.dry_run()) {
      n = store.size(Collection::Labels);
    } else {
      n = store.export_jsonl(Collection::Labels, o.path);
    }
  } else {
    n = store.import_jsonl(o.path);
  }
  out << Json{{do_export ? "exported" : "imported", n}, {"path", o.path}}.dump() << '\n';
  return 0;
}

}  // namespace

int cli_main(int argc, const char* const* argv, std::ostream& out, std::ostream& err) {
  Options o;
  CLI::App app{"Illicit promotion hunting pipeline", "piptool"};
  app.require_subcommand(1);
  app.add_option("--config", o.config, "Configuration file")->check(CLI::ExistingFile);
  app.add_option("--workspace", o.workspace, "Workspace directory (overrides the config)");
  app.add_flag("--dry-run", o.dry_run, "Work on a scratch copy; write nothing");

  auto* simulate = app.add_subcommand("simulate", "Install a manifest, advance the clock or serve the simulator");
  simulate->add_option("--manifest", o.manifest, "Manifest JSON")->check(CLI::ExistingFile);
  auto* reference = simulate->add_option("--reference", o.reference, "Generate a reference-mix manifest with N PIPs");
  simulate->add_option("--benign", o.benign, "Benign posts for --reference")->needs(reference);
  simulate->add_option("--advance", o.advance, "Days to move the clock forward");
  simulate->add_flag("--ingest", o.ingest, "Store every corpus post with its ground-truth label");
  auto* serve_flag = simulate->add_flag("--serve", o.serve, "Serve the simulator over HTTP");
  simulate->add_option("--port", o.port, "Port for --serve")->needs(serve_flag);
  simulate->add_option("--host", o.host, "Host for --serve")->needs(serve_flag);
  simulate->get_option("--reference")->excludes(simulate->get_option("--manifest"));

  auto* hunt = app.add_subcommand("hunt", "Run snowball rounds");
  hunt->add_option("--rounds", o.rounds, "Rounds to run")->required();
  hunt->add_option("--seeds", o.seeds, "Seed keyword file (first run only)");

  auto* train = app.add_subcommand("train", "Train the classifiers and the contact tagger");
  auto* bin = train->add_flag("--binary", o.binary_only, "Binary model only");
  train->add_flag("--multiclass", o.multiclass, "Binary and category models (default)")->excludes(bin);

  auto* eval = app.add_subcommand("eval", "Cross-validate on the synthetic ground truth");
  eval->add_option("--kfold", o.kfold, "Folds")->check(CLI::Range(2, 100));
  eval->add_flag("--binary", o.binary_only, "Skip the category model");

  auto* extract = app.add_subcommand("extract-contacts", "Extract contacts from stored PIPs and PIP accounts");
  extract->add_flag("--intel", o.intel, "Query the threat intelligence endpoint for URL contacts");

  auto* cluster = app.add_subcommand("cluster", "Build the PIP graph and flood-fill campaigns");

  auto* revisit = app.add_subcommand("revisit", "Probe weekly cohorts for availability");
  revisit->add_option("--cadence", o.cadence, "Days between probes")->check(CLI::PositiveNumber);
  revisit->add_option("--ticks", o.ticks, "Probes per post")->check(CLI::PositiveNumber);
  revisit->add_option("--offset-days", o.offset_days, "Days from now to the first probe");

  auto* report = app.add_subcommand("report", "Print a report table as CSV");
  report->add_option("--table", o.table, "Table")
      ->required()
      ->check(CLI::IsMember({"categories", "evasion", "contacts", "engagement", "accounts", "summary"}));
  report->add_option("--max-days", o.max_days, "Engagement horizon")->check(CLI::NonNegativeNumber);

  auto* serve = app.add_subcommand("serve", "Serve the analyst API");
  serve->add_option("--port", o.port, "Port");
  serve->add_option("--host", o.host, "Host");

  auto* label = app.add_subcommand("label", "Move labels in and out of the store");
  label->require_subcommand(1);
  auto* label_export = label->add_subcommand("export", "Write labels as JSONL");
  label_export->add_option("--out", o.path, "Output file")->required();
  auto* label_import = label->add_subcommand("import", "Read labels from JSONL");
  label_import->add_option("--in", o.path, "Input file")->required()->check(CLI::ExistingFile);

  auto* config = app.add_subcommand("config", "Print the effective configuration");

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp&) {
    out << app.help();
    return 0;
  } catch (const CLI::CallForAllHelp&) {
    out << app.help("", CLI::AppFormatMode::All);
    return 0;
  } catch (const CLI::ParseError& e) {
    err << "piptool: " << e.what() << "\n\n" << app.help();
    return 2;
  }

  try {
    const PipelineConfig cfg = effective_config(o);
    if (config->parsed()) {
      out << cfg.to_text();
      return 0;
    }
    Workspace ws(cfg, o.dry_run);
    if (simulate->parsed()) return cmd_simulate(ws, o, out);
    if (hunt->parsed()) return cmd_hunt(ws, o, out, err);
    if (train->parsed()) return cmd_train(ws, o, out);
    if (eval->parsed()) return cmd_eval(ws, o, out);
    if (extract->parsed()) return cmd_extract(ws, o, out, err);
    if (cluster->parsed()) return cmd_cluster(ws, out);
    if (revisit->parsed()) return cmd_revisit(ws, o, out, err);
    if (report->parsed()) return cmd_report(ws, o, out);
    if (serve->parsed()) return cmd_serve(ws, o, out);
    if (label_export->parsed()) return cmd_label(ws, true, o, out);
    if (label_import->parsed()) return cmd_label(ws, false, o, out);
  } catch (const ParseError& e) {
    err << "piptool: " << e.what() << '\n';
    return 1;
  } catch (const Error& e) {
    err << "piptool: " << to_string(e.code()) << ": " << e.what() << '\n';
    return 1;
  } catch (const std::exception& e) {
    err << "piptool: " << e.what() << '\n';
    return 1;
  }
  return 2;
}

}  // namespace pip
