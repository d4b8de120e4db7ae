#include <doctest.h>

#include <atomic>
#include <filesystem>
#include <fstream>
#include <map>
#include <sstream>

#include <unistd.h>

#include "pip/cli.hpp"
#include "pip/hunt.hpp"
#include "pip/monitor.hpp"
#include "pip/osnsim.hpp"
#include "pip/store.hpp"
#include "pip/workspace.hpp"

using namespace pip;
namespace fs = std::filesystem;

namespace {

struct Run {
  int code = 0;
  std::string out;
  std::string err;
};

struct Fixture {
  fs::path dir;

  Fixture() {
    static std::atomic<int> counter{0};
    dir = fs::temp_directory_path() / ("pip-cli-" + std::to_string(::getpid()) + "-" + std::to_string(counter++));
    fs::remove_all(dir);
    fs::create_directories(dir);
    std::ofstream(dir / "piptool.conf") << "[train]\nground_truth_pips = 600\nground_truth_benign = 400\n"
                                           "tagger_sentences = 800\n";
    std::ofstream(dir / "seeds.txt") << "hashtag:bjl888\nhashtag:vegasgirls\n";
  }
  ~Fixture() { fs::remove_all(dir); }

  Run operator()(std::vector<std::string> args) const {
    args.insert(args.begin(), {"piptool", "--workspace", dir.string()});
    std::vector<const char*> argv;
    for (const auto& a : args) argv.push_back(a.c_str());
    std::ostringstream out, err;
    Run r;
    r.code = cli_main(static_cast<int>(argv.size()), argv.data(), out, err);
    r.out = out.str();
    r.err = err.str();
    return r;
  }

  fs::path manifest(const std::string& name, const sim::SimCorpusManifest& m) const {
    const fs::path p = dir / (name + ".json");
    std::ofstream(p) << Json(m).dump();
    return p;
  }
};

fs::path bundled(const std::string& name) { return fs::path(PIP_SOURCE_DIR) / "resources" / "manifests" / name; }

// Every file under the directory with its contents.
std::map<std::string, std::string> tree(const fs::path& dir) {
  std::map<std::string, std::string> out;
  for (const auto& e : fs::recursive_directory_iterator(dir)) {
    if (e.is_regular_file()) out[fs::relative(e.path(), dir).string()] = read_text(e.path());
  }
  return out;
}

std::vector<std::vector<std::string>> csv_rows(const std::string& csv) {
  std::vector<std::vector<std::string>> rows;
  std::istringstream in(csv);
  std::string line;
  while (std::getline(in, line)) {
    std::vector<std::string> cells;
    std::string cell;
    std::istringstream l(line);
    while (std::getline(l, cell, ',')) cells.push_back(cell);
    rows.push_back(cells);
  }
  return rows;
}

}  // namespace

TEST_CASE("usage errors exit 2") {
  Fixture cli;
  auto r = cli({"hunt", "--rounds", "1", "--bogus"});
  CHECK(r.code == 2);
  CHECK(r.err.find("--bogus") != std::string::npos);
  CHECK(r.err.find("Usage:") != std::string::npos);
  CHECK(cli({"frobnicate"}).code == 2);
  CHECK(cli({}).code == 2);
  CHECK(cli({"hunt"}).code == 2);
  CHECK(cli({"report", "--table", "nonsense"}).code == 2);
  CHECK(cli({"train", "--binary", "--multiclass"}).code == 2);
  CHECK(cli({"eval", "--kfold", "1"}).code == 2);
  CHECK(cli({"label"}).code == 2);
  const auto help = cli({"--help"});
  CHECK(help.code == 0);
  CHECK(help.out.find("simulate") != std::string::npos);
}

TEST_CASE("pipeline errors exit 1 with a diagnostic") {
  Fixture cli;
  auto r = cli({"hunt", "--rounds", "1"});
  CHECK(r.code == 1);
  CHECK(r.err.find("PreconditionFailed") != std::string::npos);
  r = cli({"report", "--table", "categories"});
  CHECK(r.code == 1);
  CHECK(r.err.find("EmptyStore") != std::string::npos);
  std::ofstream(cli.dir / "bad.conf") << "[hunt]\nrcp_threshold = much\n";
  r = cli({"--config", (cli.dir / "bad.conf").string(), "config"});
  CHECK(r.code == 1);
  CHECK(r.err.find("line 2") != std::string::npos);
}

TEST_CASE("config prints the effective configuration") {
  Fixture cli;
  const auto r = cli({"config"});
  REQUIRE(r.code == 0);
  const auto c = parse_config(r.out);
  CHECK(c.ground_truth_pips == 600);
  CHECK(c.workspace == cli.dir);
}

TEST_CASE("hunt --rounds 3 appends three round reports") {
  Fixture cli;
  REQUIRE(cli({"simulate", "--manifest", bundled("snowball.json").string()}).code == 0);
  REQUIRE(cli({"train"}).code == 0);
  const auto r = cli({"hunt", "--rounds", "3"});
  REQUIRE(r.code == 0);
  const auto reports = read_round_reports(cli.dir / "rounds.jsonl");
  REQUIRE(reports.size() == 3);
  for (int i = 0; i < 3; ++i) CHECK(reports[static_cast<std::size_t>(i)].round_id == i + 1);
  CHECK(reports[0].new_pips > 0);

  // continues numbering and stops once no keyword is active
  const auto more = cli({"hunt", "--rounds", "5"});
  REQUIRE(more.code == 0);
  const auto all = read_round_reports(cli.dir / "rounds.jsonl");
  CHECK(all.size() >= 4);
  CHECK(all[3].round_id == 4);
}

TEST_CASE("train and eval write versioned models and a report") {
  Fixture cli;
  auto r = cli({"train", "--binary"});
  REQUIRE(r.code == 0);
  CHECK(Json::parse(r.out).at("category_model") == false);
  r = cli({"train"});
  REQUIRE(r.code == 0);
  CHECK(Json::parse(r.out).at("model_version") == 2);
  CHECK(Json::parse(r.out).at("category_model") == true);
  Workspace ws(load_config(cli.dir / "piptool.conf"));
  CHECK(fs::exists(cli.dir / "models" / "tagger.json"));

  r = cli({"eval", "--kfold", "3"});
  REQUIRE(r.code == 0);
  const Json e = Json::parse(r.out);
  CHECK(e.at("kfold") == 3);
  CHECK(e.at("binary").at("precision").get<double>() > 0.8);
  CHECK(e.at("multiclass").contains("macro_precision"));
  CHECK(e.at("ner").at("f1").get<double>() > 0.8);
  CHECK(fs::exists(cli.dir / "reports" / "eval.json"));
}

TEST_CASE("categories report reproduces exact manifest shares") {
  Fixture cli;
  const auto m = sim::reference_mix_manifest(1100, 0, 3);
  REQUIRE(cli({"simulate", "--manifest", cli.manifest("mix", m).string(), "--ingest"}).code == 0);
  const auto r = cli({"report", "--table", "categories"});
  REQUIRE(r.code == 0);
  std::map<Category, std::size_t> planted;
  std::size_t total = 0;
  for (const auto& c : m.campaigns) {
    planted[c.category] += c.n_posts;
    total += c.n_posts;
  }
  const auto rows = csv_rows(r.out);
  REQUIRE(rows.size() == 12);
  CHECK(rows[0] == std::vector<std::string>{"Category", "PIPs", "% PIPs", "Share"});
  for (std::size_t i = 1; i < rows.size(); ++i) {
    const Category c = *parse_category(rows[i][0]);
    CHECK(std::stoul(rows[i][1]) == planted[c]);
    CHECK(std::stod(rows[i][3]) == static_cast<double>(planted[c]) / static_cast<double>(total));
  }
  CHECK(read_text(cli.dir / "reports" / "categories.csv") == r.out);
}

TEST_CASE("revisit then report --table evasion") {
  Fixture cli;
  auto m = sim::SimCorpusManifest{};
  m.seed = 4;
  m.span_days = 14;
  sim::CampaignSpec c;
  c.id = "drugs";
  c.category = Category::IllegalDrug;
  c.n_posts = 400;
  c.n_accounts = 200;
  c.hashtags = {"weed420"};
  c.contacts = {{ContactKind::Telegram, "plug_weed", sim::ContactStyle::ImUrl, {}}};
  m.campaigns = {c};
  m.hazard = sim::HazardSpec::calibrated(0.5, 60.0);
  REQUIRE(cli({"simulate", "--manifest", cli.manifest("drugs", m).string(), "--ingest"}).code == 0);
  CHECK(cli({"report", "--table", "evasion"}).code == 1);

  auto r = cli({"revisit", "--cadence", "14"});
  REQUIRE(r.code == 0);
  const Json j = Json::parse(r.out);
  CHECK(j.at("probes") == 1600);
  CHECK(j.at("cohorts").size() == 2);
  CHECK(read_revisits(cli.dir / "revisits.jsonl").size() == 1600);

  r = cli({"report", "--table", "evasion"});
  REQUIRE(r.code == 0);
  const auto rows = csv_rows(r.out);
  REQUIRE(rows.size() == 3);
  CHECK(rows[0] == std::vector<std::string>{"Group", "Tweeting Period", "RV-1", "RV-2", "RV-3", "RV-4"});
  CHECK(rows[1][0] == "PIP-1");
  CHECK(rows[1][1] == "2022-10-24..2022-10-30");
  CHECK(rows[2][1] == "2022-10-31..2022-11-06");
  for (std::size_t i = 1; i < rows.size(); ++i) {
    for (std::size_t k = 3; k < 6; ++k) CHECK(std::stod(rows[i][k]) <= std::stod(rows[i][k - 1]));
  }
  // the clock moved to the last probe
  const Json clock = Json::parse(read_text(cli.dir / "sim" / "clock.json"));
  CHECK(clock.at("now") == j.at("first_probe").get<Timestamp>() + 42 * kSecondsPerDay);
}

TEST_CASE("extract-contacts then cluster on the Cluster-1 fixture") {
  Fixture cli;
  REQUIRE(cli({"simulate", "--manifest", bundled("cluster1.json").string(), "--ingest"}).code == 0);
  auto r = cli({"extract-contacts", "--intel"});
  REQUIRE(r.code == 0);
  CHECK(Json::parse(r.out).at("by_kind").at("WeChat").get<int>() >= 12);
  r = cli({"cluster"});
  REQUIRE(r.code == 0);
  const Json s = Json::parse(r.out);
  CHECK(s.at("campaigns") == 1);
  CHECK(s.at("nodes") == 3);
  CHECK(s.at("edges") == 2);
  Store store(cli.dir / "store");
  CHECK(store.campaigns().size() == 1);
}

TEST_CASE("simulate advances and persists the clock") {
  Fixture cli;
  auto r = cli({"simulate", "--manifest", bundled("cluster1.json").string()});
  REQUIRE(r.code == 0);
  const Timestamp t0 = Json::parse(r.out).at("now");
  r = cli({"simulate", "--advance", "3"});
  REQUIRE(r.code == 0);
  CHECK(Json::parse(r.out).at("now") == t0 + 3 * kSecondsPerDay);
  r = cli({"simulate", "--advance", "0.5"});
  CHECK(Json::parse(r.out).at("now") == t0 + 3 * kSecondsPerDay + kSecondsPerDay / 2);
  // reinstalling a manifest resets the clock
  r = cli({"simulate", "--manifest", bundled("cluster1.json").string()});
  CHECK(Json::parse(r.out).at("now") == t0);
  CHECK(cli({"simulate", "--advance", "-1"}).code == 1);
}

TEST_CASE("label export and import") {
  Fixture cli;
  REQUIRE(cli({"simulate", "--manifest", bundled("cluster1.json").string(), "--ingest"}).code == 0);
  const fs::path file = cli.dir / "labels.jsonl";
  {
    Store store(cli.dir / "store");
    const auto posts = store.posts();
    for (std::size_t i = 0; i < 4; ++i) {
      store.put_label({posts[i].id, true, Category::Gambling, "alice", 100, false});
    }
  }
  auto r = cli({"label", "export", "--out", file.string()});
  REQUIRE(r.code == 0);
  CHECK(Json::parse(r.out).at("exported") == 4);

  Fixture other;
  REQUIRE(other({"simulate", "--manifest", bundled("cluster1.json").string(), "--ingest"}).code == 0);
  r = other({"label", "import", "--in", file.string()});
  REQUIRE(r.code == 0);
  CHECK(Json::parse(r.out).at("imported") == 4);
  Store store(other.dir / "store");
  CHECK(store.labels().size() == 4);

  std::ofstream(cli.dir / "broken.jsonl") << "{\"oops\": 1}\n";
  CHECK(other({"label", "import", "--in", (cli.dir / "broken.jsonl").string()}).code == 1);
}

TEST_CASE("--dry-run leaves the workspace untouched") {
  Fixture cli;
  REQUIRE(cli({"simulate", "--manifest", bundled("snowball.json").string()}).code == 0);
  REQUIRE(cli({"train"}).code == 0);
  REQUIRE(cli({"hunt", "--rounds", "1"}).code == 0);
  std::ofstream(cli.dir / "labels.jsonl") << "";
  const auto before = tree(cli.dir);

  const std::vector<std::vector<std::string>> commands = {
      {"simulate", "--manifest", bundled("cluster1.json").string(), "--ingest"},
      {"simulate", "--advance", "10"},
      {"train"},
      {"hunt", "--rounds", "2"},
      {"extract-contacts"},
      {"cluster"},
      {"revisit", "--cadence", "7"},
      {"report", "--table", "categories"},
      {"label", "export", "--out", (cli.dir / "out.jsonl").string()},
      {"label", "import", "--in", (cli.dir / "labels.jsonl").string()},
  };
  for (auto args : commands) {
    args.insert(args.begin(), "--dry-run");
    const auto r = cli(args);
    CHECK_MESSAGE(r.code == 0, args[1] << ": " << r.err);
  }
  CHECK(tree(cli.dir) == before);
}
