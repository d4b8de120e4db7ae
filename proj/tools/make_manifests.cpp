// Writes the bundled simulator manifests into a directory.
//
//   make_manifests resources/manifests

#include <filesystem>
#include <fstream>
#include <iostream>

#include "pip/osnsim.hpp"

using namespace pip;

namespace {

sim::CampaignSpec campaign(std::string id, Category cat, Language lang, std::vector<std::string> tags,
                           sim::ContactSpec contact, std::size_t posts, std::size_t accounts) {
  sim::CampaignSpec c;
  c.id = std::move(id);
  c.category = cat;
  c.language = lang;
  c.n_posts = posts;
  c.n_accounts = accounts;
  c.hashtags = std::move(tags);
  c.contacts = {std::move(contact)};
  return c;
}

// Three campaigns; two share a hashtag so a seed on one reaches the other.
sim::SimCorpusManifest snowball() {
  sim::SimCorpusManifest m;
  m.seed = 31;
  m.campaigns = {
      campaign("gamble", Category::Gambling, Language::zh, {"百家乐代理", "bjl888", "luckyasia"},
               {ContactKind::WeChat, "bjl_agent01", sim::ContactStyle::Inline, {}}, 40, 3),
      campaign("pills", Category::IllegalDrug, Language::en, {"luckyasia", "pillshop24", "partypacks"},
               {ContactKind::Telegram, "pillplug", sim::ContactStyle::ImUrl, {}}, 40, 3),
      campaign("escort", Category::Pornography, Language::en, {"vegasgirls", "sincitydates"},
               {ContactKind::WhatsApp, "17025550123", sim::ContactStyle::ShortUrl, {}}, 40, 3),
  };
  m.benign.n_posts = 600;
  m.benign.n_accounts = 120;
  return m;
}

// Two accounts promoting one WeChat id.
sim::SimCorpusManifest cluster1() {
  sim::SimCorpusManifest m;
  m.seed = 5;
  auto c = campaign("cluster1", Category::Gambling, Language::zh, {"bjl888"},
                    {ContactKind::WeChat, "bjl_agent01", sim::ContactStyle::Inline, {}}, 12, 2);
  c.mention_share = 0.0;
  m.campaigns = {c};
  return m;
}

// One account per post, all posted on the first day; 60-day survival 0.90.
sim::SimCorpusManifest calibration() {
  sim::SimCorpusManifest m;
  m.seed = 5;
  m.span_days = 1;
  m.campaigns = {campaign("cohort", Category::IllegalDrug, Language::en, {"weed420"},
                          {ContactKind::Telegram, "plug_weed", sim::ContactStyle::ImUrl, {}}, 5000, 5000)};
  m.hazard = sim::HazardSpec::calibrated(0.90, 60.0);
  return m;
}

void write(const std::filesystem::path& path, const sim::SimCorpusManifest& m) {
  m.validate();
  std::ofstream(path) << Json(m).dump(2) << '\n';
  std::cout << path.string() << '\n';
}

}  // namespace

int main(int argc, char** argv) {
  if (argc != 2) {
    std::cerr << "usage: make_manifests <dir>\n";
    return 2;
  }
  const std::filesystem::path dir = argv[1];
  std::filesystem::create_directories(dir);
  write(dir / "reference_mix.json", sim::reference_mix_manifest(8408, 4773, 42));
  write(dir / "snowball.json", snowball());
  write(dir / "cluster1.json", cluster1());
  write(dir / "calibration.json", calibration());
  return 0;
}
