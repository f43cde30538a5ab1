#include "mict/protocol.hpp"

#include <algorithm>
#include <atomic>
#include <exception>
#include <map>
#include <ostream>
#include <thread>

#include "mict/errors.hpp"

namespace mict {

namespace fs = std::filesystem;

namespace {

std::vector<PartProposal> flatten(const Scene& s) {
  std::vector<PartProposal> out;
  for (const auto& list : s.proposals) out.insert(out.end(), list.begin(), list.end());
  return out;
}

// Gallery and shot bundles carry no mask: the builder then keeps every
// proposal, false alarms included.
SceneBundle bundle_of(const SimScene& s) {
  SceneBundle b;
  b.id = s.scene.id;
  b.width = s.scene.width;
  b.height = s.scene.height;
  b.person_height = s.scene.person_height;
  b.proposals = flatten(s.scene);
  b.truth = s.truth;
  return b;
}

SceneBundle bundle_of(const ReferenceShot& r, double person_height) {
  SceneBundle b;
  b.id = r.id;
  b.width = r.width;
  b.height = r.height;
  b.person_height = person_height;
  b.proposals = r.proposals;
  b.mask = r.mask;
  return b;
}

// Runs f(0..n-1) on up to `threads` workers; the first exception in index
// order is rethrown.
template <typename F>
void for_each_index(std::size_t n, std::size_t threads, F&& f) {
  threads = std::max<std::size_t>(1, std::min(threads, n));
  std::vector<std::exception_ptr> errors(n);
  std::atomic<std::size_t> next{0};
  auto work = [&] {
    for (std::size_t i; (i = next.fetch_add(1)) < n;) {
      try {
        f(i);
      } catch (...) {
        errors[i] = std::current_exception();
      }
    }
  };
  if (threads == 1) {
    work();
  } else {
    std::vector<std::thread> pool;
    for (std::size_t t = 0; t < threads; ++t) pool.emplace_back(work);
    for (auto& t : pool) t.join();
  }
  for (const auto& e : errors)
    if (e) std::rethrow_exception(e);
}

void write_box(std::ostream& os, const std::optional<Boxd>& b) {
  if (b) os << b->min().x() << ',' << b->min().y() << ',' << b->max().x() << ',' << b->max().y();
  else os << ",,,";
}

}  // namespace

SimConfig localization_config(const SimConfig& cfg) {
  SimConfig out = cfg;
  out.confuser_similarity = 0.9;
  out.occlusion_rate = 0.3;
  return out;
}

ReidDataset simulate_reid(const SimConfig& cfg, const SimConfig& loc, bool render) {
  validate(cfg);
  validate(loc);
  const auto pop = generate_population(cfg);
  const std::size_t n = pop.size();
  ReidDataset out;

  std::vector<std::vector<SceneBundle>> refs(n);
  for (std::size_t i = 0; i < n; ++i) {
    Rng rng(derive_seed(cfg.seed, 1000 + i));
    for (std::size_t m = 0; m < cfg.shots_per_individual; ++m) {
      const SimReference r = generate_reference_shot(pop[i], rng, cfg, "r" + std::to_string(m));
      refs[i].push_back(bundle_of(r.shot, cfg.person_height));
      out.annotations.push_back(r.annotation);
    }
  }

  for (std::size_t i = 0; i < n; ++i) {
    ReidQuery q;
    q.id = "q" + std::to_string(i);
    q.individual = pop[i].id;
    q.references = refs[i];
    const std::uint64_t gallery_seed = derive_seed(derive_seed(cfg.seed, 5000), i);
    for (std::size_t j = 0; j < n; ++j) {
      Rng rng(derive_seed(gallery_seed, j));
      const Layout lay = side_by_side({j}, cfg);
      const SimScene s = generate_scene(pop, lay.placements, lay.width, lay.height, rng, cfg, &pop[i],
                                        "g" + std::to_string(j));
      q.gallery.push_back(bundle_of(s));
    }
    q.true_gallery_id = "g" + std::to_string(i);

    if (n >= 2) {
      Rng rng(derive_seed(derive_seed(cfg.seed, 9000), i));
      const std::size_t other = (i + 1) % n;
      const std::vector<std::size_t> who =
          rng.uniform() < 0.5 ? std::vector<std::size_t>{i, other} : std::vector<std::size_t>{other, i};
      const Layout lay = side_by_side(who, loc);
      const SimScene s = generate_scene(pop, lay.placements, lay.width, lay.height, rng, loc, &pop[i], "shot");
      q.shot = bundle_of(s);
      if (render) q.shot_render = render_scene(s, pop, rng, loc);
    }
    out.queries.push_back(std::move(q));
  }
  return out;
}

ReidReport evaluate_reid(const std::vector<ReidQuery>& queries, const KinematicsModel& km,
                         const MatchConfig& cfg, const BuildConfig& build, std::size_t threads) {
  if (queries.empty()) fail(ErrorKind::ContractViolation, "no queries");
  ReidReport out;
  out.rankings.resize(queries.size());
  std::vector<std::optional<LocalizationRow>> rows(queries.size());

  for_each_index(queries.size(), threads, [&](std::size_t qi) {
    const ReidQuery& q = queries[qi];
    std::vector<ReferenceShot> shots;
    for (const auto& r : q.references) shots.push_back(to_reference(r));
    const Template t = build_template(shots, build);
    MatchConfig qc = cfg;
    qc.chain.seed = derive_seed(cfg.chain.seed, qi);

    std::vector<Scene> gallery;
    for (const auto& g : q.gallery) gallery.push_back(to_scene(g, build));
    out.rankings[qi] = rank_gallery(t, gallery, km, qc, q.id);

    if (!q.shot) return;
    const PersonTruth* truth = q.shot->truth ? q.shot->truth->find(q.individual) : nullptr;
    if (truth == nullptr) fail(ErrorKind::ContractViolation, q.id + ": shot truth lacks the query individual");
    const Scene scene = to_scene(*q.shot, build);
    LocalizationRow row;
    row.query_id = q.id;
    row.truth = truth->box;
    try {
      const ShotMatch m = match_in_shot(t, scene, km, qc);
      row.sampler_box = m.box;
      row.score = m.score;
      row.sampler_ok = pascal_match(m.box, row.truth);
    } catch (const Error& e) {
      if (e.kind() != ErrorKind::NoLocalization) throw;
    }
    try {
      const GreedyMatch g = greedy_match(t, scene);
      row.greedy_box = g.box;
      row.greedy_ok = pascal_match(g.box, row.truth);
    } catch (const Error& e) {
      if (e.kind() != ErrorKind::NoLocalization) throw;
    }
    rows[qi] = row;
  });

  std::map<std::string, std::string> truth;
  for (const auto& q : queries) truth[q.id] = q.true_gallery_id;
  out.cmc = cmc(out.rankings, truth);

  std::size_t sampler = 0, greedy = 0;
  for (auto& r : rows) {
    if (!r) continue;
    sampler += r->sampler_ok;
    greedy += r->greedy_ok;
    out.localization.push_back(std::move(*r));
  }
  if (!out.localization.empty()) {
    out.sampler_rate = static_cast<double>(sampler) / out.localization.size();
    out.greedy_rate = static_cast<double>(greedy) / out.localization.size();
  }
  return out;
}

void write_localization(std::ostream& os, const std::vector<LocalizationRow>& rows) {
  os.precision(12);
  os << "query,score,sampler_ok,greedy_ok,sx0,sy0,sx1,sy1,gx0,gy0,gx1,gy1,tx0,ty0,tx1,ty1\n";
  for (const auto& r : rows) {
    os << r.query_id << ',';
    if (r.sampler_box) os << r.score;
    os << ',' << r.sampler_ok << ',' << r.greedy_ok << ',';
    write_box(os, r.sampler_box);
    os << ',';
    write_box(os, r.greedy_box);
    os << ',';
    write_box(os, r.truth);
    os << '\n';
  }
}

void write_dataset(const fs::path& dir, const ReidDataset& d) {
  Json manifest;
  manifest["format"] = "mict-reid";
  manifest["version"] = 1;
  Json list = Json::array();
  for (const auto& q : d.queries) {
    const fs::path qdir = dir / "queries" / q.id;
    Json jq;
    jq["id"] = q.id;
    jq["individual"] = q.individual;
    jq["true_gallery_id"] = q.true_gallery_id;
    Json refs = Json::array();
    for (const auto& r : q.references) {
      write_bundle(qdir / "references" / r.id, r);
      refs.push_back(r.id);
    }
    Json gallery = Json::array();
    for (const auto& g : q.gallery) {
      write_bundle(qdir / "gallery" / g.id, g);
      gallery.push_back(g.id);
    }
    jq["references"] = std::move(refs);
    jq["gallery"] = std::move(gallery);
    jq["shot"] = q.shot.has_value();
    if (q.shot) write_bundle(qdir / "shot", *q.shot, q.shot_render ? &*q.shot_render : nullptr);
    list.push_back(std::move(jq));
  }
  manifest["queries"] = std::move(list);
  write_text(dir / "manifest.json", manifest.dump(1) + "\n");
}

ReidDataset read_dataset(const fs::path& dir) {
  const Json manifest = read_json(dir / "manifest.json");
  if (manifest.value("format", std::string()) != "mict-reid")
    fail(ErrorKind::ContractViolation, (dir / "manifest.json").string() + " is not a re-id manifest");
  ReidDataset out;
  try {
    for (const auto& jq : manifest.at("queries")) {
      ReidQuery q;
      q.id = jq.at("id").get<std::string>();
      q.individual = jq.at("individual").get<int>();
      q.true_gallery_id = jq.at("true_gallery_id").get<std::string>();
      const fs::path qdir = dir / "queries" / q.id;
      for (const auto& r : jq.at("references")) q.references.push_back(read_bundle(qdir / "references" / r.get<std::string>()));
      for (const auto& g : jq.at("gallery")) q.gallery.push_back(read_bundle(qdir / "gallery" / g.get<std::string>()));
      if (jq.at("shot").get<bool>()) q.shot = read_bundle(qdir / "shot");
      out.queries.push_back(std::move(q));
    }
  } catch (const nlohmann::json::exception& e) {
    fail(ErrorKind::ContractViolation, "malformed manifest: " + std::string(e.what()));
  }
  return out;
}

}  // namespace mict
