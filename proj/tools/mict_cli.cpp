#include <cstdio>
#include <fstream>
#include <iostream>
#include <sstream>
#include <string>
#include <vector>

#include "CLI11.hpp"

#include "mict/errors.hpp"
#include "mict/io.hpp"
#include "mict/protocol.hpp"

namespace fs = std::filesystem;
using namespace mict;

namespace {

constexpr int kExitContract = 2;
constexpr int kExitNoDetection = 3;

struct Common {
  std::uint64_t seed = 1;
  std::string config;
  std::size_t chains = 0;  // 0 = from config
  std::size_t iters = 0;
  std::string kinematics;
  std::size_t threads = 1;
};

void add_common(CLI::App* cmd, Common& c) {
  cmd->add_option("--seed", c.seed, "Random seed")->capture_default_str();
  cmd->add_option("--config", c.config, "JSON config file")->check(CLI::ExistingFile);
  cmd->add_option("--chains", c.chains, "Independent chains per match")->check(CLI::PositiveNumber);
  cmd->add_option("--iters", c.iters, "Iterations per chain")->check(CLI::PositiveNumber);
  cmd->add_option("--kinematics", c.kinematics, "Kinematics JSON (default: nominal model)")
      ->check(CLI::ExistingFile);
  cmd->add_option("--threads", c.threads, "Worker threads")->check(CLI::PositiveNumber)->capture_default_str();
}

RunConfig load(const Common& c) {
  RunConfig cfg = c.config.empty() ? RunConfig{} : read_config(c.config);
  if (c.chains) cfg.match.chains = c.chains;
  if (c.iters) cfg.match.chain.iterations = c.iters;
  cfg.match.chain.seed = c.seed;
  cfg.sim.seed = c.seed;
  return cfg;
}

KinematicsModel kinematics(const Common& c) {
  return c.kinematics.empty() ? KinematicsModel::nominal() : read_kinematics(c.kinematics);
}

void save(const fs::path& path, const std::ostringstream& ss) { write_text(path, ss.str()); }

// Raster link relative to the directory holding the SVG, so overlays stay
// valid when the tree is moved.
std::string background_href(const fs::path& render, const fs::path& svg_dir) {
  if (!fs::exists(render)) return {};
  return fs::relative(fs::absolute(render), fs::absolute(svg_dir)).generic_string();
}

void make_dir(const fs::path& dir) {
  std::error_code ec;
  fs::create_directories(dir, ec);
  if (ec) fail(ErrorKind::Io, "cannot create " + dir.string());
}

std::vector<OrientedRectd> active_rects(const CandidacyGraph& g, const Labeling& l) {
  std::vector<OrientedRectd> out;
  for (std::size_t v = 0; v < g.size(); ++v)
    if (l[v] && g.vertex(v).target_rect) out.push_back(*g.vertex(v).target_rect);
  return out;
}

void write_assignment(std::ostream& os, const CandidacyGraph& g, const Labeling& l) {
  os << "vertex,part,template_index,target,appearance\n";
  for (std::size_t v = 0; v < g.size(); ++v) {
    if (!l[v]) continue;
    const Vertex& x = g.vertex(v);
    os << v << ',' << part_name(x.part) << ',' << x.template_index << ',';
    if (x.target) os << *x.target;
    os << ',' << x.appearance << '\n';
  }
}

int build_template_cmd(const Common& c, const std::vector<std::string>& refs, const std::string& out) {
  const RunConfig cfg = load(c);
  std::vector<ReferenceShot> shots;
  for (const auto& r : refs) shots.push_back(to_reference(read_bundle(r)));
  write_template(out, build_template(shots, cfg.build));
  return 0;
}

int match_cmd(const Common& c, const std::string& tmpl, const std::string& shot, const std::string& out) {
  const RunConfig cfg = load(c);
  const Template t = read_template(tmpl);
  const SceneBundle b = read_bundle(shot);
  const Scene scene = to_scene(b, cfg.build);
  make_dir(out);
  ShotMatch m;
  try {
    m = match_in_shot(t, scene, kinematics(c), cfg.match);
  } catch (const Error& e) {
    if (e.kind() != ErrorKind::NoLocalization) throw;
    write_text(fs::path(out) / "match.csv", "shot,detected,score,x0,y0,x1,y1\n" + b.id + ",0,,,,,\n");
    throw;
  }
  std::ostringstream ss;
  ss.precision(12);
  ss << "shot,detected,score,x0,y0,x1,y1\n"
     << b.id << ",1," << m.score << ',' << m.box.min().x() << ',' << m.box.min().y() << ',' << m.box.max().x()
     << ',' << m.box.max().y() << '\n';
  save(fs::path(out) / "match.csv", ss);

  std::ostringstream assignment;
  assignment.precision(12);
  write_assignment(assignment, m.graph, m.state.labeling);
  save(fs::path(out) / "assignment.csv", assignment);

  std::vector<OverlayBox> boxes{{m.box, "#d62728", "match"}};
  if (b.truth)
    for (const auto& p : b.truth->people) boxes.push_back({p.box, "#2ca02c", "id " + std::to_string(p.individual_id)});
  const std::string background = background_href(fs::path(shot) / "render.ppm", out);
  std::ostringstream svg;
  write_svg(svg, b.width, b.height, active_rects(m.graph, m.state.labeling), boxes, background);
  save(fs::path(out) / "overlay.svg", svg);
  return 0;
}

int rank_cmd(const Common& c, const std::string& tmpl, const std::vector<std::string>& gallery,
             const std::string& query, const std::string& out) {
  const RunConfig cfg = load(c);
  const Template t = read_template(tmpl);
  std::vector<Scene> scenes;
  for (const auto& g : gallery) scenes.push_back(to_scene(read_bundle(g), cfg.build));
  const RankedResult r = rank_gallery(t, scenes, kinematics(c), cfg.match, query);
  std::ostringstream ss;
  ss << "query,rank,gallery,score\n";
  write_ranking(ss, r);
  save(out, ss);
  return 0;
}

int simulate_cmd(const Common& c, const std::string& out, std::size_t individuals, std::size_t shots,
                 bool render) {
  RunConfig cfg = load(c);
  if (individuals) cfg.sim.n_individuals = individuals;
  if (shots) cfg.sim.shots_per_individual = shots;
  const ReidDataset d = simulate_reid(cfg.sim, localization_config(cfg.sim), render);
  make_dir(out);
  write_dataset(out, d);
  write_kinematics(fs::path(out) / "kinematics.json", fit_kinematics(d.annotations));
  write_text(fs::path(out) / "config.json", to_json(cfg).dump(1) + "\n");
  return 0;
}

int eval_cmd(const Common& c, const std::string& data, const std::string& out, bool overlays) {
  const RunConfig cfg = load(c);
  const ReidDataset d = read_dataset(data);
  const ReidReport rep = evaluate_reid(d.queries, kinematics(c), cfg.match, cfg.build, c.threads);
  make_dir(out);

  std::ostringstream cmc_csv, rank_csv, loc_csv;
  write_cmc(cmc_csv, rep.cmc);
  save(fs::path(out) / "cmc.csv", cmc_csv);
  rank_csv << "query,rank,gallery,score\n";
  for (const auto& r : rep.rankings) write_ranking(rank_csv, r);
  save(fs::path(out) / "rankings.csv", rank_csv);
  write_localization(loc_csv, rep.localization);
  save(fs::path(out) / "localization.csv", loc_csv);

  Json summary;
  summary["queries"] = d.queries.size();
  summary["rank1"] = rep.cmc.rates.empty() ? 0.0 : rep.cmc.rates[0];
  summary["localization_sampler"] = rep.sampler_rate;
  summary["localization_greedy"] = rep.greedy_rate;
  summary["localized_queries"] = rep.localization.size();
  write_text(fs::path(out) / "summary.json", summary.dump(1) + "\n");

  if (overlays) {
    make_dir(fs::path(out) / "overlays");
    for (std::size_t i = 0; i < rep.localization.size(); ++i) {
      const LocalizationRow& row = rep.localization[i];
      const ReidQuery* q = nullptr;
      for (const auto& x : d.queries)
        if (x.id == row.query_id) q = &x;
      std::vector<OverlayBox> boxes{{row.truth, "#2ca02c", "truth"}};
      if (row.greedy_box) boxes.push_back({*row.greedy_box, "#1f77b4", "greedy"});
      if (row.sampler_box) boxes.push_back({*row.sampler_box, "#d62728", "sampler"});
      const fs::path render = fs::path(data) / "queries" / row.query_id / "shot" / "render.ppm";
      std::ostringstream svg;
      write_svg(svg, q->shot->width, q->shot->height, {}, boxes,
                background_href(render, fs::path(out) / "overlays"));
      save(fs::path(out) / "overlays" / (row.query_id + ".svg"), svg);
    }
  }
  std::printf("rank-1 %.4f  localization sampler %.4f greedy %.4f\n", summary["rank1"].get<double>(),
              rep.sampler_rate, rep.greedy_rate);
  return 0;
}

int diagnose_cmd(const Common& c, const std::string& tmpl, const std::string& shot, const std::string& out) {
  const RunConfig cfg = load(c);
  const Template t = read_template(tmpl);
  const Scene scene = to_scene(read_bundle(shot), cfg.build);
  const CandidacyGraph g = build_graph(t, scene, kinematics(c), cfg.match.graph);
  make_dir(out);

  std::ostringstream graph_csv;
  write_graph(graph_csv, g);
  save(fs::path(out) / "graph.csv", graph_csv);

  ChainConfig chain = cfg.match.chain;
  chain.record_trace = true;
  std::ostringstream trace_csv;
  trace_csv << "chain,";
  ChainResult best;
  std::ostringstream body;
  for (std::size_t k = 0; k < cfg.match.chains; ++k) {
    ChainConfig local = chain;
    local.seed = k == 0 ? chain.seed : derive_seed(chain.seed, k);
    ChainResult r = run_chain(g, cfg.match.prior, local);
    std::ostringstream one;
    write_trace(one, r.trace);
    std::istringstream lines(one.str());
    std::string line;
    std::getline(lines, line);
    if (k == 0) trace_csv << line << '\n';
    while (std::getline(lines, line)) trace_csv << k << ',' << line << '\n';
    if (k == 0 || r.best_score > best.best_score) best = std::move(r);
  }
  save(fs::path(out) / "trace.csv", trace_csv);

  std::ostringstream breakdown;
  write_breakdown(breakdown, g, score_breakdown(g, best.best_state.labeling, cfg.match.prior));
  save(fs::path(out) / "breakdown.csv", breakdown);
  std::ostringstream assignment;
  assignment.precision(12);
  write_assignment(assignment, g, best.best_state.labeling);
  save(fs::path(out) / "assignment.csv", assignment);
  std::printf("vertices %zu  edges %zu  best %.6f  acceptance %.4f\n", g.size(), g.edges().size(),
              best.best_score, best.acceptance_rate);
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Multi-instance compositional template matching"};
  app.require_subcommand(1);
  Common common;

  auto* build = app.add_subcommand("build-template", "Build a template from reference shots");
  std::vector<std::string> refs;
  std::string out;
  build->add_option("--ref", refs, "Reference shot directory (repeatable)")->required()->check(CLI::ExistingDirectory);
  build->add_option("--out", out, "Template JSON to write")->required();
  add_common(build, common);

  auto* match = app.add_subcommand("match", "Localize a template in a shot");
  std::string tmpl, shot;
  match->add_option("--template", tmpl, "Template JSON")->required()->check(CLI::ExistingFile);
  match->add_option("--shot", shot, "Shot directory")->required()->check(CLI::ExistingDirectory);
  match->add_option("--out", out, "Output directory")->required();
  add_common(match, common);

  auto* rank = app.add_subcommand("rank", "Rank gallery shots against a template");
  std::vector<std::string> gallery;
  std::string query = "query";
  rank->add_option("--template", tmpl, "Template JSON")->required()->check(CLI::ExistingFile);
  rank->add_option("--gallery", gallery, "Gallery shot directory (repeatable)")->required()->check(CLI::ExistingDirectory);
  rank->add_option("--query-id", query, "Query id written to the table")->capture_default_str();
  rank->add_option("--out", out, "Ranking CSV to write")->required();
  add_common(rank, common);

  auto* simulate = app.add_subcommand("simulate", "Generate a synthetic re-identification dataset");
  std::size_t individuals = 0, shots = 0;
  bool render = false;
  simulate->add_option("--out", out, "Dataset directory")->required();
  simulate->add_option("--individuals", individuals, "Number of individuals")->check(CLI::PositiveNumber);
  simulate->add_option("--shots", shots, "Reference shots per individual")->check(CLI::PositiveNumber);
  simulate->add_flag("--render", render, "Also write a raster of each localization shot");
  add_common(simulate, common);

  auto* eval = app.add_subcommand("eval", "Run the ranking and localization protocol on a dataset");
  std::string data;
  bool overlays = false;
  eval->add_option("--data", data, "Dataset directory")->required()->check(CLI::ExistingDirectory);
  eval->add_option("--out", out, "Report directory")->required();
  eval->add_flag("--overlays", overlays, "Write an SVG per localization shot");
  add_common(eval, common);

  auto* diagnose = app.add_subcommand("diagnose", "Dump the candidacy graph, chain trace and score terms");
  diagnose->add_option("--template", tmpl, "Template JSON")->required()->check(CLI::ExistingFile);
  diagnose->add_option("--shot", shot, "Shot directory")->required()->check(CLI::ExistingDirectory);
  diagnose->add_option("--out", out, "Output directory")->required();
  add_common(diagnose, common);

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return kExitContract;
  }

  try {
    if (*build) return build_template_cmd(common, refs, out);
    if (*match) return match_cmd(common, tmpl, shot, out);
    if (*rank) return rank_cmd(common, tmpl, gallery, query, out);
    if (*simulate) return simulate_cmd(common, out, individuals, shots, render);
    if (*eval) return eval_cmd(common, data, out, overlays);
    if (*diagnose) return diagnose_cmd(common, tmpl, shot, out);
  } catch (const Error& e) {
    std::cerr << "mict: " << e.what() << '\n';
    return e.kind() == ErrorKind::NoLocalization ? kExitNoDetection : kExitContract;
  } catch (const std::exception& e) {
    std::cerr << "mict: " << e.what() << '\n';
    return 1;
  }
  return 0;
}
