#include "mict/io.hpp"

#include <fstream>
#include <functional>
#include <iomanip>
#include <map>
#include <sstream>

#include "mict/errors.hpp"

namespace mict {

namespace fs = std::filesystem;

namespace {

std::string read_file(const fs::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) fail(ErrorKind::Io, "cannot open " + path.string());
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

Part part_field(const Json& j) {
  const auto name = j.at("part").get<std::string>();
  const auto p = part_from_name(name);
  if (!p) fail(ErrorKind::InvalidProposal, "unknown part '" + name + "'");
  return *p;
}

template <typename T>
T field(const Json& j, const char* key) {
  if (!j.contains(key)) fail(ErrorKind::ContractViolation, std::string("missing field '") + key + "'");
  try {
    return j.at(key).get<T>();
  } catch (const nlohmann::json::exception&) {
    fail(ErrorKind::ContractViolation, std::string("bad value for '") + key + "'");
  }
}

// Sets fields from a JSON object through named setters; unknown keys fail.
using Setters = std::map<std::string, std::function<void(const Json&)>>;

void apply(const Json& j, const Setters& setters, const std::string& section) {
  if (!j.is_object()) fail(ErrorKind::ContractViolation, "config section '" + section + "' must be an object");
  for (const auto& [key, value] : j.items()) {
    const auto it = setters.find(key);
    if (it == setters.end()) fail(ErrorKind::ContractViolation, "unknown config key '" + section + "." + key + "'");
    try {
      it->second(value);
    } catch (const nlohmann::json::exception&) {
      fail(ErrorKind::ContractViolation, "bad value for config key '" + section + "." + key + "'");
    }
  }
}

template <typename T>
std::function<void(const Json&)> set(T& target) {
  return [&target](const Json& v) { target = v.get<T>(); };
}

const char* name_of(SeedSelection s) {
  return s == SeedSelection::UniformVertex ? "uniform_vertex" : "uniform_cluster";
}

const char* name_of(Coupling c) { return c == Coupling::Direct ? "direct" : "transitive"; }

std::ostream& with_precision(std::ostream& os) {
  os << std::setprecision(12);
  return os;
}

}  // namespace

Json read_json(const fs::path& path) {
  try {
    return Json::parse(read_file(path));
  } catch (const nlohmann::json::parse_error& e) {
    fail(ErrorKind::ContractViolation, path.string() + ": " + e.what());
  }
}

void write_text(const fs::path& path, const std::string& text) {
  std::ofstream out(path, std::ios::binary);
  if (!out) fail(ErrorKind::Io, "cannot write " + path.string());
  out << text;
  if (!out) fail(ErrorKind::Io, "write failed for " + path.string());
}

Json to_json(const PartProposal& p) {
  Json j;
  j["part"] = std::string(part_name(p.part));
  j["x"] = p.x;
  j["y"] = p.y;
  j["theta"] = p.theta;
  j["s"] = p.s;
  j["score"] = p.score;
  j["source_id"] = p.source_id;
  if (p.descriptor) {
    j["descriptor"] = std::vector<double>(p.descriptor->hist.data(),
                                          p.descriptor->hist.data() + p.descriptor->hist.size());
    if (p.descriptor->empty) j["descriptor_empty"] = true;
    if (!p.descriptor->aux.empty()) j["aux"] = p.descriptor->aux;
  }
  return j;
}

PartProposal proposal_from_json(const Json& j) {
  if (!j.is_object()) fail(ErrorKind::InvalidProposal, "proposal record must be an object");
  PartProposal p;
  p.part = part_field(j);
  p.x = field<double>(j, "x");
  p.y = field<double>(j, "y");
  p.theta = j.value("theta", 0.0);
  p.s = j.value("s", 1.0);
  p.score = j.value("score", 0.0);
  p.source_id = j.value("source_id", std::string());
  if (j.contains("descriptor")) {
    const auto bins = field<std::vector<double>>(j, "descriptor");
    Descriptor d;
    d.hist = Eigen::Map<const Histogram>(bins.data(), static_cast<Eigen::Index>(bins.size()));
    d.empty = j.value("descriptor_empty", false);
    if (j.contains("aux")) d.aux = field<std::vector<double>>(j, "aux");
    if (!d.empty && !is_normalized(d.hist, 1e-6))
      fail(ErrorKind::InvalidProposal, "descriptor bins must be non-negative and sum to 1");
    p.descriptor = std::move(d);
  }
  return normalized(p);
}

std::vector<PartProposal> read_proposals(const fs::path& path) {
  std::istringstream in(read_file(path));
  std::vector<PartProposal> out;
  std::string line;
  int n = 0;
  while (std::getline(in, line)) {
    ++n;
    if (line.find_first_not_of(" \t\r") == std::string::npos) continue;
    try {
      out.push_back(proposal_from_json(Json::parse(line)));
    } catch (const nlohmann::json::exception& e) {
      fail(ErrorKind::ContractViolation, path.string() + ":" + std::to_string(n) + ": " + e.what());
    }
  }
  return out;
}

void write_proposals(const fs::path& path, const std::vector<PartProposal>& props) {
  std::string text;
  for (const auto& p : props) text += to_json(p).dump() + "\n";
  write_text(path, text);
}

Json to_json(const Template& t) {
  Json j;
  j["format"] = "mict-template";
  j["version"] = 1;
  j["person_height"] = t.person_height;
  Json parts = Json::object();
  for (Part p : kAllParts) {
    Json list = Json::array();
    for (const auto& prop : t.at(p)) list.push_back(to_json(prop));
    parts[std::string(part_name(p))] = std::move(list);
  }
  j["parts"] = std::move(parts);
  return j;
}

Template template_from_json(const Json& j) {
  if (j.value("format", std::string()) != "mict-template")
    fail(ErrorKind::ContractViolation, "not a template file");
  Template t;
  t.person_height = j.value("person_height", kDefaultPersonHeight);
  const Json parts = field<Json>(j, "parts");
  for (const auto& [name, list] : parts.items()) {
    const auto part = part_from_name(name);
    if (!part) fail(ErrorKind::ContractViolation, "unknown part '" + name + "'");
    for (const auto& rec : list) {
      PartProposal p = proposal_from_json(rec);
      if (p.part != *part) fail(ErrorKind::ContractViolation, "proposal filed under the wrong part");
      t.parts[index(*part)].push_back(std::move(p));
    }
  }
  return t;
}

Template read_template(const fs::path& path) { return template_from_json(read_json(path)); }

void write_template(const fs::path& path, const Template& t) {
  write_text(path, to_json(t).dump() + "\n");
}

Json to_json(const KinematicsModel& km) {
  Json j;
  j["format"] = "mict-kinematics";
  j["version"] = 1;
  Json joints = Json::object();
  for (std::size_t i = 0; i < kJointCount; ++i) {
    const JointModel& m = km.joints()[i];
    Json jm;
    jm["mean"] = std::vector<double>(m.mean.data(), m.mean.data() + 4);
    std::vector<double> cov(16);
    for (int r = 0; r < 4; ++r)
      for (int c = 0; c < 4; ++c) cov[r * 4 + c] = m.covariance(r, c);
    jm["covariance"] = cov;
    joints[std::string(joint_name(static_cast<Joint>(i)))] = std::move(jm);
  }
  j["joints"] = std::move(joints);
  return j;
}

KinematicsModel kinematics_from_json(const Json& j) {
  if (j.value("format", std::string()) != "mict-kinematics")
    fail(ErrorKind::ContractViolation, "not a kinematics file");
  const Json& joints = field<Json>(j, "joints");
  std::array<JointModel, kJointCount> models;
  for (std::size_t i = 0; i < kJointCount; ++i) {
    const std::string name(joint_name(static_cast<Joint>(i)));
    if (!joints.contains(name)) fail(ErrorKind::ContractViolation, "kinematics lacks joint " + name);
    const auto mean = field<std::vector<double>>(joints[name], "mean");
    const auto cov = field<std::vector<double>>(joints[name], "covariance");
    if (mean.size() != 4 || cov.size() != 16)
      fail(ErrorKind::ContractViolation, "joint " + name + " needs 4 means and 16 covariances");
    Vector4d m;
    Matrix4d c;
    for (int r = 0; r < 4; ++r) {
      m(r) = mean[r];
      for (int k = 0; k < 4; ++k) c(r, k) = cov[r * 4 + k];
    }
    models[i] = JointModel::from(m, c);
  }
  return KinematicsModel(BodyModel::standard(), models);
}

KinematicsModel read_kinematics(const fs::path& path) { return kinematics_from_json(read_json(path)); }

void write_kinematics(const fs::path& path, const KinematicsModel& km) {
  write_text(path, to_json(km).dump(1) + "\n");
}

RunConfig config_from_json(const Json& j) {
  RunConfig cfg;
  GraphParams& g = cfg.match.graph;
  PriorParams& p = cfg.match.prior;
  ChainConfig& c = cfg.match.chain;
  BuildConfig& b = cfg.build;
  SimConfig& s = cfg.sim;
  HistogramLayout layout = s.layout;

  const Setters sections = {
      {"graph", [&](const Json& v) {
         apply(v, {{"lambda", set(g.lambda)},
                   {"min_edge_prob", set(g.min_edge_prob)},
                   {"compatible_floor", set(g.compatible_floor)}},
               "graph");
       }},
      {"prior", [&](const Json& v) {
         apply(v, {{"alpha_u", set(p.alpha_u)}, {"alpha_s", set(p.alpha_s)}, {"scale_quantum", set(p.scale_quantum)}},
               "prior");
       }},
      {"template", [&](const Json& v) {
         apply(v, {{"K", set(b.K)},
                   {"fg_overlap_min", set(b.fg_overlap_min)},
                   {"nms_iou", set(b.nms_iou)},
                   {"dedup_distance", set(b.dedup_distance)},
                   {"person_height", set(b.person_height)}},
               "template");
       }},
      {"histogram", [&](const Json& v) {
         apply(v, {{"hue_bins", set(layout.hue_bins)}, {"sat_bins", set(layout.sat_bins)}, {"val_bins", set(layout.val_bins)}},
               "histogram");
       }},
      {"chain", [&](const Json& v) {
         apply(v, {{"iterations", set(c.iterations)},
                   {"burn_in", set(c.burn_in)},
                   {"chains", set(cfg.match.chains)},
                   {"greedy_init", set(c.greedy_init)},
                   {"same_part_switch", set(c.same_part_switch)},
                   {"copy_switch", set(c.copy_switch)},
                   {"local_move_rate", set(c.local_move_rate)},
                   {"max_switch", set(c.max_switch)},
                   {"seed_selection", [&](const Json& x) {
                      const auto name = x.get<std::string>();
                      if (name == "uniform_vertex") c.seed_selection = SeedSelection::UniformVertex;
                      else if (name == "uniform_cluster") c.seed_selection = SeedSelection::UniformCluster;
                      else fail(ErrorKind::ContractViolation, "unknown seed_selection '" + name + "'");
                    }},
                   {"coupling", [&](const Json& x) {
                      const auto name = x.get<std::string>();
                      if (name == "direct") c.coupling = Coupling::Direct;
                      else if (name == "transitive") c.coupling = Coupling::Transitive;
                      else fail(ErrorKind::ContractViolation, "unknown coupling '" + name + "'");
                    }}},
               "chain");
       }},
      {"simulator", [&](const Json& v) {
         apply(v, {{"n_individuals", set(s.n_individuals)},
                   {"shots_per_individual", set(s.shots_per_individual)},
                   {"position_noise", set(s.pose_noise.position)},
                   {"theta_noise", set(s.pose_noise.theta)},
                   {"log_scale_noise", set(s.pose_noise.log_scale)},
                   {"descriptor_noise", set(s.descriptor_noise)},
                   {"false_alarm_rate", set(s.false_alarm_rate)},
                   {"occlusion_rate", set(s.occlusion_rate)},
                   {"confuser_similarity", set(s.confuser_similarity)},
                   {"person_height", set(s.person_height)},
                   {"height_spread", set(s.height_spread)},
                   {"rest_angle_spread", set(s.rest_angle_spread)},
                   {"prototype_bins", set(s.prototype_bins)},
                   {"symmetric_perturbation", set(s.symmetric_perturbation)}},
               "simulator");
       }},
  };
  apply(j, sections, "config");
  s.layout = layout;

  validate(b);
  validate(c);
  validate(s);
  if (cfg.match.chains < 1) fail(ErrorKind::ContractViolation, "chain.chains must be at least 1");
  if (!(g.lambda > 0)) fail(ErrorKind::ContractViolation, "graph.lambda must be positive");
  if (!(p.scale_quantum > 0)) fail(ErrorKind::ContractViolation, "prior.scale_quantum must be positive");
  if (layout.hue_bins < 1 || layout.sat_bins < 1 || layout.val_bins < 1)
    fail(ErrorKind::ContractViolation, "histogram bins must be positive");
  return cfg;
}

Json to_json(const RunConfig& cfg) {
  const GraphParams& g = cfg.match.graph;
  const PriorParams& p = cfg.match.prior;
  const ChainConfig& c = cfg.match.chain;
  const BuildConfig& b = cfg.build;
  const SimConfig& s = cfg.sim;
  Json j;
  j["graph"] = {{"lambda", g.lambda}, {"min_edge_prob", g.min_edge_prob}, {"compatible_floor", g.compatible_floor}};
  j["prior"] = {{"alpha_u", p.alpha_u}, {"alpha_s", p.alpha_s}, {"scale_quantum", p.scale_quantum}};
  j["template"] = {{"K", b.K},
                   {"fg_overlap_min", b.fg_overlap_min},
                   {"nms_iou", b.nms_iou},
                   {"dedup_distance", b.dedup_distance},
                   {"person_height", b.person_height}};
  j["histogram"] = {{"hue_bins", s.layout.hue_bins}, {"sat_bins", s.layout.sat_bins}, {"val_bins", s.layout.val_bins}};
  j["chain"] = {{"iterations", c.iterations},
                {"burn_in", c.burn_in},
                {"chains", cfg.match.chains},
                {"greedy_init", c.greedy_init},
                {"same_part_switch", c.same_part_switch},
                {"copy_switch", c.copy_switch},
                {"local_move_rate", c.local_move_rate},
                {"max_switch", c.max_switch},
                {"seed_selection", name_of(c.seed_selection)},
                {"coupling", name_of(c.coupling)}};
  j["simulator"] = {{"n_individuals", s.n_individuals},
                    {"shots_per_individual", s.shots_per_individual},
                    {"position_noise", s.pose_noise.position},
                    {"theta_noise", s.pose_noise.theta},
                    {"log_scale_noise", s.pose_noise.log_scale},
                    {"descriptor_noise", s.descriptor_noise},
                    {"false_alarm_rate", s.false_alarm_rate},
                    {"occlusion_rate", s.occlusion_rate},
                    {"confuser_similarity", s.confuser_similarity},
                    {"person_height", s.person_height},
                    {"height_spread", s.height_spread},
                    {"rest_angle_spread", s.rest_angle_spread},
                    {"prototype_bins", s.prototype_bins},
                    {"symmetric_perturbation", s.symmetric_perturbation}};
  return j;
}

RunConfig read_config(const fs::path& path) { return config_from_json(read_json(path)); }

void write_graph(std::ostream& os, const CandidacyGraph& g) {
  with_precision(os);
  os << "# vertices\nvertex,part,template_index,target,appearance,target_scale\n";
  for (std::size_t i = 0; i < g.size(); ++i) {
    const Vertex& v = g.vertex(i);
    os << i << ',' << part_name(v.part) << ',' << v.template_index << ',';
    if (v.target) os << *v.target;
    os << ',' << v.appearance << ',' << v.target_scale << '\n';
  }
  os << "# edges\na,b,kind,prob\n";
  for (const Edge& e : g.edges()) os << e.a << ',' << e.b << ',' << to_string(e.kind) << ',' << e.prob << '\n';
}

void write_breakdown(std::ostream& os, const CandidacyGraph& g, const ScoreBreakdown& b) {
  with_precision(os);
  os << "term,value\n";
  os << "likelihood," << b.likelihood << '\n';
  os << "unmatched_parts," << b.unmatched << '\n';
  os << "unmatched_term," << b.unmatched_term << '\n';
  os << "scale_levels," << b.scale_levels << '\n';
  os << "scale_term," << b.scale_term << '\n';
  os << "compatible_term," << b.compatible_term << '\n';
  os << "competitive_term," << b.competitive_term << '\n';
  os << "forbidden_pairs," << b.forbidden_pairs << '\n';
  os << "total," << b.total << '\n';
  os << "# edges\na,b,kind,prob,log_term\n";
  for (const auto& c : b.edges) {
    const Edge& e = g.edge(c.edge);
    os << e.a << ',' << e.b << ',' << to_string(e.kind) << ',' << e.prob << ',';
    if (c.value) os << *c.value;
    else os << "-inf";
    os << '\n';
  }
}

void write_trace(std::ostream& os, const std::vector<TraceRecord>& trace) {
  with_precision(os);
  os << "iteration,cluster_size,accepted,log_posterior\n";
  for (const auto& t : trace)
    os << t.iteration << ',' << t.cluster_size << ',' << (t.accepted ? 1 : 0) << ',' << t.log_posterior << '\n';
}

void write_truth(std::ostream& os, const GroundTruth& truth) {
  with_precision(os);
  os << "individual,part,proposal,x0,y0,x1,y1,x2,y2,x3,y3\n";
  for (const auto& person : truth.people) {
    for (Part p : kAllParts) {
      os << person.individual_id << ',' << part_name(p) << ',';
      if (person.proposal[index(p)]) os << *person.proposal[index(p)];
      for (const auto& c : person.rects[index(p)].corners) os << ',' << c.x() << ',' << c.y();
      os << '\n';
    }
  }
}

GroundTruth read_truth(const fs::path& path) {
  std::istringstream in(read_file(path));
  std::string line;
  std::getline(in, line);  // header
  GroundTruth out;
  std::map<int, std::size_t> slot;
  int n = 1;
  while (std::getline(in, line)) {
    ++n;
    if (line.empty()) continue;
    std::vector<std::string> cells;
    std::stringstream ss(line);
    std::string cell;
    while (std::getline(ss, cell, ',')) cells.push_back(cell);
    if (!line.empty() && line.back() == ',') cells.emplace_back();
    if (cells.size() != 11) fail(ErrorKind::ContractViolation, path.string() + ":" + std::to_string(n) + ": expected 11 fields");
    try {
      const int id = std::stoi(cells[0]);
      const auto part = part_from_name(cells[1]);
      if (!part) fail(ErrorKind::ContractViolation, "unknown part '" + cells[1] + "'");
      auto [it, fresh] = slot.try_emplace(id, out.people.size());
      if (fresh) {
        out.people.emplace_back();
        out.people.back().individual_id = id;
      }
      PersonTruth& person = out.people[it->second];
      if (!cells[2].empty()) person.proposal[index(*part)] = std::stoi(cells[2]);
      OrientedRectd r;
      for (int k = 0; k < 4; ++k) r.corners[k] = {std::stod(cells[3 + 2 * k]), std::stod(cells[4 + 2 * k])};
      person.rects[index(*part)] = r;
      person.box.extend(r.bounds());
    } catch (const std::logic_error&) {
      fail(ErrorKind::ContractViolation, path.string() + ":" + std::to_string(n) + ": malformed number");
    }
  }
  return out;
}

void write_cmc(std::ostream& os, const CmcCurve& c) {
  with_precision(os);
  os << "rank,rate\n";
  for (std::size_t r = 0; r < c.rates.size(); ++r) os << r + 1 << ',' << c.rates[r] << '\n';
}

void write_ranking(std::ostream& os, const RankedResult& r) {
  with_precision(os);
  for (std::size_t k = 0; k < r.ranking.size(); ++k)
    os << r.query_id << ',' << k + 1 << ',' << r.ranking[k].first << ',' << r.ranking[k].second << '\n';
}

SceneBundle read_bundle(const fs::path& dir) {
  if (!fs::is_directory(dir)) fail(ErrorKind::Io, dir.string() + " is not a directory");
  const Json meta = read_json(dir / "scene.json");
  SceneBundle b;
  b.id = meta.value("id", dir.filename().string());
  b.width = field<int>(meta, "width");
  b.height = field<int>(meta, "height");
  b.person_height = meta.value("person_height", kDefaultPersonHeight);
  if (b.width <= 0 || b.height <= 0) fail(ErrorKind::ContractViolation, "scene size must be positive");
  b.proposals = read_proposals(dir / "proposals.jsonl");
  if (fs::exists(dir / "mask.pbm")) {
    b.mask = read_pbm(dir / "mask.pbm");
    if (b.mask->width() != b.width || b.mask->height() != b.height)
      fail(ErrorKind::ContractViolation, "mask size differs from the scene size");
  }
  if (fs::exists(dir / "truth.csv")) b.truth = read_truth(dir / "truth.csv");
  return b;
}

void write_bundle(const fs::path& dir, const SceneBundle& b, const Raster* render) {
  std::error_code ec;
  fs::create_directories(dir, ec);
  if (ec) fail(ErrorKind::Io, "cannot create " + dir.string());
  Json meta;
  meta["id"] = b.id;
  meta["width"] = b.width;
  meta["height"] = b.height;
  meta["person_height"] = b.person_height;
  write_text(dir / "scene.json", meta.dump(1) + "\n");
  write_proposals(dir / "proposals.jsonl", b.proposals);
  if (b.mask) write_pbm(dir / "mask.pbm", *b.mask);
  if (b.truth) {
    std::ostringstream ss;
    write_truth(ss, *b.truth);
    write_text(dir / "truth.csv", ss.str());
  }
  if (render) write_ppm(dir / "render.ppm", *render);
}

ReferenceShot to_reference(const SceneBundle& b) {
  ReferenceShot r;
  r.proposals = b.proposals;
  r.mask = b.mask;
  r.width = b.width;
  r.height = b.height;
  r.id = b.id;
  return r;
}

Scene to_scene(const SceneBundle& b, const BuildConfig& cfg) {
  BuildConfig local = cfg;
  local.person_height = b.person_height;
  return build_scene(b.proposals, b.mask ? &*b.mask : nullptr, b.width, b.height, local, b.id);
}

void write_svg(std::ostream& os, int width, int height, const std::vector<OrientedRectd>& parts,
               const std::vector<OverlayBox>& boxes, const std::string& background) {
  with_precision(os);
  os << "<svg xmlns=\"http://www.w3.org/2000/svg\" xmlns:xlink=\"http://www.w3.org/1999/xlink\" width=\"" << width
     << "\" height=\"" << height << "\" viewBox=\"0 0 " << width << ' ' << height << "\">\n";
  if (!background.empty())
    os << "  <image xlink:href=\"" << background << "\" x=\"0\" y=\"0\" width=\"" << width << "\" height=\"" << height
       << "\"/>\n";
  else
    os << "  <rect x=\"0\" y=\"0\" width=\"" << width << "\" height=\"" << height << "\" fill=\"#f4f4f4\"/>\n";
  for (const auto& r : parts) {
    os << "  <polygon fill=\"none\" stroke=\"#1f77b4\" stroke-width=\"1.5\" points=\"";
    for (std::size_t i = 0; i < 4; ++i) os << (i ? " " : "") << r.corners[i].x() << ',' << r.corners[i].y();
    os << "\"/>\n";
  }
  for (const auto& b : boxes) {
    const auto lo = b.box.min();
    const auto size = b.box.sizes();
    os << "  <rect fill=\"none\" stroke=\"" << b.color << "\" stroke-width=\"2\" x=\"" << lo.x() << "\" y=\"" << lo.y()
       << "\" width=\"" << size.x() << "\" height=\"" << size.y() << "\"/>\n";
    if (!b.label.empty())
      os << "  <text x=\"" << lo.x() << "\" y=\"" << lo.y() - 3 << "\" font-size=\"10\" fill=\"" << b.color << "\">"
         << b.label << "</text>\n";
  }
  os << "</svg>\n";
}

}  // namespace mict
