#include "mict/template_builder.hpp"

#include <algorithm>
#include <cmath>

#include "mict/errors.hpp"

namespace mict {

void validate(const BuildConfig& cfg) {
  if (cfg.K < 1) fail(ErrorKind::ContractViolation, "K must be at least 1");
  if (cfg.fg_overlap_min < 0.0 || cfg.fg_overlap_min > 1.0)
    fail(ErrorKind::ContractViolation, "fg_overlap_min must lie in [0, 1]");
  if (!(cfg.nms_iou > 0.0) || cfg.nms_iou > 1.0)
    fail(ErrorKind::ContractViolation, "nms_iou must lie in (0, 1]");
  if (cfg.dedup_distance < 0.0) fail(ErrorKind::ContractViolation, "dedup_distance must be >= 0");
  if (!(cfg.person_height > 0.0)) fail(ErrorKind::ContractViolation, "person_height must be > 0");
}

double foreground_fraction(const OrientedRectd& r, const ForegroundMask& mask) {
  const int w = mask.width();
  const int h = mask.height();
  auto inside = [&](int x, int y) { return x >= 0 && y >= 0 && x < w && y < h && mask.at(x, y); };
  std::size_t total = 0, fg = 0;
  for_each_pixel_in(r, w, h, false, [&](int x, int y) {
    ++total;
    if (inside(x, y)) ++fg;
  });
  if (total == 0) {
    const auto c = r.center();
    return inside(static_cast<int>(std::floor(c.x())), static_cast<int>(std::floor(c.y()))) ? 1.0 : 0.0;
  }
  return static_cast<double>(fg) / static_cast<double>(total);
}

std::vector<PartProposal> prune_by_foreground(const std::vector<PartProposal>& props,
                                              const ForegroundMask& mask, double min_overlap,
                                              double person_height) {
  std::vector<PartProposal> out;
  for (const auto& p : props)
    if (foreground_fraction(rect_of(p, person_height), mask) >= min_overlap) out.push_back(p);
  return out;
}

int strip_of(double y, int image_height) {
  if (image_height <= 0) return 0;
  return std::clamp(static_cast<int>(std::floor(4.0 * y / image_height)), 0, 3);
}

std::vector<PartProposal> strip_filter(const std::vector<PartProposal>& props, int image_height) {
  std::vector<PartProposal> out;
  for (const auto& p : props)
    if (strip_of(p.y, image_height) == strip_index(p.part)) out.push_back(p);
  return out;
}

bool nms_before(const PartProposal& a, const PartProposal& b) {
  if (a.score != b.score) return a.score > b.score;
  if (a.source_id != b.source_id) return a.source_id < b.source_id;
  if (a.x != b.x) return a.x < b.x;
  return a.y < b.y;
}

std::vector<PartProposal> nms(const std::vector<PartProposal>& props, double iou_thresh,
                              double person_height) {
  std::vector<PartProposal> order = props;
  std::stable_sort(order.begin(), order.end(), nms_before);
  std::vector<PartProposal> kept;
  std::vector<OrientedRectd> kept_rects;
  for (const auto& p : order) {
    const OrientedRectd r = rect_of(p, person_height);
    bool suppressed = false;
    for (std::size_t k = 0; k < kept.size() && !suppressed; ++k)
      suppressed = kept[k].source_id == p.source_id && iou(kept_rects[k], r) > iou_thresh;
    if (!suppressed) {
      kept.push_back(p);
      kept_rects.push_back(r);
    }
  }
  return kept;
}

Template build_template(const std::vector<ReferenceShot>& shots, const BuildConfig& cfg,
                        const AuxMetric& aux_metric) {
  validate(cfg);
  if (shots.empty()) fail(ErrorKind::ContractViolation, "at least one reference shot is required");

  Template t;
  t.person_height = cfg.person_height;
  for (Part part : kAllParts) {
    std::vector<PartProposal> pooled;
    for (const auto& shot : shots) {
      std::vector<PartProposal> mine;
      for (const auto& p : shot.proposals)
        if (p.part == part) mine.push_back(normalized(p));
      if (shot.mask) mine = prune_by_foreground(mine, *shot.mask, cfg.fg_overlap_min, cfg.person_height);
      const int h = shot.height > 0 ? shot.height : (shot.mask ? shot.mask->height() : 0);
      mine = strip_filter(mine, h);
      pooled.insert(pooled.end(), mine.begin(), mine.end());
    }
    pooled = nms(pooled, cfg.nms_iou, cfg.person_height);
    if (pooled.size() > cfg.K) pooled.resize(cfg.K);

    if (cfg.dedup_distance > 0.0) {
      std::vector<PartProposal> kept;
      for (const auto& p : pooled) {
        bool duplicate = false;
        for (const auto& k : kept)
          if (part_distance(p.descriptor, k.descriptor, aux_metric) < cfg.dedup_distance) {
            duplicate = true;
            break;
          }
        if (!duplicate) kept.push_back(p);
      }
      pooled = std::move(kept);
    }

    if (pooled.empty())
      fail(ErrorKind::TemplateIncomplete,
           "no reference proposal survived for part " + std::string(part_name(part)));
    t.parts[index(part)] = std::move(pooled);
  }
  return t;
}

Scene build_scene(const std::vector<PartProposal>& props, const ForegroundMask* mask, int width,
                  int height, const BuildConfig& cfg, std::string id) {
  validate(cfg);
  Scene scene;
  scene.width = width;
  scene.height = height;
  scene.person_height = cfg.person_height;
  scene.id = std::move(id);
  for (Part part : kAllParts) {
    std::vector<PartProposal> mine;
    for (const auto& p : props)
      if (p.part == part) mine.push_back(normalized(p));
    if (mask) mine = prune_by_foreground(mine, *mask, cfg.fg_overlap_min, cfg.person_height);
    scene.proposals[index(part)] = nms(mine, cfg.nms_iou, cfg.person_height);
  }
  return scene;
}

}  // namespace mict
