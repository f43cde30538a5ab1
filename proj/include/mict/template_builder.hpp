#pragma once

#include <optional>
#include <string>
#include <vector>

#include "mict/image.hpp"
#include "mict/proposal.hpp"

namespace mict {

struct BuildConfig {
  std::size_t K = 4;             // max proposals per template part
  double fg_overlap_min = 0.75;  // required in-mask fraction of a proposal rectangle
  double nms_iou = 0.5;          // suppress above this IoU; 1 disables
  double dedup_distance = 0.0;   // drop template instances closer than this; 0 disables
  double person_height = kDefaultPersonHeight;
};

void validate(const BuildConfig& cfg);

/// Part proposals detected in one reference image.
struct ReferenceShot {
  std::vector<PartProposal> proposals;
  std::optional<ForegroundMask> mask;
  int width = 0;
  int height = 0;
  std::string id;
};

// Fraction of the rectangle's pixels that are foreground; pixels outside the
// mask count as background.
double foreground_fraction(const OrientedRectd& r, const ForegroundMask& mask);

std::vector<PartProposal> prune_by_foreground(const std::vector<PartProposal>& props,
                                              const ForegroundMask& mask, double min_overlap,
                                              double person_height);

int strip_of(double y, int image_height);

std::vector<PartProposal> strip_filter(const std::vector<PartProposal>& props, int image_height);

// Strict weak order used for greedy suppression: higher score first, then
// source_id, x, y ascending.
bool nms_before(const PartProposal& a, const PartProposal& b);

/// Greedy non-maximum suppression. Proposals from different source images
/// never suppress each other.
std::vector<PartProposal> nms(const std::vector<PartProposal>& props, double iou_thresh,
                              double person_height);

Template build_template(const std::vector<ReferenceShot>& shots, const BuildConfig& cfg,
                        const AuxMetric& aux_metric = zero_aux_metric);

Scene build_scene(const std::vector<PartProposal>& props, const ForegroundMask* mask, int width,
                  int height, const BuildConfig& cfg, std::string id = {});

}  // namespace mict
