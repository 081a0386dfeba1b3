#include "bws/features/extractor.hpp"

#include "bws/error.hpp"
#include "bws/features/histograms.hpp"
#include "bws/parallel.hpp"

namespace bws::features {

PreparedImage prepare_image(const imaging::ImageRGB& image, const FeatureConfig& cfg) {
  cfg.validate();
  PreparedImage out;
  out.width = image.width;
  out.height = image.height;
  out.lab.resize(image.pixel_count());
  for (std::size_t i = 0; i < image.pixel_count(); ++i) {
    const imaging::Rgb c = image.at(i);
    out.lab[i] = srgb_to_lab(c.r, c.g, c.b);
  }
  out.gray = imaging::to_gray(image);
  if (cfg.include_texture) out.mr8 = mr8_responses(out.gray, cfg);
  return out;
}

RegionFeatures region_feature_vector(const PreparedImage& image, const imaging::Region& region,
                                     const FeatureConfig& cfg) {
  if (region.pixels.empty()) throw ContractError("feature vector of an empty region");
  RegionFeatures out;
  auto& x = out.instance.features;
  x.reserve(cfg.dimension());
  if (cfg.include_color) {
    std::vector<LabPixel> pixels;
    pixels.reserve(region.area());
    for (std::uint32_t p : region.pixels) pixels.push_back(image.lab[p]);
    const auto lab = lab_histogram(pixels, cfg);
    x.insert(x.end(), lab.begin(), lab.end());
  }
  if (cfg.include_texture) {
    const auto lbp = lbp_histogram(image.gray, region.pixels, cfg);
    const auto mr8 = mr8_histogram(image.mr8, region.pixels, cfg);
    x.insert(x.end(), lbp.values.begin(), lbp.values.end());
    x.insert(x.end(), mr8.values.begin(), mr8.values.end());
    out.degenerate = lbp.degenerate || mr8.degenerate;
  }
  out.instance.source_region_id = region.id;
  return out;
}

std::string to_string(Segmentation mode) { return mode == Segmentation::Grid ? "grid" : "meanshift"; }

Segmentation segmentation_from_string(const std::string& name) {
  if (name == "meanshift") return Segmentation::MeanShift;
  if (name == "grid") return Segmentation::Grid;
  throw ConfigError("unknown segmentation mode '" + name + "' (expected meanshift or grid)");
}

BagExtraction bag_from_image(const imaging::ImageRGB& image, std::optional<mil::Label> label,
                             const FeatureConfig& cfg, const ExtractionOptions& options,
                             const std::string& bag_id) {
  cfg.validate();
  const std::string name = bag_id.empty() ? std::string("<image>") : bag_id;
  BagExtraction out;
  try {
    out.mask = imaging::lesion_mask(image);
  } catch (const EmptyLesionError& e) {
    throw EmptyBagError(name + ": " + e.what());
  }
  imaging::RegionMap regions;
  if (options.mode == Segmentation::Grid) {
    regions = imaging::grid_regions(image, out.mask, options.grid_cell);
  } else {
    imaging::MeanShiftParams params = options.meanshift;
    params.threads = options.threads;
    regions = imaging::meanshift_segment(image, params);
  }
  out.regions = imaging::filter_regions(std::move(regions), out.mask);

  std::vector<const imaging::Region*> kept;
  for (const auto& r : out.regions.regions)
    if (r.in_lesion) kept.push_back(&r);
  if (kept.empty()) throw EmptyBagError(name + ": no region lies inside the lesion");

  const PreparedImage prepared = prepare_image(image, cfg);
  std::vector<RegionFeatures> features(kept.size());
  parallel_for(kept.size(), options.threads,
               [&](std::size_t i) { features[i] = region_feature_vector(prepared, *kept[i], cfg); });

  out.bag.bag_id = bag_id;
  out.bag.label = label;
  for (std::size_t i = 0; i < kept.size(); ++i) {
    if (features[i].degenerate)
      out.warnings.push_back(name + ": region " + std::to_string(kept[i]->id) + " has a degenerate texture block");
    out.bag.instances.push_back(std::move(features[i].instance));
  }
  return out;
}

}  // namespace bws::features
