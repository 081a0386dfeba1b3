#include "bws/eval/synth.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>

#include "bws/error.hpp"
#include "bws/eval/manifest.hpp"
#include "bws/imaging/image.hpp"
#include "bws/random.hpp"

namespace bws::eval {

std::string to_string(SynthMode mode) { return mode == SynthMode::Images ? "images" : "vector_bags"; }

SynthMode synth_mode_from_string(const std::string& name) {
  if (name == "vector_bags") return SynthMode::VectorBags;
  if (name == "images") return SynthMode::Images;
  throw ConfigError("unknown synth mode '" + name + "' (expected vector_bags or images)");
}

void SynthConfig::validate() const {
  if (n_pos < 1 || n_neg < 1) throw ConfigError("synth n_pos and n_neg must be >= 1");
  if (m_min < 1 || m_max < m_min) throw ConfigError("synth m range must satisfy 1 <= m_min <= m_max");
  if (mu_pos.empty() || mu_pos.size() != mu_neg.size())
    throw ConfigError("synth cluster means must be non-empty and of equal length");
  if (!(sigma > 0.0)) throw ConfigError("synth sigma must be > 0");
  if (image_size < 64) throw ConfigError("synth image_size must be >= 64");
  if (!(pixel_noise >= 0.0)) throw ConfigError("synth pixel_noise must be >= 0");
}

namespace {

std::string make_id(const char* prefix, int i) {
  char buf[32];
  std::snprintf(buf, sizeof(buf), "%s-%04d", prefix, i);
  return buf;
}

std::vector<double> draw(Rng& rng, const std::vector<double>& mu, double sigma) {
  std::vector<double> x(mu.size());
  for (std::size_t j = 0; j < mu.size(); ++j) x[j] = rng.normal(mu[j], sigma);
  return x;
}

}  // namespace

std::vector<features::BagFile> synth_vector_bags(const SynthConfig& cfg) {
  cfg.validate();
  Rng rng(cfg.seed);
  std::vector<features::BagFile> out;
  for (int cls = 0; cls < 2; ++cls) {
    const bool positive = cls == 0;
    const int count = positive ? cfg.n_pos : cfg.n_neg;
    for (int i = 0; i < count; ++i) {
      const auto m = static_cast<std::size_t>(rng.range(cfg.m_min, cfg.m_max));
      std::vector<mil::Label> truth(m, mil::Label::Negative);
      if (positive) {
        const auto k = static_cast<std::size_t>(rng.range(1, static_cast<long>(m)));
        std::fill(truth.begin(), truth.begin() + static_cast<long>(k), mil::Label::Positive);
        rng.shuffle(truth);
      }
      features::BagFile file;
      file.bag.bag_id = make_id(positive ? "pos" : "neg", i);
      file.bag.label = positive ? mil::Label::Positive : mil::Label::Negative;
      for (mil::Label y : truth) {
        mil::Instance inst;
        inst.features = draw(rng, y == mil::Label::Positive ? cfg.mu_pos : cfg.mu_neg, cfg.sigma);
        file.bag.instances.push_back(std::move(inst));
      }
      file.fingerprint = "synthetic";
      file.instance_labels = std::move(truth);
      out.push_back(std::move(file));
    }
  }
  return out;
}

namespace {

void paint_disk(std::vector<int>& layer, int size, double cx, double cy, double r, int value) {
  for (int y = 0; y < size; ++y)
    for (int x = 0; x < size; ++x) {
      const double dx = x - cx, dy = y - cy;
      if (dx * dx + dy * dy <= r * r) layer[static_cast<std::size_t>(y) * size + x] = value;
    }
}

std::uint8_t noisy(Rng& rng, std::uint8_t v, double sigma) {
  const double s = v + (sigma > 0.0 ? rng.normal(0.0, sigma) : 0.0);
  return static_cast<std::uint8_t>(std::clamp(std::lround(s), 0L, 255L));
}

}  // namespace

std::vector<SynthImage> synth_images(const SynthConfig& cfg) {
  cfg.validate();
  Rng rng(cfg.seed);
  const int size = cfg.image_size;
  std::vector<SynthImage> out;
  for (int cls = 0; cls < 2; ++cls) {
    const bool positive = cls == 0;
    const int count = positive ? cfg.n_pos : cfg.n_neg;
    for (int i = 0; i < count; ++i) {
      // 0 skin, 1 lesion, 2 BWS blob, 3 confounder
      std::vector<int> layer(static_cast<std::size_t>(size) * size, 0);
      const double radius = size * rng.uniform(0.28, 0.34);
      const double cx = size / 2.0 + rng.uniform(-0.05, 0.05) * size;
      const double cy = size / 2.0 + rng.uniform(-0.05, 0.05) * size;
      paint_disk(layer, size, cx, cy, radius, 1);
      // A blob of radius 0.45 R covers about 20% of the lesion, and stays
      // inside it when its centre is within 0.5 R of the lesion centre.
      const double blob_r = 0.45 * radius;
      const double angle = rng.uniform(0.0, 2.0 * 3.141592653589793);
      const double off = rng.uniform(0.0, 0.5 * radius);
      if (cfg.confounder && rng.uniform() < 0.5) {
        const double ca = angle + 3.141592653589793;
        paint_disk(layer, size, cx + off * std::cos(ca), cy + off * std::sin(ca), 0.3 * radius, 3);
      }
      if (positive) paint_disk(layer, size, cx + off * std::cos(angle), cy + off * std::sin(angle), blob_r, 2);

      SynthImage img;
      img.id = make_id(positive ? "pos" : "neg", i);
      img.label = positive ? mil::Label::Positive : mil::Label::Negative;
      img.image = imaging::ImageRGB(size, size);
      static constexpr imaging::Rgb kColors[4] = {kSkinColor, kLesionColor, kBwsColor, kConfounderColor};
      for (std::size_t p = 0; p < layer.size(); ++p) {
        const imaging::Rgb base = kColors[layer[p]];
        const std::uint8_t r = noisy(rng, base.r, cfg.pixel_noise);
        const std::uint8_t g = noisy(rng, base.g, cfg.pixel_noise);
        const std::uint8_t b = noisy(rng, base.b, cfg.pixel_noise);
        img.image.set(p, {r, g, b});
      }
      out.push_back(std::move(img));
    }
  }
  return out;
}

std::filesystem::path synth_write(const SynthConfig& cfg, const std::filesystem::path& dir) {
  std::filesystem::create_directories(dir);
  Manifest manifest;
  if (cfg.mode == SynthMode::VectorBags) {
    std::filesystem::create_directories(dir / "bags");
    for (const auto& file : synth_vector_bags(cfg)) {
      const auto path = dir / "bags" / (file.bag.bag_id + ".json");
      features::save_bag(path, file);
      manifest.entries.push_back({file.bag.bag_id, path, *file.bag.label});
    }
  } else {
    std::filesystem::create_directories(dir / "images");
    for (const auto& img : synth_images(cfg)) {
      const auto path = dir / "images" / (img.id + ".png");
      imaging::save_png(path, img.image);
      manifest.entries.push_back({img.id, path, img.label});
    }
  }
  const auto manifest_path = dir / "manifest.csv";
  save_manifest(manifest_path, manifest);
  return manifest_path;
}

}  // namespace bws::eval
