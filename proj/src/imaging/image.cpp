#include "bws/imaging/image.hpp"

#include <algorithm>
#include <cmath>

#include <opencv2/core.hpp>
#include <opencv2/imgcodecs.hpp>

namespace bws::imaging {

ImageRGB::ImageRGB(int w, int h, Rgb fill) : width(w), height(h) {
  if (w < 1 || h < 1) throw ContractError("image dimensions must be positive");
  pixels.resize(static_cast<std::size_t>(w) * h * 3);
  for (std::size_t i = 0; i < pixel_count(); ++i) set(i, fill);
}

ImageRGB load_image(const std::filesystem::path& path) {
  if (!std::filesystem::is_regular_file(path)) throw IoError("cannot read image " + path.string());
  cv::Mat raw;
  try {
    raw = cv::imread(path.string(), cv::IMREAD_UNCHANGED);
  } catch (const cv::Exception& e) {
    throw IoError("cannot decode image " + path.string() + ": " + e.what());
  }
  if (raw.empty()) throw IoError("cannot decode image " + path.string());

  cv::Mat eight;
  if (raw.depth() == CV_8U) {
    eight = raw;
  } else if (raw.depth() == CV_16U) {
    // Keep the high byte; truncation, not rounding.
    cv::Mat shifted(raw.size(), CV_MAKETYPE(CV_8U, raw.channels()));
    const std::size_t n = raw.total() * raw.channels();
    const auto* src = raw.ptr<std::uint16_t>();
    auto* dst = shifted.ptr<std::uint8_t>();
    for (std::size_t i = 0; i < n; ++i) dst[i] = static_cast<std::uint8_t>(src[i] >> 8);
    eight = shifted;
  } else {
    throw IoError("unsupported sample depth in " + path.string());
  }

  ImageRGB image(eight.cols, eight.rows);
  const int channels = eight.channels();
  if (channels != 1 && channels != 2 && channels != 3 && channels != 4)
    throw IoError("unsupported channel count in " + path.string());
  for (int y = 0; y < eight.rows; ++y) {
    const std::uint8_t* row = eight.ptr<std::uint8_t>(y);
    for (int x = 0; x < eight.cols; ++x) {
      const std::uint8_t* p = row + static_cast<std::size_t>(x) * channels;
      if (channels <= 2)
        image.set(x, y, {p[0], p[0], p[0]});
      else
        image.set(x, y, {p[2], p[1], p[0]});  // OpenCV stores BGR(A)
    }
  }
  return image;
}

void save_png(const std::filesystem::path& path, const ImageRGB& image) {
  cv::Mat bgr(image.height, image.width, CV_8UC3);
  for (int y = 0; y < image.height; ++y) {
    auto* row = bgr.ptr<std::uint8_t>(y);
    for (int x = 0; x < image.width; ++x) {
      const Rgb c = image.at(x, y);
      row[3 * x] = c.b;
      row[3 * x + 1] = c.g;
      row[3 * x + 2] = c.r;
    }
  }
  if (!cv::imwrite(path.string(), bgr)) throw IoError("cannot write " + path.string());
}

void save_label_png(const std::filesystem::path& path, const Plane<std::uint16_t>& labels) {
  cv::Mat mat(labels.height, labels.width, CV_16UC1);
  for (int y = 0; y < labels.height; ++y)
    for (int x = 0; x < labels.width; ++x) mat.at<std::uint16_t>(y, x) = labels.at(x, y);
  if (!cv::imwrite(path.string(), mat)) throw IoError("cannot write " + path.string());
}

Plane<std::uint16_t> load_label_png(const std::filesystem::path& path) {
  const cv::Mat mat = cv::imread(path.string(), cv::IMREAD_UNCHANGED);
  if (mat.empty() || mat.type() != CV_16UC1) throw IoError("not a 16-bit label image: " + path.string());
  Plane<std::uint16_t> labels(mat.cols, mat.rows);
  for (int y = 0; y < mat.rows; ++y)
    for (int x = 0; x < mat.cols; ++x) labels.at(x, y) = mat.at<std::uint16_t>(y, x);
  return labels;
}

std::uint8_t luma(Rgb c) {
  const long v = std::lround(0.299 * c.r + 0.587 * c.g + 0.114 * c.b);
  return static_cast<std::uint8_t>(std::clamp(v, 0L, 255L));
}

GrayImage to_gray(const ImageRGB& image) {
  GrayImage gray(image.width, image.height);
  for (std::size_t i = 0; i < image.pixel_count(); ++i) gray.data[i] = luma(image.at(i));
  return gray;
}

}  // namespace bws::imaging
