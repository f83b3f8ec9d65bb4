#include "nakao/svg.hpp"

#include <cmath>
#include <stdexcept>

#include <fmt/format.h>

namespace nakao {

namespace {
constexpr double kMargin = 48.0;

std::string escape(const std::string& text) {
  std::string out;
  for (char c : text) {
    switch (c) {
      case '<': out += "&lt;"; break;
      case '>': out += "&gt;"; break;
      case '&': out += "&amp;"; break;
      default: out += c;
    }
  }
  return out;
}
}  // namespace

SvgPlot::SvgPlot(double x_lo, double x_hi, double y_lo, double y_hi, int width, int height)
    : x_lo_(x_lo), x_hi_(x_hi), y_lo_(y_lo), y_hi_(y_hi), width_(width), height_(height) {
  if (!(x_hi > x_lo) || !(y_hi > y_lo)) throw std::invalid_argument("SvgPlot: empty data window");
  if (width <= 2 * kMargin || height <= 2 * kMargin) throw std::invalid_argument("SvgPlot: canvas too small");
}

double SvgPlot::sx(double x) const { return kMargin + (x - x_lo_) / (x_hi_ - x_lo_) * (width_ - 2 * kMargin); }
double SvgPlot::sy(double y) const { return height_ - kMargin - (y - y_lo_) / (y_hi_ - y_lo_) * (height_ - 2 * kMargin); }

void SvgPlot::points(const std::vector<std::pair<double, double>>& xy, const std::string& color, double radius) {
  std::string group = fmt::format("<g fill=\"{}\">\n", color);
  for (const auto& [x, y] : xy) {
    if (!std::isfinite(x) || !std::isfinite(y)) continue;
    group += fmt::format("<circle cx=\"{:.2f}\" cy=\"{:.2f}\" r=\"{:.2f}\"/>\n", sx(x), sy(y), radius);
  }
  group += "</g>";
  body_.push_back(std::move(group));
}

void SvgPlot::polyline(const std::vector<std::pair<double, double>>& xy, const std::string& color, double stroke) {
  std::string coords;
  auto flush = [&] {
    if (coords.empty()) return;
    body_.push_back(fmt::format("<polyline fill=\"none\" stroke=\"{}\" stroke-width=\"{:.2f}\" points=\"{}\"/>", color,
                                stroke, coords));
    coords.clear();
  };
  for (const auto& [x, y] : xy) {
    if (!std::isfinite(x) || !std::isfinite(y)) {
      flush();
      continue;
    }
    if (!coords.empty()) coords += ' ';
    coords += fmt::format("{:.2f},{:.2f}", sx(x), sy(y));
  }
  flush();
}

void SvgPlot::label(double x, double y, const std::string& text) {
  body_.push_back(fmt::format("<text x=\"{:.2f}\" y=\"{:.2f}\" font-size=\"12\">{}</text>", sx(x), sy(y), escape(text)));
}

void SvgPlot::axis_labels(const std::string& x_name, const std::string& y_name) {
  body_.push_back(fmt::format("<text x=\"{:.2f}\" y=\"{:.2f}\" font-size=\"14\" text-anchor=\"middle\">{}</text>",
                              width_ / 2.0, height_ - 12.0, escape(x_name)));
  body_.push_back(fmt::format(
      "<text x=\"16\" y=\"{:.2f}\" font-size=\"14\" text-anchor=\"middle\" transform=\"rotate(-90 16 {:.2f})\">{}</text>",
      height_ / 2.0, height_ / 2.0, escape(y_name)));
  body_.push_back(fmt::format("<text x=\"{:.2f}\" y=\"{:.2f}\" font-size=\"11\">{:g}</text>", sx(x_lo_), sy(y_lo_) + 16, x_lo_));
  body_.push_back(fmt::format("<text x=\"{:.2f}\" y=\"{:.2f}\" font-size=\"11\" text-anchor=\"end\">{:g}</text>", sx(x_hi_),
                              sy(y_lo_) + 16, x_hi_));
  body_.push_back(fmt::format("<text x=\"{:.2f}\" y=\"{:.2f}\" font-size=\"11\" text-anchor=\"end\">{:g}</text>", sx(x_lo_) - 4,
                              sy(y_hi_) + 4, y_hi_));
}

std::string SvgPlot::str() const {
  std::string out = fmt::format(
      "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"{0}\" height=\"{1}\" viewBox=\"0 0 {0} {1}\">\n", width_, height_);
  out += fmt::format("<rect width=\"{}\" height=\"{}\" fill=\"white\"/>\n", width_, height_);
  out += fmt::format("<rect x=\"{0:.2f}\" y=\"{1:.2f}\" width=\"{2:.2f}\" height=\"{3:.2f}\" fill=\"none\" stroke=\"black\"/>\n",
                     kMargin, kMargin, width_ - 2 * kMargin, height_ - 2 * kMargin);
  for (const auto& item : body_) out += item + '\n';
  out += "</svg>\n";
  return out;
}

}  // namespace nakao
