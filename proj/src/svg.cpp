#include "rbd/eval/svg.hpp"

#include <sstream>

namespace rbd::eval {

namespace {
constexpr double kPad = 46.0;

std::string fmt(double v) {
  std::ostringstream s;
  s.precision(6);
  s << v;
  return s.str();
}
}  // namespace

SvgCanvas::SvgCanvas(double x_min, double x_max, double y_min, double y_max, int width_px,
                     int height_px, std::string title)
    : x_min_(x_min), x_max_(x_max), y_min_(y_min), y_max_(y_max), w_(width_px), h_(height_px),
      title_(std::move(title)) {
  if (x_max_ <= x_min_) x_max_ = x_min_ + 1.0;
  if (y_max_ <= y_min_) y_max_ = y_min_ + 1.0;
}

double SvgCanvas::px(double x) const {
  return kPad + (x - x_min_) / (x_max_ - x_min_) * (w_ - 2 * kPad);
}

double SvgCanvas::py(double y) const {
  return h_ - kPad - (y - y_min_) / (y_max_ - y_min_) * (h_ - 2 * kPad);
}

void SvgCanvas::circle(double x, double y, double r, const std::string& color, double opacity) {
  std::ostringstream s;
  s << "<circle cx=\"" << fmt(px(x)) << "\" cy=\"" << fmt(py(y)) << "\" r=\"" << r
    << "\" fill=\"" << color << "\" fill-opacity=\"" << opacity << "\"/>\n";
  body_ += s.str();
}

void SvgCanvas::polyline(const std::vector<std::pair<double, double>>& pts,
                         const std::string& color, double width, bool dashed) {
  if (pts.size() < 2) return;
  std::ostringstream s;
  s << "<polyline fill=\"none\" stroke=\"" << color << "\" stroke-width=\"" << width << "\"";
  if (dashed) s << " stroke-dasharray=\"6 4\"";
  s << " points=\"";
  for (const auto& [x, y] : pts) s << fmt(px(x)) << ',' << fmt(py(y)) << ' ';
  s << "\"/>\n";
  body_ += s.str();
}

void SvgCanvas::band(const std::vector<double>& xs, const std::vector<double>& lo,
                     const std::vector<double>& hi, const std::string& color, double opacity) {
  if (xs.size() < 2 || xs.size() != lo.size() || xs.size() != hi.size()) return;
  std::ostringstream s;
  s << "<polygon fill=\"" << color << "\" fill-opacity=\"" << opacity << "\" points=\"";
  for (size_t i = 0; i < xs.size(); ++i) s << fmt(px(xs[i])) << ',' << fmt(py(lo[i])) << ' ';
  for (size_t i = xs.size(); i-- > 0;) s << fmt(px(xs[i])) << ',' << fmt(py(hi[i])) << ' ';
  s << "\"/>\n";
  body_ += s.str();
}

void SvgCanvas::text(double x, double y, const std::string& s, int size_px) {
  std::ostringstream o;
  o << "<text x=\"" << fmt(px(x)) << "\" y=\"" << fmt(py(y)) << "\" font-size=\"" << size_px
    << "\" font-family=\"sans-serif\">" << s << "</text>\n";
  body_ += o.str();
}

std::string SvgCanvas::str() const {
  std::ostringstream s;
  s << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << w_ << "\" height=\"" << h_
    << "\" viewBox=\"0 0 " << w_ << ' ' << h_ << "\">\n";
  s << "<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n";
  // frame + tick labels at the data extremes
  s << "<rect x=\"" << kPad << "\" y=\"" << kPad << "\" width=\"" << (w_ - 2 * kPad)
    << "\" height=\"" << (h_ - 2 * kPad) << "\" fill=\"none\" stroke=\"#444\"/>\n";
  s << "<text x=\"" << kPad << "\" y=\"" << (h_ - kPad + 16) << "\" font-size=\"11\" "
    << "font-family=\"sans-serif\">" << fmt(x_min_) << "</text>\n";
  s << "<text x=\"" << (w_ - kPad - 30) << "\" y=\"" << (h_ - kPad + 16)
    << "\" font-size=\"11\" font-family=\"sans-serif\">" << fmt(x_max_) << "</text>\n";
  s << "<text x=\"" << (kPad - 40) << "\" y=\"" << (h_ - kPad) << "\" font-size=\"11\" "
    << "font-family=\"sans-serif\">" << fmt(y_min_) << "</text>\n";
  s << "<text x=\"" << (kPad - 40) << "\" y=\"" << (kPad + 10) << "\" font-size=\"11\" "
    << "font-family=\"sans-serif\">" << fmt(y_max_) << "</text>\n";
  if (!title_.empty())
    s << "<text x=\"" << (w_ / 2 - 4.0 * title_.size()) << "\" y=\"" << (kPad - 12)
      << "\" font-size=\"14\" font-family=\"sans-serif\">" << title_ << "</text>\n";
  s << body_;
  s << "</svg>\n";
  return s.str();
}

}  // namespace rbd::eval
