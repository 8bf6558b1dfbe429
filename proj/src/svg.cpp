#include "sixsim/svg.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <sstream>

namespace sixsim {

namespace {

std::string fmt(double v) {
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.6g", v);
    return buf;
}

// round a raw span to a pleasant tick step (1/2/5 ladder)
double tick_step(double span) {
    if (!(span > 0)) return 1.0;
    const double raw = span / 5.0;
    const double mag = std::pow(10.0, std::floor(std::log10(raw)));
    const double norm = raw / mag;
    if (norm < 1.5) return mag;
    if (norm < 3.5) return 2.0 * mag;
    if (norm < 7.5) return 5.0 * mag;
    return 10.0 * mag;
}

} // namespace

SvgPlot::SvgPlot(std::string title, std::string x_label, std::string y_label)
    : title_(std::move(title)), x_label_(std::move(x_label)), y_label_(std::move(y_label)) {}

void SvgPlot::add_line(const std::vector<double>& x, const std::vector<double>& y,
                       const std::string& color, bool dashed, const std::string& legend) {
    series_.push_back({x, y, color, dashed, false, legend});
}

void SvgPlot::add_bars(const std::vector<double>& x, const std::vector<double>& y,
                       const std::string& color, const std::string& legend) {
    series_.push_back({x, y, color, false, true, legend});
}

std::string SvgPlot::render(int width, int height) const {
    const double ml = 62, mr = 16, mt = 34, mb = 46;
    const double pw = width - ml - mr, ph = height - mt - mb;

    double xmin = 0, xmax = 1, ymin = 0, ymax = 1;
    bool any = false;
    for (const auto& s : series_) {
        for (std::size_t i = 0; i < s.x.size(); ++i) {
            if (!any) {
                xmin = xmax = s.x[i];
                ymin = ymax = s.y[i];
                any = true;
            }
            xmin = std::min(xmin, s.x[i]);
            xmax = std::max(xmax, s.x[i]);
            ymin = std::min(ymin, s.y[i]);
            ymax = std::max(ymax, s.y[i]);
        }
    }
    if (xmax == xmin) xmax = xmin + 1;
    if (ymax == ymin) ymax = ymin + 1;
    ymin = std::min(ymin, 0.0); // anchor bars and counts at zero
    const double ypad = 0.05 * (ymax - ymin);
    ymax += ypad;

    auto px = [&](double x) { return ml + (x - xmin) / (xmax - xmin) * pw; };
    auto py = [&](double y) { return mt + ph - (y - ymin) / (ymax - ymin) * ph; };

    std::ostringstream os;
    os << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << width << "\" height=\""
       << height << "\" viewBox=\"0 0 " << width << ' ' << height << "\">\n";
    os << "<rect width=\"" << width << "\" height=\"" << height << "\" fill=\"white\"/>\n";
    os << "<text x=\"" << width / 2 << "\" y=\"20\" text-anchor=\"middle\" "
          "font-family=\"sans-serif\" font-size=\"14\">"
       << title_ << "</text>\n";

    // axes
    os << "<line x1=\"" << fmt(ml) << "\" y1=\"" << fmt(mt + ph) << "\" x2=\"" << fmt(ml + pw)
       << "\" y2=\"" << fmt(mt + ph) << "\" stroke=\"black\"/>\n";
    os << "<line x1=\"" << fmt(ml) << "\" y1=\"" << fmt(mt) << "\" x2=\"" << fmt(ml)
       << "\" y2=\"" << fmt(mt + ph) << "\" stroke=\"black\"/>\n";

    const double xs = tick_step(xmax - xmin), ys = tick_step(ymax - ymin);
    for (double tx = std::ceil(xmin / xs) * xs; tx <= xmax + 1e-12; tx += xs) {
        os << "<line x1=\"" << fmt(px(tx)) << "\" y1=\"" << fmt(mt + ph) << "\" x2=\""
           << fmt(px(tx)) << "\" y2=\"" << fmt(mt + ph + 4) << "\" stroke=\"black\"/>\n";
        os << "<text x=\"" << fmt(px(tx)) << "\" y=\"" << fmt(mt + ph + 17)
           << "\" text-anchor=\"middle\" font-family=\"sans-serif\" font-size=\"10\">" << fmt(tx)
           << "</text>\n";
    }
    for (double ty = std::ceil(ymin / ys) * ys; ty <= ymax + 1e-12; ty += ys) {
        os << "<line x1=\"" << fmt(ml - 4) << "\" y1=\"" << fmt(py(ty)) << "\" x2=\"" << fmt(ml)
           << "\" y2=\"" << fmt(py(ty)) << "\" stroke=\"black\"/>\n";
        os << "<text x=\"" << fmt(ml - 7) << "\" y=\"" << fmt(py(ty) + 3)
           << "\" text-anchor=\"end\" font-family=\"sans-serif\" font-size=\"10\">" << fmt(ty)
           << "</text>\n";
    }
    os << "<text x=\"" << width / 2 << "\" y=\"" << height - 8
       << "\" text-anchor=\"middle\" font-family=\"sans-serif\" font-size=\"12\">" << x_label_
       << "</text>\n";
    os << "<text x=\"14\" y=\"" << mt + ph / 2
       << "\" text-anchor=\"middle\" font-family=\"sans-serif\" font-size=\"12\" "
          "transform=\"rotate(-90 14 "
       << mt + ph / 2 << ")\">" << y_label_ << "</text>\n";

    double legend_y = mt + 6;
    for (const auto& s : series_) {
        if (s.bars) {
            double bw = pw / std::max<std::size_t>(s.x.size() * 2, 8);
            for (std::size_t i = 0; i < s.x.size(); ++i) {
                const double x0 = px(s.x[i]) - bw / 2, y0 = py(s.y[i]);
                os << "<rect x=\"" << fmt(x0) << "\" y=\"" << fmt(y0) << "\" width=\"" << fmt(bw)
                   << "\" height=\"" << fmt(mt + ph - y0) << "\" fill=\"" << s.color
                   << "\" fill-opacity=\"0.6\"/>\n";
            }
        } else if (!s.x.empty()) {
            os << "<polyline fill=\"none\" stroke=\"" << s.color << "\" stroke-width=\"1.5\"";
            if (s.dashed) os << " stroke-dasharray=\"6 4\"";
            os << " points=\"";
            for (std::size_t i = 0; i < s.x.size(); ++i) {
                if (i) os << ' ';
                os << fmt(px(s.x[i])) << ',' << fmt(py(s.y[i]));
            }
            os << "\"/>\n";
        }
        if (!s.legend.empty()) {
            os << "<line x1=\"" << fmt(ml + pw - 130) << "\" y1=\"" << fmt(legend_y)
               << "\" x2=\"" << fmt(ml + pw - 110) << "\" y2=\"" << fmt(legend_y)
               << "\" stroke=\"" << s.color << "\" stroke-width=\"2\""
               << (s.dashed ? " stroke-dasharray=\"6 4\"" : "") << "/>\n";
            os << "<text x=\"" << fmt(ml + pw - 105) << "\" y=\"" << fmt(legend_y + 3)
               << "\" font-family=\"sans-serif\" font-size=\"10\">" << s.legend << "</text>\n";
            legend_y += 14;
        }
    }
    os << "</svg>\n";
    return os.str();
}

} // namespace sixsim
