#pragma once

#include <string>
#include <vector>

namespace sixsim {

// Minimal line/bar plot emitter; byte-deterministic for identical inputs.
class SvgPlot {
public:
    SvgPlot(std::string title, std::string x_label, std::string y_label);

    void add_line(const std::vector<double>& x, const std::vector<double>& y,
                  const std::string& color, bool dashed = false,
                  const std::string& legend = "");
    void add_bars(const std::vector<double>& x, const std::vector<double>& y,
                  const std::string& color, const std::string& legend = "");

    std::string render(int width = 720, int height = 480) const;

private:
    struct Series {
        std::vector<double> x, y;
        std::string color;
        bool dashed = false;
        bool bars = false;
        std::string legend;
    };
    std::string title_, x_label_, y_label_;
    std::vector<Series> series_;
};

} // namespace sixsim
