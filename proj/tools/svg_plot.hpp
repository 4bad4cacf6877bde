#pragma once

#include <string>
#include <vector>

namespace svg {

struct Series {
    std::string label;
    std::vector<double> x, y;
    std::string color = "#1f77b4";
    bool markers = true;
    bool dashed = false;
};

struct Panel {
    std::string title, xlabel, ylabel;
    bool logx = true, logy = true;
    std::vector<Series> series;
    std::vector<std::pair<double, std::string>> vlines;  // x position, label
};

// one row of panels (wrapped at `columns`), written as a standalone SVG
std::string render(const std::vector<Panel>& panels, std::size_t columns = 3);
void write(const std::string& path, const std::vector<Panel>& panels, std::size_t columns = 3);

const std::string& palette(std::size_t i);

}  // namespace svg
