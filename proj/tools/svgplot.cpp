#include "svgplot.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>

#include "tomlread.hpp"

namespace halfline::tools {
namespace {

constexpr double kWidth = 640.0;
constexpr double kHeight = 480.0;
constexpr double kMargin = 48.0;

std::string num(double v) {
    char buf[32];
    std::snprintf(buf, sizeof(buf), "%.6g", v);
    return buf;
}

struct Frame {
    double re_lo, re_hi, im_lo, im_hi;

    double sx(double re) const {
        return kMargin + (re - re_lo) / (re_hi - re_lo) * (kWidth - 2 * kMargin);
    }
    double sy(double im) const {
        // SVG y grows downward.
        return kHeight - kMargin - (im - im_lo) / (im_hi - im_lo) * (kHeight - 2 * kMargin);
    }
};

std::ofstream open_svg(const std::string& path) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw ConfigError("cannot write " + path);
    out << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << num(kWidth)
        << "\" height=\"" << num(kHeight) << "\" viewBox=\"0 0 " << num(kWidth) << " "
        << num(kHeight) << "\">\n";
    out << "<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n";
    return out;
}

void draw_axes(std::ofstream& out, const Frame& f, const std::string& xlabel,
               const std::string& ylabel) {
    out << "<rect x=\"" << num(kMargin) << "\" y=\"" << num(kMargin) << "\" width=\""
        << num(kWidth - 2 * kMargin) << "\" height=\"" << num(kHeight - 2 * kMargin)
        << "\" fill=\"none\" stroke=\"#444\"/>\n";
    // Corner tick labels carry the data range.
    out << "<text x=\"" << num(kMargin) << "\" y=\"" << num(kHeight - kMargin + 16)
        << "\" font-size=\"11\">" << num(f.re_lo) << "</text>\n";
    out << "<text x=\"" << num(kWidth - kMargin) << "\" y=\"" << num(kHeight - kMargin + 16)
        << "\" font-size=\"11\" text-anchor=\"end\">" << num(f.re_hi) << "</text>\n";
    out << "<text x=\"" << num(kMargin - 4) << "\" y=\"" << num(kHeight - kMargin)
        << "\" font-size=\"11\" text-anchor=\"end\">" << num(f.im_lo) << "</text>\n";
    out << "<text x=\"" << num(kMargin - 4) << "\" y=\"" << num(kMargin + 4)
        << "\" font-size=\"11\" text-anchor=\"end\">" << num(f.im_hi) << "</text>\n";
    out << "<text x=\"" << num(kWidth / 2) << "\" y=\"" << num(kHeight - 12)
        << "\" font-size=\"12\" text-anchor=\"middle\">" << xlabel << "</text>\n";
    out << "<text x=\"14\" y=\"" << num(kHeight / 2)
        << "\" font-size=\"12\" text-anchor=\"middle\" transform=\"rotate(-90 14 "
        << num(kHeight / 2) << ")\">" << ylabel << "</text>\n";
    // Zero lines when they pass through the frame.
    if (f.im_lo < 0.0 && f.im_hi > 0.0) {
        out << "<line x1=\"" << num(kMargin) << "\" y1=\"" << num(f.sy(0.0)) << "\" x2=\""
            << num(kWidth - kMargin) << "\" y2=\"" << num(f.sy(0.0))
            << "\" stroke=\"#bbb\" stroke-dasharray=\"4 3\"/>\n";
    }
    if (f.re_lo < 0.0 && f.re_hi > 0.0) {
        out << "<line x1=\"" << num(f.sx(0.0)) << "\" y1=\"" << num(kMargin) << "\" x2=\""
            << num(f.sx(0.0)) << "\" y2=\"" << num(kHeight - kMargin)
            << "\" stroke=\"#bbb\" stroke-dasharray=\"4 3\"/>\n";
    }
}

}  // namespace

void write_eigenvalue_svg(const std::string& path, const ComplexRect& region,
                          const std::vector<Eigenvalue>& eigenvalues) {
    Frame f{region.re_lo, region.re_hi, region.im_lo, region.im_hi};
    if (f.re_hi <= f.re_lo || f.im_hi <= f.im_lo) {
        f = Frame{f.re_lo - 1, f.re_hi + 1, f.im_lo - 1, f.im_hi + 1};
    }
    auto out = open_svg(path);
    draw_axes(out, f, "Re lambda", "Im lambda");
    for (const auto& e : eigenvalues) {
        const double x = f.sx(e.lambda.real());
        const double y = f.sy(e.lambda.imag());
        const char* color = e.refined ? "#c0392b" : "#e67e22";
        out << "<circle cx=\"" << num(x) << "\" cy=\"" << num(y)
            << "\" r=\"4\" fill=\"" << color << "\"/>\n";
        if (e.multiplicity > 1) {
            out << "<text x=\"" << num(x + 6) << "\" y=\"" << num(y - 6)
                << "\" font-size=\"11\">x" << e.multiplicity << "</text>\n";
        }
    }
    out << "</svg>\n";
}

void write_disk_svg(const std::string& path, const std::vector<WeylDisk>& disks) {
    Frame f{-1, 1, -1, 1};
    if (!disks.empty()) {
        // The first disk is the largest; frame it with a little air.
        const auto& d0 = disks.front();
        const double r = d0.radius * 1.2 + 1e-12;
        f = Frame{d0.center.real() - r, d0.center.real() + r, d0.center.imag() - r,
                  d0.center.imag() + r};
    }
    auto out = open_svg(path);
    draw_axes(out, f, "Re theta", "Im theta");
    const double px_per_unit = (kWidth - 2 * kMargin) / (f.re_hi - f.re_lo);
    int i = 0;
    const int n = static_cast<int>(disks.size());
    for (const auto& d : disks) {
        const double shade = n > 1 ? static_cast<double>(i) / (n - 1) : 0.0;
        const int gray = static_cast<int>(40 + 160 * (1.0 - shade));
        out << "<circle cx=\"" << num(f.sx(d.center.real())) << "\" cy=\""
            << num(f.sy(d.center.imag())) << "\" r=\""
            << num(std::max(d.radius * px_per_unit, 0.75)) << "\" fill=\"none\" stroke=\"rgb("
            << gray << "," << gray / 2 << "," << 200 - gray / 2 << ")\"/>\n";
        ++i;
    }
    if (!disks.empty()) {
        const auto& last = disks.back();
        out << "<circle cx=\"" << num(f.sx(last.center.real())) << "\" cy=\""
            << num(f.sy(last.center.imag())) << "\" r=\"2\" fill=\"#000\"/>\n";
    }
    out << "</svg>\n";
}

void write_region_svg(const std::string& path, const RegionMap& map) {
    Frame f{map.re_lo, map.re_hi, map.im_lo, map.im_hi};
    auto out = open_svg(path);
    // Cells first, frame on top.
    double max_margin = 0.0;
    for (const auto& s : map.samples) {
        if (s.member) max_margin = std::max(max_margin, s.margin);
    }
    const double cw = (kWidth - 2 * kMargin) / std::max(map.nx, 1);
    const double ch = (kHeight - 2 * kMargin) / std::max(map.ny, 1);
    for (int j = 0; j < map.ny; ++j) {
        for (int i = 0; i < map.nx; ++i) {
            const auto& s = map.samples[static_cast<std::size_t>(j) * map.nx + i];
            std::string fill = "#f2f2f2";
            if (s.member) {
                const double t = max_margin > 0.0 ? s.margin / max_margin : 1.0;
                const int g = static_cast<int>(230 - 150 * t);
                fill = "rgb(" + std::to_string(g / 3) + "," + std::to_string(g) + "," +
                       std::to_string(g / 2) + ")";
            }
            out << "<rect x=\"" << num(kMargin + i * cw) << "\" y=\""
                << num(kHeight - kMargin - (j + 1) * ch) << "\" width=\"" << num(cw)
                << "\" height=\"" << num(ch) << "\" fill=\"" << fill << "\"/>\n";
        }
    }
    draw_axes(out, f, "Re lambda", "Im lambda");
    out << "</svg>\n";
}

}  // namespace halfline::tools
