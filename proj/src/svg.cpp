#include "pistop/svg.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <stdexcept>

namespace pistop {

namespace {

std::string num(double v) {
    char buf[32];
    std::snprintf(buf, sizeof(buf), "%.6g", v);
    return buf;
}

// round a span to a tick spacing of 1/2/5 * 10^k
double nice_tick(double span) {
    const double raw = span / 5.0;
    const double mag = std::pow(10.0, std::floor(std::log10(raw)));
    const double r = raw / mag;
    if (r < 1.5) return mag;
    if (r < 3.5) return 2.0 * mag;
    if (r < 7.5) return 5.0 * mag;
    return 10.0 * mag;
}

}  // namespace

std::string render_line_plot(const std::vector<double>& x, const std::vector<double>& y,
                             const std::string& x_label, const std::string& y_label,
                             const std::string& title) {
    if (x.size() != y.size() || x.empty())
        throw std::invalid_argument("render_line_plot: need matching non-empty series");

    const double W = 720, H = 480, ml = 80, mr = 24, mt = 40, mb = 56;
    double x_lo = *std::min_element(x.begin(), x.end());
    double x_hi = *std::max_element(x.begin(), x.end());
    double y_lo = std::min(0.0, *std::min_element(y.begin(), y.end()));
    double y_hi = *std::max_element(y.begin(), y.end());
    if (x_hi == x_lo) x_hi = x_lo + 1.0;
    if (y_hi == y_lo) y_hi = y_lo + 1.0;
    y_hi += 0.05 * (y_hi - y_lo);

    auto px = [&](double v) { return ml + (v - x_lo) / (x_hi - x_lo) * (W - ml - mr); };
    auto py = [&](double v) { return H - mb - (v - y_lo) / (y_hi - y_lo) * (H - mt - mb); };

    std::string s;
    s += "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" + num(W) + "\" height=\"" + num(H) +
         "\" viewBox=\"0 0 " + num(W) + " " + num(H) + "\">\n";
    s += "<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n";
    s += "<text x=\"" + num(W / 2) + "\" y=\"24\" text-anchor=\"middle\" font-family=\"sans-serif\" font-size=\"16\">" +
         title + "</text>\n";

    // axes
    s += "<line x1=\"" + num(ml) + "\" y1=\"" + num(H - mb) + "\" x2=\"" + num(W - mr) + "\" y2=\"" +
         num(H - mb) + "\" stroke=\"black\"/>\n";
    s += "<line x1=\"" + num(ml) + "\" y1=\"" + num(mt) + "\" x2=\"" + num(ml) + "\" y2=\"" +
         num(H - mb) + "\" stroke=\"black\"/>\n";

    const double tx = nice_tick(x_hi - x_lo);
    for (double v = std::ceil(x_lo / tx) * tx; v <= x_hi + 1e-9 * tx; v += tx) {
        s += "<line x1=\"" + num(px(v)) + "\" y1=\"" + num(H - mb) + "\" x2=\"" + num(px(v)) +
             "\" y2=\"" + num(H - mb + 5) + "\" stroke=\"black\"/>\n";
        s += "<text x=\"" + num(px(v)) + "\" y=\"" + num(H - mb + 20) +
             "\" text-anchor=\"middle\" font-family=\"sans-serif\" font-size=\"12\">" + num(v) +
             "</text>\n";
    }
    const double ty = nice_tick(y_hi - y_lo);
    for (double v = std::ceil(y_lo / ty) * ty; v <= y_hi + 1e-9 * ty; v += ty) {
        s += "<line x1=\"" + num(ml - 5) + "\" y1=\"" + num(py(v)) + "\" x2=\"" + num(ml) +
             "\" y2=\"" + num(py(v)) + "\" stroke=\"black\"/>\n";
        s += "<text x=\"" + num(ml - 8) + "\" y=\"" + num(py(v) + 4) +
             "\" text-anchor=\"end\" font-family=\"sans-serif\" font-size=\"12\">" + num(v) +
             "</text>\n";
    }

    s += "<text x=\"" + num((ml + W - mr) / 2) + "\" y=\"" + num(H - 12) +
         "\" text-anchor=\"middle\" font-family=\"sans-serif\" font-size=\"14\">" + x_label +
         "</text>\n";
    s += "<text x=\"18\" y=\"" + num((mt + H - mb) / 2) +
         "\" text-anchor=\"middle\" font-family=\"sans-serif\" font-size=\"14\" transform=\"rotate(-90 18 " +
         num((mt + H - mb) / 2) + ")\">" + y_label + "</text>\n";

    std::string pts;
    for (std::size_t i = 0; i < x.size(); ++i) {
        if (i) pts += ' ';
        pts += num(px(x[i])) + "," + num(py(y[i]));
    }
    s += "<polyline points=\"" + pts + "\" fill=\"none\" stroke=\"#1f77b4\" stroke-width=\"1.5\"/>\n";
    for (std::size_t i = 0; i < x.size(); ++i)
        s += "<circle cx=\"" + num(px(x[i])) + "\" cy=\"" + num(py(y[i])) +
             "\" r=\"2.5\" fill=\"#1f77b4\"/>\n";

    s += "</svg>\n";
    return s;
}

}  // namespace pistop
