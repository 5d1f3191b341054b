// CSV and SVG emission for the experiment tables.  Every number prints with
// %.17g so identical runs serialize byte-identically; charts are static
// log-log polylines whose axis box is padded to contain every data point.
#include <cmath>
#include <cstdio>
#include <fstream>
#include <stdexcept>
#include <string>

#include "quasikit/xcli.h"

namespace qk {

namespace {

std::string num(double v) {
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.17g", v);
    return buf;
}

std::string num6(double v) {
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.6g", v);
    return buf;
}

}  // namespace

std::string csv_convergence(const ConvergenceTable& t) {
    std::string out = "sample,eps,D,t0\n";
    for (const ConvergenceRow& r : t.rows)
        out += std::to_string(r.sample) + "," + num(r.eps) + "," + num(r.D) + "," +
               num(r.t0) + "\n";
    return out;
}

std::string csv_rho(const RhoTable& t) {
    std::string out = "sample,eps,gap,t0\n";
    for (const RhoRow& r : t.rows)
        out += std::to_string(r.sample) + "," + num(r.eps) + "," + num(r.gap) + "," +
               num(r.t0) + "\n";
    return out;
}

std::string csv_constants(const std::vector<ConstantsRow>& rows) {
    std::string out = "eps,c,cbar,C1,C2,identity_residual\n";
    for (const ConstantsRow& r : rows)
        out += num(r.eps) + "," + num(r.c) + "," + num(r.cbar) + "," + num(r.C1) + "," +
               num(r.C2) + "," + num(r.identity_residual) + "\n";
    return out;
}

std::string csv_solve(const GridSpec& g, const Field& u, double t0, int iterations,
                      double residual) {
    std::string out = "# meta t0=" + num(t0) + " iterations=" + std::to_string(iterations) +
                      " residual=" + num(residual) + "\n";
    out += "t,x,u\n";
    for (int i = 0; i < u.rows; ++i)
        for (int j = 0; j < u.n_x; ++j)
            out += num(g.time(i)) + "," + num(j * g.dx()) + "," + num(u.at(i, j)) + "\n";
    return out;
}

std::string svg_loglog(const std::vector<double>& x,
                       const std::vector<std::vector<double>>& series,
                       const std::string& x_label, const std::string& y_label) {
    if (x.empty() || series.empty())
        throw std::invalid_argument("chart needs at least one point");
    double lx0 = 0.0, lx1 = 0.0, ly0 = 0.0, ly1 = 0.0;
    bool first = true;
    auto lg = [](double v) {
        if (!(v > 0.0)) throw std::invalid_argument("log-log chart needs positive data");
        return std::log10(v);
    };
    for (double v : x) {
        const double l = lg(v);
        lx0 = first ? l : std::min(lx0, l);
        lx1 = first ? l : std::max(lx1, l);
        first = false;
    }
    first = true;
    for (const auto& s : series) {
        if (s.size() != x.size()) throw std::invalid_argument("series length mismatch");
        for (double v : s) {
            const double l = lg(v);
            ly0 = first ? l : std::min(ly0, l);
            ly1 = first ? l : std::max(ly1, l);
            first = false;
        }
    }
    // pad the data box so every marker lands strictly inside the axes
    const double px = std::max(0.05 * (lx1 - lx0), 0.05);
    const double py = std::max(0.05 * (ly1 - ly0), 0.05);
    lx0 -= px;
    lx1 += px;
    ly0 -= py;
    ly1 += py;
    const double X0 = 70, X1 = 620, Y0 = 20, Y1 = 440;
    auto mapx = [&](double v) { return X0 + (lg(v) - lx0) / (lx1 - lx0) * (X1 - X0); };
    auto mapy = [&](double v) { return Y1 - (lg(v) - ly0) / (ly1 - ly0) * (Y1 - Y0); };

    std::string s = "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"640\" height=\"480\" "
                    "viewBox=\"0 0 640 480\">\n";
    s += "<rect x=\"70\" y=\"20\" width=\"550\" height=\"420\" fill=\"none\" "
         "stroke=\"black\"/>\n";
    const char* colors[] = {"#1f6fb4", "#c44e52", "#55a868", "#8172b2"};
    for (size_t si = 0; si < series.size(); ++si) {
        const char* col = colors[si % 4];
        std::string pts;
        for (size_t i = 0; i < x.size(); ++i)
            pts += num6(mapx(x[i])) + "," + num6(mapy(series[si][i])) + " ";
        s += "<polyline fill=\"none\" stroke=\"" + std::string(col) + "\" points=\"" + pts +
             "\"/>\n";
        for (size_t i = 0; i < x.size(); ++i)
            s += "<circle cx=\"" + num6(mapx(x[i])) + "\" cy=\"" + num6(mapy(series[si][i])) +
                 "\" r=\"3\" fill=\"" + std::string(col) + "\"/>\n";
    }
    s += "<text x=\"345\" y=\"470\" text-anchor=\"middle\" font-size=\"14\">" + x_label +
         "</text>\n";
    s += "<text x=\"16\" y=\"230\" text-anchor=\"middle\" font-size=\"14\" "
         "transform=\"rotate(-90 16 230)\">" +
         y_label + "</text>\n";
    s += "<text x=\"70\" y=\"456\" font-size=\"12\">" + num6(std::pow(10.0, lx0)) +
         "</text>\n";
    s += "<text x=\"620\" y=\"456\" text-anchor=\"end\" font-size=\"12\">" +
         num6(std::pow(10.0, lx1)) + "</text>\n";
    s += "<text x=\"66\" y=\"440\" text-anchor=\"end\" font-size=\"12\">" +
         num6(std::pow(10.0, ly0)) + "</text>\n";
    s += "<text x=\"66\" y=\"30\" text-anchor=\"end\" font-size=\"12\">" +
         num6(std::pow(10.0, ly1)) + "</text>\n";
    s += "</svg>\n";
    return s;
}

void write_text_file(const std::string& path, const std::string& content) {
    std::ofstream f(path, std::ios::binary);
    if (!f) throw std::runtime_error("cannot open for writing: " + path);
    f.write(content.data(), (std::streamsize)content.size());
    if (!f) throw std::runtime_error("write failed: " + path);
}

}  // namespace qk
