#include <algorithm>
#include <cmath>
#include <fstream>
#include <map>
#include <sstream>
#include <string>
#include <vector>

#include "colmaps/errors.hpp"
#include "colmaps/harness.hpp"

namespace colmaps {

namespace {

struct Csv {
    std::vector<std::string> header;
    std::vector<std::vector<std::string>> rows;

    int col(const std::string& name) const {
        for (size_t i = 0; i < header.size(); ++i)
            if (header[i] == name) return static_cast<int>(i);
        return -1;
    }
    int require(const std::string& name, const std::string& kind) const {
        int c = col(name);
        if (c < 0)
            throw SchemaMismatchError("plot kind '" + kind + "' needs column '" + name + "'");
        return c;
    }
    double num(size_t r, int c) const {
        const std::string& s = rows[r][static_cast<size_t>(c)];
        return s.empty() ? std::nan("") : std::stod(s);
    }
};

Csv read_csv(const std::string& path) {
    std::ifstream f(path);
    if (!f) throw std::runtime_error("cannot open " + path);
    Csv csv;
    std::string line;
    bool first = true;
    while (std::getline(f, line)) {
        if (line.empty() || line[0] == '#') continue;
        std::vector<std::string> cells;
        std::stringstream ss(line);
        std::string cell;
        while (std::getline(ss, cell, ',')) cells.push_back(cell);
        if (!line.empty() && line.back() == ',') cells.push_back("");
        if (first) { csv.header = cells; first = false; }
        else csv.rows.push_back(cells);
    }
    return csv;
}

struct Frame {
    double x0, x1, y0, y1;                 // data ranges
    static constexpr double W = 640, H = 440;
    static constexpr double ml = 70, mr = 20, mt = 24, mb = 52;
    bool logy = false;

    double px(double x) const { return ml + (x - x0) / (x1 - x0) * (W - ml - mr); }
    double py(double y) const {
        double t = logy ? (std::log(y) - std::log(y0)) / (std::log(y1) - std::log(y0))
                        : (y - y0) / (y1 - y0);
        return H - mb - t * (H - mt - mb);
    }
};

class SvgDoc {
  public:
    explicit SvgDoc(const Frame& fr) : fr_(fr) {
        os_.precision(8);
        os_ << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << Frame::W
            << "\" height=\"" << Frame::H << "\" viewBox=\"0 0 " << Frame::W << " "
            << Frame::H << "\">\n";
        os_ << "<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n";
    }

    void axes(const std::string& xlabel, const std::string& ylabel) {
        os_ << "<g class=\"axes\" stroke=\"black\" fill=\"none\">\n";
        os_ << "<line x1=\"" << Frame::ml << "\" y1=\"" << Frame::H - Frame::mb
            << "\" x2=\"" << Frame::W - Frame::mr << "\" y2=\"" << Frame::H - Frame::mb
            << "\"/>\n";
        os_ << "<line x1=\"" << Frame::ml << "\" y1=\"" << Frame::mt << "\" x2=\""
            << Frame::ml << "\" y2=\"" << Frame::H - Frame::mb << "\"/>\n";
        os_ << "</g>\n";
        os_ << "<text x=\"" << (Frame::ml + Frame::W - Frame::mr) / 2 << "\" y=\""
            << Frame::H - 14 << "\" text-anchor=\"middle\" font-size=\"13\">" << xlabel
            << "</text>\n";
        os_ << "<text x=\"16\" y=\"" << (Frame::mt + Frame::H - Frame::mb) / 2
            << "\" text-anchor=\"middle\" font-size=\"13\" transform=\"rotate(-90 16 "
            << (Frame::mt + Frame::H - Frame::mb) / 2 << ")\">" << ylabel << "</text>\n";
        // a few ticks
        for (int i = 0; i <= 4; ++i) {
            double fx = fr_.x0 + (fr_.x1 - fr_.x0) * i / 4.0;
            os_ << "<text x=\"" << fr_.px(fx) << "\" y=\"" << Frame::H - Frame::mb + 16
                << "\" text-anchor=\"middle\" font-size=\"10\">" << format(fx) << "</text>\n";
            double fy = fr_.logy ? fr_.y0 * std::pow(fr_.y1 / fr_.y0, i / 4.0)
                                 : fr_.y0 + (fr_.y1 - fr_.y0) * i / 4.0;
            os_ << "<text x=\"" << Frame::ml - 6 << "\" y=\"" << fr_.py(fy) + 3
                << "\" text-anchor=\"end\" font-size=\"10\">" << format(fy) << "</text>\n";
        }
    }

    void polyline(const std::vector<std::pair<double, double>>& pts, const std::string& color,
                  const std::string& cls) {
        os_ << "<polyline class=\"" << cls << "\" fill=\"none\" stroke=\"" << color
            << "\" stroke-width=\"1.5\" points=\"";
        for (const auto& [x, y] : pts) os_ << fr_.px(x) << ',' << fr_.py(y) << ' ';
        os_ << "\"/>\n";
    }

    void points(const std::vector<std::pair<double, double>>& pts, const std::string& color) {
        for (const auto& [x, y] : pts)
            os_ << "<circle cx=\"" << fr_.px(x) << "\" cy=\"" << fr_.py(y)
                << "\" r=\"3\" fill=\"" << color << "\"/>\n";
    }

    void error_bars(const std::vector<std::tuple<double, double, double>>& pts,
                    const std::string& color) {
        for (const auto& [x, y, e] : pts) {
            double ylo = fr_.logy ? std::max(y - e, fr_.y0) : y - e;
            os_ << "<line x1=\"" << fr_.px(x) << "\" y1=\"" << fr_.py(ylo) << "\" x2=\""
                << fr_.px(x) << "\" y2=\"" << fr_.py(y + e) << "\" stroke=\"" << color
                << "\" stroke-width=\"1\"/>\n";
        }
    }

    void legend(const std::vector<std::pair<std::string, std::string>>& entries) {
        double y = Frame::mt + 10;
        for (const auto& [label, color] : entries) {
            os_ << "<rect x=\"" << Frame::W - 230 << "\" y=\"" << y - 9
                << "\" width=\"12\" height=\"3\" fill=\"" << color << "\"/>\n";
            os_ << "<text x=\"" << Frame::W - 212 << "\" y=\"" << y
                << "\" font-size=\"11\">" << label << "</text>\n";
            y += 16;
        }
    }

    void save(const std::string& path) {
        os_ << "</svg>\n";
        std::ofstream f(path);
        if (!f) throw std::runtime_error("cannot write " + path);
        f << os_.str();
    }

  private:
    static std::string format(double v) {
        std::ostringstream s;
        s.precision(3);
        s << v;
        return s.str();
    }
    Frame fr_;
    std::ostringstream os_;
};

void plot_survival(const Csv& csv, const std::string& out) {
    int cn = csv.require("n", "survival");
    int cs = csv.require("survivors", "survival");
    int ct = csv.require("total", "survival");
    std::vector<std::pair<double, double>> pts;
    for (size_t r = 0; r < csv.rows.size(); ++r) {
        double s = csv.num(r, cs), t = csv.num(r, ct);
        if (s >= 1 && t > 0) pts.push_back({csv.num(r, cn), s / t});
    }
    if (pts.size() < 2) throw SchemaMismatchError("survival plot needs at least two rows");
    Frame fr{0, pts.back().first, pts.back().second * 0.8, 1.0};
    fr.logy = true;
    SvgDoc doc(fr);
    doc.axes("n", "survival fraction (log)");
    doc.polyline(pts, "#1f77b4", "empirical");
    // least-squares exponential through the tail half
    size_t from = pts.size() / 4;
    double sx = 0, sy = 0, sxx = 0, sxy = 0, n = 0;
    for (size_t i = from; i < pts.size(); ++i) {
        double x = pts[i].first, y = std::log(pts[i].second);
        sx += x; sy += y; sxx += x * x; sxy += x * y; n += 1;
    }
    double slope = (n * sxy - sx * sy) / (n * sxx - sx * sx);
    double icpt = (sy - slope * sx) / n;
    std::vector<std::pair<double, double>> line;
    for (int i = 0; i <= 64; ++i) {
        double x = pts.back().first * i / 64.0;
        line.push_back({x, std::exp(icpt + slope * x)});
    }
    doc.polyline(line, "#d62728", "fit");
    doc.legend({{"empirical survival", "#1f77b4"}, {"fitted exponential", "#d62728"}});
    doc.save(out);
}

void plot_rate_vs_L(const Csv& csv, const std::string& out) {
    int cL = csv.require("L", "rate_vs_L");
    int cr = csv.require("rate_mc", "rate_vs_L");
    int ce = csv.require("rate_mc_stderr", "rate_vs_L");
    int cth = csv.require("theta", "rate_vs_L");
    int ceps = csv.require("eps", "rate_vs_L");
    int cd = csv.require("d", "rate_vs_L");
    std::vector<std::pair<double, double>> pts;
    std::vector<std::tuple<double, double, double>> bars;
    double theta = 1.0, eps = 0.0, dd = 1.0, maxL = 1.0, maxr = 0.0;
    for (size_t r = 0; r < csv.rows.size(); ++r) {
        double L = csv.num(r, cL), rate = csv.num(r, cr), se = csv.num(r, ce);
        if (std::isnan(L) || std::isnan(rate)) continue;
        theta = csv.num(r, cth);
        eps = csv.num(r, ceps);
        dd = csv.num(r, cd);
        pts.push_back({L, rate});
        bars.push_back({L, rate, se});
        maxL = std::max(maxL, L);
        maxr = std::max(maxr, rate);
    }
    if (pts.empty()) throw SchemaMismatchError("rate_vs_L plot has no usable rows");
    Frame fr{0, maxL * 1.05, 0, maxr * 1.2};
    SvgDoc doc(fr);
    doc.axes("L", "first collision rate");
    std::vector<std::pair<double, double>> ref = {
        {0, 0}, {maxL * 1.05, theta * dd * eps * eps * maxL * 1.05}};
    doc.polyline(ref, "#d62728", "reference");
    doc.points(pts, "#1f77b4");
    doc.error_bars(bars, "#1f77b4");
    doc.legend({{"measured rate", "#1f77b4"}, {"theta*L*d*eps^2", "#d62728"}});
    doc.save(out);
}

void plot_rate_vs_eps2(const Csv& csv, const std::string& out) {
    int ceps = csv.require("eps", "rate_vs_eps2");
    int cr = csv.require("rate_mc", "rate_vs_eps2");
    int ce = csv.require("rate_mc_stderr", "rate_vs_eps2");
    int cth = csv.require("theta", "rate_vs_eps2");
    int cL = csv.require("L", "rate_vs_eps2");
    int cd = csv.require("d", "rate_vs_eps2");
    std::vector<std::pair<double, double>> pts;
    std::vector<std::tuple<double, double, double>> bars;
    double theta = 1.0, L = 1.0, dd = 1.0, maxx = 0.0, maxr = 0.0;
    for (size_t r = 0; r < csv.rows.size(); ++r) {
        double eps = csv.num(r, ceps), rate = csv.num(r, cr);
        if (std::isnan(eps) || std::isnan(rate)) continue;
        theta = csv.num(r, cth);
        L = csv.num(r, cL);
        dd = csv.num(r, cd);
        pts.push_back({eps * eps, rate});
        bars.push_back({eps * eps, rate, csv.num(r, ce)});
        maxx = std::max(maxx, eps * eps);
        maxr = std::max(maxr, rate);
    }
    if (pts.empty()) throw SchemaMismatchError("rate_vs_eps2 plot has no usable rows");
    Frame fr{0, maxx * 1.05, 0, maxr * 1.2};
    SvgDoc doc(fr);
    doc.axes("eps^2", "first collision rate");
    std::vector<std::pair<double, double>> ref = {{0, 0}, {maxx * 1.05, theta * L * dd * maxx * 1.05}};
    doc.polyline(ref, "#d62728", "reference");
    doc.points(pts, "#1f77b4");
    doc.error_bars(bars, "#1f77b4");
    doc.legend({{"measured rate", "#1f77b4"}, {"theta*L*d*eps^2", "#d62728"}});
    doc.save(out);
}

void plot_hitting_law(const Csv& csv, const std::string& out) {
    int ct = csv.require("t_eps", "hitting_law");
    int cc = csv.require("censored", "hitting_law");
    std::vector<double> t;
    for (size_t r = 0; r < csv.rows.size(); ++r)
        if (csv.num(r, cc) == 0.0) t.push_back(csv.num(r, ct));
    if (t.size() < 10) throw SchemaMismatchError("hitting_law plot needs uncensored rows");
    std::sort(t.begin(), t.end());
    // normalize to unit mean so the display is scale-free
    double mean = 0;
    for (double v : t) mean += v;
    mean /= static_cast<double>(t.size());
    std::vector<std::pair<double, double>> emp;
    const double n = static_cast<double>(t.size());
    for (size_t i = 0; i < t.size(); i += std::max<size_t>(1, t.size() / 512))
        emp.push_back({t[i] / mean, 1.0 - static_cast<double>(i) / n});
    double tmax = t.back() / mean;
    Frame fr{0, std::min(tmax, 6.0), 1e-3, 1.0};
    fr.logy = true;
    SvgDoc doc(fr);
    doc.axes("rescaled time", "P(T > t) (log)");
    doc.polyline(emp, "#1f77b4", "empirical");
    std::vector<std::pair<double, double>> ref;
    for (int i = 0; i <= 120; ++i) {
        double x = fr.x1 * i / 120.0;
        double y = std::exp(-x);
        if (y >= fr.y0) ref.push_back({x, y});
    }
    doc.polyline(ref, "#d62728", "exp");
    doc.legend({{"empirical survival", "#1f77b4"}, {"exp(-t)", "#d62728"}});
    doc.save(out);
}

}  // namespace

void emit_plot(const std::string& csv_path, const std::string& kind,
               const std::string& svg_path) {
    Csv csv = read_csv(csv_path);
    if (kind == "survival") plot_survival(csv, svg_path);
    else if (kind == "rate_vs_L") plot_rate_vs_L(csv, svg_path);
    else if (kind == "rate_vs_eps2") plot_rate_vs_eps2(csv, svg_path);
    else if (kind == "hitting_law") plot_hitting_law(csv, svg_path);
    else throw SchemaMismatchError("unknown plot kind '" + kind + "'");
}

}  // namespace colmaps
