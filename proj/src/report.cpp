#include "spectree/report.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <sstream>

#include "spectree/common.hpp"

namespace spectree::report {

std::string format_double(double v) {
  char buf[40];
  std::snprintf(buf, sizeof(buf), "%.12g", v);
  return buf;
}

json sweep_to_json(const asymp::SweepReport& rep) {
  json j;
  j["schema_version"] = 1;
  j["regime"] = rep.regime;
  j["expected_slope"] = rep.expected_slope;
  j["mass_g0"] = rep.mass_g0;
  j["fit"] = {{"slope", rep.fit.slope},
              {"intercept", rep.fit.intercept},
              {"stderr_slope", rep.fit.stderr_slope},
              {"r2", rep.fit.r2},
              {"points_used", rep.fit.n_used}};
  j["pass"] = rep.pass;
  j["verdict"] = rep.verdict;
  json recs = json::array();
  for (const auto& r : rep.records) {
    json rec;
    rec["lambda"] = r.lambda;
    rec["E1"] = r.has_eigenvalue ? json(r.E1) : json(nullptr);
    rec["E_minus"] = r.E_minus;
    rec["E_plus"] = r.E_plus;
    rec["N_minus"] = r.N_minus;
    rec["bound_cor1"] = std::isfinite(r.bound_cor1) ? json(r.bound_cor1)
                                                    : json(nullptr);
    rec["certified_channels"] = r.certified_channels;
    rec["bracket_width"] = r.bracket_width;
    rec["reliable"] = r.reliable;
    rec["C1"] = r.C1;
    rec["C2"] = r.C2;
    recs.push_back(rec);
  }
  j["records"] = recs;
  return j;
}

std::string sweep_to_csv(const asymp::SweepReport& rep) {
  std::ostringstream os;
  os << "lambda,E1,E_minus,E_plus,N_minus,bound_cor1,certified_channels\n";
  for (const auto& r : rep.records) {
    os << format_double(r.lambda) << ','
       << (r.has_eigenvalue ? format_double(r.E1) : "") << ','
       << format_double(r.E_minus) << ',' << format_double(r.E_plus) << ','
       << r.N_minus << ','
       << (std::isfinite(r.bound_cor1) ? format_double(r.bound_cor1) : "")
       << ',' << r.certified_channels << '\n';
  }
  return os.str();
}

namespace {

struct Pt {
  double x, y;
};

std::string polyline(const std::vector<Pt>& pts) {
  std::ostringstream os;
  for (const auto& p : pts) os << format_double(p.x) << ',' << format_double(p.y) << ' ';
  return os.str();
}

}  // namespace

std::string sweep_to_svg(const asymp::SweepReport& rep) {
  // Data transform: log10(lambda) or 1/lambda on x, log10|E| on y.
  const bool d2 = rep.regime == "d2-exponential";
  std::vector<Pt> data;
  for (const auto& r : rep.records) {
    if (!r.has_eigenvalue) continue;
    const double x = d2 ? 1.0 / r.lambda : std::log10(r.lambda);
    data.push_back({x, std::log10(std::abs(r.E1))});
  }
  const int W = 640, H = 480, margin = 56;
  std::ostringstream os;
  os << "<svg xmlns='http://www.w3.org/2000/svg' width='" << W << "' height='"
     << H << "'>\n";
  if (data.size() < 2) {
    os << "<text x='20' y='40'>not enough points</text>\n</svg>\n";
    return os.str();
  }
  double xlo = data[0].x, xhi = data[0].x, ylo = data[0].y, yhi = data[0].y;
  for (const auto& p : data) {
    xlo = std::min(xlo, p.x);
    xhi = std::max(xhi, p.x);
    ylo = std::min(ylo, p.y);
    yhi = std::max(yhi, p.y);
  }
  if (xhi == xlo) xhi = xlo + 1;
  if (yhi == ylo) yhi = ylo + 1;
  auto sx = [&](double x) {
    return margin + (x - xlo) / (xhi - xlo) * (W - 2 * margin);
  };
  auto sy = [&](double y) {
    return H - margin - (y - ylo) / (yhi - ylo) * (H - 2 * margin);
  };
  os << "<rect x='" << margin << "' y='" << margin << "' width='"
     << W - 2 * margin << "' height='" << H - 2 * margin
     << "' fill='none' stroke='black'/>\n";
  for (const auto& p : data)
    os << "<circle cx='" << format_double(sx(p.x)) << "' cy='"
       << format_double(sy(p.y)) << "' r='3' fill='steelblue'/>\n";
  // Fit line in the transformed coordinates. The stored fit uses natural
  // logs on y (and x for the power law); rescale to log10.
  const double ln10 = std::log(10.0);
  std::vector<Pt> line;
  for (double x : {xlo, xhi}) {
    double y;
    if (d2)
      y = (rep.fit.slope * x + rep.fit.intercept) / ln10;
    else
      y = (rep.fit.slope * (x * ln10) + rep.fit.intercept) / ln10;
    line.push_back({sx(x), sy(y)});
  }
  os << "<polyline points='" << polyline(line)
     << "' fill='none' stroke='crimson'/>\n";
  os << "<text x='" << margin << "' y='" << margin - 12 << "'>" << rep.regime
     << ": slope " << format_double(rep.fit.slope) << ", R2 "
     << format_double(rep.fit.r2) << "</text>\n";
  os << "<text x='" << W / 2 << "' y='" << H - 16 << "'>"
     << (d2 ? "1/lambda" : "log10 lambda") << "</text>\n";
  os << "</svg>\n";
  return os.str();
}

void write_text_file(const std::string& path, const std::string& content) {
  std::ofstream f(path, std::ios::binary);
  if (!f) throw Error("io", "cannot write " + path);
  f << content;
}

void write_json_file(const std::string& path, const json& j) {
  write_text_file(path, j.dump(2) + "\n");
}

}  // namespace spectree::report
