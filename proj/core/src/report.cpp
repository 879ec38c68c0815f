#include "nidreg/report.hpp"

#include <algorithm>
#include <cstdio>

namespace nidreg::report {

std::string num(double x) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.15g", x);
  return buf;
}

void write_mc_csv(std::ostream& out, const bench::McResult& result) {
  out << "j0,n,scheme,alpha,h_z,h_w,reps,l2_mean,l2sq_mean,sup_mean,l2_se,l2sq_se,sup_se\n";
  for (const auto& c : result.cells) {
    out << bench::j0_label(c.j0) << ',' << c.n << ',' << to_string(c.scheme) << ',' << num(c.alpha) << ','
        << num(c.h_z) << ',' << num(c.h_w) << ',' << c.reps << ',' << num(c.l2_mean) << ',' << num(c.l2sq_mean)
        << ',' << num(c.sup_mean) << ',' << num(c.l2_se) << ',' << num(c.l2sq_se) << ',' << num(c.sup_se) << '\n';
  }
}

void write_figure_csv(std::ostream& out, const bench::McCell& cell, const Eigen::VectorXd& z) {
  out << "z,mean,lo,hi,phi,phi1\n";
  for (Eigen::Index a = 0; a < z.size(); ++a) {
    out << num(z[a]) << ',' << num(cell.mean_fit[a]) << ',' << num(cell.lo[a]) << ',' << num(cell.hi[a]) << ','
        << num(cell.phi[a]) << ',' << num(cell.phi1[a]) << '\n';
  }
}

void write_figure_svg(std::ostream& out, const bench::McCell& cell, const Eigen::VectorXd& z) {
  constexpr double width = 480, height = 320, left = 50, right = 15, top = 30, bottom = 35;
  double ymin = std::min({cell.lo.minCoeff(), cell.phi.minCoeff(), cell.phi1.minCoeff()});
  double ymax = std::max({cell.hi.maxCoeff(), cell.phi.maxCoeff(), cell.phi1.maxCoeff()});
  if (ymax - ymin < 1e-12) {
    ymin -= 0.5;
    ymax += 0.5;
  }
  const double pad = 0.05 * (ymax - ymin);
  ymin -= pad;
  ymax += pad;
  auto px = [&](double x) { return left + x * (width - left - right); };
  auto py = [&](double y) { return top + (ymax - y) / (ymax - ymin) * (height - top - bottom); };
  auto polyline = [&](const Eigen::VectorXd& v, const char* color, const char* dash) {
    out << "<polyline fill=\"none\" stroke=\"" << color << "\" stroke-width=\"1.5\"";
    if (*dash) out << " stroke-dasharray=\"" << dash << '"';
    out << " points=\"";
    for (Eigen::Index a = 0; a < z.size(); ++a) out << num(px(z[a])) << ',' << num(py(v[a])) << ' ';
    out << "\"/>\n";
  };

  out << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << width << "\" height=\"" << height
      << "\" font-family=\"sans-serif\" font-size=\"11\">\n";
  out << "<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n";
  out << "<text x=\"" << width / 2 << "\" y=\"18\" text-anchor=\"middle\">J0 = " << bench::j0_label(cell.j0)
      << ", n = " << cell.n << ", " << cell.reps << " replications</text>\n";
  out << "<rect x=\"" << left << "\" y=\"" << top << "\" width=\"" << width - left - right << "\" height=\""
      << height - top - bottom << "\" fill=\"none\" stroke=\"black\"/>\n";
  for (int t = 0; t <= 4; ++t) {
    const double x = t / 4.0;
    const double y = ymin + (ymax - ymin) * t / 4.0;
    out << "<text x=\"" << num(px(x)) << "\" y=\"" << height - bottom + 14 << "\" text-anchor=\"middle\">"
        << num(x) << "</text>\n";
    char lbl[32];
    std::snprintf(lbl, sizeof lbl, "%.2f", y);
    out << "<text x=\"" << left - 4 << "\" y=\"" << num(py(y) + 4) << "\" text-anchor=\"end\">" << lbl
        << "</text>\n";
  }
  polyline(cell.lo, "#999999", "4,3");
  polyline(cell.hi, "#999999", "4,3");
  polyline(cell.phi, "#1f77b4", "");
  polyline(cell.phi1, "#2ca02c", "2,2");
  polyline(cell.mean_fit, "#d62728", "");
  const char* names[] = {"mean estimate", "phi", "phi_1", "2.5%/97.5%"};
  const char* colors[] = {"#d62728", "#1f77b4", "#2ca02c", "#999999"};
  for (int i = 0; i < 4; ++i) {
    const double y = top + 12 + 13 * i;
    out << "<line x1=\"" << left + 8 << "\" x2=\"" << left + 26 << "\" y1=\"" << y - 4 << "\" y2=\"" << y - 4
        << "\" stroke=\"" << colors[i] << "\" stroke-width=\"2\"/>\n";
    out << "<text x=\"" << left + 30 << "\" y=\"" << y << "\">" << names[i] << "</text>\n";
  }
  out << "</svg>\n";
}

void write_coverage_csv(std::ostream& out, const std::vector<bench::CoverageRow>& rows) {
  out << "model,j0,n,gamma,c_const,alpha,reps,coverage,mean_half_width\n";
  for (const auto& r : rows) {
    out << r.model << ',' << bench::j0_label(r.j0) << ',' << r.n << ',' << num(r.gamma) << ',' << num(r.c_const)
        << ',' << num(r.alpha) << ',' << r.reps << ',' << num(r.coverage) << ',' << num(r.mean_half_width) << '\n';
  }
}

void write_limit_csv(std::ostream& out, const std::vector<bench::LimitRow>& rows) {
  out << "n,seed,mu0_scale,alpha,reps,ks,eigen_retained,offset,mixture_variance,stat_mean,stat_variance\n";
  for (const auto& r : rows) {
    out << r.n << ',' << r.seed << ',' << num(r.mu0_scale) << ',' << num(r.alpha) << ',' << r.reps << ','
        << num(r.ks) << ',' << r.eigen_retained << ',' << num(r.offset) << ',' << num(r.mixture_variance) << ','
        << num(r.stat_mean) << ',' << num(r.stat_variance) << '\n';
  }
}

void write_bound_csv(std::ostream& out, const bench::BoundReport& report) {
  out << "alpha,variance,nonidentified,operator,bias,bound,empirical_risk\n";
  for (const auto& r : report.rows) {
    out << num(r.alpha) << ',' << num(r.variance) << ',' << num(r.nonidentified) << ',' << num(r.operator_term)
        << ',' << num(r.bias) << ',' << num(r.bound) << ',' << num(r.empirical_risk) << '\n';
  }
}

void write_filters_csv(std::ostream& out, const std::vector<bench::FilterRow>& rows) {
  out << "scheme,alpha,lambda,g\n";
  for (const auto& r : rows) {
    out << to_string(r.scheme) << ',' << num(r.alpha) << ',' << num(r.lambda) << ',' << num(r.g) << '\n';
  }
}

}  // namespace nidreg::report
