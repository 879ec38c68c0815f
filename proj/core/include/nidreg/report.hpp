#pragma once

#include <ostream>
#include <string>
#include <vector>

#include "nidreg/experiments.hpp"

namespace nidreg::report {

/// Shortest round-trip style formatting used in every CSV.
[[nodiscard]] std::string num(double x);

// Column order:
// j0,n,scheme,alpha,h_z,h_w,reps,l2_mean,l2sq_mean,sup_mean,l2_se,l2sq_se,sup_se
void write_mc_csv(std::ostream& out, const bench::McResult& result);
// z,mean,lo,hi,phi,phi1
void write_figure_csv(std::ostream& out, const bench::McCell& cell, const Eigen::VectorXd& z);
void write_figure_svg(std::ostream& out, const bench::McCell& cell, const Eigen::VectorXd& z);
// model,j0,n,gamma,c_const,alpha,reps,coverage,mean_half_width
void write_coverage_csv(std::ostream& out, const std::vector<bench::CoverageRow>& rows);
// n,seed,mu0_scale,alpha,reps,ks,eigen_retained,offset,mixture_variance,stat_mean,stat_variance
void write_limit_csv(std::ostream& out, const std::vector<bench::LimitRow>& rows);
// alpha,variance,nonidentified,operator,bias,bound,empirical_risk
void write_bound_csv(std::ostream& out, const bench::BoundReport& report);
// scheme,alpha,lambda,g
void write_filters_csv(std::ostream& out, const std::vector<bench::FilterRow>& rows);

}  // namespace nidreg::report
