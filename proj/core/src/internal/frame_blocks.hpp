#pragma once

#include <vector>

#include <Eigen/Dense>

#include "fockdec/decomposition.hpp"
#include "fockdec/geometry.hpp"
#include "fockdec/operators.hpp"

namespace fockdec::detail {

/// (1 - |u><u| / <u|u>) w
FockVector project_out(const FockVector& u, const FockVector& w);

/// Frame columns with the per-subsystem projectors already applied:
/// fproj[k-1].col(i-1) = (1 - rho_k) f_ki, gproj.col(k,i) = (1 - rho_v) g_ki.
struct ProjectedFrame {
  std::vector<Eigen::MatrixXcd> fproj;
  Eigen::MatrixXcd gproj;
};

ProjectedFrame project_frame(const Decomposition& dec, const TangentFrame& frame);

/// Metric matrix over the exponent coefficients: block-diagonal f grams plus
/// the solved-subsystem g gram. include_v = false drops the g part.
Eigen::MatrixXcd eta_hat_matrix(const TangentFrame& frame, const ProjectedFrame& proj,
                                bool include_v);

/// Unscaled coefficient vector of an operator over the frame:
/// w_k <f_ki|(1-rho_k) A|u_k> + w_v <g_ki|(1-rho_v) A|v>.
Eigen::VectorXcd operator_vector(const Decomposition& dec, const TangentFrame& frame,
                                 const ProjectedFrame& proj, const ManyBodyOperator& a,
                                 bool include_v);

/// sqrt(sum_k w_k |(1-rho_k) A u_k|^2); include_v = false skips k = 0.
double combined_spread(const Decomposition& dec, const TangentFrame& frame,
                       const ManyBodyOperator& a, bool include_v);

}  // namespace fockdec::detail
